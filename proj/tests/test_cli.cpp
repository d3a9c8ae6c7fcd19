// Drives the built binary end to end: exit codes, report schemas,
// determinism of the exhaustive mode.

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "schema_check.hpp"

#ifndef LOADFAIR_CLI_PATH
#error "LOADFAIR_CLI_PATH must be defined by the build"
#endif
#ifndef LOADFAIR_SOURCE_DIR
#error "LOADFAIR_SOURCE_DIR must be defined by the build"
#endif

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(LOADFAIR_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

json schema(const std::string& name) {
    std::ifstream in(std::string(LOADFAIR_SOURCE_DIR) + "/schemas/" + name);
    REQUIRE(in.good());
    return json::parse(in);
}

std::string tmp_path(const std::string& name) { return "/tmp/loadfair_test_" + name; }

void write_t1(const std::string& path) {
    std::ofstream f(path);
    f << R"({"points":[{"id":"p0","coords":[0],"group":0},{"id":"p1","coords":[1],"group":0},
             {"id":"p2","coords":[4],"group":0},{"id":"p3","coords":[5],"group":0}],
            "facilities":[{"id":"f0","coords":[0]},{"id":"f1","coords":[5]}],
            "metric":{"type":"euclidean"},"k":2,"alpha":[1],"beta":[0]})";
}

void write_t2(const std::string& path, const std::string& alpha, const std::string& beta) {
    std::ofstream f(path);
    f << R"({"points":[{"id":"p0","coords":[0],"group":0},{"id":"p1","coords":[1],"group":1},
             {"id":"p2","coords":[4],"group":0},{"id":"p3","coords":[5],"group":1}],
            "facilities":[{"id":"f0","coords":[0]},{"id":"f1","coords":[5]}],
            "metric":{"type":"euclidean"},"k":2,"alpha":)"
      << alpha << R"(,"beta":)" << beta << "}";
}

}  // namespace

TEST_CASE("gen produces a schema-valid instance that the solver accepts") {
    const auto path = tmp_path("gen.json");
    const auto gen = run("gen --n 6 --k 2 --ell 2 --dim 2 --seed 7 --out " + path);
    REQUIRE(gen.exit_code == 0);
    std::ifstream in(path);
    const auto inst = json::parse(in);
    CHECK(lftest::schema_errors(inst, schema("instance.schema.json")).empty());

    const auto solved = run("solve --instance " + path + " --epsilon 0.5 --mode exhaustive");
    CHECK(solved.exit_code == 0);
}

TEST_CASE("gen with ell=1 emits vacuous fairness") {
    const auto res = run("gen --n 4 --k 2 --ell 1 --dim 2 --seed 3");
    REQUIRE(res.exit_code == 0);
    const auto inst = json::parse(res.out);
    CHECK(inst["alpha"] == json::array({"1"}));
    CHECK(inst["beta"] == json::array({"0"}));
}

TEST_CASE("gen with dim 0 produces a valid explicit metric") {
    const auto path = tmp_path("gen0.json");
    REQUIRE(run("gen --n 5 --k 2 --ell 2 --dim 0 --seed 11 --out " + path).exit_code == 0);
    // loading revalidates symmetry and the triangle inequality
    const auto solved = run("oracle --instance " + path + " --centers f0,f1");
    CHECK(solved.exit_code == 0);
}

TEST_CASE("solve on the line fixture meets the oracle bound") {
    const auto path = tmp_path("t1.json");
    write_t1(path);
    const auto res = run("solve --instance " + path + " --epsilon 0.5 --mode exhaustive");
    REQUIRE(res.exit_code == 0);
    const auto doc = json::parse(res.out);
    CHECK(lftest::schema_errors(doc, schema("report.schema.json")).empty());
    CHECK(doc["max_load"].get<double>() <= 1.5 + 1e-9);
    CHECK(doc["fair"].get<bool>());
    CHECK(doc["trace"]["mlkc_path"].get<bool>());
}

TEST_CASE("epsilon validation fails with exit 1") {
    const auto path = tmp_path("t1.json");
    write_t1(path);
    CHECK(run("solve --instance " + path + " --epsilon 1.5").exit_code == 1);
}

TEST_CASE("infeasible fairness exits 2") {
    const auto path = tmp_path("t2_bad.json");
    write_t2(path, "[1,1]", "[1,1]");
    CHECK(run("solve --instance " + path + " --epsilon 0.5").exit_code == 2);
}

TEST_CASE("assign decision and optimization modes") {
    const auto path = tmp_path("t1.json");
    write_t1(path);
    SUBCASE("feasible budget") {
        const auto res =
            run("assign --instance " + path + " --centers f0,f1 --budget 1 --epsilon 0.5");
        REQUIRE(res.exit_code == 0);
        const auto doc = json::parse(res.out);
        CHECK(doc["feasible"].get<bool>());
        CHECK(doc["cost"].get<double>() <= 1.5 + 1e-9);
        CHECK(lftest::schema_errors(doc, schema("report.schema.json")).empty());
    }
    SUBCASE("infeasible budget") {
        const auto res =
            run("assign --instance " + path + " --centers f0,f1 --budget 0.5 --epsilon 0.5");
        REQUIRE(res.exit_code == 0);
        const auto doc = json::parse(res.out);
        CHECK(!doc["feasible"].get<bool>());
    }
    SUBCASE("optimization mode") {
        const auto res = run("assign --instance " + path + " --centers f0,f1 --epsilon 0.5");
        REQUIRE(res.exit_code == 0);
        const auto doc = json::parse(res.out);
        CHECK(doc["cost"].get<double>() <= 1.5 + 1e-9);
    }
    SUBCASE("duplicate centers exit 1") {
        CHECK(run("assign --instance " + path + " --centers f0,f0 --epsilon 0.5").exit_code == 1);
    }
    SUBCASE("unknown center exits 1") {
        CHECK(run("assign --instance " + path + " --centers f9 --epsilon 0.5").exit_code == 1);
    }
}

TEST_CASE("oracle reports and cap behaviour") {
    const auto path = tmp_path("t1.json");
    write_t1(path);
    const auto res = run("oracle --instance " + path + " --centers f0,f1");
    REQUIRE(res.exit_code == 0);
    const auto doc = json::parse(res.out);
    CHECK(lftest::schema_errors(doc, schema("oracle_report.schema.json")).empty());
    CHECK(doc["opt"].get<double>() == doctest::Approx(1.0));

    CHECK(run("oracle --instance " + path + " --centers f0,f1 --max-maps 3").exit_code == 3);

    const auto t2path = tmp_path("t2o.json");
    write_t2(t2path, "[0.5,0.5]", "[0.5,0.5]");
    const auto r2 = run("oracle --instance " + t2path + " --centers f0,f1");
    REQUIRE(r2.exit_code == 0);
    CHECK(json::parse(r2.out)["opt"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("lp dump is written") {
    const auto path = tmp_path("t2.json");
    write_t2(path, "[0.5,0.5]", "[0.5,0.5]");
    const auto dump = tmp_path("dump");
    const auto res = run("assign --instance " + path +
                         " --centers f0,f1 --budget 1 --epsilon 0.5 --dump-lp " + dump);
    REQUIRE(res.exit_code == 0);
    std::ifstream km(dump + ".kmedian.lp");
    std::ifstream fl(dump + ".fairlp.lp");
    REQUIRE(km.good());
    REQUIRE(fl.good());
    std::stringstream buf;
    buf << fl.rdbuf();
    CHECK(buf.str().find("General") != std::string::npos);  // integral y and z
}

TEST_CASE("deterministic exhaustive runs are byte-identical") {
    const auto path = tmp_path("det.json");
    REQUIRE(run("gen --n 6 --k 2 --ell 2 --dim 2 --seed 5 --out " + path).exit_code == 0);
    const auto a = run("solve --instance " + path +
                       " --epsilon 0.5 --mode exhaustive --seed 9 --stable-output");
    const auto b = run("solve --instance " + path +
                       " --epsilon 0.5 --mode exhaustive --seed 9 --stable-output");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    // the thread count appears in the manifest config; everything else must
    // agree
    const auto c = run("solve --instance " + path +
                       " --epsilon 0.5 --mode exhaustive --seed 9 --stable-output --threads 4");
    auto doc_a = json::parse(a.out);
    auto doc_c = json::parse(c.out);
    doc_a.erase("manifest");
    doc_c.erase("manifest");
    CHECK(doc_a == doc_c);
}

TEST_CASE("csv ingestion") {
    const auto pts = tmp_path("pts.csv");
    const auto fac = tmp_path("fac.csv");
    {
        std::ofstream p(pts);
        p << "p0,0,0\np1,0,1\np2,0,4\np3,0,5\n";
        std::ofstream f(fac);
        f << "f0,0\nf1,5\n";
    }
    const auto res = run("solve --instance " + pts + " --format csv --facilities " + fac +
                         " --k 2 --alpha 1 --beta 0 --epsilon 0.5");
    REQUIRE(res.exit_code == 0);
    const auto doc = json::parse(res.out);
    CHECK(doc["max_load"].get<double>() <= 1.5 + 1e-9);
}

TEST_CASE("euclidean sampled mode on a small planar instance") {
    const auto path = tmp_path("euc.json");
    REQUIRE(run("gen --n 5 --nf 2 --k 2 --ell 1 --dim 2 --seed 13 --out " + path).exit_code == 0);
    const auto res = run("solve --instance " + path +
                         " --epsilon 0.5 --mode euclidean --reps 1 --seed 2");
    REQUIRE(res.exit_code == 0);
    const auto doc = json::parse(res.out);
    CHECK(lftest::schema_errors(doc, schema("report.schema.json")).empty());
    CHECK(doc.contains("center_coords"));
    CHECK(doc["fair"].get<bool>());
}
