#include "loadfair/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "loadfair/rng.hpp"
#include "test_support.hpp"

using namespace loadfair;

TEST_CASE("rational snapping and exact comparisons") {
    CHECK(Rational::from_double(0.5) == Rational(1, 2));
    CHECK(Rational::from_double(0.2) == Rational(1, 5));
    CHECK(Rational::from_double(1.0 / 3.0) == Rational(1, 3));
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("0.25") == Rational(1, 4));
    CHECK(Rational::parse("1") == Rational(1, 1));
    CHECK_THROWS_AS(Rational::parse("abc"), ParseError);

    // boundary: exact equality must be accepted on both sides
    const Rational half(1, 2);
    CHECK(half.le_times(1, 2));   // 1 <= 1/2 * 2
    CHECK(half.ge_times(1, 2));   // 1 >= 1/2 * 2
    CHECK(!half.le_times(2, 3));  // 2 > 3/2
    CHECK(half.ge_times(2, 3));   // 2 >= 3/2
}

TEST_CASE("t1 fixture loads and round-trips") {
    const auto inst = lftest::t1();
    CHECK(inst.num_points() == 4);
    CHECK(inst.num_facilities() == 2);

    std::stringstream buf;
    save_instance_json(inst, buf);
    const auto back = load_instance_json(buf);
    REQUIRE(back.num_points() == inst.num_points());
    REQUIRE(back.num_facilities() == inst.num_facilities());
    CHECK(back.k == inst.k);
    for (int j = 0; j < inst.num_points(); ++j) {
        CHECK(back.points[j].group == inst.points[j].group);
        for (int f = 0; f < inst.num_facilities(); ++f)
            CHECK(back.point_facility_distance(j, f) ==
                  doctest::Approx(inst.point_facility_distance(j, f)).epsilon(1e-15));
    }
    CHECK(back.alpha[0] == inst.alpha[0]);
    CHECK(back.beta[0] == inst.beta[0]);
    CHECK(instance_digest(back) == instance_digest(inst));
}

TEST_CASE("explicit-metric instances round-trip") {
    lftest::Rng rng(7);
    lftest::RandomSpec spec;
    spec.dim = 0;
    const auto inst = lftest::random_instance(rng, spec);
    std::stringstream buf;
    save_instance_json(inst, buf);
    const auto back = load_instance_json(buf);
    for (int j = 0; j < inst.num_points(); ++j)
        for (int f = 0; f < inst.num_facilities(); ++f)
            CHECK(back.point_facility_distance(j, f) == inst.point_facility_distance(j, f));
}

TEST_CASE("load_instance rejects malformed input") {
    SUBCASE("no points") {
        std::stringstream in(R"({"points":[],"facilities":[{"id":"f0","coords":[0]}],
            "metric":{"type":"euclidean"},"k":1,"alpha":[1],"beta":[0]})");
        CHECK_THROWS_WITH_AS(load_instance_json(in), "no points", ValidationError);
    }
    SUBCASE("asymmetric matrix") {
        std::stringstream in(R"({"points":[{"id":"p0","group":0}],"facilities":[{"id":"f0"}],
            "metric":{"type":"explicit","matrix":[[0,1],[2,0]]},"k":1,"alpha":[1],"beta":[0]})");
        CHECK_THROWS_AS(load_instance_json(in), ValidationError);
    }
    SUBCASE("beta above alpha") {
        std::stringstream in(R"({"points":[{"id":"p0","group":0,"coords":[0]}],
            "facilities":[{"id":"f0","coords":[0]}],
            "metric":{"type":"euclidean"},"k":1,"alpha":[0.3],"beta":[0.5]})");
        CHECK_THROWS_AS(load_instance_json(in), ValidationError);
    }
    SUBCASE("unknown group") {
        std::stringstream in(R"({"points":[{"id":"p0","group":3,"coords":[0]}],
            "facilities":[{"id":"f0","coords":[0]}],
            "metric":{"type":"euclidean"},"k":1,"alpha":[1],"beta":[0]})");
        CHECK_THROWS_AS(load_instance_json(in), ValidationError);
    }
    SUBCASE("triangle violation") {
        std::stringstream in(R"({"points":[{"id":"p0","group":0},{"id":"p1","group":0}],
            "facilities":[{"id":"f0"}],
            "metric":{"type":"explicit","matrix":[[0,1,9],[1,0,1],[9,1,0]]},
            "k":1,"alpha":[1],"beta":[0]})");
        CHECK_THROWS_AS(load_instance_json(in), ValidationError);
    }
}

TEST_CASE("csv loading") {
    std::stringstream pts("p0,0,0\np1,0,1\np2,1,4\np3,1,5\n");
    std::stringstream fac("f0,0\nf1,5\n");
    const auto inst =
        load_instance_csv(pts, fac, 2, {Rational(1, 2), Rational(1, 2)}, {Rational(0, 1), Rational(0, 1)});
    CHECK(inst.num_points() == 4);
    CHECK(inst.point_facility_distance(2, 1) == doctest::Approx(1.0));
}

TEST_CASE("assignment cost on the line fixture") {
    const auto inst = lftest::t1();
    const auto centers = centers_from_facilities(inst, {0, 1});
    Assignment a{centers, {0, 0, 1, 1}};
    CHECK(assignment_cost(inst, a) == doctest::Approx(1.0));

    Assignment all0{centers, {0, 0, 0, 0}};
    CHECK(assignment_cost(inst, all0) == doctest::Approx(10.0));

    // all points coincident with their center
    Instance co;
    co.points = {{"p0", {2.0}, 0}, {"p1", {2.0}, 0}};
    co.facilities = {{"f0", {2.0}}};
    co.k = 1;
    co.alpha = {Rational(1, 1)};
    co.beta = {Rational(0, 1)};
    validate_instance(co);
    Assignment zero{centers_from_facilities(co, {0}), {0, 0}};
    CHECK(assignment_cost(co, zero) == 0.0);

    Assignment bad{centers, {0, 0, 0, 7}};
    CHECK_THROWS_AS(assignment_cost(inst, bad), ValidationError);
}

TEST_CASE("assignment cost is invariant under point permutation") {
    lftest::Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        lftest::RandomSpec spec;
        spec.n = 6;
        spec.dim = trial % 2 == 0 ? 2 : 0;
        auto inst = lftest::random_instance(rng, spec);
        const auto centers = centers_from_facilities(inst, {0, 1});
        std::vector<int> phi(inst.num_points());
        for (auto& c : phi) c = static_cast<int>(rng.next_below(2));
        const double cost = assignment_cost(inst, {centers, phi});

        // rotate the point order together with phi
        Instance rot = inst;
        std::rotate(rot.points.begin(), rot.points.begin() + 2, rot.points.end());
        if (rot.metric == MetricType::Explicit) {
            const int total = inst.num_points() + inst.num_facilities();
            auto& m = rot.matrix;
            m.assign(total, std::vector<double>(total, 0.0));
            auto src_idx = [&](int idx) {
                return idx < inst.num_points() ? (idx + 2) % inst.num_points() : idx;
            };
            for (int a = 0; a < total; ++a)
                for (int b = 0; b < total; ++b) m[a][b] = inst.matrix[src_idx(a)][src_idx(b)];
        }
        std::vector<int> phi2(phi.size());
        for (std::size_t j = 0; j < phi.size(); ++j)
            phi2[j] = phi[(j + 2) % phi.size()];
        CHECK(assignment_cost(rot, {centers, phi2}) == doctest::Approx(cost).epsilon(1e-12));
    }
}

TEST_CASE("fairness checks are exact") {
    SUBCASE("vacuous fairness accepts everything") {
        const auto inst = lftest::t1();
        const auto centers = centers_from_facilities(inst, {0, 1});
        lftest::Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<int> phi(4);
            for (auto& c : phi) c = static_cast<int>(rng.next_below(2));
            CHECK(check_fairness(inst, {centers, phi}).fair);
        }
    }
    SUBCASE("balanced split is fair, monochromatic is not") {
        const auto inst = lftest::t2();
        const auto centers = centers_from_facilities(inst, {0, 1});
        CHECK(check_fairness(inst, {centers, {0, 0, 1, 1}}).fair);
        const auto rep = check_fairness(inst, {centers, {0, 1, 0, 1}});
        CHECK(!rep.fair);
        // both centers violate both group bounds
        std::set<int> centers_hit;
        for (const auto& v : rep.violations) centers_hit.insert(v.center);
        CHECK(centers_hit == std::set<int>{0, 1});
    }
}

TEST_CASE("clustering cost with centers uses the best permutation") {
    const auto inst = lftest::t1();
    Clustering cl;
    cl.blocks = {{0, 1}, {2, 3}};
    const auto centers = centers_from_facilities(inst, {1, 0});  // swapped on purpose
    // the matching must pair block {0,1} with facility 0 and {2,3} with 5
    CHECK(clustering_cost_with_centers(inst, cl, centers) == doctest::Approx(1.0));
}

TEST_CASE("triangle validation can be skipped on load") {
    std::stringstream in(R"({"points":[{"id":"p0","group":0},{"id":"p1","group":0}],
        "facilities":[{"id":"f0"}],
        "metric":{"type":"explicit","matrix":[[0,1,9],[1,0,1],[9,1,0]]},
        "k":1,"alpha":[1],"beta":[0]})");
    const auto inst = load_instance_json(in, /*check_triangle=*/false);
    CHECK(inst.point_facility_distance(0, 0) == 9.0);
}
