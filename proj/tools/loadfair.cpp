// loadfair: fair minimum-load k-clustering solver front end.
//
// Subcommands: solve (candidate lists x approximate assignment), assign
// (fixed centers: budgeted decision or optimization), gen (synthetic
// instances), oracle (brute-force ground truth).
//
// Exit codes: 0 success, 1 input error, 2 infeasible fairness,
// 3 enumeration cap exceeded, 4 resource limit.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "loadfair/assignment.hpp"
#include "loadfair/centers.hpp"
#include "loadfair/core.hpp"
#include "loadfair/gen.hpp"
#include "loadfair/milp.hpp"
#include "loadfair/oracle.hpp"
#include "loadfair/solver.hpp"

using nlohmann::json;
using namespace loadfair;

namespace {

constexpr const char* kVersion = "0.1.0";

int log_level() {
    const char* env = std::getenv("LOADFAIR_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "error") return 0;
    if (v == "info") return 1;
    if (v == "debug") return 2;
    if (v == "trace") return 3;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[loadfair] " << msg << "\n";
}

struct ManifestInputs {
    std::string command;
    json config;
    std::uint64_t seed = 0;
    std::string digest;
    double wall_ms = 0.0;
    bool stable_output = false;
};

json manifest_json(const ManifestInputs& m) {
    json doc;
    doc["command"] = m.command;
    doc["config"] = m.config;
    doc["seed"] = m.seed;
    doc["instance_digest"] = m.digest;
    doc["version"] = kVersion;
    doc["wall_time_ms"] = m.stable_output ? 0.0 : m.wall_ms;
    return doc;
}

void write_report(const json& doc, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot open output file '" + out_path + "'");
    out << doc.dump(2) << "\n";
}

json assignment_body(const Instance& inst, const Assignment& a) {
    json doc;
    const auto loads = center_loads(inst, a);
    json centers = json::array();
    json coords = json::array();
    bool any_coords = false;
    for (std::size_t i = 0; i < a.centers.size(); ++i) {
        centers.push_back(center_label(inst, a.centers[i], static_cast<int>(i)));
        if (a.centers[i].facility < 0) {
            coords.push_back(a.centers[i].coords);
            any_coords = true;
        } else {
            coords.push_back(nullptr);
        }
    }
    doc["centers"] = centers;
    if (any_coords) doc["center_coords"] = coords;
    json phi = json::object();
    for (int j = 0; j < inst.num_points(); ++j)
        phi[inst.points[j].id] =
            center_label(inst, a.centers[a.center_of[j]], a.center_of[j]);
    doc["phi"] = phi;
    doc["max_load"] = assignment_cost(inst, a);
    json per_center = json::array();
    for (std::size_t i = 0; i < a.centers.size(); ++i) {
        json c;
        c["center"] = center_label(inst, a.centers[i], static_cast<int>(i));
        c["load"] = loads[i].load;
        c["group_counts"] = loads[i].group_counts;
        per_center.push_back(c);
    }
    doc["per_center"] = per_center;
    doc["fair"] = check_fairness(inst, a).fair;
    return doc;
}

Instance load_from_flags(const std::string& path, const std::string& format,
                         const std::string& facilities_path, int k,
                         const std::vector<std::string>& alpha,
                         const std::vector<std::string>& beta, bool check_triangle) {
    if (format == "json") return load_instance_json_file(path, check_triangle);
    if (format != "csv") throw ParseError("format must be json or csv");
    std::ifstream pts(path);
    if (!pts) throw ParseError("cannot open '" + path + "'");
    std::ifstream fac(facilities_path);
    if (!fac) throw ParseError("cannot open facilities CSV '" + facilities_path + "'");
    std::vector<Rational> a, b;
    for (const auto& s : alpha) a.push_back(Rational::parse(s));
    for (const auto& s : beta) b.push_back(Rational::parse(s));
    return load_instance_csv(pts, fac, k, a, b);
}

CenterSet parse_centers(const Instance& inst, const std::string& spec) {
    std::vector<int> pick;
    std::stringstream ss(spec);
    std::string id;
    while (std::getline(ss, id, ',')) {
        const int f = inst.facility_index(id);
        if (f < 0) throw ParseError("unknown center id '" + id + "'");
        for (int prev : pick)
            if (prev == f) throw ParseError("duplicate center id '" + id + "'");
        pick.push_back(f);
    }
    if (pick.empty()) throw ParseError("empty center list");
    return centers_from_facilities(inst, pick);
}

json budget_trace_json(const assign::BudgetTrace& t) {
    json doc;
    doc["working_eps"] = t.working_eps;
    doc["dhat_budget"] = t.dhat_budget;
    doc["delta"] = t.delta;
    doc["costly_classes"] = t.costly_classes;
    doc["guesses_tried"] = t.guesses_tried;
    doc["models_infeasible"] = t.models_infeasible;
    doc["zero_budget_mode"] = t.zero_budget_mode;
    doc["joint"] = t.joint;
    doc["chosen_z"] = t.chosen_z;
    return doc;
}

json search_trace_json(const assign::SearchTrace& t) {
    json doc;
    doc["kmedian_cost"] = t.kmedian_cost;
    doc["grid_lo"] = t.grid_lo;
    doc["grid_hi"] = t.grid_hi;
    doc["found_index"] = t.found_index;
    doc["probes"] = t.probes;
    doc["monotone_fallback"] = t.monotone_fallback;
    doc["budget"] = budget_trace_json(t.last_budget);
    return doc;
}

int run_solve(const std::string& instance_path, const std::string& format,
              const std::string& facilities_path, int csv_k,
              const std::vector<std::string>& csv_alpha, const std::vector<std::string>& csv_beta,
              double epsilon, const std::string& mode_name, int reps, std::uint64_t seed,
              int threads, const std::string& out, bool stable_output,
              const std::string& strategy, bool check_triangle) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto inst =
        load_from_flags(instance_path, format, facilities_path, csv_k, csv_alpha, csv_beta,
                        check_triangle);

    solver::SolveConfig cfg;
    cfg.epsilon = epsilon;
    cfg.repetitions = reps;
    cfg.seed = seed;
    cfg.threads = threads;
    if (mode_name == "metric")
        cfg.mode = solver::Mode::Metric;
    else if (mode_name == "euclidean")
        cfg.mode = solver::Mode::Euclidean;
    else if (mode_name == "exhaustive")
        cfg.mode = solver::Mode::Exhaustive;
    else
        throw ParseError("mode must be metric, euclidean or exhaustive");
    if (strategy == "enumerated")
        cfg.budgeted.strategy = assign::BudgetedStrategy::EnumeratedGuesses;
    else if (strategy != "joint")
        throw ParseError("budget strategy must be joint or enumerated");

    const auto res = solver::solve_fmlkc(inst, cfg);

    ManifestInputs mi;
    mi.command = "solve";
    mi.config = {{"epsilon", epsilon}, {"mode", mode_name},  {"reps", reps},
                 {"seed", seed},       {"threads", threads}, {"strategy", strategy}};
    mi.seed = seed;
    mi.digest = instance_digest(inst);
    mi.stable_output = stable_output;
    mi.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    json doc = assignment_body(inst, res.assignment);
    doc["manifest"] = manifest_json(mi);
    json trace;
    trace["mode"] = mode_name;
    trace["eps0"] = res.trace.eps0;
    trace["repetitions"] = res.trace.repetitions;
    trace["list_seeds"] = res.trace.list_seeds;
    trace["candidates"] = res.trace.candidates;
    trace["mlkc_path"] = res.trace.mlkc_path;
    json table = json::array();
    for (const auto& cand : res.per_candidate) {
        json c;
        json ids = json::array();
        for (std::size_t i = 0; i < cand.centers.size(); ++i)
            ids.push_back(center_label(inst, cand.centers[i], static_cast<int>(i)));
        c["centers"] = ids;
        c["feasible"] = cand.feasible;
        if (cand.feasible) c["cost"] = cand.cost;
        table.push_back(c);
    }
    trace["per_candidate"] = table;
    doc["trace"] = trace;
    write_report(doc, out);
    log_info("solve: cost " + std::to_string(res.cost) + " over " +
             std::to_string(res.trace.candidates) + " candidates");
    return 0;
}

int run_assign(const std::string& instance_path, const std::string& format,
               const std::string& facilities_path, int csv_k,
               const std::vector<std::string>& csv_alpha,
               const std::vector<std::string>& csv_beta, const std::string& centers_spec,
               double epsilon, bool has_budget, double budget, const std::string& out,
               bool stable_output, const std::string& strategy, const std::string& dump_lp,
               bool check_triangle) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto inst =
        load_from_flags(instance_path, format, facilities_path, csv_k, csv_alpha, csv_beta,
                        check_triangle);
    const auto centers = parse_centers(inst, centers_spec);

    assign::BudgetedOptions bopts;
    if (strategy == "enumerated")
        bopts.strategy = assign::BudgetedStrategy::EnumeratedGuesses;
    else if (strategy != "joint")
        throw ParseError("budget strategy must be joint or enumerated");
    if (bopts.strategy == assign::BudgetedStrategy::EnumeratedGuesses &&
        inst.fairness_vacuous())
        bopts.lp_only = true;

    if (!dump_lp.empty()) {
        // models written for external cross-checking
        const auto km = assign::build_fair_kmedian_milp(inst, centers);
        std::ofstream kout(dump_lp + ".kmedian.lp");
        milp::write_lp_format(km.lp, kout);
        if (has_budget && budget > 0.0) {
            const double eps_w = epsilon / (4.0 * inst.num_groups() + 4.0);
            const auto ri = assign::round_distances(inst, centers, eps_w, budget);
            assign::FairLPOptions fopts;
            fopts.joint_z = true;
            const auto fair = assign::build_fair_lp(ri, nullptr, fopts);
            std::ofstream fout(dump_lp + ".fairlp.lp");
            milp::write_lp_format(fair.lp, fout);
        }
        log_info("wrote LP dumps at " + dump_lp + ".*.lp");
    }

    ManifestInputs mi;
    mi.command = "assign";
    mi.config = {{"epsilon", epsilon},
                 {"centers", centers_spec},
                 {"strategy", strategy},
                 {"budget", has_budget ? json(budget) : json(nullptr)}};
    mi.digest = instance_digest(inst);
    mi.stable_output = stable_output;

    json doc;
    if (has_budget) {
        const auto outcome =
            assign::budgeted_fair_assignment(inst, centers, budget, epsilon, bopts);
        doc["feasible"] = outcome.feasible;
        if (outcome.feasible) {
            doc.update(assignment_body(inst, outcome.assignment));
            doc["cost"] = outcome.true_cost;
        }
        doc["trace"] = budget_trace_json(outcome.trace);
    } else {
        assign::AssignOptions aopts;
        aopts.budgeted = bopts;
        const auto res = inst.fairness_vacuous()
                             ? assign::mlkc_assignment(inst, centers, epsilon, aopts)
                             : assign::fair_assignment(inst, centers, epsilon, aopts);
        doc = assignment_body(inst, res.assignment);
        doc["cost"] = res.cost;
        doc["trace"] = search_trace_json(res.trace);
    }
    mi.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    doc["manifest"] = manifest_json(mi);
    write_report(doc, out);
    return 0;
}

int run_gen(int n, int nf, int k, int ell, int dim, std::uint64_t seed, const std::string& slack,
            bool vacuous, const std::string& out) {
    gen::GenSpec spec;
    spec.n = n;
    spec.nf = nf;
    spec.k = k;
    spec.ell = ell;
    spec.dim = dim;
    spec.seed = seed;
    spec.slack = Rational::parse(slack);
    spec.vacuous_fairness = vacuous;
    const auto inst = gen::generate_instance(spec);
    if (out.empty() || out == "-") {
        save_instance_json(inst, std::cout);
    } else {
        std::ofstream f(out);
        if (!f) throw ParseError("cannot open output file '" + out + "'");
        save_instance_json(inst, f);
    }
    log_info("generated instance with digest " + instance_digest(inst));
    return 0;
}

int run_oracle(const std::string& instance_path, const std::string& format,
               const std::string& facilities_path, int csv_k,
               const std::vector<std::string>& csv_alpha,
               const std::vector<std::string>& csv_beta, const std::string& centers_spec,
               const std::string& objective, std::uint64_t max_maps, const std::string& out,
               bool stable_output, bool check_triangle) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto inst =
        load_from_flags(instance_path, format, facilities_path, csv_k, csv_alpha, csv_beta,
                        check_triangle);
    oracle::OracleCaps caps;
    caps.max_maps = max_maps;

    oracle::OracleResult res;
    if (centers_spec.empty()) {
        if (objective != "minmax")
            throw ParseError("global oracle supports only the minmax objective");
        res = oracle::brute_force_fmlkc(inst, caps);
    } else {
        const auto centers = parse_centers(inst, centers_spec);
        res = objective == "kmedian" ? oracle::brute_force_fair_kmedian(inst, centers, caps)
                                     : oracle::brute_force_fair_assignment(inst, centers, caps);
    }

    ManifestInputs mi;
    mi.command = "oracle";
    mi.config = {{"centers", centers_spec.empty() ? json(nullptr) : json(centers_spec)},
                 {"objective", objective},
                 {"max_maps", max_maps}};
    mi.digest = instance_digest(inst);
    mi.stable_output = stable_output;
    mi.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    json doc;
    doc["feasible"] = res.feasible;
    if (res.feasible) {
        doc["opt"] = res.cost;
        doc["optima_count"] = res.optima_count;
        doc.update(assignment_body(inst, res.assignment));
    }
    doc["manifest"] = manifest_json(mi);
    write_report(doc, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair minimum-load k-clustering solver"};
    app.require_subcommand(1);

    struct Common {
        std::string instance, format = "json", facilities;
        int k = 1;
        std::vector<std::string> alpha, beta;
        std::string out;
        bool stable_output = false;
        bool skip_triangle = false;
    };
    auto add_common = [](CLI::App* cmd, Common& c) {
        cmd->add_option("--instance", c.instance, "instance file")->required();
        cmd->add_option("--format", c.format, "instance format: json|csv");
        cmd->add_option("--facilities", c.facilities, "facilities CSV (csv format)");
        cmd->add_option("--k", c.k, "k (csv format)");
        cmd->add_option("--alpha", c.alpha, "alpha values (csv format)");
        cmd->add_option("--beta", c.beta, "beta values (csv format)");
        cmd->add_option("--out", c.out, "report path (default: stdout)");
        cmd->add_flag("--stable-output", c.stable_output,
                      "zero the wall-time field for byte-identical reports");
        cmd->add_flag("--skip-triangle-check", c.skip_triangle,
                      "skip the O(n^3) triangle-inequality validation of explicit metrics");
    };

    Common sc;
    double s_eps = 0.5;
    std::string s_mode = "exhaustive", s_strategy = "joint";
    int s_reps = 3, s_threads = 1;
    std::uint64_t s_seed = 0;
    auto* solve = app.add_subcommand("solve", "solve a full instance");
    add_common(solve, sc);
    solve->add_option("--epsilon", s_eps, "approximation parameter in (0,1)")->required();
    solve->add_option("--mode", s_mode, "metric|euclidean|exhaustive");
    solve->add_option("--reps", s_reps, "sampling repetitions");
    solve->add_option("--seed", s_seed, "root seed");
    solve->add_option("--threads", s_threads, "parallel candidate evaluations");
    solve->add_option("--budget-strategy", s_strategy, "joint|enumerated (debug)");

    Common ac;
    std::string a_centers, a_strategy = "joint", a_dump;
    double a_eps = 0.5, a_budget = -1.0;
    auto* assign_cmd = app.add_subcommand("assign", "assignment with fixed centers");
    add_common(assign_cmd, ac);
    assign_cmd->add_option("--centers", a_centers, "comma-separated facility ids")->required();
    assign_cmd->add_option("--epsilon", a_eps, "approximation parameter in (0,1)")->required();
    auto* budget_opt = assign_cmd->add_option("--budget", a_budget, "decision mode budget");
    assign_cmd->add_option("--budget-strategy", a_strategy, "joint|enumerated (debug)");
    assign_cmd->add_option("--dump-lp", a_dump, "write the models in LP format to PATH.*.lp");

    int g_n = 6, g_nf = 4, g_k = 2, g_ell = 2, g_dim = 2;
    std::uint64_t g_seed = 0;
    std::string g_slack = "1/4", g_out;
    bool g_vacuous = false;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic instance");
    gen_cmd->add_option("--n", g_n, "number of points");
    gen_cmd->add_option("--nf", g_nf, "number of facilities");
    gen_cmd->add_option("--k", g_k, "number of centers");
    gen_cmd->add_option("--ell", g_ell, "number of groups");
    gen_cmd->add_option("--dim", g_dim, "dimension; 0 for a random explicit metric");
    gen_cmd->add_option("--seed", g_seed, "seed");
    gen_cmd->add_option("--slack", g_slack, "fairness slack around group fractions");
    gen_cmd->add_flag("--vacuous", g_vacuous, "force alpha=1, beta=0");
    gen_cmd->add_option("--out", g_out, "output path (default: stdout)");

    Common oc;
    std::string o_centers, o_objective = "minmax";
    std::uint64_t o_maps = 100'000'000ULL;
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force ground truth");
    add_common(oracle_cmd, oc);
    oracle_cmd->add_option("--centers", o_centers, "fixed centers (omit for the global optimum)");
    oracle_cmd->add_option("--objective", o_objective, "minmax|kmedian");
    oracle_cmd->add_option("--max-maps", o_maps, "enumeration cap");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) {
            if (!(s_eps > 0.0 && s_eps < 1.0)) {
                std::cerr << "error: epsilon out of range (0,1)\n";
                return 1;
            }
            return run_solve(sc.instance, sc.format, sc.facilities, sc.k, sc.alpha, sc.beta,
                             s_eps, s_mode, s_reps, s_seed, s_threads, sc.out, sc.stable_output,
                             s_strategy, !sc.skip_triangle);
        }
        if (assign_cmd->parsed()) {
            if (!(a_eps > 0.0 && a_eps < 1.0)) {
                std::cerr << "error: epsilon out of range (0,1)\n";
                return 1;
            }
            return run_assign(ac.instance, ac.format, ac.facilities, ac.k, ac.alpha, ac.beta,
                              a_centers, a_eps, budget_opt->count() > 0, a_budget, ac.out,
                              ac.stable_output, a_strategy, a_dump, !ac.skip_triangle);
        }
        if (gen_cmd->parsed())
            return run_gen(g_n, g_nf, g_k, g_ell, g_dim, g_seed, g_slack, g_vacuous, g_out);
        if (oracle_cmd->parsed())
            return run_oracle(oc.instance, oc.format, oc.facilities, oc.k, oc.alpha, oc.beta,
                              o_centers, o_objective, o_maps, oc.out, oc.stable_output,
                              !oc.skip_triangle);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const CapExceededError& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const ResourceLimitError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
