#include "loadfair/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "loadfair/rng.hpp"

namespace loadfair::solver {

namespace {

double mode_eps0(Mode mode, double eps) {
    switch (mode) {
        case Mode::Exhaustive:
            // the list contains the exact best set; the assignment stage
            // carries the whole error budget
            return eps;
        case Mode::Euclidean: {
            const double eps0 = eps / 3.0;
            if (!((1.0 + eps0) * (1.0 + eps0) <= 1.0 + eps + 1e-12))
                throw Error("euclidean composition inequality failed");
            return eps0;
        }
        case Mode::Metric: {
            const double eps0 = eps / 5.0;
            if (!((3.0 + eps0) * (1.0 + eps0) <= 3.0 + eps + 1e-12))
                throw Error("metric composition inequality failed");
            return eps0;
        }
    }
    throw Error("unknown mode");
}

// Sort key for the deterministic tie-break between equal-cost candidates:
// facility ids, or coordinate tuples in the euclidean mode.
std::vector<std::string> candidate_key(const Instance& inst, const CenterSet& cs) {
    std::vector<std::string> key;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i].facility >= 0) {
            key.push_back(inst.facilities[cs[i].facility].id);
        } else {
            std::string s;
            for (double v : cs[i].coords) s += std::to_string(v) + ",";
            key.push_back(s);
        }
    }
    std::sort(key.begin(), key.end());
    return key;
}

}  // namespace

SolveResult solve_fmlkc(const Instance& inst, const SolveConfig& cfg) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw ValidationError("epsilon out of range (0,1)");
    if (cfg.repetitions < 1) throw ValidationError("repetitions must be >= 1");
    if (cfg.mode == Mode::Euclidean &&
        (inst.metric != MetricType::Euclidean || inst.points[0].coords.empty()))
        throw ValidationError("euclidean mode requires coordinates");

    SolveResult result;
    result.trace.mode = cfg.mode;
    result.trace.eps0 = mode_eps0(cfg.mode, cfg.epsilon);
    result.trace.repetitions = cfg.mode == Mode::Exhaustive ? 1 : cfg.repetitions;
    result.trace.mlkc_path = inst.fairness_vacuous();

    // Collect candidates; sampled modes concatenate one list per repetition.
    std::vector<CenterSet> candidates;
    if (cfg.mode == Mode::Exhaustive) {
        candidates = centers::exhaustive_centers(inst, cfg.exhaustive_cap).sets;
    } else {
        Rng root(cfg.seed);
        for (int r = 0; r < cfg.repetitions; ++r) {
            const std::uint64_t list_seed = root.next_u64();
            result.trace.list_seeds.push_back(list_seed);
            auto list = cfg.mode == Mode::Metric
                            ? centers::metric_candidate_centers(inst, result.trace.eps0,
                                                                list_seed, cfg.gen)
                            : centers::euclidean_candidate_centers(inst, result.trace.eps0,
                                                                   list_seed, cfg.gen);
            for (auto& cs : list.sets) candidates.push_back(std::move(cs));
        }
    }
    result.trace.candidates = candidates.size();
    if (candidates.empty()) throw Error("empty candidate list (internal)");

    result.per_candidate.assign(candidates.size(), {});
    (void)inst.groups();  // cache built before the workers share the instance
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;

    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= candidates.size()) return;
            auto& out = result.per_candidate[idx];
            out.centers = candidates[idx];
            try {
                assign::AssignOptions aopts;
                aopts.budgeted = cfg.budgeted;
                const auto res =
                    result.trace.mlkc_path
                        ? assign::mlkc_assignment(inst, candidates[idx], result.trace.eps0, aopts)
                        : assign::fair_assignment(inst, candidates[idx], result.trace.eps0, aopts);
                out.feasible = true;
                out.cost = res.cost;
            } catch (const InfeasibleError&) {
                out.feasible = false;
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Order-free reduction: min cost, ties to the smallest center-id set.
    int best = -1;
    std::vector<std::string> best_key;
    for (std::size_t i = 0; i < result.per_candidate.size(); ++i) {
        const auto& cand = result.per_candidate[i];
        if (!cand.feasible) continue;
        if (best < 0 || cand.cost < result.per_candidate[best].cost) {
            best = static_cast<int>(i);
            best_key = candidate_key(inst, cand.centers);
        } else if (cand.cost == result.per_candidate[best].cost) {
            auto key = candidate_key(inst, cand.centers);
            if (key < best_key) {
                best = static_cast<int>(i);
                best_key = std::move(key);
            }
        }
    }
    if (best < 0)
        throw InfeasibleError("no fair assignment exists for any candidate center set");

    // Re-run the winning candidate to materialize its assignment (candidate
    // evaluation keeps only costs to bound memory).
    {
        assign::AssignOptions aopts;
        aopts.budgeted = cfg.budgeted;
        const auto res = result.trace.mlkc_path
                             ? assign::mlkc_assignment(inst, candidates[best], result.trace.eps0,
                                                       aopts)
                             : assign::fair_assignment(inst, candidates[best], result.trace.eps0,
                                                       aopts);
        result.centers = candidates[best];
        result.assignment = res.assignment;
        result.cost = res.cost;
    }
    const double recomputed = assignment_cost(inst, result.assignment);
    if (std::abs(recomputed - result.cost) > 1e-9 * (1.0 + std::abs(recomputed)))
        throw Error("reported cost does not match a recomputation (internal)");
    result.cost = recomputed;
    if (!check_fairness(inst, result.assignment).fair)
        throw Error("solver produced an unfair assignment (internal)");
    return result;
}

}  // namespace loadfair::solver
