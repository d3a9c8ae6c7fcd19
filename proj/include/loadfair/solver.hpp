#pragma once

#include <cstdint>
#include <vector>

#include "loadfair/assignment.hpp"
#include "loadfair/centers.hpp"
#include "loadfair/core.hpp"

namespace loadfair::solver {

enum class Mode { Metric, Euclidean, Exhaustive };

struct SolveConfig {
    double epsilon = 0.5;  // in (0,1)
    Mode mode = Mode::Exhaustive;
    int repetitions = 3;  // sampled modes: independent lists, best result wins
    std::uint64_t seed = 0;
    int threads = 1;
    centers::GenConfig gen;
    assign::BudgetedOptions budgeted;
    std::uint64_t exhaustive_cap = 200000;
};

struct CandidateOutcome {
    CenterSet centers;
    bool feasible = false;
    double cost = 0.0;
};

struct SolveTrace {
    Mode mode = Mode::Exhaustive;
    double eps0 = 0.0;  // per-stage precision from the mode's composition rule
    int repetitions = 1;
    std::vector<std::uint64_t> list_seeds;
    std::size_t candidates = 0;
    bool mlkc_path = false;  // vacuous fairness: LP-only assignment pipeline
};

struct SolveResult {
    CenterSet centers;
    Assignment assignment;
    double cost = 0.0;
    std::vector<CandidateOutcome> per_candidate;
    SolveTrace trace;
};

// Candidate list x approximate assignment, best result wins. Guarantees:
// exhaustive mode (1+eps) deterministically; euclidean mode (1+eps) and
// metric mode (3+eps), each with probability >= 1 - 2^-repetitions.
SolveResult solve_fmlkc(const Instance& inst, const SolveConfig& cfg);

}  // namespace loadfair::solver
