#pragma once

#include <cstdint>

#include "loadfair/core.hpp"

namespace loadfair::oracle {

// Enumeration budget: k^n maps (times the number of k-subsets for the full
// problem) must stay below this.
struct OracleCaps {
    std::uint64_t max_maps = 100'000'000;
};

struct OracleResult {
    bool feasible = false;
    double cost = 0.0;
    Assignment assignment;  // first optimum in lexicographic map order
    std::uint64_t optima_count = 0;
};

// Exact min-max-load over every total fair map P -> C.
OracleResult brute_force_fair_assignment(const Instance& inst, const CenterSet& centers,
                                         const OracleCaps& caps = {});

// Exact global optimum over all k-subsets of F and fair assignments.
OracleResult brute_force_fmlkc(const Instance& inst, const OracleCaps& caps = {});

// Exact min-SUM fair assignment (the k-median objective on fixed centers).
OracleResult brute_force_fair_kmedian(const Instance& inst, const CenterSet& centers,
                                      const OracleCaps& caps = {});

}  // namespace loadfair::oracle
