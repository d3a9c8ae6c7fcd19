#pragma once

#include <cstdint>

#include "loadfair/core.hpp"

namespace loadfair::gen {

struct GenSpec {
    int n = 6;
    int nf = 4;
    int k = 2;
    int ell = 2;
    // coordinate dimension; 0 generates an explicit metric as the
    // shortest-path closure of a random weighted complete graph
    int dim = 2;
    std::uint64_t seed = 0;
    // alpha/beta default to each group's population fraction +/- slack
    Rational slack{1, 4};
    // force alpha = 1, beta = 0 regardless of slack
    bool vacuous_fairness = false;
};

// A validated random instance. One group always gets vacuous fairness when
// ell == 1 (the fairness constraints would otherwise be unsatisfiable or
// trivial anyway).
Instance generate_instance(const GenSpec& spec);

}  // namespace loadfair::gen
