#include "loadfair/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace loadfair::oracle {

namespace {

std::uint64_t pow_checked(std::uint64_t base, int exp, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > cap / std::max<std::uint64_t>(base, 1)) return cap + 1;
        v *= base;
    }
    return v;
}

// Walks every total map in lexicographic order; the objective is the max
// load (min_sum=false) or the total load (min_sum=true).
OracleResult enumerate_maps(const Instance& inst, const CenterSet& centers, bool min_sum,
                            const OracleCaps& caps) {
    const int n = inst.num_points();
    const int k = static_cast<int>(centers.size());
    if (k < 1) throw ValidationError("empty center set");
    if (pow_checked(static_cast<std::uint64_t>(k), n, caps.max_maps) > caps.max_maps)
        throw CapExceededError("oracle cap exceeded: k^n too large");

    std::vector<std::vector<double>> d(k, std::vector<double>(n));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) d[i][j] = center_distance(inst, centers[i], j);

    const int ell = inst.num_groups();
    std::vector<int> map(n, 0);
    std::vector<double> load(k, 0.0);
    std::vector<long> size(k, 0);
    std::vector<std::vector<long>> counts(k, std::vector<long>(ell, 0));

    OracleResult best;
    auto consider = [&]() {
        for (int c = 0; c < k; ++c) {
            if (size[c] == 0) continue;
            for (int g = 0; g < ell; ++g) {
                if (!inst.alpha[g].le_times(counts[c][g], size[c])) return;
                if (!inst.beta[g].ge_times(counts[c][g], size[c])) return;
            }
        }
        double obj = 0.0;
        if (min_sum) {
            for (int c = 0; c < k; ++c) obj += load[c];
        } else {
            for (int c = 0; c < k; ++c) obj = std::max(obj, load[c]);
        }
        if (!best.feasible || obj < best.cost) {
            best.feasible = true;
            best.cost = obj;
            best.assignment.centers = centers;
            best.assignment.center_of = map;
            best.optima_count = 1;
        } else if (obj == best.cost) {
            ++best.optima_count;
        }
    };

    // odometer with incremental load/count bookkeeping
    auto place = [&](int j, int c, int sign) {
        load[c] += sign * d[c][j];
        size[c] += sign;
        counts[c][inst.points[j].group] += sign;
    };
    for (int j = 0; j < n; ++j) place(j, 0, +1);
    for (;;) {
        consider();
        int j = n - 1;
        for (; j >= 0; --j) {
            place(j, map[j], -1);
            if (map[j] + 1 < k) {
                ++map[j];
                place(j, map[j], +1);
                break;
            }
            map[j] = 0;
            place(j, 0, +1);
        }
        if (j < 0) break;
    }
    return best;
}

}  // namespace

OracleResult brute_force_fair_assignment(const Instance& inst, const CenterSet& centers,
                                         const OracleCaps& caps) {
    return enumerate_maps(inst, centers, /*min_sum=*/false, caps);
}

OracleResult brute_force_fair_kmedian(const Instance& inst, const CenterSet& centers,
                                      const OracleCaps& caps) {
    return enumerate_maps(inst, centers, /*min_sum=*/true, caps);
}

OracleResult brute_force_fmlkc(const Instance& inst, const OracleCaps& caps) {
    const int nf = inst.num_facilities();
    const int k = inst.k;
    if (k > nf) throw ValidationError("k exceeds |F|");
    // C(nf, k) * k^n within the cap
    std::uint64_t subsets = 1;
    for (int i = 0; i < k; ++i) subsets = subsets * static_cast<std::uint64_t>(nf - i) / (i + 1);
    const std::uint64_t maps =
        pow_checked(static_cast<std::uint64_t>(k), inst.num_points(), caps.max_maps);
    if (maps > caps.max_maps || subsets > caps.max_maps / std::max<std::uint64_t>(maps, 1))
        throw CapExceededError("oracle cap exceeded: C(|F|,k) * k^n too large");

    OracleResult best;
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
        const auto cs = centers_from_facilities(inst, pick);
        OracleCaps inner = caps;
        const auto res = enumerate_maps(inst, cs, /*min_sum=*/false, inner);
        if (res.feasible) {
            if (!best.feasible || res.cost < best.cost) {
                best = res;
            } else if (res.cost == best.cost) {
                best.optima_count += res.optima_count;
            }
        }
        // next k-combination
        int i = k - 1;
        while (i >= 0 && pick[i] == nf - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

}  // namespace loadfair::oracle
