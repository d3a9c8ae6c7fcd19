#include "loadfair/gen.hpp"

#include <string>
#include <vector>

#include "loadfair/rng.hpp"

namespace loadfair::gen {

Instance generate_instance(const GenSpec& spec) {
    if (spec.n < 1 || spec.nf < 1) throw ValidationError("need at least one point and facility");
    if (spec.k < 1 || spec.k > spec.nf) throw ValidationError("need 1 <= k <= nf");
    if (spec.ell < 1) throw ValidationError("need at least one group");
    if (spec.dim < 0) throw ValidationError("negative dimension");
    if (spec.slack.num < 0) throw ValidationError("negative slack");

    Rng rng(spec.seed);
    Instance inst;
    inst.k = spec.k;
    for (int j = 0; j < spec.n; ++j) {
        PointRec p;
        p.id = "p" + std::to_string(j);
        p.group = static_cast<int>(rng.next_below(spec.ell));
        if (spec.dim > 0)
            for (int d = 0; d < spec.dim; ++d) p.coords.push_back(rng.next_double() * 2.0);
        inst.points.push_back(std::move(p));
    }
    for (int f = 0; f < spec.nf; ++f) {
        FacilityRec fr;
        fr.id = "f" + std::to_string(f);
        if (spec.dim > 0)
            for (int d = 0; d < spec.dim; ++d) fr.coords.push_back(rng.next_double() * 2.0);
        inst.facilities.push_back(std::move(fr));
    }
    if (spec.dim == 0) {
        inst.metric = MetricType::Explicit;
        const int total = spec.n + spec.nf;
        std::vector<std::vector<double>> w(total, std::vector<double>(total, 0.0));
        for (int a = 0; a < total; ++a)
            for (int b = a + 1; b < total; ++b) w[a][b] = w[b][a] = 0.5 + rng.next_double() * 2.5;
        // shortest-path closure guarantees the triangle inequality
        for (int m = 0; m < total; ++m)
            for (int a = 0; a < total; ++a)
                for (int b = 0; b < total; ++b)
                    if (w[a][m] + w[m][b] < w[a][b]) w[a][b] = w[a][m] + w[m][b];
        inst.matrix = std::move(w);
    }

    const bool vacuous = spec.vacuous_fairness || spec.ell == 1;
    std::vector<long> pop(spec.ell, 0);
    for (const auto& p : inst.points) ++pop[p.group];
    for (int g = 0; g < spec.ell; ++g) {
        if (vacuous) {
            inst.alpha.emplace_back(1, 1);
            inst.beta.emplace_back(0, 1);
            continue;
        }
        const Rational frac(pop[g], spec.n);
        const long den = frac.den * spec.slack.den;
        long a_num = frac.num * spec.slack.den + spec.slack.num * frac.den;
        long b_num = frac.num * spec.slack.den - spec.slack.num * frac.den;
        if (a_num > den) a_num = den;
        if (b_num < 0) b_num = 0;
        inst.alpha.emplace_back(a_num, den);
        inst.beta.emplace_back(b_num, den);
    }
    validate_instance(inst);
    return inst;
}

}  // namespace loadfair::gen
