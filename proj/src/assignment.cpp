#include "loadfair/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "loadfair/flow.hpp"

namespace loadfair::assign {

namespace {

constexpr double kLoadSlack = 1e-9;  // absolute slack on budget-row comparisons

double power_distance(double eps, double e2b, int t) { return std::pow(1.0 + eps, t) * e2b; }

}  // namespace

int RoundedInstance::costly_index(int center, int t, int group) const {
    for (std::size_t e = 0; e < costly.size(); ++e)
        if (costly[e].center == center && costly[e].t == t && costly[e].group == group)
            return static_cast<int>(e);
    return -1;
}

double RoundedInstance::cheap_class_sum(int center) const {
    double s = 0.0;
    for (const auto& [t, dt] : cheap_classes[center]) s += dt;
    return s;
}

int delta_bound(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("epsilon must lie in (0,1)");
    const double x = std::log((1.0 + eps) / (eps * eps)) / std::log(1.0 + eps);
    return static_cast<int>(std::ceil(x - 1e-12));
}

RoundedInstance round_distances(const Instance& inst, const CenterSet& centers, double eps,
                                double B) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("epsilon must lie in (0,1)");
    if (!(B > 0.0)) throw ValidationError("round_distances needs B > 0");
    if (centers.empty()) throw ValidationError("empty center set");

    RoundedInstance ri;
    ri.inst = &inst;
    ri.centers = centers;
    ri.eps = eps;
    ri.budget = B;
    ri.costly_count_cap = static_cast<long>(std::floor(2.0 / (eps * eps) + 1e-9));

    const int k = static_cast<int>(centers.size());
    const int n = inst.num_points();
    const double e2b = eps * eps * B;
    const double keep_limit = (1.0 + eps) * B;
    const double log1e = std::log(1.0 + eps);

    ri.pair.assign(k, std::vector<PairClass>(n));
    ri.cheap_classes.assign(k, {});
    std::map<std::tuple<int, int, int>, long> pops;  // (center, t, group) -> population
    std::vector<std::set<int>> cheap_seen(k);

    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = center_distance(inst, centers[i], j);
            PairClass pc;
            if (d == 0.0) {
                pc.t = kZeroClass;
                pc.dhat = 0.0;
            } else {
                int t = static_cast<int>(std::ceil(std::log(d / e2b) / log1e - 1e-12));
                // the log is a guess; settle t so that d_t is the smallest
                // grid value >= d under the same power computation used
                // everywhere else
                while (power_distance(eps, e2b, t) < d) ++t;
                while (t > std::numeric_limits<int>::min() + 1 &&
                       power_distance(eps, e2b, t - 1) >= d)
                    --t;
                pc.t = t;
                pc.dhat = power_distance(eps, e2b, t);
                if (pc.dhat > keep_limit) pc.excluded = true;
            }
            ri.pair[i][j] = pc;
            if (pc.excluded) continue;
            if (pc.t == kZeroClass) continue;
            if (pc.t >= 0) {
                ri.delta = std::max(ri.delta, pc.t);
                pops[{i, pc.t, inst.points[j].group}] += 1;
            } else if (cheap_seen[i].insert(pc.t).second) {
                ri.cheap_classes[i].emplace_back(pc.t, pc.dhat);
            }
        }
        std::sort(ri.cheap_classes[i].begin(), ri.cheap_classes[i].end());
    }
    for (const auto& [key, pop] : pops) {
        const auto& [i, t, g] = key;
        ri.costly.push_back(CostlyClass{i, t, g, power_distance(eps, e2b, t), pop});
    }
    return ri;
}

std::uint64_t unpruned_z_guess_bound(const RoundedInstance& ri) {
    std::uint64_t total = 1;
    for (const auto& c : ri.costly) {
        const std::uint64_t choices =
            static_cast<std::uint64_t>(std::min<long>(ri.costly_count_cap, c.population)) + 1;
        if (total > std::numeric_limits<std::uint64_t>::max() / choices)
            return std::numeric_limits<std::uint64_t>::max();
        total *= choices;
    }
    return total;
}

bool for_each_z_guess(const RoundedInstance& ri, const std::function<bool(const ZGuess&)>& fn) {
    const int e_count = static_cast<int>(ri.costly.size());
    const int k = ri.num_centers();
    const double load_limit = (1.0 + ri.eps) * ri.budget * (1.0 + 1e-12) + kLoadSlack;
    ZGuess guess;
    guess.z.assign(e_count, 0);
    std::vector<long> count(k, 0);
    std::vector<double> load(k, 0.0);

    std::function<bool(int)> rec = [&](int e) -> bool {
        if (e == e_count) return fn(guess);
        const auto& cls = ri.costly[e];
        const long cap = std::min<long>(ri.costly_count_cap, cls.population);
        for (long v = 0; v <= cap; ++v) {
            if (count[cls.center] + v > ri.costly_count_cap) break;
            if (load[cls.center] + static_cast<double>(v) * cls.dt > load_limit) break;
            guess.z[e] = v;
            count[cls.center] += v;
            load[cls.center] += static_cast<double>(v) * cls.dt;
            const bool keep_going = rec(e + 1);
            count[cls.center] -= v;
            load[cls.center] -= static_cast<double>(v) * cls.dt;
            guess.z[e] = 0;
            if (!keep_going) return false;
        }
        return true;
    };
    return rec(0);
}

FairLPModel build_fair_lp(const RoundedInstance& ri, const ZGuess& z) {
    return build_fair_lp(ri, &z, FairLPOptions{});
}

FairLPModel build_fair_lp(const RoundedInstance& ri, const ZGuess* z,
                          const FairLPOptions& opts) {
    if (!opts.joint_z && z == nullptr)
        throw ValidationError("build_fair_lp needs a guess unless joint_z is set");
    if (z && static_cast<int>(z->z.size()) != static_cast<int>(ri.costly.size()))
        throw ValidationError("guess size does not match the costly class registry");

    const Instance& inst = *ri.inst;
    const int k = ri.num_centers();
    const int n = inst.num_points();
    const int ell = inst.num_groups();
    const auto& groups = inst.groups();

    FairLPModel m;
    m.x_var.assign(k, std::vector<int>(n, -1));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j)
            if (!ri.pair[i][j].excluded)
                m.x_var[i][j] = m.lp.add_var(0.0, milp::kInf, 0.0, false,
                                             "x_" + std::to_string(i) + "_" + std::to_string(j));
    if (opts.with_y) {
        m.y_var.assign(ell, std::vector<int>(k, -1));
        for (int g = 0; g < ell; ++g)
            for (int i = 0; i < k; ++i)
                m.y_var[g][i] = m.lp.add_var(
                    0.0, static_cast<double>(groups[g].size()), 0.0, true,
                    "y_" + std::to_string(g) + "_" + std::to_string(i));
    }
    if (opts.joint_z) {
        m.z_var.assign(ri.costly.size(), -1);
        for (std::size_t e = 0; e < ri.costly.size(); ++e) {
            const auto& cls = ri.costly[e];
            const double ub =
                static_cast<double>(std::min<long>(ri.costly_count_cap, cls.population));
            m.z_var[e] = m.lp.add_var(0.0, ub, 0.0, true,
                                      "z_" + std::to_string(cls.center) + "_" +
                                          std::to_string(cls.t) + "_" + std::to_string(cls.group));
        }
    }

    // every point fully assigned
    for (int j = 0; j < n; ++j) {
        std::vector<std::pair<int, double>> coef;
        for (int i = 0; i < k; ++i)
            if (m.x_var[i][j] >= 0) coef.emplace_back(m.x_var[i][j], 1.0);
        m.lp.add_row(milp::Rel::Eq, 1.0, std::move(coef), "assign_" + std::to_string(j));
    }
    // group weights
    if (opts.with_y) {
        for (int i = 0; i < k; ++i)
            for (int g = 0; g < ell; ++g) {
                std::vector<std::pair<int, double>> coef;
                for (int j : groups[g])
                    if (m.x_var[i][j] >= 0) coef.emplace_back(m.x_var[i][j], 1.0);
                coef.emplace_back(m.y_var[g][i], -1.0);
                m.lp.add_row(milp::Rel::Eq, 0.0, std::move(coef),
                             "weight_" + std::to_string(g) + "_" + std::to_string(i));
            }
    }
    // fairness bounds on the group weights
    if (opts.with_y && opts.fairness_rows) {
        for (int i = 0; i < k; ++i)
            for (int g = 0; g < ell; ++g) {
                const double alpha = inst.alpha[g].value();
                const double beta = inst.beta[g].value();
                std::vector<std::pair<int, double>> lo_coef, hi_coef;
                for (int j = 0; j < n; ++j) {
                    if (m.x_var[i][j] < 0) continue;
                    lo_coef.emplace_back(m.x_var[i][j], beta);
                    hi_coef.emplace_back(m.x_var[i][j], -alpha);
                }
                lo_coef.emplace_back(m.y_var[g][i], -1.0);
                hi_coef.emplace_back(m.y_var[g][i], 1.0);
                m.lp.add_row(milp::Rel::Le, 0.0, std::move(lo_coef),
                             "fair_lo_" + std::to_string(g) + "_" + std::to_string(i));
                m.lp.add_row(milp::Rel::Le, 0.0, std::move(hi_coef),
                             "fair_hi_" + std::to_string(g) + "_" + std::to_string(i));
            }
    }
    // costly class weights match the guess
    for (std::size_t e = 0; e < ri.costly.size(); ++e) {
        const auto& cls = ri.costly[e];
        std::vector<std::pair<int, double>> coef;
        for (int j : groups[cls.group])
            if (ri.pair[cls.center][j].t == cls.t && m.x_var[cls.center][j] >= 0)
                coef.emplace_back(m.x_var[cls.center][j], 1.0);
        double rhs = 0.0;
        if (opts.joint_z)
            coef.emplace_back(m.z_var[e], -1.0);
        else
            rhs = static_cast<double>(z->z[e]);
        m.lp.add_row(milp::Rel::Eq, rhs, std::move(coef),
                     "class_" + std::to_string(cls.center) + "_" + std::to_string(cls.t) + "_" +
                         std::to_string(cls.group));
    }
    // per-center budget: costly z terms plus fractional cheap load
    for (int i = 0; i < k; ++i) {
        std::vector<std::pair<int, double>> coef;
        double rhs = (1.0 + ri.eps) * ri.budget;
        for (std::size_t e = 0; e < ri.costly.size(); ++e) {
            if (ri.costly[e].center != i) continue;
            if (opts.joint_z)
                coef.emplace_back(m.z_var[e], ri.costly[e].dt);
            else
                rhs -= ri.costly[e].dt * static_cast<double>(z->z[e]);
        }
        for (int j = 0; j < n; ++j) {
            const auto& pc = ri.pair[i][j];
            if (pc.excluded || pc.t == kZeroClass || pc.t >= 0) continue;
            coef.emplace_back(m.x_var[i][j], pc.dhat);
        }
        if (coef.empty() && rhs >= 0.0) continue;
        m.lp.add_row(milp::Rel::Le, rhs, std::move(coef), "budget_" + std::to_string(i));
    }
    // joint mode keeps the per-center costly count cap explicit so the
    // model's feasible set projects exactly onto the enumerated guesses
    if (opts.joint_z) {
        for (int i = 0; i < k; ++i) {
            std::vector<std::pair<int, double>> coef;
            for (std::size_t e = 0; e < ri.costly.size(); ++e)
                if (ri.costly[e].center == i) coef.emplace_back(m.z_var[e], 1.0);
            if (coef.empty()) continue;
            m.lp.add_row(milp::Rel::Le, static_cast<double>(ri.costly_count_cap), std::move(coef),
                         "count_cap_" + std::to_string(i));
        }
    }
    return m;
}

FairLPModel build_fair_kmedian_milp(const Instance& inst, const CenterSet& centers) {
    const int k = static_cast<int>(centers.size());
    const int n = inst.num_points();
    const int ell = inst.num_groups();
    const auto& groups = inst.groups();

    FairLPModel m;
    m.lp.sense = milp::Sense::Min;
    m.x_var.assign(k, std::vector<int>(n, -1));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j)
            m.x_var[i][j] = m.lp.add_var(0.0, milp::kInf, center_distance(inst, centers[i], j),
                                         false,
                                         "x_" + std::to_string(i) + "_" + std::to_string(j));
    m.y_var.assign(ell, std::vector<int>(k, -1));
    for (int g = 0; g < ell; ++g)
        for (int i = 0; i < k; ++i)
            m.y_var[g][i] =
                m.lp.add_var(0.0, static_cast<double>(groups[g].size()), 0.0, true,
                             "y_" + std::to_string(g) + "_" + std::to_string(i));
    for (int j = 0; j < n; ++j) {
        std::vector<std::pair<int, double>> coef;
        for (int i = 0; i < k; ++i) coef.emplace_back(m.x_var[i][j], 1.0);
        m.lp.add_row(milp::Rel::Eq, 1.0, std::move(coef), "assign_" + std::to_string(j));
    }
    for (int i = 0; i < k; ++i)
        for (int g = 0; g < ell; ++g) {
            std::vector<std::pair<int, double>> coef;
            for (int j : groups[g]) coef.emplace_back(m.x_var[i][j], 1.0);
            coef.emplace_back(m.y_var[g][i], -1.0);
            m.lp.add_row(milp::Rel::Eq, 0.0, std::move(coef),
                         "weight_" + std::to_string(g) + "_" + std::to_string(i));
        }
    for (int i = 0; i < k; ++i)
        for (int g = 0; g < ell; ++g) {
            const double alpha = inst.alpha[g].value();
            const double beta = inst.beta[g].value();
            std::vector<std::pair<int, double>> lo_coef, hi_coef;
            for (int j = 0; j < n; ++j) {
                lo_coef.emplace_back(m.x_var[i][j], beta);
                hi_coef.emplace_back(m.x_var[i][j], -alpha);
            }
            lo_coef.emplace_back(m.y_var[g][i], -1.0);
            hi_coef.emplace_back(m.y_var[g][i], 1.0);
            m.lp.add_row(milp::Rel::Le, 0.0, std::move(lo_coef),
                         "fair_lo_" + std::to_string(g) + "_" + std::to_string(i));
            m.lp.add_row(milp::Rel::Le, 0.0, std::move(hi_coef),
                         "fair_hi_" + std::to_string(g) + "_" + std::to_string(i));
        }
    return m;
}

namespace {

long snapped_ceil(double v) { return static_cast<long>(std::ceil(v - 1e-6)); }

}  // namespace

Assignment round_lp_solution(const RoundedInstance& ri, const std::vector<std::vector<double>>& x,
                             const std::vector<std::vector<long>>& y, RoundingInfo* info) {
    const Instance& inst = *ri.inst;
    const int k = ri.num_centers();
    const int n = inst.num_points();
    const int ell = inst.num_groups();
    const auto& groups = inst.groups();
    const bool with_y = !y.empty();

    Assignment out;
    out.centers = ri.centers;
    out.center_of.assign(n, -1);

    RoundingInfo local;
    RoundingInfo& ifo = info ? *info : local;
    ifo.counts.assign(ell, std::vector<long>(k, 0));
    ifo.y = y;
    ifo.guessed_costly_load.assign(k, 0.0);
    ifo.fractional_cheap_load.assign(k, 0.0);
    ifo.cheap_tail.assign(k, 0.0);
    ifo.dhat_load.assign(k, 0.0);
    for (int i = 0; i < k; ++i) ifo.cheap_tail[i] = ri.cheap_class_sum(i);

    bool costly_masses_integral = true;

    for (int g = 0; g < ell; ++g) {
        const auto& members = groups[g];
        if (members.empty()) continue;

        // lambda per (center, class) over this group's points
        std::map<std::pair<int, int>, double> lambda;
        for (int j : members)
            for (int i = 0; i < k; ++i) {
                const auto& pc = ri.pair[i][j];
                if (pc.excluded) continue;
                lambda[{i, pc.t}] += x[i][j];
            }
        for (const auto& [key, lam] : lambda) {
            const auto& [i, t] = key;
            if (t == kZeroClass || t < 0) continue;
            ifo.guessed_costly_load[i] +=
                ri.costly[ri.costly_index(i, t, g)].dt * std::round(lam);
            if (std::abs(lam - std::round(lam)) > 1e-5) costly_masses_integral = false;
        }
        for (int j : members)
            for (int i = 0; i < k; ++i) {
                const auto& pc = ri.pair[i][j];
                if (pc.excluded || pc.t == kZeroClass || pc.t >= 0) continue;
                ifo.fractional_cheap_load[i] += pc.dhat * x[i][j];
            }

        flow::FlowNetwork net;
        const int S = net.add_node();
        const int T = net.add_node();
        net.source = S;
        net.sink = T;
        std::vector<int> v_node(members.size());
        for (std::size_t a = 0; a < members.size(); ++a) v_node[a] = net.add_node();
        std::map<std::pair<int, int>, int> w_node;
        std::vector<int> u_node(k, -1);
        for (int i = 0; i < k; ++i) u_node[i] = net.add_node();

        for (const auto& [key, lam] : lambda) {
            const long cap = snapped_ceil(lam);
            if (cap <= 0) continue;
            w_node[key] = net.add_node();
        }
        for (std::size_t a = 0; a < members.size(); ++a) net.add_arc(S, v_node[a], 1);
        std::vector<std::pair<std::pair<std::size_t, int>, int>> point_arcs;  // ((member,center), arc)
        for (std::size_t a = 0; a < members.size(); ++a) {
            const int j = members[a];
            for (int i = 0; i < k; ++i) {
                const auto& pc = ri.pair[i][j];
                if (pc.excluded) continue;
                auto it = w_node.find({i, pc.t});
                if (it == w_node.end()) continue;
                const int arc = net.add_arc(v_node[a], it->second, 1);
                point_arcs.push_back({{a, i}, arc});
            }
        }
        for (const auto& [key, node] : w_node) {
            const long cap = snapped_ceil(lambda[key]);
            net.add_arc(node, u_node[key.first], cap);
        }
        for (int i = 0; i < k; ++i) {
            long cap;
            if (with_y) {
                cap = y[g][i];
            } else {
                double mass = 0.0;
                for (int j : members)
                    if (!ri.pair[i][j].excluded) mass += x[i][j];
                cap = snapped_ceil(mass);
            }
            if (cap > 0) net.add_arc(u_node[i], T, cap);
        }

        const auto res = flow::max_flow(net);
        if (res.value != static_cast<long>(members.size()))
            throw Error("rounding network lost flow: got " + std::to_string(res.value) +
                        " of " + std::to_string(members.size()) +
                        " (no fractional certificate should allow this)");
        for (const auto& [pa, arc] : point_arcs) {
            if (res.arc_flow[arc] != 1) continue;
            const auto& [a, i] = pa;
            const int j = members[a];
            if (out.center_of[j] >= 0) throw Error("rounding assigned a point twice (internal)");
            out.center_of[j] = i;
            ifo.counts[g][i] += 1;
            ifo.dhat_load[i] += ri.pair[i][j].dhat;
        }
    }

    for (int j = 0; j < n; ++j)
        if (out.center_of[j] < 0) throw Error("rounding left a point unassigned (internal)");

    if (with_y) {
        for (int g = 0; g < ell; ++g)
            for (int i = 0; i < k; ++i)
                if (ifo.counts[g][i] != y[g][i])
                    throw Error("rounded counts do not match y* (internal)");
    }
    // Per-center rounded load respects the ceiling-slack bound: guessed
    // costly load + fractional cheap load + one cheap class tail per group.
    // The bound presumes integral costly class masses; inputs that skip the
    // class equalities only get the capacity guarantees.
    if (costly_masses_integral) {
        for (int i = 0; i < k; ++i) {
            const double bound = ifo.guessed_costly_load[i] + ifo.fractional_cheap_load[i] +
                                 static_cast<double>(ell) * ifo.cheap_tail[i];
            if (ifo.dhat_load[i] > bound + 1e-6 * (1.0 + bound))
                throw Error("rounded load exceeds the ceiling-slack bound (internal)");
        }
    }
    return out;
}

namespace {

std::vector<std::vector<double>> extract_x(const FairLPModel& m, const milp::LPSolution& sol) {
    std::vector<std::vector<double>> x(m.x_var.size());
    for (std::size_t i = 0; i < m.x_var.size(); ++i) {
        x[i].assign(m.x_var[i].size(), 0.0);
        for (std::size_t j = 0; j < m.x_var[i].size(); ++j)
            if (m.x_var[i][j] >= 0) x[i][j] = std::max(0.0, sol.x[m.x_var[i][j]]);
    }
    return x;
}

std::vector<std::vector<long>> extract_y(const FairLPModel& m, const milp::LPSolution& sol) {
    std::vector<std::vector<long>> y(m.y_var.size());
    for (std::size_t g = 0; g < m.y_var.size(); ++g) {
        y[g].assign(m.y_var[g].size(), 0);
        for (std::size_t i = 0; i < m.y_var[g].size(); ++i)
            y[g][i] = std::llround(sol.x[m.y_var[g][i]]);
    }
    return y;
}

RoundedInstance zero_budget_instance(const Instance& inst, const CenterSet& centers,
                                     double eps_w) {
    RoundedInstance ri;
    ri.inst = &inst;
    ri.centers = centers;
    ri.eps = eps_w;
    ri.budget = 0.0;
    ri.costly_count_cap = 0;
    const int k = static_cast<int>(centers.size());
    const int n = inst.num_points();
    ri.pair.assign(k, std::vector<PairClass>(n));
    ri.cheap_classes.assign(k, {});
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = center_distance(inst, centers[i], j);
            auto& pc = ri.pair[i][j];
            if (d == 0.0) {
                pc.t = kZeroClass;
                pc.dhat = 0.0;
            } else {
                pc.excluded = true;
            }
        }
    return ri;
}

BudgetedOutcome finish_feasible(const Instance& inst, const RoundedInstance& ri,
                                const FairLPModel& model, const milp::LPSolution& sol,
                                double B, double eps_user, BudgetTrace trace) {
    BudgetedOutcome out;
    out.trace = std::move(trace);
    const auto x = extract_x(model, sol);
    const auto y = model.y_var.empty() ? std::vector<std::vector<long>>{} : extract_y(model, sol);
    out.trace.chosen_z.reserve(ri.costly.size());
    for (const auto& cls : ri.costly) {
        double lam = 0.0;
        for (int j : inst.groups()[cls.group])
            if (ri.pair[cls.center][j].t == cls.t) lam += x[cls.center][j];
        out.trace.chosen_z.push_back(std::llround(lam));
    }
    out.assignment = round_lp_solution(ri, x, y, &out.rounding);
    out.true_cost = assignment_cost(inst, out.assignment);
    out.feasible = true;
    // Both sides of the guarantee, in d_hat and in d.
    const int ell = inst.num_groups();
    for (int i = 0; i < ri.num_centers(); ++i) {
        const double dhat_bound = (1.0 + ri.eps) * (B > 0 ? B : 0.0) +
                                  static_cast<double>(ell) * out.rounding.cheap_tail[i];
        if (out.rounding.dhat_load[i] > dhat_bound + 1e-6 * (1.0 + dhat_bound))
            throw Error("budgeted decision exceeded the d_hat budget (internal)");
    }
    if (out.true_cost > (1.0 + eps_user) * B + 1e-9 * (1.0 + B))
        throw Error("budgeted decision exceeded (1+eps)B in the true metric (internal)");
    return out;
}

}  // namespace

BudgetedOutcome budgeted_fair_assignment(const Instance& inst, const CenterSet& centers, double B,
                                         double eps_user, const BudgetedOptions& opts) {
    if (!(eps_user > 0.0 && eps_user < 1.0))
        throw ValidationError("epsilon must lie in (0,1)");
    if (B < 0.0) throw ValidationError("negative budget");
    if (opts.lp_only && opts.strategy == BudgetedStrategy::JointMilp)
        throw ValidationError("lp_only requires the enumerated strategy");
    if (opts.lp_only && !inst.fairness_vacuous())
        throw ValidationError("lp_only requires vacuous fairness");

    const int ell = inst.num_groups();
    const double eps_w = eps_user / (4.0 * ell + 4.0);

    BudgetTrace trace;
    trace.working_eps = eps_w;
    trace.dhat_budget = (1.0 + eps_w) * B;
    trace.joint = opts.strategy == BudgetedStrategy::JointMilp;

    if (B == 0.0) {
        // Degenerate budget: only zero-distance pairs may carry points.
        trace.zero_budget_mode = true;
        const RoundedInstance ri = zero_budget_instance(inst, centers, eps_w);
        FairLPOptions fopts;
        fopts.with_y = !opts.lp_only;
        fopts.fairness_rows = !opts.lp_only;
        ZGuess empty;
        const FairLPModel model = build_fair_lp(ri, &empty, fopts);
        const auto sol = opts.lp_only ? milp::solve_lp(model.lp, opts.milp)
                                      : milp::solve_milp(model.lp, opts.milp);
        if (sol.status != milp::Status::Optimal) {
            BudgetedOutcome out;
            out.trace = trace;
            return out;
        }
        return finish_feasible(inst, ri, model, sol, B, eps_user, trace);
    }

    const RoundedInstance ri = round_distances(inst, centers, eps_w, B);
    trace.delta = ri.delta;
    trace.costly_classes = static_cast<int>(ri.costly.size());

    if (opts.strategy == BudgetedStrategy::JointMilp) {
        FairLPOptions fopts;
        fopts.with_y = true;
        fopts.joint_z = true;
        const FairLPModel model = build_fair_lp(ri, nullptr, fopts);
        const auto sol = milp::solve_milp(model.lp, opts.milp);
        if (sol.status != milp::Status::Optimal) {
            BudgetedOutcome out;
            out.trace = trace;
            return out;
        }
        return finish_feasible(inst, ri, model, sol, B, eps_user, trace);
    }

    // Enumerated strategy. Two instance-level complete filters cut guesses
    // that cannot carry a feasible model: total costly mass must cover every
    // point with no cheap or zero pair, and each such point needs mass on at
    // least one of its own classes. Both follow from the coverage and class
    // equalities, so completeness of the stream is preserved.
    const int n = inst.num_points();
    std::vector<char> has_soft(n, 0);  // has a cheap or zero-distance pair
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < ri.num_centers(); ++i) {
            const auto& pc = ri.pair[i][j];
            if (!pc.excluded && (pc.t == kZeroClass || pc.t < 0)) has_soft[j] = 1;
        }
    long n_soft = 0;
    for (char c : has_soft) n_soft += c;
    const long min_mass = n - n_soft;
    std::vector<std::vector<int>> point_classes(n);  // registry entries per hard point
    for (int j = 0; j < n; ++j) {
        if (has_soft[j]) continue;
        for (int i = 0; i < ri.num_centers(); ++i) {
            const auto& pc = ri.pair[i][j];
            if (pc.excluded || pc.t < 0) continue;
            const int e = ri.costly_index(i, pc.t, inst.points[j].group);
            if (e >= 0) point_classes[j].push_back(e);
        }
    }

    FairLPOptions fopts;
    fopts.with_y = !opts.lp_only;
    fopts.fairness_rows = !opts.lp_only;

    std::optional<BudgetedOutcome> found;
    std::uint64_t tried = 0;
    long models_infeasible = 0;
    for_each_z_guess(ri, [&](const ZGuess& zg) {
        if (++tried > opts.max_guesses)
            throw ResourceLimitError("budgeted decision: guess budget exhausted");
        long total = 0;
        for (long v : zg.z) total += v;
        if (total > n || total < min_mass) return true;
        for (int j = 0; j < n; ++j) {
            if (has_soft[j]) continue;
            long cover = 0;
            for (int e : point_classes[j]) cover += zg.z[e];
            if (cover < 1) return true;
        }
        const FairLPModel model = build_fair_lp(ri, &zg, fopts);
        const auto sol = opts.lp_only ? milp::solve_lp(model.lp, opts.milp)
                                      : milp::solve_milp(model.lp, opts.milp);
        if (sol.status != milp::Status::Optimal) {
            ++models_infeasible;
            return true;
        }
        BudgetTrace t2 = trace;
        t2.guesses_tried = tried;
        t2.models_infeasible = models_infeasible;
        found = finish_feasible(inst, ri, model, sol, B, eps_user, t2);
        return false;
    });
    if (found) return *found;
    BudgetedOutcome out;
    trace.guesses_tried = tried;
    trace.models_infeasible = models_infeasible;
    out.trace = trace;
    return out;
}

std::pair<Assignment, double> fair_kmedian_assignment(const Instance& inst,
                                                      const CenterSet& centers) {
    const int k = static_cast<int>(centers.size());
    const int n = inst.num_points();
    const int ell = inst.num_groups();

    if (inst.fairness_vacuous()) {
        // The optimum is the nearest-center assignment; no program needed.
        Assignment a;
        a.centers = centers;
        a.center_of.assign(n, 0);
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            int best = 0;
            double bd = center_distance(inst, centers[0], j);
            for (int i = 1; i < k; ++i) {
                const double d = center_distance(inst, centers[i], j);
                if (d < bd) {
                    bd = d;
                    best = i;
                }
            }
            a.center_of[j] = best;
            total += bd;
        }
        return {a, total};
    }

    const FairLPModel model = build_fair_kmedian_milp(inst, centers);
    const auto sol = milp::solve_milp(model.lp);
    if (sol.status != milp::Status::Optimal)
        throw InfeasibleError("no fair assignment exists for these fairness parameters");
    const auto y = extract_y(model, sol);

    Assignment a;
    a.centers = centers;
    a.center_of.assign(n, -1);
    const auto& groups = inst.groups();
    for (int g = 0; g < ell; ++g) {
        const auto& members = groups[g];
        if (members.empty()) continue;
        flow::FlowNetwork net;
        const int S = net.add_node();
        const int T = net.add_node();
        net.source = S;
        net.sink = T;
        std::vector<int> v_node(members.size());
        for (std::size_t a2 = 0; a2 < members.size(); ++a2) v_node[a2] = net.add_node();
        std::vector<int> u_node(k);
        for (int i = 0; i < k; ++i) u_node[i] = net.add_node();
        for (std::size_t a2 = 0; a2 < members.size(); ++a2) net.add_arc(S, v_node[a2], 1);
        std::vector<std::pair<std::pair<std::size_t, int>, int>> point_arcs;
        for (std::size_t a2 = 0; a2 < members.size(); ++a2)
            for (int i = 0; i < k; ++i)
                point_arcs.push_back(
                    {{a2, i},
                     net.add_arc(v_node[a2], u_node[i], 1,
                                 center_distance(inst, centers[i], members[a2]))});
        for (int i = 0; i < k; ++i)
            if (y[g][i] > 0) net.add_arc(u_node[i], T, y[g][i]);
        const auto res = flow::min_cost_flow(net, static_cast<long>(members.size()));
        for (const auto& [pa, arc] : point_arcs) {
            if (res.arc_flow[arc] != 1) continue;
            a.center_of[members[pa.first]] = pa.second;
        }
    }
    for (int j = 0; j < n; ++j)
        if (a.center_of[j] < 0) throw Error("k-median rounding left a point unassigned");

    // The transportation step preserves both the counts and the objective.
    const auto loads = center_loads(inst, a);
    for (int g = 0; g < ell; ++g)
        for (int i = 0; i < k; ++i)
            if (loads[i].group_counts[g] != y[g][i])
                throw Error("k-median rounding broke the y counts (internal)");
    double d_total = 0.0;
    for (int j = 0; j < n; ++j) d_total += center_distance(inst, centers[a.center_of[j]], j);
    if (std::abs(d_total - sol.objective) > 1e-7 * (1.0 + std::abs(sol.objective)))
        throw Error("k-median rounding changed the objective (internal)");
    const auto fairness = check_fairness(inst, a);
    if (!fairness.fair) throw Error("k-median rounding produced an unfair assignment (internal)");
    return {a, d_total};
}

namespace {

AssignResult budget_search(const Instance& inst, const CenterSet& centers, double eps,
                           const AssignOptions& opts, Assignment km_assignment, double D) {
    AssignResult result;
    result.trace.kmedian_cost = D;
    if (D == 0.0) {
        result.assignment = std::move(km_assignment);
        result.cost = 0.0;
        return result;
    }
    const int k = static_cast<int>(centers.size());
    const double epsp = eps / 3.0;
    const double log1e = std::log1p(epsp);
    auto grid = [&](int t) { return std::pow(1.0 + epsp, t); };

    int m = static_cast<int>(std::floor(std::log(D / k) / log1e));
    while (grid(m + 1) <= D / k) ++m;
    while (grid(m) > D / k) --m;
    int M = static_cast<int>(std::ceil(std::log(D) / log1e));
    while (grid(M - 1) >= D) --M;
    while (grid(M) < D) ++M;

    result.trace.grid_lo = m;
    result.trace.grid_hi = M;

    std::map<int, BudgetedOutcome> cache;
    auto probe = [&](int idx) -> const BudgetedOutcome& {
        auto it = cache.find(idx);
        if (it == cache.end()) {
            ++result.trace.probes;
            it = cache.emplace(idx, budgeted_fair_assignment(inst, centers, grid(idx), epsp,
                                                             opts.budgeted))
                     .first;
        }
        return it->second;
    };

    int lo = m, hi = M;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (probe(mid).feasible)
            hi = mid;
        else
            lo = mid + 1;
    }
    if (!probe(lo).feasible) {
        // The decision procedure answered inconsistently across budgets;
        // retreat to a full scan, which needs no monotonicity at all.
        result.trace.monotone_fallback = true;
        int found = std::numeric_limits<int>::min();
        for (int i = m; i <= M + 2; ++i)
            if (probe(i).feasible) {
                found = i;
                break;
            }
        if (found == std::numeric_limits<int>::min())
            throw Error("budget search found no feasible budget up to D (internal)");
        lo = found;
    }
    const auto& outcome = cache.at(lo);
    result.trace.found_index = lo;
    result.trace.last_budget = outcome.trace;
    result.assignment = outcome.assignment;
    result.cost = outcome.true_cost;

    const auto fairness = check_fairness(inst, result.assignment);
    if (!fairness.fair) throw Error("assignment pipeline produced an unfair result (internal)");
    return result;
}

}  // namespace

AssignResult fair_assignment(const Instance& inst, const CenterSet& centers, double eps,
                             const AssignOptions& opts) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("epsilon must lie in (0,1)");
    auto [km, D] = fair_kmedian_assignment(inst, centers);
    return budget_search(inst, centers, eps, opts, std::move(km), D);
}

AssignResult mlkc_assignment(const Instance& inst, const CenterSet& centers, double eps,
                             const AssignOptions& opts) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("epsilon must lie in (0,1)");
    if (!inst.fairness_vacuous())
        throw ValidationError(
            "mlkc_assignment requires vacuous fairness (alpha=1, beta=0); use fair_assignment");
    AssignOptions o = opts;
    o.budgeted.strategy = BudgetedStrategy::EnumeratedGuesses;
    o.budgeted.lp_only = true;
    auto [km, D] = fair_kmedian_assignment(inst, centers);
    return budget_search(inst, centers, eps, o, std::move(km), D);
}

}  // namespace loadfair::assign
