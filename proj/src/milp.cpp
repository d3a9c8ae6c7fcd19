#include "loadfair/milp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

namespace loadfair::milp {

Stats& stats() {
    static Stats s;
    return s;
}

StatsSnapshot snapshot_stats() {
    auto& s = stats();
    return {s.lp_solves.load(), s.simplex_pivots.load(), s.milp_integer_solves.load(),
            s.bnb_nodes.load(), s.bnb_branches.load()};
}

int LinearProgram::add_var(double lo, double up, double obj, bool is_integral,
                           std::string name) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(up);
    integral.push_back(is_integral);
    var_names.push_back(name.empty() ? "x" + std::to_string(objective.size() - 1)
                                     : std::move(name));
    return num_vars() - 1;
}

void LinearProgram::add_row(Rel rel, double rhs, std::vector<std::pair<int, double>> coef,
                            std::string name) {
    Row r;
    r.rel = rel;
    r.rhs = rhs;
    r.coef = std::move(coef);
    r.name = name.empty() ? "c" + std::to_string(rows.size()) : std::move(name);
    rows.push_back(std::move(r));
}

int LinearProgram::num_integral() const {
    int n = 0;
    for (bool b : integral)
        if (b) ++n;
    return n;
}

namespace {

void check_model(const LinearProgram& lp) {
    const int n = lp.num_vars();
    for (const auto& row : lp.rows)
        for (const auto& [v, c] : row.coef) {
            (void)c;
            if (v < 0 || v >= n) throw ValidationError("row references unknown variable");
        }
    for (int v = 0; v < n; ++v) {
        if (!std::isfinite(lp.lower[v]))
            throw ValidationError("variable " + lp.var_names[v] + " needs a finite lower bound");
        if (lp.integral[v] && !std::isfinite(lp.upper[v]))
            throw ValidationError("integral variable " + lp.var_names[v] +
                                  " needs finite bounds");
    }
}

// Two-phase dense tableau simplex on the standardized system
//   min c'x'  s.t.  A x' {<=,=,>=} b' >= 0,  x' >= 0
// where x' = x - lower and finite upper bounds became explicit rows.
class Simplex {
public:
    Simplex(const LinearProgram& lp, const SolveOptions& opts) : lp_(lp), opts_(opts) {}

    LPSolution run() {
        LPSolution sol;
        for (int v = 0; v < lp_.num_vars(); ++v)
            if (lp_.upper[v] < lp_.lower[v] - 1e-12) {
                sol.status = Status::Infeasible;
                return sol;
            }
        build();
        if (!phase1()) {
            sol.status = Status::Infeasible;
            return sol;
        }
        if (!iterate(/*phase1=*/false)) {
            sol.status = Status::Unbounded;
            return sol;
        }
        sol.status = Status::Optimal;
        std::vector<double> xs(num_cols_, 0.0);
        for (int i = 0; i < m_; ++i) xs[basis_[i]] = tab_[i][num_cols_];
        sol.x.assign(lp_.num_vars(), 0.0);
        sol.objective = 0.0;
        for (int v = 0; v < lp_.num_vars(); ++v) {
            sol.x[v] = xs[v] + lp_.lower[v];
            sol.objective += lp_.objective[v] * sol.x[v];
        }
        extract_duals(sol);
        verify(sol);
        return sol;
    }

private:
    const LinearProgram& lp_;
    const SolveOptions& opts_;
    // column layout: structural | slack/surplus | artificial, then rhs
    std::vector<std::vector<double>> tab_;
    std::vector<double> cost_;      // phase-2 reduced costs, rhs cell = -objective
    std::vector<double> art_cost_;  // phase-1 reduced costs
    std::vector<int> basis_;
    std::vector<bool> is_artificial_;
    int m_ = 0;
    int num_cols_ = 0;
    int first_art_ = 0;
    double obj_sign_ = 1.0;  // -1 when the model maximizes
    long pivots_ = 0;
    bool bland_ = false;

    struct RowInfo {
        int dual_col = -1;      // identity column whose reduced cost holds y
        double dual_col_sign = 1.0;
        double sign = 1.0;      // -1 when the standardized row was negated
        double rhs = 0.0;       // standardized rhs
        Rel rel = Rel::Le;      // standardized relation
        bool user = false;      // maps back to a model row (vs a bound row)
        int user_row = -1;
    };
    std::vector<RowInfo> row_info_;  // one per standardized row

    static constexpr double kPivTol = 1e-9;

    void build() {
        const int n = lp_.num_vars();
        obj_sign_ = lp_.sense == Sense::Min ? 1.0 : -1.0;

        struct SRow {
            std::vector<double> a;
            Rel rel;
            double rhs;
            double sign;
            bool user;
            int user_row;
        };
        std::vector<SRow> srows;
        for (std::size_t r = 0; r < lp_.rows.size(); ++r) {
            const auto& row = lp_.rows[r];
            SRow s{std::vector<double>(n, 0.0), row.rel, row.rhs, 1.0, true,
                   static_cast<int>(r)};
            for (const auto& [v, c] : row.coef) {
                s.a[v] += c;
                s.rhs -= c * lp_.lower[v];
            }
            if (s.rhs < 0) {
                for (auto& c : s.a) c = -c;
                s.rhs = -s.rhs;
                s.sign = -1.0;
                s.rel = s.rel == Rel::Le ? Rel::Ge : (s.rel == Rel::Ge ? Rel::Le : Rel::Eq);
            }
            srows.push_back(std::move(s));
        }
        for (int v = 0; v < n; ++v) {
            if (!std::isfinite(lp_.upper[v])) continue;
            SRow s{std::vector<double>(n, 0.0), Rel::Le, std::max(0.0, lp_.upper[v] - lp_.lower[v]),
                   1.0, false, -1};
            s.a[v] = 1.0;
            srows.push_back(std::move(s));
        }

        m_ = static_cast<int>(srows.size());
        int n_slack = 0, n_art = 0;
        for (const auto& s : srows) {
            if (s.rel != Rel::Eq) ++n_slack;
            if (s.rel != Rel::Le) ++n_art;
        }
        first_art_ = n + n_slack;
        num_cols_ = n + n_slack + n_art;
        tab_.assign(m_, std::vector<double>(num_cols_ + 1, 0.0));
        basis_.assign(m_, -1);
        is_artificial_.assign(num_cols_, false);
        row_info_.assign(m_, RowInfo{});

        int slack_at = n, art_at = first_art_;
        for (int i = 0; i < m_; ++i) {
            const auto& s = srows[i];
            for (int v = 0; v < n; ++v) tab_[i][v] = s.a[v];
            tab_[i][num_cols_] = s.rhs;
            RowInfo info;
            info.sign = s.sign;
            info.rhs = s.rhs;
            info.rel = s.rel;
            info.user = s.user;
            info.user_row = s.user_row;
            if (s.rel == Rel::Le) {
                tab_[i][slack_at] = 1.0;
                basis_[i] = slack_at;
                info.dual_col = slack_at;
                info.dual_col_sign = -1.0;  // y = -reduced_cost(slack)
                ++slack_at;
            } else if (s.rel == Rel::Ge) {
                tab_[i][slack_at] = -1.0;
                info.dual_col = slack_at;
                info.dual_col_sign = 1.0;  // y = +reduced_cost(surplus)
                ++slack_at;
                tab_[i][art_at] = 1.0;
                basis_[i] = art_at;
                is_artificial_[art_at] = true;
                ++art_at;
            } else {
                tab_[i][art_at] = 1.0;
                basis_[i] = art_at;
                is_artificial_[art_at] = true;
                info.dual_col = art_at;
                info.dual_col_sign = -1.0;  // y = -reduced_cost(artificial)
                ++art_at;
            }
            row_info_[i] = info;
        }

        // Phase-2 reduced costs: the initial basis has zero cost.
        cost_.assign(num_cols_ + 1, 0.0);
        for (int v = 0; v < n; ++v) cost_[v] = obj_sign_ * lp_.objective[v];
        // Phase-1 reduced costs for min(sum of artificials): price out the
        // basic artificials. Artificial columns keep a stale value; they are
        // never candidates to enter, so it is never read.
        art_cost_.assign(num_cols_ + 1, 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= first_art_)
                for (int j = 0; j <= num_cols_; ++j) art_cost_[j] -= tab_[i][j];
    }

    void pivot(int prow, int pcol) {
        auto& pr = tab_[prow];
        const double pv = pr[pcol];
        for (double& x : pr) x /= pv;
        pr[pcol] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == prow) continue;
            const double f = tab_[i][pcol];
            if (f == 0.0) continue;
            auto& row = tab_[i];
            for (int j = 0; j <= num_cols_; ++j) row[j] -= f * pr[j];
            row[pcol] = 0.0;
        }
        for (auto* orow : {&cost_, &art_cost_}) {
            const double f = (*orow)[pcol];
            if (f == 0.0) continue;
            for (int j = 0; j <= num_cols_; ++j) (*orow)[j] -= f * pr[j];
            (*orow)[pcol] = 0.0;
        }
        basis_[prow] = pcol;
        ++pivots_;
        stats().simplex_pivots.fetch_add(1, std::memory_order_relaxed);
        if (pivots_ > opts_.max_pivots)
            throw ResourceLimitError("simplex cycling/limit: pivot budget exhausted");
    }

    int choose_entering(const std::vector<double>& objrow) const {
        int best = -1;
        double best_val = -kPivTol;
        for (int j = 0; j < num_cols_; ++j) {
            if (is_artificial_[j]) continue;  // artificials never re-enter
            const double r = objrow[j];
            if (r < -kPivTol) {
                if (bland_) return j;
                if (r < best_val) {
                    best_val = r;
                    best = j;
                }
            }
        }
        return best;
    }

    int choose_leaving(int col) const {
        int row = -1;
        double best = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double a = tab_[i][col];
            if (a > kPivTol) {
                const double ratio = tab_[i][num_cols_] / a;
                if (row < 0 || ratio < best - 1e-12 ||
                    (ratio <= best + 1e-12 && basis_[i] < basis_[row])) {
                    row = i;
                    best = ratio;
                }
            }
        }
        return row;
    }

    // Runs the simplex loop on the selected objective row. Returns false on
    // an unbounded direction. The rhs cell of the objective row stores the
    // negated objective, so improvement means the stored value increases.
    bool iterate(bool phase1) {
        auto& objrow = phase1 ? art_cost_ : cost_;
        const long stall_threshold = 64 + 2L * (m_ + num_cols_);
        long stall = 0;
        double last = objrow[num_cols_];
        bland_ = false;
        for (;;) {
            const int col = choose_entering(objrow);
            if (col < 0) return true;
            const int row = choose_leaving(col);
            if (row < 0) return false;
            pivot(row, col);
            const double now = objrow[num_cols_];
            if (now > last + 1e-12) {
                stall = 0;
                bland_ = false;
                last = now;
            } else if (++stall > stall_threshold) {
                bland_ = true;  // degenerate stretch: Bland guarantees escape
            }
        }
    }

    bool phase1() {
        bool has_art = false;
        for (int i = 0; i < m_; ++i) has_art |= basis_[i] >= first_art_;
        if (!has_art) return true;
        if (!iterate(/*phase1=*/true)) throw Error("phase-1 objective unbounded (internal)");
        if (-art_cost_[num_cols_] > 1e-7) return false;
        // Drive out artificials still basic at level zero.
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < first_art_) continue;
            int col = -1;
            for (int j = 0; j < first_art_; ++j)
                if (std::abs(tab_[i][j]) > 1e-7) {
                    col = j;
                    break;
                }
            if (col >= 0) pivot(i, col);
            // else the row is redundant; the artificial stays basic at zero
        }
        return true;
    }

    void extract_duals(LPSolution& sol) const {
        sol.duals.assign(lp_.rows.size(), 0.0);
        double dual_obj = 0.0;
        for (const auto& info : row_info_) {
            const double y = info.dual_col_sign * cost_[info.dual_col];
            dual_obj += y * info.rhs;
            if (info.user) sol.duals[info.user_row] = obj_sign_ * info.sign * y;
        }
        double shift_term = 0.0;
        for (int v = 0; v < lp_.num_vars(); ++v) shift_term += lp_.objective[v] * lp_.lower[v];
        sol.dual_objective = obj_sign_ * dual_obj + shift_term;
    }

    void verify(const LPSolution& sol) const {
        for (int v = 0; v < lp_.num_vars(); ++v) {
            const double tol = kFeasTol * (1.0 + std::abs(sol.x[v]));
            if (sol.x[v] < lp_.lower[v] - tol || sol.x[v] > lp_.upper[v] + tol)
                throw Error("simplex numerical validation failed on bounds of " +
                            lp_.var_names[v]);
        }
        for (const auto& row : lp_.rows) {
            double lhs = 0.0;
            double scale = std::abs(row.rhs);
            for (const auto& [v, c] : row.coef) {
                lhs += c * sol.x[v];
                scale = std::max(scale, std::abs(c * sol.x[v]));
            }
            const double tol = kFeasTol * (1.0 + scale);
            const bool ok = row.rel == Rel::Le   ? lhs <= row.rhs + tol
                            : row.rel == Rel::Ge ? lhs >= row.rhs - tol
                                                 : std::abs(lhs - row.rhs) <= tol;
            if (!ok) throw Error("simplex numerical validation failed on row " + row.name);
        }
        const double gap = std::abs(sol.objective - sol.dual_objective);
        if (gap > 1e-6 * (1.0 + std::abs(sol.objective)))
            throw Error("simplex duality audit failed: gap " + std::to_string(gap));
    }
};

}  // namespace

LPSolution solve_lp(const LinearProgram& lp, const SolveOptions& opts) {
    check_model(lp);
    stats().lp_solves.fetch_add(1, std::memory_order_relaxed);
    Simplex s(lp, opts);
    return s.run();
}

namespace {

struct Node {
    std::vector<double> lower, upper;
    double bound;
    long seq;
    std::vector<double> x;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.seq > b.seq;
    }
};

int most_fractional(const LinearProgram& lp, const std::vector<double>& x) {
    int best = -1;
    double best_dist = kIntTol;
    for (int v = 0; v < lp.num_vars(); ++v) {
        if (!lp.integral[v]) continue;
        const double frac = x[v] - std::floor(x[v]);
        const double dist = std::min(frac, 1.0 - frac);
        if (dist > best_dist) {
            best = v;
            best_dist = dist;
        }
    }
    return best;
}

}  // namespace

LPSolution solve_milp(const LinearProgram& lp, const SolveOptions& opts) {
    check_model(lp);
    if (lp.num_integral() == 0) return solve_lp(lp, opts);
    stats().milp_integer_solves.fetch_add(1, std::memory_order_relaxed);

    const bool sense_min = lp.sense == Sense::Min;
    bool constant_objective = true;
    for (double c : lp.objective) constant_objective &= c == 0.0;
    const bool stop_first = constant_objective && opts.first_feasible_stop;

    auto solve_with_bounds = [&](const std::vector<double>& lo, const std::vector<double>& up) {
        LinearProgram sub = lp;
        sub.lower = lo;
        sub.upper = up;
        return solve_lp(sub, opts);
    };

    bool have_incumbent = false;
    LPSolution incumbent;
    double incumbent_key = kInf;

    auto prune_key = [&]() { return incumbent_key - kObjTol * (1.0 + std::abs(incumbent_key)); };

    // Fix the integral variables to the snapped values and repair the
    // continuous part, so incumbents carry exact integers. Falls back to the
    // raw node solution when the repair is numerically infeasible.
    auto offer_incumbent = [&](const std::vector<double>& lo, const std::vector<double>& up,
                               const LPSolution& node_sol) {
        std::vector<double> flo = lo, fup = up;
        for (int v = 0; v < lp.num_vars(); ++v)
            if (lp.integral[v]) flo[v] = fup[v] = std::round(node_sol.x[v]);
        LPSolution cand = solve_with_bounds(flo, fup);
        if (cand.status != Status::Optimal) cand = node_sol;
        for (int v = 0; v < lp.num_vars(); ++v)
            if (lp.integral[v]) cand.x[v] = std::round(cand.x[v]);
        const double key = sense_min ? cand.objective : -cand.objective;
        if (!have_incumbent || key < prune_key()) {
            incumbent = std::move(cand);
            incumbent_key = key;
            have_incumbent = true;
        }
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long seq = 0;
    {
        LPSolution root = solve_lp(lp, opts);
        if (root.status == Status::Infeasible) return root;
        if (root.status == Status::Unbounded)
            throw Error("milp relaxation unbounded; integral search undefined");
        open.push(Node{lp.lower, lp.upper, sense_min ? root.objective : -root.objective, seq++,
                       root.x});
    }

    long nodes = 0;
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (have_incumbent && node.bound >= prune_key()) continue;
        if (++nodes > opts.max_nodes) throw ResourceLimitError("milp node limit exceeded");
        stats().bnb_nodes.fetch_add(1, std::memory_order_relaxed);

        const int v = most_fractional(lp, node.x);
        if (v < 0) {
            offer_incumbent(node.lower, node.upper, LPSolution{Status::Optimal, node.x,
                                                               node.bound * (sense_min ? 1 : -1),
                                                               {}, 0.0});
            if (have_incumbent && stop_first) break;
            continue;
        }

        stats().bnb_branches.fetch_add(1, std::memory_order_relaxed);
        const double floor_v = std::floor(node.x[v]);
        bool done = false;
        for (int side = 0; side < 2 && !done; ++side) {
            std::vector<double> lo = node.lower, up = node.upper;
            if (side == 0)
                up[v] = floor_v;
            else
                lo[v] = floor_v + 1.0;
            if (up[v] < lo[v] - 1e-12) continue;
            LPSolution child = solve_with_bounds(lo, up);
            if (child.status != Status::Optimal) continue;
            const double bound = sense_min ? child.objective : -child.objective;
            if (have_incumbent && bound >= prune_key()) continue;
            if (most_fractional(lp, child.x) < 0) {
                offer_incumbent(lo, up, child);
                if (have_incumbent && stop_first) done = true;
                continue;
            }
            open.push(Node{std::move(lo), std::move(up), bound, seq++, std::move(child.x)});
        }
        if (done) break;
    }

    if (!have_incumbent) {
        LPSolution sol;
        sol.status = Status::Infeasible;
        return sol;
    }
    incumbent.duals.clear();
    return incumbent;
}

void write_lp_format(const LinearProgram& lp, std::ostream& out) {
    auto term = [&](std::ostream& os, double c, int v, bool first) {
        if (first)
            os << " " << (c < 0 ? "- " : "") << std::abs(c) << " " << lp.var_names[v];
        else
            os << (c < 0 ? " - " : " + ") << std::abs(c) << " " << lp.var_names[v];
    };
    out << (lp.sense == Sense::Min ? "Minimize" : "Maximize") << "\n obj:";
    bool first = true;
    for (int v = 0; v < lp.num_vars(); ++v) {
        if (lp.objective[v] == 0.0) continue;
        term(out, lp.objective[v], v, first);
        first = false;
    }
    if (first) out << " 0 " << (lp.num_vars() ? lp.var_names[0] : "x0");
    out << "\nSubject To\n";
    for (const auto& row : lp.rows) {
        out << " " << row.name << ":";
        bool f2 = true;
        for (const auto& [v, c] : row.coef) {
            term(out, c, v, f2);
            f2 = false;
        }
        if (f2) out << " 0 " << (lp.num_vars() ? lp.var_names[0] : "x0");
        out << (row.rel == Rel::Le ? " <= " : row.rel == Rel::Ge ? " >= " : " = ") << row.rhs
            << "\n";
    }
    out << "Bounds\n";
    for (int v = 0; v < lp.num_vars(); ++v) {
        out << " " << lp.lower[v] << " <= " << lp.var_names[v];
        if (std::isfinite(lp.upper[v])) out << " <= " << lp.upper[v];
        out << "\n";
    }
    bool any_int = false;
    for (int v = 0; v < lp.num_vars(); ++v) any_int |= lp.integral[v];
    if (any_int) {
        out << "General\n";
        for (int v = 0; v < lp.num_vars(); ++v)
            if (lp.integral[v]) out << " " << lp.var_names[v] << "\n";
    }
    out << "End\n";
}

}  // namespace loadfair::milp
