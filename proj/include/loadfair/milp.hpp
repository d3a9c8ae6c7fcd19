#pragma once

#include <atomic>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "loadfair/errors.hpp"

namespace loadfair::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Constraint residual tolerance for a solution to count as feasible.
inline constexpr double kFeasTol = 1e-7;
// Integral variables are snapped when within this distance of an integer.
inline constexpr double kIntTol = 1e-6;
// Relative tolerance for objective comparisons (bound pruning, audits).
inline constexpr double kObjTol = 1e-9;

enum class Sense { Min, Max };
enum class Rel { Le, Eq, Ge };

struct Row {
    std::vector<std::pair<int, double>> coef;  // (variable, coefficient)
    Rel rel = Rel::Le;
    double rhs = 0.0;
    std::string name;
};

// Dense-tableau scale model: variables have finite lower bounds (all models
// in this codebase are nonnegative), optional finite upper bounds, and an
// optional integrality mark. Integral variables must have finite bounds.
struct LinearProgram {
    Sense sense = Sense::Min;
    std::vector<double> objective;
    std::vector<double> lower, upper;
    std::vector<bool> integral;
    std::vector<Row> rows;
    std::vector<std::string> var_names;

    int add_var(double lo, double up, double obj = 0.0, bool is_integral = false,
                std::string name = "");
    void add_row(Rel rel, double rhs, std::vector<std::pair<int, double>> coef,
                 std::string name = "");
    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_integral() const;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct LPSolution {
    Status status = Status::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    // One multiplier per model row (Min convention: <= rows yield y <= 0,
    // >= rows y >= 0). Populated by solve_lp; solve_milp leaves it empty.
    std::vector<double> duals;
    // b'y of the standardized system; |objective - dual_objective| is the
    // duality audit performed before an Optimal status is returned.
    double dual_objective = 0.0;
};

struct SolveOptions {
    long max_pivots = 2'000'000;   // per LP solve
    long max_nodes = 500'000;      // branch-and-bound tree size
    bool first_feasible_stop = true;  // constant-objective models stop at the incumbent
};

// Simplex (two phase, dense tableau). Integrality marks are ignored.
// Bland's rule engages after a stall threshold so degenerate models
// terminate; exceeding max_pivots raises ResourceLimitError, never a wrong
// status.
LPSolution solve_lp(const LinearProgram& lp, const SolveOptions& opts = {});

// Branch-and-bound over the integral variables: best-bound node selection,
// branching on the most fractional variable. Exceeding max_nodes raises
// ResourceLimitError.
LPSolution solve_milp(const LinearProgram& lp, const SolveOptions& opts = {});

// CPLEX LP text format, for external cross-checking of models.
void write_lp_format(const LinearProgram& lp, std::ostream& out);

// Process-wide instrumentation counters.
struct Stats {
    std::atomic<long> lp_solves{0};
    std::atomic<long> simplex_pivots{0};
    std::atomic<long> milp_integer_solves{0};  // solve_milp calls with >= 1 integral var
    std::atomic<long> bnb_nodes{0};
    std::atomic<long> bnb_branches{0};
};
Stats& stats();

struct StatsSnapshot {
    long lp_solves, simplex_pivots, milp_integer_solves, bnb_nodes, bnb_branches;
};
StatsSnapshot snapshot_stats();

}  // namespace loadfair::milp
