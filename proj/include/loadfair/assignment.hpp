#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "loadfair/core.hpp"
#include "loadfair/milp.hpp"

namespace loadfair::assign {

// Distance class for exact-zero pairs; carries no load and no class
// constraint (the log-based class formula is undefined at 0).
inline constexpr int kZeroClass = std::numeric_limits<int>::min();

struct PairClass {
    int t = 0;
    double dhat = 0.0;
    bool excluded = false;
};

struct CostlyClass {
    int center = 0;
    int t = 0;
    int group = 0;
    double dt = 0.0;      // class distance (1+eps)^t eps^2 B
    long population = 0;  // |P_g ∩ S_it|
};

// A budgeted instance after rounding every distance to the geometric grid
// d_t = (1+eps)^t eps^2 B. Pairs with d_hat > (1+eps)B are excluded.
struct RoundedInstance {
    const Instance* inst = nullptr;
    CenterSet centers;
    double eps = 0.0;     // working precision (scaled by the caller)
    double budget = 0.0;  // B > 0
    std::vector<std::vector<PairClass>> pair;  // [center][point]
    int delta = -1;                            // max costly class present; -1 when none
    long costly_count_cap = 0;                 // floor(2/eps^2)
    std::vector<CostlyClass> costly;           // lexicographic by (center, t, group)
    // distinct cheap classes per center: (t, d_t), t ascending
    std::vector<std::vector<std::pair<int, double>>> cheap_classes;

    int num_centers() const { return static_cast<int>(centers.size()); }
    int costly_index(int center, int t, int group) const;
    // sum of d_t over the center's distinct cheap classes (the per-group
    // ceiling slack of the rounding is bounded by this)
    double cheap_class_sum(int center) const;
};

RoundedInstance round_distances(const Instance& inst, const CenterSet& centers, double eps,
                                double B);

// ceil(log_{1+eps}((1+eps)/eps^2)); the largest costly class index any
// rounded instance can contain.
int delta_bound(double eps);

// Guessed number of costly points per (center, class, group), parallel to
// RoundedInstance::costly.
struct ZGuess {
    std::vector<long> z;
};

// Yields every guess satisfying
//   0 <= z_e <= min(count_cap, population_e)
//   per center: sum z <= count_cap and sum d_t z <= (1+eps)B
// exactly once, in lexicographic order. The visitor returns false to stop;
// the function returns false iff stopped early.
bool for_each_z_guess(const RoundedInstance& ri, const std::function<bool(const ZGuess&)>& fn);

// Product over entries of (min(count_cap, population)+1): the guess count
// before load pruning.
std::uint64_t unpruned_z_guess_bound(const RoundedInstance& ri);

struct FairLPOptions {
    bool with_y = true;         // integral per-(group,center) weights
    bool joint_z = false;       // z as bounded integral variables (guess-free)
    bool fairness_rows = true;  // emit the alpha/beta rows
};

struct FairLPModel {
    milp::LinearProgram lp;
    std::vector<std::vector<int>> x_var;  // [center][point], -1 for excluded pairs
    std::vector<std::vector<int>> y_var;  // [group][center]; empty when with_y is false
    std::vector<int> z_var;               // parallel to ri.costly; empty unless joint_z
};

// The Fair-LP for a fixed guess: coverage, group weights, fairness, class
// equalities, per-center budget; constant objective.
FairLPModel build_fair_lp(const RoundedInstance& ri, const ZGuess& z);
FairLPModel build_fair_lp(const RoundedInstance& ri, const ZGuess* z, const FairLPOptions& opts);

// Fair k-median relaxation: coverage + group weights + fairness, objective
// = sum of true distances. No classes, no budget.
FairLPModel build_fair_kmedian_milp(const Instance& inst, const CenterSet& centers);

// Certificate of one rounding, kept for invariant checks.
struct RoundingInfo {
    std::vector<std::vector<long>> counts;  // [group][center] realized
    std::vector<std::vector<long>> y;       // [group][center]; empty in the ceil mode
    std::vector<double> guessed_costly_load;    // per center: sum_{t>=0} d_t z
    std::vector<double> fractional_cheap_load;  // per center: sum_{t<0} d_t lambda
    std::vector<double> cheap_tail;             // per center: cheap_class_sum
    std::vector<double> dhat_load;              // per center realized rounded load
};

// Per-group flow rounding of a fractional Fair-LP solution. x is indexed
// [center][point] (0 for excluded pairs). When y is nonempty the u_i -> T
// capacities are y[g][i] and realized counts match them exactly; otherwise
// the capacities are ceil(sum_j x_ij) per group.
Assignment round_lp_solution(const RoundedInstance& ri,
                             const std::vector<std::vector<double>>& x,
                             const std::vector<std::vector<long>>& y,
                             RoundingInfo* info = nullptr);

enum class BudgetedStrategy {
    JointMilp,          // one MILP, z as integral variables
    EnumeratedGuesses,  // stream guesses, one model per guess
};

struct BudgetedOptions {
    BudgetedStrategy strategy = BudgetedStrategy::JointMilp;
    // Vacuous-fairness fast path: drop the y variables, solve each guess as
    // a pure LP (EnumeratedGuesses only).
    bool lp_only = false;
    std::uint64_t max_guesses = 20'000'000;
    milp::SolveOptions milp;
};

struct BudgetTrace {
    double working_eps = 0.0;
    double dhat_budget = 0.0;  // (1+eps_w)B
    int delta = -1;
    int costly_classes = 0;
    std::uint64_t guesses_tried = 0;  // enumerated strategy
    long models_infeasible = 0;
    bool zero_budget_mode = false;
    bool joint = false;
    std::vector<long> chosen_z;  // parallel to the costly registry, on success
};

struct BudgetedOutcome {
    bool feasible = false;
    Assignment assignment;  // set when feasible
    double true_cost = 0.0;
    RoundingInfo rounding;
    BudgetTrace trace;
};

// Budgeted decision: either an assignment of true cost at most
// (1+eps_user)B, or a correct "no fair assignment of cost <= B exists".
// Resource limits raise ResourceLimitError; they never masquerade as
// Infeasible.
BudgetedOutcome budgeted_fair_assignment(const Instance& inst, const CenterSet& centers, double B,
                                         double eps_user, const BudgetedOptions& opts = {});

// Exact optimal fair k-median assignment (MILP + per-group min-cost-flow
// rounding; the transportation step preserves the objective). Throws
// InfeasibleError when no fair assignment exists.
std::pair<Assignment, double> fair_kmedian_assignment(const Instance& inst,
                                                      const CenterSet& centers);

struct SearchTrace {
    double kmedian_cost = 0.0;  // D
    int grid_lo = 0, grid_hi = 0;
    int found_index = 0;
    int probes = 0;
    bool monotone_fallback = false;
    BudgetTrace last_budget;
};

struct AssignResult {
    Assignment assignment;
    double cost = 0.0;
    SearchTrace trace;
};

struct AssignOptions {
    BudgetedOptions budgeted;
};

// (1+eps)-approximate fair assignment: bracket OPT by the fair k-median
// cost D (D/k <= OPT <= D), then geometric budget search with the budgeted
// decision at precision eps/3.
AssignResult fair_assignment(const Instance& inst, const CenterSet& centers, double eps,
                             const AssignOptions& opts = {});

// Vacuous-fairness specialization: no integral variables anywhere; each
// budget decision enumerates guesses and solves pure LPs, rounding with
// ceil capacities. Errors out when the instance carries nontrivial
// fairness.
AssignResult mlkc_assignment(const Instance& inst, const CenterSet& centers, double eps,
                             const AssignOptions& opts = {});

}  // namespace loadfair::assign
