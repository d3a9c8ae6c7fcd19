#include "loadfair/milp.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "doctest.h"
#include "loadfair/rng.hpp"

using namespace loadfair;
using namespace loadfair::milp;

namespace {

// Independent oracle: exhaustive enumeration over all integer assignments,
// each completed by an LP over the continuous variables.
std::optional<double> enumerate_milp(const LinearProgram& lp) {
    std::vector<int> ints;
    for (int v = 0; v < lp.num_vars(); ++v)
        if (lp.integral[v]) ints.push_back(v);
    std::vector<long> value(ints.size());
    for (std::size_t i = 0; i < ints.size(); ++i)
        value[i] = static_cast<long>(std::llround(lp.lower[ints[i]]));
    std::optional<double> best;
    for (;;) {
        LinearProgram fixed = lp;
        for (std::size_t i = 0; i < ints.size(); ++i)
            fixed.lower[ints[i]] = fixed.upper[ints[i]] = static_cast<double>(value[i]);
        const auto sol = solve_lp(fixed);
        if (sol.status == Status::Optimal) {
            const bool better = lp.sense == Sense::Min ? (!best || sol.objective < *best)
                                                       : (!best || sol.objective > *best);
            if (better) best = sol.objective;
        }
        std::size_t i = 0;
        for (; i < ints.size(); ++i) {
            if (value[i] + 1 <= static_cast<long>(std::llround(lp.upper[ints[i]]))) {
                ++value[i];
                break;
            }
            value[i] = static_cast<long>(std::llround(lp.lower[ints[i]]));
        }
        if (i == ints.size()) break;
    }
    return best;
}

}  // namespace

TEST_CASE("single binding constraint") {
    LinearProgram lp;
    const int x = lp.add_var(0.0, kInf, 1.0);
    lp.add_row(Rel::Ge, 3.0, {{x, 1.0}});
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.x[x] == doctest::Approx(3.0));
    CHECK(sol.objective == doctest::Approx(3.0));
}

TEST_CASE("two-constraint intersection solved by hand") {
    // min x+y st x+2y >= 4, 3x+y >= 6: both constraints tight at
    // (1.6, 1.2), objective 2.8.
    LinearProgram lp;
    const int x = lp.add_var(0.0, kInf, 1.0);
    const int y = lp.add_var(0.0, kInf, 1.0);
    lp.add_row(Rel::Ge, 4.0, {{x, 1.0}, {y, 2.0}});
    lp.add_row(Rel::Ge, 6.0, {{x, 3.0}, {y, 1.0}});
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.x[x] == doctest::Approx(1.6));
    CHECK(sol.x[y] == doctest::Approx(1.2));
    CHECK(sol.objective == doctest::Approx(2.8));
    CHECK(sol.x[x] + 2 * sol.x[y] == doctest::Approx(4.0));
    CHECK(3 * sol.x[x] + sol.x[y] == doctest::Approx(6.0));
    // duals solve the transposed system: y1 + 3 y2 = 1, 2 y1 + y2 = 1
    CHECK(sol.duals[0] == doctest::Approx(0.4));
    CHECK(sol.duals[1] == doctest::Approx(0.2));
    CHECK(sol.dual_objective == doctest::Approx(sol.objective));
}

TEST_CASE("contradictory constraints are infeasible") {
    LinearProgram lp;
    const int x = lp.add_var(0.0, kInf, 1.0);
    lp.add_row(Rel::Le, 1.0, {{x, 1.0}});
    lp.add_row(Rel::Ge, 2.0, {{x, 1.0}});
    CHECK(solve_lp(lp).status == Status::Infeasible);

    LinearProgram lp2;
    lp2.add_var(2.0, 1.0, 1.0);  // bounds crossed
    CHECK(solve_lp(lp2).status == Status::Infeasible);
}

TEST_CASE("unbounded detection") {
    LinearProgram lp;
    const int x = lp.add_var(0.0, kInf, -1.0);
    lp.add_row(Rel::Ge, 1.0, {{x, 1.0}});
    CHECK(solve_lp(lp).status == Status::Unbounded);
}

TEST_CASE("max sense") {
    LinearProgram lp;
    lp.sense = Sense::Max;
    const int x = lp.add_var(0.0, 4.0, 2.0);
    const int y = lp.add_var(0.0, kInf, 3.0);
    lp.add_row(Rel::Le, 6.0, {{x, 1.0}, {y, 2.0}});
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.objective == doctest::Approx(11.0));  // x=4, y=1
    CHECK(sol.dual_objective == doctest::Approx(11.0));
}

TEST_CASE("duality audit holds on random feasible programs") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(4));
        const int m = 1 + static_cast<int>(rng.next_below(4));
        LinearProgram lp;
        for (int v = 0; v < n; ++v) lp.add_var(0.0, 10.0, rng.next_double() * 4.0 - 1.0);
        // rows through a known interior point keep the program feasible
        std::vector<double> x0(n);
        for (auto& v : x0) v = rng.next_double() * 3.0;
        for (int r = 0; r < m; ++r) {
            std::vector<std::pair<int, double>> coef;
            double lhs = 0.0;
            for (int v = 0; v < n; ++v) {
                const double c = rng.next_double() * 4.0 - 2.0;
                coef.emplace_back(v, c);
                lhs += c * x0[v];
            }
            const int kind = static_cast<int>(rng.next_below(3));
            if (kind == 0)
                lp.add_row(Rel::Le, lhs + rng.next_double(), coef);
            else if (kind == 1)
                lp.add_row(Rel::Ge, lhs - rng.next_double(), coef);
            else
                lp.add_row(Rel::Eq, lhs, coef);
        }
        const auto sol = solve_lp(lp);
        REQUIRE(sol.status == Status::Optimal);
        CHECK(std::abs(sol.objective - sol.dual_objective) <=
              1e-6 * (1.0 + std::abs(sol.objective)));
    }
}

TEST_CASE("milp without integral variables equals solve_lp") {
    LinearProgram lp;
    const int x = lp.add_var(0.0, kInf, 1.0);
    lp.add_row(Rel::Ge, 2.5, {{x, 1.0}});
    const auto a = solve_lp(lp);
    const auto b = solve_milp(lp);
    REQUIRE(a.status == Status::Optimal);
    REQUIRE(b.status == Status::Optimal);
    CHECK(a.objective == doctest::Approx(b.objective));
}

TEST_CASE("integer ceiling of a bound") {
    LinearProgram lp;
    const int y = lp.add_var(0.0, 10.0, 1.0, true);
    lp.add_row(Rel::Ge, 1.5, {{y, 1.0}});
    const auto sol = solve_milp(lp);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.x[y] == doctest::Approx(2.0));
    CHECK(sol.objective == doctest::Approx(2.0));
}

TEST_CASE("branch-and-bound matches exhaustive enumeration") {
    Rng rng(23);
    int solved = 0, infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int ni = 1 + static_cast<int>(rng.next_below(6));  // <= 6 integral vars
        const int nc = static_cast<int>(rng.next_below(3));
        LinearProgram lp;
        for (int v = 0; v < ni; ++v) {
            const double lo = static_cast<double>(rng.next_below(3));
            const double range = 1 + static_cast<double>(rng.next_below(5));
            lp.add_var(lo, lo + range, rng.next_double() * 4.0 - 2.0, true);
        }
        for (int v = 0; v < nc; ++v) lp.add_var(0.0, 5.0, rng.next_double() * 2.0 - 1.0);
        const int m = 1 + static_cast<int>(rng.next_below(4));
        for (int r = 0; r < m; ++r) {
            std::vector<std::pair<int, double>> coef;
            for (int v = 0; v < lp.num_vars(); ++v)
                coef.emplace_back(v, rng.next_double() * 4.0 - 2.0);
            const double rhs = rng.next_double() * 10.0 - 2.0;
            lp.add_row(rng.next_below(2) ? Rel::Le : Rel::Ge, rhs, coef);
        }
        const auto oracle = enumerate_milp(lp);
        const auto sol = solve_milp(lp);
        if (oracle) {
            ++solved;
            REQUIRE_MESSAGE(sol.status == Status::Optimal,
                            "bnb reported infeasible but enumeration found a solution");
            CHECK(sol.objective == doctest::Approx(*oracle).epsilon(1e-6));
            for (int v = 0; v < lp.num_vars(); ++v)
                if (lp.integral[v]) CHECK(sol.x[v] == doctest::Approx(std::round(sol.x[v])));
        } else {
            ++infeasible;
            CHECK(sol.status == Status::Infeasible);
        }
    }
    // the generator must exercise both outcomes
    CHECK(solved > 50);
    CHECK(infeasible > 20);
}

TEST_CASE("lp format dump") {
    LinearProgram lp;
    const int x = lp.add_var(0.0, 5.0, 1.0, true, "width");
    lp.add_row(Rel::Ge, 2.0, {{x, 1.0}}, "min_width");
    std::ostringstream out;
    write_lp_format(lp, out);
    const auto s = out.str();
    CHECK(s.find("Minimize") != std::string::npos);
    CHECK(s.find("min_width:") != std::string::npos);
    CHECK(s.find("General") != std::string::npos);
    CHECK(s.find("width") != std::string::npos);
    CHECK(s.find("End") != std::string::npos);
}

TEST_CASE("stats counters move") {
    const auto before = snapshot_stats();
    LinearProgram lp;
    const int y = lp.add_var(0.0, 3.0, 0.0, true);
    lp.add_row(Rel::Ge, 0.5, {{y, 1.0}});
    (void)solve_milp(lp);
    const auto after = snapshot_stats();
    CHECK(after.milp_integer_solves == before.milp_integer_solves + 1);
    CHECK(after.lp_solves > before.lp_solves);
}

TEST_CASE("degenerate cycling-prone program terminates at the optimum") {
    // A classic cycling example for textbook pivoting rules: every basis in
    // the cycle is degenerate. The stall guard must hand over to Bland's
    // rule and still reach the optimum at x3 = 1, objective -0.05.
    LinearProgram lp;
    const int x1 = lp.add_var(0.0, kInf, -0.75);
    const int x2 = lp.add_var(0.0, kInf, 150.0);
    const int x3 = lp.add_var(0.0, kInf, -0.02);
    const int x4 = lp.add_var(0.0, kInf, 6.0);
    lp.add_row(Rel::Le, 0.0, {{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}});
    lp.add_row(Rel::Le, 0.0, {{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}});
    lp.add_row(Rel::Le, 1.0, {{x3, 1.0}});
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.objective == doctest::Approx(-0.05));
    CHECK(sol.x[x3] == doctest::Approx(1.0));
}

TEST_CASE("equality-heavy degenerate programs stay solvable") {
    // redundant equalities of the kind the class-mass rows produce
    Rng rng(57);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_below(4));
        LinearProgram lp;
        for (int v = 0; v < n; ++v) lp.add_var(0.0, 1.0, rng.next_double() - 0.5);
        std::vector<std::pair<int, double>> all;
        for (int v = 0; v < n; ++v) all.emplace_back(v, 1.0);
        lp.add_row(Rel::Eq, 1.0, all);
        lp.add_row(Rel::Eq, 1.0, all);  // duplicated on purpose
        std::vector<std::pair<int, double>> head(all.begin(), all.begin() + n / 2);
        std::vector<std::pair<int, double>> tail(all.begin() + n / 2, all.end());
        const double split = rng.next_double();
        lp.add_row(Rel::Eq, split, head);
        lp.add_row(Rel::Eq, 1.0 - split, tail);
        const auto sol = solve_lp(lp);
        REQUIRE(sol.status == Status::Optimal);
    }
}
