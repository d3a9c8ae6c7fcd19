#include "loadfair/flow.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "loadfair/rng.hpp"

using namespace loadfair;
using namespace loadfair::flow;

namespace {

// brute-force min cut: min over vertex sets containing S but not T
long brute_min_cut(const FlowNetwork& net) {
    const int n = net.num_nodes;
    long best = std::numeric_limits<long>::max();
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (!(mask & (1 << net.source))) continue;
        if (mask & (1 << net.sink)) continue;
        long cut = 0;
        for (const auto& a : net.arcs)
            if ((mask & (1 << a.from)) && !(mask & (1 << a.to))) cut += a.capacity;
        best = std::min(best, cut);
    }
    return best;
}

// exhaustive min over integral flow vectors of a required value
double brute_min_cost(const FlowNetwork& net, long required, bool& reachable) {
    std::vector<long> f(net.arcs.size(), 0);
    double best = std::numeric_limits<double>::infinity();
    reachable = false;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == net.arcs.size()) {
            std::vector<long> balance(net.num_nodes, 0);
            double cost = 0.0;
            for (std::size_t a = 0; a < net.arcs.size(); ++a) {
                balance[net.arcs[a].from] -= f[a];
                balance[net.arcs[a].to] += f[a];
                cost += f[a] * net.arcs[a].cost;
            }
            for (int v = 0; v < net.num_nodes; ++v) {
                if (v == net.source || v == net.sink) continue;
                if (balance[v] != 0) return;
            }
            if (balance[net.sink] != required) return;
            reachable = true;
            best = std::min(best, cost);
            return;
        }
        for (long v = 0; v <= net.arcs[i].capacity; ++v) {
            f[i] = v;
            rec(i + 1);
        }
        f[i] = 0;
    };
    rec(0);
    return best;
}

}  // namespace

TEST_CASE("unit path and disconnected source") {
    FlowNetwork net;
    const int s = net.add_node(), a = net.add_node(), t = net.add_node();
    net.source = s;
    net.sink = t;
    net.add_arc(s, a, 1);
    net.add_arc(a, t, 1);
    CHECK(max_flow(net).value == 1);

    FlowNetwork empty;
    empty.source = empty.add_node();
    empty.sink = empty.add_node();
    CHECK(max_flow(empty).value == 0);
}

TEST_CASE("bipartite 2x2 admits a perfect matching") {
    FlowNetwork net;
    const int s = net.add_node(), t = net.add_node();
    net.source = s;
    net.sink = t;
    const int u0 = net.add_node(), u1 = net.add_node();
    const int v0 = net.add_node(), v1 = net.add_node();
    net.add_arc(s, u0, 1);
    net.add_arc(s, u1, 1);
    for (int u : {u0, u1})
        for (int v : {v0, v1}) net.add_arc(u, v, 1);
    net.add_arc(v0, t, 1);
    net.add_arc(v1, t, 1);
    CHECK(max_flow(net).value == 2);
}

TEST_CASE("min cost flow picks the cheap arc first") {
    FlowNetwork net;
    const int s = net.add_node(), t = net.add_node();
    net.source = s;
    net.sink = t;
    net.add_arc(s, t, 1, 3.0);
    net.add_arc(s, t, 1, 1.0);
    CHECK(min_cost_flow(net, 1).cost == doctest::Approx(1.0));
    CHECK(min_cost_flow(net, 2).cost == doctest::Approx(4.0));
    CHECK_THROWS_WITH_AS(min_cost_flow(net, 3), doctest::Contains("value unreachable"), Error);
}

TEST_CASE("malformed networks are rejected") {
    FlowNetwork net;
    net.source = net.add_node();
    net.sink = net.add_node();
    CHECK_THROWS_AS(net.add_arc(0, 0, -1), ValidationError);
    CHECK_THROWS_AS(net.add_arc(1, 0, 1), ValidationError);  // into the source
}

TEST_CASE("fair k-median rounding network on the line fixture") {
    // points 0,1,4,5 and centers at 0,5 with cluster sizes fixed to (2,2):
    // brute force over the 6 balanced assignments gives min sum 2 via the
    // nearest-center split.
    const double pos[] = {0, 1, 4, 5};
    const double ctr[] = {0, 5};
    FlowNetwork net;
    const int s = net.add_node(), t = net.add_node();
    net.source = s;
    net.sink = t;
    int v[4], u[2];
    for (int j = 0; j < 4; ++j) v[j] = net.add_node();
    for (int i = 0; i < 2; ++i) u[i] = net.add_node();
    for (int j = 0; j < 4; ++j) net.add_arc(s, v[j], 1);
    std::vector<std::pair<std::pair<int, int>, int>> arcs;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 2; ++i)
            arcs.push_back({{j, i}, net.add_arc(v[j], u[i], 1, std::abs(pos[j] - ctr[i]))});
    net.add_arc(u[0], t, 2);
    net.add_arc(u[1], t, 2);
    const auto res = min_cost_flow(net, 4);
    CHECK(res.cost == doctest::Approx(2.0));
    // reproduces the nearest-center assignment
    for (const auto& [ji, arc] : arcs) {
        const bool expect = (ji.first < 2) == (ji.second == 0);
        CHECK(res.arc_flow[arc] == (expect ? 1 : 0));
    }
}

TEST_CASE("max flow equals brute-force min cut on random networks") {
    Rng rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
        FlowNetwork net;
        const int n = 4 + static_cast<int>(rng.next_below(9));  // <= 12 nodes
        for (int i = 0; i < n; ++i) net.add_node();
        net.source = 0;
        net.sink = 1;
        const int arcs = 3 + static_cast<int>(rng.next_below(2 * n));
        for (int a = 0; a < arcs; ++a) {
            const int from = static_cast<int>(rng.next_below(n));
            const int to = static_cast<int>(rng.next_below(n));
            if (from == to || to == net.source || from == net.sink) continue;
            net.add_arc(from, to, static_cast<long>(rng.next_below(4)));
        }
        const auto res = max_flow(net);
        CHECK(res.value == brute_min_cut(net));
    }
}

TEST_CASE("min cost flow matches exhaustive enumeration on small networks") {
    Rng rng(43);
    int compared = 0;
    for (int trial = 0; trial < 700; ++trial) {
        FlowNetwork net;
        const int n = 3 + static_cast<int>(rng.next_below(3));
        for (int i = 0; i < n; ++i) net.add_node();
        net.source = 0;
        net.sink = 1;
        const int arcs = 2 + static_cast<int>(rng.next_below(7));  // <= 8 arcs
        for (int a = 0; a < arcs; ++a) {
            const int from = static_cast<int>(rng.next_below(n));
            const int to = static_cast<int>(rng.next_below(n));
            if (from == to || to == net.source || from == net.sink) continue;
            net.add_arc(from, to, 1 + static_cast<long>(rng.next_below(2)),
                        std::floor(rng.next_double() * 8.0) / 2.0);
        }
        const long value = max_flow(net).value;
        if (value == 0) continue;
        const long required = 1 + static_cast<long>(rng.next_below(value));
        bool reachable = false;
        const double oracle = brute_min_cost(net, required, reachable);
        REQUIRE(reachable);
        const auto res = min_cost_flow(net, required);
        CHECK(res.cost == doctest::Approx(oracle).epsilon(1e-9));
        ++compared;
    }
    CHECK(compared > 200);
}

TEST_CASE("dot dump smoke") {
    FlowNetwork net;
    const int s = net.add_node(), t = net.add_node();
    net.source = s;
    net.sink = t;
    net.add_arc(s, t, 2, 1.5);
    const auto res = max_flow(net);
    std::ostringstream out;
    write_dot(net, &res, out);
    CHECK(out.str().find("digraph") != std::string::npos);
    CHECK(out.str().find("2/2") != std::string::npos);
}
