#include "loadfair/flow.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>

namespace loadfair::flow {

int FlowNetwork::add_arc(int from, int to, long capacity, double cost) {
    if (from < 0 || from >= num_nodes || to < 0 || to >= num_nodes)
        throw ValidationError("arc endpoint out of range");
    if (capacity < 0) throw ValidationError("negative arc capacity");
    if (to == source) throw ValidationError("arc into the source");
    if (from == sink) throw ValidationError("arc out of the sink");
    arcs.push_back(Arc{from, to, capacity, cost});
    return static_cast<int>(arcs.size()) - 1;
}

namespace {

void check_network(const FlowNetwork& net) {
    if (net.source < 0 || net.source >= net.num_nodes || net.sink < 0 ||
        net.sink >= net.num_nodes || net.source == net.sink)
        throw ValidationError("malformed network: bad source/sink");
    for (const auto& a : net.arcs) {
        if (a.from < 0 || a.from >= net.num_nodes || a.to < 0 || a.to >= net.num_nodes)
            throw ValidationError("malformed network: arc endpoint out of range");
        if (a.capacity < 0) throw ValidationError("malformed network: negative capacity");
        if (a.to == net.source || a.from == net.sink)
            throw ValidationError("malformed network: arc into source or out of sink");
    }
}

// Residual view over the arc list: edge 2i is arcs[i], edge 2i+1 its reverse.
struct Residual {
    std::vector<long> cap;
    std::vector<std::vector<int>> out;  // node -> residual edge ids, ascending

    explicit Residual(const FlowNetwork& net) {
        cap.assign(2 * net.arcs.size(), 0);
        out.assign(net.num_nodes, {});
        for (std::size_t i = 0; i < net.arcs.size(); ++i) {
            cap[2 * i] = net.arcs[i].capacity;
            out[net.arcs[i].from].push_back(static_cast<int>(2 * i));
            out[net.arcs[i].to].push_back(static_cast<int>(2 * i + 1));
        }
    }

    static int head(const FlowNetwork& net, int e) {
        return e % 2 == 0 ? net.arcs[e / 2].to : net.arcs[e / 2].from;
    }
};

void verify_integral_flow(const FlowNetwork& net, const FlowResult& res) {
    std::vector<long> balance(net.num_nodes, 0);
    for (std::size_t i = 0; i < net.arcs.size(); ++i) {
        const long f = res.arc_flow[i];
        if (f < 0 || f > net.arcs[i].capacity)
            throw Error("flow result violates a capacity (internal)");
        balance[net.arcs[i].from] -= f;
        balance[net.arcs[i].to] += f;
    }
    for (int v = 0; v < net.num_nodes; ++v) {
        if (v == net.source || v == net.sink) continue;
        if (balance[v] != 0) throw Error("flow result violates conservation (internal)");
    }
    if (balance[net.sink] != res.value || balance[net.source] != -res.value)
        throw Error("flow result value mismatch (internal)");
}

}  // namespace

FlowResult max_flow(const FlowNetwork& net) {
    check_network(net);
    Residual rg(net);
    const int n = net.num_nodes;
    long value = 0;
    std::vector<int> pred_edge(n);
    for (;;) {
        std::vector<char> seen(n, 0);
        std::fill(pred_edge.begin(), pred_edge.end(), -1);
        std::queue<int> q;
        q.push(net.source);
        seen[net.source] = 1;
        while (!q.empty() && !seen[net.sink]) {
            const int v = q.front();
            q.pop();
            for (int e : rg.out[v]) {
                if (rg.cap[e] <= 0) continue;
                const int w = Residual::head(net, e);
                if (seen[w]) continue;
                seen[w] = 1;
                pred_edge[w] = e;
                q.push(w);
            }
        }
        if (!seen[net.sink]) break;
        long push = std::numeric_limits<long>::max();
        for (int v = net.sink; v != net.source;) {
            const int e = pred_edge[v];
            push = std::min(push, rg.cap[e]);
            v = e % 2 == 0 ? net.arcs[e / 2].from : net.arcs[e / 2].to;
        }
        for (int v = net.sink; v != net.source;) {
            const int e = pred_edge[v];
            rg.cap[e] -= push;
            rg.cap[e ^ 1] += push;
            v = e % 2 == 0 ? net.arcs[e / 2].from : net.arcs[e / 2].to;
        }
        value += push;
    }
    FlowResult res;
    res.value = value;
    res.arc_flow.assign(net.arcs.size(), 0);
    res.cost = 0.0;
    for (std::size_t i = 0; i < net.arcs.size(); ++i) {
        res.arc_flow[i] = net.arcs[i].capacity - rg.cap[2 * i];
        res.cost += res.arc_flow[i] * net.arcs[i].cost;
    }
    verify_integral_flow(net, res);
    return res;
}

FlowResult min_cost_flow(const FlowNetwork& net, long required_value) {
    check_network(net);
    if (required_value < 0) throw ValidationError("negative required flow value");
    Residual rg(net);
    const int n = net.num_nodes;
    long value = 0;
    double total_cost = 0.0;
    std::vector<double> dist(n);
    std::vector<int> pred_edge(n);
    while (value < required_value) {
        // Bellman-Ford on the residual graph; relaxations scan arcs in index
        // order with strict improvement, so equal-cost paths resolve to the
        // lowest arc indices.
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        std::fill(pred_edge.begin(), pred_edge.end(), -1);
        dist[net.source] = 0.0;
        for (int round = 0; round < n; ++round) {
            bool changed = false;
            for (std::size_t i = 0; i < rg.cap.size(); ++i) {
                if (rg.cap[i] <= 0) continue;
                const int e = static_cast<int>(i);
                const int from = e % 2 == 0 ? net.arcs[e / 2].from : net.arcs[e / 2].to;
                const int to = Residual::head(net, e);
                const double c = e % 2 == 0 ? net.arcs[e / 2].cost : -net.arcs[e / 2].cost;
                if (dist[from] + c < dist[to] - 1e-15) {
                    dist[to] = dist[from] + c;
                    pred_edge[to] = e;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        if (pred_edge[net.sink] < 0 && net.sink != net.source)
            throw Error("value unreachable: max flow below required value");
        long push = required_value - value;
        for (int v = net.sink; v != net.source;) {
            const int e = pred_edge[v];
            push = std::min(push, rg.cap[e]);
            v = e % 2 == 0 ? net.arcs[e / 2].from : net.arcs[e / 2].to;
        }
        for (int v = net.sink; v != net.source;) {
            const int e = pred_edge[v];
            rg.cap[e] -= push;
            rg.cap[e ^ 1] += push;
            v = e % 2 == 0 ? net.arcs[e / 2].from : net.arcs[e / 2].to;
        }
        value += push;
    }
    FlowResult res;
    res.value = value;
    res.arc_flow.assign(net.arcs.size(), 0);
    for (std::size_t i = 0; i < net.arcs.size(); ++i) {
        res.arc_flow[i] = net.arcs[i].capacity - rg.cap[2 * i];
        total_cost += res.arc_flow[i] * net.arcs[i].cost;
    }
    res.cost = total_cost;
    verify_integral_flow(net, res);
    return res;
}

void write_dot(const FlowNetwork& net, const FlowResult* result, std::ostream& out) {
    out << "digraph G {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < net.arcs.size(); ++i) {
        const auto& a = net.arcs[i];
        out << "  n" << a.from << " -> n" << a.to << " [label=\"";
        if (result) out << result->arc_flow[i] << "/";
        out << a.capacity;
        if (a.cost != 0.0) out << " @" << a.cost;
        out << "\"];\n";
    }
    out << "}\n";
}

}  // namespace loadfair::flow
