#pragma once

#include <iosfwd>
#include <vector>

#include "loadfair/errors.hpp"

namespace loadfair::flow {

struct Arc {
    int from = 0;
    int to = 0;
    long capacity = 0;  // >= 0, integral
    double cost = 0.0;
};

struct FlowNetwork {
    int num_nodes = 0;
    int source = 0;
    int sink = 0;
    std::vector<Arc> arcs;

    int add_node() { return num_nodes++; }
    int add_arc(int from, int to, long capacity, double cost = 0.0);
};

struct FlowResult {
    long value = 0;
    std::vector<long> arc_flow;  // parallel to net.arcs, always integral
    double cost = 0.0;           // sum of arc cost * flow
};

// BFS augmentation; capacities here are small so asymptotic sophistication
// buys nothing. Arcs are scanned in index order, so results are
// deterministic.
FlowResult max_flow(const FlowNetwork& net);

// Successive shortest augmenting paths. Path ties are broken by the arc
// scan order (lowest arc index wins), keeping rounded assignments
// reproducible. Throws Error("value unreachable") when max flow falls short
// of required_value.
FlowResult min_cost_flow(const FlowNetwork& net, long required_value);

void write_dot(const FlowNetwork& net, const FlowResult* result, std::ostream& out);

}  // namespace loadfair::flow
