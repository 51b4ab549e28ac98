// Exhaustive trajectory enumeration over an explicit state graph. Used as the
// independent cross-check of the solvers in fpt.cpp: it shares no state space
// or recurrence with them (comet walks run on head nodes plus tail positions,
// Bethe walks run on an explicitly built tree ball, never on the distance
// chain). Only test-scale instances are accepted.

#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "xfpt/fpt.hpp"

namespace xfpt {

namespace {

constexpr int64_t kTermGuard = 10'000'000;  // enumeration size guard

struct StepOption {
    int32_t next;  // -1 = killed, -2 = leaves the enumerable ball (beyond horizon)
    double prob;
};

// Explicit walk graph: per-state step options, target state, and the minimum
// number of steps from each state to the target (for cone pruning; pruned
// mass is credited to the beyond-horizon bucket, never to an arrival).
struct WalkGraph {
    std::vector<std::vector<StepOption>> options;
    std::vector<int64_t> min_steps;
    int32_t start = 0;
    int32_t target = 0;
};

void bfs_min_steps(WalkGraph& g) {
    g.min_steps.assign(g.options.size(), -1);
    // reverse reachability: edge u->v means v is one step after u
    std::vector<std::vector<int32_t>> rev(g.options.size());
    for (size_t u = 0; u < g.options.size(); ++u)
        for (const auto& opt : g.options[u])
            if (opt.next >= 0 && opt.next != static_cast<int32_t>(u)) rev[opt.next].push_back(u);
    std::deque<int32_t> queue{g.target};
    g.min_steps[g.target] = 0;
    while (!queue.empty()) {
        int32_t v = queue.front();
        queue.pop_front();
        for (int32_t u : rev[v]) {
            if (g.min_steps[u] < 0) {
                g.min_steps[u] = g.min_steps[v] + 1;
                queue.push_back(u);
            }
        }
    }
}

WalkGraph comet_walk_graph(const CometSpec& spec) {
    const HeadGraph& head = spec.head;
    const int m = head.node_count();
    const int64_t tail_len = spec.tail_hops;

    // states: 0..m-1 head nodes, m..m+tail_len tail positions (m+tail_len = target)
    WalkGraph g;
    g.options.resize(m + tail_len + 1);
    g.start = head.start();
    g.target = static_cast<int32_t>(m + tail_len);

    for (int u = 0; u < m; ++u) {
        double stay = head.loop_weight(u);
        if (stay > 0.0) g.options[u].push_back({u, stay});
        double per_edge = (1.0 - stay) / head.incident_count(u);
        for (int v : head.neighbors(u)) g.options[u].push_back({v, per_edge});
        if (u == head.exit_node()) g.options[u].push_back({m, per_edge});
    }
    for (int64_t j = 0; j < tail_len; ++j) {
        int32_t here = static_cast<int32_t>(m + j);
        g.options[here].push_back({here + 1, spec.survival});
        if (spec.survival < 1.0) g.options[here].push_back({-1, 1.0 - spec.survival});
    }
    bfs_min_steps(g);
    return g;
}

WalkGraph bethe_walk_graph(const BetheSpec& spec, int64_t t_max) {
    // Build the ball of the z-regular tree around the target, out to radius
    // t_max; walks cannot touch anything farther and still arrive in time.
    const int z = spec.coordination;
    // ball size 1 + z * sum (z-1)^i, estimated up front so oversized requests
    // fail before any allocation
    double estimate = 1.0;
    double shell = static_cast<double>(z);
    for (int64_t r = 1; r <= t_max && estimate <= 2.0 * kTermGuard; ++r) {
        estimate += shell;
        shell *= z - 1;
    }
    require(estimate <= kTermGuard, errc::size_guard, "Bethe ball exceeds the enumeration guard");
    WalkGraph g;
    std::vector<std::vector<int32_t>> adj;
    std::vector<int64_t> depth;  // distance to target

    auto add_node = [&](int64_t dist) {
        adj.emplace_back();
        depth.push_back(dist);
        return static_cast<int32_t>(adj.size() - 1);
    };
    auto link = [&](int32_t a, int32_t b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };

    int32_t target = add_node(0);
    std::deque<int32_t> frontier{target};
    while (!frontier.empty()) {
        int32_t u = frontier.front();
        frontier.pop_front();
        if (depth[u] >= t_max) continue;
        int needed = z - static_cast<int>(adj[u].size());
        for (int c = 0; c < needed; ++c) {
            int32_t v = add_node(depth[u] + 1);
            link(u, v);
            frontier.push_back(v);
        }
        require(static_cast<int64_t>(adj.size()) <= kTermGuard, errc::size_guard,
                "Bethe ball exceeds the enumeration guard");
    }

    // the start node: any node at distance d from the target
    int32_t start = -1;
    for (size_t i = 0; i < depth.size(); ++i) {
        if (depth[i] == spec.distance) {
            start = static_cast<int32_t>(i);
            break;
        }
    }
    require(start >= 0, errc::size_guard, "start distance exceeds enumerable ball");

    g.options.resize(adj.size());
    const double per_neighbor = 1.0 / z;
    for (size_t u = 0; u < adj.size(); ++u) {
        for (int32_t v : adj[u]) g.options[u].push_back({v, per_neighbor});
        // missing children lie outside the ball; a walker stepping there is
        // alive but can no longer arrive within the horizon
        int missing = z - static_cast<int>(adj[u].size());
        if (missing > 0) g.options[u].push_back({-2, missing * per_neighbor});
    }
    g.start = start;
    g.target = target;
    g.min_steps.assign(depth.begin(), depth.end());
    return g;
}

struct Enumerator {
    const WalkGraph& graph;
    int64_t t_max;
    std::vector<KahanSum> arrived;  // by time
    KahanSum killed;
    KahanSum beyond;  // alive at horizon or pruned out of the cone
    int64_t terms = 0;

    void walk(int32_t state, int64_t t, double prob) {
        if (state == graph.target) {
            arrived[t].add(prob);
            return;
        }
        if (t == t_max) {
            beyond.add(prob);
            return;
        }
        for (const auto& opt : graph.options[state]) {
            require(++terms <= kTermGuard, errc::size_guard,
                    "trajectory enumeration exceeds the term guard");
            double p = prob * opt.prob;
            if (opt.next == -1) {
                killed.add(p);
            } else if (opt.next == -2) {
                beyond.add(p);
            } else if (graph.min_steps[opt.next] > t_max - (t + 1)) {
                beyond.add(p);
            } else {
                walk(opt.next, t + 1, p);
            }
        }
    }
};

FptDistribution enumerate(const WalkGraph& graph, int64_t hard_edge, int64_t t_max) {
    Enumerator e{graph, t_max};
    e.arrived.resize(t_max + 1);
    e.walk(graph.start, 0, 1.0);

    std::vector<double> masses(t_max - hard_edge + 1, 0.0);
    for (int64_t t = 0; t <= t_max; ++t) {
        double p = e.arrived[t].value();
        if (p == 0.0) continue;
        require(t >= hard_edge, errc::invalid_model, "enumeration found an arrival below the hard edge");
        masses[t - hard_edge] = p;
    }
    // Killed mass is a lower bound on the defect: walkers alive at the horizon
    // may still die later.
    return FptDistribution(hard_edge, std::move(masses), e.killed.value(), e.beyond.value(), false);
}

} // namespace

FptDistribution brute_force_fpt(const Model& model, int64_t t_max) {
    require(t_max >= 1, errc::invalid_argument, "t_max must be at least 1");
    require_valid(model);
    const int64_t d = model_distance(model);
    require(t_max >= d, errc::invalid_argument, "t_max below the graph distance");

    if (const auto* bethe = std::get_if<BetheSpec>(&model)) {
        WalkGraph g = bethe_walk_graph(*bethe, t_max);
        return enumerate(g, d, t_max);
    }
    CometSpec comet = std::holds_alternative<CometSpec>(model)
                          ? std::get<CometSpec>(model)
                          : std::get<LeakyLoopSpec>(model).to_comet();
    WalkGraph g = comet_walk_graph(comet);
    return enumerate(g, d, t_max);
}

} // namespace xfpt
