#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "xfpt/common.hpp"

namespace xfpt {

/**
 * Finite head subgraph feeding the ballistic tail.
 *
 * Undirected simple edges over nodes [0, node_count); self-loops exist only
 * as explicit per-node stay weights. The exit node carries one additional
 * incident edge onto the tail. A step from node u stays with the loop weight
 * w(u) and otherwise picks uniformly among u's non-loop incident edges
 * (tail edge included at the exit).
 */
class HeadGraph {
public:
    HeadGraph(int node_count,
              std::vector<std::pair<int, int>> edges,
              std::map<int, double> loop_weights,
              int start,
              int exit_node);

    // All-to-all head on m nodes, no self-loops.
    static HeadGraph clique(int m, int start, int exit_node);

    // One node with stay weight s and the tail edge; the leaky-loop head.
    static HeadGraph single_loop(double stay);

    int node_count() const { return node_count_; }
    int start() const { return start_; }
    int exit_node() const { return exit_; }
    const std::vector<int>& neighbors(int u) const { return adjacency_[u]; }
    double loop_weight(int u) const;
    bool has_loop(int u) const { return loop_weights_.count(u) > 0; }

    // Non-loop incident edge count; the tail edge counts at the exit.
    int incident_count(int u) const;

    // Probability of hopping onto the tail in one step (nonzero only at exit).
    double tail_prob(int u) const;

    // Head-internal one-step transition probability u -> v.
    double step_prob(int u, int v) const;

    // Structural invariant violations; empty means valid.
    std::vector<std::string> validate() const;

    // BFS hop count start -> exit along head edges (0 when start == exit).
    int64_t exit_hops() const;

private:
    int node_count_;
    int start_;
    int exit_;
    std::vector<std::vector<int>> adjacency_;
    std::map<int, double> loop_weights_;
};

struct CometSpec {
    HeadGraph head;
    int64_t tail_hops;   // L: hops from the tail entry node to the target
    double survival;     // mu: per-hop survival on the tail

    // Steps from g0 through the head->tail entry hop.
    int64_t head_distance() const { return head.exit_hops() + 1; }
    int64_t distance() const { return head_distance() + tail_hops; }
};

struct LeakyLoopSpec {
    double stay = 0.0;      // s
    double survival = 1.0;  // mu
    int64_t distance = 1;   // d

    CometSpec to_comet() const;
};

struct BetheSpec {
    int coordination;   // z
    int64_t distance;   // d
};

using Model = std::variant<LeakyLoopSpec, CometSpec, BetheSpec>;

int64_t model_distance(const Model& model);
const char* model_kind(const Model& model);

// build_clique_head: comet head as an m-clique. Throws on m < 2, out-of-range
// or coincident start/exit.
HeadGraph build_clique_head(int m, int start, int exit_node);

// build_leaky_loop: one-node head with stay weight s, tail of d-1 hops.
LeakyLoopSpec build_leaky_loop(double stay, double survival, int64_t distance);

std::vector<std::string> validate(const CometSpec& spec);
std::vector<std::string> validate(const LeakyLoopSpec& spec);
std::vector<std::string> validate(const BetheSpec& spec);
std::vector<std::string> validate(const Model& model);

// Throws invalid_model when validate(model) is nonempty.
void require_valid(const Model& model);

} // namespace xfpt
