#include "xfpt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace xfpt {

HeadGraph::HeadGraph(int node_count,
                     std::vector<std::pair<int, int>> edges,
                     std::map<int, double> loop_weights,
                     int start,
                     int exit_node)
    : node_count_(node_count), start_(start), exit_(exit_node), loop_weights_(std::move(loop_weights)) {
    require(node_count_ >= 1, errc::invalid_argument, "head must have at least one node");
    require(start_ >= 0 && start_ < node_count_, errc::invalid_argument, "start node out of range");
    require(exit_ >= 0 && exit_ < node_count_, errc::invalid_argument, "exit node out of range");

    adjacency_.assign(node_count_, {});
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        require(u >= 0 && u < node_count_ && v >= 0 && v < node_count_, errc::invalid_argument,
                "edge endpoint out of range");
        require(u != v, errc::invalid_argument,
                "self-loops must be given as explicit loop weights, not edges");
        auto key = std::minmax(u, v);
        require(seen.insert(key).second, errc::invalid_argument, "duplicate edge");
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    for (auto& [node, weight] : loop_weights_) {
        require(node >= 0 && node < node_count_, errc::invalid_argument, "loop weight node out of range");
        (void)weight;
    }
}

HeadGraph HeadGraph::clique(int m, int start, int exit_node) {
    require(m >= 2, errc::invalid_argument, "clique head needs at least two nodes");
    require(start >= 0 && start < m, errc::invalid_argument, "start node out of range");
    require(exit_node >= 0 && exit_node < m, errc::invalid_argument, "exit node out of range");
    require(start != exit_node, errc::invalid_argument, "start and exit must differ in a clique head");
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v) edges.emplace_back(u, v);
    return HeadGraph(m, std::move(edges), {}, start, exit_node);
}

HeadGraph HeadGraph::single_loop(double stay) {
    std::map<int, double> loops;
    if (stay != 0.0) loops[0] = stay;
    return HeadGraph(1, {}, std::move(loops), 0, 0);
}

double HeadGraph::loop_weight(int u) const {
    auto it = loop_weights_.find(u);
    return it == loop_weights_.end() ? 0.0 : it->second;
}

int HeadGraph::incident_count(int u) const {
    return static_cast<int>(adjacency_[u].size()) + (u == exit_ ? 1 : 0);
}

double HeadGraph::tail_prob(int u) const {
    if (u != exit_) return 0.0;
    return (1.0 - loop_weight(u)) / incident_count(u);
}

double HeadGraph::step_prob(int u, int v) const {
    if (u == v) return loop_weight(u);
    const auto& nbrs = adjacency_[u];
    if (!std::binary_search(nbrs.begin(), nbrs.end(), v)) return 0.0;
    return (1.0 - loop_weight(u)) / incident_count(u);
}

std::vector<std::string> HeadGraph::validate() const {
    std::vector<std::string> out;
    for (const auto& [node, weight] : loop_weights_) {
        if (!(weight >= 0.0 && weight < 1.0)) {
            std::ostringstream os;
            os << "loop weight at node " << node << " must lie in [0,1), got " << weight;
            out.push_back(os.str());
        }
    }
    for (int u = 0; u < node_count_; ++u) {
        if (incident_count(u) == 0) {
            std::ostringstream os;
            os << "node " << u << " has no incident edge";
            out.push_back(os.str());
        }
    }
    if (exit_hops() < 0) out.push_back("exit is not reachable from start");
    return out;
}

int64_t HeadGraph::exit_hops() const {
    std::vector<int64_t> dist(node_count_, -1);
    std::deque<int> queue{start_};
    dist[start_] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (u == exit_) return dist[u];
        for (int v : adjacency_[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return -1;
}

CometSpec LeakyLoopSpec::to_comet() const {
    return CometSpec{HeadGraph::single_loop(stay), distance - 1, survival};
}

int64_t model_distance(const Model& model) {
    return std::visit(
        [](const auto& spec) -> int64_t {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, CometSpec>)
                return spec.distance();
            else
                return spec.distance;
        },
        model);
}

const char* model_kind(const Model& model) {
    if (std::holds_alternative<CometSpec>(model)) return "comet";
    if (std::holds_alternative<LeakyLoopSpec>(model)) return "leaky-loop";
    return "bethe";
}

HeadGraph build_clique_head(int m, int start, int exit_node) {
    return HeadGraph::clique(m, start, exit_node);
}

LeakyLoopSpec build_leaky_loop(double stay, double survival, int64_t distance) {
    require(stay >= 0.0 && stay < 1.0, errc::invalid_argument, "stay probability must lie in [0,1)");
    require(survival > 0.0 && survival <= 1.0, errc::invalid_argument, "survival must lie in (0,1]");
    require(distance >= 1, errc::invalid_argument, "distance must be at least 1");
    return LeakyLoopSpec{stay, survival, distance};
}

std::vector<std::string> validate(const CometSpec& spec) {
    std::vector<std::string> out = spec.head.validate();
    if (spec.tail_hops < 1) out.push_back("tail must have at least one hop (L >= 1)");
    if (!(spec.survival > 0.0 && spec.survival <= 1.0))
        out.push_back("survival probability out of range (0,1]");
    return out;
}

std::vector<std::string> validate(const LeakyLoopSpec& spec) {
    std::vector<std::string> out;
    if (!(spec.stay >= 0.0 && spec.stay < 1.0)) out.push_back("stay probability out of range [0,1)");
    if (!(spec.survival > 0.0 && spec.survival <= 1.0))
        out.push_back("survival probability out of range (0,1]");
    if (spec.distance < 1) out.push_back("distance must be at least 1");
    return out;
}

std::vector<std::string> validate(const BetheSpec& spec) {
    std::vector<std::string> out;
    if (spec.coordination < 3) out.push_back("coordination number below 3");
    if (spec.distance < 1) out.push_back("distance must be at least 1");
    return out;
}

std::vector<std::string> validate(const Model& model) {
    return std::visit([](const auto& spec) { return validate(spec); }, model);
}

void require_valid(const Model& model) {
    auto violations = validate(model);
    if (violations.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += " " + v + ";";
    fail(errc::invalid_model, msg);
}

} // namespace xfpt
