#include "xfpt/model_json.hpp"

#include <utility>
#include <vector>

namespace xfpt {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { fail(errc::parse_error, what); }

double need_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) schema_error(std::string("missing numeric field \"") + key + '"');
    return j[key].get<double>();
}

int64_t need_integer(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        schema_error(std::string("missing integer field \"") + key + '"');
    return j[key].get<int64_t>();
}

HeadGraph head_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) schema_error("head must be an object with a \"type\"");
    const std::string type = j["type"].get<std::string>();
    if (type == "clique") {
        return HeadGraph::clique(static_cast<int>(need_integer(j, "m")),
                                 static_cast<int>(need_integer(j, "start")),
                                 static_cast<int>(need_integer(j, "exit")));
    }
    if (type == "single") {
        return HeadGraph::single_loop(j.contains("s") ? need_number(j, "s") : 0.0);
    }
    if (type == "custom") {
        std::vector<std::pair<int, int>> edges;
        if (j.contains("edges"))
            for (const auto& e : j["edges"]) {
                if (!e.is_array() || e.size() != 2) schema_error("edges must be [u, v] pairs");
                edges.emplace_back(e[0].get<int>(), e[1].get<int>());
            }
        std::map<int, double> loops;
        if (j.contains("loops"))
            for (const auto& [node, weight] : j["loops"].items())
                loops[std::stoi(node)] = weight.get<double>();
        return HeadGraph(static_cast<int>(need_integer(j, "nodes")), std::move(edges),
                         std::move(loops), static_cast<int>(need_integer(j, "start")),
                         static_cast<int>(need_integer(j, "exit")));
    }
    schema_error("unknown head type \"" + type + '"');
}

json head_to_json(const HeadGraph& head) {
    json j;
    j["type"] = "custom";
    j["nodes"] = head.node_count();
    json edges = json::array();
    for (int u = 0; u < head.node_count(); ++u)
        for (int v : head.neighbors(u))
            if (u < v) edges.push_back({u, v});
    j["edges"] = edges;
    json loops = json::object();
    for (int u = 0; u < head.node_count(); ++u)
        if (head.has_loop(u)) loops[std::to_string(u)] = head.loop_weight(u);
    if (!loops.empty()) j["loops"] = loops;
    j["start"] = head.start();
    j["exit"] = head.exit_node();
    return j;
}

CometSpec comet_from_json(const json& j) {
    if (!j.contains("head")) schema_error("comet needs a \"head\" block");
    HeadGraph head = head_from_json(j["head"]);
    double mu = j.contains("mu") ? need_number(j, "mu") : 1.0;
    const bool has_hops = j.contains("L");
    const bool has_distance = j.contains("d");
    if (has_hops == has_distance) schema_error("comet needs exactly one of \"L\" and \"d\"");
    int64_t tail_hops;
    if (has_hops) {
        tail_hops = need_integer(j, "L");
    } else {
        int64_t head_distance = head.exit_hops() + 1;
        tail_hops = need_integer(j, "d") - head_distance;
        require(tail_hops >= 1, errc::parse_error, "comet distance must exceed the head distance");
    }
    return CometSpec{std::move(head), tail_hops, mu};
}

} // namespace

Model model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("model")) schema_error("model block must carry a \"model\" kind");
    const std::string kind = j["model"].get<std::string>();
    if (kind == "leaky-loop")
        return LeakyLoopSpec{need_number(j, "s"), j.contains("mu") ? need_number(j, "mu") : 1.0,
                             need_integer(j, "d")};
    if (kind == "bethe")
        return BetheSpec{static_cast<int>(need_integer(j, "z")), need_integer(j, "d")};
    if (kind == "comet") return comet_from_json(j);
    schema_error("unknown model kind \"" + kind + '"');
}

Model model_from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(errc::parse_error, "model JSON does not parse");
    return model_from_json(j);
}

json model_to_json(const Model& model) {
    json j;
    if (const auto* loop = std::get_if<LeakyLoopSpec>(&model)) {
        j["model"] = "leaky-loop";
        j["s"] = loop->stay;
        j["mu"] = loop->survival;
        j["d"] = loop->distance;
    } else if (const auto* spec = std::get_if<CometSpec>(&model)) {
        j["model"] = "comet";
        j["head"] = head_to_json(spec->head);
        j["L"] = spec->tail_hops;
        j["mu"] = spec->survival;
        j["d"] = spec->distance();
    } else {
        const auto& bethe = std::get<BetheSpec>(model);
        j["model"] = "bethe";
        j["z"] = bethe.coordination;
        j["d"] = bethe.distance;
    }
    return j;
}

ModelFamily family_from_json(const json& j) {
    if (!j.is_object() || !j.contains("model")) schema_error("model block must carry a \"model\" kind");
    const std::string kind = j["model"].get<std::string>();
    if (kind == "leaky-loop")
        return ModelFamily::leaky_loop(need_number(j, "s"),
                                       j.contains("mu") ? need_number(j, "mu") : 1.0);
    if (kind == "bethe") return ModelFamily::bethe(static_cast<int>(need_integer(j, "z")));
    if (kind == "comet") {
        if (!j.contains("head")) schema_error("comet needs a \"head\" block");
        return ModelFamily::comet(head_from_json(j["head"]),
                                  j.contains("mu") ? need_number(j, "mu") : 1.0);
    }
    schema_error("unknown model kind \"" + kind + '"');
}

} // namespace xfpt
