#pragma once

#include <string>

#include <json.hpp>

#include "xfpt/diagnostics.hpp"
#include "xfpt/graph.hpp"

namespace xfpt {

// Model block schema, {"model": "comet" | "leaky-loop" | "bethe", ...}:
//   leaky-loop: {"model":"leaky-loop","s":0.5,"mu":0.9,"d":50}
//   bethe:      {"model":"bethe","z":3,"d":4}
//   comet:      {"model":"comet","mu":0.9,"head":{...}, "L":46 | "d":48}
// with head one of
//   {"type":"clique","m":4,"start":0,"exit":3}
//   {"type":"single","s":0.5}
//   {"type":"custom","nodes":4,"edges":[[0,1],...],"loops":{"0":0.5},"start":0,"exit":3}
Model model_from_json(const nlohmann::json& j);
Model model_from_json_text(const std::string& text);

nlohmann::json model_to_json(const Model& model);

// Family of the given model block (its distance field is ignored).
ModelFamily family_from_json(const nlohmann::json& j);

} // namespace xfpt
