#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "icecav/mdp.hpp"
#include "icecav/synth.hpp"

namespace icecav {

/// Everything a run needs besides the flow grid.
///
/// JSON layout:
/// {
///   "grid": "path/to/archive",            (optional; --grid overrides)
///   "mdp": { "delta": 3600, "z_min": -1000, ... },
///   "terminals": [ { "label": "grounding_zone", "reward": 10000,
///                    "polygon": [[x, y], ...], "z_range": [lo, hi] } ],
///   "start": [x, y, z],
///   "success_label": "grounding_zone"
/// }
struct Scenario {
  std::optional<std::string> grid;
  MdpConfig mdp;
  std::vector<TerminalRegion> terminals;
  Vec3 start;
  std::string success_label = "grounding_zone";
};

Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

MdpConfig mdp_config_from_json(const nlohmann::json& doc);
nlohmann::json mdp_config_to_json(const MdpConfig& c);

CavityParams cavity_params_from_json(const nlohmann::json& doc);
nlohmann::json cavity_params_to_json(const CavityParams& p);

/// Scenario matching a synthetic cavity: a grounding-zone terminal over the innermost
/// `gz_length` metres, a zero-reward "swept_to_sea" terminal across the inlet, and a start
/// point near the inlet in the lower (inflowing) water column.
Scenario default_scenario(const CavityParams& params, double gz_length = 4000.0);

}  // namespace icecav
