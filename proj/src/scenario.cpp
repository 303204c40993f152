#include "icecav/scenario.hpp"

#include "icecav/error.hpp"
#include "icecav/raw_io.hpp"

namespace icecav {

using nlohmann::json;

namespace {

template <class T>
void read_opt(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

}  // namespace

MdpConfig mdp_config_from_json(const json& doc) {
  MdpConfig c;
  read_opt(doc, "delta", c.delta);
  read_opt(doc, "z_min", c.z_min);
  read_opt(doc, "ascent_rate_max", c.ascent_rate_max);
  read_opt(doc, "descent_rate_min", c.descent_rate_min);
  read_opt(doc, "gamma", c.gamma);
  read_opt(doc, "e_h", c.e_h);
  read_opt(doc, "alpha_b", c.alpha_b);
  read_opt(doc, "r_infeasible", c.r_infeasible);
  c.validate();
  return c;
}

json mdp_config_to_json(const MdpConfig& c) {
  return {{"delta", c.delta},           {"z_min", c.z_min}, {"ascent_rate_max", c.ascent_rate_max},
          {"descent_rate_min", c.descent_rate_min}, {"gamma", c.gamma}, {"e_h", c.e_h},
          {"alpha_b", c.alpha_b},       {"r_infeasible", c.r_infeasible}};
}

Scenario scenario_from_json(const json& doc) {
  try {
    Scenario s;
    if (doc.contains("grid") && !doc.at("grid").is_null()) s.grid = doc.at("grid").get<std::string>();
    if (doc.contains("mdp")) s.mdp = mdp_config_from_json(doc.at("mdp"));
    for (const auto& t : doc.at("terminals")) {
      TerminalRegion r;
      r.label = t.at("label").get<std::string>();
      r.reward = t.at("reward").get<double>();
      std::vector<Point2> pts;
      for (const auto& p : t.at("polygon")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      r.footprint = Polygon(std::move(pts));
      if (t.contains("z_range") && !t.at("z_range").is_null()) {
        r.z_range = std::make_pair(t.at("z_range").at(0).get<double>(), t.at("z_range").at(1).get<double>());
        if (!(r.z_range->first <= r.z_range->second)) throw ConfigError("terminal z_range is inverted");
      }
      s.terminals.push_back(std::move(r));
    }
    const auto& st = doc.at("start");
    s.start = {st.at(0).get<double>(), st.at(1).get<double>(), st.at(2).get<double>()};
    read_opt(doc, "success_label", s.success_label);
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json terms = json::array();
  for (const auto& t : s.terminals) {
    json poly = json::array();
    for (const auto& p : t.footprint.vertices()) poly.push_back({p.x, p.y});
    json entry = {{"label", t.label}, {"reward", t.reward}, {"polygon", poly}};
    if (t.z_range) entry["z_range"] = {t.z_range->first, t.z_range->second};
    terms.push_back(entry);
  }
  json doc = {{"mdp", mdp_config_to_json(s.mdp)},
              {"terminals", terms},
              {"start", {s.start.x, s.start.y, s.start.z}},
              {"success_label", s.success_label}};
  if (s.grid) doc["grid"] = *s.grid;
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

CavityParams cavity_params_from_json(const json& doc) {
  CavityParams p;
  try {
    read_opt(doc, "length_x", p.length_x);
    read_opt(doc, "width_y", p.width_y);
    read_opt(doc, "depth", p.depth);
    read_opt(doc, "dx", p.dx);
    read_opt(doc, "dy", p.dy);
    read_opt(doc, "dz", p.dz);
    read_opt(doc, "dt", p.dt);
    read_opt(doc, "nt", p.nt);
    read_opt(doc, "inlet_x", p.inlet_x);
    read_opt(doc, "grounding_x", p.grounding_x);
    read_opt(doc, "ceiling_inlet", p.ceiling_inlet);
    read_opt(doc, "ceiling_grounding", p.ceiling_grounding);
    read_opt(doc, "floor_inlet", p.floor_inlet);
    read_opt(doc, "floor_grounding", p.floor_grounding);
    read_opt(doc, "wall_margin", p.wall_margin);
    read_opt(doc, "mean_speed", p.mean_speed);
    read_opt(doc, "bottom_layer_fraction", p.bottom_layer_fraction);
    read_opt(doc, "eddy_amplitude", p.eddy_amplitude);
    read_opt(doc, "eddy_correlation_time", p.eddy_correlation_time);
    read_opt(doc, "eddy_wavelength", p.eddy_wavelength);
    read_opt(doc, "eddy_bottom_ratio", p.eddy_bottom_ratio);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cavity params: ") + e.what());
  }
  p.validate();
  return p;
}

json cavity_params_to_json(const CavityParams& p) {
  return {{"length_x", p.length_x},
          {"width_y", p.width_y},
          {"depth", p.depth},
          {"dx", p.dx},
          {"dy", p.dy},
          {"dz", p.dz},
          {"dt", p.dt},
          {"nt", p.nt},
          {"inlet_x", p.inlet_x},
          {"grounding_x", p.grounding_x},
          {"ceiling_inlet", p.ceiling_inlet},
          {"ceiling_grounding", p.ceiling_grounding},
          {"floor_inlet", p.floor_inlet},
          {"floor_grounding", p.floor_grounding},
          {"wall_margin", p.wall_margin},
          {"mean_speed", p.mean_speed},
          {"bottom_layer_fraction", p.bottom_layer_fraction},
          {"eddy_amplitude", p.eddy_amplitude},
          {"eddy_correlation_time", p.eddy_correlation_time},
          {"eddy_wavelength", p.eddy_wavelength},
          {"eddy_bottom_ratio", p.eddy_bottom_ratio}};
}

Scenario default_scenario(const CavityParams& p, double gz_length) {
  p.validate();
  Scenario s;
  const double pad = 5000.0;
  const double y0 = -pad, y1 = p.width_y + pad;
  const double gz = std::max(p.inlet_x, p.grounding_x - gz_length);
  TerminalRegion ground;
  ground.label = "grounding_zone";
  ground.reward = 10000.0;
  ground.footprint = Polygon({{gz, y0}, {p.length_x + pad, y0}, {p.length_x + pad, y1}, {gz, y1}});
  TerminalRegion sea;
  sea.label = "swept_to_sea";
  sea.reward = 0.0;
  const double sea_edge = p.inlet_x + 1.5 * p.dx;
  sea.footprint = Polygon({{p.inlet_x - pad, y0}, {sea_edge, y0}, {sea_edge, y1}, {p.inlet_x - pad, y1}});
  s.terminals = {ground, sea};

  const double x = p.inlet_x + 3.0 * p.dx;
  const double fl = p.floor_at(x), ce = p.ceiling_at(x);
  s.start = {x, 0.5 * p.width_y, fl + 0.15 * (ce - fl)};
  return s;
}

}  // namespace icecav
