#include "icecav/grid_io.hpp"

#include <string>

#include "icecav/error.hpp"
#include "icecav/raw_io.hpp"

namespace icecav {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json variable_entry(const std::string& name, const std::string& file, Staggering s, int sx, int sy, int sz, int st) {
  return {{"name", name}, {"file", file}, {"staggering", std::string(to_string(s))}, {"shape", {sx, sy, sz, st}}};
}

}  // namespace

void write_grid_archive(const FlowGrid& grid, const fs::path& dir) {
  grid.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const GridSpec& g = grid.spec();
  json vars = json::array();
  auto emit = [&](const std::string& name, const StaggeredField& f) {
    vars.push_back(variable_entry(name, name + ".raw", f.staggering(), f.size_x(), f.size_y(), f.size_z(), f.size_t_()));
    write_raw_f32(dir / (name + ".raw"), f.data());
  };
  emit("u", grid.u());
  emit("v", grid.v());
  emit("w", grid.w());
  vars.push_back(variable_entry("wetfrac", "wetfrac.raw", Staggering::center, g.nx, g.ny, g.nz, 1));
  write_raw_f32(dir / "wetfrac.raw", grid.wet_fraction());

  json manifest = {
      {"format", "icecav-grid"},
      {"version", 1},
      {"byte_order", "little"},
      {"dtype", "float32"},
      {"order", "x_fastest"},
      {"dims", {{"nx", g.nx}, {"ny", g.ny}, {"nz", g.nz}, {"nt", g.nt}}},
      {"spacing", {{"dx", g.dx}, {"dy", g.dy}, {"dz", g.dz}, {"dt", g.dt}}},
      {"origin", {{"x0", g.x0}, {"y0", g.y0}, {"z0", g.z0}, {"t0", g.t0}}},
      {"variables", vars},
  };
  write_json_file(dir / "manifest.json", manifest);
}

FlowGrid read_grid_archive(const fs::path& dir) {
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) throw IoError("grid archive has no manifest: " + mpath.string());
  const json m = read_json_file(mpath);

  GridSpec g;
  try {
    if (m.at("format") != "icecav-grid") throw ConfigError("not a grid archive: " + dir.string());
    if (m.at("byte_order") != "little" || m.at("dtype") != "float32" || m.at("order") != "x_fastest") {
      throw ConfigError("unsupported grid archive layout in " + mpath.string());
    }
    const auto& d = m.at("dims");
    g.nx = d.at("nx");
    g.ny = d.at("ny");
    g.nz = d.at("nz");
    g.nt = d.at("nt");
    const auto& s = m.at("spacing");
    g.dx = s.at("dx");
    g.dy = s.at("dy");
    g.dz = s.at("dz");
    g.dt = s.at("dt");
    const auto& o = m.at("origin");
    g.x0 = o.at("x0");
    g.y0 = o.at("y0");
    g.z0 = o.at("z0");
    g.t0 = o.at("t0");
  } catch (const json::exception& e) {
    throw ConfigError(mpath.string() + ": " + e.what());
  }

  FlowGrid grid(g);
  bool seen_u = false, seen_v = false, seen_w = false, seen_wet = false;
  for (const auto& var : m.at("variables")) {
    const std::string name = var.at("name");
    const fs::path file = dir / var.at("file").get<std::string>();
    const Staggering stag = staggering_from_string(var.at("staggering").get<std::string>());
    auto load = [&](StaggeredField& f, Staggering expect) {
      if (stag != expect) throw ConfigError("variable " + name + " has unexpected staggering");
      const std::vector<int> shape = var.at("shape").get<std::vector<int>>();
      if (shape != std::vector<int>{f.size_x(), f.size_y(), f.size_z(), f.size_t_()})
        throw ConfigError("variable " + name + " shape does not match the grid spec");
      f.data() = read_raw_f32(file, f.data().size());
    };
    if (name == "u") {
      load(grid.u(), Staggering::x_face);
      seen_u = true;
    } else if (name == "v") {
      load(grid.v(), Staggering::y_face);
      seen_v = true;
    } else if (name == "w") {
      load(grid.w(), Staggering::z_face);
      seen_w = true;
    } else if (name == "wetfrac") {
      grid.wet_fraction() = read_raw_f32(file, g.cell_count());
      seen_wet = true;
    }
  }
  if (!(seen_u && seen_v && seen_w && seen_wet)) throw ConfigError("grid archive is missing variables: " + dir.string());
  grid.validate();
  return grid;
}

}  // namespace icecav
