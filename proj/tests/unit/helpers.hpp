#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include "icecav/envelope.hpp"
#include "icecav/flowfield.hpp"
#include "icecav/mdp.hpp"

namespace testing {

using namespace icecav;

inline Polygon rect(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

/// nx * ny wet columns at spacing d, all with the same bounds, first column centre at (x0, y0).
inline NavigableEnvelope box_envelope(int nx, int ny, double d, double floor, double ceiling, double x0 = 0.0,
                                      double y0 = 0.0) {
  const std::size_t n = std::size_t(nx) * ny;
  return NavigableEnvelope(x0, y0, d, d, nx, ny, std::vector<double>(n, floor), std::vector<double>(n, ceiling));
}

/// The same velocity samples everywhere.
inline DistributionFn constant_distribution(std::vector<Vec3> samples) {
  return [samples = std::move(samples)](const Vec3&) { return EmpiricalVelocityDistribution{samples}; };
}

inline CavityMdp make_mdp(NavigableEnvelope env, DistributionFn dist, std::vector<TerminalRegion> terminals = {},
                          MdpConfig config = {}) {
  CavityMdp mdp;
  mdp.envelope = std::move(env);
  mdp.distributions = std::move(dist);
  mdp.terminals = std::move(terminals);
  mdp.config = config;
  mdp.validate();
  return mdp;
}

inline TerminalRegion terminal(std::string label, double reward, Polygon footprint) {
  TerminalRegion t;
  t.label = std::move(label);
  t.reward = reward;
  t.footprint = std::move(footprint);
  return t;
}

/// Every cell wet, constant velocity at every face and time.
inline std::shared_ptr<FlowGrid> uniform_grid(const GridSpec& spec, Vec3 velocity) {
  auto g = std::make_shared<FlowGrid>(spec);
  std::fill(g->u().data().begin(), g->u().data().end(), static_cast<float>(velocity.x));
  std::fill(g->v().data().begin(), g->v().data().end(), static_cast<float>(velocity.y));
  std::fill(g->w().data().begin(), g->w().data().end(), static_cast<float>(velocity.z));
  std::fill(g->wet_fraction().begin(), g->wet_fraction().end(), 1.0f);
  return g;
}

/// Directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("icecav_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
