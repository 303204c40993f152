#pragma once

#include <filesystem>

#include "icecav/flowfield.hpp"

namespace icecav {

/// Grid archive: a directory holding manifest.json plus u.raw, v.raw, w.raw and wetfrac.raw.
/// Each .raw file is little-endian float32, x-fastest, with the staggered axis one sample longer.
///
/// The manifest is rewritten if it exists; callers that add run metadata do so afterwards.
void write_grid_archive(const FlowGrid& grid, const std::filesystem::path& dir);

/// Throws IoError for missing or short files and ConfigError for inconsistent manifests.
FlowGrid read_grid_archive(const std::filesystem::path& dir);

}  // namespace icecav
