#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace icecav {

// Little-endian raw arrays. Only little-endian hosts are supported; writers check at runtime.

void write_raw_f32(const std::filesystem::path& path, std::span<const float> data);
void write_raw_f64(const std::filesystem::path& path, std::span<const double> data);
std::vector<float> read_raw_f32(const std::filesystem::path& path, std::size_t expected_count);
std::vector<double> read_raw_f64(const std::filesystem::path& path, std::size_t expected_count);

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; byte-stable for equal documents.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::span<const std::uint8_t> bytes);
std::string fnv1a_hex(const std::string& text);
std::string file_hash(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace icecav
