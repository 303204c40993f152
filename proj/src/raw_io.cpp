#include "icecav/raw_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "icecav/error.hpp"

namespace icecav {

namespace {

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little) {
    throw IoError("raw archives require a little-endian host");
  }
}

template <class T>
void write_raw(const std::filesystem::path& path, std::span<const T> data) {
  require_little_endian();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
  if (!out) throw IoError("write failed for " + path.string());
}

template <class T>
std::vector<T> read_raw(const std::filesystem::path& path, std::size_t expected) {
  require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expected * sizeof(T)) {
    throw IoError(path.string() + ": expected " + std::to_string(expected * sizeof(T)) + " bytes, found " +
                  std::to_string(bytes));
  }
  in.seekg(0);
  std::vector<T> out(expected);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("read failed for " + path.string());
  return out;
}

}  // namespace

void write_raw_f32(const std::filesystem::path& path, std::span<const float> data) { write_raw(path, data); }
void write_raw_f64(const std::filesystem::path& path, std::span<const double> data) { write_raw(path, data); }
std::vector<float> read_raw_f32(const std::filesystem::path& path, std::size_t n) { return read_raw<float>(path, n); }
std::vector<double> read_raw_f64(const std::filesystem::path& path, std::size_t n) { return read_raw<double>(path, n); }

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

std::string fnv1a_hex(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fnv1a_hex(const std::string& text) {
  return fnv1a_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace icecav
