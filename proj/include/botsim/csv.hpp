#pragma once

// Deterministic text output: shortest round-trip float formatting, CSV row
// assembly, atomic file writes, and the FNV-1a content hash used by sweep
// manifests. Missing values (NaN) serialize as empty cells.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace botsim {

template <typename Float>
std::string format_float(Float value) {
  if (std::isnan(value)) return {};  // missing
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string format_cell(double v) { return format_float(v); }
inline std::string format_cell(float v) { return format_float(v); }
inline std::string format_cell(const std::string& v) { return v; }
inline std::string format_cell(const char* v) { return v; }
inline std::string format_cell(bool v) { return v ? "1" : "0"; }

template <typename Int>
  requires std::is_integral_v<Int>
std::string format_cell(Int v) {
  return std::to_string(v);
}

// One CSV row, LF-terminated.
template <typename... Cells>
std::string csv_row(const Cells&... cells) {
  std::string row;
  bool first = true;
  auto append = [&](const auto& cell) {
    if (!first) row += ',';
    first = false;
    row += format_cell(cell);
  };
  (append(cells), ...);
  row += '\n';
  return row;
}

// Write-temp-then-rename so readers never observe partial files.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::string hex64(std::uint64_t value) {
  char buf[17];
  static constexpr char digits[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[value & 0xF];
    value >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

inline std::string hash_file_hex(const std::filesystem::path& path) {
  return hex64(fnv1a64(read_file(path)));
}

}  // namespace botsim
