#pragma once

// Correlation-map export: CSV (one row per shift) and raw little-endian
// float64 grids with a JSON header.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "csv.hpp"
#include "errors.hpp"
#include "xcorr.hpp"

namespace twinepr {

inline void write_map_csv(const std::filesystem::path& path, const CorrelationMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  csv::write_row(out, {"shift_y", "shift_x", "value"});
  for (int dy = -map.max_shift_y; dy <= map.max_shift_y; ++dy)
    for (int dx = -map.max_shift_x; dx <= map.max_shift_x; ++dx)
      csv::write_row(out, {std::to_string(dy), std::to_string(dx), csv::number(map.at(dy, dx))});
}

inline nlohmann::json map_header(const CorrelationMap& map) {
  return {{"rows", map.values.rows()},
          {"cols", map.values.cols()},
          {"max_shift_y", map.max_shift_y},
          {"max_shift_x", map.max_shift_x},
          {"normalization", "PearsonPerShift"},
          {"boundary", std::string(boundary_name(map.boundary))},
          {"flipped_idler", map.flipped_idler},
          {"dtype", "float64"},
          {"byte_order", "little"},
          {"layout", "row-major, row = shift_y + max_shift_y"}};
}

/// Writes `<stem>.f64` and `<stem>.json`.
inline void write_map_raw(const std::filesystem::path& stem, const CorrelationMap& map) {
  auto data_path = stem;
  data_path += ".f64";
  auto header_path = stem;
  header_path += ".json";
  std::ofstream out(data_path, std::ios::binary);
  if (!out) throw IoError(data_path.string(), "cannot open for writing");
  for (double v : map.values.data()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  std::ofstream h(header_path);
  if (!h) throw IoError(header_path.string(), "cannot open for writing");
  h << map_header(map).dump(2) << '\n';
}

inline CorrelationMap read_map_raw(const std::filesystem::path& stem) {
  auto data_path = stem;
  data_path += ".f64";
  auto header_path = stem;
  header_path += ".json";
  std::ifstream h(header_path);
  if (!h) throw IoError(header_path.string(), "cannot open for reading");
  nlohmann::json j;
  try {
    h >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(header_path.string(), e.what());
  }
  CorrelationMap map;
  map.max_shift_y = j.at("max_shift_y").get<int>();
  map.max_shift_x = j.at("max_shift_x").get<int>();
  map.flipped_idler = j.at("flipped_idler").get<bool>();
  map.boundary = j.at("boundary").get<std::string>() == "overlap" ? Boundary::Overlap : Boundary::Circular;
  map.values = RealMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw IoError(data_path.string(), "cannot open for reading");
  for (double& v : map.values.data()) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw IoError(data_path.string(), "truncated grid");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
    v = std::bit_cast<double>(bits);
  }
  return map;
}

}  // namespace twinepr
