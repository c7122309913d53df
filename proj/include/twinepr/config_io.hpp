#pragma once

// Flat sectioned key = value config files and the JSON form of SimConfig.
//
//   [geometry]
//   pixel_pitch_um = 16   # comment
//
// Unknown sections or keys are errors. Keys that are absent keep the
// SimConfig defaults.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <json.hpp>
#include <sstream>
#include <string>
#include <string_view>

#include "config.hpp"
#include "csv.hpp"
#include "errors.hpp"

namespace twinepr {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text, const std::string& field) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError(field, "cannot parse '" + std::string(text) + "' as a number");
  return v;
}

using Setter = std::function<void(SimConfig&, std::string_view, const std::string&)>;

inline const std::map<std::string, Setter>& config_setters() {
  auto real = [](double SimConfig::*p) {
    return Setter([p](SimConfig& c, std::string_view v, const std::string& f) { c.*p = parse_number<double>(v, f); });
  };
  auto geo = [](double OpticsGeometry::*p) {
    return Setter(
        [p](SimConfig& c, std::string_view v, const std::string& f) { c.geometry.*p = parse_number<double>(v, f); });
  };
  auto eff = [](double EfficiencyBudget::*p) {
    return Setter(
        [p](SimConfig& c, std::string_view v, const std::string& f) { c.efficiency.*p = parse_number<double>(v, f); });
  };
  auto axis = [](Axes SimConfig::*p, double Axes::*a) {
    return Setter(
        [p, a](SimConfig& c, std::string_view v, const std::string& f) { (c.*p).*a = parse_number<double>(v, f); });
  };
  static const std::map<std::string, Setter> setters = {
      {"geometry.pixel_pitch_um", geo(&OpticsGeometry::pixel_pitch_um)},
      {"geometry.magnification", geo(&OpticsGeometry::magnification)},
      {"geometry.focal_length_mm", geo(&OpticsGeometry::focal_length_mm)},
      {"geometry.wavelength_nm", geo(&OpticsGeometry::wavelength_nm)},
      {"geometry.image_size",
       [](SimConfig& c, std::string_view v, const std::string& f) { c.geometry.image_size = parse_number<int>(v, f); }},
      {"efficiency.eta_filter", eff(&EfficiencyBudget::eta_filter)},
      {"efficiency.eta_optics", eff(&EfficiencyBudget::eta_optics)},
      {"efficiency.eta_camera", eff(&EfficiencyBudget::eta_camera)},
      {"source.mean_photons_per_pixel", real(&SimConfig::mean_photons_per_pixel)},
      {"source.noise_per_pixel", real(&SimConfig::noise_per_pixel)},
      {"source.pump_waist_um", real(&SimConfig::pump_waist_um)},
      {"source.phase_matching_width", real(&SimConfig::phase_matching_width)},
      {"source.pos_corr_sigma_x_um", axis(&SimConfig::pos_corr_sigma_um, &Axes::x)},
      {"source.pos_corr_sigma_y_um", axis(&SimConfig::pos_corr_sigma_um, &Axes::y)},
      {"source.mom_corr_sigma_x", axis(&SimConfig::mom_corr_sigma, &Axes::x)},
      {"source.mom_corr_sigma_y", axis(&SimConfig::mom_corr_sigma, &Axes::y)},
      {"analysis.bin_size",
       [](SimConfig& c, std::string_view v, const std::string& f) { c.bin_size = parse_number<int>(v, f); }},
      {"run.seed",
       [](SimConfig& c, std::string_view v, const std::string& f) { c.seed = parse_number<std::uint64_t>(v, f); }},
      {"run.frame_count",
       [](SimConfig& c, std::string_view v, const std::string& f) { c.frame_count = parse_number<int>(v, f); }},
  };
  return setters;
}

}  // namespace detail

/// Parses config text; does not validate value ranges (call SimConfig::validate).
inline SimConfig parse_config(std::string_view text) {
  SimConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("line " + std::to_string(line_no), "malformed section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      const auto& setters = detail::config_setters();
      const auto it = setters.lower_bound(section + ".");
      if (it == setters.end() || it->first.rfind(section + ".", 0) != 0)
        throw ValidationError(section, "unknown config section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError("line " + std::to_string(line_no), "expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ValidationError(key, "key outside of any [section]");
    const std::string field = section + "." + key;
    const auto& setters = detail::config_setters();
    const auto it = setters.find(field);
    if (it == setters.end()) throw ValidationError(field, "unknown config key");
    it->second(cfg, value, field);
  }
  return cfg;
}

inline SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string format_config(const SimConfig& c) {
  using csv::number;
  std::ostringstream o;
  o << "[geometry]\n"
    << "pixel_pitch_um = " << number(c.geometry.pixel_pitch_um) << "\n"
    << "magnification = " << number(c.geometry.magnification) << "\n"
    << "focal_length_mm = " << number(c.geometry.focal_length_mm) << "\n"
    << "wavelength_nm = " << number(c.geometry.wavelength_nm) << "\n"
    << "image_size = " << c.geometry.image_size << "\n\n"
    << "[efficiency]\n"
    << "eta_filter = " << number(c.efficiency.eta_filter) << "\n"
    << "eta_optics = " << number(c.efficiency.eta_optics) << "\n"
    << "eta_camera = " << number(c.efficiency.eta_camera) << "\n\n"
    << "[source]\n"
    << "mean_photons_per_pixel = " << number(c.mean_photons_per_pixel) << "\n"
    << "noise_per_pixel = " << number(c.noise_per_pixel) << "\n"
    << "pump_waist_um = " << number(c.pump_waist_um) << "\n"
    << "phase_matching_width = " << number(c.phase_matching_width) << "\n"
    << "pos_corr_sigma_x_um = " << number(c.pos_corr_sigma_um.x) << "\n"
    << "pos_corr_sigma_y_um = " << number(c.pos_corr_sigma_um.y) << "\n"
    << "mom_corr_sigma_x = " << number(c.mom_corr_sigma.x) << "\n"
    << "mom_corr_sigma_y = " << number(c.mom_corr_sigma.y) << "\n\n"
    << "[analysis]\n"
    << "bin_size = " << c.bin_size << "\n\n"
    << "[run]\n"
    << "seed = " << c.seed << "\n"
    << "frame_count = " << c.frame_count << "\n";
  return o.str();
}

inline nlohmann::json to_json(const SimConfig& c) {
  return {
      {"geometry",
       {{"pixel_pitch_um", c.geometry.pixel_pitch_um},
        {"magnification", c.geometry.magnification},
        {"focal_length_mm", c.geometry.focal_length_mm},
        {"wavelength_nm", c.geometry.wavelength_nm},
        {"image_size", c.geometry.image_size}}},
      {"efficiency",
       {{"eta_filter", c.efficiency.eta_filter},
        {"eta_optics", c.efficiency.eta_optics},
        {"eta_camera", c.efficiency.eta_camera}}},
      {"source",
       {{"mean_photons_per_pixel", c.mean_photons_per_pixel},
        {"noise_per_pixel", c.noise_per_pixel},
        {"pump_waist_um", c.pump_waist_um},
        {"phase_matching_width", c.phase_matching_width},
        {"pos_corr_sigma_x_um", c.pos_corr_sigma_um.x},
        {"pos_corr_sigma_y_um", c.pos_corr_sigma_um.y},
        {"mom_corr_sigma_x", c.mom_corr_sigma.x},
        {"mom_corr_sigma_y", c.mom_corr_sigma.y}}},
      {"analysis", {{"bin_size", c.bin_size}}},
      {"run", {{"seed", c.seed}, {"frame_count", c.frame_count}}},
  };
}

/// Strict inverse of to_json: every key must be known and present.
inline SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig c;
  const auto& setters = detail::config_setters();
  std::size_t seen = 0;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) throw ValidationError(section, "expected an object");
    for (const auto& [key, value] : body.items()) {
      const std::string field = section + "." + key;
      const auto it = setters.find(field);
      if (it == setters.end()) throw ValidationError(field, "unknown config key");
      std::string text = value.is_number_unsigned()  ? std::to_string(value.get<std::uint64_t>())
                         : value.is_number_integer() ? std::to_string(value.get<std::int64_t>())
                         : value.is_number()         ? csv::number(value.get<double>())
                                                     : throw ValidationError(field, "expected a number");
      it->second(c, text, field);
      ++seen;
    }
  }
  if (seen != setters.size()) throw ValidationError("config", "JSON config is missing keys");
  return c;
}

}  // namespace twinepr
