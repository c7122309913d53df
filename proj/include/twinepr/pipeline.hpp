#pragma once

// simulate -> analyze -> epr stages over a run directory.
//
// Run directory layout:
//   manifest.json               config, created_at, tool_version, stage digests
//   config.cfg                  the effective config
//   {plane}_ensemble.json       per-ensemble sidecar (config + master seed)
//   {plane}_{role}_{iiii}.pgm   binary frames
//   analysis_{plane}.csv        per-pair statistics (after analyze)
//   profiles_{plane}.csv        fitted envelope per frame (after analyze)
//   analysis_summary.json       ensemble statistics (after analyze)

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config_io.hpp"
#include "csv.hpp"
#include "design.hpp"
#include "digest.hpp"
#include "epr_metrics.hpp"
#include "errors.hpp"
#include "map_io.hpp"
#include "pgm.hpp"
#include "stats.hpp"
#include "twin_sim.hpp"

#ifndef TWINEPR_VERSION
#define TWINEPR_VERSION "0.1.0"
#endif

namespace twinepr {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kToolVersion = TWINEPR_VERSION;

struct RunManifest {
  SimConfig config;
  std::vector<Plane> planes;
  std::string created_at;
  std::string tool_version = kToolVersion;
  std::map<std::string, std::string> stage_digests;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string frame_file_name(Plane plane, std::string_view role, int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%s_%04d.pgm", std::string(plane_name(plane)).c_str(),
                std::string(role).c_str(), index);
  return buf;
}

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string(), "write failed");
}

inline json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string(), std::string("malformed JSON: ") + e.what());
  }
}

inline json manifest_json(const RunManifest& m) {
  json planes = json::array();
  for (Plane p : m.planes) planes.push_back(std::string(plane_name(p)));
  return {{"config", to_json(m.config)},
          {"master_seed", m.config.seed},
          {"planes", planes},
          {"created_at", m.created_at},
          {"tool_version", m.tool_version},
          {"stage_digests", m.stage_digests}};
}

inline void write_manifest(const fs::path& dir, const RunManifest& m) {
  write_text(dir / "manifest.json", manifest_json(m).dump(2) + "\n");
}

/// Digest of the frames of every plane plus the config that produced them.
inline std::string simulate_digest(const SimConfig& config, const std::vector<Plane>& planes,
                                   const std::map<Plane, std::vector<ImagePair>>& frames) {
  Fnv1a h;
  h.update("simulate").update(to_json(config).dump());
  for (Plane p : planes) {
    h.update(plane_name(p));
    for (const auto& pair : frames.at(p)) {
      h.update(static_cast<std::uint64_t>(pair.frame_index));
      h.update(pair.signal.data());
      h.update(pair.idler.data());
    }
  }
  return to_hex(h.value());
}

inline std::string nearest_band_key(std::size_t n) { return n >= 40 ? "nearest_rank_95" : "min_max"; }

/// 95% nearest-rank band, or the full range when there are too few values.
inline Interval band(std::span<const double> v) {
  if (v.size() >= 40) return confidence_interval(v, 0.95);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

}  // namespace detail

inline RunManifest load_manifest(const fs::path& run_dir) {
  const json j = detail::read_json(run_dir / "manifest.json");
  RunManifest m;
  try {
    m.config = config_from_json(j.at("config"));
    for (const auto& p : j.at("planes")) m.planes.push_back(parse_plane(p.get<std::string>()));
    m.created_at = j.at("created_at").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.stage_digests = j.at("stage_digests").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw IoError((run_dir / "manifest.json").string(), std::string("invalid manifest: ") + e.what());
  }
  m.config.validate();
  if (m.config.seed != j.at("master_seed").get<std::uint64_t>())
    throw ValidationError("master_seed", "manifest seed disagrees with its config");
  return m;
}

struct SimulateOptions {
  std::vector<Plane> planes{Plane::NearField, Plane::FarField};
  int jobs = 1;
  std::optional<std::string> created_at;  // defaults to the current UTC time
};

/// Generates and writes every ensemble, sidecar and the manifest.
inline RunManifest run_simulate(const SimConfig& config, const fs::path& out_dir, const SimulateOptions& opt = {}) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), "cannot create directory: " + ec.message());

  RunManifest m;
  m.config = config;
  m.planes = opt.planes;
  m.created_at = opt.created_at.value_or(utc_timestamp());

  std::map<Plane, std::vector<ImagePair>> frames;
  for (Plane p : opt.planes) {
    frames[p] = generate_ensemble(config, p, opt.jobs);
    json files = json::array();
    for (const auto& pair : frames[p]) {
      const auto s = frame_file_name(p, "signal", pair.frame_index);
      const auto i = frame_file_name(p, "idler", pair.frame_index);
      write_pgm(out_dir / s, pair.signal);
      write_pgm(out_dir / i, pair.idler);
      files.push_back({{"frame_index", pair.frame_index}, {"signal", s}, {"idler", i}});
    }
    const json sidecar = {{"plane", std::string(plane_name(p))},
                          {"config", to_json(config)},
                          {"master_seed", config.seed},
                          {"config_digest", to_hex(config_digest(config))},
                          {"frame_count", config.frame_count},
                          {"frames", files}};
    detail::write_text(out_dir / (std::string(plane_name(p)) + "_ensemble.json"), sidecar.dump(2) + "\n");
  }
  detail::write_text(out_dir / "config.cfg", format_config(config));
  m.stage_digests["simulate"] = detail::simulate_digest(config, m.planes, frames);
  detail::write_manifest(out_dir, m);
  return m;
}

struct LoadedRun {
  RunManifest manifest;
  std::map<Plane, std::vector<ImagePair>> frames;
};

/// Reads a run directory and checks the frames against the manifest digest.
inline LoadedRun load_run(const fs::path& run_dir) {
  LoadedRun run;
  run.manifest = load_manifest(run_dir);
  const auto& cfg = run.manifest.config;
  const auto digest = config_digest(cfg);
  for (Plane p : run.manifest.planes) {
    std::vector<int> missing;
    for (int k = 0; k < cfg.frame_count; ++k)
      if (!fs::exists(run_dir / frame_file_name(p, "signal", k)) || !fs::exists(run_dir / frame_file_name(p, "idler", k)))
        missing.push_back(k);
    if (!missing.empty()) {
      std::string list;
      for (int k : missing) list += (list.empty() ? "" : ",") + std::to_string(k);
      throw MissingFrames(std::string(plane_name(p)) + " frames missing at indices [" + list + "]");
    }
    auto& v = run.frames[p];
    for (int k = 0; k < cfg.frame_count; ++k) {
      ImagePair pair{read_pgm(run_dir / frame_file_name(p, "signal", k)),
                     read_pgm(run_dir / frame_file_name(p, "idler", k)), p, k, digest};
      const auto n = static_cast<std::size_t>(cfg.geometry.image_size);
      if (pair.signal.rows() != n || pair.signal.cols() != n || !pair.signal.same_shape(pair.idler))
        throw IoError((run_dir / frame_file_name(p, "signal", k)).string(), "frame size disagrees with the config");
      v.push_back(std::move(pair));
    }
  }
  const auto expected = run.manifest.stage_digests.find("simulate");
  if (expected == run.manifest.stage_digests.end())
    throw StaleConfig("manifest has no simulate digest");
  const auto actual = detail::simulate_digest(cfg, run.manifest.planes, run.frames);
  if (actual != expected->second)
    throw StaleConfig("frames in " + run_dir.string() + " do not match the manifest digest (" + actual + " vs " +
                      expected->second + ")");
  return run;
}

inline std::string analysis_file_name(Plane p) { return "analysis_" + std::string(plane_name(p)) + ".csv"; }

inline const std::vector<std::string>& analysis_columns() {
  static const std::vector<std::string> cols = {
      "stage_digest", "plane",          "pairing",         "frame_index",        "idler_frame_index",
      "peak_shift_y", "peak_shift_x",   "peak_value",      "snr",                "snr_infinite",
      "is_expected",  "degree",         "shot_noise_r",    "shot_noise_cells",   "sigma_x_px",
      "sigma_y_px",   "width_converged", "width_sub_pixel"};
  return cols;
}

struct PlaneSummary {
  Plane plane = Plane::NearField;
  std::size_t pairs = 0;
  double success_rate = 0.0;
  double snr_mean = 0.0;
  Interval snr_band;
  double predicted_snr = 0.0;
  double degree_mean = 0.0;
  double r_mean = 0.0;
  double r_min = 0.0;
  double r_fraction_below_one = 0.0;
  Interval r_band;
  std::optional<double> control_success_rate;
  std::optional<double> control_degree_mean;
  std::optional<double> control_r_mean;
  std::optional<Interval> control_r_band;
};

namespace detail {

inline std::vector<std::string> analysis_row(const std::string& digest, const PairAnalysis& a, std::string_view pairing,
                                             int idler_index, bool with_width) {
  auto b = [](bool v) { return std::string(v ? "1" : "0"); };
  return {digest,
          std::string(plane_name(a.plane)),
          std::string(pairing),
          std::to_string(a.frame_index),
          std::to_string(idler_index),
          std::to_string(a.peak.shift_y),
          std::to_string(a.peak.shift_x),
          csv::number(a.peak.value),
          a.peak.infinite_snr ? "inf" : csv::number(a.peak.snr),
          b(a.peak.infinite_snr),
          b(a.peak.is_expected_position),
          csv::number(a.degree),
          csv::number(a.shot_noise.r),
          std::to_string(a.shot_noise.cells),
          with_width ? csv::number(a.width.sigma_x) : "",
          with_width ? csv::number(a.width.sigma_y) : "",
          with_width ? b(a.width.converged) : "",
          with_width ? b(a.width.sub_pixel) : ""};
}

template <typename F>
std::vector<double> collect(std::span<const PairAnalysis> v, F f) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& a : v) out.push_back(f(a));
  return out;
}

inline json interval_json(const Interval& i) { return json::array({i.low, i.high}); }

}  // namespace detail

struct AnalyzeOptions {
  int jobs = 1;
  std::optional<Plane> plane;  // restrict to one plane of the run
};

/// Analyzes every plane of a run, writes the CSV tables and summary, and
/// records the analyze digest in the manifest.
inline std::vector<PlaneSummary> run_analyze(const fs::path& run_dir, const AnalyzeOptions& opt = {}) {
  LoadedRun run = load_run(run_dir);
  auto& m = run.manifest;
  const auto& cfg = m.config;
  Fnv1a h;
  h.update("analyze").update(kToolVersion).update(m.stage_digests.at("simulate"));
  const std::string digest = to_hex(h.value());

  AnalysisOptions aopt;
  aopt.bin_size = cfg.bin_size;
  AnalysisOptions control_opt = aopt;
  control_opt.fit_width = false;

  std::vector<PlaneSummary> summaries;
  json summary_json = {{"stage_digest", digest}, {"planes", json::object()}};
  for (Plane p : m.planes) {
    if (opt.plane && *opt.plane != p) continue;
    const auto& pairs = run.frames.at(p);
    const auto results = analyze_ensemble(pairs, aopt, opt.jobs);
    std::vector<PairAnalysis> control;
    if (pairs.size() >= 2) control = analyze_ensemble(decorrelated_pairing(pairs), control_opt, opt.jobs);

    std::ofstream out(run_dir / analysis_file_name(p), std::ios::binary);
    if (!out) throw IoError((run_dir / analysis_file_name(p)).string(), "cannot open for writing");
    csv::write_row(out, analysis_columns());
    for (const auto& a : results) csv::write_row(out, detail::analysis_row(digest, a, "correlated", a.frame_index, true));
    for (const auto& a : control)
      csv::write_row(out, detail::analysis_row(digest, a, "decorrelated",
                                               static_cast<int>((a.frame_index + 1) % pairs.size()), false));

    const auto prof_path = run_dir / ("profiles_" + std::string(plane_name(p)) + ".csv");
    std::ofstream prof(prof_path, std::ios::binary);
    if (!prof) throw IoError(prof_path.string(), "cannot open for writing");
    csv::write_row(prof, {"stage_digest", "frame_index", "role", "kind", "amplitude", "center_x", "center_y",
                          "width_x", "width_y", "baseline", "converged"});
    for (const auto& a : results)
      for (const auto& [role, model] : {std::pair{"signal", a.signal_model}, std::pair{"idler", a.idler_model}})
        csv::write_row(prof, {digest, std::to_string(a.frame_index), role, std::string(profile_kind_name(model.kind)),
                              csv::number(model.amplitude), csv::number(model.center_x), csv::number(model.center_y),
                              csv::number(model.width_x), csv::number(model.width_y), csv::number(model.baseline),
                              model.converged ? "1" : "0"});

    PlaneSummary s;
    s.plane = p;
    s.pairs = results.size();
    s.success_rate = success_rate(std::span<const PairAnalysis>(results));
    const auto snr = detail::collect(results, [](const PairAnalysis& a) { return a.peak.snr; });
    const auto deg = detail::collect(results, [](const PairAnalysis& a) { return a.degree; });
    const auto r = detail::collect(results, [](const PairAnalysis& a) { return a.shot_noise.r; });
    s.snr_mean = mean(snr);
    s.snr_band = detail::band(snr);
    s.predicted_snr = predicted_snr(cfg);
    s.degree_mean = mean(deg);
    s.r_mean = mean(r);
    s.r_min = *std::min_element(r.begin(), r.end());
    s.r_fraction_below_one =
        static_cast<double>(std::count_if(r.begin(), r.end(), [](double x) { return x < 1.0; })) / r.size();
    s.r_band = detail::band(r);

    json pj = {{"pairs", s.pairs},
               {"success_rate", s.success_rate},
               {"snr_mean", s.snr_mean},
               {"snr_band", detail::interval_json(s.snr_band)},
               {"band_convention", detail::nearest_band_key(s.pairs)},
               {"predicted_snr", s.predicted_snr},
               {"degree_mean", s.degree_mean},
               {"shot_noise_r_mean", s.r_mean},
               {"shot_noise_r_min", s.r_min},
               {"shot_noise_r_band", detail::interval_json(s.r_band)},
               {"shot_noise_r_fraction_below_one", s.r_fraction_below_one}};
    if (!control.empty()) {
      const auto cr = detail::collect(control, [](const PairAnalysis& a) { return a.shot_noise.r; });
      const auto cd = detail::collect(control, [](const PairAnalysis& a) { return a.degree; });
      s.control_success_rate = success_rate(std::span<const PairAnalysis>(control));
      s.control_degree_mean = mean(cd);
      s.control_r_mean = mean(cr);
      s.control_r_band = detail::band(cr);
      pj["decorrelated"] = {{"success_rate", *s.control_success_rate},
                            {"degree_mean", *s.control_degree_mean},
                            {"shot_noise_r_mean", *s.control_r_mean},
                            {"shot_noise_r_band", detail::interval_json(*s.control_r_band)}};
    }
    summary_json["planes"][std::string(plane_name(p))] = pj;
    summaries.push_back(s);
  }
  detail::write_text(run_dir / "analysis_summary.json", summary_json.dump(2) + "\n");
  m.stage_digests["analyze"] = digest;
  detail::write_manifest(run_dir, m);
  return summaries;
}

/// One correlated row of a stored analysis table.
struct StoredWidth {
  int frame_index = 0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  bool converged = false;
  double shot_noise_r = 0.0;
};

inline std::vector<StoredWidth> read_analysis(const fs::path& run_dir, Plane plane) {
  const RunManifest m = load_manifest(run_dir);
  if (std::find(m.planes.begin(), m.planes.end(), plane) == m.planes.end())
    throw PlaneMismatch(run_dir.string() + " holds no " + std::string(plane_name(plane)) + "-field ensemble");
  const auto path = run_dir / analysis_file_name(plane);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "run has not been analyzed");
  std::string line;
  std::getline(in, line);
  const auto header = csv::parse_row(line);
  if (header != analysis_columns()) throw IoError(path.string(), "unexpected analysis columns");
  auto col = [&](std::string_view name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  std::vector<StoredWidth> out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = csv::parse_row(line);
    if (f.size() != header.size()) throw IoError(path.string(), "ragged analysis row");
    if (f[col("pairing")] != "correlated") continue;
    try {
      out.push_back({std::stoi(f[col("frame_index")]), std::stod(f[col("sigma_x_px")]),
                     std::stod(f[col("sigma_y_px")]), f[col("width_converged")] == "1",
                     std::stod(f[col("shot_noise_r")])});
    } catch (const std::exception&) {
      throw IoError(path.string(), "non-numeric analysis field");
    }
  }
  return out;
}

struct EprSummary {
  std::size_t near_frames = 0;
  std::size_t far_frames = 0;
  Interval x;
  Interval y;
  std::string interval_convention;
  double near_r_min = 0.0, near_r_mean = 0.0, far_r_min = 0.0, far_r_mean = 0.0;
};

/// Forms every near x far variance product and writes epr_report.json and
/// epr_products.csv to `out_dir`.
inline EprSummary run_epr(const fs::path& near_dir, const fs::path& far_dir, const fs::path& out_dir) {
  const RunManifest near_m = load_manifest(near_dir);
  const RunManifest far_m = load_manifest(far_dir);
  const auto near_rows = read_analysis(near_dir, Plane::NearField);
  const auto far_rows = read_analysis(far_dir, Plane::FarField);
  const auto near_digest = near_m.stage_digests.count("analyze") ? near_m.stage_digests.at("analyze") : "";
  const auto far_digest = far_m.stage_digests.count("analyze") ? far_m.stage_digests.at("analyze") : "";
  if (near_digest.empty() || far_digest.empty()) throw StaleConfig("epr needs analyzed runs");
  Fnv1a h;
  h.update("epr").update(kToolVersion).update(near_digest).update(far_digest);
  const std::string digest = to_hex(h.value());

  std::vector<VarianceRecord> near_var, far_var;
  json near_fits = json::array(), far_fits = json::array();
  std::size_t near_skipped = 0, far_skipped = 0;
  for (const auto& r : near_rows) {
    PeakWidthFit f;
    f.plane = Plane::NearField;
    f.frame_index = r.frame_index;
    f.sigma_x = r.sigma_x;
    f.sigma_y = r.sigma_y;
    f.converged = r.converged;
    near_fits.push_back({{"frame_index", r.frame_index}, {"sigma_x_px", r.sigma_x}, {"sigma_y_px", r.sigma_y},
                         {"converged", r.converged}});
    if (!r.converged) {
      ++near_skipped;
      continue;
    }
    near_var.push_back(position_variance(f, near_m.config.geometry));
  }
  for (const auto& r : far_rows) {
    PeakWidthFit f;
    f.plane = Plane::FarField;
    f.frame_index = r.frame_index;
    f.sigma_x = r.sigma_x;
    f.sigma_y = r.sigma_y;
    f.converged = r.converged;
    far_fits.push_back({{"frame_index", r.frame_index}, {"sigma_x_px", r.sigma_x}, {"sigma_y_px", r.sigma_y},
                        {"converged", r.converged}});
    if (!r.converged) {
      ++far_skipped;
      continue;
    }
    far_var.push_back(momentum_variance(f, far_m.config.geometry));
  }
  const auto products = epr_products(near_var, far_var);
  const auto px = product_values(products, Axis::X);
  const auto py = product_values(products, Axis::Y);

  EprSummary s;
  s.near_frames = near_var.size();
  s.far_frames = far_var.size();
  s.x = detail::band(px);
  s.y = detail::band(py);
  s.interval_convention = detail::nearest_band_key(px.size());

  auto var_band = [](const std::vector<VarianceRecord>& v, bool x_axis) {
    std::vector<double> vals;
    for (const auto& r : v) vals.push_back(x_axis ? r.var_x : r.var_y);
    return detail::interval_json(detail::band(vals));
  };
  auto r_stats = [](const std::vector<StoredWidth>& rows, double& r_min, double& r_mean) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.shot_noise_r);
    r_min = *std::min_element(v.begin(), v.end());
    r_mean = mean(v);
    return json{{"min", r_min}, {"mean", r_mean}, {"band", detail::interval_json(detail::band(v))},
                {"fraction_below_one",
                 static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x < 1.0; })) / v.size()}};
  };

  json report = {
      {"stage_digest", digest},
      {"near_run", {{"analyze_digest", near_digest}}},
      {"far_run", {{"analyze_digest", far_digest}}},
      {"width_fits", {{"near", near_fits}, {"far", far_fits}}},
      {"skipped_unconverged", {{"near", near_skipped}, {"far", far_skipped}}},
      {"variances",
       {{"band_convention", detail::nearest_band_key(near_var.size())},
        {"delta2_x1_minus_x2_um2", var_band(near_var, true)},
        {"delta2_y1_minus_y2_um2", var_band(near_var, false)},
        {"delta2_px1_plus_px2_hbar2_per_um2", var_band(far_var, true)},
        {"delta2_py1_plus_py2_hbar2_per_um2", var_band(far_var, false)}}},
      {"products",
       {{"combinations", px.size()},
        {"interval_convention", s.interval_convention},
        {"x", detail::interval_json(s.x)},
        {"y", detail::interval_json(s.y)}}},
      {"shot_noise",
       {{"near", r_stats(near_rows, s.near_r_min, s.near_r_mean)},
        {"far", r_stats(far_rows, s.far_r_min, s.far_r_mean)}}},
  };
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  detail::write_text(out_dir / "epr_report.json", report.dump(2) + "\n");

  std::ofstream out(out_dir / "epr_products.csv", std::ios::binary);
  if (!out) throw IoError((out_dir / "epr_products.csv").string(), "cannot open for writing");
  csv::write_row(out, {"stage_digest", "near_frame", "far_frame", "axis", "value"});
  for (const auto& p : products)
    csv::write_row(out, {digest, std::to_string(p.near_frame), std::to_string(p.far_frame),
                         std::string(axis_name(p.axis)), csv::number(p.value)});
  return s;
}

/// Recomputes the correlation map of one stored pair (for export).
inline CorrelationMap correlation_map_for(const fs::path& run_dir, Plane plane, int frame_index) {
  const RunManifest m = load_manifest(run_dir);
  if (std::find(m.planes.begin(), m.planes.end(), plane) == m.planes.end())
    throw PlaneMismatch(run_dir.string() + " holds no " + std::string(plane_name(plane)) + "-field ensemble");
  if (frame_index < 0 || frame_index >= m.config.frame_count)
    throw MissingFrames("frame index " + std::to_string(frame_index) + " outside the run");
  const auto s = read_pgm(run_dir / frame_file_name(plane, "signal", frame_index));
  const auto i = read_pgm(run_dir / frame_file_name(plane, "idler", frame_index));
  const auto kind = profile_kind_for(plane);
  return cross_correlate(subtract_profile(s, fit_profile(s, kind)), subtract_profile(i, fit_profile(i, kind)),
                         plane == Plane::FarField);
}

}  // namespace twinepr
