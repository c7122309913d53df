// Command-line front end: simulate | analyze | epr | report.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include <twinepr/pipeline.hpp>

namespace {

using namespace twinepr;

int exit_code_for(const Error& e) {
  const auto& k = e.kind();
  if (k == "ValidationError" || k == "DomainError") return 2;
  if (k == "IoError" || k == "MissingFrames") return 3;
  if (k == "PlaneMismatch" || k == "StaleConfig") return 4;
  return 1;
}

void print_error(const std::string& kind, const std::string& message, const nlohmann::json& extra = {}) {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  if (extra.is_object()) j.update(extra);
  std::cerr << j.dump() << "\n";
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

void print_summary(const PlaneSummary& s) {
  std::cout << plane_name(s.plane) << ": pairs=" << s.pairs << " success=" << fmt(s.success_rate)
            << " snr_mean=" << fmt(s.snr_mean) << " (predicted " << fmt(s.predicted_snr) << ")"
            << " degree=" << fmt(s.degree_mean) << " r_mean=" << fmt(s.r_mean) << " r_min=" << fmt(s.r_min) << "\n";
  if (s.control_r_mean)
    std::cout << plane_name(s.plane) << " decorrelated: success=" << fmt(*s.control_success_rate)
              << " degree=" << fmt(*s.control_degree_mean) << " r_mean=" << fmt(*s.control_r_mean) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twin-image EPR simulation and analysis"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir, plane_arg, run_dir, near_dir, far_dir, export_stem;
  int jobs = 1, frame = 0;
  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "Generate near- and far-field image ensembles");
  sim->add_option("--config", config_path, "Config file (defaults are used when omitted)");
  sim->add_option("--out", out_dir, "Run directory")->required();
  sim->add_option("--seed", seed, "Override the master seed");
  sim->add_option("--plane", plane_arg, "Generate one plane only (near|far)");
  sim->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* ana = app.add_subcommand("analyze", "Correlate, fit and score every pair of a run");
  ana->add_option("run_dir", run_dir)->required();
  ana->add_option("--plane", plane_arg, "Analyze one plane only (near|far)");
  ana->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* epr = app.add_subcommand("epr", "Combine analyzed near and far runs into EPR products");
  epr->add_option("near_dir", near_dir)->required();
  epr->add_option("far_dir", far_dir)->required();
  epr->add_option("--out", out_dir, "Report directory (default: far_dir)");

  auto* rep = app.add_subcommand("report", "Print a run summary or export one correlation map");
  rep->add_option("run_dir", run_dir)->required();
  rep->add_option("--plane", plane_arg, "Plane of the exported map (near|far)");
  rep->add_option("--frame", frame, "Frame index of the exported map");
  rep->add_option("--export", export_stem, "Write <stem>.csv, <stem>.f64 and <stem>.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("UsageError", e.what());
    return 2;
  }

  try {
    if (*sim) {
      SimConfig cfg = config_path.empty() ? SimConfig{} : load_config(config_path);
      if (seed) cfg.seed = *seed;
      for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << "\n";
      SimulateOptions opt;
      opt.jobs = jobs;
      if (!plane_arg.empty()) opt.planes = {parse_plane(plane_arg)};
      const auto m = run_simulate(cfg, out_dir, opt);
      std::cout << "simulate: " << cfg.frame_count << " pairs per plane -> " << out_dir
                << " (digest " << m.stage_digests.at("simulate") << ")\n";
    } else if (*ana) {
      AnalyzeOptions opt;
      opt.jobs = jobs;
      if (!plane_arg.empty()) opt.plane = parse_plane(plane_arg);
      for (const auto& s : run_analyze(run_dir, opt)) print_summary(s);
    } else if (*epr) {
      const auto s = run_epr(near_dir, far_dir, out_dir.empty() ? far_dir : out_dir);
      std::cout << "epr: " << s.near_frames << " near x " << s.far_frames << " far combinations ("
                << s.interval_convention << ")\n"
                << "x interval: [" << fmt(s.x.low) << ", " << fmt(s.x.high) << "]\n"
                << "y interval: [" << fmt(s.y.low) << ", " << fmt(s.y.high) << "]\n"
                << "near r: min=" << fmt(s.near_r_min) << " mean=" << fmt(s.near_r_mean) << "\n"
                << "far r: min=" << fmt(s.far_r_min) << " mean=" << fmt(s.far_r_mean) << "\n";
    } else if (*rep) {
      if (!export_stem.empty()) {
        if (plane_arg.empty()) throw ValidationError("plane", "--export needs --plane");
        const auto map = correlation_map_for(run_dir, parse_plane(plane_arg), frame);
        write_map_csv(export_stem + ".csv", map);
        write_map_raw(export_stem, map);
        std::cout << "exported " << export_stem << ".csv, " << export_stem << ".f64, " << export_stem << ".json\n";
      } else {
        const auto m = load_manifest(run_dir);
        std::cout << "tool_version: " << m.tool_version << "\ncreated_at: " << m.created_at << "\n";
        for (const auto& [stage, d] : m.stage_digests) std::cout << stage << "_digest: " << d << "\n";
        const auto summary = std::filesystem::path(run_dir) / "analysis_summary.json";
        if (std::filesystem::exists(summary)) {
          std::ifstream in(summary);
          std::cout << nlohmann::json::parse(in).dump(2) << "\n";
        } else {
          std::cout << "not analyzed yet\n";
        }
      }
    }
  } catch (const IoError& e) {
    print_error(e.kind(), e.what(), {{"path", e.path()}});
    return exit_code_for(e);
  } catch (const ValidationError& e) {
    print_error(e.kind(), e.what(), {{"field", e.field()}});
    return exit_code_for(e);
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    print_error("InternalError", e.what());
    return 1;
  }
  return 0;
}
