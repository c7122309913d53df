#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace twinepr {

enum class Plane { NearField, FarField };

inline std::string_view plane_name(Plane p) { return p == Plane::NearField ? "near" : "far"; }

inline Plane parse_plane(std::string_view s) {
  if (s == "near") return Plane::NearField;
  if (s == "far") return Plane::FarField;
  throw ValidationError("plane", "expected 'near' or 'far', got '" + std::string(s) + "'");
}

/// Per-axis pair of values (x = columns, y = rows).
struct Axes {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Axes&, const Axes&) = default;
};

/// Detector and imaging optics. Lengths carry their unit in the field name.
struct OpticsGeometry {
  double pixel_pitch_um = 16.0;
  double magnification = 2.44;
  double focal_length_mm = 120.0;
  double wavelength_nm = 710.0;
  int image_size = 300;

  /// Pixel size referred back to the crystal plane, in um.
  double near_pitch_um() const { return pixel_pitch_um / magnification; }

  /// Transverse momentum spanned by one far-field pixel, in hbar/um.
  double momentum_per_pixel() const {
    const double k = 2.0 * std::numbers::pi / (wavelength_nm * 1e-3);
    return k * pixel_pitch_um / (focal_length_mm * 1e3);
  }

  void validate() const {
    auto positive = [](double v, const char* field) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be strictly positive");
    };
    positive(pixel_pitch_um, "geometry.pixel_pitch_um");
    positive(magnification, "geometry.magnification");
    positive(focal_length_mm, "geometry.focal_length_mm");
    positive(wavelength_nm, "geometry.wavelength_nm");
    if (image_size < 16) throw ValidationError("geometry.image_size", "must be >= 16");
  }

  friend bool operator==(const OpticsGeometry&, const OpticsGeometry&) = default;
};

struct EfficiencyBudget {
  double eta_filter = 1.0;
  double eta_optics = 1.0;
  double eta_camera = 1.0;

  void validate() const {
    auto probability = [](double v, const char* field) {
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(field, "must lie in [0, 1]");
    };
    probability(eta_filter, "efficiency.eta_filter");
    probability(eta_optics, "efficiency.eta_optics");
    probability(eta_camera, "efficiency.eta_camera");
  }

  friend bool operator==(const EfficiencyBudget&, const EfficiencyBudget&) = default;
};

/// Overall detection efficiency: product of the filter, optics and camera terms.
inline double effective_efficiency(const EfficiencyBudget& b) {
  return b.eta_filter * b.eta_optics * b.eta_camera;
}

/// Everything needed to reproduce a simulated run.
struct SimConfig {
  OpticsGeometry geometry;
  EfficiencyBudget efficiency;
  double mean_photons_per_pixel = 0.15;  // m, detected per frame
  double noise_per_pixel = 0.021;        // p_n, accidental detections
  double pump_waist_um = 1200.0;         // rms width of the pair position at the crystal
  double phase_matching_width = 0.45;    // half-width of the far-field envelope, hbar/um
  Axes pos_corr_sigma_um{14.5, 15.5};    // std of x1 - x2 at the crystal
  Axes mom_corr_sigma{2.83e-3, 1.87e-3}; // std of p1 + p2, hbar/um
  int bin_size = 11;
  std::uint64_t seed = 1;
  int frame_count = 1;

  double eta() const { return effective_efficiency(efficiency); }

  /// Number of coherence cells in one frame, (image_size / bin_size)^2.
  double cell_count() const {
    const int per_side = geometry.image_size / bin_size;
    return static_cast<double>(per_side) * per_side;
  }

  /// Throws ValidationError naming the first offending field; returns soft warnings.
  std::vector<std::string> validate() const {
    geometry.validate();
    efficiency.validate();
    if (!(mean_photons_per_pixel > 0.0))
      throw ValidationError("source.mean_photons_per_pixel", "must be > 0");
    if (!(noise_per_pixel >= 0.0 && noise_per_pixel < 1.0))
      throw ValidationError("source.noise_per_pixel", "must lie in [0, 1)");
    if (!(pump_waist_um > 0.0)) throw ValidationError("source.pump_waist_um", "must be > 0");
    if (!(phase_matching_width > 0.0))
      throw ValidationError("source.phase_matching_width", "must be > 0");
    if (!(pos_corr_sigma_um.x > 0.0)) throw ValidationError("source.pos_corr_sigma_x_um", "must be > 0");
    if (!(pos_corr_sigma_um.y > 0.0)) throw ValidationError("source.pos_corr_sigma_y_um", "must be > 0");
    if (!(mom_corr_sigma.x > 0.0)) throw ValidationError("source.mom_corr_sigma_x", "must be > 0");
    if (!(mom_corr_sigma.y > 0.0)) throw ValidationError("source.mom_corr_sigma_y", "must be > 0");
    if (bin_size < 1) throw ValidationError("analysis.bin_size", "must be >= 1");
    if (bin_size > geometry.image_size)
      throw ValidationError("analysis.bin_size", "must not exceed image_size");
    if (frame_count < 1) throw ValidationError("run.frame_count", "must be >= 1");

    std::vector<std::string> warnings;
    if (mean_photons_per_pixel + noise_per_pixel > 0.5)
      warnings.emplace_back("m + p_n > 0.5: outside the photon-counting regime, binarization saturates");
    return warnings;
  }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Paper-parity preset. Widths are inferred, not reported values.
inline SimConfig paper_parity_config() {
  SimConfig c;
  c.efficiency = {0.56, 0.64, 0.74};
  return c;
}

}  // namespace twinepr
