#pragma once

// Fit and subtract the deterministic intensity envelope of a single frame.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "least_squares.hpp"
#include "matrix.hpp"
#include "stats.hpp"

namespace twinepr {

enum class ProfileKind { Gaussian2D, SincLike2D };

inline std::string_view profile_kind_name(ProfileKind k) {
  return k == ProfileKind::Gaussian2D ? "Gaussian2D" : "SincLike2D";
}

/// Natural envelope model for a plane: Gaussian pump in the near field,
/// sinc^2-like phase matching in the far field.
inline ProfileKind profile_kind_for(Plane p) {
  return p == Plane::NearField ? ProfileKind::Gaussian2D : ProfileKind::SincLike2D;
}

/// Envelope in pixel coordinates (x = column, y = row). For Gaussian2D the
/// widths are standard deviations; for SincLike2D they are the distance from
/// the center to the first zero of sinc.
struct ProfileModel {
  ProfileKind kind = ProfileKind::Gaussian2D;
  double amplitude = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double width_x = 1.0;
  double width_y = 1.0;
  double baseline = 0.0;
  bool converged = true;
  int iterations = 0;

  /// Envelope shape in [0, 1], without amplitude or baseline.
  double shape(double x, double y) const {
    const double u = (x - center_x) / width_x;
    const double v = (y - center_y) / width_y;
    if (kind == ProfileKind::Gaussian2D) return std::exp(-0.5 * (u * u + v * v));
    return sinc_lobe(u) * sinc_lobe(v);
  }

  double raw(double x, double y) const { return amplitude * shape(x, y) + baseline; }

  /// Evaluated profile clamped to a per-pixel detection probability.
  double operator()(double x, double y) const { return std::clamp(raw(x, y), 0.0, 1.0); }

  bool finite() const {
    return std::isfinite(amplitude) && std::isfinite(center_x) && std::isfinite(center_y) &&
           std::isfinite(width_x) && std::isfinite(width_y) && std::isfinite(baseline);
  }

  /// sinc^2 restricted to the main lobe and the first side lobes (|u| <= 2).
  static double sinc_lobe(double u) {
    u = std::abs(u);
    if (u >= 2.0) return 0.0;
    if (u < 1e-8) return 1.0;
    const double s = std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
    return s * s;
  }
};

inline RealMatrix evaluate(const ProfileModel& model, std::size_t rows, std::size_t cols) {
  RealMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = model(static_cast<double>(c), static_cast<double>(r));
  return out;
}

struct FluctuationImage {
  RealMatrix values;
  ProfileModel model;
};

namespace detail {

struct BlockGrid {
  std::vector<double> x, y, value;
};

/// Block means over `block` x `block` tiles; trailing partial tiles are kept
/// and located at the mean coordinate of their pixels.
inline BlockGrid block_average(const RealMatrix& frame, int block) {
  BlockGrid g;
  const auto b = static_cast<std::size_t>(block);
  for (std::size_t r0 = 0; r0 < frame.rows(); r0 += b) {
    for (std::size_t c0 = 0; c0 < frame.cols(); c0 += b) {
      const std::size_t r1 = std::min(r0 + b, frame.rows());
      const std::size_t c1 = std::min(c0 + b, frame.cols());
      double s = 0.0;
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c) s += frame(r, c);
      g.value.push_back(s / static_cast<double>((r1 - r0) * (c1 - c0)));
      g.x.push_back(0.5 * static_cast<double>(c0 + c1 - 1));
      g.y.push_back(0.5 * static_cast<double>(r0 + r1 - 1));
    }
  }
  return g;
}

inline ProfileModel model_from(ProfileKind kind, const Eigen::VectorXd& p, bool with_baseline) {
  ProfileModel m;
  m.kind = kind;
  m.amplitude = p[0];
  m.center_x = p[1];
  m.center_y = p[2];
  m.width_x = std::abs(p[3]);
  m.width_y = std::abs(p[4]);
  m.baseline = with_baseline ? p[5] : 0.0;
  return m;
}

inline ProfileModel fit_blocks(const BlockGrid& g, ProfileKind kind, const ProfileModel& start, bool with_baseline) {
  const Eigen::Index n_params = with_baseline ? 6 : 5;
  Eigen::VectorXd p(n_params);
  p.head<5>() << start.amplitude, start.center_x, start.center_y, start.width_x, start.width_y;
  if (with_baseline) p[5] = start.baseline;

  const auto n = static_cast<Eigen::Index>(g.value.size());
  ResidualFn residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    ProfileModel m = model_from(kind, q, with_baseline);
    m.width_x = std::max(m.width_x, 1e-6);
    m.width_y = std::max(m.width_y, 1e-6);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      r[k] = m.raw(g.x[i], g.y[i]) - g.value[i];
    }
  };
  const auto res = damped_gauss_newton(residual, p, n);
  ProfileModel m = model_from(kind, res.params, with_baseline);
  m.converged = res.converged;
  m.iterations = res.iterations;
  return m;
}

}  // namespace detail

inline constexpr int kProfileBlock = 8;
inline constexpr std::size_t kMinDetections = 100;
inline constexpr double kFlatWidthFactor = 100.0;

/// Least-squares fit of the envelope to the 8x8 block-averaged frame, started
/// from the frame centroid and second moments. Non-convergence is reported
/// through `converged`, never thrown.
inline ProfileModel fit_profile(const RealMatrix& frame, ProfileKind kind) {
  if (frame.empty()) throw DegenerateFrame("empty frame");
  std::size_t nonzero = 0;
  for (double v : frame.data()) nonzero += v != 0.0;
  if (nonzero < kMinDetections)
    throw DegenerateFrame("frame has " + std::to_string(nonzero) + " nonzero pixels, need >= " +
                          std::to_string(kMinDetections));

  const auto g = detail::block_average(frame, kProfileBlock);
  const double n_cols = static_cast<double>(frame.cols());
  const double n_rows = static_cast<double>(frame.rows());
  const double extent = std::max(n_cols, n_rows);

  const double lo = *std::min_element(g.value.begin(), g.value.end());
  const double hi = *std::max_element(g.value.begin(), g.value.end());

  double w = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < g.value.size(); ++k) {
    const double wk = g.value[k] - lo;
    w += wk;
    sx += wk * g.x[k];
    sy += wk * g.y[k];
  }
  ProfileModel start;
  start.kind = kind;
  start.center_x = 0.5 * (n_cols - 1.0);
  start.center_y = 0.5 * (n_rows - 1.0);
  start.width_x = 0.25 * n_cols;
  start.width_y = 0.25 * n_rows;
  if (w > 0.0) {
    start.center_x = sx / w;
    start.center_y = sy / w;
    double vx = 0.0, vy = 0.0;
    for (std::size_t k = 0; k < g.value.size(); ++k) {
      const double wk = g.value[k] - lo;
      vx += wk * (g.x[k] - start.center_x) * (g.x[k] - start.center_x);
      vy += wk * (g.y[k] - start.center_y) * (g.y[k] - start.center_y);
    }
    if (vx > 0.0) start.width_x = std::sqrt(vx / w);
    if (vy > 0.0) start.width_y = std::sqrt(vy / w);
  }
  if (kind == ProfileKind::SincLike2D) {
    // Match the half-maximum points of a Gaussian with the moment widths.
    start.width_x *= 2.66;
    start.width_y *= 2.66;
  }
  start.amplitude = std::max(hi - lo, 1e-6);
  start.baseline = std::max(lo, 0.0);

  ProfileModel m = detail::fit_blocks(g, kind, start, true);
  const bool degenerate = !m.finite() || m.baseline < 0.0 || m.amplitude < 0.1 * std::abs(m.baseline) ||
                          m.width_x > 10.0 * extent || m.width_y > 10.0 * extent;
  if (degenerate) {
    // Nearly flat frame: the envelope and the baseline are not separable.
    start.baseline = 0.0;
    start.amplitude = std::max(hi, 1e-6);
    m = detail::fit_blocks(g, kind, start, false);
  }
  const bool lost = !m.finite() || !m.converged || m.center_x < 0.0 || m.center_x > n_cols - 1.0 ||
                    m.center_y < 0.0 || m.center_y > n_rows - 1.0;
  if (lost) {
    // No envelope the optimizer can lock onto: fall back to a flat profile at
    // the frame mean, still flagged as not converged.
    ProfileModel flat;
    flat.kind = kind;
    flat.amplitude = mean(frame.data());
    flat.center_x = 0.5 * (n_cols - 1.0);
    flat.center_y = 0.5 * (n_rows - 1.0);
    flat.width_x = flat.width_y = kFlatWidthFactor * extent;
    flat.converged = false;
    flat.iterations = m.iterations;
    return flat;
  }
  m.amplitude = std::max(m.amplitude, 0.0);
  m.baseline = std::max(m.baseline, 0.0);
  return m;
}

inline ProfileModel fit_profile(const BinaryFrame& frame, ProfileKind kind) {
  return fit_profile(convert<double>(frame), kind);
}

/// frame - model, per pixel.
inline FluctuationImage subtract_profile(const RealMatrix& frame, const ProfileModel& model) {
  if (!model.finite()) throw DomainError("subtract_profile: model has non-finite parameters");
  FluctuationImage out{RealMatrix(frame.rows(), frame.cols()), model};
  for (std::size_t r = 0; r < frame.rows(); ++r)
    for (std::size_t c = 0; c < frame.cols(); ++c)
      out.values(r, c) = frame(r, c) - model(static_cast<double>(c), static_cast<double>(r));
  return out;
}

inline FluctuationImage subtract_profile(const BinaryFrame& frame, const ProfileModel& model) {
  return subtract_profile(convert<double>(frame), model);
}

}  // namespace twinepr
