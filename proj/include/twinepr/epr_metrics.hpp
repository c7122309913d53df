#pragma once

// Physical variances from correlation-peak widths, EPR variance products and
// the twin-image shot-noise ratio.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "least_squares.hpp"
#include "profile_fit.hpp"
#include "stats.hpp"
#include "twin_sim.hpp"
#include "xcorr.hpp"

namespace twinepr {

inline constexpr int kPeakWindow = 31;
inline constexpr double kSubPixelSigma = 0.6;

/// Separable Gaussian fitted to the unbinned correlation peak. Widths are
/// standard deviations in shift pixels.
struct PeakWidthFit {
  Plane plane = Plane::NearField;
  int frame_index = 0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double residual_rms = 0.0;
  double noise_floor = 0.0;  // std of the map outside the fit window
  bool converged = false;
  bool sub_pixel = false;
};

inline PeakWidthFit fit_peak_width(const CorrelationMap& map, Plane plane, int frame_index = 0,
                                   int window = kPeakWindow) {
  const int half = window / 2;
  const int hy = std::min(half, map.max_shift_y), hx = std::min(half, map.max_shift_x);
  if (hy < 1 || hx < 1) throw DomainError("fit_peak_width: map too small for a peak window");

  std::vector<double> xs, ys, vs;
  for (int dy = -hy; dy <= hy; ++dy)
    for (int dx = -hx; dx <= hx; ++dx) {
      xs.push_back(dx);
      ys.push_back(dy);
      vs.push_back(map.at(dy, dx));
    }
  std::vector<double> outside;
  for (int dy = -map.max_shift_y; dy <= map.max_shift_y; ++dy)
    for (int dx = -map.max_shift_x; dx <= map.max_shift_x; ++dx)
      if (std::abs(dy) > hy || std::abs(dx) > hx) outside.push_back(map.at(dy, dx));

  std::vector<double> border;
  for (std::size_t k = 0; k < vs.size(); ++k)
    if (std::abs(xs[k]) == hx || std::abs(ys[k]) == hy) border.push_back(vs[k]);
  const double offset0 = mean(border);
  double peak0 = -std::numeric_limits<double>::infinity();
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) peak0 = std::max(peak0, map.at(dy, dx));

  Eigen::VectorXd p(6);
  p << std::max(peak0 - offset0, 1e-6), 0.0, 0.0, 2.0, 2.0, offset0;
  const auto n = static_cast<Eigen::Index>(vs.size());
  ResidualFn residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    const double sx = std::max(std::abs(q[3]), 1e-3), sy = std::max(std::abs(q[4]), 1e-3);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double u = (xs[i] - q[1]) / sx, v = (ys[i] - q[2]) / sy;
      r[k] = q[0] * std::exp(-0.5 * (u * u + v * v)) + q[5] - vs[i];
    }
  };
  const auto res = damped_gauss_newton(residual, p, n);

  PeakWidthFit fit;
  fit.plane = plane;
  fit.frame_index = frame_index;
  fit.amplitude = res.params[0];
  fit.center_x = res.params[1];
  fit.center_y = res.params[2];
  fit.sigma_x = std::abs(res.params[3]);
  fit.sigma_y = std::abs(res.params[4]);
  fit.offset = res.params[5];
  fit.residual_rms = std::sqrt(2.0 * res.cost / static_cast<double>(n));
  fit.noise_floor = outside.size() > 1 ? stddev(outside) : 0.0;
  fit.converged = res.converged && std::isfinite(fit.sigma_x) && std::isfinite(fit.sigma_y) &&
                  fit.sigma_x < half && fit.sigma_y < half && fit.amplitude > 0.0;
  fit.sub_pixel = fit.sigma_x <= kSubPixelSigma || fit.sigma_y <= kSubPixelSigma;
  return fit;
}

/// Variances of the twin-photon coordinate difference (near field, um^2) or
/// momentum sum (far field, hbar^2 um^-2), per axis.
struct VarianceRecord {
  Plane plane = Plane::NearField;
  int frame_index = 0;
  double var_x = 0.0;
  double var_y = 0.0;
};

/// Delta^2(x1 - x2) = (sigma_px * pitch / M)^2.
inline VarianceRecord position_variance(const PeakWidthFit& fit, const OpticsGeometry& g) {
  if (fit.plane != Plane::NearField) throw PlaneMismatch("position_variance needs a near-field width fit");
  const double px = g.near_pitch_um();
  return {Plane::NearField, fit.frame_index, std::pow(fit.sigma_x * px, 2), std::pow(fit.sigma_y * px, 2)};
}

/// Delta^2(p1 + p2) = (sigma_px * (2 pi / lambda) * pitch / f)^2, hbar = 1.
inline VarianceRecord momentum_variance(const PeakWidthFit& fit, const OpticsGeometry& g) {
  if (fit.plane != Plane::FarField) throw PlaneMismatch("momentum_variance needs a far-field width fit");
  const double q = g.momentum_per_pixel();
  return {Plane::FarField, fit.frame_index, std::pow(fit.sigma_x * q, 2), std::pow(fit.sigma_y * q, 2)};
}

enum class Axis { X, Y };

inline std::string_view axis_name(Axis a) { return a == Axis::X ? "x" : "y"; }

struct EprProduct {
  Axis axis = Axis::X;
  double value = 0.0;  // 0.25 / (Delta^2 pos * Delta^2 mom), > 1 violates the local-realist bound
  int near_frame = 0;
  int far_frame = 0;
};

inline double epr_product(double position_variance, double momentum_variance) {
  return 0.25 / (position_variance * momentum_variance);
}

/// Every (near frame, far frame) combination, both axes: for each near record
/// and each far record, the x product followed by the y product.
inline std::vector<EprProduct> epr_products(std::span<const VarianceRecord> near,
                                            std::span<const VarianceRecord> far) {
  if (near.empty() || far.empty()) throw InsufficientSamples("epr_products: empty variance sequence");
  for (const auto& r : near)
    if (r.plane != Plane::NearField) throw PlaneMismatch("epr_products: near sequence holds a far-field record");
  for (const auto& r : far)
    if (r.plane != Plane::FarField) throw PlaneMismatch("epr_products: far sequence holds a near-field record");
  std::vector<EprProduct> out;
  out.reserve(2 * near.size() * far.size());
  for (const auto& n : near)
    for (const auto& f : far) {
      out.push_back({Axis::X, epr_product(n.var_x, f.var_x), n.frame_index, f.frame_index});
      out.push_back({Axis::Y, epr_product(n.var_y, f.var_y), n.frame_index, f.frame_index});
    }
  return out;
}

inline std::vector<double> product_values(std::span<const EprProduct> products, Axis axis) {
  std::vector<double> v;
  for (const auto& p : products)
    if (p.axis == axis) v.push_back(p.value);
  return v;
}

/// Shot-noise normalization for Var(N1 - N2).
///  - Binomial: sum over both frames of N (n - N) / (n - 1) per superpixel,
///    the unbiased variance of n independent binary pixels. Correct for
///    thresholded photon-counting frames at any occupancy.
///  - Poisson: N1 + N2, the low-occupancy limit of the above.
enum class ShotNoiseReference { Binomial, Poisson };

struct ShotNoiseRatio {
  double r = 0.0;
  Plane plane = Plane::NearField;
  int frame_index = 0;
  int cells = 0;  // superpixels inside the support
};

inline constexpr double kSupportFraction = 0.2;

/// r = Var(N1 - N2) / <shot noise> over bin x bin superpixels on a fixed,
/// centered grid (no shift search). Far-field idlers are point-reflected so
/// N1(p) is compared with N2(-p). Only superpixels where the mean fitted
/// envelope exceeds 20% of its peak are used.
inline ShotNoiseRatio shot_noise_ratio(const ImagePair& pair, int bin_size, const ProfileModel& signal_model,
                                       const ProfileModel& idler_model,
                                       ShotNoiseReference reference = ShotNoiseReference::Binomial) {
  if (bin_size < 1) throw DomainError("shot_noise_ratio: bin_size must be >= 1");
  if (!pair.signal.same_shape(pair.idler)) throw DimensionMismatch("shot_noise_ratio: frame shapes differ");
  const bool flip = pair.plane == Plane::FarField;
  const BinaryFrame idler = flip ? flip_both(pair.idler) : pair.idler;
  const std::size_t rows = pair.signal.rows(), cols = pair.signal.cols();
  const auto b = static_cast<std::size_t>(bin_size);
  const std::size_t kr = rows / b, kc = cols / b;
  const std::size_t r_off = (rows - kr * b) / 2, c_off = (cols - kc * b) / 2;
  const double n_pix = static_cast<double>(b * b);

  std::vector<double> diff, ref;
  for (std::size_t br = 0; br < kr; ++br)
    for (std::size_t bc = 0; bc < kc; ++bc) {
      const double yc = static_cast<double>(r_off + br * b) + 0.5 * (bin_size - 1);
      const double xc = static_cast<double>(c_off + bc * b) + 0.5 * (bin_size - 1);
      const double idler_shape = flip ? idler_model.shape(static_cast<double>(cols - 1) - xc,
                                                          static_cast<double>(rows - 1) - yc)
                                      : idler_model.shape(xc, yc);
      if (0.5 * (signal_model.shape(xc, yc) + idler_shape) <= kSupportFraction) continue;
      double n1 = 0.0, n2 = 0.0;
      for (std::size_t r = r_off + br * b; r < r_off + (br + 1) * b; ++r)
        for (std::size_t c = c_off + bc * b; c < c_off + (bc + 1) * b; ++c) {
          n1 += pair.signal(r, c);
          n2 += idler(r, c);
        }
      diff.push_back(n1 - n2);
      if (reference == ShotNoiseReference::Poisson || n_pix < 2.0)
        ref.push_back(n1 + n2);
      else
        ref.push_back((n1 * (n_pix - n1) + n2 * (n_pix - n2)) / (n_pix - 1.0));
    }
  if (diff.size() < 2) throw EmptySupport("shot_noise_ratio: fewer than 2 superpixels inside the envelope support");
  const double denom = mean(ref);
  if (!(denom > 0.0)) throw EmptySupport("shot_noise_ratio: no detections inside the envelope support");
  return {variance(diff) / denom, pair.plane, pair.frame_index, static_cast<int>(diff.size())};
}

/// Convenience overload fitting both envelopes first.
inline ShotNoiseRatio shot_noise_ratio(const ImagePair& pair, int bin_size,
                                       ShotNoiseReference reference = ShotNoiseReference::Binomial) {
  const auto kind = profile_kind_for(pair.plane);
  return shot_noise_ratio(pair, bin_size, fit_profile(pair.signal, kind), fit_profile(pair.idler, kind), reference);
}

}  // namespace twinepr
