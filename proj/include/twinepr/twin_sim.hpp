#pragma once

// Monte-Carlo generator of binary signal/idler frame pairs from a source of
// position-correlated (near field) or momentum-anticorrelated (far field)
// photon pairs.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "digest.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "parallel.hpp"

namespace twinepr {

struct ImagePair {
  BinaryFrame signal;
  BinaryFrame idler;
  Plane plane = Plane::NearField;
  int frame_index = 0;
  std::uint64_t config_digest = 0;
};

/// Digest over every field of the config that affects generated frames.
inline std::uint64_t config_digest(const SimConfig& c) {
  Fnv1a h;
  auto d = [&h](double v) { h.update(std::bit_cast<std::uint64_t>(v)); };
  d(c.geometry.pixel_pitch_um);
  d(c.geometry.magnification);
  d(c.geometry.focal_length_mm);
  d(c.geometry.wavelength_nm);
  h.update(static_cast<std::uint64_t>(c.geometry.image_size));
  d(c.efficiency.eta_filter);
  d(c.efficiency.eta_optics);
  d(c.efficiency.eta_camera);
  d(c.mean_photons_per_pixel);
  d(c.noise_per_pixel);
  d(c.pump_waist_um);
  d(c.phase_matching_width);
  d(c.pos_corr_sigma_um.x);
  d(c.pos_corr_sigma_um.y);
  d(c.mom_corr_sigma.x);
  d(c.mom_corr_sigma.y);
  h.update(static_cast<std::uint64_t>(c.bin_size));
  h.update(c.seed);
  h.update(static_cast<std::uint64_t>(c.frame_count));
  return h.value();
}

/// Throws StaleConfig if `pair` was not generated from `config`.
inline void verify_pair(const ImagePair& pair, const SimConfig& config) {
  if (pair.config_digest != config_digest(config))
    throw StaleConfig("frame " + std::to_string(pair.frame_index) + " was generated from config " +
                      to_hex(pair.config_digest) + ", expected " + to_hex(config_digest(config)));
}

namespace detail {

/// Separable far-field envelope ((1 + cos(pi u / W)) / 2)^2 on |u| < W.
inline double raised_cosine_sq(double u, double half_width) {
  if (std::abs(u) >= half_width) return 0.0;
  const double c = 0.5 * (1.0 + std::cos(std::numbers::pi * u / half_width));
  return c * c;
}

/// Fraction of the raised-cosine^2 mass inside |u| <= a.
inline double raised_cosine_sq_fraction(double a, double half_width) {
  a = std::min(a, half_width);
  const double w = half_width;
  const double pi = std::numbers::pi;
  const double inner = 3.0 * a + (4.0 * w / pi) * std::sin(pi * a / w) + (w / (2.0 * pi)) * std::sin(2.0 * pi * a / w);
  return inner / (3.0 * w);
}

/// Fraction of emitted photons expected to land on the frame (per frame).
inline double in_frame_fraction(const SimConfig& c, Plane plane) {
  const double half_px = 0.5 * c.geometry.image_size;
  if (plane == Plane::NearField) {
    const double half = half_px * c.geometry.near_pitch_um();
    const double f = std::erf(half / (c.pump_waist_um * std::numbers::sqrt2));
    return f * f;
  }
  const double half = half_px * c.geometry.momentum_per_pixel();
  const double f = raised_cosine_sq_fraction(half, c.phase_matching_width);
  return f * f;
}

inline std::mt19937_64 frame_engine(std::uint64_t seed, Plane plane, int frame_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(plane == Plane::NearField ? 0x4e : 0x46),
                    static_cast<std::uint32_t>(frame_index), 0x7715e9c3u};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Mean number of emitted pairs per frame so that the detected fluency per
/// frame equals m (before accidentals and binarization).
inline double mean_pair_count(const SimConfig& c, Plane plane) {
  const double eta = c.eta();
  if (eta <= 0.0) return 0.0;
  const double n = c.geometry.image_size;
  return c.mean_photons_per_pixel * n * n / (eta * detail::in_frame_fraction(c, plane));
}

/// One emitted pair in physical units (um in the near field at the crystal,
/// hbar/um in the far field), before detection and pixelization.
struct EmittedPair {
  double x1, y1, x2, y2;
  bool keep_signal, keep_idler;
};

namespace detail {

/// Draws the Poisson pair count and every pair of one frame from `rng`,
/// calling sink(EmittedPair) for each.
template <typename Sink>
void emit_pairs(const SimConfig& config, Plane plane, std::mt19937_64& rng, Sink&& sink) {
  const double eta = config.eta();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double pairs_mean = mean_pair_count(config, plane);
  const long long pairs = pairs_mean > 0.0 ? std::poisson_distribution<long long>(pairs_mean)(rng) : 0;

  const bool near = plane == Plane::NearField;
  const Axes sigma = near ? config.pos_corr_sigma_um : config.mom_corr_sigma;
  const double half_width = config.phase_matching_width;

  auto envelope_draw = [&]() {
    if (near) return config.pump_waist_um * gauss(rng);
    for (;;) {
      const double u = half_width * (2.0 * unit(rng) - 1.0);
      if (unit(rng) < raised_cosine_sq(u, half_width)) return u;
    }
  };

  for (long long k = 0; k < pairs; ++k) {
    const double cx = envelope_draw();
    const double cy = envelope_draw();
    const double dx = sigma.x * gauss(rng);
    const double dy = sigma.y * gauss(rng);
    const bool keep_signal = unit(rng) < eta;
    const bool keep_idler = unit(rng) < eta;
    if (near)
      sink(EmittedPair{cx + 0.5 * dx, cy + 0.5 * dy, cx - 0.5 * dx, cy - 0.5 * dy, keep_signal, keep_idler});
    else
      sink(EmittedPair{cx + 0.5 * dx, cy + 0.5 * dy, -cx + 0.5 * dx, -cy + 0.5 * dy, keep_signal, keep_idler});
  }
}

}  // namespace detail

/// Generates frame `frame_index` of the ensemble for `plane`. Deterministic in
/// (config, plane, frame_index).
inline ImagePair generate_pair(const SimConfig& config, Plane plane, int frame_index) {
  config.validate();
  if (frame_index < 0 || frame_index >= config.frame_count)
    throw DomainError("frame_index " + std::to_string(frame_index) + " outside [0, " +
                      std::to_string(config.frame_count) + ")");

  const int n = config.geometry.image_size;
  ImagePair pair{BinaryFrame(n, n, 0), BinaryFrame(n, n, 0), plane, frame_index, config_digest(config)};
  auto rng = detail::frame_engine(config.seed, plane, frame_index);

  const double pixel =
      plane == Plane::NearField ? config.geometry.near_pitch_um() : config.geometry.momentum_per_pixel();
  auto deposit = [&](BinaryFrame& frame, double x, double y) {
    const double col = std::floor(x / pixel + 0.5 * n);
    const double row = std::floor(y / pixel + 0.5 * n);
    if (col < 0.0 || row < 0.0 || col >= n || row >= n) return;
    frame(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) = 1;
  };
  detail::emit_pairs(config, plane, rng, [&](const EmittedPair& p) {
    if (p.keep_signal) deposit(pair.signal, p.x1, p.y1);
    if (p.keep_idler) deposit(pair.idler, p.x2, p.y2);
  });

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p_n = config.noise_per_pixel;
  if (p_n > 0.0) {
    for (BinaryFrame* frame : {&pair.signal, &pair.idler})
      for (auto& px : frame->data())
        if (unit(rng) < p_n) px = 1;
  }
  return pair;
}

/// All frame_count pairs for `plane`, ordered by frame index. Each frame is
/// seeded independently, so the result does not depend on `jobs`.
inline std::vector<ImagePair> generate_ensemble(const SimConfig& config, Plane plane, int jobs = 1) {
  config.validate();
  std::vector<ImagePair> out(static_cast<std::size_t>(config.frame_count));
  parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = generate_pair(config, plane, static_cast<int>(i)); });
  return out;
}

}  // namespace twinepr
