#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <twinepr/analysis.hpp>
#include <twinepr/epr_metrics.hpp>
#include <twinepr/stats.hpp>

#include "oracles.hpp"

using namespace twinepr;

namespace {

CorrelationMap gaussian_map(double sx, double sy, double amp, double noise, unsigned seed, int max_shift = 40) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, noise);
  CorrelationMap m;
  m.max_shift_y = m.max_shift_x = max_shift;
  m.values = RealMatrix(2 * max_shift + 1, 2 * max_shift + 1);
  for (int dy = -max_shift; dy <= max_shift; ++dy)
    for (int dx = -max_shift; dx <= max_shift; ++dx)
      m.values(dy + max_shift, dx + max_shift) =
          amp * std::exp(-0.5 * (dx * dx / (sx * sx) + dy * dy / (sy * sy))) + (noise > 0 ? n(rng) : 0.0);
  return m;
}

PeakWidthFit width(Plane p, double sx, double sy) {
  PeakWidthFit f;
  f.plane = p;
  f.sigma_x = sx;
  f.sigma_y = sy;
  f.converged = true;
  return f;
}

std::vector<VarianceRecord> fitted_variances(const SimConfig& c, Plane p) {
  std::vector<VarianceRecord> out;
  for (const auto& a : analyze_ensemble(generate_ensemble(c, p))) {
    if (!a.width.converged) continue;
    out.push_back(p == Plane::NearField ? position_variance(a.width, c.geometry)
                                        : momentum_variance(a.width, c.geometry));
  }
  return out;
}

}  // namespace

TEST(FitPeakWidth, RecoversInjectedGaussian) {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto f = fit_peak_width(gaussian_map(2.5, 2.5, 0.02, 0.001, seed), Plane::NearField);
    EXPECT_TRUE(f.converged);
    EXPECT_NEAR(f.sigma_x / 2.5, 1, 0.05);
    EXPECT_NEAR(f.sigma_y / 2.5, 1, 0.05);
    EXPECT_FALSE(f.sub_pixel);
  }
  const auto f = fit_peak_width(gaussian_map(3.0, 1.7, 0.05, 0.001, 4), Plane::FarField);
  EXPECT_NEAR(f.sigma_x / 3.0, 1, 0.05);
  EXPECT_NEAR(f.sigma_y / 1.7, 1, 0.05);
  EXPECT_NEAR(f.noise_floor, 0.001, 2e-4);
}

TEST(FitPeakWidth, DeltaPeakIsSubPixel) {
  CorrelationMap m;
  m.max_shift_y = m.max_shift_x = 20;
  m.values = RealMatrix(41, 41, 0.0);
  m.values(20, 20) = 1.0;
  const auto f = fit_peak_width(m, Plane::NearField);
  EXPECT_LE(std::min(f.sigma_x, f.sigma_y), kSubPixelSigma);
  EXPECT_TRUE(f.sub_pixel);
}

TEST(PositionVariance, ReferenceGeometry) {
  OpticsGeometry g;
  const auto v = position_variance(width(Plane::NearField, 2.5, 2.5), g);
  EXPECT_NEAR(v.var_x, std::pow(2.5 * 16 / 2.44, 2), 1e-9);
  EXPECT_NEAR(v.var_x, 268.7, 0.05);
  // Width that lands on the lower edge of the reported x band.
  const double s = std::sqrt(177.0) / (16 / 2.44);
  EXPECT_NEAR(position_variance(width(Plane::NearField, s, s), g).var_x, 177.0, 1e-9);
  g.pixel_pitch_um = 1;
  g.magnification = 1;
  EXPECT_DOUBLE_EQ(position_variance(width(Plane::NearField, 1, 1), g).var_y, 1.0);
}

TEST(MomentumVariance, ReferenceGeometry) {
  OpticsGeometry g;
  const double q = (2 * std::numbers::pi / 0.710) * (16.0 / 120000.0);
  EXPECT_NEAR(q, 1.180e-3, 5e-7);
  const auto v = momentum_variance(width(Plane::FarField, 2.0, 2.0), g);
  EXPECT_NEAR(v.var_x, 4 * q * q, 1e-18);
  EXPECT_NEAR(v.var_x, 5.57e-6, 0.01e-6);
  EXPECT_GT(v.var_x, 4.5e-6);
  EXPECT_LT(v.var_x, 12.3e-6);
  g.focal_length_mm = (2 * std::numbers::pi / 0.710) * 16 / 1000;  // one hbar/um per pixel
  EXPECT_NEAR(momentum_variance(width(Plane::FarField, 1, 1), g).var_x, 1.0, 1e-12);
}

TEST(Variance, WrongPlaneRejected) {
  OpticsGeometry g;
  EXPECT_THROW(position_variance(width(Plane::FarField, 1, 1), g), PlaneMismatch);
  EXPECT_THROW(momentum_variance(width(Plane::NearField, 1, 1), g), PlaneMismatch);
}

TEST(Variance, UnitRoundTrip) {
  OpticsGeometry g;
  for (double s : {0.3, 1.0, 2.37, 9.9}) {
    const auto pv = position_variance(width(Plane::NearField, s, s), g);
    const auto mv = momentum_variance(width(Plane::FarField, s, s), g);
    EXPECT_NEAR(std::sqrt(pv.var_x) / (g.pixel_pitch_um / g.magnification) / s, 1, 1e-12);
    const double q = (2 * std::numbers::pi / (g.wavelength_nm / 1000)) * g.pixel_pitch_um / (g.focal_length_mm * 1000);
    EXPECT_NEAR(std::sqrt(mv.var_y) / q / s, 1, 1e-12);
  }
}

TEST(EprProducts, Arithmetic) {
  EXPECT_DOUBLE_EQ(epr_product(400, 8e-6), 78.125);
  std::vector<VarianceRecord> near = {{Plane::NearField, 0, 400, 500}, {Plane::NearField, 1, 200, 250}};
  std::vector<VarianceRecord> far = {{Plane::FarField, 0, 8e-6, 4e-6}, {Plane::FarField, 1, 1e-5, 5e-6},
                                     {Plane::FarField, 2, 2e-5, 1e-5}};
  const auto p = epr_products(near, far);
  ASSERT_EQ(p.size(), 12u);
  EXPECT_EQ(p[0].axis, Axis::X);
  EXPECT_DOUBLE_EQ(p[0].value, 78.125);
  EXPECT_EQ(p[1].axis, Axis::Y);
  EXPECT_DOUBLE_EQ(p[1].value, 0.25 / (500 * 4e-6));
  EXPECT_EQ(p[2].far_frame, 1);
  EXPECT_EQ(p[6].near_frame, 1);
  EXPECT_EQ(product_values(p, Axis::X).size(), 6u);
}

TEST(EprProducts, RescalingInvariance) {
  OpticsGeometry g;
  const auto n = width(Plane::NearField, 2.2, 2.4);
  const auto f = width(Plane::FarField, 2.4, 1.6);
  const double base = epr_product(position_variance(n, g).var_x, momentum_variance(f, g).var_x);
  for (double s : {0.5, 3.0, 17.0}) {
    OpticsGeometry gn = g, gf = g;
    gn.pixel_pitch_um *= s;
    gf.pixel_pitch_um /= s;
    EXPECT_NEAR(epr_product(position_variance(n, gn).var_x, momentum_variance(f, gf).var_x) / base, 1, 1e-12);
  }
}

TEST(EprProducts, MonotoneInWidths) {
  OpticsGeometry g;
  double prev = std::numeric_limits<double>::infinity();
  for (double s = 0.8; s < 6; s += 0.4) {
    const double v = epr_product(position_variance(width(Plane::NearField, s, s), g).var_x,
                                 momentum_variance(width(Plane::FarField, 2, 2), g).var_x);
    EXPECT_LT(v, prev);
    prev = v;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double s = 0.8; s < 6; s += 0.4) {
    const double v = epr_product(position_variance(width(Plane::NearField, 2, 2), g).var_x,
                                 momentum_variance(width(Plane::FarField, s, s), g).var_x);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(EprProducts, SeparableSourceRespectsBoundEntangledViolates) {
  // Coarse geometry so a minimum-uncertainty source (sigma_x sigma_p = 1)
  // has peaks of a few pixels in both planes.
  SimConfig sep = paper_parity_config();
  sep.geometry.magnification = 0.5;
  sep.geometry.focal_length_mm = 30;
  sep.pump_waist_um = 5000;
  sep.phase_matching_width = 1.8;
  sep.efficiency = {1, 1, 1};
  sep.noise_per_pixel = 0.0;
  sep.frame_count = 12;
  const double q = sep.geometry.momentum_per_pixel(), px = sep.geometry.near_pitch_um();
  const double s_px = std::sqrt(1.0 / (px * q));  // sigma_x sigma_p = 1 with equal pixel widths
  sep.pos_corr_sigma_um = {s_px * px, s_px * px};
  sep.mom_corr_sigma = {s_px * q, s_px * q};
  const auto sv = product_values(epr_products(fitted_variances(sep, Plane::NearField), fitted_variances(sep, Plane::FarField)), Axis::X);
  ASSERT_GE(sv.size(), 100u);
  const double below = std::count_if(sv.begin(), sv.end(), [](double v) { return v <= 1.0; });
  EXPECT_GE(below / sv.size(), 0.95);

  SimConfig ent = paper_parity_config();
  ent.frame_count = 12;
  const auto ev = product_values(epr_products(fitted_variances(ent, Plane::NearField), fitted_variances(ent, Plane::FarField)), Axis::X);
  ASSERT_GE(ev.size(), 100u);
  const double above = std::count_if(ev.begin(), ev.end(), [](double v) { return v > 1.0; });
  EXPECT_GE(above / ev.size(), 0.99);
}

TEST(EprProducts, NearFieldWidthsInsideReportedBand) {
  auto c = paper_parity_config();
  c.frame_count = 100;
  const auto v = fitted_variances(c, Plane::NearField);
  const double inside = std::count_if(v.begin(), v.end(), [](const VarianceRecord& r) { return r.var_x >= 177 && r.var_x <= 931; });
  EXPECT_GE(inside / c.frame_count, 0.9);
}

TEST(ConfidenceInterval, NearestRankOnOneToHundred) {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  const auto ci = confidence_interval(v);
  EXPECT_EQ(ci.low, 3);
  EXPECT_EQ(ci.high, 98);
}

TEST(ConfidenceInterval, ConstantAndSmallSamples) {
  const std::vector<double> c(50, 4.25);
  const auto ci = confidence_interval(c);
  EXPECT_EQ(ci.low, 4.25);
  EXPECT_EQ(ci.high, 4.25);
  EXPECT_THROW(confidence_interval(std::vector<double>(39, 1.0)), InsufficientSamples);
  EXPECT_NO_THROW(confidence_interval(std::vector<double>(40, 1.0)));
  EXPECT_THROW(confidence_interval(c, 1.0), DomainError);
}

TEST(NearestRank, MatchesSortReferenceExactly) {
  std::mt19937_64 rng(17);
  std::lognormal_distribution<double> d(0, 1);
  std::uniform_int_distribution<int> len(1, 500);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(len(rng));
    for (auto& x : v) x = d(rng);
    for (double p : {0.0, 0.01, 0.025, 0.1, 0.5, 0.9, 0.975, 0.99, 1.0})
      EXPECT_EQ(nearest_rank(v, p), oracle::sorted_percentile(v, p));
  }
  EXPECT_THROW(nearest_rank(std::vector<double>{}, 0.5), InsufficientSamples);
}

TEST(ShotNoise, IdenticalTwinsGiveZero) {
  const auto c = paper_parity_config();
  auto pair = generate_pair(c, Plane::NearField, 0);
  pair.idler = pair.signal;
  EXPECT_EQ(shot_noise_ratio(pair, 11).r, 0.0);
  auto far = generate_pair(c, Plane::FarField, 0);
  far.idler = flip_both(far.signal);
  const auto r = shot_noise_ratio(far, 11);
  EXPECT_EQ(r.r, 0.0);
  EXPECT_GT(r.cells, 100);
}

TEST(ShotNoise, IndependentFramesSitAtShotNoise) {
  auto c = paper_parity_config();
  c.frame_count = 2;
  const auto control = decorrelated_pairing(generate_ensemble(c, Plane::FarField));
  for (const auto& p : control) EXPECT_NEAR(shot_noise_ratio(p, 11).r, 1.0, 0.2);
}

TEST(ShotNoise, PoissonReferenceExceedsBinomial) {
  const auto pair = generate_pair(paper_parity_config(), Plane::NearField, 0);
  EXPECT_LT(shot_noise_ratio(pair, 11, ShotNoiseReference::Poisson).r,
            shot_noise_ratio(pair, 11, ShotNoiseReference::Binomial).r);
}

TEST(ShotNoise, EmptySupportRejected) {
  const auto pair = generate_pair(paper_parity_config(), Plane::NearField, 0);
  ProfileModel narrow;
  narrow.amplitude = 0.2;
  narrow.center_x = narrow.center_y = 150;
  narrow.width_x = narrow.width_y = 0.5;
  EXPECT_THROW(shot_noise_ratio(pair, 11, narrow, narrow), EmptySupport);
}
