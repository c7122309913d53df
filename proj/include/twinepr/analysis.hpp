#pragma once

// Full single-pair analysis: envelope subtraction, correlation, binning,
// peak statistics, peak width and shot-noise ratio.

#include <span>
#include <vector>

#include "epr_metrics.hpp"
#include "parallel.hpp"
#include "profile_fit.hpp"
#include "twin_sim.hpp"
#include "xcorr.hpp"

namespace twinepr {

struct AnalysisOptions {
  int bin_size = 11;
  Boundary boundary = Boundary::Circular;
  ShotNoiseReference shot_noise_reference = ShotNoiseReference::Binomial;
  bool fit_width = true;
};

struct PairAnalysis {
  int frame_index = 0;
  Plane plane = Plane::NearField;
  ProfileModel signal_model;
  ProfileModel idler_model;
  PeakStats peak;
  double degree = 0.0;
  PeakWidthFit width;
  ShotNoiseRatio shot_noise;
};

inline PairAnalysis analyze_pair(const ImagePair& pair, const AnalysisOptions& opt = {}) {
  PairAnalysis out;
  out.frame_index = pair.frame_index;
  out.plane = pair.plane;
  const auto kind = profile_kind_for(pair.plane);
  out.signal_model = fit_profile(pair.signal, kind);
  out.idler_model = fit_profile(pair.idler, kind);
  const auto fs = subtract_profile(pair.signal, out.signal_model);
  const auto fi = subtract_profile(pair.idler, out.idler_model);
  const auto map = cross_correlate(fs, fi, pair.plane == Plane::FarField, opt.boundary);
  out.peak = detect_peak(bin_map(map, opt.bin_size));
  out.degree = degree_of_correlation(map, opt.bin_size);
  if (opt.fit_width) out.width = fit_peak_width(map, pair.plane, pair.frame_index);
  out.shot_noise = shot_noise_ratio(pair, opt.bin_size, out.signal_model, out.idler_model, opt.shot_noise_reference);
  return out;
}

inline std::vector<PairAnalysis> analyze_ensemble(std::span<const ImagePair> pairs, const AnalysisOptions& opt = {},
                                                  int jobs = 1) {
  std::vector<PairAnalysis> out(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) { out[i] = analyze_pair(pairs[i], opt); });
  return out;
}

inline std::vector<PeakStats> peaks_of(std::span<const PairAnalysis> a) {
  std::vector<PeakStats> v;
  v.reserve(a.size());
  for (const auto& x : a) v.push_back(x.peak);
  return v;
}

inline double success_rate(std::span<const PairAnalysis> a) {
  const auto peaks = peaks_of(a);
  return success_rate(std::span<const PeakStats>(peaks));
}

}  // namespace twinepr
