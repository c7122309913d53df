#pragma once

// Closed-form design relations for single-pair correlation detection.

#include <cmath>
#include <cstdint>

#include "config.hpp"
#include "errors.hpp"

namespace twinepr {

/// Expected SNR of the binned correlation peak:
/// sqrt(C*K) * eta * m / (m + p_n).
inline double predicted_snr(double cells, double pairs, double eta, double m, double p_n) {
  if (!(cells >= 1.0)) throw DomainError("predicted_snr: cell count must be >= 1");
  if (!(pairs >= 1.0)) throw DomainError("predicted_snr: pair count must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("predicted_snr: eta must lie in (0, 1]");
  if (!(m >= 0.0) || !(p_n >= 0.0)) throw DomainError("predicted_snr: m and p_n must be >= 0");
  if (m + p_n == 0.0) throw DomainError("predicted_snr: m + p_n must be > 0");
  return std::sqrt(cells * pairs) * eta * m / (m + p_n);
}

inline double predicted_snr(const SimConfig& c, double pairs = 1.0) {
  return predicted_snr(c.cell_count(), pairs, c.eta(), c.mean_photons_per_pixel, c.noise_per_pixel);
}

/// Smallest cell count C with C*K > (5/eta)^2, i.e. the peak clears five
/// standard deviations of Gaussian accidental fluctuations (m >> p_n).
inline std::int64_t min_cells_for_unambiguity(double eta, std::int64_t pairs) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("min_cells_for_unambiguity: eta must lie in (0, 1]");
  if (pairs < 1) throw DomainError("min_cells_for_unambiguity: pair count must be >= 1");
  const double ratio = 5.0 / eta;
  const double bound = ratio * ratio;
  return static_cast<std::int64_t>(std::floor(bound / static_cast<double>(pairs))) + 1;
}

/// Inverse of predicted_snr for the noise level: the p_n that yields `snr`.
inline double noise_for_snr(double snr, double cells, double pairs, double eta, double m) {
  if (!(snr > 0.0)) throw DomainError("noise_for_snr: snr must be > 0");
  return std::sqrt(cells * pairs) * eta * m / snr - m;
}

}  // namespace twinepr
