#pragma once

// Normalized cross-correlation of twin fluctuation images, coherence-cell
// binning, quantum-peak detection and the decorrelated control.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "matrix.hpp"
#include "profile_fit.hpp"
#include "stats.hpp"
#include "twin_sim.hpp"

namespace twinepr {

/// How a shift treats pixels that leave the frame.
///  - Circular: periodic shift; every shift sees the whole frame, so the
///    normalization is the same at all shifts.
///  - Overlap: only pixels present in both frames at that shift enter the
///    Pearson coefficient.
enum class Boundary { Circular, Overlap };

inline std::string_view boundary_name(Boundary b) { return b == Boundary::Circular ? "circular" : "overlap"; }

/// Pearson correlation for shifts (dy, dx) in [-S_y, S_y] x [-S_x, S_x],
/// S = extent / 2 - 1. values(S_y + dy, S_x + dx) correlates s(x) with
/// i(x + shift), i being the idler after the optional point reflection.
struct CorrelationMap {
  RealMatrix values;
  int max_shift_y = 0;
  int max_shift_x = 0;
  bool flipped_idler = false;
  Boundary boundary = Boundary::Circular;

  double at(int dy, int dx) const {
    return values(static_cast<std::size_t>(max_shift_y + dy), static_cast<std::size_t>(max_shift_x + dx));
  }
};

inline int max_shift_for(std::size_t extent) { return std::max(0, static_cast<int>(extent / 2) - 1); }

namespace detail {

inline double mean_of(const RealMatrix& m) { return twinepr::mean(m.data()); }

inline RealMatrix centered(const RealMatrix& m) {
  const double mu = mean_of(m);
  RealMatrix out = m;
  for (double& v : out.data()) v -= mu;
  return out;
}

inline std::size_t wrap(int v, std::size_t n) {
  const int ni = static_cast<int>(n);
  return static_cast<std::size_t>(((v % ni) + ni) % ni);
}

}  // namespace detail

inline CorrelationMap cross_correlate(const RealMatrix& signal, const RealMatrix& idler, bool flip_idler,
                                      Boundary boundary = Boundary::Circular) {
  if (!signal.same_shape(idler))
    throw DimensionMismatch("cross_correlate: signal " + std::to_string(signal.rows()) + "x" +
                            std::to_string(signal.cols()) + " vs idler " + std::to_string(idler.rows()) + "x" +
                            std::to_string(idler.cols()));
  if (signal.empty()) throw DimensionMismatch("cross_correlate: empty input");

  const std::size_t rows = signal.rows(), cols = signal.cols();
  CorrelationMap map;
  map.max_shift_y = max_shift_for(rows);
  map.max_shift_x = max_shift_for(cols);
  map.flipped_idler = flip_idler;
  map.boundary = boundary;
  map.values = RealMatrix(static_cast<std::size_t>(2 * map.max_shift_y + 1),
                          static_cast<std::size_t>(2 * map.max_shift_x + 1));

  // Pearson is invariant to offsets; centering first keeps the sums small.
  const RealMatrix a = detail::centered(signal);
  const RealMatrix b = detail::centered(flip_idler ? flip_both(idler) : idler);

  if (boundary == Boundary::Circular) {
    fft::RealTransform2D t(rows, cols);
    const RealMatrix sab = t.correlate(t.forward(a), t.forward(b));
    double saa = 0.0, sbb = 0.0;
    for (double v : a.data()) saa += v * v;
    for (double v : b.data()) sbb += v * v;
    const double denom = std::sqrt(saa * sbb);
    for (int dy = -map.max_shift_y; dy <= map.max_shift_y; ++dy)
      for (int dx = -map.max_shift_x; dx <= map.max_shift_x; ++dx) {
        const double v = denom > 0.0 ? sab(detail::wrap(dy, rows), detail::wrap(dx, cols)) / denom : 0.0;
        map.values(static_cast<std::size_t>(map.max_shift_y + dy), static_cast<std::size_t>(map.max_shift_x + dx)) =
            std::clamp(v, -1.0, 1.0);
      }
    return map;
  }

  // Linear shifts: zero padding to twice the extent removes wraparound.
  fft::RealTransform2D t(2 * rows, 2 * cols);
  RealMatrix ones(rows, cols, 1.0), a2 = a, b2 = b;
  for (double& v : a2.data()) v *= v;
  for (double& v : b2.data()) v *= v;
  const auto f_one = t.forward(ones);
  const auto f_a = t.forward(a);
  const auto f_b = t.forward(b);
  const RealMatrix n = t.correlate(f_one, f_one);
  const RealMatrix sa = t.correlate(f_a, f_one);
  const RealMatrix sb = t.correlate(f_one, f_b);
  const RealMatrix saa = t.correlate(t.forward(a2), f_one);
  const RealMatrix sbb = t.correlate(f_one, t.forward(b2));
  const RealMatrix sab = t.correlate(f_a, f_b);
  for (int dy = -map.max_shift_y; dy <= map.max_shift_y; ++dy)
    for (int dx = -map.max_shift_x; dx <= map.max_shift_x; ++dx) {
      const std::size_t r = detail::wrap(dy, 2 * rows), c = detail::wrap(dx, 2 * cols);
      const double count = std::round(n(r, c));
      const double cov = sab(r, c) - sa(r, c) * sb(r, c) / count;
      const double va = saa(r, c) - sa(r, c) * sa(r, c) / count;
      const double vb = sbb(r, c) - sb(r, c) * sb(r, c) / count;
      const double denom = std::sqrt(std::max(va, 0.0) * std::max(vb, 0.0));
      map.values(static_cast<std::size_t>(map.max_shift_y + dy), static_cast<std::size_t>(map.max_shift_x + dx)) =
          denom > 0.0 ? std::clamp(cov / denom, -1.0, 1.0) : 0.0;
    }
  return map;
}

inline CorrelationMap cross_correlate(const FluctuationImage& signal, const FluctuationImage& idler, bool flip_idler,
                                      Boundary boundary = Boundary::Circular) {
  return cross_correlate(signal.values, idler.values, flip_idler, boundary);
}

/// Superpixel grid over shifts. center_row/center_col index the block that
/// holds the zero shift at its center.
struct BinnedMap {
  RealMatrix values;
  int bin_size = 1;
  int center_row = 0;
  int center_col = 0;
};

namespace detail {

struct BlockAxis {
  int lo;        // lowest shift covered by the central block
  int hi;        // highest shift covered by the central block
  int below;     // full blocks on the negative side
  int above;     // full blocks on the positive side
};

inline BlockAxis block_axis(int max_shift, int bin) {
  BlockAxis a{};
  a.lo = -(bin / 2);
  a.hi = a.lo + bin - 1;
  a.below = std::max(0, (max_shift + a.lo) / bin);
  a.above = std::max(0, (max_shift - a.hi) / bin);
  return a;
}

}  // namespace detail

/// Non-overlapping bin x bin block sums, grid anchored so the zero shift sits
/// in the middle of a block; partial blocks at the edges are dropped.
inline BinnedMap bin_map(const CorrelationMap& map, int bin_size) {
  if (bin_size < 1) throw DomainError("bin_map: bin_size must be >= 1");
  const auto ay = detail::block_axis(map.max_shift_y, bin_size);
  const auto ax = detail::block_axis(map.max_shift_x, bin_size);
  if (ay.hi > map.max_shift_y || ax.hi > map.max_shift_x)
    throw DomainError("bin_map: bin_size larger than the shift range");
  BinnedMap out;
  out.bin_size = bin_size;
  out.center_row = ay.below;
  out.center_col = ax.below;
  const int nr = ay.below + 1 + ay.above, nc = ax.below + 1 + ax.above;
  out.values = RealMatrix(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc));
  for (int br = 0; br < nr; ++br)
    for (int bc = 0; bc < nc; ++bc) {
      const int y0 = ay.lo + (br - out.center_row) * bin_size;
      const int x0 = ax.lo + (bc - out.center_col) * bin_size;
      double s = 0.0;
      for (int dy = y0; dy < y0 + bin_size; ++dy)
        for (int dx = x0; dx < x0 + bin_size; ++dx) s += map.at(dy, dx);
      out.values(static_cast<std::size_t>(br), static_cast<std::size_t>(bc)) = s;
    }
  return out;
}

struct PeakStats {
  int block_row = 0;
  int block_col = 0;
  int shift_y = 0;  // shift at the center of the peak block
  int shift_x = 0;
  double value = 0.0;
  double snr = 0.0;  // value / std of all other blocks
  bool infinite_snr = false;
  bool is_expected_position = false;
};

/// Global maximum block and its SNR against the spread of the remaining
/// blocks. Ties go to the block nearest the expected (zero-shift) block, then
/// to the lowest (row, col).
inline PeakStats detect_peak(const BinnedMap& binned) {
  const auto& v = binned.values;
  if (v.rows() < 3 || v.cols() < 3) throw DomainError("detect_peak: need at least 3x3 blocks");
  PeakStats best;
  double best_value = -std::numeric_limits<double>::infinity();
  long best_dist = std::numeric_limits<long>::max();
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c) {
      const long dr = static_cast<long>(r) - binned.center_row, dc = static_cast<long>(c) - binned.center_col;
      const long dist = dr * dr + dc * dc;
      if (v(r, c) > best_value || (v(r, c) == best_value && dist < best_dist)) {
        best_value = v(r, c);
        best_dist = dist;
        best.block_row = static_cast<int>(r);
        best.block_col = static_cast<int>(c);
      }
    }
  best.value = best_value;
  best.shift_y = (best.block_row - binned.center_row) * binned.bin_size;
  best.shift_x = (best.block_col - binned.center_col) * binned.bin_size;
  best.is_expected_position = best.block_row == binned.center_row && best.block_col == binned.center_col;

  std::vector<double> rest;
  rest.reserve(v.size() - 1);
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c)
      if (static_cast<int>(r) != best.block_row || static_cast<int>(c) != best.block_col) rest.push_back(v(r, c));
  const double sd = stddev(rest);
  if (sd > 0.0) {
    best.snr = std::max(0.0, best.value / sd);
  } else {
    best.snr = std::numeric_limits<double>::infinity();
    best.infinite_snr = true;
  }
  return best;
}

/// Sum of map values over the cell x cell window centered on the zero shift,
/// anchored like bin_map.
inline double degree_of_correlation(const CorrelationMap& map, int cell) {
  if (cell < 1) throw DomainError("degree_of_correlation: cell must be >= 1");
  const int lo = -(cell / 2), hi = lo + cell - 1;
  if (hi > map.max_shift_y || hi > map.max_shift_x || -lo > map.max_shift_y || -lo > map.max_shift_x)
    throw DomainError("degree_of_correlation: cell larger than the shift range");
  double s = 0.0;
  for (int dy = lo; dy <= hi; ++dy)
    for (int dx = lo; dx <= hi; ++dx) s += map.at(dy, dx);
  return s;
}

/// Fraction of peaks found in the expected block.
inline double success_rate(std::span<const PeakStats> peaks) {
  if (peaks.empty()) throw InsufficientSamples("success_rate: no pairs");
  std::size_t hits = 0;
  for (const auto& p : peaks) hits += p.is_expected_position;
  return static_cast<double>(hits) / static_cast<double>(peaks.size());
}

/// Control pairing: signal of frame i with idler of frame (i + 1) mod K.
inline std::vector<ImagePair> decorrelated_pairing(std::span<const ImagePair> ensemble) {
  if (ensemble.size() < 2) throw InsufficientSamples("decorrelated pairing needs at least 2 frames");
  std::vector<ImagePair> out;
  out.reserve(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& next = ensemble[(i + 1) % ensemble.size()];
    out.push_back({ensemble[i].signal, next.idler, ensemble[i].plane, ensemble[i].frame_index,
                   ensemble[i].config_digest});
  }
  return out;
}

}  // namespace twinepr
