#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "matrix.hpp"

namespace twinepr::fft {

/// FFTW's planner is not thread safe; execution of a finished plan on its
/// own buffers is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

template <typename T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};
template <typename T>
using Buffer = std::unique_ptr<T[], FftwDeleter<T>>;

/// Real 2-D transform pair of a fixed shape, with owned aligned buffers.
class RealTransform2D {
 public:
  RealTransform2D(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), half_(cols / 2 + 1),
        real_(static_cast<double*>(fftw_malloc(sizeof(double) * rows * cols))),
        spec_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * rows * half_))) {
    std::lock_guard lock(planner_mutex());
    forward_.reset(fftw_plan_dft_r2c_2d(static_cast<int>(rows), static_cast<int>(cols), real_.get(), spec_.get(),
                                        FFTW_ESTIMATE));
    inverse_.reset(fftw_plan_dft_c2r_2d(static_cast<int>(rows), static_cast<int>(cols), spec_.get(), real_.get(),
                                        FFTW_ESTIMATE));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t spectrum_size() const { return rows_ * half_; }

  /// Zero-padded forward transform of `m` placed at the origin.
  std::vector<std::complex<double>> forward(const RealMatrix& m) {
    std::fill(real_.get(), real_.get() + rows_ * cols_, 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) real_[r * cols_ + c] = m(r, c);
    fftw_execute(forward_.get());
    std::vector<std::complex<double>> out(spectrum_size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
    return out;
  }

  /// Unnormalized inverse (FFTW convention: result scaled by rows*cols).
  RealMatrix inverse(const std::vector<std::complex<double>>& s) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      spec_[k][0] = s[k].real();
      spec_[k][1] = s[k].imag();
    }
    fftw_execute(inverse_.get());
    RealMatrix out(rows_, cols_);
    auto d = out.data();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = real_[k];
    return out;
  }

  /// Periodic cross-correlation sum_x a(x) b(x + shift) for every shift
  /// (indices taken modulo the transform shape), given the two spectra.
  RealMatrix correlate(const std::vector<std::complex<double>>& fa, const std::vector<std::complex<double>>& fb) {
    std::vector<std::complex<double>> prod(fa.size());
    for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = std::conj(fa[k]) * fb[k];
    RealMatrix out = inverse(prod);
    const double norm = 1.0 / static_cast<double>(rows_ * cols_);
    for (double& v : out.data()) v *= norm;
    return out;
  }

 private:
  std::size_t rows_, cols_, half_;
  Buffer<double> real_;
  Buffer<fftw_complex> spec_;
  Plan forward_;
  Plan inverse_;
};

}  // namespace twinepr::fft
