#pragma once

#include <span>

#include "lplab/field.hpp"

namespace lplab::detail {

/// Real-to-complex transform pair on a dim-dimensional cube of `size` points
/// per axis (any size FFTW accepts). Plans are built once under a global lock
/// with FFTW_ESTIMATE so results are reproducible run to run; execution uses
/// per-thread scratch and is safe to call concurrently.
class FftPlan {
 public:
  static const FftPlan& get(int dim, int size);

  int dim() const { return dim_; }
  int size() const { return size_; }
  std::size_t physical_count() const { return physical_count_; }
  std::size_t spectral_count() const { return spectral_count_; }

  /// Coefficients normalised by 1/size^dim.
  void forward(std::span<const double> in, std::span<Complex> out) const;
  /// Unnormalised synthesis sum_k c_k exp(i k.x).
  void inverse(std::span<const Complex> in, std::span<double> out) const;

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan();

 private:
  FftPlan(int dim, int size);

  int dim_;
  int size_;
  std::size_t physical_count_;
  std::size_t spectral_count_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace lplab::detail
