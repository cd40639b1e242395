#pragma once

#include <span>
#include <vector>

#include "lplab/spectral.hpp"

namespace lplab::detail {

/// Largest |k_j| over exactly nonzero coefficients; coeffs is one component
/// block or several stacked ones.
int bandwidth(const Grid& grid, std::span<const Complex> coeffs);
bool all_zero(std::span<const Complex> coeffs);

/// Accumulates sums of pointwise products on a cube large enough that every
/// product of inputs with the given bandwidths is resolved, then maps the
/// sum back to base-grid coefficients (|k_j| < N/2).
class ProductSum {
 public:
  ProductSum(const Grid& grid, int bandwidth_a, int bandwidth_b);

  std::vector<double> sample(std::span<const Complex> coeffs) const { return fine_.sample(coeffs); }
  /// Adds scale * a * b; identically zero inputs are skipped.
  void add(std::span<const Complex> a, std::span<const Complex> b, double scale = 1.0);
  void add_samples(std::span<const double> a, std::span<const double> b, double scale = 1.0);
  std::vector<Complex> result() const;
  const FineGrid& fine() const { return fine_; }

 private:
  FineGrid fine_;
  std::vector<double> sum_;
  bool touched_ = false;
};

}  // namespace lplab::detail
