#include "product.hpp"

#include <algorithm>
#include <cstdlib>

namespace lplab::detail {

int bandwidth(const Grid& grid, std::span<const Complex> coeffs) {
  // coeffs may hold several components back to back.
  const WaveTables& t = wave_tables(grid);
  const std::size_t n = grid.spectral_count();
  int best = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == Complex(0.0, 0.0)) continue;
    for (int d = 0; d < grid.dim(); ++d) best = std::max(best, std::abs(static_cast<int>(t.k[i % n][d])));
  }
  return best;
}

bool all_zero(std::span<const Complex> coeffs) {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Complex& c) { return c == Complex(0.0, 0.0); });
}

ProductSum::ProductSum(const Grid& grid, int bandwidth_a, int bandwidth_b)
    : fine_(FineGrid::for_product(grid, bandwidth_a, bandwidth_b)), sum_(fine_.count(), 0.0) {}

void ProductSum::add(std::span<const Complex> a, std::span<const Complex> b, double scale) {
  if (all_zero(a) || all_zero(b)) return;
  const auto sa = fine_.sample(a);
  const auto sb = fine_.sample(b);
  add_samples(sa, sb, scale);
}

void ProductSum::add_samples(std::span<const double> a, std::span<const double> b, double scale) {
  touched_ = true;
  for (std::size_t x = 0; x < sum_.size(); ++x) sum_[x] += scale * a[x] * b[x];
}

std::vector<Complex> ProductSum::result() const {
  if (!touched_) return std::vector<Complex>(fine_.base().spectral_count());
  return fine_.analyse(sum_);
}

}  // namespace lplab::detail
