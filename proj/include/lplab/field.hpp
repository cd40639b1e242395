#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "lplab/grid.hpp"

namespace lplab {

using Complex = std::complex<double>;

/// An m-component real field on a periodic grid.
///
/// Holds spectral coefficients, physical samples, or both. Coefficients are
/// normalised so that f(x) = sum_k fhat(k) exp(i k.x); the single mode cos(x)
/// therefore has fhat(+-e1) = 1/2. Instances are immutable; conversions live
/// in spectral.hpp and return new fields with both representations cached.
class VectorField {
 public:
  enum class Representation { physical, spectral, both };

  /// Throws InvalidDataError on size mismatch or non-finite coefficients.
  static VectorField from_spectral(const Grid& grid, int components, std::vector<Complex> coeffs);
  /// Throws InvalidDataError on size mismatch or non-finite samples.
  static VectorField from_physical(const Grid& grid, int components, std::vector<double> samples);
  /// Both representations, assumed consistent (no check).
  static VectorField from_both(const Grid& grid, int components, std::vector<Complex> coeffs,
                               std::vector<double> samples);
  static VectorField zeros(const Grid& grid, int components);

  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  Representation representation() const;
  bool has_spectral() const { return !spectral_.empty(); }
  bool has_physical() const { return !physical_.empty(); }

  /// Component-major coefficient block. Throws std::logic_error when the
  /// spectral representation is absent.
  std::span<const Complex> spectral() const;
  std::span<const Complex> spectral(int component) const;
  std::span<const double> physical() const;
  std::span<const double> physical(int component) const;

  /// Full-lattice coefficient fhat_c(k), resolving Hermitian symmetry.
  Complex coefficient(int component, std::array<int, 3> k) const;

 private:
  VectorField(const Grid& grid, int components) : grid_(grid), components_(components) {}

  Grid grid_;
  int components_;
  std::vector<Complex> spectral_;
  std::vector<double> physical_;
};

}  // namespace lplab
