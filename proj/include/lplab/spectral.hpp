#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lplab/field.hpp"

namespace lplab {

/// Forward transform; the result caches both representations. Fields that
/// already carry coefficients are returned unchanged.
VectorField to_spectral(const VectorField& f);
/// Inverse transform; the result caches both representations.
VectorField to_physical(const VectorField& f);

/// A radial Fourier symbol sigma(|k|).
using RadialSymbol = std::function<double(double)>;

/// Scales every coefficient by sigma(|k|); the mean mode is scaled by
/// `sigma_at_zero`, which callers must supply explicitly. Throws DomainError
/// when sigma is not finite at a lattice radius.
VectorField apply_multiplier(const VectorField& f, const RadialSymbol& sigma, double sigma_at_zero);

/// Lambda^s = multiplier |k|^s (so Lambda^2 = -Laplacian). The mean mode is
/// dropped. Throws DomainError for s < 0 on a field with a nonzero mean.
VectorField lambda_s(const VectorField& f, double s);

/// Homogeneous Sobolev seminorm, ((2pi)^n sum_{k != 0} |k|^{2s} |fhat|^2)^{1/2}.
double sobolev_norm(const VectorField& f, double s);

/// Trapezoidal L^p norm of the pointwise Euclidean magnitude on the field's
/// own grid; p = infinity gives the maximum. Throws DomainError for p < 1.
double lp_norm(const VectorField& f, double p);

/// L^infinity norm sampled on the grid refined by 2 per axis, which contains
/// every base-grid point (band-limited fields are interpolated exactly).
double linf_norm_fine(const VectorField& f);

/// L^2 inner product summed over components.
double inner_product(const VectorField& f, const VectorField& g);

/// Component-major gradient: component c*dim + i holds d_i f_c.
VectorField gradient(const VectorField& f);
/// Divergence of a dim-component field.
VectorField divergence(const VectorField& f);
/// Vector Laplacian (multiplier -|k|^2).
VectorField laplacian(const VectorField& f);
/// Projection onto divergence-free fields, fhat - k (k.fhat)/|k|^2.
VectorField leray_project(const VectorField& f);

/// Zeroes every mode with some |k_j| > size/3.
VectorField dealias(const VectorField& f);
VectorField remove_mean(const VectorField& f);
bool is_zero_mean(const VectorField& f, double rel_tol = 1e-12);
/// ||div u||_{L2} / ||grad u||_{L2}; zero for the zero field.
double divergence_ratio(const VectorField& u);
/// Throws PreconditionError unless divergence_ratio(u) <= 1e-10.
void require_solenoidal(const VectorField& u, const char* context);

/// Largest |k_j| over nonzero coefficients (0 for the zero field).
int max_wavenumber(const VectorField& f);

VectorField component(const VectorField& f, int c);
/// Concatenates the components of several fields on one grid.
VectorField stack(std::span<const VectorField> parts);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double c, const VectorField& a);

/// Throws DomainError unless the grids match.
void require_same_grid(const VectorField& a, const VectorField& b, const char* context);

/// Evaluates band-limited data on a finer (or coarser) cube and maps
/// samples back to base-grid coefficients, truncating to |k_j| < size/2.
/// Products of two inputs with per-axis bandwidths a and b are exact on any
/// cube of at least 2(a+b)+1 points.
class FineGrid {
 public:
  FineGrid(const Grid& base, int fine_size);

  /// Smallest 2^p or 3*2^p cube resolving the product of bandwidths a and b,
  /// capped at 3/2 of the base size.
  static FineGrid for_product(const Grid& base, int bandwidth_a, int bandwidth_b);
  /// The cube refined by 2 per axis.
  static FineGrid refined(const Grid& base);

  int size() const { return fine_size_; }
  std::size_t count() const { return count_; }
  const Grid& base() const { return base_; }

  std::vector<double> sample(std::span<const Complex> coeffs) const;
  /// Coefficients of `samples`, truncated to the base grid.
  std::vector<Complex> analyse(std::span<const double> samples) const;

 private:
  Grid base_;
  int fine_size_;
  std::size_t count_;
  std::size_t fine_spectral_count_;
};

/// Spectral view that borrows cached coefficients or owns a transform.
class SpectralData {
 public:
  explicit SpectralData(const VectorField& f);
  std::span<const Complex> all() const { return data_; }
  std::span<const Complex> component(int c) const;

 private:
  std::vector<Complex> owned_;
  std::span<const Complex> data_;
  std::size_t stride_;
};

}  // namespace lplab
