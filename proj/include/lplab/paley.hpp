#pragma once

#include <vector>

#include "lplab/field.hpp"

namespace lplab {

/// Radial partition of unity. chi is a smooth cutoff equal to 1 on
/// [0, 3/4] and 0 on [4/3, inf); phi(rho) = chi(rho/2) - chi(rho).
class DyadicPartition {
 public:
  /// `phi_scale` multiplies every block profile; values other than 1 exist
  /// only to inject defects into check_partition.
  DyadicPartition(int j_min, int j_max, double phi_scale = 1.0);

  static double chi(double rho);
  double phi(double rho) const;
  /// phi(2^-j rho), the symbol of the block Delta_j.
  double phi_j(int j, double rho) const;
  /// chi(2^-j rho), the symbol of the low cutoff S_j.
  static double chi_j(int j, double rho);

  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  double phi_scale() const { return phi_scale_; }
  bool has_block(int j) const { return j >= j_min_ && j <= j_max_; }
  /// Cutoffs are accepted two steps beyond the block range on each side.
  bool has_cutoff(int j) const { return j >= j_min_ - 2 && j <= j_max_ + 2; }

 private:
  int j_min_;
  int j_max_;
  double phi_scale_;
};

/// j_min = -2, j_max = ceil(log2(sqrt(n) N / 2)) + 1.
DyadicPartition build_partition(const Grid& grid);

struct BesovIndex {
  double s = 0.0;
  double p = 2.0;
  double r = 1.0;
  /// Throws DomainError unless p, r >= 1 (infinity allowed).
  void validate() const;
};

/// Delta_j f. Throws DomainError for j outside the partition range.
VectorField dyadic_block(const VectorField& f, int j);
VectorField dyadic_block(const VectorField& f, int j, const DyadicPartition& partition);
/// S_j f (mean mode dropped).
VectorField low_cutoff(const VectorField& f, int j);
VectorField low_cutoff(const VectorField& f, int j, const DyadicPartition& partition);

/// Per-block norms ||Delta_j f||_{L^p} for j = j_min..j_max. p = 2 uses
/// Parseval, p = infinity samples on the doubled grid, other p use
/// base-grid quadrature.
std::vector<double> block_norms(const VectorField& f, double p, const DyadicPartition& partition);

double besov_norm(const VectorField& f, const BesovIndex& idx);
double besov_norm(const VectorField& f, const BesovIndex& idx, const DyadicPartition& partition);

struct DSequence {
  int j_min = 0;
  std::vector<double> values;
};
/// d_j = 2^{js} ||Delta_j f||_{L^p} / ||f||_{B^s_{p,r}}. Throws DomainError
/// when the norm vanishes.
DSequence d_sequence(const VectorField& f, const BesovIndex& idx);

/// T_u v = sum_j S_{j-1}u Delta_j v for scalar u, v.
VectorField paraproduct(const VectorField& u, const VectorField& v);
/// R(u, v) = sum_{|k-j| <= 1} Delta_k u Delta_j v for scalar u, v.
VectorField remainder(const VectorField& u, const VectorField& v);
/// Pointwise product of scalar fields, exact up to truncation at |k_j| < N/2.
VectorField product(const VectorField& u, const VectorField& v);

struct PartitionReport {
  double sum_to_one = 0.0;       // max |sum_j phi_j - 1| over nonzero radii
  double chi_plus_blocks = 0.0;  // max |chi + sum_{j>=0} phi_j - 1|
  double almost_orthogonal = 0.0;  // max |phi_j phi_j'| with |j - j'| >= 2
  double chi_disjoint = 0.0;       // max |chi phi_j| with j >= 1
  double range = 0.0;              // max violation of 0 <= chi, phi <= 1
  double support = 0.0;            // max |phi| outside [3/4, 8/3]
  int radii_checked = 0;
  double max_violation() const;
};

/// Evaluates the partition properties at every nonzero lattice radius.
PartitionReport check_partition(const DyadicPartition& partition, const Grid& grid);

}  // namespace lplab
