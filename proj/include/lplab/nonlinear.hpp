#pragma once

#include <cstdint>
#include <vector>

#include "lplab/field.hpp"
#include "lplab/paley.hpp"

namespace lplab {

/// (u.grad) v for a solenoidal velocity u and any field v on the same grid.
/// Products are exact up to truncation; the mean mode is removed. Throws
/// PreconditionError when u is not divergence-free.
VectorField advect(const VectorField& u, const VectorField& v);

struct CommutatorField {
  VectorField field;
  /// Set for s < 1, where no estimate is claimed.
  bool outside_hypotheses = false;
};

/// Lambda^s[(u.grad)B] - (u.grad)(Lambda^s B).
CommutatorField lambda_commutator(const VectorField& u, const VectorField& b, double s);

struct CommutatorSample {
  std::uint64_t seed = 0;
  double s = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs, or NaN for degenerate samples.
  double ratio = 0.0;
  bool degenerate = false;
  /// Trilinear samples only: |(Lambda^s B(u,u), Lambda^s u) - (commutator, Lambda^s u)|.
  double reduction_residual = 0.0;
  double reduction_scale = 0.0;
};

/// Relative floor below which a right-hand side counts as degenerate.
inline constexpr double kDegenerateFloor = 1e-14;

/// Throws DomainError naming the first violated condition among s >= 1,
/// s1, s2 > 0, 1 <= s1, s1 < n/2 + 1 and s1 + s2 = s + n/2 + 1.
void validate_commutator_exponents(int n, double s, double s1, double s2);

/// Both sides of the Lambda^s commutator estimate:
/// lhs = ||lambda_commutator||, rhs = |u|_{s1}|B|_{s2} + |u|_{s2}|B|_{s1}.
CommutatorSample commutator_estimate_sample(const VectorField& u, const VectorField& b, double s, double s1,
                                            double s2);

/// lhs = |(Lambda^s B(u,u), Lambda^s u)|, rhs = |u|_{s} |u|_{s+1} |u|_{n/2}.
/// Also records the residual of the reduction to the commutator pairing.
CommutatorSample trilinear_pairing(const VectorField& u, double s);

/// Delta_k((u.grad)u) - sum_i S_{k-1}u_i d_i Delta_k u.
VectorField besov_block_commutator(const VectorField& u, int k);

/// L2 norms of besov_block_commutator for every k in the partition range,
/// reusing the advection term.
std::vector<double> besov_block_commutator_norms(const VectorField& u, const DyadicPartition& partition);

/// Q_j f = (v.grad)(Delta_j f) - Delta_j((v.grad) f).
VectorField bony_q_commutator(const VectorField& v, const VectorField& f, int j);

/// Q_j f for every j in the partition range, sharing the transport of f.
std::vector<VectorField> bony_q_commutators(const VectorField& v, const VectorField& f, const DyadicPartition& partition);

struct FourTerms {
  VectorField t1;
  VectorField t2;
  VectorField t3;
  VectorField t4;
};

/// Splits besov_block_commutator(u, k) into
///   t1 = sum_{i,j} (S_{j-1}u_i - S_{k-1}u_i) d_i Delta_k Delta_j u
///   t2 = sum_{i,j} [Delta_k, S_{j-1}u_i d_i] Delta_j u
///   t3 = sum_i Delta_k T_{d_i u} u_i
///   t4 = sum_i Delta_k R(u_i, d_i u)
FourTerms decompose_t1_t2_t3_t4(const VectorField& u, int k);

/// Two-term form of t1: Delta_{k-1}u_i d_i Delta_k Delta_{k+1} u
/// - Delta_{k-2}u_i d_i Delta_k Delta_{k-1} u.
VectorField t1_reduced(const VectorField& u, int k);

}  // namespace lplab
