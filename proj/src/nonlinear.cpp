#include "lplab/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "lplab/error.hpp"
#include "lplab/spectral.hpp"
#include "product.hpp"

namespace lplab {

namespace {

// sum_i a_i d_i b_c for every component c of b; no precondition checks.
// Samples of a are cached per fine-grid size, so one velocity can transport
// many fields.
class Transporter {
 public:
  explicit Transporter(const VectorField& a) : a_(to_spectral(a)) {
    if (a_.components() != a_.grid().dim()) throw DomainError("transport velocity must have dim components");
    bw_a_ = detail::bandwidth(a_.grid(), a_.spectral());
    zero_ = detail::all_zero(a_.spectral());
  }

  VectorField apply(const VectorField& b) {
    require_same_grid(a_, b, "transport");
    const Grid& g = a_.grid();
    const int dim = g.dim();
    if (zero_) return VectorField::zeros(g, b.components());
    const VectorField grad = gradient(b);
    const int bw_b = detail::bandwidth(g, grad.spectral());
    const std::size_t n = g.spectral_count();
    std::vector<Complex> out(n * b.components());
    const auto& sampled = samples(detail::ProductSum(g, bw_a_, bw_b));
    for (int c = 0; c < b.components(); ++c) {
      detail::ProductSum sum(g, bw_a_, bw_b);
      for (int i = 0; i < dim; ++i) {
        if (sampled[i].empty()) continue;
        auto db = grad.spectral(c * dim + i);
        if (detail::all_zero(db)) continue;
        sum.add_samples(sampled[i], sum.sample(db));
      }
      const auto coeffs = sum.result();
      std::copy(coeffs.begin(), coeffs.end(), out.begin() + n * c);
    }
    return VectorField::from_spectral(g, b.components(), std::move(out));
  }

 private:
  const std::vector<std::vector<double>>& samples(const detail::ProductSum& probe) {
    auto& slot = cache_[probe.fine().size()];
    if (slot.empty()) {
      slot.resize(a_.components());
      for (int i = 0; i < a_.components(); ++i) {
        if (!detail::all_zero(a_.spectral(i))) slot[i] = probe.sample(a_.spectral(i));
      }
    }
    return slot;
  }

  VectorField a_;
  int bw_a_ = 0;
  bool zero_ = false;
  std::map<int, std::vector<std::vector<double>>> cache_;
};

VectorField transport(const VectorField& a, const VectorField& b) { return Transporter(a).apply(b); }

VectorField block(const VectorField& f, int j, const DyadicPartition& part) {
  if (!part.has_block(j)) return VectorField::zeros(f.grid(), f.components());
  return dyadic_block(f, j, part);
}

double degenerate_floor(double a, double b) { return kDegenerateFloor * a * b; }

std::string format(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

VectorField advect(const VectorField& u, const VectorField& v) {
  require_same_grid(u, v, "advect");
  require_solenoidal(u, "advect");
  return remove_mean(transport(u, v));
}

CommutatorField lambda_commutator(const VectorField& u, const VectorField& b, double s) {
  require_same_grid(u, b, "lambda_commutator");
  require_solenoidal(u, "lambda_commutator");
  Transporter along_u(u);
  const VectorField lhs = lambda_s(along_u.apply(b), s);
  const VectorField rhs = remove_mean(along_u.apply(lambda_s(b, s)));
  return {lhs - rhs, s < 1.0};
}

void validate_commutator_exponents(int n, double s, double s1, double s2) {
  const double half = 0.5 * n;
  if (!(s >= 1.0)) throw DomainError("condition violated: s >= 1 (s = " + format(s) + ")");
  if (!(s1 > 0.0 && s2 > 0.0)) throw DomainError("condition violated: s1, s2 > 0");
  if (!(s1 >= 1.0)) throw DomainError("condition violated: 1 <= s1 (s1 = " + format(s1) + ")");
  if (!(s1 < half + 1.0)) {
    throw DomainError("condition violated: s1 < n/2 + 1 (s1 = " + format(s1) + ", n/2 + 1 = " + format(half + 1.0) +
                      ")");
  }
  if (std::abs(s1 + s2 - (s + half + 1.0)) > 1e-12 * (s + half + 1.0)) {
    throw DomainError("condition violated: s1 + s2 = s + n/2 + 1 (s1 + s2 = " + format(s1 + s2) +
                      ", s + n/2 + 1 = " + format(s + half + 1.0) + ")");
  }
}

CommutatorSample commutator_estimate_sample(const VectorField& u, const VectorField& b, double s, double s1,
                                            double s2) {
  validate_commutator_exponents(u.grid().dim(), s, s1, s2);
  CommutatorSample out;
  out.s = s;
  out.s1 = s1;
  out.s2 = s2;
  out.lhs = sobolev_norm(lambda_commutator(u, b, s).field, 0.0);
  out.rhs = sobolev_norm(u, s1) * sobolev_norm(b, s2) + sobolev_norm(u, s2) * sobolev_norm(b, s1);
  out.degenerate = out.rhs == 0.0 || out.rhs < degenerate_floor(sobolev_norm(u, 0.0), sobolev_norm(b, 0.0));
  out.ratio = out.degenerate ? std::numeric_limits<double>::quiet_NaN() : out.lhs / out.rhs;
  return out;
}

CommutatorSample trilinear_pairing(const VectorField& u, double s) {
  require_solenoidal(u, "trilinear_pairing");
  if (!(s >= 1.0)) throw DomainError("trilinear pairing needs s >= 1");
  Transporter along_u(u);
  const VectorField ls_u = lambda_s(u, s);
  const VectorField ls_b = lambda_s(along_u.apply(u), s);
  const VectorField comm = ls_b - remove_mean(along_u.apply(ls_u));
  const double pairing = inner_product(ls_b, ls_u);
  const double reduced = inner_product(comm, ls_u);
  const double norm_u = sobolev_norm(ls_u, 0.0);

  CommutatorSample out;
  out.s = s;
  out.s1 = 0.5 * u.grid().dim();
  out.s2 = s + 1.0;
  out.lhs = std::abs(pairing);
  out.rhs = sobolev_norm(u, s) * sobolev_norm(u, s + 1.0) * sobolev_norm(u, 0.5 * u.grid().dim());
  out.reduction_residual = std::abs(pairing - reduced);
  out.reduction_scale = (sobolev_norm(ls_b, 0.0) + sobolev_norm(comm, 0.0)) * norm_u;
  const double l2 = sobolev_norm(u, 0.0);
  // A pairing at round-off level carries no information about the constant.
  out.degenerate = out.rhs == 0.0 || out.rhs < kDegenerateFloor * l2 * l2 * l2 ||
                   out.lhs <= 1e-12 * out.reduction_scale;
  out.ratio = out.degenerate ? std::numeric_limits<double>::quiet_NaN() : out.lhs / out.rhs;
  return out;
}

VectorField besov_block_commutator(const VectorField& u, int k) {
  require_solenoidal(u, "besov_block_commutator");
  const DyadicPartition part = build_partition(u.grid());
  if (!part.has_block(k)) throw DomainError("block index " + std::to_string(k) + " outside the partition range");
  const VectorField a = dyadic_block(transport(u, u), k, part);
  const VectorField b = transport(low_cutoff(u, k - 1, part), dyadic_block(u, k, part));
  return remove_mean(a - b);
}

std::vector<double> besov_block_commutator_norms(const VectorField& u, const DyadicPartition& part) {
  require_solenoidal(u, "besov_block_commutator_norms");
  const VectorField adv = transport(u, u);
  std::vector<double> out;
  for (int k = part.j_min(); k <= part.j_max(); ++k) {
    const VectorField a = dyadic_block(adv, k, part);
    const VectorField du = dyadic_block(u, k, part);
    if (detail::all_zero(du.spectral())) {
      out.push_back(sobolev_norm(remove_mean(a), 0.0));
      continue;
    }
    const VectorField b = transport(low_cutoff(u, k - 1, part), du);
    out.push_back(sobolev_norm(remove_mean(a - b), 0.0));
  }
  return out;
}

VectorField bony_q_commutator(const VectorField& v, const VectorField& f, int j) {
  require_same_grid(v, f, "bony_q_commutator");
  require_solenoidal(v, "bony_q_commutator");
  const DyadicPartition part = build_partition(v.grid());
  if (!part.has_block(j)) throw DomainError("block index " + std::to_string(j) + " outside the partition range");
  const VectorField a = transport(v, dyadic_block(f, j, part));
  const VectorField b = dyadic_block(transport(v, f), j, part);
  return remove_mean(a - b);
}

std::vector<VectorField> bony_q_commutators(const VectorField& v, const VectorField& f, const DyadicPartition& part) {
  require_same_grid(v, f, "bony_q_commutators");
  require_solenoidal(v, "bony_q_commutators");
  Transporter along_v(v);
  const VectorField whole = along_v.apply(f);
  std::vector<VectorField> out;
  for (int j = part.j_min(); j <= part.j_max(); ++j) {
    out.push_back(remove_mean(along_v.apply(dyadic_block(f, j, part)) - dyadic_block(whole, j, part)));
  }
  return out;
}

FourTerms decompose_t1_t2_t3_t4(const VectorField& u, int k) {
  require_solenoidal(u, "decompose_t1_t2_t3_t4");
  const Grid& g = u.grid();
  const int dim = g.dim();
  const DyadicPartition part = build_partition(g);
  if (!part.has_block(k)) throw DomainError("block index " + std::to_string(k) + " outside the partition range");

  const VectorField low_k = low_cutoff(u, k - 1, part);
  VectorField t1 = VectorField::zeros(g, dim);
  VectorField t2 = VectorField::zeros(g, dim);
  for (int j = part.j_min(); j <= part.j_max(); ++j) {
    const VectorField dj = dyadic_block(u, j, part);
    const VectorField dkdj = dyadic_block(dj, k, part);
    const VectorField low_j = low_cutoff(u, j - 1, part);
    t1 = t1 + transport(low_j - low_k, dkdj);
    t2 = t2 + dyadic_block(transport(low_j, dj), k, part) - transport(low_j, dkdj);
  }

  const VectorField grad = gradient(u);
  std::vector<VectorField> t3_parts;
  std::vector<VectorField> t4_parts;
  for (int l = 0; l < dim; ++l) {
    VectorField t3l = VectorField::zeros(g, 1);
    VectorField t4l = VectorField::zeros(g, 1);
    for (int i = 0; i < dim; ++i) {
      const VectorField ui = component(u, i);
      const VectorField dui = component(grad, l * dim + i);
      t3l = t3l + paraproduct(dui, ui);
      t4l = t4l + remainder(ui, dui);
    }
    t3_parts.push_back(dyadic_block(t3l, k, part));
    t4_parts.push_back(dyadic_block(t4l, k, part));
  }
  return {remove_mean(t1), remove_mean(t2), stack(t3_parts), stack(t4_parts)};
}

VectorField t1_reduced(const VectorField& u, int k) {
  require_solenoidal(u, "t1_reduced");
  const DyadicPartition part = build_partition(u.grid());
  if (!part.has_block(k)) throw DomainError("block index " + std::to_string(k) + " outside the partition range");
  const VectorField dk = dyadic_block(u, k, part);
  const VectorField plus = transport(block(u, k - 1, part), block(dk, k + 1, part));
  const VectorField minus = transport(block(u, k - 2, part), block(dk, k - 1, part));
  return remove_mean(plus - minus);
}

}  // namespace lplab
