#include "lplab/paley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lplab/error.hpp"
#include "lplab/spectral.hpp"
#include "product.hpp"

namespace lplab {

namespace {

double bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// Smooth step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = bump(x);
  return a / (a + bump(1.0 - x));
}

constexpr double kInner = 0.75;
constexpr double kOuter = 4.0 / 3.0;

void require_scalar(const VectorField& f, const char* context) {
  if (f.components() != 1) throw DomainError(std::string(context) + " expects scalar fields");
}

// Total |fhat|^2 (with half-layout weights) per integer |k|^2 shell.
std::vector<double> shell_energy(const VectorField& f) {
  const WaveTables& t = wave_tables(f.grid());
  SpectralData data(f);
  std::vector<double> e(static_cast<std::size_t>(t.max_ksq) + 1, 0.0);
  for (int c = 0; c < f.components(); ++c) {
    auto block = data.component(c);
    for (std::size_t i = 0; i < block.size(); ++i) e[t.ksq[i]] += t.weight[i] * std::norm(block[i]);
  }
  return e;
}

bool block_touches(const std::vector<double>& energy, const DyadicPartition& part, int j) {
  for (std::size_t q = 1; q < energy.size(); ++q) {
    if (energy[q] != 0.0 && part.phi_j(j, std::sqrt(static_cast<double>(q))) != 0.0) return true;
  }
  return false;
}

double lr_sum(const std::vector<double>& terms, double r) {
  if (std::isinf(r)) return terms.empty() ? 0.0 : *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double v : terms) sum += r == 1.0 ? v : std::pow(v, r);
  return r == 1.0 ? sum : std::pow(sum, 1.0 / r);
}

std::vector<double> weighted_blocks(const VectorField& f, const BesovIndex& idx, const DyadicPartition& part) {
  idx.validate();
  std::vector<double> norms = block_norms(f, idx.p, part);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    norms[i] *= std::exp2((part.j_min() + static_cast<int>(i)) * idx.s);
  }
  return norms;
}

}  // namespace

DyadicPartition::DyadicPartition(int j_min, int j_max, double phi_scale)
    : j_min_(j_min), j_max_(j_max), phi_scale_(phi_scale) {
  if (j_max < j_min) throw DomainError("partition range is empty");
}

double DyadicPartition::chi(double rho) { return 1.0 - smooth_step((rho - kInner) / (kOuter - kInner)); }

double DyadicPartition::phi(double rho) const { return phi_scale_ * (chi(0.5 * rho) - chi(rho)); }

double DyadicPartition::phi_j(int j, double rho) const { return phi(std::ldexp(rho, -j)); }

double DyadicPartition::chi_j(int j, double rho) { return chi(std::ldexp(rho, -j)); }

DyadicPartition build_partition(const Grid& grid) {
  const double top = std::sqrt(static_cast<double>(grid.dim())) * grid.size() / 2.0;
  return DyadicPartition(-2, static_cast<int>(std::ceil(std::log2(top))) + 1);
}

void BesovIndex::validate() const {
  if (!(p >= 1.0)) throw DomainError("Besov index needs p >= 1");
  if (!(r >= 1.0)) throw DomainError("Besov index needs r >= 1");
  if (!std::isfinite(s)) throw DomainError("Besov regularity must be finite");
}

VectorField dyadic_block(const VectorField& f, int j) { return dyadic_block(f, j, build_partition(f.grid())); }

VectorField dyadic_block(const VectorField& f, int j, const DyadicPartition& partition) {
  if (!partition.has_block(j)) {
    throw DomainError("block index " + std::to_string(j) + " outside [" + std::to_string(partition.j_min()) + ", " +
                      std::to_string(partition.j_max()) + "]");
  }
  return apply_multiplier(f, [&partition, j](double rho) { return partition.phi_j(j, rho); }, 0.0);
}

VectorField low_cutoff(const VectorField& f, int j) { return low_cutoff(f, j, build_partition(f.grid())); }

VectorField low_cutoff(const VectorField& f, int j, const DyadicPartition& partition) {
  if (!partition.has_cutoff(j)) {
    throw DomainError("cutoff index " + std::to_string(j) + " outside [" + std::to_string(partition.j_min() - 2) +
                      ", " + std::to_string(partition.j_max() + 2) + "]");
  }
  return apply_multiplier(f, [j](double rho) { return DyadicPartition::chi_j(j, rho); }, 0.0);
}

std::vector<double> block_norms(const VectorField& f, double p, const DyadicPartition& part) {
  if (!(p >= 1.0)) throw DomainError("block norms need p >= 1");
  const std::vector<double> energy = shell_energy(f);
  const int count = part.j_max() - part.j_min() + 1;
  std::vector<double> out(count, 0.0);
  for (int i = 0; i < count; ++i) {
    const int j = part.j_min() + i;
    if (!block_touches(energy, part, j)) continue;
    if (p == 2.0) {
      double sum = 0.0;
      for (std::size_t q = 1; q < energy.size(); ++q) {
        if (energy[q] == 0.0) continue;
        const double w = part.phi_j(j, std::sqrt(static_cast<double>(q)));
        sum += w * w * energy[q];
      }
      out[i] = std::sqrt(f.grid().volume() * sum);
    } else if (std::isinf(p)) {
      out[i] = linf_norm_fine(dyadic_block(f, j, part));
    } else {
      out[i] = lp_norm(to_physical(dyadic_block(f, j, part)), p);
    }
  }
  return out;
}

double besov_norm(const VectorField& f, const BesovIndex& idx) {
  return besov_norm(f, idx, build_partition(f.grid()));
}

double besov_norm(const VectorField& f, const BesovIndex& idx, const DyadicPartition& partition) {
  return lr_sum(weighted_blocks(f, idx, partition), idx.r);
}

DSequence d_sequence(const VectorField& f, const BesovIndex& idx) {
  const DyadicPartition part = build_partition(f.grid());
  std::vector<double> terms = weighted_blocks(f, idx, part);
  const double norm = lr_sum(terms, idx.r);
  if (!(norm > 0.0)) throw DomainError("d_sequence needs a field with nonzero Besov norm");
  for (double& v : terms) v /= norm;
  return {part.j_min(), std::move(terms)};
}

namespace {

// sum_j A_j(u) B_j(v) where A_j, B_j are radial symbols indexed by block j.
template <typename LowSymbol, typename HighSymbol>
VectorField block_product_sum(const VectorField& u, const VectorField& v, const DyadicPartition& part,
                              LowSymbol low, HighSymbol high) {
  const Grid& g = u.grid();
  SpectralData du(u);
  SpectralData dv(v);
  detail::ProductSum sum(g, detail::bandwidth(g, du.all()), detail::bandwidth(g, dv.all()));
  for (int j = part.j_min(); j <= part.j_max(); ++j) {
    const VectorField a = apply_multiplier(u, [&](double rho) { return low(j, rho); }, 0.0);
    if (detail::all_zero(a.spectral())) continue;
    const VectorField b = apply_multiplier(v, [&](double rho) { return high(j, rho); }, 0.0);
    sum.add(a.spectral(), b.spectral());
  }
  return VectorField::from_spectral(g, 1, sum.result());
}

}  // namespace

VectorField paraproduct(const VectorField& u, const VectorField& v) {
  require_same_grid(u, v, "paraproduct");
  require_scalar(u, "paraproduct");
  require_scalar(v, "paraproduct");
  const DyadicPartition part = build_partition(u.grid());
  return block_product_sum(
      u, v, part, [](int j, double rho) { return DyadicPartition::chi_j(j - 1, rho); },
      [&part](int j, double rho) { return part.phi_j(j, rho); });
}

VectorField remainder(const VectorField& u, const VectorField& v) {
  require_same_grid(u, v, "remainder");
  require_scalar(u, "remainder");
  require_scalar(v, "remainder");
  const DyadicPartition part = build_partition(u.grid());
  return block_product_sum(
      u, v, part, [&part](int k, double rho) { return part.phi_j(k, rho); },
      [&part](int k, double rho) {
        double w = 0.0;
        for (int j = k - 1; j <= k + 1; ++j) {
          if (part.has_block(j)) w += part.phi_j(j, rho);
        }
        return w;
      });
}

VectorField product(const VectorField& u, const VectorField& v) {
  require_same_grid(u, v, "product");
  require_scalar(u, "product");
  require_scalar(v, "product");
  const Grid& g = u.grid();
  SpectralData du(u);
  SpectralData dv(v);
  detail::ProductSum sum(g, detail::bandwidth(g, du.all()), detail::bandwidth(g, dv.all()));
  sum.add(du.all(), dv.all());
  return VectorField::from_spectral(g, 1, sum.result());
}

double PartitionReport::max_violation() const {
  return std::max({sum_to_one, chi_plus_blocks, almost_orthogonal, chi_disjoint, range, support});
}

PartitionReport check_partition(const DyadicPartition& part, const Grid& grid) {
  const WaveTables& t = wave_tables(grid);
  std::vector<uint8_t> present(static_cast<std::size_t>(t.max_ksq) + 1, 0);
  for (int32_t q : t.ksq) present[q] = 1;

  PartitionReport rep;
  for (std::size_t q = 1; q < present.size(); ++q) {
    if (!present[q]) continue;
    ++rep.radii_checked;
    const double rho = std::sqrt(static_cast<double>(q));
    const double chi0 = DyadicPartition::chi(rho);
    std::vector<double> phis;
    double total = 0.0;
    double upper = chi0;
    for (int j = part.j_min(); j <= part.j_max(); ++j) {
      const double p = part.phi_j(j, rho);
      phis.push_back(p);
      total += p;
      if (j >= 0) upper += p;
      if (j >= 1) rep.chi_disjoint = std::max(rep.chi_disjoint, std::abs(chi0 * p));
      rep.range = std::max({rep.range, -p, p - 1.0});
      const double scaled = std::ldexp(rho, -j);
      if (scaled < 0.75 || scaled > 8.0 / 3.0) rep.support = std::max(rep.support, std::abs(p));
    }
    rep.range = std::max({rep.range, -chi0, chi0 - 1.0});
    rep.sum_to_one = std::max(rep.sum_to_one, std::abs(total - 1.0));
    rep.chi_plus_blocks = std::max(rep.chi_plus_blocks, std::abs(upper - 1.0));
    for (std::size_t a = 0; a < phis.size(); ++a) {
      for (std::size_t b = a + 2; b < phis.size(); ++b) {
        rep.almost_orthogonal = std::max(rep.almost_orthogonal, std::abs(phis[a] * phis[b]));
      }
    }
  }
  return rep;
}

}  // namespace lplab
