#include "lplab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "lplab/error.hpp"

namespace lplab {

namespace {

constexpr Complex kI{0.0, 1.0};

// Derivative wavenumber: the Nyquist component is dropped so odd-order
// derivatives of real fields stay real.
inline int deriv_k(int k, int size) { return std::abs(k) == size / 2 ? 0 : k; }

std::vector<Complex> spectral_copy(const VectorField& f) {
  SpectralData data(f);
  return {data.all().begin(), data.all().end()};
}

}  // namespace

SpectralData::SpectralData(const VectorField& f) : stride_(f.grid().spectral_count()) {
  if (f.has_spectral()) {
    data_ = f.spectral();
  } else {
    const auto& plan = detail::FftPlan::get(f.grid().dim(), f.grid().size());
    owned_.resize(stride_ * f.components());
    for (int c = 0; c < f.components(); ++c) {
      plan.forward(f.physical(c), std::span<Complex>(owned_).subspan(stride_ * c, stride_));
    }
    data_ = owned_;
  }
}

std::span<const Complex> SpectralData::component(int c) const { return data_.subspan(stride_ * c, stride_); }

VectorField to_spectral(const VectorField& f) {
  if (f.has_spectral()) return f;
  std::vector<Complex> coeffs = spectral_copy(f);
  std::vector<double> samples(f.physical().begin(), f.physical().end());
  return VectorField::from_both(f.grid(), f.components(), std::move(coeffs), std::move(samples));
}

VectorField to_physical(const VectorField& f) {
  if (f.has_physical() && f.has_spectral()) return f;
  if (f.has_physical()) return to_spectral(f);
  const Grid& g = f.grid();
  const auto& plan = detail::FftPlan::get(g.dim(), g.size());
  std::vector<double> samples(g.physical_count() * f.components());
  for (int c = 0; c < f.components(); ++c) {
    plan.inverse(f.spectral(c), std::span<double>(samples).subspan(g.physical_count() * c, g.physical_count()));
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw InvalidDataError("non-finite sample produced by inverse transform");
  }
  std::vector<Complex> coeffs(f.spectral().begin(), f.spectral().end());
  return VectorField::from_both(g, f.components(), std::move(coeffs), std::move(samples));
}

VectorField apply_multiplier(const VectorField& f, const RadialSymbol& sigma, double sigma_at_zero) {
  const Grid& g = f.grid();
  const WaveTables& t = wave_tables(g);
  // One symbol evaluation per distinct |k|^2.
  std::vector<double> table(static_cast<std::size_t>(t.max_ksq) + 1, 0.0);
  std::vector<uint8_t> present(table.size(), 0);
  for (int32_t q : t.ksq) present[q] = 1;
  table[0] = sigma_at_zero;
  for (std::size_t q = 1; q < table.size(); ++q) {
    if (!present[q]) continue;
    const double rho = std::sqrt(static_cast<double>(q));
    table[q] = sigma(rho);
    if (!std::isfinite(table[q])) {
      throw DomainError("multiplier is not finite at radius " + std::to_string(rho));
    }
  }
  if (!std::isfinite(sigma_at_zero)) throw DomainError("multiplier at zero is not finite");

  std::vector<Complex> out = spectral_copy(f);
  const std::size_t n = g.spectral_count();
  for (int c = 0; c < f.components(); ++c) {
    Complex* block = out.data() + n * c;
    for (std::size_t i = 0; i < n; ++i) block[i] *= table[t.ksq[i]];
  }
  return VectorField::from_spectral(g, f.components(), std::move(out));
}

bool is_zero_mean(const VectorField& f, double rel_tol) {
  SpectralData data(f);
  double scale = 0.0;
  double mean = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto block = data.component(c);
    mean = std::max(mean, std::abs(block[0]));
    for (const auto& v : block) scale = std::max(scale, std::abs(v));
  }
  return mean <= rel_tol * scale || mean == 0.0;
}

VectorField lambda_s(const VectorField& f, double s) {
  if (s < 0.0 && !is_zero_mean(f)) {
    throw DomainError("Lambda^s with s < 0 needs a zero-mean field");
  }
  if (s == 0.0) return apply_multiplier(f, [](double) { return 1.0; }, 0.0);
  return apply_multiplier(f, [s](double rho) { return std::pow(rho, s); }, 0.0);
}

double sobolev_norm(const VectorField& f, double s) {
  const Grid& g = f.grid();
  const WaveTables& t = wave_tables(g);
  SpectralData data(f);
  // Per-|k|^2 weights keep pow() out of the inner loop.
  std::vector<double> wk(static_cast<std::size_t>(t.max_ksq) + 1, 0.0);
  for (std::size_t q = 1; q < wk.size(); ++q) wk[q] = std::pow(static_cast<double>(q), s);
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto block = data.component(c);
    for (std::size_t i = 1; i < block.size(); ++i) {
      sum += t.weight[i] * wk[t.ksq[i]] * std::norm(block[i]);
    }
  }
  return std::sqrt(g.volume() * sum);
}

namespace {

double lp_from_samples(const Grid& g, int components, std::span<const double> samples, std::size_t count,
                       double weight, double p) {
  if (std::isinf(p)) {
    double best = 0.0;
    for (std::size_t x = 0; x < count; ++x) {
      double m2 = 0.0;
      for (int c = 0; c < components; ++c) m2 += samples[count * c + x] * samples[count * c + x];
      best = std::max(best, m2);
    }
    return std::sqrt(best);
  }
  (void)g;
  double sum = 0.0;
  for (std::size_t x = 0; x < count; ++x) {
    double m2 = 0.0;
    for (int c = 0; c < components; ++c) m2 += samples[count * c + x] * samples[count * c + x];
    sum += p == 2.0 ? m2 : std::pow(std::sqrt(m2), p);
  }
  return std::pow(weight * sum, 1.0 / p);
}

}  // namespace

double lp_norm(const VectorField& f, double p) {
  if (!(p >= 1.0)) throw DomainError("L^p norm needs p >= 1");
  const VectorField phys = f.has_physical() ? f : to_physical(f);
  const Grid& g = f.grid();
  return lp_from_samples(g, f.components(), phys.physical(), g.physical_count(), g.cell_volume(), p);
}

double linf_norm_fine(const VectorField& f) {
  const FineGrid fine = FineGrid::refined(f.grid());
  SpectralData data(f);
  std::vector<double> samples;
  samples.reserve(fine.count() * f.components());
  for (int c = 0; c < f.components(); ++c) {
    auto s = fine.sample(data.component(c));
    samples.insert(samples.end(), s.begin(), s.end());
  }
  return lp_from_samples(f.grid(), f.components(), samples, fine.count(), 0.0,
                         std::numeric_limits<double>::infinity());
}

double inner_product(const VectorField& f, const VectorField& g) {
  require_same_grid(f, g, "inner_product");
  if (f.components() != g.components()) throw DomainError("inner_product: component counts differ");
  const WaveTables& t = wave_tables(f.grid());
  SpectralData a(f);
  SpectralData b(g);
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto x = a.component(c);
    auto y = b.component(c);
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum += t.weight[i] * (x[i].real() * y[i].real() + x[i].imag() * y[i].imag());
    }
  }
  return f.grid().volume() * sum;
}

VectorField gradient(const VectorField& f) {
  const Grid& g = f.grid();
  const WaveTables& t = wave_tables(g);
  const int dim = g.dim();
  const std::size_t n = g.spectral_count();
  SpectralData data(f);
  std::vector<Complex> out(n * f.components() * dim);
  for (int c = 0; c < f.components(); ++c) {
    auto src = data.component(c);
    for (int d = 0; d < dim; ++d) {
      Complex* dst = out.data() + n * (c * dim + d);
      for (std::size_t i = 0; i < n; ++i) dst[i] = kI * static_cast<double>(deriv_k(t.k[i][d], g.size())) * src[i];
    }
  }
  return VectorField::from_spectral(g, f.components() * dim, std::move(out));
}

VectorField divergence(const VectorField& f) {
  const Grid& g = f.grid();
  if (f.components() != g.dim()) throw DomainError("divergence needs a dim-component field");
  const WaveTables& t = wave_tables(g);
  const std::size_t n = g.spectral_count();
  SpectralData data(f);
  std::vector<Complex> out(n);
  for (int d = 0; d < g.dim(); ++d) {
    auto src = data.component(d);
    for (std::size_t i = 0; i < n; ++i) out[i] += kI * static_cast<double>(deriv_k(t.k[i][d], g.size())) * src[i];
  }
  return VectorField::from_spectral(g, 1, std::move(out));
}

VectorField laplacian(const VectorField& f) {
  return apply_multiplier(f, [](double rho) { return -rho * rho; }, 0.0);
}

VectorField leray_project(const VectorField& f) {
  const Grid& g = f.grid();
  if (f.components() != g.dim()) throw DomainError("leray_project needs a dim-component field");
  const WaveTables& t = wave_tables(g);
  const std::size_t n = g.spectral_count();
  const int dim = g.dim();
  std::vector<Complex> out = spectral_copy(f);
  for (std::size_t i = 0; i < n; ++i) {
    double k[3] = {0, 0, 0};
    double k2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      k[d] = deriv_k(t.k[i][d], g.size());
      k2 += k[d] * k[d];
    }
    if (k2 == 0.0) continue;
    Complex dot = 0.0;
    for (int d = 0; d < dim; ++d) dot += k[d] * out[n * d + i];
    for (int d = 0; d < dim; ++d) out[n * d + i] -= k[d] * dot / k2;
  }
  return VectorField::from_spectral(g, dim, std::move(out));
}

VectorField dealias(const VectorField& f) {
  const Grid& g = f.grid();
  const WaveTables& t = wave_tables(g);
  const int cut = g.dealias_cutoff();
  const std::size_t n = g.spectral_count();
  std::vector<Complex> out = spectral_copy(f);
  for (std::size_t i = 0; i < n; ++i) {
    bool keep = true;
    for (int d = 0; d < g.dim(); ++d) keep = keep && std::abs(t.k[i][d]) <= cut;
    if (keep) continue;
    for (int c = 0; c < f.components(); ++c) out[n * c + i] = 0.0;
  }
  return VectorField::from_spectral(g, f.components(), std::move(out));
}

VectorField remove_mean(const VectorField& f) {
  std::vector<Complex> out = spectral_copy(f);
  for (int c = 0; c < f.components(); ++c) out[f.grid().spectral_count() * c] = 0.0;
  return VectorField::from_spectral(f.grid(), f.components(), std::move(out));
}

double divergence_ratio(const VectorField& u) {
  const Grid& g = u.grid();
  if (u.components() != g.dim()) throw DomainError("divergence_ratio needs a dim-component field");
  const WaveTables& t = wave_tables(g);
  SpectralData data(u);
  double div2 = 0.0;
  double grad2 = 0.0;
  for (std::size_t i = 0; i < g.spectral_count(); ++i) {
    Complex dot = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      const double k = deriv_k(t.k[i][d], g.size());
      dot += k * data.component(d)[i];
      for (int e = 0; e < g.dim(); ++e) {
        const double ke = deriv_k(t.k[i][e], g.size());
        grad2 += t.weight[i] * ke * ke * std::norm(data.component(d)[i]);
      }
    }
    div2 += t.weight[i] * std::norm(dot);
  }
  if (grad2 == 0.0) return 0.0;
  return std::sqrt(div2 / grad2);
}

void require_solenoidal(const VectorField& u, const char* context) {
  if (u.components() != u.grid().dim()) {
    throw PreconditionError(std::string(context) + ": velocity must have dim components");
  }
  const double r = divergence_ratio(u);
  if (r > 1e-10) {
    throw PreconditionError(std::string(context) + ": field is not divergence-free (||div u||/||grad u|| = " +
                            std::to_string(r) + ")");
  }
}

int max_wavenumber(const VectorField& f) {
  const Grid& g = f.grid();
  const WaveTables& t = wave_tables(g);
  SpectralData data(f);
  const std::size_t n = g.spectral_count();
  int best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int kmax = 0;
    for (int d = 0; d < g.dim(); ++d) kmax = std::max(kmax, std::abs(static_cast<int>(t.k[i][d])));
    if (kmax <= best) continue;
    for (int c = 0; c < f.components(); ++c) {
      if (data.component(c)[i] != Complex(0.0, 0.0)) {
        best = kmax;
        break;
      }
    }
  }
  return best;
}

VectorField component(const VectorField& f, int c) {
  if (c < 0 || c >= f.components()) throw DomainError("component index out of range");
  SpectralData data(f);
  auto block = data.component(c);
  return VectorField::from_spectral(f.grid(), 1, std::vector<Complex>(block.begin(), block.end()));
}

VectorField stack(std::span<const VectorField> parts) {
  if (parts.empty()) throw DomainError("stack needs at least one field");
  std::vector<Complex> out;
  int total = 0;
  for (const auto& p : parts) {
    require_same_grid(parts.front(), p, "stack");
    SpectralData data(p);
    out.insert(out.end(), data.all().begin(), data.all().end());
    total += p.components();
  }
  return VectorField::from_spectral(parts.front().grid(), total, std::move(out));
}

void require_same_grid(const VectorField& a, const VectorField& b, const char* context) {
  if (!(a.grid() == b.grid())) throw DomainError(std::string(context) + ": grid mismatch");
}

namespace {

VectorField combine(const VectorField& a, const VectorField& b, double sb, const char* context) {
  require_same_grid(a, b, context);
  if (a.components() != b.components()) throw DomainError(std::string(context) + ": component counts differ");
  std::vector<Complex> out = spectral_copy(a);
  SpectralData y(b);
  auto src = y.all();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += sb * src[i];
  return VectorField::from_spectral(a.grid(), a.components(), std::move(out));
}

}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) { return combine(a, b, 1.0, "operator+"); }
VectorField operator-(const VectorField& a, const VectorField& b) { return combine(a, b, -1.0, "operator-"); }

VectorField operator*(double c, const VectorField& a) {
  std::vector<Complex> out = spectral_copy(a);
  for (auto& v : out) v *= c;
  return VectorField::from_spectral(a.grid(), a.components(), std::move(out));
}

// ---------------------------------------------------------------------------
// FineGrid

FineGrid::FineGrid(const Grid& base, int fine_size) : base_(base), fine_size_(fine_size) {
  if (fine_size < 4 || fine_size % 2 != 0) throw DomainError("fine grid size must be even and >= 4");
  count_ = 1;
  for (int d = 0; d < base.dim(); ++d) count_ *= static_cast<std::size_t>(fine_size);
  fine_spectral_count_ = count_ / fine_size * (fine_size / 2 + 1);
}

FineGrid FineGrid::for_product(const Grid& base, int bandwidth_a, int bandwidth_b) {
  const int needed = 2 * (bandwidth_a + bandwidth_b) + 1;
  const int cap = 3 * base.size() / 2;
  int best = cap;
  for (int p = 4; p <= cap; p *= 2) {
    if (p >= needed) {
      best = std::min(best, p);
      break;
    }
  }
  for (int p = 6; p <= cap; p *= 2) {
    if (p >= needed) {
      best = std::min(best, p);
      break;
    }
  }
  return FineGrid(base, best);
}

FineGrid FineGrid::refined(const Grid& base) { return FineGrid(base, 2 * base.size()); }

std::vector<double> FineGrid::sample(std::span<const Complex> coeffs) const {
  const WaveTables& t = wave_tables(base_);
  const int dim = base_.dim();
  const int nb = base_.size();
  const int nyq = nb / 2;
  const int fs = fine_size_;
  const int fh = fs / 2 + 1;
  const bool finer = fs > nb;
  std::vector<Complex> fine(fine_spectral_count_);

  auto wrap = [fs](int k) { return ((k % fs) + fs) % fs; };
  auto place = [&](int a, int b, int last, Complex v) {
    std::size_t idx = dim == 2 ? static_cast<std::size_t>(wrap(a)) * fh + last
                               : (static_cast<std::size_t>(wrap(a)) * fs + wrap(b)) * fh + last;
    fine[idx] += v;
  };

  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const Complex c = coeffs[i];
    if (c == Complex(0.0, 0.0)) continue;
    const auto& k = t.k[i];
    const int last = k[dim - 1];
    Complex v = c;
    // Nyquist modes of the base grid split evenly between +-size/2.
    if (last == nyq) {
      if (!finer) continue;
      v *= 0.5;
    } else if (last >= fs / 2) {
      continue;
    }
    int full_targets[2][2];
    int full_count[2] = {1, 1};
    bool drop = false;
    for (int d = 0; d < dim - 1; ++d) {
      const int kd = k[d];
      if (std::abs(kd) == nyq) {
        if (!finer) {
          drop = true;
          break;
        }
        full_targets[d][0] = nyq;
        full_targets[d][1] = -nyq;
        full_count[d] = 2;
        v *= 0.5;
      } else if (std::abs(kd) >= fs / 2) {
        drop = true;
        break;
      } else {
        full_targets[d][0] = kd;
      }
    }
    if (drop) continue;
    if (dim == 2) {
      for (int a = 0; a < full_count[0]; ++a) place(full_targets[0][a], 0, last, v);
    } else {
      for (int a = 0; a < full_count[0]; ++a) {
        for (int b = 0; b < full_count[1]; ++b) place(full_targets[0][a], full_targets[1][b], last, v);
      }
    }
  }
  std::vector<double> out(count_);
  detail::FftPlan::get(dim, fs).inverse(fine, out);
  return out;
}

std::vector<Complex> FineGrid::analyse(std::span<const double> samples) const {
  const int dim = base_.dim();
  const int fs = fine_size_;
  const int fh = fs / 2 + 1;
  std::vector<Complex> fine(fine_spectral_count_);
  detail::FftPlan::get(dim, fs).forward(samples, fine);

  const WaveTables& t = wave_tables(base_);
  const int nyq = base_.size() / 2;
  const int lim = std::min(nyq, fs / 2);
  std::vector<Complex> out(base_.spectral_count());
  auto wrap = [fs](int k) { return ((k % fs) + fs) % fs; };
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& k = t.k[i];
    bool keep = true;
    for (int d = 0; d < dim; ++d) keep = keep && std::abs(static_cast<int>(k[d])) < lim;
    if (!keep) continue;
    const std::size_t idx = dim == 2 ? static_cast<std::size_t>(wrap(k[0])) * fh + k[1]
                                     : (static_cast<std::size_t>(wrap(k[0])) * fs + wrap(k[1])) * fh + k[2];
    out[i] = fine[idx];
  }
  return out;
}

}  // namespace lplab
