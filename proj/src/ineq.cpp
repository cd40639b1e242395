#include "lplab/ineq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lplab/error.hpp"
#include "lplab/nonlinear.hpp"
#include "lplab/paley.hpp"
#include "lplab/parallel.hpp"
#include "lplab/spectral.hpp"

namespace lplab {

namespace {

using Params = std::map<std::string, double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

double get(const Params& p, const char* key) {
  const auto it = p.find(key);
  if (it == p.end()) throw DomainError(std::string("missing parameter ") + key);
  return it->second;
}

std::string format(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("condition violated: " + what);
}

void require_exponent(double x, const char* name) {
  require(x >= 1.0, std::string(name) + " >= 1 (" + name + " = " + format(x) + ")");
}

std::uint64_t derived_seed(std::uint64_t seed, int stream) {
  return splitmix64(seed ^ (0xd1b54a32d192ed03ULL * static_cast<std::uint64_t>(stream)));
}

double l2(const VectorField& f) { return std::sqrt(std::max(inner_product(f, f), 0.0)); }

double lq_norm(const VectorField& f, double q) { return std::isinf(q) ? linf_norm_fine(f) : lp_norm(f, q); }

double lr_norm(const std::vector<double>& terms, double r) {
  if (std::isinf(r)) return terms.empty() ? 0.0 : *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::pow(t, r);
  return std::pow(sum, 1.0 / r);
}

VectorField coherent(const VectorField& f) {
  const VectorField sf = to_spectral(f);
  const auto spec = sf.spectral();
  std::vector<Complex> out(spec.size());
  std::transform(spec.begin(), spec.end(), out.begin(), [](Complex c) { return Complex(std::abs(c), 0.0); });
  return VectorField::from_spectral(f.grid(), f.components(), std::move(out));
}

SidePair from_commutator(const CommutatorSample& c, double scale) {
  return {c.lhs, c.rhs, scale, c.degenerate, 0};
}

// Samplers. Every sampler derives its inputs from `seed` alone.

std::vector<SidePair> sample_prop51(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed, const Params& p) {
  const auto u = random_solenoidal(g, prof, seed);
  const auto b = random_solenoidal(g, prof, derived_seed(seed, 1));
  const auto c = commutator_estimate_sample(u, b, get(p, "s"), get(p, "s1"), get(p, "s2"));
  return {from_commutator(c, l2(u) * l2(b))};
}

std::vector<SidePair> sample_trilinear(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed,
                                       const Params& p) {
  const auto u = random_solenoidal(g, prof, seed);
  const double n = l2(u);
  return {from_commutator(trilinear_pairing(u, get(p, "s")), n * n * n)};
}

std::vector<SidePair> sample_pairing(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed,
                                     const Params& p) {
  const double s = get(p, "s");
  const double s1 = get(p, "s1");
  const double s2 = get(p, "s2");
  const auto u = random_solenoidal(g, prof, seed);
  const auto v = random_solenoidal(g, prof, derived_seed(seed, 1));
  const auto ls_adv = lambda_s(advect(u, v), s);
  const auto ls_v = lambda_s(v, s);
  SidePair out;
  out.lhs = std::abs(inner_product(ls_adv, ls_v));
  out.rhs = (sobolev_norm(u, s1) * sobolev_norm(v, s2) + sobolev_norm(u, s2) * sobolev_norm(v, s1)) *
            sobolev_norm(v, s);
  out.scale = l2(u) * l2(v) * l2(v);
  out.degenerate = out.lhs <= 1e-12 * l2(ls_adv) * l2(ls_v);
  return {out};
}

std::vector<SidePair> sample_prop66(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed, const Params&) {
  const auto u = random_solenoidal(g, prof, seed);
  const auto part = build_partition(g);
  const double sigma = 0.5 * g.dim() + 1.0;
  const auto norms = besov_block_commutator_norms(u, part);
  double lhs = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    lhs += norms[i] * std::exp2((part.j_min() + static_cast<int>(i)) * sigma);
  }
  const double b = besov_norm(u, {sigma, 2.0, 1.0}, part);
  const double n = l2(u);
  return {{lhs, b * b, n * n, false, 0}};
}

std::vector<SidePair> sample_bony_t(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed, const Params& p) {
  const double s = get(p, "s");
  const double t = get(p, "t");
  const double pp = get(p, "p");
  const double r1 = get(p, "r1");
  const double r2 = get(p, "r2");
  const double r = 1.0 / std::min(1.0, inv(r1) + inv(r2));
  const auto part = build_partition(g);
  const auto u = random_scalar(g, prof, seed);
  const auto v = random_scalar(g, prof, derived_seed(seed, 1));
  SidePair out;
  out.lhs = besov_norm(paraproduct(u, v), {s + t, pp, r}, part);
  out.rhs = besov_norm(u, {t, kInf, r1}, part) * besov_norm(v, {s, pp, r2}, part);
  out.scale = l2(u) * l2(v);
  return {out};
}

std::vector<SidePair> sample_bony_r(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed, const Params& p) {
  const double s1 = get(p, "s1");
  const double s2 = get(p, "s2");
  const double p1 = get(p, "p1");
  const double p2 = get(p, "p2");
  const double r1 = get(p, "r1");
  const double r2 = get(p, "r2");
  const auto part = build_partition(g);
  const auto u = random_scalar(g, prof, seed);
  const auto v = random_scalar(g, prof, derived_seed(seed, 1));
  SidePair out;
  out.lhs = besov_norm(remainder(u, v), {s1 + s2, 1.0 / (inv(p1) + inv(p2)), 1.0 / (inv(r1) + inv(r2))}, part);
  out.rhs = besov_norm(u, {s1, p1, r1}, part) * besov_norm(v, {s2, p2, r2}, part);
  out.scale = l2(u) * l2(v);
  return {out};
}

std::vector<SidePair> sample_q_commutator(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed,
                                          const Params& p) {
  const double sigma = get(p, "sigma");
  const double r = get(p, "r");
  const auto part = build_partition(g);
  const auto v = random_solenoidal(g, prof, seed);
  const auto f = random_scalar(g, prof, derived_seed(seed, 1));
  const auto q = bony_q_commutators(v, f, part);
  std::vector<double> terms;
  for (std::size_t i = 0; i < q.size(); ++i) {
    terms.push_back(std::exp2((part.j_min() + static_cast<int>(i)) * sigma) * l2(q[i]));
  }
  const auto grad_v = gradient(v);
  SidePair out;
  out.lhs = lr_norm(terms, r);
  out.rhs = (besov_norm(grad_v, {0.5 * g.dim(), 2.0, kInf}, part) + linf_norm_fine(grad_v)) *
            besov_norm(f, {sigma, 2.0, r}, part);
  out.scale = l2(grad_v) * l2(f);
  return {out};
}

std::vector<SidePair> sample_embedding(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed,
                                       const Params& p) {
  const double s = get(p, "s");
  const double p1 = get(p, "p1");
  const double p2 = get(p, "p2");
  const auto part = build_partition(g);
  const auto f = random_scalar(g, prof, seed);
  SidePair out;
  out.lhs = besov_norm(f, {s - g.dim() * (inv(p1) - inv(p2)), p2, get(p, "r2")}, part);
  out.rhs = besov_norm(f, {s, p1, get(p, "r1")}, part);
  out.scale = l2(f);
  return {out};
}

std::vector<SidePair> sample_lq_embedding(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed,
                                          const Params& p) {
  const double pp = get(p, "p");
  const double q = get(p, "q");
  const auto f = random_scalar(g, prof, seed);
  SidePair out;
  out.lhs = lq_norm(f, q);
  out.rhs = besov_norm(f, {g.dim() * (inv(pp) - inv(q)), pp, 1.0});
  out.scale = l2(f);
  return {out};
}

std::vector<SidePair> sample_bernstein(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed,
                                       const Params& p) {
  const double pp = get(p, "p");
  const double q = get(p, "q");
  const auto part = build_partition(g);
  auto f = random_scalar(g, prof, seed);
  if (get(p, "coherent") != 0.0) f = coherent(f);
  const auto energy = block_norms(f, 2.0, part);
  const auto lower = block_norms(f, pp, part);
  const auto upper = pp == q ? lower : block_norms(f, q, part);
  const double total = l2(f);
  std::vector<SidePair> out;
  for (std::size_t i = 0; i < energy.size(); ++i) {
    // Blocks outside the spectral band hold transform noise only.
    if (energy[i] <= 1e-12 * total) continue;
    const int k = part.j_min() + static_cast<int>(i);
    const double weight = std::exp2(k * g.dim() * (inv(pp) - inv(q)));
    out.push_back({upper[i], weight * lower[i], weight * total, false, k});
  }
  return out;
}

std::vector<SidePair> sample_bony_identity(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed,
                                           const Params&) {
  const auto u = random_scalar(g, prof, seed);
  const auto v = random_scalar(g, prof, derived_seed(seed, 1));
  const auto residual = product(u, v) - paraproduct(u, v) - paraproduct(v, u) - remainder(u, v);
  SidePair out;
  out.lhs = l2(residual);
  out.rhs = linf_norm_fine(u) * l2(v);
  out.scale = out.rhs;
  return {out};
}

std::vector<SidePair> sample_decomposition(const Grid& g, const SpectrumProfile& prof, std::uint64_t seed,
                                           const Params&) {
  const auto u = random_solenoidal(g, prof, seed);
  const auto part = build_partition(g);
  double err = 0.0;
  double ref = 0.0;
  for (int k = part.j_min(); k <= part.j_max(); ++k) {
    const auto t = decompose_t1_t2_t3_t4(u, k);
    const auto direct = besov_block_commutator(u, k);
    const double e = l2(t.t1 + t.t2 + t.t3 + t.t4 - direct);
    const double d = l2(direct);
    err += e * e;
    ref += d * d;
  }
  const double n = l2(u);
  return {{std::sqrt(err), std::sqrt(ref), n * n, false, 0}};
}

// Validators.

void validate_prop51(int n, const Params& p) {
  validate_commutator_exponents(n, get(p, "s"), get(p, "s1"), get(p, "s2"));
}

void validate_trilinear(int, const Params& p) {
  require(get(p, "s") >= 1.0, "s >= 1 (s = " + format(get(p, "s")) + ")");
}

void validate_bony_t(int, const Params& p) {
  require(get(p, "t") < 0.0, "t < 0 (t = " + format(get(p, "t")) + ")");
  require_exponent(get(p, "p"), "p");
  require_exponent(get(p, "r1"), "r1");
  require_exponent(get(p, "r2"), "r2");
}

void validate_bony_r(int, const Params& p) {
  require(get(p, "s1") + get(p, "s2") > 0.0, "s1 + s2 > 0");
  for (const char* key : {"p1", "p2", "r1", "r2"}) require_exponent(get(p, key), key);
  require(inv(get(p, "p1")) + inv(get(p, "p2")) <= 1.0, "1/p1 + 1/p2 <= 1");
  require(inv(get(p, "r1")) + inv(get(p, "r2")) <= 1.0, "1/r1 + 1/r2 <= 1");
}

void validate_q_commutator(int n, const Params& p) {
  const double sigma = get(p, "sigma");
  require(sigma > -1.0 - 0.5 * n && sigma < 1.0 + 0.5 * n, "-1 - n/2 < sigma < 1 + n/2 (sigma = " + format(sigma) + ")");
  require_exponent(get(p, "r"), "r");
}

void validate_embedding(int, const Params& p) {
  require_exponent(get(p, "p1"), "p1");
  require_exponent(get(p, "r1"), "r1");
  require(get(p, "p1") <= get(p, "p2"), "p1 <= p2");
  require(get(p, "r1") <= get(p, "r2"), "r1 <= r2");
}

void validate_lq(int, const Params& p) {
  require_exponent(get(p, "p"), "p");
  require(get(p, "p") <= get(p, "q"), "p <= q");
}

void validate_bernstein(int n, const Params& p) {
  validate_lq(n, p);
  const double c = get(p, "coherent");
  require(c == 0.0 || c == 1.0, "coherent is 0 or 1");
}

void validate_none(int, const Params&) {}

void validate_lemma(int, const Params& p) { require(get(p, "samples") >= 1.0, "samples >= 1"); }

std::vector<Inequality> make_registry() {
  std::vector<Inequality> r;
  const auto sobolev_defaults = [](int n) {
    const double h = 0.5 * n;
    return Params{{"s", h}, {"s1", h}, {"s2", h + 1.0}};
  };
  r.push_back({"prop-5.1", "calibrated",
               "||Lambda^s[(u.grad)B] - (u.grad)Lambda^s B||_2 <= c (|u|_{s1}|B|_{s2} + |u|_{s2}|B|_{s1})",
               sobolev_defaults, validate_prop51, sample_prop51});
  r.push_back({"trilinear", "calibrated",
               "|(Lambda^s (u.grad)u, Lambda^s u)| <= c |u|_{s} |u|_{s+1} |u|_{n/2}, div u = 0",
               [](int n) { return Params{{"s", 0.5 * n}}; }, validate_trilinear, sample_trilinear});
  r.push_back({"commutator-pairing", "calibrated",
               "|(Lambda^s (u.grad)v, Lambda^s v)| <= c (|u|_{s1}|v|_{s2} + |u|_{s2}|v|_{s1}) |v|_s, div u = 0",
               sobolev_defaults, validate_prop51, sample_pairing});
  r.push_back({"prop-6.6", "calibrated",
               "sum_k 2^{k(n/2+1)} ||Delta_k((u.grad)u) - S_{k-1}u.grad Delta_k u||_2 <= c ||u||^2_{B^{n/2+1}_{2,1}}",
               [](int) { return Params{}; }, validate_none, sample_prop66});
  r.push_back({"bony-T", "calibrated", "||T_u v||_{B^{s+t}_{p,r}} <= C ||u||_{B^t_{inf,r1}} ||v||_{B^s_{p,r2}}, t < 0",
               [](int) { return Params{{"s", 1.0}, {"t", -0.5}, {"p", 2.0}, {"r1", kInf}, {"r2", 2.0}}; },
               validate_bony_t, sample_bony_t});
  r.push_back({"bony-R", "calibrated",
               "||R(u,v)||_{B^{s1+s2}_{p,r}} <= C ||u||_{B^{s1}_{p1,r1}} ||v||_{B^{s2}_{p2,r2}}, s1 + s2 > 0",
               [](int n) {
                 return Params{{"s1", 1.0}, {"s2", 0.5 * n}, {"p1", kInf}, {"p2", 2.0}, {"r1", kInf}, {"r2", 1.0}};
               },
               validate_bony_r, sample_bony_r});
  r.push_back({"q-commutator", "calibrated",
               "||(2^{j sigma} ||[(v.grad), Delta_j] f||_2)_j||_{l^r} <= C ||grad v||_{B^{n/2}_{2,inf} cap L^inf} "
               "||f||_{B^sigma_{2,r}}",
               [](int) { return Params{{"sigma", 1.0}, {"r", 1.0}}; }, validate_q_commutator, sample_q_commutator});
  r.push_back({"besov-embedding", "calibrated", "||f||_{B^{s-n(1/p1-1/p2)}_{p2,r2}} <= C ||f||_{B^s_{p1,r1}}",
               [](int n) { return Params{{"s", 0.5 * n}, {"p1", 2.0}, {"p2", kInf}, {"r1", 1.0}, {"r2", 1.0}}; },
               validate_embedding, sample_embedding});
  r.push_back({"besov-lq-embedding", "calibrated", "||f||_{L^q} <= C ||f||_{B^{n/p-n/q}_{p,1}}",
               [](int) { return Params{{"p", 2.0}, {"q", kInf}}; }, validate_lq, sample_lq_embedding});
  r.push_back({"bernstein", "calibrated", "||Delta_k f||_q <= c 2^{kn(1/p-1/q)} ||Delta_k f||_p, p <= q",
               [](int) { return Params{{"p", 2.0}, {"q", kInf}, {"coherent", 0.0}}; }, validate_bernstein,
               sample_bernstein});
  r.push_back({"lemma-5.2", "explicit", "||a|^s - |a-b|^s| <= s 3^{s-1} |a-b|^{s-1} |b|, |b| < |a|/2, s in [1,4]",
               [](int) { return Params{{"samples", 1e6}}; }, validate_lemma, nullptr});
  Inequality bony{"bony-identity", "exact", "uv = T_u v + T_v u + R(u,v), relative to ||u||_inf ||v||_2",
                  [](int) { return Params{}; }, validate_none, sample_bony_identity};
  bony.tolerance = 1e-10;
  r.push_back(bony);
  Inequality dec{"decomposition", "exact", "t1 + t2 + t3 + t4 = Delta_k((u.grad)u) - S_{k-1}u.grad Delta_k u",
                 [](int) { return Params{}; }, validate_none, sample_decomposition};
  dec.tolerance = 1e-9;
  r.push_back(dec);
  return r;
}

Params resolve_params(const Inequality& ineq, const EnsembleSpec& spec) {
  Params p = ineq.defaults(spec.dim);
  for (const auto& [key, value] : spec.params) {
    if (!p.contains(key)) throw DomainError("unknown parameter '" + key + "' for " + ineq.id);
    p[key] = value;
  }
  ineq.validate(spec.dim, p);
  return p;
}

using Slots = std::vector<std::vector<SidePair>>;

std::size_t slot_index(const EnsembleSpec& spec, std::size_t size, std::size_t profile, std::size_t sample) {
  return (size * spec.profiles.size() + profile) * static_cast<std::size_t>(spec.samples_per_cell) + sample;
}

Slots collect(const Inequality& ineq, const EnsembleSpec& spec, const Params& params) {
  const std::size_t per_cell = static_cast<std::size_t>(spec.samples_per_cell);
  const std::size_t cells = spec.sizes.size() * spec.profiles.size();
  Slots slots(cells * per_cell);
  parallel_for(slots.size(), [&](std::size_t i) {
    const std::size_t sample = i % per_cell;
    const std::size_t profile = (i / per_cell) % spec.profiles.size();
    const std::size_t size = i / per_cell / spec.profiles.size();
    const Grid g(spec.dim, spec.sizes[size]);
    slots[i] = ineq.sample(g, spec.profiles[profile].resolve(g), sample_seed(spec.base_seed, profile, sample), params);
  });
  return slots;
}

bool is_degenerate(const SidePair& s) {
  return s.degenerate || !(s.rhs > 0.0) || s.rhs < kDegenerateFloor * s.scale || !std::isfinite(s.lhs) ||
         !std::isfinite(s.rhs);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  const std::size_t idx = std::clamp<std::size_t>(rank, 1, v.size()) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
  return v[idx];
}

void fill_quantiles(RatioStats& out, const std::vector<double>& ratios) {
  out.q50 = quantile(ratios, 0.5);
  out.q90 = quantile(ratios, 0.9);
  out.q99 = quantile(ratios, 0.99);
  out.max_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
}

double spread(double lo, double hi) {
  if (hi == 0.0) return 1.0;
  return lo > 0.0 ? hi / lo : kInf;
}

int calibration_count(const EnsembleSpec& spec) {
  const int n = static_cast<int>(std::floor(spec.calibration_fraction * spec.samples_per_cell));
  return std::clamp(n, 1, spec.samples_per_cell - 1);
}

RatioStats reduce_calibrated(RatioStats out, const EnsembleSpec& spec, const Slots& slots) {
  const int calib = calibration_count(spec);
  std::vector<double> ratios;
  std::vector<std::vector<double>> profile_c(spec.profiles.size());
  double c_lo = kInf;
  double c_hi = 0.0;
  for (std::size_t si = 0; si < spec.sizes.size(); ++si) {
    ResolutionStats rs;
    rs.size = spec.sizes[si];
    for (std::size_t pi = 0; pi < spec.profiles.size(); ++pi) {
      CellStats cell{rs.size, pi, 0.0, 0.0};
      for (int m = 0; m < spec.samples_per_cell; ++m) {
        for (const SidePair& sp : slots[slot_index(spec, si, pi, static_cast<std::size_t>(m))]) {
          ++rs.samples;
          if (is_degenerate(sp)) {
            ++rs.degenerate;
            continue;
          }
          const double ratio = sp.lhs / sp.rhs;
          ratios.push_back(ratio);
          cell.max_ratio = std::max(cell.max_ratio, ratio);
          if (m < calib) cell.c_emp = std::max(cell.c_emp, ratio);
        }
      }
      rs.c_emp = std::max(rs.c_emp, cell.c_emp);
      rs.max_ratio = std::max(rs.max_ratio, cell.max_ratio);
      profile_c[pi].push_back(cell.c_emp);
      out.cells.push_back(cell);
    }
    for (std::size_t pi = 0; pi < spec.profiles.size(); ++pi) {
      for (int m = calib; m < spec.samples_per_cell; ++m) {
        for (const SidePair& sp : slots[slot_index(spec, si, pi, static_cast<std::size_t>(m))]) {
          if (!is_degenerate(sp) && sp.lhs > out.margin * rs.c_emp * sp.rhs) ++rs.violations;
        }
      }
    }
    out.samples += rs.samples;
    out.degenerate += rs.degenerate;
    out.violations += rs.violations;
    out.c_emp = std::max(out.c_emp, rs.c_emp);
    c_lo = std::min(c_lo, rs.c_emp);
    c_hi = std::max(c_hi, rs.c_emp);
    out.per_resolution.push_back(rs);
  }
  if (ratios.empty()) throw DomainError("all samples of " + out.id + " are degenerate");
  fill_quantiles(out, ratios);
  out.resolution_stability = spread(c_lo, c_hi);
  for (const auto& cs : profile_c) {
    const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
    out.profile_drift = std::max(out.profile_drift, spread(*lo, *hi));
  }
  out.passed = out.violations == 0 && out.resolution_stability < out.stability_limit;
  return out;
}

RatioStats reduce_exact(RatioStats out, const EnsembleSpec& spec, const Slots& slots) {
  std::vector<double> devs;
  for (std::size_t si = 0; si < spec.sizes.size(); ++si) {
    ResolutionStats rs;
    rs.size = spec.sizes[si];
    for (std::size_t pi = 0; pi < spec.profiles.size(); ++pi) {
      for (int m = 0; m < spec.samples_per_cell; ++m) {
        for (const SidePair& sp : slots[slot_index(spec, si, pi, static_cast<std::size_t>(m))]) {
          ++rs.samples;
          if (!(sp.rhs > 0.0)) {
            ++rs.degenerate;
            continue;
          }
          const double dev = sp.lhs / sp.rhs;
          devs.push_back(dev);
          rs.max_ratio = std::max(rs.max_ratio, dev);
          if (!(dev <= out.tolerance)) ++rs.violations;
        }
      }
    }
    out.samples += rs.samples;
    out.degenerate += rs.degenerate;
    out.violations += rs.violations;
    out.per_resolution.push_back(rs);
  }
  if (devs.empty()) throw DomainError("all samples of " + out.id + " are degenerate");
  fill_quantiles(out, devs);
  out.max_deviation = out.max_ratio;
  out.passed = out.violations == 0;
  return out;
}

RatioStats header(const Inequality& ineq, const EnsembleSpec& spec, const Params& params) {
  RatioStats out;
  out.id = ineq.id;
  out.kind = ineq.kind;
  out.ensemble = spec;
  out.params = params;
  out.tolerance = ineq.tolerance;
  return out;
}

ProfileRule rule(double alpha, double lo, double hi) { return {alpha, lo, hi}; }

}  // namespace

SpectrumProfile ProfileRule::resolve(const Grid& grid) const {
  const int n = grid.size();
  const int k_lo = std::max(1, static_cast<int>(std::floor(lo * n)));
  const int k_hi = static_cast<int>(std::floor(hi * n));
  SpectrumProfile p{alpha, k_lo, k_hi, 1.0};
  p.validate(grid);
  return p;
}

void EnsembleSpec::validate() const {
  if (dim != 2 && dim != 3) throw DomainError("ensemble dimension must be 2 or 3");
  if (sizes.empty()) throw DomainError("ensemble has no grid sizes");
  if (profiles.empty()) throw DomainError("ensemble has no profiles");
  if (samples_per_cell < 2) throw DomainError("ensemble needs at least 2 samples per cell");
  if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
    throw DomainError("calibration fraction must lie in (0, 1)");
  }
  for (int n : sizes) {
    const Grid g(dim, n);
    for (const auto& p : profiles) p.resolve(g);
  }
}

EnsembleSpec default_ensemble(int dim) {
  EnsembleSpec spec;
  spec.dim = dim;
  for (double alpha : {2.0, 3.0, 4.0}) {
    spec.profiles.push_back(rule(alpha, 0.0, 1.0 / 6.0));
    spec.profiles.push_back(rule(alpha, 1.0 / 8.0, 1.0 / 3.0));
  }
  return spec;
}

std::uint64_t sample_seed(std::uint64_t base, std::size_t profile, std::size_t sample) {
  std::uint64_t h = splitmix64(base ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ (0x9e3779b97f4a7c15ULL * (profile + 1)));
  return splitmix64(h ^ (0xbf58476d1ce4e5b9ULL * (sample + 1)));
}

SidePair scalar_lemma_sides(const double a[3], const double b[3], double s) {
  double na2 = 0.0;
  double nb2 = 0.0;
  double ab = 0.0;
  double nd2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    na2 += a[i] * a[i];
    nb2 += b[i] * b[i];
    ab += a[i] * b[i];
    nd2 += (a[i] - b[i]) * (a[i] - b[i]);
  }
  const double na = std::sqrt(na2);
  const double nb = std::sqrt(nb2);
  if (!(nb < 0.5 * na)) throw DomainError("scalar lemma needs |b| < |a|/2");
  if (!(s >= 1.0)) throw DomainError("scalar lemma needs s >= 1");
  // |a-b|^2 = |a|^2 (1 - delta).
  const double delta = (2.0 * ab - nb2) / na2;
  SidePair out;
  out.lhs = std::abs(std::pow(na, s) * std::expm1(0.5 * s * std::log1p(-delta)));
  out.rhs = s * std::pow(3.0, s - 1.0) * std::pow(std::sqrt(nd2), s - 1.0) * nb;
  out.scale = std::pow(na, s);
  return out;
}

RatioStats check_scalar_lemma(std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("scalar lemma needs at least one sample");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const auto direction = [&](double out[3]) {
    double n = 0.0;
    while (n < 1e-6) {
      n = 0.0;
      for (int i = 0; i < 3; ++i) {
        out[i] = normal(gen);
        n += out[i] * out[i];
      }
      n = std::sqrt(n);
    }
    for (int i = 0; i < 3; ++i) out[i] /= n;
  };

  RatioStats out;
  out.id = "lemma-5.2";
  out.kind = "explicit";
  out.params = {{"samples", static_cast<double>(samples)}};
  out.ensemble.base_seed = seed;
  out.ensemble.sizes.clear();
  out.c_emp = 1.0;
  out.margin = 1.0;
  const double slack = 1.0 + 64.0 * std::numeric_limits<double>::epsilon();
  std::vector<double> ratios;
  ratios.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    double a[3];
    double b[3];
    direction(a);
    const double na = std::pow(10.0, -3.0 + 6.0 * unit(gen));
    for (double& x : a) x *= na;
    const double mode = unit(gen);
    const double nb = mode < 1.0 / 64.0 ? 0.0 : 0.5 * na * unit(gen);
    if (mode < 0.25) {
      const double sign = unit(gen) < 0.5 ? -1.0 : 1.0;
      for (int j = 0; j < 3; ++j) b[j] = sign * a[j] / na * nb;
    } else {
      direction(b);
      for (double& x : b) x *= nb;
    }
    const double s = unit(gen) < 0.125 ? 1.0 : 1.0 + 3.0 * unit(gen);
    const SidePair sp = scalar_lemma_sides(a, b, s);
    ++out.samples;
    if (sp.lhs > sp.rhs * slack) ++out.violations;
    if (sp.rhs > 0.0) {
      ratios.push_back(sp.lhs / sp.rhs);
    } else {
      ++out.degenerate;
    }
  }
  fill_quantiles(out, ratios);
  out.passed = out.violations == 0;
  return out;
}

BernsteinStats check_bernstein(const EnsembleSpec& spec_in, double p, double q) {
  if (!(p >= 1.0 && p <= q)) throw DomainError("Bernstein needs 1 <= p <= q");
  const Inequality& ineq = find_inequality("bernstein");
  EnsembleSpec spec = spec_in;
  spec.params["p"] = p;
  spec.params["q"] = q;
  spec.validate();
  const Params params = resolve_params(ineq, spec);
  const Slots slots = collect(ineq, spec, params);
  BernsteinStats out;
  out.stats = reduce_calibrated(header(ineq, spec, params), spec, slots);
  for (const auto& slot : slots) {
    for (const SidePair& sp : slot) {
      if (is_degenerate(sp)) continue;
      double& m = out.per_block[sp.index];
      m = std::max(m, sp.lhs / sp.rhs);
    }
  }
  double lo = kInf;
  double hi = 0.0;
  for (const auto& [k, m] : out.per_block) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  out.block_stability = out.per_block.empty() ? 1.0 : spread(lo, hi);
  out.block_stable = out.block_stability < out.stats.stability_limit;
  out.stats.passed = out.stats.passed && out.block_stable;
  return out;
}

const std::vector<Inequality>& registry() {
  static const std::vector<Inequality> r = make_registry();
  return r;
}

const Inequality& find_inequality(const std::string& id) {
  for (const auto& ineq : registry()) {
    if (ineq.id == id) return ineq;
  }
  std::string known;
  for (const auto& name : inequality_ids()) known += (known.empty() ? "" : ", ") + name;
  throw DomainError("unknown inequality '" + id + "'; known: " + known);
}

std::vector<std::string> inequality_ids() {
  std::vector<std::string> ids;
  for (const auto& ineq : registry()) ids.push_back(ineq.id);
  return ids;
}

EnsembleSpec default_ensemble_for(const std::string& id, int dim) {
  const Inequality& ineq = find_inequality(id);
  if (ineq.kind == "calibrated") return default_ensemble(dim);
  EnsembleSpec spec;
  spec.dim = dim;
  spec.profiles.clear();
  if (id == "bony-identity") {
    spec.sizes = {32};
    spec.profiles = {rule(2.0, 0.0, 1.0 / 3.0)};
    spec.samples_per_cell = 16;
  } else if (id == "decomposition") {
    spec.sizes = {16};
    spec.profiles = {rule(1.5, 0.0, 1.0 / 3.0)};
    spec.samples_per_cell = 8;
  } else {
    spec.sizes.clear();
    spec.samples_per_cell = 0;
  }
  return spec;
}

RatioStats run_inequality(const std::string& id, const EnsembleSpec& spec) {
  const Inequality& ineq = find_inequality(id);
  if (ineq.kind == "explicit") {
    const Params params = resolve_params(ineq, spec);
    return check_scalar_lemma(static_cast<std::size_t>(get(params, "samples")), spec.base_seed);
  }
  spec.validate();
  const Params params = resolve_params(ineq, spec);
  if (id == "bernstein") return check_bernstein(spec, get(params, "p"), get(params, "q")).stats;
  const Slots slots = collect(ineq, spec, params);
  if (ineq.kind == "exact") return reduce_exact(header(ineq, spec, params), spec, slots);
  return reduce_calibrated(header(ineq, spec, params), spec, slots);
}

std::vector<ConditionCell> sweep_conditions(int n, const std::vector<double>& s_values,
                                            const std::vector<double>& s1_values, const EnsembleSpec& spec,
                                            bool run) {
  std::vector<ConditionCell> out;
  for (double s : s_values) {
    for (double s1 : s1_values) {
      ConditionCell cell;
      cell.s = s;
      cell.s1 = s1;
      cell.s2 = s + 0.5 * n + 1.0 - s1;
      try {
        validate_commutator_exponents(n, s, s1, cell.s2);
        cell.admissible = true;
      } catch (const DomainError& e) {
        cell.reason = e.what();
      }
      if (cell.admissible && run) {
        EnsembleSpec local = spec;
        local.dim = n;
        local.params = {{"s", s}, {"s1", s1}, {"s2", cell.s2}};
        cell.stats = run_inequality("prop-5.1", local);
      }
      out.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace lplab
