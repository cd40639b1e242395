#include "lplab/random_field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lplab/error.hpp"
#include "lplab/spectral.hpp"

namespace lplab {

void SpectrumProfile::validate(const Grid& grid) const {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw DomainError("profile amplitude must be positive");
  if (!std::isfinite(alpha)) throw DomainError("profile exponent must be finite");
  if (k_lo < 1) throw DomainError("profile band must start at k_lo >= 1");
  if (k_hi < k_lo) throw DomainError("profile band is empty (k_hi < k_lo)");
  if (k_hi > grid.dealias_cutoff()) {
    throw DomainError("profile band exceeds the dealias cutoff " + std::to_string(grid.dealias_cutoff()));
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Complex complex_gaussian(const GaussianKey& key) {
  std::uint64_t h = splitmix64(key.seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.component + 1));
  for (int d = 0; d < 3; ++d) h = splitmix64(h ^ static_cast<std::uint64_t>(key.k[d] + 0x8000));
  // Uniforms on (0, 1] and [0, 1) from the top 53 bits.
  const double u1 = (static_cast<double>(splitmix64(h ^ 1) >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(splitmix64(h ^ 2) >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

namespace {

VectorField draw(const Grid& grid, const SpectrumProfile& profile, std::uint64_t seed, int components) {
  profile.validate(grid);
  const WaveTables& t = wave_tables(grid);
  const std::size_t n = grid.spectral_count();
  const int lo2 = profile.k_lo * profile.k_lo;
  const int hi2 = profile.k_hi * profile.k_hi;
  std::vector<Complex> coeffs(n * components);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    const int q = t.ksq[i];
    if (q < lo2 || q > hi2) continue;
    any = true;
    const double sigma = profile.amplitude * std::pow(static_cast<double>(q), -0.5 * profile.alpha);
    const auto& k = t.k[i];
    for (int c = 0; c < components; ++c) {
      const Complex gp = complex_gaussian({seed, c, {k[0], k[1], k[2]}});
      const Complex gm = complex_gaussian({seed, c, {-k[0], -k[1], -k[2]}});
      coeffs[n * c + i] = sigma * (gp + std::conj(gm)) / std::numbers::sqrt2;
    }
  }
  if (!any) throw DomainError("profile band contains no lattice wavevectors");
  return VectorField::from_spectral(grid, components, std::move(coeffs));
}

}  // namespace

VectorField random_solenoidal(const Grid& grid, const SpectrumProfile& profile, std::uint64_t seed) {
  return leray_project(draw(grid, profile, seed, grid.dim()));
}

VectorField random_scalar(const Grid& grid, const SpectrumProfile& profile, std::uint64_t seed) {
  return draw(grid, profile, seed, 1);
}

}  // namespace lplab
