#pragma once

#include <cstdint>

#include "lplab/field.hpp"

namespace lplab {

/// Spectral envelope for random fields: standard deviation
/// amplitude * |k|^-alpha on k_lo <= |k| <= k_hi, zero elsewhere.
struct SpectrumProfile {
  double alpha = 3.0;
  int k_lo = 1;
  int k_hi = 10;
  double amplitude = 1.0;

  /// Throws DomainError unless k_lo >= 1, k_lo <= k_hi <= grid.dealias_cutoff()
  /// and amplitude > 0.
  void validate(const Grid& grid) const;
};

/// Counter-based normal generator. Every draw is a pure function of
/// (seed, component, wavevector), so fields at different resolutions share
/// their common modes.
struct GaussianKey {
  std::uint64_t seed;
  int component;
  int k[3];
};
/// Circular complex Gaussian with E|g|^2 = 1.
Complex complex_gaussian(const GaussianKey& key);
std::uint64_t splitmix64(std::uint64_t x);

/// Hermitian Gaussian field, Leray-projected and mean-free.
VectorField random_solenoidal(const Grid& grid, const SpectrumProfile& profile, std::uint64_t seed);
/// Same envelope, one component, no projection.
VectorField random_scalar(const Grid& grid, const SpectrumProfile& profile, std::uint64_t seed);

}  // namespace lplab
