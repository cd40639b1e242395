#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lplab/field.hpp"
#include "lplab/random_field.hpp"

namespace lplab {

/// Spectral profile whose band scales with the grid:
/// k_lo = max(1, floor(lo * N)), k_hi = floor(hi * N).
struct ProfileRule {
  double alpha = 3.0;
  double lo = 0.0;
  double hi = 1.0 / 3.0;
  SpectrumProfile resolve(const Grid& grid) const;
};

struct EnsembleSpec {
  int dim = 3;
  std::vector<int> sizes{32, 64};
  std::vector<ProfileRule> profiles;
  int samples_per_cell = 32;
  std::uint64_t base_seed = 1;
  /// Fraction of each cell used for calibration; the rest is the test split.
  double calibration_fraction = 0.5;
  /// Inequality parameters (exponents, integrabilities); unset keys take the
  /// registered defaults.
  std::map<std::string, double> params;

  /// Throws DomainError unless samples >= 2, the split is in (0, 1) and the
  /// size and profile lists are nonempty.
  void validate() const;
};

/// Alpha in {2, 3, 4}, bands [1, N/6] and [N/8, N/3], 32 samples per cell,
/// N in {32, 64}, 50/50 split.
EnsembleSpec default_ensemble(int dim = 3);

/// Seed of one ensemble member; independent of the grid size.
std::uint64_t sample_seed(std::uint64_t base, std::size_t profile, std::size_t sample);

struct SidePair {
  double lhs = 0.0;
  double rhs = 0.0;
  /// Reference magnitude for the degeneracy floor (product of input norms).
  double scale = 0.0;
  bool degenerate = false;
  /// Block index for per-block samples.
  int index = 0;
};

struct ResolutionStats {
  int size = 0;
  int samples = 0;
  int degenerate = 0;
  double c_emp = 0.0;
  double max_ratio = 0.0;
  int violations = 0;
};

struct CellStats {
  int size = 0;
  std::size_t profile = 0;
  double c_emp = 0.0;
  double max_ratio = 0.0;
};

struct RatioStats {
  std::string id;
  std::string kind;  // calibrated, explicit or exact
  EnsembleSpec ensemble;
  std::map<std::string, double> params;
  int samples = 0;
  int degenerate = 0;
  double max_ratio = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  /// Largest calibration-split ratio over all resolutions.
  double c_emp = 0.0;
  double margin = 2.0;
  /// Test-split samples with lhs > margin * c_emp(N) * rhs (calibrated),
  /// lhs > rhs (explicit), or deviation above tolerance (exact).
  int violations = 0;
  std::vector<ResolutionStats> per_resolution;
  std::vector<CellStats> cells;
  /// max c_emp(N) / min c_emp(N); 1 for a single resolution.
  double resolution_stability = 1.0;
  double stability_limit = 2.0;
  /// Diagnostic: largest max/min of per-profile c_emp across resolutions.
  double profile_drift = 1.0;
  /// Exact checks: largest relative deviation and its tolerance.
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Both sides of the scalar lemma ||a|^s - |a-b|^s| <= s 3^{s-1} |a-b|^{s-1} |b|,
/// with the left side evaluated without cancellation.
SidePair scalar_lemma_sides(const double a[3], const double b[3], double s);

/// Draws (a, b, s) with |b| < |a|/2 and s in [1, 4]; every violation is a
/// hard failure (up to a 64-ulp rounding allowance).
RatioStats check_scalar_lemma(std::size_t samples, std::uint64_t seed);

/// Block Bernstein ratios ||Delta_k f||_q / (2^{kn(1/p-1/q)} ||Delta_k f||_p)
/// over an ensemble of scalar fields, one sample per nonzero block. With
/// spec.params["coherent"] = 1 every coefficient is given phase zero, which
/// concentrates each block at the origin. Throws DomainError unless
/// 1 <= p <= q.
struct BernsteinStats {
  RatioStats stats;
  /// Largest ratio per block index k (0 where no block was seen).
  std::map<int, double> per_block;
  /// max / min of the per-block maxima.
  double block_stability = 1.0;
  bool block_stable = false;
};
BernsteinStats check_bernstein(const EnsembleSpec& spec, double p, double q);

using SampleFn = std::function<std::vector<SidePair>(const Grid&, const SpectrumProfile&, std::uint64_t seed,
                                                     const std::map<std::string, double>& params)>;

struct Inequality {
  std::string id;
  std::string kind;
  std::string statement;
  std::function<std::map<std::string, double>(int dim)> defaults;
  /// Throws DomainError for inadmissible parameters.
  std::function<void(int dim, const std::map<std::string, double>&)> validate;
  SampleFn sample;
  /// Exact checks only.
  double tolerance = 0.0;
};

const std::vector<Inequality>& registry();
const Inequality& find_inequality(const std::string& id);
std::vector<std::string> inequality_ids();

/// Default ensemble for an id: D15 for calibrated checks, the fixed sizes of
/// the identity checks otherwise.
EnsembleSpec default_ensemble_for(const std::string& id, int dim = 3);

/// Runs every sample of the ensemble, calibrates on the calibration split
/// and counts test-split violations. Throws DomainError for unknown ids,
/// invalid specs and all-degenerate ensembles.
RatioStats run_inequality(const std::string& id, const EnsembleSpec& spec);

struct ConditionCell {
  double s = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  bool admissible = false;
  std::string reason;
  RatioStats stats;
};

/// Enumerates (s, s1) pairs with s2 = s + n/2 + 1 - s1, marks admissible ones
/// and runs "prop-5.1" on each admissible cell when `run` is set.
std::vector<ConditionCell> sweep_conditions(int n, const std::vector<double>& s_values,
                                            const std::vector<double>& s1_values, const EnsembleSpec& spec,
                                            bool run = true);

}  // namespace lplab
