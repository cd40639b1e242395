#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lplab/field.hpp"

namespace lplab {

struct SimulationParams {
  double nu = 1.0;
  double dt = 1e-3;
  double t_end = 0.5;
  /// Norms are recorded every `record_every` steps, fields every `field_every`.
  int record_every = 1;
  int field_every = 10;
  /// Advective CFL number: dt <= cfl * (2 pi / N) / ||u||_inf.
  double cfl = 0.5;

  /// Throws DomainError for non-positive values.
  void validate() const;
};

/// Norms at one recorded time. For n = 3 the Sobolev indices are 3/2 and 5/2;
/// in general n/2 and n/2 + 1, and `besov` is the B^{n/2+1}_{2,1} norm.
struct NormRecord {
  double t = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double h_mid = 0.0;
  double h_top = 0.0;
  double besov = 0.0;
  double divergence = 0.0;
  /// ||Delta_j u||_2 for j = j_min..j_max.
  std::vector<double> blocks;
};

struct Checkpoint {
  std::size_t record = 0;
  VectorField u;
};

struct Trajectory {
  Grid grid{3, 8};
  SimulationParams params;
  std::uint64_t seed = 0;
  int j_min = 0;
  std::vector<NormRecord> records;
  std::vector<Checkpoint> checkpoints;
  bool aborted = false;
  std::string abort_reason;
  int steps = 0;
};

/// Integrates du/dt + P[(u.grad)u] = nu Lap u with the viscous term by exact
/// integrating factor and the dealiased advection term by a Lawson RK4 step.
/// Throws DomainError unless u0 is dealiased and mean-free, PreconditionError
/// unless it is divergence-free. A CFL violation or a non-finite state ends the
/// run early with `aborted` set.
Trajectory ns_simulate(const VectorField& u0, const SimulationParams& params, std::uint64_t seed = 0);

/// (sin x cos y cos z, -cos x sin y cos z, 0) in 3-D, (sin x cos y, -cos x sin y)
/// in 2-D.
VectorField taylor_green(const Grid& grid);

struct EnergyBalance {
  /// max |d/dt ||u||^2 + 2 nu ||grad u||^2| / ||u0||^2 over interior records.
  double max_residual = 0.0;
  std::vector<double> t;
  std::vector<double> residual;
};

/// Five-point centered differences over the recorded L2 norms. Throws
/// DomainError with fewer than five records.
EnergyBalance energy_balance(const Trajectory& traj);

struct InequalitySeries {
  double constant = 0.0;
  std::vector<double> t;
  std::vector<double> lhs;
  std::vector<double> rhs;
  /// Differencing error allowance (Richardson estimate plus rounding).
  std::vector<double> tolerance;
  int violations = 0;
  /// max (lhs - rhs) over checked times.
  double max_excess = -1e300;
};

struct H32Check {
  /// d/dt |u|^2_{n/2} + 2 nu |u|^2_{n/2+1} <= 2 c |u|^2_{n/2} |u|_{n/2+1}.
  InequalitySeries pre_young;
  /// d/dt |u|^2_{n/2} + nu |u|^2_{n/2+1} <= (c^2 / nu) |u|^4_{n/2}.
  InequalitySeries young;
};

/// Checks the two differential inequalities at every record with two
/// neighbours on each side. Throws DomainError with fewer than five records
/// or c <= 0.
H32Check check_h32_inequality(const Trajectory& traj, double c);

struct BesovBlockCheck {
  /// Per checkpoint and block: d/dt ||Delta_k u|| <= ||block commutator_k||.
  std::vector<InequalitySeries> per_block;  // indexed by k - j_min
  /// d/dt ||u||_B <= c ||u||_B^2 at every interior record.
  InequalitySeries summed;
  /// max |sum_k d_k - 1| over checkpoints.
  double d_sum_error = 0.0;
  int violations() const;
};

/// Block-by-block energy inequality at stored checkpoints, and the summed
/// Besov form with constant c. Throws DomainError with fewer than five
/// records.
BesovBlockCheck check_besov_block_evolution(const Trajectory& traj, double c);

struct OdeParams {
  double c = 1.0;
  double gamma = 2.0;
  double x0 = 1.0;
  /// Blowup time; NaN means the equality-case value 1 / (gamma c x0^gamma).
  double horizon = std::numeric_limits<double>::quiet_NaN();

  void validate() const;
  double blowup_time() const;
};

/// (1 / (gamma c (T - t)))^{1/gamma}. Throws DomainError unless 0 <= t < T.
double ode_lower_bound(const OdeParams& p, double t);

/// Symbolic form of the bound for the given gamma, e.g. "c^-1 (T-t)^-1" at
/// gamma = 1.
std::string ode_bound_formula(double gamma);

struct OdeSeries {
  std::vector<double> t;
  std::vector<double> x;
  /// Lower bound with the numerical blowup time as horizon.
  std::vector<double> bound;
  double t_num = 0.0;
  double t_exact = 0.0;
  double relative_error = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool bound_holds = false;
  std::string formula;
};

/// Integrates dX/dt = c X^{1+gamma} from x0 with RK4 steps
/// h = min(dt, 0.01 / (c X^gamma)) until X > 1e6 x0. Throws DomainError for
/// dt <= 0.
OdeSeries ode_integrate(const OdeParams& p, double dt);

struct ScenarioParams {
  double epsilon = 0.1;
  double c = 1.0;
  double horizon = 1.0;
  double tau = 0.0;
  double dt = 1e-3;
  /// Y(tau); NaN means the strong lower bound c^-2 (T - tau)^-1.
  double y0 = std::numeric_limits<double>::quiet_NaN();
  /// Integration stops at T - stop_gap.
  double stop_gap = 1e-6;

  void validate() const;
};

struct ScenarioReport {
  ScenarioParams params;
  std::vector<double> t;
  std::vector<double> y;
  /// Z = Y (T - t)^{2 c eps}.
  std::vector<double> z;
  /// Solution of dM/dt = 2 c eps M / (T - t), M(tau) = Y(tau).
  std::vector<double> majorant;
  /// c^-2 (T - t)^-1.
  std::vector<double> lower_bound;
  bool z_nonincreasing = false;
  /// max_n (Z_{n+1} - Z_n) / |Z_0|.
  double max_z_increase = 0.0;
  bool y_below_majorant = false;
  /// Exponent a in M ~ (T - t)^-a from a log-log fit; expected 2 c eps.
  double fitted_exponent = 0.0;
  double expected_exponent = 0.0;
  double exponent_error = 0.0;
  /// First time with Y below the strong lower bound (NaN if none).
  double crossing_time = 0.0;
  /// Time after which the majorant stays below the strong lower bound.
  double majorant_crossing = 0.0;
  /// (4c)^-1 (T - t_end)^-1 and (4c)^-1 t_end^-1 at the last step.
  double tk_bound_horizon = 0.0;
  double tk_bound_literal = 0.0;
  std::string tk_note;
};

/// Integrates dY/dt = 2 c eps Y / (T - t) - 2 eps^2 / (T - t)^2 with RK4 steps
/// h = min(dt, 0.01 (T - t)). Throws DomainError when 2 c eps >= 1 or the
/// times are inconsistent.
ScenarioReport weak_blowup_scenario(const ScenarioParams& p);

}  // namespace lplab
