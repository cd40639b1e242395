#include "lplab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "lplab/dynamics.hpp"
#include "lplab/error.hpp"
#include "lplab/ineq.hpp"
#include "lplab/io.hpp"
#include "lplab/paley.hpp"
#include "lplab/random_field.hpp"
#include "lplab/spectral.hpp"

namespace lplab::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// I/O and configuration problems (exit 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(format_number(x)); }

void write_json(const fs::path& path, const Json& j) { write_text(path.string(), j.dump(2) + "\n"); }

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
  return fs::path(dir);
}

// "lo:hi" with integers.
std::pair<int, int> parse_band(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw DomainError("band must be lo:hi, got '" + s + "'");
  try {
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw DomainError("band must be two integers lo:hi, got '" + s + "'");
  }
}

// "alpha:lo:hi" with lo, hi as fractions of N.
ProfileRule parse_profile(const std::string& s) {
  std::vector<double> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ':')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw DomainError("profile must be alpha:lo:hi, got '" + s + "'");
    }
  }
  if (parts.size() != 3) throw DomainError("profile must be alpha:lo:hi, got '" + s + "'");
  return {parts[0], parts[1], parts[2]};
}

// --------------------------------------------------------------------------
// Config file merging: JSON values become flags placed before the user's
// flags; keys that the user also passes on the command line are dropped.

std::vector<std::string> json_to_flags(const Json& cfg, const std::set<std::string>& given) {
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    if (given.count(key)) continue;
    const std::string flag = "--" + key;
    auto scalar = [&](const Json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number()) return format_number(v.get<double>());
      throw ConfigError("config key '" + key + "' has an unsupported value type");
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(scalar(v));
      }
    } else if (value.is_object() || value.is_null()) {
      throw ConfigError("config key '" + key + "' must be a scalar or a list");
    } else {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> user;
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      user.push_back(args[i]);
    }
  }
  if (!config) return user;
  Json cfg;
  try {
    cfg = Json::parse(read_text(*config));
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + *config + ": " + e.what());
  } catch (const InvalidDataError& e) {
    throw ConfigError(e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config " + *config + " must hold a JSON object");
  const std::string command = user.empty() ? "" : user.front();
  if (cfg.contains(command) && cfg[command].is_object()) cfg = cfg[command];
  std::set<std::string> given;
  for (const auto& a : user) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                         : a.find('=') - 2));
  }
  std::vector<std::string> merged;
  if (!user.empty()) merged.push_back(user.front());
  const auto extra = json_to_flags(cfg, given);
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), user.begin() + (user.empty() ? 0 : 1), user.end());
  return merged;
}

// --------------------------------------------------------------------------
// gen-field

struct GenOptions {
  int dim = 3;
  int size = 32;
  double alpha = 3.0;
  std::string band;
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  std::string name = "field";
  std::string out_dir = ".";
};

int cmd_gen_field(const GenOptions& o, std::ostream& out) {
  const Grid g(o.dim, o.size);
  SpectrumProfile prof{o.alpha, 1, g.dealias_cutoff(), o.amplitude};
  if (!o.band.empty()) std::tie(prof.k_lo, prof.k_hi) = parse_band(o.band);
  prof.validate(g);
  const VectorField u = random_solenoidal(g, prof, o.seed);
  const double h = sobolev_norm(u, o.dim / 2.0);
  const double b = besov_norm(u, {o.dim / 2.0 + 1.0, 2.0, 1.0});

  const fs::path dir = prepare_dir(o.out_dir);
  const fs::path fld = dir / (o.name + ".fld1");
  write_fld1(fld.string(), u);
  Json j;
  j["command"] = "gen-field";
  j["version"] = kVersion;
  j["config"] = {{"n", o.dim}, {"N", o.size}, {"alpha", o.alpha}, {"band", {prof.k_lo, prof.k_hi}},
                 {"amplitude", o.amplitude}, {"seed", o.seed}, {"name", o.name}, {"out-dir", o.out_dir}};
  j["format"] = "FLD1";
  j["file"] = fld.filename().string();
  j["n"] = o.dim;
  j["m"] = o.dim;
  j["N"] = o.size;
  j["seed"] = o.seed;
  j["profile"] = {{"alpha", o.alpha}, {"band", {prof.k_lo, prof.k_hi}}, {"amplitude", o.amplitude}};
  j["norms"] = {{"H_n/2", number(h)}, {"B_n/2+1_2_1", number(b)}};
  j["status"] = "pass";
  write_json(dir / (o.name + ".json"), j);
  out << "wrote " << fld.string() << "\n";
  out << "H^{n/2} norm: " << format_number(h) << "\n";
  out << "B^{n/2+1}_{2,1} norm: " << format_number(b) << "\n";
  return kOk;
}

// --------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::string id;
  bool all = false;
  int dim = 3;
  std::vector<int> sizes;
  int samples = 0;
  std::uint64_t seed = 1;
  double calibration = kUnset;
  std::vector<std::string> profiles;
  std::map<std::string, double> exponents;
  std::vector<std::string> params;
  bool coherent = false;
  bool svg = false;
  std::string name;
  std::string out_dir = ".";
};

const std::vector<std::string> kExponentFlags{"s", "s1", "s2", "t", "p", "q", "r", "p1", "p2", "r1", "r2", "sigma"};

Json ensemble_json(const EnsembleSpec& e) {
  Json profiles = Json::array();
  for (const auto& p : e.profiles) profiles.push_back({{"alpha", p.alpha}, {"lo", p.lo}, {"hi", p.hi}});
  return {{"dim", e.dim},
          {"sizes", e.sizes},
          {"profiles", profiles},
          {"samples_per_cell", e.samples_per_cell},
          {"base_seed", e.base_seed},
          {"calibration_fraction", e.calibration_fraction}};
}

Json stats_json(const RatioStats& s, const Inequality& ineq) {
  Json j;
  j["inequality_id"] = s.id;
  j["kind"] = s.kind;
  j["statement"] = ineq.statement;
  Json params = Json::object();
  for (const auto& [k, v] : s.params) params[k] = number(v);
  j["params"] = params;
  j["ensemble"] = ensemble_json(s.ensemble);
  j["samples"] = s.samples;
  j["degenerate"] = s.degenerate;
  j["max_ratio"] = number(s.max_ratio);
  j["quantiles"] = {{"q50", number(s.q50)}, {"q90", number(s.q90)}, {"q99", number(s.q99)}};
  j["c_emp"] = number(s.c_emp);
  j["margin"] = s.margin;
  j["violations"] = s.violations;
  j["resolution_stability"] = number(s.resolution_stability);
  j["stability_limit"] = s.stability_limit;
  j["profile_drift"] = number(s.profile_drift);
  Json per = Json::array();
  for (const auto& r : s.per_resolution) {
    per.push_back({{"N", r.size},
                   {"samples", r.samples},
                   {"degenerate", r.degenerate},
                   {"c_emp", number(r.c_emp)},
                   {"max_ratio", number(r.max_ratio)},
                   {"violations", r.violations}});
  }
  j["per_resolution"] = per;
  Json cells = Json::array();
  for (const auto& c : s.cells) {
    cells.push_back({{"N", c.size}, {"profile", c.profile}, {"c_emp", number(c.c_emp)}, {"max_ratio", number(c.max_ratio)}});
  }
  j["cells"] = cells;
  if (s.kind == "exact") {
    j["max_deviation"] = number(s.max_deviation);
    j["tolerance"] = s.tolerance;
  }
  j["passed"] = s.passed;
  return j;
}

std::string plot_cells(const RatioStats& s) {
  PlotSpec plot;
  plot.title = s.id + ": calibration constant per profile";
  plot.x_label = "profile index";
  plot.y_label = "c_emp";
  plot.log_y = true;
  std::map<int, PlotSeries> by_size;
  for (const auto& c : s.cells) {
    auto& series = by_size[c.size];
    series.name = "N = " + std::to_string(c.size);
    series.x.push_back(static_cast<double>(c.profile));
    series.y.push_back(c.c_emp);
  }
  for (auto& [n, series] : by_size) plot.series.push_back(std::move(series));
  return render_svg(plot);
}

Json verify_one(const std::string& id, const VerifyOptions& o, bool& passed, std::string& svg) {
  const Inequality& ineq = find_inequality(id);
  EnsembleSpec spec = default_ensemble_for(id, o.dim);
  spec.base_seed = o.seed;
  if (!o.sizes.empty() && ineq.kind != "explicit") spec.sizes = o.sizes;
  if (o.samples > 0) {
    if (ineq.kind == "explicit") {
      spec.params["samples"] = o.samples;
    } else {
      spec.samples_per_cell = o.samples;
    }
  }
  if (!std::isnan(o.calibration)) spec.calibration_fraction = o.calibration;
  if (!o.profiles.empty() && ineq.kind != "explicit") {
    spec.profiles.clear();
    for (const auto& p : o.profiles) spec.profiles.push_back(parse_profile(p));
  }
  for (const auto& [k, v] : o.exponents) spec.params[k] = v;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("parameter must be key=value, got '" + kv + "'");
    try {
      spec.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw DomainError("parameter value is not a number: '" + kv + "'");
    }
  }
  if (o.coherent) spec.params["coherent"] = 1.0;

  Json j;
  if (id == "bernstein") {
    spec.validate();
    const auto defaults = ineq.defaults(spec.dim);
    auto get = [&](const char* k) { return spec.params.count(k) ? spec.params.at(k) : defaults.at(k); };
    const BernsteinStats b = check_bernstein(spec, get("p"), get("q"));
    j = stats_json(b.stats, ineq);
    Json blocks = Json::object();
    for (const auto& [k, v] : b.per_block) blocks[std::to_string(k)] = number(v);
    j["per_block"] = blocks;
    j["block_stability"] = number(b.block_stability);
    j["block_stable"] = b.block_stable;
    passed = b.stats.passed;
    svg = plot_cells(b.stats);
  } else {
    const RatioStats s = run_inequality(id, spec);
    j = stats_json(s, ineq);
    passed = s.passed;
    svg = plot_cells(s);
  }
  return j;
}

Json verify_config(const VerifyOptions& o) {
  Json c;
  c["id"] = o.id;
  c["all"] = o.all;
  c["n"] = o.dim;
  c["N"] = o.sizes;
  c["samples"] = o.samples;
  c["seed"] = o.seed;
  c["calibration"] = number(o.calibration);
  c["profile"] = o.profiles;
  for (const auto& [k, v] : o.exponents) c[k] = v;
  c["param"] = o.params;
  c["coherent"] = o.coherent;
  c["svg"] = o.svg;
  c["out-dir"] = o.out_dir;
  return c;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  if (o.all == !o.id.empty()) throw ConfigError("verify needs exactly one of --id or --all");
  std::vector<std::string> ids = o.all ? inequality_ids() : std::vector<std::string>{o.id};
  if (!o.all) {
    try {
      find_inequality(o.id);
    } catch (const DomainError& e) {
      err << e.what() << "\n";
      return kValidationError;
    }
  }
  const fs::path dir = prepare_dir(o.out_dir);
  Json reports = Json::array();
  bool all_passed = true;
  for (const auto& id : ids) {
    bool passed = false;
    std::string svg;
    Json j = verify_one(id, o, passed, svg);
    all_passed = all_passed && passed;
    out << id << ": " << (passed ? "pass" : "FAIL") << "  violations=" << j["violations"].get<int>();
    if (j.contains("max_deviation")) {
      out << "  max_deviation=" << format_number(j["max_deviation"].get<double>());
    } else {
      out << "  max_ratio=" << j["max_ratio"].dump() << "  c_emp=" << j["c_emp"].dump()
          << "  resolution_stability=" << j["resolution_stability"].dump();
    }
    out << "\n";
    if (o.svg) {
      const fs::path svg_path = dir / ((o.name.empty() ? "verify-" + id : o.name + "-" + id) + ".svg");
      write_text(svg_path.string(), svg);
    }
    reports.push_back(std::move(j));
  }
  Json doc;
  doc["command"] = "verify";
  doc["version"] = kVersion;
  doc["config"] = verify_config(o);
  doc["status"] = all_passed ? "pass" : "fail";
  if (o.all) {
    doc["reports"] = reports;
  } else {
    for (auto& [k, v] : reports[0].items()) doc[k] = v;
  }
  const std::string name = o.name.empty() ? (o.all ? "verify-all" : "verify-" + o.id) : o.name;
  write_json(dir / (name + ".json"), doc);
  return all_passed ? kOk : kCheckFailed;
}

// --------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string init = "taylor-green";
  std::string field;
  int dim = 3;
  int size = 32;
  double nu = 1.0;
  double dt = 1e-3;
  double t_end = 0.5;
  int record_every = 1;
  int field_every = 10;
  double cfl = 0.5;
  std::uint64_t seed = 1;
  double alpha = 3.0;
  std::string band;
  double amplitude = 1.0;
  int mode = 1;
  std::vector<std::string> checks{"energy"};
  double c_h32 = kUnset;
  double c_besov = kUnset;
  int calibration_samples = 32;
  bool ode_overlay = false;
  double ode_c = 1.0;
  double ode_gamma = 1.0;
  double ode_T = kUnset;
  bool no_checkpoints = false;
  std::string name = "trajectory";
  std::string out_dir = ".";
};

VectorField initial_field(const SimulateOptions& o) {
  if (o.init == "file") {
    if (o.field.empty()) throw ConfigError("--init file needs --field");
    return read_fld1(o.field);
  }
  const Grid g(o.dim, o.size);
  if (o.init == "taylor-green") return o.amplitude * taylor_green(g);
  if (o.init == "random") {
    SpectrumProfile prof{o.alpha, 1, g.dealias_cutoff(), o.amplitude};
    if (!o.band.empty()) std::tie(prof.k_lo, prof.k_hi) = parse_band(o.band);
    prof.validate(g);
    return random_solenoidal(g, prof, o.seed);
  }
  if (o.init == "stokes-mode") {
    // u = amplitude (sin(m x_last), 0[, 0]): advection vanishes identically.
    if (o.mode < 1 || o.mode > g.dealias_cutoff()) throw DomainError("stokes mode wavenumber outside [1, N/3]");
    const std::size_t n = g.spectral_count();
    std::vector<Complex> coeffs(n * o.dim, Complex(0.0, 0.0));
    std::array<int, 3> k{0, 0, 0};
    k[o.dim - 1] = o.mode;
    std::size_t idx = 0;
    half_index(g, k, idx);
    coeffs[idx] = Complex(0.0, -0.5 * o.amplitude);
    return VectorField::from_spectral(g, o.dim, std::move(coeffs));
  }
  throw DomainError("unknown --init '" + o.init + "' (taylor-green, stokes-mode, random, file)");
}

double calibrate(const std::string& id, int dim, int samples, std::ostream& out) {
  EnsembleSpec spec = default_ensemble_for(id, dim);
  spec.samples_per_cell = samples;
  out << "calibrating " << id << " on the default ensemble (" << samples << " samples per cell)\n";
  return run_inequality(id, spec).c_emp;
}

Json series_summary(const InequalitySeries& s) {
  return {{"constant", number(s.constant)},
          {"points", s.t.size()},
          {"violations", s.violations},
          {"max_excess", s.t.empty() ? Json(nullptr) : number(s.max_excess)}};
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  std::set<std::string> checks;
  for (const auto& c : o.checks) {
    if (c == "all") {
      checks.insert({"energy", "h32", "besov"});
    } else if (c == "energy" || c == "h32" || c == "besov") {
      checks.insert(c);
    } else if (c != "none") {
      throw DomainError("unknown check '" + c + "' (energy, h32, besov, all, none)");
    }
  }
  if (o.ode_overlay) {
    OdeParams p{o.ode_c, o.ode_gamma, 1.0, std::isnan(o.ode_T) ? 1.0 : o.ode_T};
    p.validate();
  }
  const VectorField u0 = initial_field(o);
  SimulationParams params;
  params.nu = o.nu;
  params.dt = o.dt;
  params.t_end = o.t_end;
  params.record_every = o.record_every;
  params.field_every = o.field_every;
  params.cfl = o.cfl;
  params.validate();
  const fs::path dir = prepare_dir(o.out_dir);

  const Trajectory traj = ns_simulate(u0, params, o.seed);
  const int dim = traj.grid.dim();

  Json report;
  report["command"] = "simulate";
  report["version"] = kVersion;
  report["config"] = {{"init", o.init},
                      {"field", o.field},
                      {"n", dim},
                      {"N", traj.grid.size()},
                      {"nu", o.nu},
                      {"dt", o.dt},
                      {"t-end", o.t_end},
                      {"record-every", o.record_every},
                      {"field-every", o.field_every},
                      {"cfl", o.cfl},
                      {"seed", o.seed},
                      {"alpha", o.alpha},
                      {"band", o.band},
                      {"amplitude", o.amplitude},
                      {"mode", o.mode},
                      {"check", std::vector<std::string>(checks.begin(), checks.end())},
                      {"c-h32", number(o.c_h32)},
                      {"c-besov", number(o.c_besov)},
                      {"calibration-samples", o.calibration_samples},
                      {"ode-overlay", o.ode_overlay},
                      {"ode-c", o.ode_c},
                      {"ode-gamma", o.ode_gamma},
                      {"ode-T", number(o.ode_T)},
                      {"no-checkpoints", o.no_checkpoints},
                      {"out-dir", o.out_dir}};
  report["seed"] = o.seed;
  report["steps"] = traj.steps;
  report["records"] = traj.records.size();
  report["aborted"] = traj.aborted;
  if (traj.aborted) report["abort_reason"] = traj.abort_reason;
  double max_div = 0.0;
  for (const auto& r : traj.records) max_div = std::max(max_div, r.divergence);
  report["max_divergence"] = number(max_div);
  const auto& last = traj.records.back();
  report["final"] = {{"t", last.t},     {"L2", number(last.l2)},       {"H1", number(last.h1)},
                     {"H32", number(last.h_mid)}, {"H52", number(last.h_top)}, {"B52_21", number(last.besov)}};

  bool checks_ok = true;
  std::optional<H32Check> h32;
  std::optional<BesovBlockCheck> besov;
  Json jchecks = Json::object();
  const bool enough = traj.records.size() >= 5;
  if (!enough && !checks.empty()) jchecks["note"] = "fewer than five records; checks skipped";
  if (enough && checks.count("energy")) {
    const EnergyBalance eb = energy_balance(traj);
    const bool ok = eb.max_residual < 1e-4;
    checks_ok = checks_ok && ok;
    jchecks["energy"] = {{"max_residual", number(eb.max_residual)}, {"limit", 1e-4}, {"passed", ok}};
  }
  if (enough && checks.count("h32")) {
    const double c = std::isnan(o.c_h32) ? calibrate("trilinear", dim, o.calibration_samples, out) : o.c_h32;
    h32 = check_h32_inequality(traj, c);
    const bool ok = h32->pre_young.violations == 0 && h32->young.violations == 0;
    checks_ok = checks_ok && ok;
    jchecks["h32"] = {{"c", number(c)},
                      {"calibrated", std::isnan(o.c_h32)},
                      {"pre_young", series_summary(h32->pre_young)},
                      {"young", series_summary(h32->young)},
                      {"passed", ok}};
  }
  if (enough && checks.count("besov")) {
    const double c = std::isnan(o.c_besov) ? calibrate("prop-6.6", dim, o.calibration_samples, out) : o.c_besov;
    besov = check_besov_block_evolution(traj, c);
    int block_violations = 0;
    std::size_t block_points = 0;
    for (const auto& s : besov->per_block) {
      block_violations += s.violations;
      block_points += s.t.size();
    }
    const bool ok = besov->violations() == 0 && besov->d_sum_error <= 1e-10;
    checks_ok = checks_ok && ok;
    jchecks["besov"] = {{"c", number(c)},
                        {"calibrated", std::isnan(o.c_besov)},
                        {"summed", series_summary(besov->summed)},
                        {"per_block_points", block_points},
                        {"per_block_violations", block_violations},
                        {"d_sum_error", number(besov->d_sum_error)},
                        {"passed", ok}};
  }
  report["checks"] = jchecks;

  const fs::path csv = dir / (o.name + ".csv");
  write_text(csv.string(), trajectory_csv(traj, h32 ? &*h32 : nullptr, besov ? &*besov : nullptr));
  PlotSpec plot;
  plot.title = "norm trajectory";
  plot.x_label = "t";
  plot.y_label = "norm";
  plot.log_y = true;
  const char* names[] = {"L2", "H1", "H32", "H52", "B52_21"};
  for (int k = 0; k < 5; ++k) {
    PlotSeries s;
    s.name = names[k];
    for (const auto& r : traj.records) {
      const double v[] = {r.l2, r.h1, r.h_mid, r.h_top, r.besov};
      s.x.push_back(r.t);
      s.y.push_back(v[k]);
    }
    plot.series.push_back(std::move(s));
  }
  if (o.ode_overlay) {
    OdeParams p{o.ode_c, o.ode_gamma, 1.0, o.ode_T};
    const double T = std::isnan(o.ode_T) ? p.blowup_time() : o.ode_T;
    p.horizon = T;
    PlotSeries s;
    s.name = "ODE bound";
    s.dashed = true;
    for (const auto& r : traj.records) {
      if (r.t >= T) break;
      s.x.push_back(r.t);
      s.y.push_back(ode_lower_bound(p, r.t));
    }
    plot.series.push_back(std::move(s));
    report["ode_overlay"] = {{"c", o.ode_c}, {"gamma", o.ode_gamma}, {"T", T}, {"formula", ode_bound_formula(o.ode_gamma)}};
  }
  write_text((dir / (o.name + ".svg")).string(), render_svg(plot));
  Json files = {{"csv", csv.filename().string()}, {"svg", o.name + ".svg"}};
  if (!o.no_checkpoints) {
    Json cps = Json::array();
    for (const auto& cp : traj.checkpoints) {
      const std::string file = o.name + "-" + std::to_string(cp.record) + ".fld1";
      write_fld1((dir / file).string(), cp.u);
      cps.push_back({{"t", traj.records[cp.record].t}, {"file", file}});
    }
    files["checkpoints"] = cps;
  }
  report["files"] = files;
  report["status"] = traj.aborted ? "aborted" : (checks_ok ? "pass" : "fail");
  write_json(dir / (o.name + ".json"), report);

  out << "steps: " << traj.steps << "  final t: " << format_number(last.t) << "\n";
  for (const auto& [k, v] : jchecks.items()) {
    if (v.is_object()) out << k << ": " << (v["passed"].get<bool>() ? "pass" : "FAIL") << "\n";
  }
  if (traj.aborted) {
    out << "aborted: " << traj.abort_reason << "\n";
    return kNumericalAbort;
  }
  return checks_ok ? kOk : kCheckFailed;
}

// --------------------------------------------------------------------------
// ode

struct OdeOptions {
  std::string scenario = "auto";
  double c = 1.0;
  double gamma = 2.0;
  double x0 = 1.0;
  double T = kUnset;
  double dt = 1e-3;
  double eps = kUnset;
  double tau = 0.0;
  double y0 = kUnset;
  double stop_gap = 1e-6;
  std::string name = "ode";
  std::string out_dir = ".";
  bool weak_flags = false;
};

int cmd_ode(const OdeOptions& o, std::ostream& out) {
  std::string scenario = o.scenario;
  if (scenario == "auto") scenario = o.weak_flags ? "weak" : "lemma";
  if (scenario != "lemma" && scenario != "weak" && scenario != "both") {
    throw DomainError("unknown scenario '" + scenario + "' (lemma, weak, both)");
  }
  const bool lemma = scenario != "weak";
  const bool weak = scenario != "lemma";
  OdeParams op{o.c, o.gamma, o.x0, o.T};
  ScenarioParams sp;
  sp.c = o.c;
  sp.epsilon = std::isnan(o.eps) ? sp.epsilon : o.eps;
  sp.horizon = std::isnan(o.T) ? sp.horizon : o.T;
  sp.tau = o.tau;
  sp.dt = o.dt;
  sp.y0 = o.y0;
  sp.stop_gap = o.stop_gap;
  if (lemma) op.validate();
  if (weak) sp.validate();
  if (!(o.dt > 0.0)) throw DomainError("time step must be positive");
  const fs::path dir = prepare_dir(o.out_dir);

  Json report;
  report["command"] = "ode";
  report["version"] = kVersion;
  report["config"] = {{"scenario", scenario}, {"c", o.c},     {"gamma", o.gamma}, {"x0", o.x0},
                      {"T", number(o.T)},     {"dt", o.dt},   {"eps", number(sp.epsilon)},
                      {"tau", o.tau},         {"y0", number(o.y0)}, {"stop-gap", o.stop_gap}, {"out-dir", o.out_dir}};
  bool ok = true;
  PlotSpec plot;
  plot.log_y = true;
  plot.x_label = "t";
  std::ostringstream csv;
  if (lemma) {
    const OdeSeries s = ode_integrate(op, o.dt);
    const bool saturated = s.bound_holds && s.max_ratio <= 1.0 + 1e-3;
    ok = ok && saturated;
    Json j;
    j["T_num"] = s.t_num;
    j["T_exact"] = s.t_exact;
    j["relative_error"] = s.relative_error;
    j["steps"] = s.t.size() - 1;
    j["min_ratio"] = s.min_ratio;
    j["max_ratio"] = s.max_ratio;
    j["bound_holds"] = s.bound_holds;
    j["saturation"] = saturated;
    j["formula"] = s.formula;
    if (o.gamma == 1.0) j["theorem_form"] = "||u(T-t)||^2_{H^{3/2}} >= c_{3/2}^-2 t^-1 (c = c_{3/2}^2)";
    report["lemma"] = j;
    out << "T_num = " << format_number(s.t_num) << " (exact " << format_number(s.t_exact) << ")\n";
    out << "bound: " << s.formula << "\n";
    out << "saturation: " << (saturated ? "true" : "false") << "\n";
    plot.title = "comparison ODE";
    plot.series.push_back({"X", s.t, s.x, false});
    plot.series.push_back({"bound", s.t, s.bound, true});
    csv << "t,X,bound\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      csv << format_number(s.t[i]) << ',' << format_number(s.x[i]) << ',' << format_number(s.bound[i]) << '\n';
    }
  }
  if (weak) {
    const ScenarioReport r = weak_blowup_scenario(sp);
    const bool exponent_ok = r.exponent_error <= 0.02;
    ok = ok && r.z_nonincreasing && exponent_ok;
    Json j;
    j["epsilon"] = sp.epsilon;
    j["c"] = sp.c;
    j["T"] = sp.horizon;
    j["tau"] = sp.tau;
    j["y0"] = r.params.y0;
    j["steps"] = r.t.size() - 1;
    j["z_nonincreasing"] = r.z_nonincreasing;
    j["max_z_increase"] = number(r.max_z_increase);
    j["y_below_majorant"] = r.y_below_majorant;
    j["fitted_exponent"] = r.fitted_exponent;
    j["expected_exponent"] = r.expected_exponent;
    j["exponent_error"] = r.exponent_error;
    j["crossing_time"] = number(r.crossing_time);
    j["majorant_crossing"] = r.majorant_crossing;
    j["tk_bound_horizon"] = number(r.tk_bound_horizon);
    j["tk_bound_literal"] = number(r.tk_bound_literal);
    j["tk_note"] = r.tk_note;
    report["weak"] = j;
    out << "Z nonincreasing: " << (r.z_nonincreasing ? "true" : "false") << "\n";
    out << "majorant exponent: " << format_number(r.fitted_exponent) << " (2 c eps = "
        << format_number(r.expected_exponent) << ")\n";
    out << "crossing time: " << format_number(r.crossing_time) << "\n";
    out << "note: " << r.tk_note << "\n";
    PlotSpec wp;
    wp.title = "weak blowup scenario";
    wp.x_label = "T - t";
    wp.y_label = "value";
    wp.log_x = true;
    wp.log_y = true;
    std::vector<double> gap(r.t.size());
    for (std::size_t i = 0; i < r.t.size(); ++i) gap[i] = sp.horizon - r.t[i];
    wp.series.push_back({"Y", gap, r.y, false});
    wp.series.push_back({"majorant", gap, r.majorant, true});
    wp.series.push_back({"strong lower bound", gap, r.lower_bound, true});
    write_text((dir / (o.name + "-weak.svg")).string(), render_svg(wp));
    std::ostringstream wcsv;
    wcsv << "t,Y,Z,majorant,lower_bound\n";
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      wcsv << format_number(r.t[i]) << ',' << format_number(r.y[i]) << ',' << format_number(r.z[i]) << ','
           << format_number(r.majorant[i]) << ',' << format_number(r.lower_bound[i]) << '\n';
    }
    write_text((dir / (o.name + "-weak.csv")).string(), wcsv.str());
  }
  if (lemma) {
    write_text((dir / (o.name + ".svg")).string(), render_svg(plot));
    write_text((dir / (o.name + ".csv")).string(), csv.str());
  }
  report["status"] = ok ? "pass" : "fail";
  write_json(dir / (o.name + ".json"), report);
  return ok ? kOk : kCheckFailed;
}

// --------------------------------------------------------------------------
// report

struct ReportOptions {
  std::string dir = ".";
  std::string csv;
  std::string svg;
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in(line);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
  if (!o.csv.empty()) {
    std::stringstream in(read_text(o.csv));
    std::string line;
    std::getline(in, line);
    const auto header = split(line, ',');
    if (header.size() < 2) throw InvalidDataError(o.csv + ": missing CSV header");
    PlotSpec plot;
    plot.title = fs::path(o.csv).stem().string();
    plot.x_label = header[0];
    plot.y_label = "value";
    plot.log_y = true;
    std::vector<PlotSeries> series(header.size() - 1);
    for (std::size_t k = 1; k < header.size(); ++k) series[k - 1].name = header[k];
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split(line, ',');
      if (cells.size() != header.size()) throw InvalidDataError(o.csv + ": ragged row");
      const double x = std::stod(cells[0]);
      for (std::size_t k = 1; k < cells.size(); ++k) {
        if (cells[k].empty()) continue;
        series[k - 1].x.push_back(x);
        series[k - 1].y.push_back(std::stod(cells[k]));
      }
    }
    for (auto& s : series) {
      // Residual columns change sign; they are not drawn on a log axis.
      if (s.name.rfind("res_", 0) == 0) continue;
      plot.series.push_back(std::move(s));
    }
    const std::string target = o.svg.empty() ? fs::path(o.csv).replace_extension(".svg").string() : o.svg;
    write_text(target, render_svg(plot));
    out << "wrote " << target << "\n";
    return kOk;
  }
  if (!fs::is_directory(o.dir)) throw ConfigError("not a directory: " + o.dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.dir)) {
    if (entry.path().extension() == ".json" && entry.path().filename() != "summary.json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Json rows = Json::array();
  bool all_pass = true;
  for (const auto& f : files) {
    Json j;
    try {
      j = Json::parse(read_text(f.string()));
    } catch (const Json::parse_error&) {
      continue;
    }
    if (!j.is_object() || !j.contains("command") || !j.contains("status")) continue;
    const std::string status = j["status"].get<std::string>();
    all_pass = all_pass && status == "pass";
    Json row = {{"file", f.filename().string()}, {"command", j["command"]}, {"status", status}};
    if (j.contains("inequality_id")) row["inequality_id"] = j["inequality_id"];
    rows.push_back(row);
    out << f.filename().string() << "  " << j["command"].get<std::string>() << "  " << status << "\n";
  }
  Json summary = {{"command", "report"}, {"version", kVersion}, {"config", {{"dir", o.dir}}},
                  {"reports", rows},     {"status", all_pass ? "pass" : "fail"}};
  write_json(fs::path(o.dir) / "summary.json", summary);
  out << rows.size() << " reports, " << (all_pass ? "all pass" : "some failed") << "\n";
  return all_pass ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  try {
    std::vector<std::string> args = merge_config(raw_args);

    CLI::App app{"Littlewood-Paley and Navier-Stokes inequality lab", "lplab"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", "JSON file with option values (flags override it)");

    GenOptions gen;
    auto* g = app.add_subcommand("gen-field", "write a random solenoidal field (FLD1 + JSON sidecar)");
    g->add_option("--n", gen.dim, "dimension (2 or 3)")->capture_default_str();
    g->add_option("--N", gen.size, "grid points per axis")->capture_default_str();
    g->add_option("--alpha", gen.alpha, "spectral decay exponent")->capture_default_str();
    g->add_option("--band", gen.band, "active band lo:hi (default 1:N/3)");
    g->add_option("--amplitude", gen.amplitude)->capture_default_str();
    g->add_option("--seed", gen.seed)->capture_default_str();
    g->add_option("--name", gen.name, "output base name")->capture_default_str();
    g->add_option("--out-dir", gen.out_dir)->capture_default_str();

    VerifyOptions ver;
    auto* v = app.add_subcommand("verify", "run inequality checks over random ensembles");
    v->add_option("--id", ver.id, "inequality id");
    v->add_flag("--all", ver.all, "run every registered inequality");
    v->add_option("--n", ver.dim)->capture_default_str();
    v->add_option("--N", ver.sizes, "grid sizes (repeatable)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    v->add_option("--samples", ver.samples, "samples per cell (lemma-5.2: total samples)");
    v->add_option("--seed", ver.seed)->capture_default_str();
    v->add_option("--calibration", ver.calibration, "calibration fraction");
    v->add_option("--profile", ver.profiles, "alpha:lo:hi with lo, hi fractions of N (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    std::map<std::string, double> exponent_values;
    for (const auto& name : kExponentFlags) {
      exponent_values[name] = kUnset;
      v->add_option("--" + name, exponent_values[name], "inequality parameter " + name);
    }
    v->add_option("--param", ver.params, "key=value inequality parameter (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    v->add_flag("--coherent", ver.coherent, "bernstein: phase-aligned fields");
    v->add_flag("--svg", ver.svg, "also write a per-profile plot");
    v->add_option("--name", ver.name, "output base name");
    v->add_option("--out-dir", ver.out_dir)->capture_default_str();

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "integrate Navier-Stokes and check the norm inequalities");
    s->add_option("--init", sim.init, "taylor-green, stokes-mode, random or file")->capture_default_str();
    s->add_option("--field", sim.field, "FLD1 file for --init file");
    s->add_option("--n", sim.dim)->capture_default_str();
    s->add_option("--N", sim.size)->capture_default_str();
    s->add_option("--nu", sim.nu)->capture_default_str();
    s->add_option("--dt", sim.dt)->capture_default_str();
    s->add_option("--t-end", sim.t_end)->capture_default_str();
    s->add_option("--record-every", sim.record_every)->capture_default_str();
    s->add_option("--field-every", sim.field_every, "store fields every k records")->capture_default_str();
    s->add_option("--cfl", sim.cfl)->capture_default_str();
    s->add_option("--seed", sim.seed)->capture_default_str();
    s->add_option("--alpha", sim.alpha)->capture_default_str();
    s->add_option("--band", sim.band, "random init band lo:hi");
    s->add_option("--amplitude", sim.amplitude)->capture_default_str();
    s->add_option("--mode", sim.mode, "stokes-mode wavenumber")->capture_default_str();
    s->add_option("--check", sim.checks, "energy, h32, besov, all or none (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    s->add_option("--c-h32", sim.c_h32, "constant for the h32 check (default: calibrate)");
    s->add_option("--c-besov", sim.c_besov, "constant for the summed Besov check (default: calibrate)");
    s->add_option("--calibration-samples", sim.calibration_samples)->capture_default_str();
    s->add_flag("--ode-overlay", sim.ode_overlay, "draw the ODE lower bound on the norm plot");
    s->add_option("--ode-c", sim.ode_c)->capture_default_str();
    s->add_option("--ode-gamma", sim.ode_gamma)->capture_default_str();
    s->add_option("--ode-T", sim.ode_T, "blowup time of the overlay");
    s->add_flag("--no-checkpoints", sim.no_checkpoints, "skip FLD1 checkpoint files");
    s->add_option("--name", sim.name)->capture_default_str();
    s->add_option("--out-dir", sim.out_dir)->capture_default_str();

    OdeOptions ode;
    auto* d = app.add_subcommand("ode", "comparison ODE and the weak blowup scenario");
    d->add_option("--scenario", ode.scenario, "lemma, weak, both or auto")->capture_default_str();
    d->add_option("--c", ode.c)->capture_default_str();
    d->add_option("--gamma", ode.gamma)->capture_default_str();
    d->add_option("--x0", ode.x0)->capture_default_str();
    d->add_option("--T", ode.T, "blowup time (lemma) or horizon (weak)");
    d->add_option("--dt", ode.dt)->capture_default_str();
    auto* eps = d->add_option("--eps", ode.eps, "weak scenario epsilon (default 0.1)");
    auto* tau = d->add_option("--tau", ode.tau)->capture_default_str();
    auto* y0 = d->add_option("--y0", ode.y0, "Y(tau) (default c^-2 (T - tau)^-1)");
    auto* gap = d->add_option("--stop-gap", ode.stop_gap)->capture_default_str();
    d->add_option("--name", ode.name)->capture_default_str();
    d->add_option("--out-dir", ode.out_dir)->capture_default_str();

    ReportOptions rep;
    auto* r = app.add_subcommand("report", "summarise reports in a directory or plot a CSV");
    r->add_option("--dir", rep.dir)->capture_default_str();
    r->add_option("--csv", rep.csv, "CSV to plot");
    r->add_option("--svg", rep.svg, "output SVG for --csv");

    try {
      std::reverse(args.begin(), args.end());
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kIoError;
    }

    if (*g) return cmd_gen_field(gen, out);
    if (*v) {
      for (const auto& [k, val] : exponent_values) {
        if (!std::isnan(val)) ver.exponents[k] = val;
      }
      return cmd_verify(ver, out, err);
    }
    if (*s) return cmd_simulate(sim, out);
    if (*d) {
      ode.weak_flags = eps->count() + tau->count() + y0->count() + gap->count() > 0;
      return cmd_ode(ode, out);
    }
    if (*r) return cmd_report(rep, out);
    return kIoError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const InvalidDataError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const NumericalAbort& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace lplab::cli
