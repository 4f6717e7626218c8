#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsbmo/calibration.hpp"
#include "nsbmo/norms.hpp"
#include "nsbmo/picard.hpp"
#include "nsbmo/trajectory.hpp"

namespace nsbmo::solver {

using json = nlohmann::json;

struct SolverConfig {
  /// Horizon of the global problems (truncation of t -> infinity).
  double horizon = 10.0;
  /// Graded mesh t_m = T (m / M)^grading of the small-data solve.
  int intervals = 64;
  double grading = 2.0;
  /// Picard stops once the X_T increment drops below tolerance * ||y||_{X_T}.
  double tolerance = 1e-10;
  int max_iterations = 40;
  /// Splitting target for ||w0||_dBMO (and ||V_w||_Z for the forced system).
  double epsilon = 0.1;
  bool dealias = true;

  /// First local horizon tried for the v equation; halved on refusal.
  double local_horizon = 1.0;
  int local_intervals = 48;
  int local_attempts = 8;
  /// tau = largest local node not above handoff * T_loc.
  double handoff = 0.5;
  /// Largest step of the energy continuation.
  double energy_step = 0.01;
  /// Sample times of the dBMO series (log spaced on [tau, horizon]).
  int series_points = 24;

  /// Bilinear constant eta. Zero means: calibration file, else a probe.
  double bilinear_constant = 0.0;
  std::filesystem::path calibration_file;
  int probe_samples = 10;
  std::uint64_t probe_seed = 7;

  norms::CarlesonSettings carleson;

  /// Throws InputError on inconsistent values.
  void validate() const;
};

void to_json(json& j, const SolverConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
SolverConfig solver_config_from_json(const json& j);

/// Outcome of one pipeline stage. Solver failures are reported, not thrown.
struct StageReport {
  std::string stage;
  std::string status = "ok";  // ok | refused | diverged | failed
  std::string message;
  json diagnostics = json::object();
  bool ok() const { return status == "ok"; }
};

/// eta for (grid, T) from the config, the calibration file, or a probe; the
/// source is recorded in provenance.
double resolve_bilinear_constant(const Grid& grid, const std::vector<double>& times, const SolverConfig& cfg,
                                 json* provenance = nullptr);

/// Relative residual of w = exp(t Lap) w0 - B(w, w) + F at all nodes, with B
/// re-summed directly (not by the recursion used while iterating). F may be null.
double ns_residual(const VectorTrajectory& w, const VectorField& w0, const VectorTrajectory* forcing, bool dealiased = true);

/// Relative residual of v = exp(t Lap) v0 - B(v, w) - B(w, v) - B(v, v) + F.
double perturbed_residual(const VectorTrajectory& v, const VectorField& v0, const VectorTrajectory& w,
                          const VectorTrajectory* forcing, bool dealiased = true);

struct SmallDataResult {
  StageReport report;
  std::optional<VectorTrajectory> solution;
  PicardResult<VectorTrajectory> picard;
  double eta = 0.0;
  double dbmo_initial = 0.0;
  double xt = 0.0;
  /// ||w||_{X_T} / ||w0||_dBMO (zero when w0 = 0).
  double ratio = 0.0;
  double residual = 0.0;
};

/// Koch-Tataru solve of w = exp(t Lap) w0 - B(w, w) (+ F) on the graded mesh of
/// cfg, by Picard iteration in X_T behind the smallness gate 4 eta ||y|| < 1.
/// forcing, when given, must live on that mesh.
SmallDataResult solve_small_data(const VectorField& w0, const SolverConfig& cfg, const VectorTrajectory* forcing = nullptr);

struct SplitResult {
  explicit SplitResult(const Grid& grid) : v0(grid), w0(grid) {}
  bool ok = false;
  VectorField v0;
  VectorField w0;
  int level = 0;  // v0 keeps |k| < 2^level
  double dbmo_w0 = 0.0;
  double best_epsilon = 0.0;
  std::vector<std::pair<int, double>> scan;  // (level, dBMO of the remainder)
  std::string message;
};

/// u0 = v0 + w0 with v0 the sharp low pass below 2^J and J minimal such that
/// ||w0||_dBMO <= epsilon. max_level caps the scan; without it the scan always
/// succeeds (w0 = 0 above the grid band).
SplitResult split_initial_data(const VectorField& u0, double epsilon, const norms::CarlesonSettings& settings = {},
                               std::optional<int> max_level = std::nullopt);

struct LocalResult {
  StageReport report;
  std::optional<VectorTrajectory> solution;
  PicardResult<VectorTrajectory> picard;
  double eta = 0.0;
  double lambda = 0.0;  // 2 eta ||w||_{X_T}
  double xt = 0.0;
  double yt = 0.0;
  double residual = 0.0;
};

/// v = exp(t Lap) v0 - B(v, w) - B(w, v) - B(v, v) (+ F) on the nodes of w, by
/// Picard iteration in X_T with Y_T tracked. Refused when 2 eta ||w||_{X_T} >= 1.
LocalResult solve_v_local(const VectorField& v0, const VectorTrajectory& w, const SolverConfig& cfg,
                          const VectorTrajectory* forcing = nullptr);

/// Terms of the energy balance of the v equation, cumulative from tau:
///   ||v(t)||^2 + 2 int ||grad v||^2 + 2 int <(v.grad) w, v> - 2 int <v, P div V> = ||v_tau||^2.
struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> dissipation;
  std::vector<double> cross;
  std::vector<double> forcing;
  double initial = 0.0;

  double residual(std::size_t i) const;
  /// max_i residual(i) relative to ||v_tau||^2 (absolute when that vanishes).
  double max_residual() const;
};

struct EnergyResult {
  StageReport report;
  /// States at tau and at every requested record time.
  std::optional<VectorTrajectory> states;
  EnergyLedger ledger;
  std::size_t steps = 0;
};

/// Step breakpoints on [tau, t_end]: every listed time is a node and each gap
/// is split uniformly into ceil(gap / step) steps.
std::vector<double> continuation_grid(double tau, double t_end, double step, const std::vector<double>& include);

/// Exponential time differencing (ETD2RK) for
///   dv/dt = Lap v - P[(v.grad)v + (w.grad)v + (v.grad)w] + P div V,
/// with w (and V) linear in time between their nodes. The heat factor is exact
/// per step; the nonlinearity gets a second-order Runge-Kutta correction.
EnergyResult energy_continuation(const VectorField& v_tau, const VectorTrajectory& w, double tau, double t_end,
                                 const SolverConfig& cfg, const std::vector<double>& record_times = {},
                                 const TensorTrajectory* force = nullptr);

struct ForceSplit {
  TensorTrajectory smooth;  // V_v
  TensorTrajectory rough;   // V_w
  int level = 0;
  double z_rough = 0.0;
  double l2l2_smooth = 0.0;
};

/// V = V_v + V_w with V_v the low pass below 2^J and J minimal with ||V_w||_Z <= epsilon.
ForceSplit split_force(const TensorTrajectory& force, double epsilon, const norms::CarlesonSettings& settings = {});

/// Force sampled on the given nodes; zero beyond its horizon.
TensorTrajectory force_on(const TensorTrajectory& force, const std::vector<double>& times);

struct GlobalResult {
  std::vector<StageReport> stages;
  StageReport failure;  // status ok when every stage passed
  std::optional<SplitResult> split;
  std::optional<SmallDataResult> small;
  std::optional<LocalResult> local;
  std::optional<EnergyResult> energy;
  double local_horizon = 0.0;
  double tau = 0.0;
  /// u = v + w on the local nodes up to tau and the record times after it.
  std::optional<VectorTrajectory> solution;
  std::vector<double> series_times;
  std::vector<double> series_dbmo;
  double growth_exponent = 0.0;
  double growth_constant = 0.0;  // max ||u(t)|| / (1 + t^max(delta, 0))
  double overlap_discrepancy = 0.0;

  bool ok() const { return failure.ok(); }
};

/// Splitting, small-data solve for w, local solve for v, energy continuation
/// from tau to the horizon, and reassembly u = v + w.
GlobalResult solve_global(const VectorField& u0, const SolverConfig& cfg, const TensorTrajectory* force = nullptr);

/// Least-squares slope of log y against log t over t in [t_max / 10, t_max];
/// zero when every y vanishes.
double fit_power_law(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace nsbmo::solver
