#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsbmo/calibration.hpp"
#include "nsbmo/norm_catalog.hpp"
#include "nsbmo/solver.hpp"

namespace nsbmo::harness {

using json = nlohmann::json;
using solver::NormPair;
using solver::SolverConfig;

/// One pass/fail verdict with its measured value and numeric tolerance.
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // how value is compared with tolerance, e.g. "<"
  json details = json::object();
};
void to_json(json& j, const Check& c);

Check check_below(std::string name, double value, double tolerance, json details = json::object());
Check check_at_least(std::string name, double value, double tolerance, json details = json::object());

/// Seeded scenario description shared by the sweeps.
struct ExperimentSpec {
  std::string scenario = "default";
  double side_length = 6.283185307179586;
  int resolution = 32;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  int samples = 10;
  std::vector<double> epsilons{0.0, 0.01, 0.05, 0.1};
  std::vector<double> amplitudes{1.0};
  std::vector<std::string> pairs{"xx"};
  /// Named numeric tolerances overriding the check defaults.
  json tolerances = json::object();
  SolverConfig solver;

  Grid grid() const { return Grid(side_length, resolution); }
  double tolerance(const std::string& key, double fallback) const;
  /// Throws InputError on empty sweep axes or invalid values.
  void validate() const;
};
void to_json(json& j, const ExperimentSpec& e);
ExperimentSpec experiment_from_json(const json& j);

// ---------------------------------------------------------------- bilinear

struct BilinearEstimate {
  NormPair pair = NormPair::xx;
  double side_length = 0.0;
  int resolution = 0;
  double horizon = 0.0;
  std::vector<double> ratios;
  std::vector<double> running_max;
  double max = 0.0;
  double median = 0.0;
};
void to_json(json& j, const BilinearEstimate& e);

/// Max and median of ||B(u,v)|| / (||u|| ||v||) over seeded heat-flow pairs on
/// a graded mesh of the horizon.
BilinearEstimate estimate_bilinear_constant(const Grid& grid, double horizon, NormPair pair, int samples,
                                            std::uint64_t seed, const norms::CarlesonSettings& settings = {},
                                            int intervals = 24);

struct BilinearStability {
  BilinearEstimate coarse;
  BilinearEstimate fine;
  double drift = 0.0;  // max(fine/coarse, coarse/fine) of the max ratios
  Check check;
};
void to_json(json& j, const BilinearStability& s);

/// The same protocol on N and 2N; passes when the max ratio is finite and drifts by less than max_drift.
BilinearStability bilinear_stability(const Grid& coarse, double horizon, NormPair pair, int samples, std::uint64_t seed,
                                     const norms::CarlesonSettings& settings = {}, double max_drift = 2.0);

/// Stores max and median under (grid, T, pair).
void record_calibration(solver::Calibration& cal, const BilinearEstimate& e);

// ---------------------------------------------------------------- energy

struct EnergyVerification {
  std::vector<double> times;
  std::vector<double> residuals;
  double max_residual = 0.0;
  Check check;
};
void to_json(json& j, const EnergyVerification& v);

EnergyVerification verify_energy_identity(const solver::EnergyLedger& ledger, double tolerance);

struct EnergyRefinement {
  std::vector<double> steps;
  std::vector<double> residuals;
  std::vector<double> reductions;  // residual(h) / residual(h / 2)
  Check check;
};
void to_json(json& j, const EnergyRefinement& r);

/// Continuation from tau to t_end at each step size (decreasing by halves);
/// passes when every halving at least halves the ledger residual.
EnergyRefinement verify_energy_refinement(const VectorField& v_tau, const VectorTrajectory& w, double tau,
                                          double t_end, SolverConfig cfg, const std::vector<double>& steps,
                                          double min_reduction = 2.0);

// ---------------------------------------------------------------- growth

struct GrowthPoint {
  double epsilon = 0.0;
  double exponent = 0.0;
  std::vector<double> times;
  std::vector<double> sup_energy;  // running sup of (||v||^2 + 2 int ||grad v||^2) / ||v_tau||^2
  double ledger_residual = 0.0;
};

struct GrowthReport {
  double tau = 0.0;
  double t_end = 0.0;
  std::vector<GrowthPoint> points;
  std::vector<Check> checks;
  bool passed() const;
};
void to_json(json& j, const GrowthReport& r);

/// Fixed scenario: v_tau and a w profile W0 with ||W0||_dBMO = 1 drawn from the
/// seed; for each epsilon, w solves the small-data problem from epsilon W0 and
/// v is continued from tau to 10 tau. The sign of W0 is chosen so that the
/// cross term feeds energy into v at tau. Exponents are the power-law slopes
/// of the running sup energy over [tau, 10 tau].
GrowthReport verify_growth_exponent(const ExperimentSpec& spec, double tau = 0.02);

// ---------------------------------------------------------------- scaling

struct ScalingRow {
  std::string norm;
  bool skipped = false;
  double original = 0.0;
  double rescaled = 0.0;
  double ratio = 0.0;
  double translation_gap = 0.0;  // relative change under a half-period shift
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  std::vector<Check> checks;
  bool passed() const;
};
void to_json(json& j, const ScalingReport& r);

/// Ratios ||dyadic_rescale(f)|| / ||f|| and translation gaps for each norm.
/// Besov rows must hold to besov_tol, dbmo to dbmo_tol, translation to translation_tol.
ScalingReport verify_scaling_invariance(const VectorField& f, const std::vector<norms::NormSpec>& selection,
                                        const norms::CarlesonSettings& settings = {}, double besov_tol = 1e-10,
                                        double dbmo_tol = 0.05, double translation_tol = 1e-12);

/// Critical norms used by default: L^2, three critical Besov norms and dBMO.
std::vector<norms::NormSpec> critical_norms();

// ---------------------------------------------------------------- embeddings

struct EmbeddingRow {
  std::string upstream;
  std::string downstream;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double max_ratio_rescaled = 0.0;
  double drift = 0.0;  // max(rescaled/original, original/rescaled) of max_ratio
};

struct EmbeddingReport {
  std::vector<std::string> chain;
  std::vector<EmbeddingRow> rows;
  int fields = 0;
  double homogeneity_defect = 0.0;
  double triangle_violation = 0.0;  // max of ||a+b|| - ||a|| - ||b|| relative to the sum
  std::vector<Check> checks;
  bool passed() const;
};
void to_json(json& j, const EmbeddingReport& r);

/// L^2 -> B^{2/p-1}_{p,q} -> B^{2/p-1}_{p,inf} -> dBMO -> B^{-1}_{inf,inf} on
/// seeded random fields, with norm axioms checked on consecutive pairs.
EmbeddingReport embedding_chain_report(const Grid& grid, int count, std::uint64_t seed, double p = 2.0, double q = 2.0,
                                       const norms::CarlesonSettings& settings = {}, double max_drift = 2.0,
                                       double axiom_tol = 1e-12);

// ---------------------------------------------------------------- VMO

struct OscillationProfile {
  std::vector<double> rho;
  std::vector<double> oscillation;  // sup over centers and radii <= rho
  /// oscillation(rho_0) / oscillation(rho_1) with rho_1 = 2 rho_0: about 1/2
  /// when the small-scale profile decays linearly, near 1 when it stalls.
  double decay_ratio = 0.0;
  double slope = 0.0;  // oscillation(rho_0) / rho_0
  bool vmo_like = false;
};
void to_json(json& j, const OscillationProfile& p);

/// Mean oscillation avg_B |f - avg_B f| over discs B(x, R), centers on the
/// lattice, with f evaluated on a lattice `refine` times finer by trigonometric
/// interpolation. rho runs over h 2^(i/2) up to L/4, h the lattice spacing.
template <int C>
OscillationProfile vmo_oscillation_profile(const Field<C>& f, int refine = 4);

// ---------------------------------------------------------------- Taylor-Green

struct TaylorGreenReport {
  double amplitude = 0.0;
  double local_error = 0.0;   // max relative L^2 error of the mild solve on [0, 1]
  double energy_error = 0.0;  // same for the continuation
  double ledger_residual = 0.0;
  // Self-convergence on Taylor-Green plus a small seeded perturbation, where the
  // schemes are not exact: successive differences at t = 1 and their ratios.
  std::vector<int> local_intervals;
  std::vector<double> local_differences;
  std::vector<double> energy_steps;
  std::vector<double> energy_differences;
  double local_ratio = 0.0;
  double energy_ratio = 0.0;
  std::vector<Check> checks;
  bool passed() const;
};
void to_json(json& j, const TaylorGreenReport& r);

TaylorGreenReport taylor_green_benchmark(const Grid& grid, double amplitude, const SolverConfig& cfg,
                                         double error_tol = 1e-6, double min_ratio = 3.5);

// ---------------------------------------------------------------- small data

struct SmallDataFamily {
  double eta = 0.0;
  double gate_fraction = 0.0;
  std::vector<double> dbmo;
  std::vector<int> iterations;
  std::vector<double> ratios;
  std::vector<double> max_contraction;
  std::vector<double> residuals;
  std::vector<double> rescaled_ratios;
  double spread = 0.0;          // max |ratio / median - 1|
  double rescale_spread = 0.0;  // max |rescaled / original - 1|
  std::vector<Check> checks;
  bool passed() const;
};
void to_json(json& j, const SmallDataFamily& f);

/// Seeded data scaled so that 4 eta ||exp(t Lap) w0||_{X_T} = gate_fraction,
/// solved by solve_small_data; the dyadic rescale of each datum is solved on
/// the quarter horizon for the covariance check.
SmallDataFamily small_data_family(const Grid& grid, const SolverConfig& cfg, int count, std::uint64_t seed,
                                  double gate_fraction = 0.5, int max_iterations = 20, double max_spread = 0.2);

}  // namespace nsbmo::harness

namespace nsbmo::harness {

// ---------------------------------------------------------------- suites

/// Named bundle of checks with its full report.
struct SuiteResult {
  std::string name;
  json report = json::object();
  std::vector<Check> checks;
  bool passed() const;
};
void to_json(json& j, const SuiteResult& s);

/// taylor_green, bilinear, energy, growth, scaling, embedding, vmo, small_data.
std::vector<std::string> suite_names();

/// Runs one suite on the grid and seed of the spec. Tolerances come from
/// spec.tolerances under the keys listed in the README. The bilinear suite
/// records its estimates in cal when given. Throws InputError for an unknown name.
SuiteResult run_suite(const std::string& name, const ExperimentSpec& spec, solver::Calibration* cal = nullptr);

}  // namespace nsbmo::harness
