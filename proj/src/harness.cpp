#include "nsbmo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "nsbmo/parallel.hpp"
#include "nsbmo/random_fields.hpp"
#include "nsbmo/report.hpp"
#include "nsbmo/scaling.hpp"
#include "nsbmo/spectral.hpp"

namespace nsbmo::harness {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double inner(const VectorField& a, const VectorField& b) {
  double sum = 0.0;
  for (int c = 0; c < 2; ++c) {
    auto x = a.component(c);
    auto y = b.component(c);
    for (std::size_t i = 0; i < x.size(); ++i) sum += (std::conj(x[i]) * y[i]).real();
  }
  return sum * a.grid().area();
}

double rel_l2_gap(const VectorField& a, const VectorField& b) {
  const double scale = spectral::l2_norm_spectral(b);
  const double gap = spectral::l2_norm_spectral(a - b);
  return scale > 0.0 ? gap / scale : gap;
}

double two_sided(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(a / b, b / a);
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

}  // namespace

void to_json(json& j, const Check& c) {
  j = json{{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}, {"relation", c.relation}};
  if (!c.details.empty()) j["details"] = c.details;
}

Check check_below(std::string name, double value, double tolerance, json details) {
  return Check{std::move(name), value < tolerance, value, tolerance, "<", std::move(details)};
}

Check check_at_least(std::string name, double value, double tolerance, json details) {
  return Check{std::move(name), value >= tolerance, value, tolerance, ">=", std::move(details)};
}

// ---------------------------------------------------------------- spec

double ExperimentSpec::tolerance(const std::string& key, double fallback) const {
  if (tolerances.contains(key)) return tolerances.at(key).get<double>();
  return fallback;
}

void ExperimentSpec::validate() const {
  if (!(side_length > 0.0) || resolution < 8 || resolution % 2) throw InputError("experiment: invalid grid");
  if (!(horizon > 0.0)) throw InputError("experiment: horizon must be positive");
  if (samples < 1) throw InputError("experiment: samples must be positive");
  if (epsilons.empty() || amplitudes.empty() || pairs.empty()) throw InputError("experiment: sweep axes must be non-empty");
  for (double e : epsilons) {
    if (e < 0.0) throw InputError("experiment: epsilons must be nonnegative");
  }
  for (const auto& p : pairs) solver::norm_pair_from_string(p);
  solver.validate();
}

void to_json(json& j, const ExperimentSpec& e) {
  j = json{{"scenario", e.scenario},
           {"L", e.side_length},
           {"N", e.resolution},
           {"horizon", e.horizon},
           {"seed", e.seed},
           {"samples", e.samples},
           {"epsilons", e.epsilons},
           {"amplitudes", e.amplitudes},
           {"pairs", e.pairs},
           {"tolerances", e.tolerances},
           {"solver", e.solver}};
}

ExperimentSpec experiment_from_json(const json& j) {
  if (!j.is_object()) throw InputError("experiment must be a JSON object");
  ExperimentSpec e;
  static const std::vector<std::string> keys{"scenario", "L",          "N",     "horizon",    "seed",  "samples",
                                             "epsilons", "amplitudes", "pairs", "tolerances", "solver"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw InputError("unknown experiment setting '" + key + "'");
  }
  try {
    e.scenario = j.value("scenario", e.scenario);
    e.side_length = j.value("L", e.side_length);
    e.resolution = j.value("N", e.resolution);
    e.horizon = j.value("horizon", e.horizon);
    e.seed = j.value("seed", e.seed);
    e.samples = j.value("samples", e.samples);
    e.epsilons = j.value("epsilons", e.epsilons);
    e.amplitudes = j.value("amplitudes", e.amplitudes);
    e.pairs = j.value("pairs", e.pairs);
    e.tolerances = j.value("tolerances", json::object());
  } catch (const json::exception& ex) {
    throw InputError(std::string("experiment: ") + ex.what());
  }
  if (j.contains("solver")) e.solver = solver::solver_config_from_json(j.at("solver"));
  e.validate();
  return e;
}

// ---------------------------------------------------------------- bilinear

void to_json(json& j, const BilinearEstimate& e) {
  j = json{{"pair", solver::to_string(e.pair)},
           {"grid", {{"L", e.side_length}, {"N", e.resolution}}},
           {"T", e.horizon},
           {"samples", e.ratios.size()},
           {"max", e.max},
           {"median", e.median},
           {"ratios", e.ratios},
           {"running_max", e.running_max}};
}

BilinearEstimate estimate_bilinear_constant(const Grid& grid, double horizon, NormPair pair, int samples,
                                            std::uint64_t seed, const norms::CarlesonSettings& settings, int intervals) {
  if (samples < 10) throw InputError("estimate_bilinear_constant: at least 10 samples");
  BilinearEstimate e;
  e.pair = pair;
  e.side_length = grid.side_length();
  e.resolution = grid.resolution();
  e.horizon = horizon;
  e.ratios = solver::bilinear_ratios(grid, graded_mesh(horizon, intervals), pair, samples, seed, settings);
  double run = 0.0;
  for (double r : e.ratios) {
    run = std::max(run, r);
    e.running_max.push_back(run);
  }
  e.max = run;
  e.median = median_of(e.ratios);
  return e;
}

void to_json(json& j, const BilinearStability& s) {
  j = json{{"coarse", s.coarse}, {"fine", s.fine}, {"drift", s.drift}, {"check", s.check}};
}

BilinearStability bilinear_stability(const Grid& coarse, double horizon, NormPair pair, int samples, std::uint64_t seed,
                                     const norms::CarlesonSettings& settings, double max_drift) {
  BilinearStability s;
  s.coarse = estimate_bilinear_constant(coarse, horizon, pair, samples, seed, settings);
  const Grid fine(coarse.side_length(), 2 * coarse.resolution());
  s.fine = estimate_bilinear_constant(fine, horizon, pair, samples, seed, settings);
  s.drift = two_sided(s.coarse.max, s.fine.max);
  const bool finite = std::isfinite(s.coarse.max) && std::isfinite(s.fine.max);
  s.check = check_below("bilinear_" + solver::to_string(pair), finite ? s.drift : std::numeric_limits<double>::infinity(),
                        max_drift, {{"max_N", s.coarse.max}, {"max_2N", s.fine.max}});
  return s;
}

void record_calibration(solver::Calibration& cal, const BilinearEstimate& e) {
  solver::CalibrationEntry entry;
  entry.side_length = e.side_length;
  entry.resolution = e.resolution;
  entry.horizon = e.horizon;
  entry.pair = e.pair;
  entry.eta = e.max;
  entry.median = e.median;
  entry.samples = static_cast<int>(e.ratios.size());
  cal.upsert(entry);
}

// ---------------------------------------------------------------- energy

void to_json(json& j, const EnergyVerification& v) {
  j = json{{"times", v.times}, {"residuals", v.residuals}, {"max_residual", v.max_residual}, {"check", v.check}};
}

EnergyVerification verify_energy_identity(const solver::EnergyLedger& ledger, double tolerance) {
  EnergyVerification v;
  v.times = ledger.times;
  for (std::size_t i = 0; i < ledger.times.size(); ++i) v.residuals.push_back(ledger.residual(i));
  v.max_residual = ledger.max_residual();
  v.check = Check{"energy_identity", v.max_residual <= tolerance, v.max_residual, tolerance, "<=", json::object()};
  return v;
}

void to_json(json& j, const EnergyRefinement& r) {
  j = json{{"steps", r.steps}, {"residuals", r.residuals}, {"reductions", r.reductions}, {"check", r.check}};
}

EnergyRefinement verify_energy_refinement(const VectorField& v_tau, const VectorTrajectory& w, double tau,
                                          double t_end, SolverConfig cfg, const std::vector<double>& steps,
                                          double min_reduction) {
  if (steps.size() < 2) throw InputError("verify_energy_refinement: need at least two step sizes");
  EnergyRefinement r;
  r.steps = steps;
  for (double h : steps) {
    cfg.energy_step = h;
    const auto e = solver::energy_continuation(v_tau, w, tau, t_end, cfg);
    r.residuals.push_back(e.report.ok() ? e.ledger.max_residual() : std::numeric_limits<double>::infinity());
  }
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < r.residuals.size(); ++i) {
    const double red = r.residuals[i] > 0.0 ? r.residuals[i - 1] / r.residuals[i] : std::numeric_limits<double>::infinity();
    r.reductions.push_back(red);
    worst = std::min(worst, red);
  }
  r.check = check_at_least("energy_refinement", worst, min_reduction, {{"residuals", r.residuals}});
  return r;
}

// ---------------------------------------------------------------- growth

bool GrowthReport::passed() const { return all_passed(checks); }

void to_json(json& j, const GrowthReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"epsilon", p.epsilon},
                      {"exponent", p.exponent},
                      {"times", p.times},
                      {"sup_energy", p.sup_energy},
                      {"ledger_residual", p.ledger_residual}});
  }
  j = json{{"tau", r.tau}, {"t_end", r.t_end}, {"points", points}, {"checks", r.checks}};
}

GrowthReport verify_growth_exponent(const ExperimentSpec& spec, double tau) {
  spec.validate();
  if (!(tau > 0.0)) throw InputError("verify_growth_exponent: tau must be positive");
  GrowthReport out;
  const Grid g = spec.grid();
  out.tau = tau;
  out.t_end = 10.0 * tau;

  const auto v_tau = sampling::random_divergence_free(g, spec.seed, {.slope = 1.0, .max_mode = 3, .l2_norm = 1.0});
  auto profile = sampling::random_divergence_free(g, spec.seed + 1, {.slope = 1.0, .max_mode = 5, .l2_norm = 1.0});
  profile *= 1.0 / norms::dbmo_norm(profile, spec.solver.carleson);
  // the ledger carries +2 int <(v.grad) w, v>; a negative rate injects energy
  const auto w_tau = spectral::heat_propagate(profile, tau);
  if (inner(v_tau, spectral::nonlinear_term(v_tau, w_tau, spec.solver.dealias)) > 0.0) profile *= -1.0;

  SolverConfig cfg = spec.solver;
  cfg.horizon = out.t_end;
  cfg.energy_step = std::min(cfg.energy_step, (out.t_end - tau) / 400.0);
  std::vector<double> record;
  for (int i = 0; i <= 40; ++i) record.push_back(tau * std::pow(10.0, i / 40.0));
  record.back() = out.t_end;

  for (double eps : spec.epsilons) {
    GrowthPoint p;
    p.epsilon = eps;
    VectorTrajectory w = VectorTrajectory::zeros(g, graded_mesh(out.t_end, cfg.intervals, cfg.grading));
    if (eps > 0.0) {
      const auto small = solver::solve_small_data(eps * profile, cfg);
      if (!small.solution) {
        out.checks.push_back(Check{"growth_small_data_eps_" + std::to_string(eps), false, eps, 0.0, "solved",
                                   {{"message", small.report.message}}});
        out.points.push_back(p);
        continue;
      }
      w = *small.solution;
    }
    const auto e = solver::energy_continuation(v_tau, w, tau, out.t_end, cfg, record);
    const auto& L = e.ledger;
    double run = 0.0;
    for (std::size_t i = 0; i < L.times.size(); ++i) {
      run = std::max(run, (L.energy[i] + L.dissipation[i]) / L.initial);
      if (std::binary_search(record.begin(), record.end(), L.times[i])) {
        p.times.push_back(L.times[i]);
        p.sup_energy.push_back(run);
      }
    }
    p.exponent = solver::fit_power_law(p.times, p.sup_energy);
    p.ledger_residual = L.max_residual();
    out.points.push_back(p);
  }

  const double zero_tol = spec.tolerance("growth_zero", 0.02);
  double worst_drop = 0.0;
  std::vector<std::pair<double, double>> positive;
  for (const auto& p : out.points) {
    if (p.epsilon == 0.0) {
      out.checks.push_back(check_below("growth_exponent_eps0", std::abs(p.exponent), zero_tol));
    } else {
      positive.emplace_back(p.epsilon, p.exponent);
    }
  }
  std::sort(positive.begin(), positive.end());
  for (std::size_t i = 1; i < positive.size(); ++i) {
    worst_drop = std::max(worst_drop, positive[i - 1].second - positive[i].second);
  }
  json exps = json::array();
  for (const auto& [e, x] : positive) exps.push_back({{"epsilon", e}, {"exponent", x}});
  out.checks.push_back(Check{"growth_nondecreasing", worst_drop <= 0.0, worst_drop, 0.0, "<=", {{"exponents", exps}}});
  return out;
}

// ---------------------------------------------------------------- scaling

bool ScalingReport::passed() const { return all_passed(checks); }

void to_json(json& j, const ScalingReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"norm", row.norm},
                    {"skipped", row.skipped},
                    {"original", row.original},
                    {"rescaled", row.rescaled},
                    {"ratio", row.ratio},
                    {"translation_gap", row.translation_gap}});
  }
  j = json{{"rows", rows}, {"checks", r.checks}};
}

std::vector<norms::NormSpec> critical_norms() {
  const double inf = norms::kInfinity;
  return {{"lebesgue", 0.0, 2.0, 2.0},
          {"besov", -1.0, inf, inf},
          {"besov", 0.0, 2.0, 2.0},
          {"besov", -0.5, 4.0, 2.0},
          {"dbmo", 0.0, 2.0, 2.0}};
}

ScalingReport verify_scaling_invariance(const VectorField& f, const std::vector<norms::NormSpec>& selection,
                                        const norms::CarlesonSettings& settings, double besov_tol, double dbmo_tol,
                                        double translation_tol) {
  ScalingReport out;
  const auto up = spectral::dyadic_rescale(f, spectral::RescaleDirection::up);
  const double half = 0.5 * f.grid().side_length();
  const auto shifted = spectral::translate(f, half, half);
  double exact_worst = 0.0, dbmo_worst = 0.0, shift_worst = 0.0;
  bool any_exact = false, any_dbmo = false;
  for (const auto& spec : selection) {
    if (!norms::is_field_norm(spec.name)) throw InputError("scaling check needs field norms, got '" + spec.name + "'");
    ScalingRow row;
    row.norm = norms::label(spec);
    row.original = norms::evaluate(spec, f, settings).value;
    if (!(row.original > 0.0)) {
      row.skipped = true;
      out.rows.push_back(row);
      continue;
    }
    row.rescaled = norms::evaluate(spec, up, settings).value;
    row.ratio = row.rescaled / row.original;
    row.translation_gap = std::abs(norms::evaluate(spec, shifted, settings).value - row.original) / row.original;
    shift_worst = std::max(shift_worst, row.translation_gap);
    if (spec.name == "besov" || (spec.name == "lebesgue" && spec.p == 2.0)) {
      // only the critical index s = 2/p - 1 is invariant
      if (spec.name == "lebesgue" || std::abs(spec.s - (2.0 / spec.p - 1.0)) < 1e-14) {
        exact_worst = std::max(exact_worst, std::abs(row.ratio - 1.0));
        any_exact = true;
      }
    } else if (spec.name == "dbmo") {
      dbmo_worst = std::max(dbmo_worst, std::abs(row.ratio - 1.0));
      any_dbmo = true;
    }
    out.rows.push_back(row);
  }
  if (any_exact) out.checks.push_back(check_below("scaling_besov", exact_worst, besov_tol));
  if (any_dbmo) out.checks.push_back(check_below("scaling_dbmo", dbmo_worst, dbmo_tol));
  out.checks.push_back(check_below("translation", shift_worst, translation_tol));
  return out;
}

// ---------------------------------------------------------------- embeddings

bool EmbeddingReport::passed() const { return all_passed(checks); }

void to_json(json& j, const EmbeddingReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"upstream", row.upstream},
                    {"downstream", row.downstream},
                    {"max_ratio", row.max_ratio},
                    {"min_ratio", row.min_ratio},
                    {"max_ratio_rescaled", row.max_ratio_rescaled},
                    {"drift", row.drift}});
  }
  j = json{{"chain", r.chain},
           {"rows", rows},
           {"fields", r.fields},
           {"homogeneity_defect", r.homogeneity_defect},
           {"triangle_violation", r.triangle_violation},
           {"checks", r.checks}};
}

EmbeddingReport embedding_chain_report(const Grid& grid, int count, std::uint64_t seed, double p, double q,
                                       const norms::CarlesonSettings& settings, double max_drift, double axiom_tol) {
  if (count < 2) throw InputError("embedding_chain_report: need at least two fields");
  const double inf = norms::kInfinity;
  const double s = 2.0 / p - 1.0;
  const std::vector<norms::NormSpec> chain{
      {"lebesgue", 0.0, 2.0, 2.0}, {"besov", s, p, q}, {"besov", s, p, inf}, {"dbmo", 0.0, 2.0, 2.0}, {"besov", -1.0, inf, inf}};
  EmbeddingReport out;
  out.fields = count;
  for (const auto& c : chain) out.chain.push_back(norms::label(c));

  std::vector<VectorField> fields;
  for (int i = 0; i < count; ++i) {
    sampling::SpectrumSpec spec;
    spec.slope = 1.0 + 0.5 * (i % 3);
    fields.push_back(sampling::random_divergence_free(grid, seed + static_cast<std::uint64_t>(i), spec));
  }
  auto table = [&](const std::vector<VectorField>& fs) {
    std::vector<std::vector<double>> values(fs.size(), std::vector<double>(chain.size()));
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t k = 0; k < chain.size(); ++k) values[i][k] = norms::evaluate(chain[k], fs[i], settings).value;
    }
    return values;
  };
  const auto base = table(fields);
  std::vector<VectorField> rescaled;
  for (const auto& f : fields) rescaled.push_back(spectral::dyadic_rescale(f, spectral::RescaleDirection::up));
  const auto up = table(rescaled);

  double worst_drift = 0.0;
  bool finite = true;
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    EmbeddingRow row;
    row.upstream = out.chain[k];
    row.downstream = out.chain[k + 1];
    row.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const double r = base[i][k + 1] / base[i][k];
      row.max_ratio = std::max(row.max_ratio, r);
      row.min_ratio = std::min(row.min_ratio, r);
      row.max_ratio_rescaled = std::max(row.max_ratio_rescaled, up[i][k + 1] / up[i][k]);
    }
    row.drift = two_sided(row.max_ratio, row.max_ratio_rescaled);
    finite = finite && std::isfinite(row.max_ratio) && std::isfinite(row.max_ratio_rescaled);
    worst_drift = std::max(worst_drift, row.drift);
    out.rows.push_back(row);
  }

  // axioms on consecutive pairs: ||a f|| = |a| ||f|| and ||f + g|| <= ||f|| + ||g||
  const double alpha = -2.5;
  for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
    const auto scaled = alpha * fields[i];
    const auto sum = fields[i] + fields[i + 1];
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const double a = base[i][k], b = base[i + 1][k];
      const double h = norms::evaluate(chain[k], scaled, settings).value;
      out.homogeneity_defect = std::max(out.homogeneity_defect, std::abs(h - std::abs(alpha) * a) / (std::abs(alpha) * a));
      const double t = norms::evaluate(chain[k], sum, settings).value;
      out.triangle_violation = std::max(out.triangle_violation, (t - a - b) / (a + b));
    }
  }
  out.checks.push_back(check_below("embedding_drift", finite ? worst_drift : std::numeric_limits<double>::infinity(), max_drift));
  out.checks.push_back(check_below("norm_homogeneity", out.homogeneity_defect, axiom_tol));
  out.checks.push_back(Check{"norm_triangle", out.triangle_violation <= axiom_tol, out.triangle_violation, axiom_tol, "<=", json::object()});
  return out;
}

// ---------------------------------------------------------------- VMO

void to_json(json& j, const OscillationProfile& p) {
  j = json{{"rho", p.rho},
           {"oscillation", p.oscillation},
           {"decay_ratio", p.decay_ratio},
           {"slope", p.slope},
           {"vmo_like", p.vmo_like}};
}

template <int C>
OscillationProfile vmo_oscillation_profile(const Field<C>& f, int refine) {
  if (refine < 1) throw InputError("vmo_oscillation_profile: refine must be positive");
  const Grid& g = f.grid();
  const int n = g.resolution();
  const int nf = n * refine;
  const auto fine = spectral::to_physical(spectral::resample(f, nf));
  const double hf = g.spacing() / refine;

  OscillationProfile out;
  std::vector<double> radii;
  for (int i = 0;; ++i) {
    const double r = g.spacing() * std::pow(2.0, 0.5 * i);
    if (r > 0.25 * g.side_length() * (1 + 1e-12)) break;
    radii.push_back(r);
  }
  std::vector<double> per_radius(radii.size(), 0.0);
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double R = radii[ri];
    const int reach = static_cast<int>(std::floor(R / hf));
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        if ((dx * dx + dy * dy) * hf * hf <= R * R) offsets.emplace_back(dy, dx);
      }
    }
    const double count = static_cast<double>(offsets.size());
    std::vector<double> row_best(static_cast<std::size_t>(n), 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t cy) {
      double best = 0.0;
      for (int cx = 0; cx < n; ++cx) {
        const int y0 = static_cast<int>(cy) * refine, x0 = cx * refine;
        std::array<double, static_cast<std::size_t>(C)> mean{};
        for (const auto& [dy, dx] : offsets) {
          const std::size_t p = static_cast<std::size_t>(((y0 + dy) % nf + nf) % nf) * static_cast<std::size_t>(nf) +
                                static_cast<std::size_t>(((x0 + dx) % nf + nf) % nf);
          for (int c = 0; c < C; ++c) mean[static_cast<std::size_t>(c)] += fine.values[static_cast<std::size_t>(c)][p];
        }
        for (auto& m : mean) m /= count;
        double osc = 0.0;
        for (const auto& [dy, dx] : offsets) {
          const std::size_t p = static_cast<std::size_t>(((y0 + dy) % nf + nf) % nf) * static_cast<std::size_t>(nf) +
                                static_cast<std::size_t>(((x0 + dx) % nf + nf) % nf);
          double d2 = 0.0;
          for (int c = 0; c < C; ++c) {
            const double d = fine.values[static_cast<std::size_t>(c)][p] - mean[static_cast<std::size_t>(c)];
            d2 += d * d;
          }
          osc += std::sqrt(d2);
        }
        best = std::max(best, osc / count);
      }
      row_best[cy] = best;
    });
    per_radius[ri] = *std::max_element(row_best.begin(), row_best.end());
  }
  double run = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    run = std::max(run, per_radius[i]);
    out.rho.push_back(radii[i]);
    out.oscillation.push_back(run);
  }
  if (out.rho.size() >= 3 && out.oscillation[2] > 0.0) {
    out.decay_ratio = out.oscillation[0] / out.oscillation[2];
    out.slope = out.oscillation[0] / out.rho[0];
    out.vmo_like = out.decay_ratio < 0.75;
  } else {
    out.vmo_like = true;
  }
  return out;
}

template OscillationProfile vmo_oscillation_profile(const Field<1>&, int);
template OscillationProfile vmo_oscillation_profile(const Field<2>&, int);

// ---------------------------------------------------------------- Taylor-Green

bool TaylorGreenReport::passed() const { return all_passed(checks); }

void to_json(json& j, const TaylorGreenReport& r) {
  j = json{{"amplitude", r.amplitude},
           {"local_error", r.local_error},
           {"energy_error", r.energy_error},
           {"ledger_residual", r.ledger_residual},
           {"local_intervals", r.local_intervals},
           {"local_differences", r.local_differences},
           {"energy_steps", r.energy_steps},
           {"energy_differences", r.energy_differences},
           {"local_ratio", r.local_ratio},
           {"energy_ratio", r.energy_ratio},
           {"checks", r.checks}};
}

TaylorGreenReport taylor_green_benchmark(const Grid& grid, double amplitude, const SolverConfig& cfg_in,
                                         double error_tol, double min_ratio) {
  TaylorGreenReport out;
  out.amplitude = amplitude;
  SolverConfig cfg = cfg_in;
  if (!(cfg.bilinear_constant > 0.0)) cfg.bilinear_constant = 1.0;  // w = 0: the gate only sees lambda = 0
  const double T = 1.0;
  const auto tg = sampling::taylor_green(grid, amplitude);
  const double rate = 2.0 * std::pow(2.0 * std::numbers::pi / grid.side_length(), 2);
  auto exact = [&](double t) { return std::exp(-rate * t) * tg; };
  auto err_vs_exact = [&](const VectorTrajectory& traj) {
    double e = 0.0;
    for (std::size_t m = 0; m < traj.size(); ++m) e = std::max(e, rel_l2_gap(traj.slice(m), exact(traj.time(m))));
    return e;
  };

  const auto local_times = graded_mesh(T, cfg.local_intervals, cfg.grading);
  const auto zero_local = VectorTrajectory::zeros(grid, local_times);
  const auto local = solver::solve_v_local(tg, zero_local, cfg);
  out.local_error = local.solution ? err_vs_exact(*local.solution) : std::numeric_limits<double>::infinity();

  const auto zero_w = VectorTrajectory::zeros(grid, uniform_mesh(0.0, T, 4));
  std::vector<double> record;
  for (int i = 1; i <= 10; ++i) record.push_back(0.1 * i);
  const auto cont = solver::energy_continuation(tg, zero_w, 0.0, T, cfg, record);
  out.energy_error = cont.states ? err_vs_exact(*cont.states) : std::numeric_limits<double>::infinity();
  out.ledger_residual = cont.ledger.max_residual();

  // self-convergence on a perturbed datum
  const auto bump = sampling::random_divergence_free(grid, 99, {.slope = 2.0, .max_mode = 4, .l2_norm = 1.0});
  const auto datum = tg + 0.2 * spectral::l2_norm_spectral(tg) * bump;
  std::vector<VectorField> finals;
  for (int M : {16, 32, 64}) {
    out.local_intervals.push_back(M);
    const auto z = VectorTrajectory::zeros(grid, graded_mesh(T, M, cfg.grading));
    const auto r = solver::solve_v_local(datum, z, cfg);
    finals.push_back(r.solution ? r.solution->slice(r.solution->size() - 1) : VectorField(grid));
  }
  for (std::size_t i = 1; i < finals.size(); ++i) out.local_differences.push_back(spectral::l2_norm_spectral(finals[i] - finals[i - 1]));
  finals.clear();
  for (double h : {0.04, 0.02, 0.01}) {
    out.energy_steps.push_back(h);
    SolverConfig c = cfg;
    c.energy_step = h;
    const auto e = solver::energy_continuation(datum, zero_w, 0.0, T, c);
    finals.push_back(e.states ? e.states->slice(e.states->size() - 1) : VectorField(grid));
  }
  for (std::size_t i = 1; i < finals.size(); ++i) out.energy_differences.push_back(spectral::l2_norm_spectral(finals[i] - finals[i - 1]));
  auto ratio = [](const std::vector<double>& d) {
    if (d[0] == 0.0 && d[1] == 0.0) return std::numeric_limits<double>::infinity();  // nothing left to converge
    return d[1] > 0.0 ? d[0] / d[1] : std::numeric_limits<double>::infinity();
  };
  out.local_ratio = ratio(out.local_differences);
  out.energy_ratio = ratio(out.energy_differences);

  out.checks.push_back(check_below("tg_local_error", out.local_error, error_tol));
  out.checks.push_back(check_below("tg_energy_error", out.energy_error, error_tol));
  out.checks.push_back(check_at_least("tg_local_order_ratio", out.local_ratio, min_ratio));
  out.checks.push_back(check_at_least("tg_energy_order_ratio", out.energy_ratio, min_ratio));
  return out;
}

// ---------------------------------------------------------------- small data

bool SmallDataFamily::passed() const { return all_passed(checks); }

void to_json(json& j, const SmallDataFamily& f) {
  j = json{{"eta", f.eta},
           {"gate_fraction", f.gate_fraction},
           {"dbmo", f.dbmo},
           {"iterations", f.iterations},
           {"ratios", f.ratios},
           {"max_contraction", f.max_contraction},
           {"residuals", f.residuals},
           {"rescaled_ratios", f.rescaled_ratios},
           {"spread", f.spread},
           {"rescale_spread", f.rescale_spread},
           {"checks", f.checks}};
}

SmallDataFamily small_data_family(const Grid& grid, const SolverConfig& cfg_in, int count, std::uint64_t seed,
                                  double gate_fraction, int max_iterations, double max_spread) {
  if (count < 1) throw InputError("small_data_family: count must be positive");
  if (!(gate_fraction > 0.0 && gate_fraction < 1.0)) throw InputError("small_data_family: gate_fraction must lie in (0, 1)");
  SmallDataFamily out;
  out.gate_fraction = gate_fraction;
  SolverConfig cfg = cfg_in;
  const auto times = graded_mesh(cfg.horizon, cfg.intervals, cfg.grading);
  out.eta = solver::resolve_bilinear_constant(grid, times, cfg);
  cfg.bilinear_constant = out.eta;
  SolverConfig cfg_up = cfg;
  cfg_up.horizon = cfg.horizon / 4.0;

  int worst_iterations = 0;
  double worst_contraction = 0.0, worst_residual = 0.0;
  bool all_converged = true;
  for (int i = 0; i < count; ++i) {
    sampling::SpectrumSpec spec;
    spec.slope = 1.0;
    auto w0 = sampling::random_divergence_free(grid, seed + static_cast<std::uint64_t>(i), spec);
    const double y = norms::xt_norm(heat_trajectory(w0, times), cfg.horizon, cfg.carleson);
    w0 *= gate_fraction / (4.0 * out.eta * y);
    const auto r = solver::solve_small_data(w0, cfg);
    out.dbmo.push_back(r.dbmo_initial);
    out.iterations.push_back(r.picard.iterations);
    out.ratios.push_back(r.ratio);
    out.max_contraction.push_back(r.picard.max_contraction_ratio());
    out.residuals.push_back(r.residual);
    all_converged = all_converged && r.solution.has_value();
    worst_iterations = std::max(worst_iterations, r.picard.iterations);
    worst_contraction = std::max(worst_contraction, r.picard.max_contraction_ratio());
    worst_residual = std::max(worst_residual, r.residual);
    const auto up = solver::solve_small_data(spectral::dyadic_rescale(w0, spectral::RescaleDirection::up), cfg_up);
    out.rescaled_ratios.push_back(up.ratio);
    all_converged = all_converged && up.solution.has_value();
    out.rescale_spread = std::max(out.rescale_spread, r.ratio > 0.0 ? std::abs(up.ratio / r.ratio - 1.0) : 1.0);
  }
  const double med = median_of(out.ratios);
  for (double r : out.ratios) out.spread = std::max(out.spread, med > 0.0 ? std::abs(r / med - 1.0) : 1.0);

  out.checks.push_back(Check{"small_data_converged", all_converged, all_converged ? 1.0 : 0.0, 1.0, "==", json::object()});
  out.checks.push_back(Check{"small_data_iterations", worst_iterations <= max_iterations, static_cast<double>(worst_iterations),
                             static_cast<double>(max_iterations), "<=", json::object()});
  out.checks.push_back(check_below("small_data_contraction", worst_contraction, 1.0));
  out.checks.push_back(check_below("small_data_residual", worst_residual, 1e-6));
  out.checks.push_back(check_below("small_data_ratio_spread", out.spread, max_spread, {{"median", med}}));
  out.checks.push_back(check_below("small_data_rescale_spread", out.rescale_spread, max_spread));
  return out;
}

// ---------------------------------------------------------------- suites

bool SuiteResult::passed() const { return all_passed(checks); }

void to_json(json& j, const SuiteResult& s) {
  j = json{{"name", s.name}, {"passed", s.passed()}, {"checks", s.checks}, {"report", s.report}};
}

std::vector<std::string> suite_names() {
  return {"taylor_green", "bilinear", "energy", "growth", "scaling", "embedding", "vmo", "small_data"};
}

namespace {

template <class R>
void absorb(SuiteResult& s, const std::string& key, const R& r, const std::vector<Check>& checks) {
  s.report[key] = r;
  s.checks.insert(s.checks.end(), checks.begin(), checks.end());
}

SuiteResult energy_suite(const ExperimentSpec& spec) {
  SuiteResult s{"energy", json::object(), {}};
  const Grid g = spec.grid();
  SolverConfig cfg = spec.solver;
  const auto zero_w = VectorTrajectory::zeros(g, graded_mesh(1.0, 8));

  const auto stokes = sampling::random_divergence_free(g, spec.seed, {.slope = 2.0, .max_mode = 6, .l2_norm = 1e-8});
  auto e = solver::energy_continuation(stokes, zero_w, 0.0, 1.0, cfg);
  auto v = verify_energy_identity(e.ledger, spec.tolerance("energy_stokes", 1e-10));
  v.check.name = "energy_stokes";
  absorb(s, "stokes", v, {v.check});

  e = solver::energy_continuation(sampling::taylor_green(g), zero_w, 0.0, 1.0, cfg);
  v = verify_energy_identity(e.ledger, spec.tolerance("energy_tg", 1e-6));
  v.check.name = "energy_taylor_green";
  absorb(s, "taylor_green", v, {v.check});

  e = solver::energy_continuation(VectorField(g), zero_w, 0.0, 1.0, cfg);
  v = verify_energy_identity(e.ledger, 0.0);
  v.check.name = "energy_zero";
  absorb(s, "zero", v, {v.check});

  // coupled v-w scenario
  SolverConfig wc = cfg;
  wc.horizon = 1.0;
  if (!(wc.bilinear_constant > 0.0)) wc.bilinear_constant = 0.1;
  auto w0 = sampling::random_divergence_free(g, spec.seed + 1, {.slope = 1.0, .max_mode = 8, .l2_norm = 1.0});
  w0 *= 0.3 / norms::dbmo_norm(w0, cfg.carleson);
  const auto w = solver::solve_small_data(w0, wc);
  if (!w.solution) {
    s.checks.push_back(Check{"energy_coupled_w", false, 0.0, 0.0, "solved", {{"message", w.report.message}}});
    return s;
  }
  const auto vt = sampling::random_divergence_free(g, spec.seed + 2, {.slope = 1.0, .max_mode = 6, .l2_norm = 1.0});
  const auto r = verify_energy_refinement(vt, *w.solution, 0.1, 0.6, cfg, {0.02, 0.01, 0.005},
                                          spec.tolerance("energy_refinement", 2.0));
  absorb(s, "coupled", r, {r.check});
  return s;
}

SuiteResult vmo_suite(const ExperimentSpec& spec) {
  SuiteResult s{"vmo", json::object(), {}};
  const Grid g = spec.grid();
  ScalarField constant(g);
  constant.mode(0, 0, 0) = 1.0;
  const auto flat = vmo_oscillation_profile(constant);
  s.report["constant"] = flat;
  s.checks.push_back(check_below("vmo_constant", *std::max_element(flat.oscillation.begin(), flat.oscillation.end()), 1e-12));

  // cos(k x): the small-disc oscillation of a C^1 function is |grad f| 4 / (3 pi) R
  ScalarField wave(g);
  wave.mode(0, 0, 1) = 0.5;
  wave.mode(0, 0, -1) = 0.5;
  const auto smooth = vmo_oscillation_profile(wave);
  const auto grad = norms::gradient_magnitude_samples(wave);
  const double expected = *std::max_element(grad.begin(), grad.end()) * 4.0 / (3.0 * std::numbers::pi);
  s.report["smooth"] = smooth;
  s.report["smooth_expected_slope"] = expected;
  s.checks.push_back(check_below("vmo_smooth_slope", std::abs(smooth.slope / expected - 1.0), spec.tolerance("vmo_slope", 0.2)));
  s.checks.push_back(Check{"vmo_smooth_vanishes", smooth.vmo_like, smooth.decay_ratio, 0.75, "<", json::object()});

  auto samples = spectral::to_physical(wave);
  samples.values[0][static_cast<std::size_t>(g.resolution() / 3) * static_cast<std::size_t>(g.resolution() + 1)] += 1.0;
  const auto jump = vmo_oscillation_profile(spectral::to_spectral(samples));
  s.report["jump"] = jump;
  s.checks.push_back(Check{"vmo_jump_flagged", !jump.vmo_like, jump.decay_ratio, 0.75, ">=", json::object()});
  return s;
}

}  // namespace

SuiteResult run_suite(const std::string& name, const ExperimentSpec& spec, solver::Calibration* cal) {
  spec.validate();
  const Grid g = spec.grid();
  SuiteResult s{name, json::object(), {}};
  if (name == "taylor_green") {
    for (double a : spec.amplitudes) {
      const auto r = taylor_green_benchmark(g, a, spec.solver, spec.tolerance("tg_error", 1e-6), spec.tolerance("tg_ratio", 3.5));
      auto checks = r.checks;
      for (auto& c : checks) c.details["amplitude"] = a;
      s.report["amplitudes"].push_back(r);
      s.checks.insert(s.checks.end(), checks.begin(), checks.end());
    }
  } else if (name == "bilinear") {
    for (const auto& p : spec.pairs) {
      const auto r = bilinear_stability(g, spec.horizon, solver::norm_pair_from_string(p), std::max(spec.samples, 10), spec.seed,
                                        spec.solver.carleson, spec.tolerance("bilinear_drift", 2.0));
      if (cal) {
        record_calibration(*cal, r.coarse);
        record_calibration(*cal, r.fine);
      }
      absorb(s, p, r, {r.check});
    }
  } else if (name == "energy") {
    return energy_suite(spec);
  } else if (name == "growth") {
    const auto r = verify_growth_exponent(spec);
    absorb(s, "growth", r, r.checks);
  } else if (name == "scaling") {
    const auto f = sampling::random_divergence_free(g, spec.seed, {.slope = 1.0});
    const auto r = verify_scaling_invariance(f, critical_norms(), spec.solver.carleson, spec.tolerance("scaling_besov", 1e-10),
                                             spec.tolerance("scaling_dbmo", 0.05), spec.tolerance("translation", 1e-12));
    absorb(s, "scaling", r, r.checks);
  } else if (name == "embedding") {
    const auto r = embedding_chain_report(g, std::max(spec.samples, 2), spec.seed, 2.0, 2.0, spec.solver.carleson,
                                          spec.tolerance("embedding_drift", 2.0), spec.tolerance("axioms", 1e-12));
    absorb(s, "embedding", r, r.checks);
  } else if (name == "vmo") {
    return vmo_suite(spec);
  } else if (name == "small_data") {
    SolverConfig cfg = spec.solver;
    cfg.horizon = spec.horizon;
    const auto r = small_data_family(g, cfg, spec.samples, spec.seed, 0.5,
                                     static_cast<int>(spec.tolerance("small_data_iterations", 20)),
                                     spec.tolerance("small_data_spread", 0.2));
    absorb(s, "small_data", r, r.checks);
  } else {
    throw InputError("unknown check '" + name + "'");
  }
  return s;
}

}  // namespace nsbmo::harness
