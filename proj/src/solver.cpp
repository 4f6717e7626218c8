#include "nsbmo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsbmo/duhamel.hpp"
#include "nsbmo/littlewood_paley.hpp"
#include "nsbmo/parallel.hpp"
#include "nsbmo/spectral.hpp"

namespace nsbmo::solver {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

double inner(const VectorField& a, const VectorField& b) {
  double sum = 0.0;
  for (int c = 0; c < 2; ++c) {
    auto x = a.component(c);
    auto y = b.component(c);
    for (std::size_t i = 0; i < x.size(); ++i) sum += (std::conj(x[i]) * y[i]).real();
  }
  return sum * a.grid().area();
}

double energy_of(const VectorField& v) { return inner(v, v); }

template <int C>
Trajectory<C> interpolate_onto(const Trajectory<C>& src, const std::vector<double>& times, bool zero_beyond) {
  std::vector<Field<C>> slices;
  slices.reserve(times.size());
  for (double t : times) {
    if (t > src.horizon()) {
      if (!zero_beyond) throw InputError("trajectory does not cover the requested window");
      slices.emplace_back(src.grid());
    } else {
      slices.push_back(src.at_time(std::max(t, src.time(0))));
    }
  }
  return Trajectory<C>(times, std::move(slices));
}

// Max over nodes of ||a_m - b_m||_2 relative to max ||a_m||_2.
double relative_gap(const VectorTrajectory& a, const VectorTrajectory& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    diff = std::max(diff, spectral::l2_norm_spectral(a.slice(m) - b.slice(m)));
    scale = std::max(scale, spectral::l2_norm_spectral(a.slice(m)));
  }
  return scale > 0.0 ? diff / scale : diff;
}

std::vector<VectorField> sum_products(const std::vector<VectorField>& a, const std::vector<VectorField>& b) {
  std::vector<VectorField> out = a;
  for (std::size_t m = 0; m < out.size(); ++m) out[m] += b[m];
  return out;
}

json picard_json(const PicardResult<VectorTrajectory>& r) {
  json j{{"status", to_string(r.status)},
         {"iterations", r.iterations},
         {"increments", r.increments},
         {"contraction_ratios", r.contraction_ratios},
         {"source_norm", r.source_norm},
         {"smallness_lhs", r.smallness_lhs},
         {"smallness_rhs", r.smallness_rhs},
         {"solution_norm", r.solution_norm},
         {"solution_bound", r.solution_bound},
         {"message", r.message}};
  if (r.secondary_source) j["secondary_source"] = *r.secondary_source;
  if (r.secondary_solution) j["secondary_solution"] = *r.secondary_solution;
  return j;
}

StageReport stage_from_picard(const std::string& stage, const PicardResult<VectorTrajectory>& r) {
  StageReport s;
  s.stage = stage;
  s.status = r.converged() ? "ok" : to_string(r.status);
  s.message = r.message;
  s.diagnostics = picard_json(r);
  return s;
}

template <int C>
double l2l2_norm(const Trajectory<C>& traj) {
  return norms::lpt_lqx_norm(traj, 2.0, 2.0, traj.horizon());
}

}  // namespace

void SolverConfig::validate() const {
  if (!(horizon > 0.0)) throw InputError("config: horizon must be positive");
  if (intervals < 2 || local_intervals < 2) throw InputError("config: intervals must be at least 2");
  if (!(grading >= 1.0)) throw InputError("config: grading must be >= 1");
  if (!(tolerance > 0.0)) throw InputError("config: tolerance must be positive");
  if (max_iterations < 1) throw InputError("config: max_iterations must be at least 1");
  if (!(epsilon > 0.0)) throw InputError("config: epsilon must be positive");
  if (!(local_horizon > 0.0) || local_attempts < 1) throw InputError("config: invalid local horizon settings");
  if (!(handoff > 0.0 && handoff <= 1.0)) throw InputError("config: handoff must lie in (0, 1]");
  if (!(energy_step > 0.0)) throw InputError("config: energy_step must be positive");
  if (series_points < 2) throw InputError("config: series_points must be at least 2");
  if (bilinear_constant < 0.0) throw InputError("config: bilinear_constant must be nonnegative");
  if (probe_samples < 1) throw InputError("config: probe_samples must be positive");
}

void to_json(json& j, const SolverConfig& c) {
  j = json{{"horizon", c.horizon},
           {"intervals", c.intervals},
           {"grading", c.grading},
           {"tolerance", c.tolerance},
           {"max_iterations", c.max_iterations},
           {"epsilon", c.epsilon},
           {"dealias", c.dealias},
           {"local_horizon", c.local_horizon},
           {"local_intervals", c.local_intervals},
           {"local_attempts", c.local_attempts},
           {"handoff", c.handoff},
           {"energy_step", c.energy_step},
           {"series_points", c.series_points},
           {"bilinear_constant", c.bilinear_constant},
           {"calibration_file", c.calibration_file.string()},
           {"probe_samples", c.probe_samples},
           {"probe_seed", c.probe_seed},
           {"carleson",
            {{"octaves", c.carleson.octaves},
             {"substeps", c.carleson.substeps},
             {"center_stride", c.carleson.center_stride},
             {"gauss_points", c.carleson.gauss_points}}}};
}

SolverConfig solver_config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("solver config must be a JSON object");
  SolverConfig c;
  const json defaults = c;
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw InputError("unknown solver setting '" + key + "'");
  }
  try {
    c.horizon = j.value("horizon", c.horizon);
    c.intervals = j.value("intervals", c.intervals);
    c.grading = j.value("grading", c.grading);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.dealias = j.value("dealias", c.dealias);
    c.local_horizon = j.value("local_horizon", c.local_horizon);
    c.local_intervals = j.value("local_intervals", c.local_intervals);
    c.local_attempts = j.value("local_attempts", c.local_attempts);
    c.handoff = j.value("handoff", c.handoff);
    c.energy_step = j.value("energy_step", c.energy_step);
    c.series_points = j.value("series_points", c.series_points);
    c.bilinear_constant = j.value("bilinear_constant", c.bilinear_constant);
    c.calibration_file = j.value("calibration_file", std::string());
    c.probe_samples = j.value("probe_samples", c.probe_samples);
    c.probe_seed = j.value("probe_seed", c.probe_seed);
    if (j.contains("carleson")) {
      const auto& s = j.at("carleson");
      c.carleson.octaves = s.value("octaves", c.carleson.octaves);
      c.carleson.substeps = s.value("substeps", c.carleson.substeps);
      c.carleson.center_stride = s.value("center_stride", c.carleson.center_stride);
      c.carleson.gauss_points = s.value("gauss_points", c.carleson.gauss_points);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("solver config: ") + e.what());
  }
  c.validate();
  return c;
}

double resolve_bilinear_constant(const Grid& grid, const std::vector<double>& times, const SolverConfig& cfg,
                                 json* provenance) {
  if (cfg.bilinear_constant > 0.0) {
    if (provenance) *provenance = {{"source", "config"}, {"eta", cfg.bilinear_constant}};
    return cfg.bilinear_constant;
  }
  const auto path = calibration_path(cfg.calibration_file);
  if (!path.empty() && std::filesystem::exists(path)) {
    const auto entry = Calibration::load(path).find(grid, times.back(), NormPair::xx);
    if (entry) {
      if (provenance) *provenance = {{"source", "calibration"}, {"path", path.string()}, {"eta", entry->eta}};
      return entry->eta;
    }
  }
  const auto ratios = bilinear_ratios(grid, times, NormPair::xx, cfg.probe_samples, cfg.probe_seed, cfg.carleson);
  const double eta = *std::max_element(ratios.begin(), ratios.end());
  if (provenance) {
    *provenance = {{"source", "probe"}, {"samples", cfg.probe_samples}, {"seed", cfg.probe_seed}, {"eta", eta}};
  }
  return eta;
}

double ns_residual(const VectorTrajectory& w, const VectorField& w0, const VectorTrajectory* forcing, bool dealiased) {
  auto rhs = heat_trajectory(w0, w.times());
  rhs -= duhamel_integral_direct(w.times(), projected_products(w, w, dealiased));
  if (forcing) rhs += *forcing;
  return relative_gap(w, rhs);
}

double perturbed_residual(const VectorTrajectory& v, const VectorField& v0, const VectorTrajectory& w,
                          const VectorTrajectory* forcing, bool dealiased) {
  auto rhs = heat_trajectory(v0, v.times());
  rhs -= duhamel_integral_direct(v.times(), projected_products(v, w, dealiased));
  rhs -= duhamel_integral_direct(v.times(), projected_products(w, v, dealiased));
  rhs -= duhamel_integral_direct(v.times(), projected_products(v, v, dealiased));
  if (forcing) rhs += *forcing;
  return relative_gap(v, rhs);
}

SmallDataResult solve_small_data(const VectorField& w0, const SolverConfig& cfg, const VectorTrajectory* forcing) {
  cfg.validate();
  SmallDataResult out;
  out.report.stage = "small_data";
  const auto times = graded_mesh(cfg.horizon, cfg.intervals, cfg.grading);
  const double T = cfg.horizon;
  json eta_source;
  out.eta = resolve_bilinear_constant(w0.grid(), times, cfg, &eta_source);
  out.dbmo_initial = norms::dbmo_norm(w0, cfg.carleson);

  PicardProblem<VectorTrajectory> prob(heat_trajectory(w0, times));
  if (forcing) {
    if (forcing->times() != times) throw InputError("solve_small_data: forcing must live on the solver mesh");
    prob.source += *forcing;
  }
  prob.bilinear = [&cfg](const VectorTrajectory& a, const VectorTrajectory& b) {
    return -1.0 * duhamel_bilinear(a, b, cfg.dealias);
  };
  prob.norm = [&cfg, T](const VectorTrajectory& x) { return norms::xt_norm(x, T, cfg.carleson); };
  prob.norm_name = "X_T";
  prob.gamma = out.eta;
  prob.lambda = 0.0;
  const double y = prob.norm(prob.source);
  out.picard = picard_solve(prob, std::max(cfg.tolerance * y, kTiny), cfg.max_iterations);
  out.report = stage_from_picard("small_data", out.picard);
  out.report.diagnostics["eta"] = eta_source;
  out.report.diagnostics["dbmo_initial"] = out.dbmo_initial;
  if (out.picard.status == PicardStatus::refused) {
    out.report.message += "; split the datum (split_initial_data) or lower its size";
    return out;
  }
  const auto& w = *out.picard.solution;
  out.xt = out.picard.solution_norm;
  out.ratio = out.dbmo_initial > 0.0 ? out.xt / out.dbmo_initial : 0.0;
  out.residual = ns_residual(w, w0, forcing, cfg.dealias);
  out.report.diagnostics["xt"] = out.xt;
  out.report.diagnostics["ratio"] = out.ratio;
  out.report.diagnostics["residual"] = out.residual;
  if (out.picard.converged()) out.solution = w;
  return out;
}

SplitResult split_initial_data(const VectorField& u0, double epsilon, const norms::CarlesonSettings& settings,
                               std::optional<int> max_level) {
  if (!(epsilon > 0.0)) throw InputError("split_initial_data: epsilon must be positive");
  const Grid& g = u0.grid();
  SplitResult best(g);
  best.best_epsilon = std::numeric_limits<double>::infinity();
  const int lo = static_cast<int>(std::floor(std::log2(g.min_k_norm())));
  int hi = static_cast<int>(std::ceil(std::log2(g.max_k_norm()))) + 1;
  if (max_level) hi = std::min(hi, *max_level);
  for (int level = lo; level <= hi; ++level) {
    const auto v0 = spectral::low_pass(u0, std::exp2(level));
    auto w0 = u0 - v0;
    const double d = norms::dbmo_norm(w0, settings);
    best.scan.emplace_back(level, d);
    if (d < best.best_epsilon) best.best_epsilon = d;
    if (d <= epsilon) {
      best.ok = true;
      best.v0 = v0;
      best.w0 = w0;
      best.v0.set_divergence_free(u0.divergence_free());
      best.w0.set_divergence_free(u0.divergence_free());
      best.v0.set_mean_zero(u0.mean_zero());
      best.w0.set_mean_zero(u0.mean_zero());
      best.level = level;
      best.dbmo_w0 = d;
      return best;
    }
  }
  best.message = "no cutoff up to level " + std::to_string(hi) + " reaches epsilon = " + std::to_string(epsilon) +
                 "; best achievable " + std::to_string(best.best_epsilon);
  return best;
}

LocalResult solve_v_local(const VectorField& v0, const VectorTrajectory& w, const SolverConfig& cfg,
                          const VectorTrajectory* forcing) {
  cfg.validate();
  LocalResult out;
  const double T = w.horizon();
  json eta_source;
  out.eta = resolve_bilinear_constant(w.grid(), w.times(), cfg, &eta_source);
  const double w_norm = norms::xt_norm(w, T, cfg.carleson);
  out.lambda = 2.0 * out.eta * w_norm;

  PicardProblem<VectorTrajectory> prob(heat_trajectory(v0, w.times()));
  if (forcing) {
    if (!forcing->same_nodes(w)) throw InputError("solve_v_local: forcing must share the nodes of w");
    prob.source += *forcing;
  }
  prob.linear = [&w, &cfg](const VectorTrajectory& x) {
    return -1.0 * duhamel_integral(x.times(), sum_products(projected_products(x, w, cfg.dealias),
                                                           projected_products(w, x, cfg.dealias)));
  };
  prob.bilinear = [&cfg](const VectorTrajectory& a, const VectorTrajectory& b) {
    return -1.0 * duhamel_bilinear(a, b, cfg.dealias);
  };
  prob.norm = [&cfg, T](const VectorTrajectory& x) { return norms::xt_norm(x, T, cfg.carleson); };
  prob.norm_name = "X_T";
  prob.secondary_norm = [T](const VectorTrajectory& x) { return norms::yt_norm(x, T); };
  prob.secondary_name = "Y_T";
  prob.gamma = out.eta;
  prob.lambda = out.lambda;
  prob.assert_solvable = false;
  const double y = prob.norm(prob.source);
  out.picard = picard_solve(prob, std::max(cfg.tolerance * y, kTiny), cfg.max_iterations);
  out.report = stage_from_picard("local_v", out.picard);
  out.report.diagnostics["eta"] = eta_source;
  out.report.diagnostics["lambda"] = out.lambda;
  out.report.diagnostics["w_xt"] = w_norm;
  out.report.diagnostics["T"] = T;
  if (out.picard.status == PicardStatus::refused) return out;
  const auto& v = *out.picard.solution;
  out.xt = out.picard.solution_norm;
  out.yt = out.picard.secondary_solution.value_or(0.0);
  out.residual = perturbed_residual(v, v0, w, forcing, cfg.dealias);
  out.report.diagnostics["xt"] = out.xt;
  out.report.diagnostics["yt"] = out.yt;
  out.report.diagnostics["residual"] = out.residual;
  if (out.picard.converged()) out.solution = v;
  return out;
}

double EnergyLedger::residual(std::size_t i) const {
  const double lhs = energy[i] + dissipation[i] + cross[i] - forcing[i];
  const double scale = initial > 0.0 ? initial : 1.0;
  return std::abs(lhs - initial) / scale;
}

double EnergyLedger::max_residual() const {
  double r = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) r = std::max(r, residual(i));
  return r;
}

std::vector<double> continuation_grid(double tau, double t_end, double step, const std::vector<double>& include) {
  if (!(t_end > tau) || !(step > 0.0)) throw InputError("continuation_grid: need tau < t_end and a positive step");
  std::vector<double> marks{tau, t_end};
  for (double t : include) {
    if (t > tau && t < t_end) marks.push_back(t);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::vector<double> grid{tau};
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    const double a = marks[i], b = marks[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / step - 1e-9)));
    for (int s = 1; s < n; ++s) grid.push_back(a + (b - a) * s / n);
    grid.push_back(b);
  }
  return grid;
}

EnergyResult energy_continuation(const VectorField& v_tau, const VectorTrajectory& w, double tau, double t_end,
                                 const SolverConfig& cfg, const std::vector<double>& record_times,
                                 const TensorTrajectory* force) {
  EnergyResult out;
  out.report.stage = "energy";
  if (tau < w.time(0) || t_end > w.horizon() * (1 + 1e-12)) throw InputError("energy_continuation: w must cover [tau, t_end]");
  const Grid& g = v_tau.grid();
  require_same_grid(g, w.grid(), "energy_continuation");
  const auto grid = continuation_grid(tau, t_end, cfg.energy_step, record_times);

  auto w_at = [&w](double t) { return w.at_time(std::min(t, w.horizon())); };
  auto forcing_at = [force, &g](double t) {
    if (!force || t > force->horizon() || t < force->time(0)) return VectorField(g);
    return spectral::leray_project(spectral::divergence(force->at_time(t)));
  };
  const bool w_zero = w.is_zero();
  // dv/dt - Lap v = N(v, t)
  auto nonlinear = [&](const VectorField& v, const VectorField& wt, const VectorField& ft) {
    VectorField n(g);
    if (w_zero) {
      n = spectral::projected_nonlinear_term(v, v, cfg.dealias);
    } else {
      const VectorField total = v + wt;
      n = spectral::projected_nonlinear_term(total, total, cfg.dealias);
      n -= spectral::projected_nonlinear_term(wt, wt, cfg.dealias);
    }
    n *= -1.0;
    n += ft;
    return n;
  };
  auto cross_rate = [&](const VectorField& v, const VectorField& wt) {
    if (w_zero) return 0.0;
    return inner(v, spectral::nonlinear_term(v, wt, cfg.dealias));
  };

  std::vector<double> record(record_times.begin(), record_times.end());
  std::sort(record.begin(), record.end());
  std::vector<double> state_times{tau};
  std::vector<VectorField> states{v_tau};

  auto& L = out.ledger;
  L.initial = energy_of(v_tau);
  L.times.push_back(tau);
  L.energy.push_back(L.initial);
  L.dissipation.push_back(0.0);
  L.cross.push_back(0.0);
  L.forcing.push_back(0.0);

  const std::size_t n = static_cast<std::size_t>(g.resolution());
  VectorField v = v_tau;
  VectorField wt = w_at(tau);
  VectorField ft = forcing_at(tau);
  VectorField nv = nonlinear(v, wt, ft);
  double cross_prev = cross_rate(v, wt);
  double force_prev = inner(v, ft);

  for (std::size_t s = 0; s + 1 < grid.size(); ++s) {
    const double t0 = grid[s], t1 = grid[s + 1];
    const double h = t1 - t0;
    if (!(h > 1e-14 * std::max(1.0, t1))) {
      out.report.status = "failed";
      out.report.message = "step size underflow at t = " + std::to_string(t0);
      break;
    }
    // Predictor a = e^{hL} v + h phi1 N(v); corrector adds h phi2 (N(a) - N(v)).
    VectorField a(g);
    std::vector<double> decay(g.size()), phi1(g.size()), phi2(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double z = g.k_squared(p) * h;
      const auto [wl, wr] = product_trapezoid_weights(z);
      decay[p] = std::exp(-z);
      phi1[p] = wl + wr;
      phi2[p] = wr;
    }
    parallel_for(n, [&](std::size_t row) {
      for (std::size_t col = 0; col < n; ++col) {
        const std::size_t p = row * n + col;
        for (int c = 0; c < 2; ++c) a.component(c)[p] = decay[p] * v.component(c)[p] + h * phi1[p] * nv.component(c)[p];
      }
    });
    const VectorField w1 = w_at(t1);
    const VectorField f1 = forcing_at(t1);
    const VectorField na = nonlinear(a, w1, f1);
    VectorField next = a;
    for (int c = 0; c < 2; ++c) {
      auto dst = next.component(c);
      auto x = na.component(c);
      auto y = nv.component(c);
      for (std::size_t p = 0; p < g.size(); ++p) dst[p] += h * phi2[p] * (x[p] - y[p]);
    }
    next.set_divergence_free(true);
    next.set_mean_zero(true);

    bool finite = true;
    for (int c = 0; c < 2 && finite; ++c) {
      for (const auto& z : next.component(c)) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          finite = false;
          break;
        }
      }
    }
    if (!finite) {
      out.report.status = "failed";
      out.report.message = "non-finite state at t = " + std::to_string(t1) + "; last valid state kept";
      break;
    }

    // Ledger: dissipation per mode by the logarithmic mean (exact for a
    // decaying exponential), cross and forcing terms by the trapezoid rule.
    double diss = 0.0;
    for (int c = 0; c < 2; ++c) {
      auto x0 = v.component(c);
      auto x1 = next.component(c);
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double A = std::norm(x0[p]), B = std::norm(x1[p]);
        double mean = 0.5 * (A + B);
        if (A > 0.0 && B > 0.0 && std::abs(A - B) > 1e-12 * A) mean = (A - B) / std::log(A / B);
        diss += g.k_squared(p) * mean;
      }
    }
    diss *= 2.0 * h * g.area();
    const double cross_next = cross_rate(next, w1);
    const double force_next = inner(next, f1);

    v = std::move(next);
    wt = w1;
    ft = f1;
    nv = nonlinear(v, wt, ft);
    L.times.push_back(t1);
    L.energy.push_back(energy_of(v));
    L.dissipation.push_back(L.dissipation.back() + diss);
    L.cross.push_back(L.cross.back() + h * (cross_prev + cross_next));
    L.forcing.push_back(L.forcing.back() + h * (force_prev + force_next));
    cross_prev = cross_next;
    force_prev = force_next;
    ++out.steps;
    if (std::binary_search(record.begin(), record.end(), t1) || s + 2 == grid.size()) {
      if (state_times.back() < t1) {
        state_times.push_back(t1);
        states.push_back(v);
      }
    }
  }
  if (state_times.size() == 2) {
    // Trajectories need three nodes; repeat the midpoint by interpolation.
    state_times.insert(state_times.begin() + 1, 0.5 * (state_times[0] + state_times[1]));
    VectorField mid = 0.5 * (states[0] + states[1]);
    states.insert(states.begin() + 1, mid);
  }
  if (state_times.size() >= 3) out.states = VectorTrajectory(state_times, states);
  out.report.diagnostics = {{"steps", out.steps}, {"max_ledger_residual", L.max_residual()}, {"t_end", L.times.back()}};
  return out;
}

TensorTrajectory force_on(const TensorTrajectory& force, const std::vector<double>& times) {
  return interpolate_onto(force, times, true);
}

ForceSplit split_force(const TensorTrajectory& force, double epsilon, const norms::CarlesonSettings& settings) {
  if (!(epsilon > 0.0)) throw InputError("split_force: epsilon must be positive");
  const Grid& g = force.grid();
  const int lo = static_cast<int>(std::floor(std::log2(g.min_k_norm())));
  const int hi = static_cast<int>(std::ceil(std::log2(g.max_k_norm()))) + 1;
  for (int level = lo; level <= hi; ++level) {
    std::vector<TensorField> smooth, rough;
    for (const auto& s : force.slices()) {
      smooth.push_back(spectral::low_pass(s, std::exp2(level)));
      rough.push_back(s - smooth.back());
    }
    TensorTrajectory r(force.times(), rough);
    const double z = norms::z_norm(r, force.horizon(), settings);
    if (z <= epsilon || level == hi) {
      TensorTrajectory sm(force.times(), smooth);
      const double l2 = l2l2_norm(sm);
      return ForceSplit{std::move(sm), std::move(r), level, z, l2};
    }
  }
  throw InputError("split_force: empty level range");
}

double fit_power_law(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.empty()) throw InputError("fit_power_law: size mismatch");
  const double t_max = *std::max_element(t.begin(), t.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_max / 10.0 * (1 - 1e-12) || !(t[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double x = std::log(t[i]), z = std::log(y[i]);
    sx += x;
    sy += z;
    sxx += x * x;
    sxy += x * z;
    ++count;
  }
  if (count < 2) return 0.0;
  const double den = count * sxx - sx * sx;
  return den > 0.0 ? (count * sxy - sx * sy) / den : 0.0;
}

GlobalResult solve_global(const VectorField& u0, const SolverConfig& cfg, const TensorTrajectory* force) {
  cfg.validate();
  GlobalResult out;
  const double T_end = cfg.horizon;
  auto fail = [&out](StageReport s) {
    out.stages.push_back(s);
    out.failure = std::move(s);
    return out;
  };

  // Force: rough part into the w problem, smooth part into the v problem.
  std::optional<ForceSplit> fsplit;
  if (force && !force->is_zero()) {
    fsplit = split_force(*force, cfg.epsilon, cfg.carleson);
    StageReport s{"force_split", "ok", "", {{"level", fsplit->level}, {"z_rough", fsplit->z_rough}, {"l2l2_smooth", fsplit->l2l2_smooth}}};
    if (fsplit->z_rough > cfg.epsilon) {
      s.status = "failed";
      s.message = "no cutoff brings ||V_w||_Z below epsilon";
      return fail(s);
    }
    out.stages.push_back(s);
  }

  // Splitting and the small-data solve; epsilon is halved while the gate refuses.
  const auto w_times = graded_mesh(T_end, cfg.intervals, cfg.grading);
  std::optional<VectorTrajectory> w_force;
  if (fsplit) w_force = force_duhamel(force_on(fsplit->rough, w_times));
  double eps = cfg.epsilon;
  for (int attempt = 0;; ++attempt) {
    out.split = split_initial_data(u0, eps, cfg.carleson);
    StageReport s{"split", out.split->ok ? "ok" : "failed", out.split->message,
                  {{"epsilon", eps}, {"level", out.split->level}, {"dbmo_w0", out.split->dbmo_w0}}};
    if (!out.split->ok) return fail(s);
    out.stages.push_back(s);
    out.small = solve_small_data(out.split->w0, cfg, w_force ? &*w_force : nullptr);
    out.stages.push_back(out.small->report);
    if (out.small->report.ok()) break;
    if (out.small->picard.status != PicardStatus::refused || attempt >= 6) return fail(out.small->report);
    eps *= 0.5;
  }
  const VectorTrajectory& w = *out.small->solution;
  const VectorField& v0 = out.split->v0;

  const bool v_trivial = v0.is_zero() && !fsplit;
  std::vector<double> record;
  double tau = 0.0;
  std::optional<VectorTrajectory> v_local;
  if (!v_trivial) {
    // Local mild solve for v, halving the window until the iteration converges.
    double T_loc = std::min(cfg.local_horizon, 0.5 * T_end);
    for (int attempt = 0; attempt < cfg.local_attempts; ++attempt, T_loc *= 0.5) {
      const auto times = graded_mesh(T_loc, cfg.local_intervals, cfg.grading);
      const auto w_loc = interpolate_onto(w, times, false);
      std::optional<VectorTrajectory> f_loc;
      if (fsplit) f_loc = force_duhamel(force_on(fsplit->smooth, times));
      out.local = solve_v_local(v0, w_loc, cfg, f_loc ? &*f_loc : nullptr);
      out.stages.push_back(out.local->report);
      if (out.local->report.ok()) break;
    }
    if (!out.local->report.ok()) return fail(out.local->report);
    v_local = *out.local->solution;
    out.local_horizon = v_local->horizon();
    for (std::size_t m = 0; m < v_local->size(); ++m) {
      if (v_local->time(m) <= cfg.handoff * out.local_horizon) tau = v_local->time(m);
    }
    if (!(tau > 0.0)) tau = v_local->time(1);
  } else {
    tau = w.time(1);
  }
  out.tau = tau;

  // Record times: the local nodes after tau (overlap check) and a log-spaced series.
  std::vector<double> series;
  for (int i = 0; i < cfg.series_points; ++i) {
    series.push_back(tau * std::pow(T_end / tau, static_cast<double>(i) / (cfg.series_points - 1)));
  }
  series.back() = T_end;
  record = series;
  if (v_local) {
    for (double t : v_local->times()) {
      if (t > tau) record.push_back(t);
    }
  }

  std::vector<double> times;
  std::vector<VectorField> slices;
  if (!v_trivial) {
    out.energy = energy_continuation(v_local->at_time(tau), w, tau, T_end, cfg, record, fsplit ? &fsplit->smooth : nullptr);
    out.stages.push_back(out.energy->report);
    if (!out.energy->report.ok()) return fail(out.energy->report);
    const auto& cont = *out.energy->states;
    double gap = 0.0, scale = 0.0;
    for (std::size_t m = 0; m < v_local->size(); ++m) {
      const double t = v_local->time(m);
      if (t <= tau) continue;
      const auto it = std::find(cont.times().begin(), cont.times().end(), t);
      if (it == cont.times().end()) continue;
      const auto& c = cont.slice(static_cast<std::size_t>(it - cont.times().begin()));
      gap = std::max(gap, spectral::l2_norm_spectral(c - v_local->slice(m)));
      scale = std::max(scale, spectral::l2_norm_spectral(v_local->slice(m)));
    }
    out.overlap_discrepancy = scale > 0.0 ? gap / scale : gap;
    for (std::size_t m = 0; m < v_local->size() && v_local->time(m) < tau; ++m) {
      times.push_back(v_local->time(m));
      slices.push_back(v_local->slice(m) + w.at_time(v_local->time(m)));
    }
    for (std::size_t m = 0; m < cont.size(); ++m) {
      const double t = cont.time(m);
      if (t < tau || std::find(series.begin(), series.end(), t) == series.end()) continue;
      times.push_back(t);
      slices.push_back(cont.slice(m) + w.at_time(t));
    }
  } else {
    for (double t : series) {
      times.push_back(t);
      slices.push_back(w.at_time(t));
    }
    times.insert(times.begin(), 0.0);
    slices.insert(slices.begin(), w.slice(0));
  }
  out.solution = VectorTrajectory(times, slices);

  // dBMO series and growth fit on the log-spaced samples.
  out.series_times = series;
  out.series_dbmo.assign(series.size(), 0.0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto it = std::find(times.begin(), times.end(), series[i]);
    out.series_dbmo[i] = norms::dbmo_norm(slices[static_cast<std::size_t>(it - times.begin())], cfg.carleson);
  }
  out.growth_exponent = fit_power_law(out.series_times, out.series_dbmo);
  const double delta = std::max(out.growth_exponent, 0.0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out.growth_constant = std::max(out.growth_constant, out.series_dbmo[i] / (1.0 + std::pow(series[i], delta)));
  }
  out.stages.push_back(StageReport{"series", "ok", "",
                                   {{"growth_exponent", out.growth_exponent},
                                    {"growth_constant", out.growth_constant},
                                    {"overlap_discrepancy", out.overlap_discrepancy},
                                    {"tau", tau},
                                    {"local_horizon", out.local_horizon}}});
  out.failure = StageReport{"global", "ok", "", json::object()};
  return out;
}

}  // namespace nsbmo::solver
