#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nsbmo/duhamel.hpp"
#include "nsbmo/norms.hpp"
#include "nsbmo/picard.hpp"
#include "nsbmo/random_fields.hpp"
#include "nsbmo/scaling.hpp"
#include "nsbmo/solver.hpp"
#include "nsbmo/spectral.hpp"
#include "support.hpp"

using namespace nsbmo;
using namespace nsbmo::solver;
using nsbmo::testing::kPi;
using nsbmo::testing::max_rel_diff;

namespace {

SolverConfig quick_config(double horizon) {
  SolverConfig cfg;
  cfg.horizon = horizon;
  cfg.intervals = 24;
  cfg.bilinear_constant = 0.1;
  cfg.local_intervals = 24;
  return cfg;
}

double l2_gap(const VectorField& a, const VectorField& b) { return spectral::l2_norm_spectral(a - b); }

// Exact int_0^t e^{-a (t - s)} ds.
double heat_primitive(double a, double t) { return a > 0.0 ? -std::expm1(-a * t) / a : t; }

}  // namespace

TEST_CASE("picard: scalar quadratic fixed point") {
  PicardProblem<double> prob(0.1);
  prob.bilinear = [](double a, double b) { return a * b; };
  prob.norm = [](double x) { return std::abs(x); };
  auto r = picard_solve(prob, 1e-15, 200);
  REQUIRE(r.converged());
  // x = 0.1 + x^2, smaller root
  const double exact = (1.0 - std::sqrt(1.0 - 4.0 * 0.1)) / 2.0;
  CHECK(std::abs(*r.solution - exact) < 1e-12);
  CHECK(std::abs(exact - 0.11270166537925831) < 1e-15);
  CHECK(r.max_contraction_ratio() < 1.0);
  CHECK(r.solution_norm <= r.solution_bound);

  PicardProblem<double> big(0.3);
  big.bilinear = prob.bilinear;
  big.norm = prob.norm;
  auto refused = picard_solve(big, 1e-15, 200);
  CHECK(refused.status == PicardStatus::refused);
  CHECK(refused.smallness_lhs == doctest::Approx(1.2));
  CHECK(refused.smallness_rhs == doctest::Approx(1.0));

  PicardProblem<double> zero(0.0);
  zero.bilinear = prob.bilinear;
  zero.norm = prob.norm;
  auto z = picard_solve(zero, 1e-15, 10);
  CHECK(z.converged());
  CHECK(z.iterations == 1);
  CHECK(*z.solution == 0.0);
}

TEST_CASE("picard: linear part and secondary norm") {
  // x = y + 0.5 x + x^2 / 4 ; lambda = 0.5, gamma = 0.25
  PicardProblem<double> prob(0.05);
  prob.linear = [](double x) { return 0.5 * x; };
  prob.bilinear = [](double a, double b) { return 0.25 * a * b; };
  prob.norm = [](double x) { return std::abs(x); };
  prob.lambda = 0.5;
  prob.gamma = 0.25;
  prob.secondary_norm = [](double x) { return 3.0 * std::abs(x); };
  auto r = picard_solve(prob, 1e-15, 400);
  REQUIRE(r.converged());
  // 0.25 x^2 - 0.5 x + 0.05 = 0
  const double exact = (0.5 - std::sqrt(0.25 - 0.05)) / 0.5;
  CHECK(std::abs(*r.solution - exact) < 1e-12);
  CHECK(*r.secondary_solution == doctest::Approx(3.0 * exact));

  prob.lambda = 1.0;
  CHECK(picard_solve(prob, 1e-15, 10).status == PicardStatus::refused);
}

TEST_CASE("picard: divergence is reported, not thrown") {
  PicardProblem<double> prob(0.3);  // x = 0.3 + x^2 has no real root
  prob.bilinear = [](double a, double b) { return a * b; };
  prob.norm = [](double x) { return std::abs(x); };
  prob.gamma = 0.1;  // understated constant lets the gate pass
  auto r = picard_solve(prob, 1e-15, 60);
  CHECK(r.status == PicardStatus::diverged);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("duhamel: exact on integrands linear in time") {
  Grid g(2 * kPi, 16);
  const auto times = graded_mesh(1.0, 12);
  const auto f = sampling::random_divergence_free(g, 3);
  std::vector<VectorField> constant(times.size(), f), ramp;
  for (double t : times) ramp.push_back(t * f);
  const auto a = duhamel_integral(times, constant);
  const auto b = duhamel_integral(times, ramp);
  const auto bd = duhamel_integral_direct(times, ramp);
  double worst_a = 0.0, worst_b = 0.0;
  for (std::size_t m = 0; m < times.size(); ++m) {
    const double t = times[m];
    VectorField ea(g), eb(g);
    for (int c = 0; c < 2; ++c) {
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double k2 = g.k_squared(p);
        const auto z = f.component(c)[p];
        ea.component(c)[p] = heat_primitive(k2, t) * z;
        // int_0^t e^{-a (t - s)} s ds = (t - primitive) / a
        const double w = k2 > 0.0 ? (t - heat_primitive(k2, t)) / k2 : 0.5 * t * t;
        eb.component(c)[p] = w * z;
      }
    }
    worst_a = std::max(worst_a, l2_gap(a.slice(m), ea) / spectral::l2_norm_spectral(f));
    worst_b = std::max(worst_b, l2_gap(b.slice(m), eb) / spectral::l2_norm_spectral(f));
  }
  CHECK(worst_a < 1e-13);
  CHECK(worst_b < 1e-13);
  CHECK(max_rel_diff(b, bd) < 1e-12);
}

TEST_CASE("duhamel: bilinear, Taylor-Green kernel, refinement") {
  Grid g(2 * kPi, 16);
  const auto times = graded_mesh(0.5, 16);
  const auto u = heat_trajectory(sampling::random_divergence_free(g, 11), times);
  const auto u2 = heat_trajectory(sampling::random_divergence_free(g, 12), times);
  const auto v = heat_trajectory(sampling::random_divergence_free(g, 13), times);
  const double alpha = -1.7;
  const auto lhs = duhamel_bilinear(alpha * u + u2, v);
  const auto rhs = alpha * duhamel_bilinear(u, v) + duhamel_bilinear(u2, v);
  CHECK(max_rel_diff(lhs, rhs) < 1e-11);
  const auto lhs2 = duhamel_bilinear(v, alpha * u + u2);
  const auto rhs2 = alpha * duhamel_bilinear(v, u) + duhamel_bilinear(v, u2);
  CHECK(max_rel_diff(lhs2, rhs2) < 1e-11);

  const auto tg = heat_trajectory(sampling::taylor_green(g), times);
  const auto btg = duhamel_bilinear(tg, tg);
  double worst = 0.0;
  for (const auto& s : btg.slices()) worst = std::max(worst, spectral::l2_norm_spectral(s));
  CHECK(worst < 1e-13);

  // halving the steps moves B(u, v)(T) by well under 1%
  const auto fine_times = graded_mesh(0.5, 32);
  const auto uf = heat_trajectory(u.slice(0), fine_times);
  const auto vf = heat_trajectory(v.slice(0), fine_times);
  const auto coarse = duhamel_bilinear(u, v);
  const auto fine = duhamel_bilinear(uf, vf);
  const double nc = spectral::l2_norm_spectral(coarse.slice(coarse.size() - 1));
  const double nf = spectral::l2_norm_spectral(fine.slice(fine.size() - 1));
  CHECK(nf > 0.0);
  CHECK(std::abs(nc - nf) / nf < 0.01);
}

TEST_CASE("force_duhamel: closed forms and linearity") {
  Grid g(2 * kPi, 16);
  const auto times = graded_mesh(1.0, 8);
  const ScalarTrajectory scalar = heat_trajectory(sampling::random_scalar(g, 5), times);
  double worst = 0.0;
  for (const auto& s : force_duhamel(scalar).slices()) worst = std::max(worst, testing::max_abs_coeff(s));
  CHECK(worst < 1e-15);
  CHECK(force_duhamel(ScalarTrajectory::zeros(g, times)).is_zero());

  // V01 = cos y: P div V = (-sin y, 0) with |k|^2 = 1.
  // V00 = cos(x + y): div V = (-sin(x + y), 0), projected to (-sin, sin) / 2, |k|^2 = 2.
  Samples<4> s(g);
  const int n = g.resolution();
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = ix * g.spacing(), y = iy * g.spacing();
      const std::size_t p = static_cast<std::size_t>(iy * n + ix);
      s.values[0][p] = std::cos(x + y);
      s.values[1][p] = std::cos(y);
    }
  }
  const auto V = spectral::to_spectral(s);
  const auto out = force_duhamel(TensorTrajectory(times, std::vector<TensorField>(times.size(), V)));
  double err = 0.0;
  for (std::size_t m = 0; m < times.size(); ++m) {
    const double t = times[m];
    const auto phys = spectral::to_physical(out.slice(m));
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const double x = ix * g.spacing(), y = iy * g.spacing();
        const std::size_t p = static_cast<std::size_t>(iy * n + ix);
        const double a = -std::sin(y) * heat_primitive(1.0, t) - 0.5 * std::sin(x + y) * heat_primitive(2.0, t);
        const double b = 0.5 * std::sin(x + y) * heat_primitive(2.0, t);
        err = std::max({err, std::abs(phys.values[0][p] - a), std::abs(phys.values[1][p] - b)});
      }
    }
  }
  CHECK(err < 1e-13);

  const TensorTrajectory A = heat_trajectory(sampling::random_tensor(g, 8), times);
  const TensorTrajectory B = heat_trajectory(sampling::random_tensor(g, 9), times);
  CHECK(max_rel_diff(force_duhamel(A + B), force_duhamel(A) + force_duhamel(B)) < 1e-12);
}

TEST_CASE("product trapezoid weights") {
  for (double a : {0.0, 1e-6, 0.05, 0.099, 0.1, 0.5, 3.0, 40.0}) {
    const auto [l, r] = product_trapezoid_weights(a);
    // midpoint-rule oracle on a fine partition
    double ol = 0.0, orr = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      ol += x * std::exp(-a * x) / n;
      orr += (1 - x) * std::exp(-a * x) / n;
    }
    CHECK(l == doctest::Approx(ol).epsilon(1e-8));
    CHECK(r == doctest::Approx(orr).epsilon(1e-8));
  }
}

TEST_CASE("solve_small_data: trivial, perturbative and rescaled data") {
  Grid g(2 * kPi, 32);
  auto cfg = quick_config(1.0);
  const auto zero = solve_small_data(VectorField(g), cfg);
  REQUIRE(zero.solution);
  CHECK(zero.solution->is_zero());

  auto w0 = sampling::random_divergence_free(g, 21, {.slope = 2.0, .max_mode = 6, .l2_norm = 1e-3});
  const auto r = solve_small_data(w0, cfg);
  REQUIRE(r.solution);
  CHECK(r.picard.iterations <= 5);
  CHECK(r.residual < 1e-6);
  // heat flow minus one Duhamel correction, summed directly
  const auto times = graded_mesh(cfg.horizon, cfg.intervals, cfg.grading);
  const auto heat = heat_trajectory(w0, times);
  const auto oracle = heat - duhamel_integral_direct(times, projected_products(heat, heat));
  double gap = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < times.size(); ++m) {
    gap = std::max(gap, l2_gap(r.solution->slice(m), oracle.slice(m)));
    scale = std::max(scale, spectral::l2_norm_spectral(oracle.slice(m)));
  }
  CHECK(gap / scale < 1e-6);
  for (const auto& s : r.solution->slices()) {
    CHECK(spectral::divergence_defect(s) < 1e-10);
    CHECK(std::abs(s.mode(0, 0, 0)) + std::abs(s.mode(1, 0, 0)) < 1e-14);
  }

  // 2 w0(2 .) on the half torus over a quarter of the time
  auto big = sampling::random_divergence_free(g, 22, {.slope = 1.0, .max_mode = 8, .l2_norm = 1.0});
  big *= 0.3 / norms::dbmo_norm(big);
  const auto base = solve_small_data(big, cfg);
  auto cfg_up = cfg;
  cfg_up.horizon = cfg.horizon / 4;
  const auto up = solve_small_data(spectral::dyadic_rescale(big, spectral::RescaleDirection::up), cfg_up);
  REQUIRE(base.solution);
  REQUIRE(up.solution);
  CHECK(base.ratio > 0.0);
  CHECK(std::abs(up.ratio / base.ratio - 1.0) < 0.1);
  CHECK(base.picard.max_contraction_ratio() < 1.0);
}

TEST_CASE("solve_small_data: gate refuses large data") {
  Grid g(2 * kPi, 16);
  auto cfg = quick_config(1.0);
  auto w0 = sampling::random_divergence_free(g, 4, {.slope = 1.0, .max_mode = 5, .l2_norm = 1.0});
  w0 *= 10.0 / norms::dbmo_norm(w0);
  const auto r = solve_small_data(w0, cfg);
  CHECK(r.picard.status == PicardStatus::refused);
  CHECK_FALSE(r.solution);
  CHECK(r.report.message.find("split") != std::string::npos);
}

TEST_CASE("split_initial_data: exhaustion, minimality, additivity") {
  Grid g(2 * kPi, 32);
  const auto band = sampling::random_divergence_free(g, 31, {.slope = 1.0, .max_mode = 3, .l2_norm = 1.0});
  const auto s0 = split_initial_data(band, 1e-12);
  REQUIRE(s0.ok);
  CHECK(s0.w0.is_zero());
  CHECK(std::exp2(s0.level) > std::sqrt(18.0));

  const auto u0 = sampling::random_divergence_free(g, 32, {.slope = 0.5, .max_mode = 0, .l2_norm = 3.0});
  const auto s = split_initial_data(u0, 0.1);
  REQUIRE(s.ok);
  CHECK(s.dbmo_w0 <= 0.1);
  // brute-force scan of every cutoff below the chosen one
  for (int level = s.level - 1; level >= 0; --level) {
    const auto rest = u0 - spectral::low_pass(u0, std::exp2(level));
    CHECK(norms::dbmo_norm(rest) > 0.1);
  }
  for (int c = 0; c < 2; ++c) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      CHECK((s.v0.component(c)[p] + s.w0.component(c)[p]) == u0.component(c)[p]);
    }
  }
  CHECK(spectral::divergence_defect(s.v0) < 1e-12);
  CHECK(spectral::divergence_defect(s.w0) < 1e-12);

  const auto capped = split_initial_data(u0, 1e-9, {}, 1);
  CHECK_FALSE(capped.ok);
  CHECK(capped.best_epsilon > 1e-9);
}

TEST_CASE("solve_v_local: degenerate couplings and Taylor-Green") {
  Grid g(2 * kPi, 32);
  auto cfg = quick_config(1.0);
  const auto times = graded_mesh(1.0, 24);
  const auto zero_w = VectorTrajectory::zeros(g, times);

  const auto v0 = sampling::random_divergence_free(g, 41, {.slope = 2.0, .max_mode = 4, .l2_norm = 0.5});
  const auto r = solve_v_local(v0, zero_w, cfg);
  REQUIRE(r.solution);
  CHECK(r.residual < 1e-6);
  CHECK(r.lambda == 0.0);
  CHECK(ns_residual(*r.solution, v0, nullptr) < 1e-6);
  CHECK(r.yt > 0.0);

  const auto z = solve_v_local(VectorField(g), zero_w, cfg);
  REQUIRE(z.solution);
  CHECK(z.solution->is_zero());

  const auto tg = sampling::taylor_green(g);
  const auto t = solve_v_local(tg, zero_w, cfg);
  REQUIRE(t.solution);
  const auto half = t.solution->at_time(0.5);
  // at_time interpolates, so compare at the nodes
  double err = 0.0;
  for (std::size_t m = 0; m < times.size(); ++m) {
    const auto exact = std::exp(-2.0 * times[m]) * tg;
    err = std::max(err, l2_gap(t.solution->slice(m), exact) / spectral::l2_norm_spectral(exact));
  }
  CHECK(err < 1e-6);
  CHECK(spectral::l2_norm_spectral(half) > 0.0);

  // coupled: small w from the small-data solver
  auto w0 = sampling::random_divergence_free(g, 42, {.slope = 1.0, .max_mode = 10, .l2_norm = 1.0});
  w0 *= 0.2 / norms::dbmo_norm(w0);
  const auto w = solve_small_data(w0, cfg);
  REQUIRE(w.solution);
  const auto coupled = solve_v_local(v0, *w.solution, cfg);
  REQUIRE(coupled.solution);
  CHECK(coupled.lambda < 1.0);
  CHECK(coupled.residual < 1e-6);
  CHECK(coupled.picard.max_contraction_ratio() < 1.0);
}

TEST_CASE("energy_continuation: Stokes, Taylor-Green, zero") {
  Grid g(2 * kPi, 32);
  auto cfg = quick_config(1.0);
  const auto zero_w = VectorTrajectory::zeros(g, graded_mesh(1.0, 8));

  const auto stokes = sampling::random_divergence_free(g, 51, {.slope = 2.0, .max_mode = 6, .l2_norm = 1e-8});
  const auto e = energy_continuation(stokes, zero_w, 0.0, 1.0, cfg);
  REQUIRE(e.report.ok());
  CHECK(e.ledger.max_residual() < 1e-10);
  // per-mode closed form at t = 1
  VectorField exact = spectral::heat_propagate(stokes, 1.0);
  CHECK(l2_gap(e.states->slice(e.states->size() - 1), exact) / spectral::l2_norm_spectral(exact) < 1e-6);

  const auto tg = sampling::taylor_green(g);
  std::vector<double> rec{0.25, 0.5, 0.75};
  const auto t = energy_continuation(tg, zero_w, 0.0, 1.0, cfg, rec);
  REQUIRE(t.report.ok());
  CHECK(t.ledger.max_residual() < 1e-6);
  for (std::size_t m = 0; m < t.states->size(); ++m) {
    const double time = t.states->time(m);
    const double expected = std::exp(-2.0 * time) * spectral::l2_norm_spectral(tg);
    CHECK(std::abs(spectral::l2_norm_spectral(t.states->slice(m)) - expected) < 1e-6 * expected);
  }

  const auto z = energy_continuation(VectorField(g), zero_w, 0.0, 1.0, cfg);
  REQUIRE(z.states);
  CHECK(z.states->is_zero());
  CHECK(z.ledger.max_residual() == 0.0);
}

TEST_CASE("energy_continuation: coupled ledger converges") {
  Grid g(2 * kPi, 32);
  auto cfg = quick_config(1.0);
  auto w0 = sampling::random_divergence_free(g, 61, {.slope = 1.0, .max_mode = 8, .l2_norm = 1.0});
  w0 *= 0.3 / norms::dbmo_norm(w0);
  const auto w = solve_small_data(w0, cfg);
  REQUIRE(w.solution);
  const auto v = sampling::random_divergence_free(g, 62, {.slope = 1.0, .max_mode = 6, .l2_norm = 1.0});
  double prev = 0.0;
  for (double step : {0.02, 0.01, 0.005}) {
    cfg.energy_step = step;
    const auto e = energy_continuation(v, *w.solution, 0.1, 0.6, cfg);
    REQUIRE(e.report.ok());
    const double res = e.ledger.max_residual();
    if (prev > 0.0) CHECK(res < 0.5 * prev);
    prev = res;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("continuation_grid keeps record times") {
  const auto grid = continuation_grid(0.1, 1.0, 0.2, {0.35, 0.5, 2.0});
  CHECK(grid.front() == 0.1);
  CHECK(grid.back() == 1.0);
  CHECK(std::find(grid.begin(), grid.end(), 0.35) != grid.end());
  CHECK(std::find(grid.begin(), grid.end(), 0.5) != grid.end());
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] - grid[i - 1] <= 0.2 + 1e-12);
}

TEST_CASE("fit_power_law recovers exponents") {
  std::vector<double> t, y;
  for (int i = 1; i <= 40; ++i) {
    t.push_back(0.01 * std::pow(1000.0, i / 40.0));
    y.push_back(3.0 * std::pow(t.back(), 0.37));
  }
  CHECK(fit_power_law(t, y) == doctest::Approx(0.37).epsilon(1e-10));
  std::fill(y.begin(), y.end(), 0.0);
  CHECK(fit_power_law(t, y) == 0.0);
}

TEST_CASE("solve_global: zero datum and small-data branch") {
  Grid g(2 * kPi, 32);
  auto cfg = quick_config(2.0);
  cfg.series_points = 6;
  const auto zero = solve_global(VectorField(g), cfg);
  REQUIRE(zero.ok());
  REQUIRE(zero.solution);
  CHECK(zero.solution->is_zero());
  for (double d : zero.series_dbmo) CHECK(d == 0.0);

  auto u0 = sampling::random_divergence_free(g, 71, {.slope = 2.0, .max_mode = 5, .l2_norm = 1.0});
  u0 *= 0.05 / norms::dbmo_norm(u0);
  const auto r = solve_global(u0, cfg);
  REQUIRE(r.ok());
  CHECK(r.split->v0.is_zero());
  const auto direct = solve_small_data(u0, cfg);
  REQUIRE(direct.solution);
  for (std::size_t m = 0; m < r.solution->size(); ++m) {
    const double t = r.solution->time(m);
    const auto ref = direct.solution->at_time(t);
    CHECK(l2_gap(r.solution->slice(m), ref) <= 1e-12 * spectral::l2_norm_spectral(ref) + 1e-300);
  }
}

TEST_CASE("solve_global: multi-mode datum") {
  Grid g(2 * kPi, 32);
  auto cfg = quick_config(2.0);
  cfg.series_points = 8;
  cfg.local_horizon = 0.5;
  auto u0 = sampling::random_divergence_free(g, 81, {.slope = 1.0, .max_mode = 0, .l2_norm = 3.0});
  const auto r = solve_global(u0, cfg);
  REQUIRE(r.ok());
  CHECK(r.overlap_discrepancy < 1e-4);
  CHECK(r.energy->ledger.max_residual() < 1e-4);
  CHECK(r.local->residual < 1e-6);
  CHECK(r.small->residual < 1e-6);
  CHECK(std::isfinite(r.growth_exponent));
  for (const auto& s : r.solution->slices()) {
    CHECK(spectral::divergence_defect(s) < 1e-10);
    CHECK(std::abs(s.mode(0, 0, 0)) + std::abs(s.mode(1, 0, 0)) < 1e-14);
  }
  // v + w = u at t = 0
  CHECK(max_rel_diff(r.solution->slice(0), u0) < 1e-12);
}

TEST_CASE("solver config round trip and validation") {
  SolverConfig c;
  c.epsilon = 0.05;
  c.carleson.octaves = 5;
  const json j = c;
  const auto back = solver_config_from_json(j);
  CHECK(back.epsilon == 0.05);
  CHECK(back.carleson.octaves == 5);
  CHECK_THROWS_AS(solver_config_from_json(json{{"bogus", 1}}), InputError);
  CHECK_THROWS_AS(solver_config_from_json(json{{"horizon", -1.0}}), InputError);
}
