#include <cmath>

#include "doctest.h"
#include "nsbmo/harness.hpp"
#include "nsbmo/random_fields.hpp"
#include "nsbmo/spectral.hpp"
#include "support.hpp"

using namespace nsbmo;
using namespace nsbmo::harness;
using nsbmo::testing::kPi;

namespace {

// Mean of |y_1| over the unit disc by polar quadrature: the mean oscillation of
// a unit-slope linear function on a disc of radius 1.
double c_ball_oracle() {
  const int nr = 400, nt = 800;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) / nr;
    for (int j = 0; j < nt; ++j) {
      const double th = 2 * kPi * (j + 0.5) / nt;
      num += std::abs(r * std::cos(th)) * r;
      den += r;
    }
  }
  return num / den;
}

}  // namespace

TEST_CASE("checks carry value, tolerance and relation") {
  const auto a = check_below("x", 0.5, 1.0);
  CHECK(a.passed);
  CHECK(a.relation == "<");
  CHECK_FALSE(check_below("x", 1.0, 1.0).passed);
  CHECK(check_at_least("y", 4.0, 3.5).passed);
  const json j = a;
  CHECK(j.at("tolerance") == 1.0);
}

TEST_CASE("experiment spec parsing") {
  ExperimentSpec e;
  e.epsilons = {0.0, 0.2};
  e.tolerances = {{"growth_zero", 0.01}};
  const json j = e;
  const auto back = experiment_from_json(j);
  CHECK(back.epsilons == e.epsilons);
  CHECK(back.tolerance("growth_zero", 1.0) == 0.01);
  CHECK(back.tolerance("other", 1.0) == 1.0);
  CHECK_THROWS_AS(experiment_from_json(json{{"nope", 1}}), InputError);
  CHECK_THROWS_AS(experiment_from_json(json{{"epsilons", json::array()}}), InputError);
  CHECK_THROWS_AS(experiment_from_json(json{{"pairs", {"zz"}}}), InputError);
}

TEST_CASE("bilinear estimate: running max and calibration record") {
  Grid g(2 * kPi, 16);
  CHECK_THROWS_AS(estimate_bilinear_constant(g, 1.0, NormPair::xx, 5, 1), InputError);
  const auto e = estimate_bilinear_constant(g, 1.0, NormPair::xx, 12, 1, {}, 12);
  REQUIRE(e.ratios.size() == 12);
  for (double r : e.ratios) CHECK(r > 0.0);
  for (std::size_t i = 1; i < e.running_max.size(); ++i) CHECK(e.running_max[i] >= e.running_max[i - 1]);
  CHECK(e.max == e.running_max.back());
  CHECK(e.median <= e.max);
  // extending the sample set never lowers the estimate
  const auto more = estimate_bilinear_constant(g, 1.0, NormPair::xx, 16, 1, {}, 12);
  CHECK(more.max >= e.max);

  solver::Calibration cal;
  record_calibration(cal, e);
  const auto found = cal.find(g, 1.0, NormPair::xx);
  REQUIRE(found);
  CHECK(found->eta == e.max);
  CHECK(found->samples == 12);
}

TEST_CASE("energy identity verification") {
  Grid g(2 * kPi, 16);
  SolverConfig cfg;
  const auto zero_w = VectorTrajectory::zeros(g, graded_mesh(1.0, 8));
  const auto none = solver::energy_continuation(VectorField(g), zero_w, 0.0, 1.0, cfg);
  const auto v0 = verify_energy_identity(none.ledger, 0.0);
  CHECK(v0.check.passed);
  CHECK(v0.max_residual == 0.0);

  const auto stokes = sampling::random_divergence_free(g, 3, {.slope = 2.0, .max_mode = 4, .l2_norm = 1e-8});
  const auto e = solver::energy_continuation(stokes, zero_w, 0.0, 1.0, cfg);
  CHECK(verify_energy_identity(e.ledger, 1e-10).check.passed);

  const auto tg = solver::energy_continuation(sampling::taylor_green(g), zero_w, 0.0, 1.0, cfg);
  CHECK(verify_energy_identity(tg.ledger, 1e-6).check.passed);

  auto coupled_cfg = cfg;
  coupled_cfg.horizon = 1.0;
  coupled_cfg.intervals = 16;
  coupled_cfg.bilinear_constant = 0.1;
  auto w0 = sampling::random_divergence_free(g, 4, {.slope = 1.0, .max_mode = 6, .l2_norm = 1.0});
  w0 *= 0.3 / norms::dbmo_norm(w0);
  const auto w = solver::solve_small_data(w0, coupled_cfg);
  REQUIRE(w.solution);
  const auto v = sampling::random_divergence_free(g, 5, {.slope = 1.0, .max_mode = 5, .l2_norm = 1.0});
  const auto r = verify_energy_refinement(v, *w.solution, 0.1, 0.5, coupled_cfg, {0.02, 0.01, 0.005});
  CHECK(r.check.passed);
  CHECK(r.reductions.size() == 2);
}

TEST_CASE("growth exponent sweep") {
  ExperimentSpec e;
  e.resolution = 32;
  e.solver.bilinear_constant = 0.1;
  e.solver.intervals = 24;
  const auto r = verify_growth_exponent(e, 0.02);
  REQUIRE(r.points.size() == 4);
  CHECK(r.passed());
  CHECK(std::abs(r.points[0].exponent) < 0.02);
  for (const auto& p : r.points) {
    CHECK(p.ledger_residual < 1e-6);
    for (std::size_t i = 1; i < p.sup_energy.size(); ++i) CHECK(p.sup_energy[i] >= p.sup_energy[i - 1]);
  }
  // the oriented profile injects energy once epsilon > 0
  CHECK(r.points.back().exponent > 0.0);
}

TEST_CASE("scaling invariance report") {
  Grid g(2 * kPi, 32);
  const auto zero = verify_scaling_invariance(VectorField(g), critical_norms());
  for (const auto& row : zero.rows) CHECK(row.skipped);

  const auto mode = sampling::shear_mode(g, 3, 0.7);
  const auto single = verify_scaling_invariance(mode, critical_norms());
  CHECK(single.passed());
  for (const auto& row : single.rows) CHECK(std::abs(row.ratio - 1.0) < 1e-12);

  const auto f = sampling::random_divergence_free(g, 6, {.slope = 1.0});
  const auto r = verify_scaling_invariance(f, critical_norms());
  CHECK(r.passed());
  for (const auto& row : r.rows) CHECK(row.translation_gap < 1e-12);
}

TEST_CASE("embedding chain") {
  Grid g(2 * kPi, 16);
  const auto r = embedding_chain_report(g, 6, 2);
  CHECK(r.rows.size() == 4);
  CHECK(r.passed());
  for (const auto& row : r.rows) {
    CHECK(std::isfinite(row.max_ratio));
    CHECK(row.min_ratio > 0.0);
    CHECK(row.min_ratio <= row.max_ratio);
  }
  // L^2 of a (0, cos 3x) on the 2 pi torus is a pi sqrt 2
  const auto mode = sampling::shear_mode(g, 3, 0.7);
  CHECK(norms::evaluate(norms::NormSpec{"lebesgue", 0.0, 2.0, 2.0}, mode).value == doctest::Approx(0.7 * kPi * std::sqrt(2.0)));
}

TEST_CASE("oscillation profile") {
  Grid g(2 * kPi, 32);
  ScalarField constant(g);
  constant.mode(0, 0, 0) = 2.0;
  const auto flat = vmo_oscillation_profile(constant, 2);
  for (double o : flat.oscillation) CHECK(o < 1e-14);

  ScalarField wave(g);
  wave.mode(0, 0, 1) = 0.5;
  wave.mode(0, 0, -1) = 0.5;  // cos x, max |grad| = 1
  const auto p = vmo_oscillation_profile(wave, 4);
  CHECK(p.vmo_like);
  CHECK(p.decay_ratio == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(p.slope / c_ball_oracle() - 1.0) < 0.2);
  CHECK(std::abs(c_ball_oracle() - 4.0 / (3.0 * kPi)) < 1e-5);

  auto samples = spectral::to_physical(wave);
  samples.values[0][5 * 32 + 7] += 1.0;
  const auto spiked = vmo_oscillation_profile(spectral::to_spectral(samples), 4);
  CHECK_FALSE(spiked.vmo_like);
  CHECK(spiked.oscillation.front() > 2.0 * p.oscillation.front());
}

TEST_CASE("Taylor-Green benchmark") {
  Grid g(2 * kPi, 16);
  SolverConfig cfg;
  cfg.local_intervals = 16;
  const auto none = taylor_green_benchmark(g, 0.0, cfg);
  CHECK(none.local_error == 0.0);
  CHECK(none.energy_error == 0.0);

  const auto r = taylor_green_benchmark(g, 1.0, cfg);
  CHECK(r.local_error < 1e-6);
  CHECK(r.energy_error < 1e-6);
  CHECK(r.local_ratio >= 3.5);
  CHECK(r.energy_ratio >= 3.5);
  CHECK(r.passed());
}

TEST_CASE("small-data family") {
  Grid g(2 * kPi, 16);
  SolverConfig cfg;
  cfg.horizon = 1.0;
  cfg.intervals = 16;
  cfg.bilinear_constant = 0.1;
  const auto f = small_data_family(g, cfg, 3, 10);
  CHECK(f.ratios.size() == 3);
  CHECK(f.passed());
  for (int it : f.iterations) CHECK(it <= 20);
  CHECK_THROWS_AS(small_data_family(g, cfg, 3, 10, 1.5), InputError);
}
