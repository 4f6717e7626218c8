#include <cmath>
#include <random>

#include "doctest.h"
#include "nsbmo/field_io.hpp"
#include "nsbmo/littlewood_paley.hpp"
#include "nsbmo/random_fields.hpp"
#include "nsbmo/scaling.hpp"
#include "nsbmo/spectral.hpp"
#include "support.hpp"

using namespace nsbmo;
using namespace nsbmo::spectral;
using nsbmo::testing::kPi;
using nsbmo::testing::convolution_oracle;
using nsbmo::testing::max_rel_diff;

namespace {

VectorField from_samples(const Grid& g, auto fx, auto fy) {
  Samples<2> s(g);
  const int n = g.resolution();
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = g.spacing() * ix;
      const double y = g.spacing() * iy;
      s.values[0][static_cast<std::size_t>(iy) * n + ix] = fx(x, y);
      s.values[1][static_cast<std::size_t>(iy) * n + ix] = fy(x, y);
    }
  }
  return to_spectral(s);
}

}  // namespace

TEST_CASE("grid validates its parameters") {
  CHECK_THROWS_AS(Grid(2 * kPi, 6), InputError);
  CHECK_THROWS_AS(Grid(2 * kPi, 17), InputError);
  CHECK_THROWS_AS(Grid(0.0, 16), InputError);
  Grid g(2 * kPi, 16);
  CHECK(g.mode(15) == -1);
  CHECK(g.index_of(-1) == 15);
  CHECK(g.wavenumber(3) == doctest::Approx(3.0));
}

TEST_CASE("transforms: zero, single mode, round trip and Parseval") {
  Grid g(2 * kPi, 32);
  VectorField zero(g);
  for (const auto& comp : to_physical(zero).values) {
    for (double v : comp) CHECK(v == 0.0);
  }

  VectorField cosine(g);
  cosine.mode(0, 0, 1) = 0.5;
  cosine.mode(0, 0, -1) = 0.5;
  const auto s = to_physical(cosine);
  for (int ix = 0; ix < 32; ++ix) {
    CHECK(s.values[0][static_cast<std::size_t>(5) * 32 + ix] == doctest::Approx(std::cos(g.spacing() * ix)).epsilon(1e-14));
  }

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = sampling::random_divergence_free(g, seed, {.slope = 1.0, .max_mode = 15});
    const auto back = to_spectral(to_physical(f));
    CHECK(max_rel_diff(back, f) < 1e-13);
    const double a = l2_norm_spectral(f);
    const double b = l2_norm_physical(to_physical(f));
    CHECK(std::abs(a - b) / a < 1e-12);
    CHECK(nsbmo::testing::hermitian_defect(f) == 0.0);
  }
  Samples<2> bad(Grid(2 * kPi, 16));
  bad.values[0].resize(3);
  CHECK_THROWS_AS(to_spectral(bad), InputError);
}

TEST_CASE("gradient and divergence are exact spectral derivatives") {
  Grid g(4.0, 32);
  ScalarField constant(g);
  constant.mode(0, 0, 0) = 3.0;
  CHECK(gradient(constant).is_zero());

  // f = sin(2 pi x / L)
  ScalarField f(g);
  f.mode(0, 0, 1) = Complex(0.0, -0.5);
  f.mode(0, 0, -1) = Complex(0.0, 0.5);
  const auto grad = to_physical(gradient(f));
  const double w = 2 * kPi / 4.0;
  for (int ix = 0; ix < 32; ++ix) {
    CHECK(grad.values[0][static_cast<std::size_t>(ix)] == doctest::Approx(w * std::cos(w * g.spacing() * ix)).epsilon(1e-13));
    CHECK(std::abs(grad.values[1][static_cast<std::size_t>(ix)]) < 1e-14);
  }

  const auto r = sampling::random_scalar(g, 7);
  CHECK(max_rel_diff(divergence(gradient(r)), laplacian(r)) < 1e-15);

  const auto u = sampling::random_divergence_free(g, 3);
  CHECK(u.divergence_free());
  const auto d = divergence(u);
  CHECK(nsbmo::testing::max_abs_coeff(d) < 1e-12 * nsbmo::testing::max_abs_coeff(u));
}

TEST_CASE("Leray projection: kernel, range and a brute-force mode") {
  Grid g(2 * kPi, 16);
  const auto phi = sampling::random_scalar(g, 11);
  const auto grad = gradient(phi);
  CHECK(nsbmo::testing::max_abs_coeff(leray_project(grad)) < 1e-12 * nsbmo::testing::max_abs_coeff(grad));

  const auto u = sampling::random_divergence_free(g, 5);
  CHECK(max_rel_diff(leray_project(u), u) < 1e-13);
  const auto pu = leray_project(u + grad);
  CHECK(max_rel_diff(leray_project(pu), pu) < 1e-15);

  // u = (cos(x + y), 0): at k = (1, 1), P = I - k k^T / 2 maps (1/2, 0) to (1/4, -1/4).
  const auto c = from_samples(g, [](double x, double y) { return std::cos(x + y); }, [](double, double) { return 0.0; });
  const auto p = leray_project(c);
  CHECK(std::abs(p.mode(0, 1, 1) - Complex(0.25, 0.0)) < 1e-15);
  CHECK(std::abs(p.mode(1, 1, 1) - Complex(-0.25, 0.0)) < 1e-15);
  CHECK(std::abs(p.mode(0, -1, -1) - Complex(0.25, 0.0)) < 1e-15);
  CHECK(std::abs(p.mode(1, -1, -1) - Complex(-0.25, 0.0)) < 1e-15);
  CHECK(spectral::divergence_defect(p) < 1e-15);
}

TEST_CASE("heat semigroup") {
  Grid g(2 * kPi, 16);
  const auto f = sampling::random_divergence_free(g, 1);
  CHECK(max_rel_diff(heat_propagate(f, 0.0), f) == 0.0);
  CHECK_THROWS_AS(heat_propagate(f, -1e-3), InputError);
  CHECK(heat_propagate(VectorField(g), 2.0).is_zero());

  const auto single = sampling::shear_mode(g, 1, 1.0);
  CHECK(heat_propagate(single, 0.5).mode(1, 0, 1).real() == doctest::Approx(0.5 * 0.60653066).epsilon(1e-8));

  const auto a = heat_propagate(heat_propagate(f, 0.3), 0.45);
  const auto b = heat_propagate(f, 0.75);
  CHECK(max_rel_diff(a, b) < 1e-13);

  double prev = l2_norm_spectral(f);
  for (double t : {0.01, 0.05, 0.2, 1.0, 3.0}) {
    const double now = l2_norm_spectral(heat_propagate(f, t));
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("nonlinear term: bilinearity, Taylor-Green and the convolution oracle") {
  Grid g(2 * kPi, 16);
  const auto u = sampling::random_divergence_free(g, 21);
  VectorField zero(g);
  CHECK(nonlinear_term(u, zero).is_zero());
  CHECK(nonlinear_term(zero, u).is_zero());

  const auto tg = sampling::taylor_green(Grid(2 * kPi, 32));
  const auto proj = projected_nonlinear_term(tg, tg);
  CHECK(nsbmo::testing::max_abs_coeff(proj) < 1e-12);
  // The unprojected term is a nonzero pure gradient.
  CHECK(nsbmo::testing::max_abs_coeff(nonlinear_term(tg, tg)) > 0.1);

  for (int n : {8, 16}) {
    Grid grid(2 * kPi, n);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto a = sampling::random_divergence_free(grid, 1000 + seed, {.slope = 0.5, .max_mode = n / 2 - 1});
      const auto b = sampling::random_divergence_free(grid, 2000 + seed, {.slope = 0.5, .max_mode = n / 2 - 1});
      const auto fast = nonlinear_term(a, b);
      const auto slow = convolution_oracle(dealias(a), dealias(b));
      worst = std::max(worst, max_rel_diff(fast, slow));
      CHECK(nsbmo::testing::hermitian_defect(fast) < 1e-15);
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("Littlewood-Paley blocks") {
  CHECK(lp_weight(3, 1.0) == 0.0);
  // The chosen profile equals 1 on [1, 8/5]: |k| = 1 lives in block 0 only.
  CHECK(lp_weight(0, 1.0) == 1.0);
  CHECK(lp_weight(-1, 1.0) == 0.0);
  CHECK(lp_profile(0.75) == 0.0);
  CHECK(lp_profile(2.0) == 0.0);
  CHECK(lp_profile(1.9) > 0.0);
  for (double r = 0.05; r < 200.0; r *= 1.037) {
    double total = 0.0;
    int active = 0;
    for (int j = -10; j <= 12; ++j) {
      total += lp_weight(j, r);
      active += lp_weight(j, r) > 0.0;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(active <= 2);
  }

  Grid g(2 * kPi, 32);
  const auto f = sampling::random_divergence_free(g, 4, {.slope = 0.5, .max_mode = 15});
  const auto [lo, hi] = active_blocks(g);
  VectorField sum(g);
  for (int j = lo; j <= hi; ++j) sum += dyadic_block(f, j);
  CHECK(max_rel_diff(sum, remove_mean(f)) < 1e-12);
}

TEST_CASE("dyadic rescale and resampling") {
  Grid g(2 * kPi, 16);
  CHECK(dyadic_rescale(VectorField(g), RescaleDirection::up).is_zero());
  const auto single = sampling::shear_mode(g, 1, 0.7);
  const auto up = dyadic_rescale(single, RescaleDirection::up);
  CHECK(up.grid().side_length() == doctest::Approx(kPi));
  CHECK(up.grid().k_norm(1) == doctest::Approx(2.0));
  CHECK(up.mode(1, 0, 1).real() == doctest::Approx(0.7));  // amplitude 2a of the cosine (coefficient a)
  const auto f = sampling::random_divergence_free(g, 9);
  CHECK(l2_norm_spectral(dyadic_rescale(f, RescaleDirection::up)) == doctest::Approx(l2_norm_spectral(f)).epsilon(1e-14));
  CHECK(max_rel_diff(dyadic_rescale(dyadic_rescale(f, RescaleDirection::up), RescaleDirection::down), f) == 0.0);

  const auto fine = resample(f, 32);
  CHECK(l2_norm_spectral(fine) == doctest::Approx(l2_norm_spectral(f)).epsilon(1e-14));
  CHECK(max_rel_diff(resample(fine, 16), f) == 0.0);
  const auto rough = sampling::random_divergence_free(Grid(2 * kPi, 32), 1, {.max_mode = 15});
  CHECK_THROWS_AS(resample(rough, 16), InputError);
}

TEST_CASE("translation is a phase shift") {
  Grid g(2 * kPi, 16);
  const auto f = sampling::random_divergence_free(g, 2);
  const auto shifted = translate(f, g.spacing() * 3, g.spacing() * 5);
  const auto a = to_physical(f);
  const auto b = to_physical(shifted);
  for (int iy = 0; iy < 16; ++iy) {
    for (int ix = 0; ix < 16; ++ix) {
      const auto src = static_cast<std::size_t>((iy + 16 - 5) % 16) * 16 + (ix + 16 - 3) % 16;
      CHECK(b.values[0][static_cast<std::size_t>(iy) * 16 + ix] == doctest::Approx(a.values[0][src]).epsilon(1e-12));
    }
  }
}

TEST_CASE("field container round trip is bit exact") {
  Grid g(3.25, 16);
  auto f = sampling::random_divergence_free(g, 77);
  const auto dir = std::filesystem::temp_directory_path() / "nsbmo_test_io";
  std::filesystem::create_directories(dir);
  io::write_field(f, dir / "u.nsbf");
  const auto back = io::read_field<2>(dir / "u.nsbf");
  CHECK(back.grid() == g);
  CHECK(back.divergence_free());
  CHECK(back.mean_zero());
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.component(c)[i] == f.component(c)[i]);
  }
  CHECK(io::peek_components(dir / "u.nsbf") == 2);
  CHECK_THROWS_AS(io::read_field<1>(dir / "u.nsbf"), FormatError);

  const auto traj = heat_trajectory(f, graded_mesh(1.0, 4));
  io::write_trajectory(traj, dir / "traj");
  const auto tback = io::read_trajectory<2>(dir / "traj");
  CHECK(tback.times() == traj.times());
  CHECK(max_rel_diff(tback, traj) == 0.0);
  std::filesystem::remove_all(dir);
}
