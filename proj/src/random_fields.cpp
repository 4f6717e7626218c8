#include "nsbmo/random_fields.hpp"

#include <cmath>
#include <random>

#include "nsbmo/fft.hpp"
#include "nsbmo/spectral.hpp"

namespace nsbmo::sampling {

namespace {

template <int C>
Field<C> gaussian_draw(const Grid& grid, std::uint64_t seed, const SpectrumSpec& spec) {
  if (spec.max_mode < 0) throw InputError("SpectrumSpec: max_mode must be nonnegative");
  Field<C> f(grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int band = spec.max_mode > 0 ? std::min(spec.max_mode, grid.resolution() / 2 - 1) : grid.resolution() / 3;
  const int n = grid.resolution();
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int my = grid.mode(iy);
      const int mx = grid.mode(ix);
      if (std::abs(my) > band || std::abs(mx) > band || (mx == 0 && my == 0) || grid.is_nyquist(iy) ||
          grid.is_nyquist(ix)) {
        continue;
      }
      const double k = grid.k_norm(static_cast<std::size_t>(iy) * n + ix);
      const double amp = std::pow(k, -spec.slope);
      for (int c = 0; c < C; ++c) {
        const double re = normal(rng);
        const double im = normal(rng);
        f.at(c, iy, ix) = amp * Complex(re, im);
      }
    }
  }
  for (int c = 0; c < C; ++c) fft::make_hermitian(grid, f.component(c));
  return f;
}

template <int C>
void normalize(Field<C>& f, double target) {
  const double norm = spectral::l2_norm_spectral(f);
  if (norm > 0.0) f *= target / norm;
}

}  // namespace

VectorField random_divergence_free(const Grid& grid, std::uint64_t seed, const SpectrumSpec& spec) {
  auto f = spectral::leray_project(gaussian_draw<2>(grid, seed, spec));
  normalize(f, spec.l2_norm);
  return f;
}

ScalarField random_scalar(const Grid& grid, std::uint64_t seed, const SpectrumSpec& spec) {
  auto f = spectral::remove_mean(gaussian_draw<1>(grid, seed, spec));
  normalize(f, spec.l2_norm);
  return f;
}

TensorField random_tensor(const Grid& grid, std::uint64_t seed, const SpectrumSpec& spec) {
  auto f = spectral::remove_mean(gaussian_draw<4>(grid, seed, spec));
  normalize(f, spec.l2_norm);
  return f;
}

VectorField taylor_green(const Grid& grid, double amplitude) {
  // sin x cos y = (1/4i)[e^{i(x+y)} + e^{i(x-y)} - e^{-i(x-y)} - e^{-i(x+y)}]
  // cos x sin y = (1/4i)[e^{i(x+y)} - e^{i(x-y)} + e^{-i(x-y)} - e^{-i(x+y)}]
  VectorField u(grid);
  const Complex q = amplitude / Complex(0.0, 4.0);
  u.mode(0, 1, 1) = q;
  u.mode(0, -1, 1) = q;
  u.mode(0, 1, -1) = -q;
  u.mode(0, -1, -1) = -q;
  u.mode(1, 1, 1) = -q;
  u.mode(1, -1, 1) = q;
  u.mode(1, 1, -1) = -q;
  u.mode(1, -1, -1) = q;
  u.set_divergence_free(true);
  u.set_mean_zero(true);
  return u;
}

VectorField shear_mode(const Grid& grid, int mode, double amplitude) {
  if (mode == 0 || std::abs(mode) >= grid.resolution() / 2) throw InputError("shear_mode: mode out of range");
  VectorField u(grid);
  u.mode(1, 0, mode) = 0.5 * amplitude;
  u.mode(1, 0, -mode) = 0.5 * amplitude;
  u.set_divergence_free(true);
  u.set_mean_zero(true);
  return u;
}

}  // namespace nsbmo::sampling
