#pragma once

#include <cstdint>

#include "nsbmo/field.hpp"

namespace nsbmo::sampling {

struct SpectrumSpec {
  /// Coefficient amplitude decays like |k|^-slope.
  double slope = 2.0;
  /// Largest integer mode index kept along each axis (0 = the dealiasing band N/3).
  int max_mode = 0;
  /// L^2 norm of the result (ignored when the draw is identically zero).
  double l2_norm = 1.0;
};

/// Seeded Gaussian divergence-free, mean-zero vector field.
VectorField random_divergence_free(const Grid& grid, std::uint64_t seed, const SpectrumSpec& spec = {});

/// Seeded Gaussian mean-zero scalar field.
ScalarField random_scalar(const Grid& grid, std::uint64_t seed, const SpectrumSpec& spec = {});

/// Seeded Gaussian tensor field (four independent mean-zero components).
TensorField random_tensor(const Grid& grid, std::uint64_t seed, const SpectrumSpec& spec = {});

/// (sin x cos y, -cos x sin y) scaled to the torus, times amplitude; exact
/// steady Euler flow whose Navier-Stokes solution is exp(-2 (2 pi / L)^2 t) u0.
VectorField taylor_green(const Grid& grid, double amplitude = 1.0);

/// amplitude * (0, cos(k x)) with k = 2 pi mode / L: a divergence-free single mode.
VectorField shear_mode(const Grid& grid, int mode = 1, double amplitude = 1.0);

}  // namespace nsbmo::sampling
