#pragma once

#include <functional>

#include "nsbmo/field.hpp"

namespace nsbmo::spectral {

template <int C>
Samples<C> to_physical(const Field<C>& f);

/// Inverse of to_physical. Vector fields come back with no flags set.
template <int C>
Field<C> to_spectral(const Samples<C>& samples);

/// Discrete L^2 norm from the coefficients: L * sqrt(sum |c|^2).
template <int C>
double l2_norm_spectral(const Field<C>& f);
/// Discrete L^2 norm from point samples: sqrt(h^2 sum |f(x_j)|^2).
template <int C>
double l2_norm_physical(const Samples<C>& s);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
ScalarField laplacian(const ScalarField& f);
/// Row-wise divergence of a tensor field: (div V)_i = sum_j d_j V_ij.
VectorField divergence(const TensorField& v);
/// Gradient of each component: (d_x u0, d_y u0, d_x u1, d_y u1).
TensorField jacobian(const VectorField& u);

/// Applies I - k k^T / |k|^2 per mode; the k = 0 mode is cleared.
VectorField leray_project(const VectorField& u);

/// Multiplies each mode by exp(-|k|^2 t). Throws InputError for t < 0.
template <int C>
Field<C> heat_propagate(const Field<C>& f, double t);

/// Clears every mode whose integer index exceeds N/3 along either axis.
template <int C>
Field<C> dealias(const Field<C>& f);
/// Keeps modes with |k| < cutoff (strict); the rest are cleared.
template <int C>
Field<C> low_pass(const Field<C>& f, double cutoff);

/// div(u (x) v), i.e. the vector with components sum_j d_j (u_j v_i), computed
/// pseudo-spectrally with the 2/3 rule on inputs and output (skipped when
/// dealiased is false). Not projected.
VectorField nonlinear_term(const VectorField& u, const VectorField& v, bool dealiased = true);

/// P div(u (x) v): the projected quadratic term used by the Duhamel operator.
VectorField projected_nonlinear_term(const VectorField& u, const VectorField& v, bool dealiased = true);

/// Translation by (dx, dy) applied as the phase factor exp(-i k.shift).
template <int C>
Field<C> translate(const Field<C>& f, double dx, double dy);

/// Generic diagonal multiplier: each mode scaled by m(|k|).
template <int C>
Field<C> apply_radial_multiplier(const Field<C>& f, const std::function<double(double)>& m);

template <int C>
Field<C> remove_mean(const Field<C>& f);

/// Relative size of k.u(k) against |k||u(k)|, maximized over modes.
double divergence_defect(const VectorField& u);

}  // namespace nsbmo::spectral
