#pragma once

#include <limits>

#include "nsbmo/field.hpp"
#include "nsbmo/trajectory.hpp"

namespace nsbmo::norms {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Discretization of the parabolic-window suprema shared by the Carleson-type
/// norms. Radii run over R_i = R_top * 2^(-i / substeps), i = 0..octaves*substeps;
/// R_top is sqrt(T) for trajectory norms and L/2 for the field norms.
struct CarlesonSettings {
  int octaves = 8;
  int substeps = 4;
  /// Ball centers on every stride-th lattice node along each axis.
  int center_stride = 1;
  /// Gauss-Legendre points per time panel in the field (heat-extension) norms.
  int gauss_points = 6;
};

template <int C>
double lebesgue_norm(const Field<C>& f, double p);

/// (sum |k|^2 |c(k)|^2)^(1/2) times L, i.e. ||grad f||_2.
template <int C>
double hdot1_norm(const Field<C>& f);

/// Homogeneous Besov norm from the Littlewood-Paley blocks; p, q may be kInfinity.
template <int C>
double besov_norm(const Field<C>& f, double s, double p, double q);

/// sup over R <= sqrt(T) and centers x of (int_0^{R^2} avg_{B(x,R)} |u|^2 dt)^(1/2);
/// time integral by the trapezoid rule on the trajectory nodes.
template <int C>
double carleson_norm(const Trajectory<C>& traj, double T, const CarlesonSettings& settings = {});

/// Heat-extension norm: the same parabolic supremum applied to exp(t Lap) f
/// with R up to L/2 and Gauss-Legendre panels in time.
template <int C>
double dbmo_norm(const Field<C>& f, const CarlesonSettings& settings = {});

/// Heat-extension BMO norm of a scalar: integrand |grad exp(t Lap) f|^2.
double bmo_grad_norm(const ScalarField& f, const CarlesonSettings& settings = {});

struct XtBreakdown {
  double sup_term = 0.0;       // sup sqrt(t) ||w(t)||_inf
  double gradient_term = 0.0;  // sup t ||grad w(t)||_inf
  double carleson_term = 0.0;
  double total() const { return sup_term + gradient_term + carleson_term; }
};

XtBreakdown xt_breakdown(const VectorTrajectory& traj, double T, const CarlesonSettings& settings = {});
double xt_norm(const VectorTrajectory& traj, double T, const CarlesonSettings& settings = {});

/// sup_t ||f(t)||_2 + sup_{t>0} sqrt(t) ||grad f(t)||_2 on [0, T].
double yt_norm(const VectorTrajectory& traj, double T);

/// (int_0^T ||u(t)||_{q_x}^{p_t} dt)^(1/p_t) by the trapezoid rule; p_t = kInfinity gives the sup.
template <int C>
double lpt_lqx_norm(const Trajectory<C>& traj, double p_t, double q_x, double T);

/// L^1 Carleson term + sup t ||V||_inf + sup t^(3/2) ||grad V||_inf on (0, T].
template <int C>
double z_norm(const Trajectory<C>& traj, double T, const CarlesonSettings& settings = {});

/// Pointwise Euclidean magnitude of a field at the lattice nodes.
template <int C>
std::vector<double> magnitude_samples(const Field<C>& f);
/// Pointwise Frobenius norm of the gradient at the lattice nodes.
template <int C>
std::vector<double> gradient_magnitude_samples(const Field<C>& f);

}  // namespace nsbmo::norms
