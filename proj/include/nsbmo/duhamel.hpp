#pragma once

#include <vector>

#include "nsbmo/trajectory.hpp"

namespace nsbmo::solver {

/// int_0^{t_m} exp((t_m - s) Lap) F(s) ds at every node, with F given at the
/// nodes (t_0 = 0) and taken piecewise linear in s. The heat factor is
/// integrated exactly against each linear piece, which makes the rule a
/// product trapezoid: exact when F is linear in time, second order otherwise.
/// Evaluated by the one-step recursion over the nodes.
VectorTrajectory duhamel_integral(const std::vector<double>& times, const std::vector<VectorField>& integrand);

/// The same quadrature summed directly, node by node, without the recursion.
/// Quadratic in the node count; used to re-evaluate residuals independently.
VectorTrajectory duhamel_integral_direct(const std::vector<double>& times, const std::vector<VectorField>& integrand);

/// P div(u(t_m) (x) v(t_m)) at every node.
std::vector<VectorField> projected_products(const VectorTrajectory& u, const VectorTrajectory& v, bool dealiased = true);

/// B(u, v)(t) = int_0^t exp((t - s) Lap) P div(u(s) (x) v(s)) ds.
VectorTrajectory duhamel_bilinear(const VectorTrajectory& u, const VectorTrajectory& v, bool dealiased = true);

/// int_0^t exp((t - s) Lap) P grad V(s) ds. A gradient force is absorbed by the
/// pressure, so the result vanishes identically; kept for the scalar potential
/// of the forced system.
VectorTrajectory force_duhamel(const ScalarTrajectory& potential);

/// int_0^t exp((t - s) Lap) P div V(s) ds for a tensor potential V.
VectorTrajectory force_duhamel(const TensorTrajectory& potential);

/// Weights of the product trapezoid on one step with a = |k|^2 h:
/// first = int_0^1 x e^{-a x} dx (left node), second = int_0^1 (1 - x) e^{-a x} dx (right node).
std::pair<double, double> product_trapezoid_weights(double a);

}  // namespace nsbmo::solver
