#pragma once

#include <cstddef>
#include <vector>

#include "nsbmo/field.hpp"

namespace nsbmo {

/// Nodes t_m = T (m / M)^grading for m = 0..M.
std::vector<double> graded_mesh(double horizon, int intervals, double grading = 2.0);
/// Uniform nodes on [start, end] with the given number of intervals.
std::vector<double> uniform_mesh(double start, double end, int intervals);

/// Time-graded sequence of fields sharing one grid.
template <int C>
class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<Field<C>> slices);

  static Trajectory zeros(const Grid& grid, std::vector<double> times);

  const Grid& grid() const { return slices_.front().grid(); }
  std::size_t size() const { return times_.size(); }
  double time(std::size_t m) const { return times_[m]; }
  const std::vector<double>& times() const { return times_; }
  double horizon() const { return times_.back(); }

  const Field<C>& slice(std::size_t m) const { return slices_[m]; }
  Field<C>& slice(std::size_t m) { return slices_[m]; }
  const std::vector<Field<C>>& slices() const { return slices_; }

  /// Piecewise-linear interpolation in time; t must lie in [t_0, horizon].
  Field<C> at_time(double t) const;
  /// Nodes with t <= horizon (at least three must remain).
  Trajectory restricted(double horizon) const;

  bool same_nodes(const Trajectory& other) const { return times_ == other.times_; }
  bool is_zero() const;

  Trajectory& operator+=(const Trajectory& other);
  Trajectory& operator-=(const Trajectory& other);
  Trajectory& operator*=(double s);

  friend Trajectory operator+(Trajectory a, const Trajectory& b) { return a += b; }
  friend Trajectory operator-(Trajectory a, const Trajectory& b) { return a -= b; }
  friend Trajectory operator*(double s, Trajectory a) { return a *= s; }

 private:
  std::vector<double> times_;
  std::vector<Field<C>> slices_;
};

using VectorTrajectory = Trajectory<2>;
using ScalarTrajectory = Trajectory<1>;
using TensorTrajectory = Trajectory<4>;

/// Samples the heat flow exp(t Laplacian) f at the given nodes.
template <int C>
Trajectory<C> heat_trajectory(const Field<C>& f, const std::vector<double>& times);

}  // namespace nsbmo
