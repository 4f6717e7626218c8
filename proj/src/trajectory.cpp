#include "nsbmo/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "nsbmo/parallel.hpp"
#include "nsbmo/spectral.hpp"

namespace nsbmo {

std::vector<double> graded_mesh(double horizon, int intervals, double grading) {
  if (!(horizon > 0.0)) throw InputError("graded_mesh: horizon must be positive");
  if (intervals < 2) throw InputError("graded_mesh: need at least two intervals");
  if (!(grading >= 1.0)) throw InputError("graded_mesh: grading exponent must be >= 1");
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int m = 0; m <= intervals; ++m) {
    t[static_cast<std::size_t>(m)] = horizon * std::pow(static_cast<double>(m) / intervals, grading);
  }
  t.back() = horizon;
  return t;
}

std::vector<double> uniform_mesh(double start, double end, int intervals) {
  if (!(end > start)) throw InputError("uniform_mesh: empty interval");
  if (intervals < 1) throw InputError("uniform_mesh: need at least one interval");
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int m = 0; m <= intervals; ++m) {
    t[static_cast<std::size_t>(m)] = start + (end - start) * static_cast<double>(m) / intervals;
  }
  t.back() = end;
  return t;
}

template <int C>
Trajectory<C>::Trajectory(std::vector<double> times, std::vector<Field<C>> slices)
    : times_(std::move(times)), slices_(std::move(slices)) {
  if (times_.size() != slices_.size()) throw InputError("trajectory: times and slices differ in length");
  if (times_.size() < 3) throw InputError("trajectory: need at least three nodes");
  if (!(times_.front() >= 0.0)) throw InputError("trajectory: times must be nonnegative");
  for (std::size_t m = 1; m < times_.size(); ++m) {
    if (!(times_[m] > times_[m - 1])) throw InputError("trajectory: times must be strictly increasing");
    require_same_grid(slices_[m].grid(), slices_.front().grid(), "trajectory");
  }
}

template <int C>
Trajectory<C> Trajectory<C>::zeros(const Grid& grid, std::vector<double> times) {
  std::vector<Field<C>> slices(times.size(), Field<C>(grid));
  for (auto& s : slices) {
    s.set_divergence_free(true);
    s.set_mean_zero(true);
  }
  return Trajectory(std::move(times), std::move(slices));
}

template <int C>
Field<C> Trajectory<C>::at_time(double t) const {
  if (t < times_.front() || t > times_.back()) throw InputError("trajectory: time outside the covered window");
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  if (times_[hi] == t) return slices_[hi];
  const std::size_t lo = hi - 1;
  const double theta = (t - times_[lo]) / (times_[hi] - times_[lo]);
  Field<C> out = slices_[lo];
  out *= (1.0 - theta);
  Field<C> upper = slices_[hi];
  upper *= theta;
  out += upper;
  return out;
}

template <int C>
Trajectory<C> Trajectory<C>::restricted(double horizon) const {
  std::vector<double> t;
  std::vector<Field<C>> s;
  for (std::size_t m = 0; m < times_.size() && times_[m] <= horizon; ++m) {
    t.push_back(times_[m]);
    s.push_back(slices_[m]);
  }
  return Trajectory(std::move(t), std::move(s));
}

template <int C>
bool Trajectory<C>::is_zero() const {
  return std::all_of(slices_.begin(), slices_.end(), [](const Field<C>& f) { return f.is_zero(); });
}

template <int C>
Trajectory<C>& Trajectory<C>::operator+=(const Trajectory& other) {
  if (!same_nodes(other)) throw InputError("trajectory addition: node mismatch");
  for (std::size_t m = 0; m < slices_.size(); ++m) slices_[m] += other.slices_[m];
  return *this;
}

template <int C>
Trajectory<C>& Trajectory<C>::operator-=(const Trajectory& other) {
  if (!same_nodes(other)) throw InputError("trajectory subtraction: node mismatch");
  for (std::size_t m = 0; m < slices_.size(); ++m) slices_[m] -= other.slices_[m];
  return *this;
}

template <int C>
Trajectory<C>& Trajectory<C>::operator*=(double s) {
  for (auto& f : slices_) f *= s;
  return *this;
}

template <int C>
Trajectory<C> heat_trajectory(const Field<C>& f, const std::vector<double>& times) {
  std::vector<Field<C>> slices(times.size(), Field<C>(f.grid()));
  parallel_for(times.size(), [&](std::size_t m) { slices[m] = spectral::heat_propagate(f, times[m]); });
  return Trajectory<C>(times, std::move(slices));
}

template class Trajectory<1>;
template class Trajectory<2>;
template class Trajectory<4>;
template Trajectory<1> heat_trajectory<1>(const Field<1>&, const std::vector<double>&);
template Trajectory<2> heat_trajectory<2>(const Field<2>&, const std::vector<double>&);
template Trajectory<4> heat_trajectory<4>(const Field<4>&, const std::vector<double>&);

}  // namespace nsbmo
