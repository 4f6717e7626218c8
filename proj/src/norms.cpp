#include "nsbmo/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "nsbmo/fft.hpp"
#include "nsbmo/littlewood_paley.hpp"
#include "nsbmo/parallel.hpp"
#include "nsbmo/spectral.hpp"

namespace nsbmo::norms {

namespace {

// Periodic ball averages by FFT convolution with the indicator of
// {y : |y|_torus <= R}. One mask spectrum per (grid, R).
class BallAverager {
 public:
  BallAverager(const Grid& grid, double radius) : resolution_(grid.resolution()) {
    const int n = grid.resolution();
    const double h = grid.spacing();
    std::vector<Complex> mask(grid.size());
    const double r2 = radius * radius * (1.0 + 1e-12);
    for (int iy = 0; iy < n; ++iy) {
      const double dy = h * std::min(iy, n - iy);
      for (int ix = 0; ix < n; ++ix) {
        const double dx = h * std::min(ix, n - ix);
        if (dx * dx + dy * dy <= r2) {
          mask[static_cast<std::size_t>(iy) * n + ix] = 1.0;
          ++count_;
        }
      }
    }
    mask_hat_.resize(mask.size());
    fft::forward_raw(n, mask, mask_hat_);
  }

  /// max over centers (every stride-th node) of the ball average of values.
  double max_average(std::span<const double> values, int stride) const {
    const int n = resolution_;
    if (count_ == 1) return strided_max(values, stride);
    std::vector<Complex> buf(values.size()), spec(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) buf[i] = values[i];
    fft::forward_raw(n, buf, spec);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= mask_hat_[i];
    fft::backward_raw(n, spec, buf);
    std::vector<double> avg(values.size());
    const double scale = 1.0 / (static_cast<double>(values.size()) * count_);
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = buf[i].real() * scale;
    return strided_max(avg, stride);
  }

  int count() const { return count_; }

 private:
  double strided_max(std::span<const double> values, int stride) const {
    const int n = resolution_;
    double best = 0.0;
    for (int iy = 0; iy < n; iy += stride) {
      for (int ix = 0; ix < n; ix += stride) best = std::max(best, values[static_cast<std::size_t>(iy) * n + ix]);
    }
    return best;
  }

  int resolution_;
  int count_ = 0;
  std::vector<Complex> mask_hat_;
};

std::shared_ptr<const BallAverager> averager_for(const Grid& grid, double radius) {
  using Key = std::tuple<double, int, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const BallAverager>> cache;
  const Key key{grid.side_length(), grid.resolution(), radius};
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto made = std::make_shared<const BallAverager>(grid, radius);
  std::lock_guard lock(mutex);
  if (cache.size() > 4096) cache.clear();
  return cache.emplace(key, made).first->second;
}

std::vector<double> radius_grid(double top, const CarlesonSettings& s) {
  if (s.octaves < 0 || s.substeps < 1 || s.center_stride < 1) throw InputError("invalid Carleson settings");
  std::vector<double> r;
  const int count = s.octaves * s.substeps;
  for (int i = 0; i <= count; ++i) r.push_back(top * std::exp2(-static_cast<double>(i) / s.substeps));
  return r;
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_rule(int points) {
  static const GaussRule g4{{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526},
                            {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538}};
  static const GaussRule g6{{-0.9324695142031521, -0.6612093864662645, -0.2386191860831969, 0.2386191860831969,
                             0.6612093864662645, 0.9324695142031521},
                            {0.1713244923791704, 0.3607615730481386, 0.4679139345726910, 0.4679139345726910,
                             0.3607615730481386, 0.1713244923791704}};
  static const GaussRule g8{{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                             0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363},
                            {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                             0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763}};
  switch (points) {
    case 4: return g4;
    case 6: return g6;
    case 8: return g8;
    default: throw InputError("gauss_points must be 4, 6 or 8");
  }
}

// sup over radii and centers of the ball average of I_R, where I_R(y) is the
// time integral of a nonnegative integrand over [0, R^2].
double parabolic_sup(const Grid& grid, const std::vector<double>& radii,
                     const std::vector<std::vector<double>>& integrals, int stride) {
  std::vector<double> per_radius(radii.size(), 0.0);
  parallel_for(radii.size(), [&](std::size_t i) {
    per_radius[i] = averager_for(grid, radii[i])->max_average(integrals[i], stride);
  });
  return *std::max_element(per_radius.begin(), per_radius.end());
}

// Time integrals of a trajectory integrand (given at nodes) over [0, R_i^2]
// by the trapezoid rule, linearly interpolating at the right endpoint.
std::vector<std::vector<double>> trajectory_integrals(const std::vector<double>& times,
                                                      const std::vector<std::vector<double>>& g,
                                                      const std::vector<double>& radii) {
  const std::size_t npts = g.front().size();
  std::vector<std::vector<double>> cumulative(times.size(), std::vector<double>(npts, 0.0));
  for (std::size_t m = 1; m < times.size(); ++m) {
    const double h = times[m] - times[m - 1];
    for (std::size_t p = 0; p < npts; ++p) {
      cumulative[m][p] = cumulative[m - 1][p] + 0.5 * h * (g[m - 1][p] + g[m][p]);
    }
  }
  std::vector<std::vector<double>> out(radii.size(), std::vector<double>(npts, 0.0));
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double tau = radii[i] * radii[i];
    auto it = std::upper_bound(times.begin(), times.end(), tau);
    std::size_t m = static_cast<std::size_t>(it - times.begin());
    if (m == 0) continue;
    m -= 1;
    if (m + 1 >= times.size() || times[m] == tau) {
      out[i] = cumulative[std::min(m, times.size() - 1)];
      continue;
    }
    const double dt = tau - times[m];
    const double theta = dt / (times[m + 1] - times[m]);
    for (std::size_t p = 0; p < npts; ++p) {
      const double g_tau = g[m][p] + theta * (g[m + 1][p] - g[m][p]);
      out[i][p] = cumulative[m][p] + 0.5 * dt * (g[m][p] + g_tau);
    }
  }
  return out;
}

void check_window(const std::vector<double>& times, double T, const char* what) {
  if (!(T > 0.0)) throw InputError(std::string(what) + ": T must be positive");
  if (T > times.back() * (1.0 + 1e-12)) throw InputError(std::string(what) + ": T exceeds the trajectory horizon");
}

// Heat-extension parabolic supremum for a field-level integrand
// t -> samples of a nonnegative function, on Gauss-Legendre panels whose
// breakpoints are the squared radii.
double heat_extension_sup(const Grid& grid, const std::function<std::vector<double>(double)>& integrand,
                          const CarlesonSettings& settings) {
  const auto radii = radius_grid(0.5 * grid.side_length(), settings);
  const GaussRule& rule = gauss_rule(settings.gauss_points);
  // panel p covers [radii[p+1]^2, radii[p]^2]; the last panel is [0, radii.back()^2].
  const std::size_t panels = radii.size();
  std::vector<std::pair<double, double>> bounds(panels);
  for (std::size_t p = 0; p + 1 < panels; ++p) bounds[p] = {radii[p + 1] * radii[p + 1], radii[p] * radii[p]};
  bounds[panels - 1] = {0.0, radii.back() * radii.back()};

  const std::size_t q = rule.nodes.size();
  std::vector<std::vector<double>> samples(panels * q);
  parallel_for(samples.size(), [&](std::size_t idx) {
    const auto [a, b] = bounds[idx / q];
    const double t = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[idx % q];
    samples[idx] = integrand(t);
  });

  const std::size_t npts = grid.size();
  std::vector<std::vector<double>> panel_sum(panels, std::vector<double>(npts, 0.0));
  parallel_for(panels, [&](std::size_t p) {
    const double half = 0.5 * (bounds[p].second - bounds[p].first);
    for (std::size_t k = 0; k < q; ++k) {
      const auto& s = samples[p * q + k];
      const double w = half * rule.weights[k];
      for (std::size_t i = 0; i < npts; ++i) panel_sum[p][i] += w * s[i];
    }
  });

  // integrals[p] = int_0^{radii[p]^2}, accumulated from the smallest radius up.
  std::vector<std::vector<double>> integrals(panels);
  integrals[panels - 1] = panel_sum[panels - 1];
  for (std::size_t p = panels - 1; p-- > 0;) {
    integrals[p] = integrals[p + 1];
    for (std::size_t i = 0; i < npts; ++i) integrals[p][i] += panel_sum[p][i];
  }
  return parabolic_sup(grid, radii, integrals, settings.center_stride);
}

}  // namespace

template <int C>
std::vector<double> magnitude_samples(const Field<C>& f) {
  const auto s = spectral::to_physical(f);
  std::vector<double> out(f.grid().size(), 0.0);
  for (int c = 0; c < C; ++c) {
    const auto& v = s.values[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i] * v[i];
  }
  for (auto& x : out) x = std::sqrt(x);
  return out;
}

template <int C>
std::vector<double> gradient_magnitude_samples(const Field<C>& f) {
  std::vector<double> out(f.grid().size(), 0.0);
  for (int c = 0; c < C; ++c) {
    ScalarField comp(f.grid());
    std::copy(f.component(c).begin(), f.component(c).end(), comp.component(0).begin());
    const auto grad = spectral::to_physical(spectral::gradient(comp));
    for (const auto& v : grad.values) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i] * v[i];
    }
  }
  for (auto& x : out) x = std::sqrt(x);
  return out;
}

template <int C>
double lebesgue_norm(const Field<C>& f, double p) {
  if (!(p >= 1.0)) throw InputError("lebesgue_norm: p must be in [1, inf]");
  const auto mag = magnitude_samples(f);
  if (std::isinf(p)) return *std::max_element(mag.begin(), mag.end());
  double sum = 0.0;
  if (p == 2.0) {
    for (double v : mag) sum += v * v;
    return std::sqrt(sum * f.grid().cell_area());
  }
  for (double v : mag) sum += std::pow(v, p);
  return std::pow(sum * f.grid().cell_area(), 1.0 / p);
}

template <int C>
double hdot1_norm(const Field<C>& f) {
  double sum = 0.0;
  for (int c = 0; c < C; ++c) {
    auto comp = f.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i) sum += f.grid().k_squared(i) * std::norm(comp[i]);
  }
  return f.grid().side_length() * std::sqrt(sum);
}

template <int C>
double besov_norm(const Field<C>& f, double s, double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0) || !std::isfinite(s)) throw InputError("besov_norm: need p, q in [1, inf] and finite s");
  const auto [lo, hi] = spectral::active_blocks(f.grid());
  std::vector<double> terms(static_cast<std::size_t>(hi - lo + 1), 0.0);
  parallel_for(terms.size(), [&](std::size_t idx) {
    const int j = lo + static_cast<int>(idx);
    terms[idx] = std::exp2(j * s) * lebesgue_norm(spectral::dyadic_block(f, j), p);
  });
  if (std::isinf(q)) return *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double b : terms) sum += std::pow(b, q);
  return std::pow(sum, 1.0 / q);
}

template <int C>
double carleson_norm(const Trajectory<C>& traj, double T, const CarlesonSettings& settings) {
  check_window(traj.times(), T, "carleson_norm");
  if (traj.time(0) != 0.0) throw InputError("carleson_norm: trajectory must start at t = 0");
  const auto radii = radius_grid(std::sqrt(T), settings);
  std::vector<std::vector<double>> g(traj.size());
  parallel_for(traj.size(), [&](std::size_t m) {
    g[m] = magnitude_samples(traj.slice(m));
    for (auto& x : g[m]) x *= x;
  });
  const auto integrals = trajectory_integrals(traj.times(), g, radii);
  return std::sqrt(parabolic_sup(traj.grid(), radii, integrals, settings.center_stride));
}

template <int C>
double dbmo_norm(const Field<C>& f, const CarlesonSettings& settings) {
  const double sup = heat_extension_sup(
      f.grid(),
      [&f](double t) {
        auto m = magnitude_samples(spectral::heat_propagate(f, t));
        for (auto& x : m) x *= x;
        return m;
      },
      settings);
  return std::sqrt(sup);
}

double bmo_grad_norm(const ScalarField& f, const CarlesonSettings& settings) {
  const double sup = heat_extension_sup(
      f.grid(),
      [&f](double t) {
        auto m = gradient_magnitude_samples(spectral::heat_propagate(f, t));
        for (auto& x : m) x *= x;
        return m;
      },
      settings);
  return std::sqrt(sup);
}

XtBreakdown xt_breakdown(const VectorTrajectory& traj, double T, const CarlesonSettings& settings) {
  check_window(traj.times(), T, "xt_norm");
  std::vector<double> sup_terms(traj.size(), 0.0), grad_terms(traj.size(), 0.0);
  parallel_for(traj.size(), [&](std::size_t m) {
    const double t = traj.time(m);
    if (t <= 0.0 || t > T * (1.0 + 1e-12)) return;
    const auto mag = magnitude_samples(traj.slice(m));
    const auto grad = gradient_magnitude_samples(traj.slice(m));
    sup_terms[m] = std::sqrt(t) * *std::max_element(mag.begin(), mag.end());
    grad_terms[m] = t * *std::max_element(grad.begin(), grad.end());
  });
  XtBreakdown out;
  out.sup_term = *std::max_element(sup_terms.begin(), sup_terms.end());
  out.gradient_term = *std::max_element(grad_terms.begin(), grad_terms.end());
  out.carleson_term = carleson_norm(traj, T, settings);
  return out;
}

double xt_norm(const VectorTrajectory& traj, double T, const CarlesonSettings& settings) {
  return xt_breakdown(traj, T, settings).total();
}

double yt_norm(const VectorTrajectory& traj, double T) {
  check_window(traj.times(), T, "yt_norm");
  double energy = 0.0;
  double gradient = 0.0;
  for (std::size_t m = 0; m < traj.size(); ++m) {
    const double t = traj.time(m);
    if (t > T * (1.0 + 1e-12)) break;
    energy = std::max(energy, spectral::l2_norm_spectral(traj.slice(m)));
    if (t > 0.0) gradient = std::max(gradient, std::sqrt(t) * hdot1_norm(traj.slice(m)));
  }
  return energy + gradient;
}

template <int C>
double lpt_lqx_norm(const Trajectory<C>& traj, double p_t, double q_x, double T) {
  if (!(p_t >= 1.0) || !(q_x >= 1.0)) throw InputError("lpt_lqx_norm: exponents must be >= 1");
  check_window(traj.times(), T, "lpt_lqx_norm");
  std::vector<double> values(traj.size(), 0.0);
  parallel_for(traj.size(), [&](std::size_t m) {
    if (traj.time(m) <= T * (1.0 + 1e-12) || (m > 0 && traj.time(m - 1) < T)) {
      values[m] = lebesgue_norm(traj.slice(m), q_x);
    }
  });
  if (std::isinf(p_t)) {
    double best = 0.0;
    for (std::size_t m = 0; m < traj.size() && traj.time(m) <= T * (1.0 + 1e-12); ++m) best = std::max(best, values[m]);
    return best;
  }
  double sum = 0.0;
  for (std::size_t m = 1; m < traj.size(); ++m) {
    const double a = traj.time(m - 1);
    if (a >= T) break;
    const double ga = std::pow(values[m - 1], p_t);
    double b = traj.time(m);
    double gb = std::pow(values[m], p_t);
    if (b > T) {
      const double theta = (T - a) / (b - a);
      gb = ga + theta * (gb - ga);
      b = T;
    }
    sum += 0.5 * (b - a) * (ga + gb);
  }
  return std::pow(sum, 1.0 / p_t);
}

template <int C>
double z_norm(const Trajectory<C>& traj, double T, const CarlesonSettings& settings) {
  check_window(traj.times(), T, "z_norm");
  if (traj.time(0) != 0.0) throw InputError("z_norm: trajectory must start at t = 0");
  std::vector<std::vector<double>> g(traj.size());
  std::vector<double> sup_terms(traj.size(), 0.0), grad_terms(traj.size(), 0.0);
  parallel_for(traj.size(), [&](std::size_t m) {
    g[m] = magnitude_samples(traj.slice(m));
    const double t = traj.time(m);
    if (t <= 0.0 || t > T * (1.0 + 1e-12)) return;
    const auto grad = gradient_magnitude_samples(traj.slice(m));
    sup_terms[m] = t * *std::max_element(g[m].begin(), g[m].end());
    grad_terms[m] = std::pow(t, 1.5) * *std::max_element(grad.begin(), grad.end());
  });
  const auto radii = radius_grid(std::sqrt(T), settings);
  const auto integrals = trajectory_integrals(traj.times(), g, radii);
  const double carleson = parabolic_sup(traj.grid(), radii, integrals, settings.center_stride);
  return carleson + *std::max_element(sup_terms.begin(), sup_terms.end()) +
         *std::max_element(grad_terms.begin(), grad_terms.end());
}

#define NSBMO_INSTANTIATE(C)                                                                  \
  template std::vector<double> magnitude_samples<C>(const Field<C>&);                         \
  template std::vector<double> gradient_magnitude_samples<C>(const Field<C>&);                \
  template double lebesgue_norm<C>(const Field<C>&, double);                                  \
  template double hdot1_norm<C>(const Field<C>&);                                             \
  template double besov_norm<C>(const Field<C>&, double, double, double);                     \
  template double carleson_norm<C>(const Trajectory<C>&, double, const CarlesonSettings&);    \
  template double dbmo_norm<C>(const Field<C>&, const CarlesonSettings&);                     \
  template double lpt_lqx_norm<C>(const Trajectory<C>&, double, double, double);              \
  template double z_norm<C>(const Trajectory<C>&, double, const CarlesonSettings&);

NSBMO_INSTANTIATE(1)
NSBMO_INSTANTIATE(2)
NSBMO_INSTANTIATE(4)

#undef NSBMO_INSTANTIATE

}  // namespace nsbmo::norms
