#include "nsbmo/duhamel.hpp"

#include <cmath>

#include "nsbmo/parallel.hpp"
#include "nsbmo/spectral.hpp"

namespace nsbmo::solver {

namespace {

void check_nodes(const std::vector<double>& times, const std::vector<VectorField>& integrand) {
  if (times.size() != integrand.size() || times.size() < 2) throw InputError("duhamel: node count mismatch");
  if (times.front() != 0.0) throw InputError("duhamel: the first node must be t = 0");
  for (std::size_t m = 1; m < integrand.size(); ++m) require_same_grid(integrand[0].grid(), integrand[m].grid(), "duhamel");
}

VectorTrajectory finish(const std::vector<double>& times, std::vector<VectorField> slices) {
  for (auto& s : slices) {
    s.set_divergence_free(true);
    s.set_mean_zero(true);
  }
  return VectorTrajectory(times, std::move(slices));
}

}  // namespace

std::pair<double, double> product_trapezoid_weights(double a) {
  if (a < 0.1) {
    // Taylor series; the closed forms lose digits to cancellation here.
    double left = 0.0, right = 0.0, term = 1.0;  // term = (-a)^n / (n + 2)!
    term /= 2.0;
    for (int n = 0; n < 14; ++n) {
      right += term;
      left += (n + 1) * term;
      term *= -a / (n + 3);
    }
    return {left, right};
  }
  const double e = std::exp(-a);
  return {(1.0 - (1.0 + a) * e) / (a * a), (a - 1.0 + e) / (a * a)};
}

VectorTrajectory duhamel_integral(const std::vector<double>& times, const std::vector<VectorField>& integrand) {
  check_nodes(times, integrand);
  const Grid& g = integrand.front().grid();
  std::vector<VectorField> out(times.size(), VectorField(g));
  const std::size_t n = static_cast<std::size_t>(g.resolution());
  parallel_for(n, [&](std::size_t row) {
    for (std::size_t col = 0; col < n; ++col) {
      const std::size_t p = row * n + col;
      const double k2 = g.k_squared(p);
      for (std::size_t m = 0; m + 1 < times.size(); ++m) {
        const double h = times[m + 1] - times[m];
        const auto [w_left, w_right] = product_trapezoid_weights(k2 * h);
        const double decay = std::exp(-k2 * h);
        for (int c = 0; c < 2; ++c) {
          out[m + 1].component(c)[p] = decay * out[m].component(c)[p] +
                                       h * (w_left * integrand[m].component(c)[p] + w_right * integrand[m + 1].component(c)[p]);
        }
      }
    }
  });
  return finish(times, std::move(out));
}

VectorTrajectory duhamel_integral_direct(const std::vector<double>& times, const std::vector<VectorField>& integrand) {
  check_nodes(times, integrand);
  const Grid& g = integrand.front().grid();
  std::vector<VectorField> out(times.size(), VectorField(g));
  parallel_for(times.size(), [&](std::size_t m) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double k2 = g.k_squared(p);
      Complex acc[2] = {};
      for (std::size_t l = 0; l < m; ++l) {
        const double h = times[l + 1] - times[l];
        const auto [w_left, w_right] = product_trapezoid_weights(k2 * h);
        const double decay = std::exp(-k2 * (times[m] - times[l + 1]));
        for (int c = 0; c < 2; ++c) {
          acc[c] += decay * h * (w_left * integrand[l].component(c)[p] + w_right * integrand[l + 1].component(c)[p]);
        }
      }
      for (int c = 0; c < 2; ++c) out[m].component(c)[p] = acc[c];
    }
  });
  return finish(times, std::move(out));
}

std::vector<VectorField> projected_products(const VectorTrajectory& u, const VectorTrajectory& v, bool dealiased) {
  if (!u.same_nodes(v)) throw InputError("duhamel_bilinear: trajectories must share their time nodes");
  require_same_grid(u.grid(), v.grid(), "duhamel_bilinear");
  std::vector<VectorField> f(u.size(), VectorField(u.grid()));
  const bool symmetric = &u == &v;
  parallel_for(u.size(), [&](std::size_t m) {
    f[m] = symmetric ? spectral::projected_nonlinear_term(u.slice(m), u.slice(m), dealiased)
                     : spectral::projected_nonlinear_term(u.slice(m), v.slice(m), dealiased);
  });
  return f;
}

VectorTrajectory duhamel_bilinear(const VectorTrajectory& u, const VectorTrajectory& v, bool dealiased) {
  return duhamel_integral(u.times(), projected_products(u, v, dealiased));
}

VectorTrajectory force_duhamel(const ScalarTrajectory& potential) {
  std::vector<VectorField> f(potential.size(), VectorField(potential.grid()));
  parallel_for(potential.size(), [&](std::size_t m) { f[m] = spectral::leray_project(spectral::gradient(potential.slice(m))); });
  return duhamel_integral(potential.times(), f);
}

VectorTrajectory force_duhamel(const TensorTrajectory& potential) {
  std::vector<VectorField> f(potential.size(), VectorField(potential.grid()));
  parallel_for(potential.size(), [&](std::size_t m) { f[m] = spectral::leray_project(spectral::divergence(potential.slice(m))); });
  return duhamel_integral(potential.times(), f);
}

}  // namespace nsbmo::solver
