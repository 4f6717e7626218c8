#include "nsbmo/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "nsbmo/fft.hpp"

namespace nsbmo::spectral {

namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t n_of(const Grid& g) { return static_cast<std::size_t>(g.resolution()); }

bool outside_dealias_band(const Grid& g, std::size_t flat) {
  const auto n = n_of(g);
  const int my = g.mode(static_cast<int>(flat / n));
  const int mx = g.mode(static_cast<int>(flat % n));
  const int band = g.resolution() / 3;
  return std::abs(mx) > band || std::abs(my) > band;
}

}  // namespace

template <int C>
Samples<C> to_physical(const Field<C>& f) {
  Samples<C> out(f.grid());
  for (int c = 0; c < C; ++c) fft::to_samples(f.grid(), f.component(c), out.values[static_cast<std::size_t>(c)]);
  return out;
}

template <int C>
Field<C> to_spectral(const Samples<C>& samples) {
  Field<C> out(samples.grid);
  for (int c = 0; c < C; ++c) {
    if (samples.values[static_cast<std::size_t>(c)].size() != samples.grid.size()) {
      throw InputError("to_spectral: sample count does not match the grid");
    }
    fft::to_coeffs(samples.grid, samples.values[static_cast<std::size_t>(c)], out.component(c));
  }
  return out;
}

template <int C>
double l2_norm_spectral(const Field<C>& f) {
  double sum = 0.0;
  for (int c = 0; c < C; ++c) {
    for (const auto& z : f.component(c)) sum += std::norm(z);
  }
  return f.grid().side_length() * std::sqrt(sum);
}

template <int C>
double l2_norm_physical(const Samples<C>& s) {
  double sum = 0.0;
  for (const auto& comp : s.values) {
    for (double v : comp) sum += v * v;
  }
  return std::sqrt(sum * s.grid.cell_area());
}

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  const auto n = n_of(g);
  auto src = f.component(0);
  auto gx = out.component(0);
  auto gy = out.component(1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    gx[i] = kI * g.wavenumber(static_cast<int>(i % n)) * src[i];
    gy[i] = kI * g.wavenumber(static_cast<int>(i / n)) * src[i];
  }
  out.set_mean_zero(true);
  return out;
}

ScalarField divergence(const VectorField& u) {
  const Grid& g = u.grid();
  ScalarField out(g);
  const auto n = n_of(g);
  auto ux = u.component(0);
  auto uy = u.component(1);
  auto d = out.component(0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    d[i] = kI * (g.wavenumber(static_cast<int>(i % n)) * ux[i] + g.wavenumber(static_cast<int>(i / n)) * uy[i]);
  }
  out.set_mean_zero(true);
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid());
  auto src = f.component(0);
  auto dst = out.component(0);
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = -f.grid().k_squared(i) * src[i];
  out.set_mean_zero(true);
  return out;
}

VectorField divergence(const TensorField& v) {
  const Grid& g = v.grid();
  VectorField out(g);
  const auto n = n_of(g);
  for (int row = 0; row < 2; ++row) {
    auto vx = v.component(2 * row);
    auto vy = v.component(2 * row + 1);
    auto d = out.component(row);
    for (std::size_t i = 0; i < g.size(); ++i) {
      d[i] = kI * (g.wavenumber(static_cast<int>(i % n)) * vx[i] + g.wavenumber(static_cast<int>(i / n)) * vy[i]);
    }
  }
  out.set_mean_zero(true);
  return out;
}

TensorField jacobian(const VectorField& u) {
  const Grid& g = u.grid();
  TensorField out(g);
  const auto n = n_of(g);
  for (int c = 0; c < 2; ++c) {
    auto src = u.component(c);
    auto dx = out.component(2 * c);
    auto dy = out.component(2 * c + 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      dx[i] = kI * g.wavenumber(static_cast<int>(i % n)) * src[i];
      dy[i] = kI * g.wavenumber(static_cast<int>(i / n)) * src[i];
    }
  }
  out.set_mean_zero(true);
  return out;
}

VectorField leray_project(const VectorField& u) {
  const Grid& g = u.grid();
  VectorField out(g);
  const auto n = n_of(g);
  auto ux = u.component(0);
  auto uy = u.component(1);
  auto px = out.component(0);
  auto py = out.component(1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double kx = g.wavenumber(static_cast<int>(i % n));
    const double ky = g.wavenumber(static_cast<int>(i / n));
    const double k2 = kx * kx + ky * ky;
    if (k2 == 0.0) {
      px[i] = py[i] = Complex{};
      continue;
    }
    const Complex kdotu = (kx * ux[i] + ky * uy[i]) / k2;
    px[i] = ux[i] - kx * kdotu;
    py[i] = uy[i] - ky * kdotu;
  }
  out.set_divergence_free(true);
  out.set_mean_zero(true);
  return out;
}

template <int C>
Field<C> heat_propagate(const Field<C>& f, double t) {
  if (!(t >= 0.0)) throw InputError("heat_propagate: time must be nonnegative");
  Field<C> out = f;
  if (t == 0.0) return out;
  const Grid& g = f.grid();
  for (int c = 0; c < C; ++c) {
    auto dst = out.component(c);
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] *= std::exp(-g.k_squared(i) * t);
  }
  return out;
}

template <int C>
Field<C> dealias(const Field<C>& f) {
  Field<C> out = f;
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!outside_dealias_band(g, i)) continue;
    for (int c = 0; c < C; ++c) out.component(c)[i] = Complex{};
  }
  return out;
}

template <int C>
Field<C> low_pass(const Field<C>& f, double cutoff) {
  Field<C> out = f;
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.k_norm(i) < cutoff) continue;
    for (int c = 0; c < C; ++c) out.component(c)[i] = Complex{};
  }
  return out;
}

VectorField nonlinear_term(const VectorField& u, const VectorField& v, bool dealiased) {
  require_same_grid(u.grid(), v.grid(), "nonlinear_term");
  const Grid& g = u.grid();
  const bool symmetric = &u == &v;
  const auto us = to_physical(dealiased ? dealias(u) : u);
  const Samples<2> vs = symmetric ? us : to_physical(dealiased ? dealias(v) : v);

  // products p[j][i] = u_j v_i
  std::vector<double> prod(g.size());
  std::vector<Complex> hat[2][2];
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      if (symmetric && j == 1 && i == 0) {
        hat[1][0] = hat[0][1];
        continue;
      }
      const auto& a = us.values[static_cast<std::size_t>(j)];
      const auto& b = vs.values[static_cast<std::size_t>(i)];
      for (std::size_t p = 0; p < g.size(); ++p) prod[p] = a[p] * b[p];
      hat[j][i].resize(g.size());
      fft::to_coeffs(g, prod, hat[j][i]);
    }
  }

  VectorField out(g);
  const auto n = n_of(g);
  for (int i = 0; i < 2; ++i) {
    auto dst = out.component(i);
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (dealiased && outside_dealias_band(g, p)) continue;
      const double kx = g.wavenumber(static_cast<int>(p % n));
      const double ky = g.wavenumber(static_cast<int>(p / n));
      dst[p] = kI * (kx * hat[0][i][p] + ky * hat[1][i][p]);
    }
  }
  out.set_mean_zero(true);
  return out;
}

VectorField projected_nonlinear_term(const VectorField& u, const VectorField& v, bool dealiased) {
  return leray_project(&u == &v ? nonlinear_term(u, u, dealiased) : nonlinear_term(u, v, dealiased));
}

template <int C>
Field<C> translate(const Field<C>& f, double dx, double dy) {
  Field<C> out = f;
  const Grid& g = f.grid();
  const auto n = n_of(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double phase = -(g.wavenumber(static_cast<int>(i % n)) * dx + g.wavenumber(static_cast<int>(i / n)) * dy);
    const Complex rot(std::cos(phase), std::sin(phase));
    for (int c = 0; c < C; ++c) out.component(c)[i] *= rot;
  }
  return out;
}

template <int C>
Field<C> apply_radial_multiplier(const Field<C>& f, const std::function<double(double)>& m) {
  Field<C> out = f;
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = m(g.k_norm(i));
    for (int c = 0; c < C; ++c) out.component(c)[i] *= w;
  }
  return out;
}

template <int C>
Field<C> remove_mean(const Field<C>& f) {
  Field<C> out = f;
  for (int c = 0; c < C; ++c) out.component(c)[0] = Complex{};
  out.set_mean_zero(true);
  return out;
}

double divergence_defect(const VectorField& u) {
  const Grid& g = u.grid();
  const auto n = n_of(g);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double kx = g.wavenumber(static_cast<int>(i % n));
    const double ky = g.wavenumber(static_cast<int>(i / n));
    const double kn = std::hypot(kx, ky);
    const double amp = std::sqrt(std::norm(u.component(0)[i]) + std::norm(u.component(1)[i]));
    worst = std::max(worst, std::abs(kx * u.component(0)[i] + ky * u.component(1)[i]));
    scale = std::max(scale, kn * amp);
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

#define NSBMO_INSTANTIATE(C)                                                                   \
  template Samples<C> to_physical<C>(const Field<C>&);                                         \
  template Field<C> to_spectral<C>(const Samples<C>&);                                         \
  template double l2_norm_spectral<C>(const Field<C>&);                                        \
  template double l2_norm_physical<C>(const Samples<C>&);                                      \
  template Field<C> heat_propagate<C>(const Field<C>&, double);                                \
  template Field<C> dealias<C>(const Field<C>&);                                               \
  template Field<C> low_pass<C>(const Field<C>&, double);                                      \
  template Field<C> translate<C>(const Field<C>&, double, double);                             \
  template Field<C> apply_radial_multiplier<C>(const Field<C>&, const std::function<double(double)>&); \
  template Field<C> remove_mean<C>(const Field<C>&);

NSBMO_INSTANTIATE(1)
NSBMO_INSTANTIATE(2)
NSBMO_INSTANTIATE(4)

#undef NSBMO_INSTANTIATE

}  // namespace nsbmo::spectral
