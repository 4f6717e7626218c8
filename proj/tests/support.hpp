#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsbmo/field.hpp"
#include "nsbmo/trajectory.hpp"

namespace nsbmo::testing {

inline constexpr double kPi = std::numbers::pi;

template <int C>
double max_abs_coeff(const Field<C>& f) {
  double m = 0.0;
  for (int c = 0; c < C; ++c) {
    for (const auto& z : f.component(c)) m = std::max(m, std::abs(z));
  }
  return m;
}

/// max |a - b| over coefficients, relative to max |b| (absolute when b = 0).
template <int C>
double max_rel_diff(const Field<C>& a, const Field<C>& b) {
  double diff = 0.0;
  for (int c = 0; c < C; ++c) {
    auto x = a.component(c);
    auto y = b.component(c);
    for (std::size_t i = 0; i < x.size(); ++i) diff = std::max(diff, std::abs(x[i] - y[i]));
  }
  const double scale = max_abs_coeff(b);
  return scale > 0.0 ? diff / scale : diff;
}

template <int C>
double max_rel_diff(const Trajectory<C>& a, const Trajectory<C>& b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    scale = std::max(scale, max_abs_coeff(b.slice(m)));
    for (int c = 0; c < C; ++c) {
      auto x = a.slice(m).component(c);
      auto y = b.slice(m).component(c);
      for (std::size_t i = 0; i < x.size(); ++i) diff = std::max(diff, std::abs(x[i] - y[i]));
    }
  }
  return scale > 0.0 ? diff / scale : diff;
}

// Direct O(N^4) evaluation of div(u (x) v) on the dealiased band: each product
// coefficient is the discrete convolution of the truncated coefficient arrays.
inline VectorField convolution_oracle(const VectorField& u, const VectorField& v) {
  const Grid& g = u.grid();
  const int band = g.resolution() / 3;
  VectorField out(g);
  for (int ky = -band; ky <= band; ++ky) {
    for (int kx = -band; kx <= band; ++kx) {
      Complex prod[2][2] = {};
      for (int py = -band; py <= band; ++py) {
        for (int px = -band; px <= band; ++px) {
          const int qy = ky - py;
          const int qx = kx - px;
          if (std::abs(qy) > band || std::abs(qx) > band) continue;
          for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) prod[j][i] += u.mode(j, py, px) * v.mode(i, qy, qx);
          }
        }
      }
      const double wx = 2.0 * kPi / g.side_length() * kx;
      const double wy = 2.0 * kPi / g.side_length() * ky;
      for (int i = 0; i < 2; ++i) out.mode(i, ky, kx) = Complex(0.0, 1.0) * (wx * prod[0][i] + wy * prod[1][i]);
    }
  }
  return out;
}

/// max |c(k) - conj(c(-k))| over non-Nyquist modes.
template <int C>
double hermitian_defect(const Field<C>& f) {
  const Grid& g = f.grid();
  const int n = g.resolution();
  double worst = 0.0;
  for (int c = 0; c < C; ++c) {
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        if (g.is_nyquist(iy) || g.is_nyquist(ix)) {
          worst = std::max(worst, std::abs(f.at(c, iy, ix)));
          continue;
        }
        const auto& a = f.at(c, iy, ix);
        const auto& b = f.at(c, (n - iy) % n, (n - ix) % n);
        worst = std::max(worst, std::abs(a - std::conj(b)));
      }
    }
  }
  return worst;
}

}  // namespace nsbmo::testing
