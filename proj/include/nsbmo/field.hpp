#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "nsbmo/errors.hpp"
#include "nsbmo/grid.hpp"

namespace nsbmo {

using Complex = std::complex<double>;

/// Spectral field with C real components on a periodic grid.
///
/// Coefficients are normalized so that f(x) = sum_k c(k) exp(i k.x); the
/// physical field is real, which the operations keep by preserving
/// c(-k) = conj(c(k)).
template <int C>
class Field {
 public:
  static constexpr int components = C;

  explicit Field(const Grid& grid) : grid_(grid) {
    for (auto& c : coeffs_) c.assign(grid.size(), Complex{});
  }

  const Grid& grid() const { return grid_; }

  std::span<const Complex> component(int c) const { return coeffs_[static_cast<std::size_t>(c)]; }
  std::span<Complex> component(int c) { return coeffs_[static_cast<std::size_t>(c)]; }

  Complex& at(int c, int iy, int ix) {
    return coeffs_[static_cast<std::size_t>(c)][flat(iy, ix)];
  }
  const Complex& at(int c, int iy, int ix) const {
    return coeffs_[static_cast<std::size_t>(c)][flat(iy, ix)];
  }
  /// Coefficient of the signed mode (my, mx).
  Complex& mode(int c, int my, int mx) { return at(c, grid_.index_of(my), grid_.index_of(mx)); }
  const Complex& mode(int c, int my, int mx) const { return at(c, grid_.index_of(my), grid_.index_of(mx)); }

  bool divergence_free() const { return divergence_free_; }
  bool mean_zero() const { return mean_zero_; }
  void set_divergence_free(bool flag) { divergence_free_ = flag; }
  void set_mean_zero(bool flag) { mean_zero_ = flag; }

  bool is_zero() const {
    for (const auto& comp : coeffs_) {
      for (const auto& z : comp) {
        if (z != Complex{}) return false;
      }
    }
    return true;
  }

  Field& operator+=(const Field& other) {
    require_same_grid(grid_, other.grid_, "field addition");
    for (int c = 0; c < C; ++c) {
      auto& a = coeffs_[static_cast<std::size_t>(c)];
      const auto& b = other.coeffs_[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    }
    divergence_free_ = divergence_free_ && other.divergence_free_;
    mean_zero_ = mean_zero_ && other.mean_zero_;
    return *this;
  }
  Field& operator-=(const Field& other) {
    require_same_grid(grid_, other.grid_, "field subtraction");
    for (int c = 0; c < C; ++c) {
      auto& a = coeffs_[static_cast<std::size_t>(c)];
      const auto& b = other.coeffs_[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    }
    divergence_free_ = divergence_free_ && other.divergence_free_;
    mean_zero_ = mean_zero_ && other.mean_zero_;
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& comp : coeffs_) {
      for (auto& z : comp) z *= s;
    }
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

 private:
  std::size_t flat(int iy, int ix) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(grid_.resolution()) + static_cast<std::size_t>(ix);
  }

  Grid grid_;
  std::array<std::vector<Complex>, static_cast<std::size_t>(C)> coeffs_;
  bool divergence_free_ = false;
  bool mean_zero_ = false;
};

using ScalarField = Field<1>;
using VectorField = Field<2>;
/// 2x2 tensor potential stored row-major: (V00, V01, V10, V11).
using TensorField = Field<4>;

/// Real point samples of a C-component field, row-major (y, x) per component.
template <int C>
struct Samples {
  Grid grid;
  std::array<std::vector<double>, static_cast<std::size_t>(C)> values;

  explicit Samples(const Grid& g) : grid(g) {
    for (auto& v : values) v.assign(g.size(), 0.0);
  }
};

}  // namespace nsbmo
