#include "nsbmo/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nsbmo/errors.hpp"

namespace nsbmo {

Grid::Grid(double side_length, int resolution) : side_length_(side_length), resolution_(resolution) {
  if (!(side_length > 0.0) || !std::isfinite(side_length)) {
    throw InputError("grid side length must be positive and finite");
  }
  if (resolution < 8 || resolution % 2 != 0) {
    throw InputError("grid resolution must be even and at least 8, got " + std::to_string(resolution));
  }
  wavenumbers_.resize(static_cast<std::size_t>(resolution));
  const double base = 2.0 * std::numbers::pi / side_length;
  for (int i = 0; i < resolution; ++i) wavenumbers_[static_cast<std::size_t>(i)] = base * mode(i);
}

double Grid::k_squared(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(resolution_);
  const double ky = wavenumbers_[flat / n];
  const double kx = wavenumbers_[flat % n];
  return kx * kx + ky * ky;
}

double Grid::k_norm(std::size_t flat) const { return std::sqrt(k_squared(flat)); }

double Grid::max_k_norm() const {
  const double kmax = 2.0 * std::numbers::pi / side_length_ * (resolution_ / 2 - 1);
  return std::sqrt(2.0) * kmax;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw InputError(std::string(what) + ": fields live on different grids");
}

}  // namespace nsbmo
