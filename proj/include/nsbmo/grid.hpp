#pragma once

#include <cstddef>
#include <vector>

namespace nsbmo {

/// Periodic square torus [0, L)^2 sampled on an N x N lattice.
///
/// Spectral storage uses FFT ordering along each axis: storage index i maps to
/// the integer mode i for i < N/2 and to i - N otherwise. The index N/2 is the
/// unpaired Nyquist mode and is held at zero by every operation.
class Grid {
 public:
  Grid(double side_length, int resolution);

  double side_length() const { return side_length_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return static_cast<std::size_t>(resolution_) * resolution_; }
  double spacing() const { return side_length_ / resolution_; }
  double cell_area() const { return spacing() * spacing(); }
  double area() const { return side_length_ * side_length_; }

  /// Signed integer mode for storage index i.
  int mode(int i) const { return i < resolution_ / 2 ? i : i - resolution_; }
  /// Storage index of the signed mode m (m taken modulo N).
  int index_of(int m) const { return ((m % resolution_) + resolution_) % resolution_; }
  bool is_nyquist(int i) const { return i == resolution_ / 2; }

  /// Physical wavenumber 2*pi*mode/L along one axis.
  double wavenumber(int i) const { return wavenumbers_[static_cast<std::size_t>(i)]; }
  /// |k|^2 at flat storage index (row = y mode, column = x mode).
  double k_squared(std::size_t flat) const;
  double k_norm(std::size_t flat) const;
  /// Largest |k| over non-Nyquist modes.
  double max_k_norm() const;
  /// Smallest nonzero |k|.
  double min_k_norm() const { return 2.0 * 3.14159265358979323846 / side_length_; }

  bool operator==(const Grid& other) const {
    return side_length_ == other.side_length_ && resolution_ == other.resolution_;
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  double side_length_;
  int resolution_;
  std::vector<double> wavenumbers_;
};

/// Throws InputError unless both grids are identical.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace nsbmo
