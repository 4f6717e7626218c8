#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nsbmo/norms.hpp"
#include "nsbmo/trajectory.hpp"

namespace nsbmo::solver {

/// Norm pairs of the bilinear estimates:
///   xx      ||B(u,v)||_{X_T}            / (||u||_{X_T} ||v||_{X_T})
///   x_dbmo  sup_t ||B(u,v)(t)||_{dBMO}  / (||u||_{X_T} ||v||_{X_T})
///   xy      ||B(u,v)||_{Y_T}            / (||u||_{X_T} ||v||_{Y_T})
///   l4l4    ||B(u,v)||_{L4L4}           / (||u||_{L4L4} ||v||_{L4L4})
///   xl4     ||B(u,v)||_{L4L4}           / (||u||_{X_T} ||v||_{L4L4})
enum class NormPair { xx, x_dbmo, xy, l4l4, xl4 };

std::string to_string(NormPair p);
/// Throws InputError for an unknown name.
NormPair norm_pair_from_string(const std::string& name);
std::vector<NormPair> all_norm_pairs();

/// Seeded random trajectory used to probe the bilinear constants: the heat flow
/// of a random divergence-free field drawn on min(N, 32) and zero padded to N,
/// so the same seed gives the same physical field at every resolution.
VectorTrajectory probe_trajectory(const Grid& grid, const std::vector<double>& times, std::uint64_t seed);

/// Ratios for `count` seeded pairs (seeds base_seed + 2i, base_seed + 2i + 1).
/// Pairs with a vanishing denominator are redrawn with a shifted seed.
std::vector<double> bilinear_ratios(const Grid& grid, const std::vector<double>& times, NormPair pair, int count,
                                    std::uint64_t base_seed, const norms::CarlesonSettings& settings = {});

struct CalibrationEntry {
  double side_length = 0.0;
  int resolution = 0;
  double horizon = 0.0;
  NormPair pair = NormPair::xx;
  double eta = 0.0;  // max ratio
  double median = 0.0;
  int samples = 0;
};

/// Measured bilinear constants keyed by (grid, T, norm pair).
class Calibration {
 public:
  static Calibration load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::optional<CalibrationEntry> find(const Grid& grid, double horizon, NormPair pair) const;
  void upsert(const CalibrationEntry& entry);
  const std::vector<CalibrationEntry>& entries() const { return entries_; }

 private:
  std::vector<CalibrationEntry> entries_;
};

/// NS_CALIBRATION when set, otherwise the fallback (which may be empty).
std::filesystem::path calibration_path(const std::filesystem::path& fallback);

}  // namespace nsbmo::solver
