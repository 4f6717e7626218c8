#pragma once

#include <cstdint>
#include <filesystem>

#include "nsbmo/field.hpp"
#include "nsbmo/trajectory.hpp"

namespace nsbmo::io {

// Binary field container, little-endian throughout:
//   bytes 0..3   magic "NSBF"
//   u32          format version (1)
//   f64          side length L
//   u32          resolution N
//   u32          component count C
//   C x N x N    complex coefficients as (re, im) f64 pairs; component-major,
//                then row-major over (y mode index, x mode index) in FFT order.
// A JSON sidecar "<path>.json" repeats the header and carries the flags.

inline constexpr std::uint32_t kFieldFormatVersion = 1;

template <int C>
void write_field(const Field<C>& f, const std::filesystem::path& path);

template <int C>
Field<C> read_field(const std::filesystem::path& path);

/// Component count stored in a container header.
int peek_components(const std::filesystem::path& path);

/// Trajectory checkpoint: one container per node plus "index.json" with times.
template <int C>
void write_trajectory(const Trajectory<C>& traj, const std::filesystem::path& directory);

template <int C>
Trajectory<C> read_trajectory(const std::filesystem::path& directory);

}  // namespace nsbmo::io
