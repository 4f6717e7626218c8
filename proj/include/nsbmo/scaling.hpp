#pragma once

#include "nsbmo/field.hpp"

namespace nsbmo::spectral {

enum class RescaleDirection { up, down };

/// Critical rescale with factor 2: "up" maps f to 2 f(2 .) on the torus of side
/// L/2, "down" maps f to f(. / 2) / 2 on the torus of side 2L. Integer modes
/// keep their storage slot, so physical wavenumbers double (halve) and the
/// amplitude doubles (halves). The resolution is unchanged.
template <int C>
Field<C> dyadic_rescale(const Field<C>& f, RescaleDirection direction);

/// Same physical field on an N' x N' lattice of the same torus (zero padding or
/// truncation). Throws InputError if truncation would drop a nonzero mode.
template <int C>
Field<C> resample(const Field<C>& f, int resolution);

}  // namespace nsbmo::spectral
