#pragma once

#include <span>

#include "nsbmo/field.hpp"

namespace nsbmo::fft {

// Thin FFTW wrappers. Plans are built once per resolution with FFTW_ESTIMATE
// so the butterfly order, and hence every rounding, is fixed across runs.

/// Samples f(x_j) = sum_k c(k) exp(i k.x_j); the imaginary part is discarded.
void to_samples(const Grid& grid, std::span<const Complex> coeffs, std::span<double> out);

/// c(k) = N^-2 sum_j f(x_j) exp(-i k.x_j), symmetrized to exact Hermitian form
/// with the Nyquist row and column cleared.
void to_coeffs(const Grid& grid, std::span<const double> samples, std::span<Complex> out);

/// Raw unnormalized complex transforms (sign -1 forward, +1 backward).
void forward_raw(int resolution, std::span<const Complex> in, std::span<Complex> out);
void backward_raw(int resolution, std::span<const Complex> in, std::span<Complex> out);

/// Clears the Nyquist row and column and enforces c(-k) = conj(c(k)).
void make_hermitian(const Grid& grid, std::span<Complex> coeffs);

}  // namespace nsbmo::fft
