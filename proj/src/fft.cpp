#include "nsbmo/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace nsbmo::fft {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

const PlanPair& plans_for(int n) {
  std::lock_guard lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Complex> a(static_cast<std::size_t>(n) * n), b(a.size());
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_2d(n, n, pa, pb, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft_2d(n, n, pa, pb, FFTW_BACKWARD, flags);
  return cache.emplace(n, p).first->second;
}

std::vector<Complex>& scratch(std::size_t size, int slot) {
  thread_local std::vector<Complex> buffers[2];
  auto& buf = buffers[slot];
  if (buf.size() != size) buf.assign(size, Complex{});
  return buf;
}

void execute(fftw_plan plan, std::span<const Complex> in, std::span<Complex> out) {
  // FFTW wants a mutable input pointer; copy so the caller's data stays const.
  auto& src = scratch(in.size(), 0);
  std::copy(in.begin(), in.end(), src.begin());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(src.data()), reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward_raw(int resolution, std::span<const Complex> in, std::span<Complex> out) {
  execute(plans_for(resolution).forward, in, out);
}

void backward_raw(int resolution, std::span<const Complex> in, std::span<Complex> out) {
  execute(plans_for(resolution).backward, in, out);
}

void to_samples(const Grid& grid, std::span<const Complex> coeffs, std::span<double> out) {
  auto& tmp = scratch(grid.size(), 1);
  backward_raw(grid.resolution(), coeffs, tmp);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tmp[i].real();
}

void to_coeffs(const Grid& grid, std::span<const double> samples, std::span<Complex> out) {
  auto& src = scratch(grid.size(), 1);
  for (std::size_t i = 0; i < samples.size(); ++i) src[i] = Complex(samples[i], 0.0);
  forward_raw(grid.resolution(), src, out);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& z : out) z *= scale;
  make_hermitian(grid, out);
}

void make_hermitian(const Grid& grid, std::span<Complex> coeffs) {
  const int n = grid.resolution();
  const int half = n / 2;
  auto at = [&](int iy, int ix) -> Complex& { return coeffs[static_cast<std::size_t>(iy) * n + ix]; };
  for (int i = 0; i < n; ++i) {
    at(half, i) = Complex{};
    at(i, half) = Complex{};
  }
  for (int iy = 0; iy < n; ++iy) {
    if (iy == half) continue;
    const int jy = (n - iy) % n;
    for (int ix = 0; ix < n; ++ix) {
      if (ix == half) continue;
      const int jx = (n - ix) % n;
      const std::size_t a = static_cast<std::size_t>(iy) * n + ix;
      const std::size_t b = static_cast<std::size_t>(jy) * n + jx;
      if (a > b) continue;
      if (a == b) {
        coeffs[a] = Complex(coeffs[a].real(), 0.0);
      } else {
        const Complex avg = 0.5 * (coeffs[a] + std::conj(coeffs[b]));
        coeffs[a] = avg;
        coeffs[b] = std::conj(avg);
      }
    }
  }
}

}  // namespace nsbmo::fft
