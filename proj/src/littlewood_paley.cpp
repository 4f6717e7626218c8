#include "nsbmo/littlewood_paley.hpp"

#include <cmath>

#include "nsbmo/spectral.hpp"

namespace nsbmo::spectral {

namespace {

constexpr double kInner = 0.8;
constexpr double kOuter = 1.0;

double mollifier_tail(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

double lp_cutoff(double r) {
  if (r <= kInner) return 1.0;
  if (r >= kOuter) return 0.0;
  const double s = (r - kInner) / (kOuter - kInner);
  const double up = mollifier_tail(1.0 - s);
  return up / (up + mollifier_tail(s));
}

double lp_profile(double r) { return lp_cutoff(0.5 * r) - lp_cutoff(r); }

double lp_weight(int j, double k_norm) {
  if (k_norm <= 0.0) return 0.0;
  const double own = lp_profile(std::ldexp(k_norm, -j));
  if (own == 0.0) return 0.0;
  // At most two neighbours overlap: the support (4/5, 2) spans one octave plus 1/4.
  double total = 0.0;
  for (int i = j - 2; i <= j + 2; ++i) total += lp_profile(std::ldexp(k_norm, -i));
  return own / total;
}

std::pair<int, int> active_blocks(const Grid& grid) {
  const int lo = static_cast<int>(std::floor(std::log2(grid.min_k_norm() / 2.0)));
  const int hi = static_cast<int>(std::ceil(std::log2(grid.max_k_norm() / kInner)));
  return {lo, hi};
}

template <int C>
Field<C> dyadic_block(const Field<C>& f, int j) {
  Field<C> out = apply_radial_multiplier(f, [j](double k) { return lp_weight(j, k); });
  out.set_mean_zero(true);
  return out;
}

template Field<1> dyadic_block<1>(const Field<1>&, int);
template Field<2> dyadic_block<2>(const Field<2>&, int);
template Field<4> dyadic_block<4>(const Field<4>&, int);

}  // namespace nsbmo::spectral
