#include "nsbmo/scaling.hpp"

#include <cstdlib>
#include <string>

namespace nsbmo::spectral {

template <int C>
Field<C> dyadic_rescale(const Field<C>& f, RescaleDirection direction) {
  const double factor = direction == RescaleDirection::up ? 2.0 : 0.5;
  const Grid& g = f.grid();
  Field<C> out(Grid(g.side_length() / factor, g.resolution()));
  for (int c = 0; c < C; ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = factor * src[i];
  }
  out.set_divergence_free(f.divergence_free());
  out.set_mean_zero(f.mean_zero());
  return out;
}

template <int C>
Field<C> resample(const Field<C>& f, int resolution) {
  const Grid& g = f.grid();
  Grid target(g.side_length(), resolution);
  Field<C> out(target);
  const int n = g.resolution();
  const int limit = resolution / 2;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int my = g.mode(iy);
      const int mx = g.mode(ix);
      const bool fits = std::abs(my) < limit && std::abs(mx) < limit;
      for (int c = 0; c < C; ++c) {
        const Complex z = f.at(c, iy, ix);
        if (z == Complex{}) continue;
        if (!fits) {
          throw InputError("resample: mode (" + std::to_string(my) + ", " + std::to_string(mx) +
                           ") does not fit on resolution " + std::to_string(resolution));
        }
        out.mode(c, my, mx) = z;
      }
    }
  }
  out.set_divergence_free(f.divergence_free());
  out.set_mean_zero(f.mean_zero());
  return out;
}

template Field<1> dyadic_rescale<1>(const Field<1>&, RescaleDirection);
template Field<2> dyadic_rescale<2>(const Field<2>&, RescaleDirection);
template Field<4> dyadic_rescale<4>(const Field<4>&, RescaleDirection);
template Field<1> resample<1>(const Field<1>&, int);
template Field<2> resample<2>(const Field<2>&, int);
template Field<4> resample<4>(const Field<4>&, int);

}  // namespace nsbmo::spectral
