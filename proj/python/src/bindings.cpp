// Python bindings. Fields cross the boundary as complex arrays of shape
// (N, N) for scalars, (2, N, N) for vectors and (4, N, N) for tensors, in the
// library's coefficient layout: rows are y modes, columns x modes, FFT order.
// Configs and reports cross as JSON text; the package wrapper converts dicts.

#include <complex>
#include <cstring>
#include <string>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nsbmo/errors.hpp"
#include "nsbmo/field_io.hpp"
#include "nsbmo/harness.hpp"
#include "nsbmo/norm_catalog.hpp"
#include "nsbmo/parallel.hpp"
#include "nsbmo/random_fields.hpp"
#include "nsbmo/report.hpp"
#include "nsbmo/scaling.hpp"
#include "nsbmo/solver.hpp"
#include "nsbmo/spectral.hpp"

namespace py = pybind11;
using namespace nsbmo;
using json = nlohmann::json;
using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

int components_of(const py::buffer_info& b) {
  if (b.ndim == 2) return 1;
  if (b.ndim == 3) return static_cast<int>(b.shape[0]);
  throw InputError("field arrays must have shape (N, N) or (C, N, N)");
}

int resolution_of(const py::buffer_info& b) {
  const auto n = b.shape[b.ndim - 1];
  if (b.shape[b.ndim - 2] != n) throw InputError("field arrays must be square");
  return static_cast<int>(n);
}

template <int C>
Field<C> to_field(const CArray& a, double L) {
  const auto b = a.request();
  if (components_of(b) != C) throw InputError("expected " + std::to_string(C) + " components");
  Field<C> f(Grid(L, resolution_of(b)));
  const auto* src = static_cast<const std::complex<double>*>(b.ptr);
  for (int c = 0; c < C; ++c) {
    auto dst = f.component(c);
    std::memcpy(dst.data(), src + c * dst.size(), dst.size() * sizeof(Complex));
  }
  return f;
}

template <int C>
CArray from_field(const Field<C>& f) {
  const auto n = static_cast<py::ssize_t>(f.grid().resolution());
  CArray a = C == 1 ? CArray({n, n}) : CArray({static_cast<py::ssize_t>(C), n, n});
  auto* dst = static_cast<std::complex<double>*>(a.request().ptr);
  for (int c = 0; c < C; ++c) {
    const auto src = f.component(c);
    std::memcpy(dst + c * src.size(), src.data(), src.size() * sizeof(Complex));
  }
  return a;
}

template <int C>
CArray from_trajectory(const Trajectory<C>& t) {
  const auto n = static_cast<py::ssize_t>(t.grid().resolution());
  CArray a({static_cast<py::ssize_t>(t.size()), static_cast<py::ssize_t>(C), n, n});
  auto* dst = static_cast<std::complex<double>*>(a.request().ptr);
  for (std::size_t m = 0; m < t.size(); ++m) {
    for (int c = 0; c < C; ++c) {
      const auto src = t.slice(m).component(c);
      std::memcpy(dst, src.data(), src.size() * sizeof(Complex));
      dst += src.size();
    }
  }
  return a;
}

// Calls body with the field of matching component count.
template <class F>
auto dispatch(const CArray& a, double L, F&& body) {
  switch (components_of(a.request())) {
    case 1: return body(to_field<1>(a, L));
    case 2: return body(to_field<2>(a, L));
    case 4: return body(to_field<4>(a, L));
    default: throw InputError("fields have 1, 2 or 4 components");
  }
}

template <int C>
RArray samples_array(const Samples<C>& s, bool scalar) {
  const auto n = static_cast<py::ssize_t>(s.grid.resolution());
  RArray a = scalar ? RArray({n, n}) : RArray({static_cast<py::ssize_t>(C), n, n});
  auto* dst = static_cast<double*>(a.request().ptr);
  for (int c = 0; c < C; ++c) {
    const auto& v = s.values[static_cast<std::size_t>(c)];
    std::memcpy(dst + c * v.size(), v.data(), v.size() * sizeof(double));
  }
  return a;
}

template <int C>
Field<C> samples_to_field(const RArray& a, double L) {
  const auto b = a.request();
  Samples<C> s(Grid(L, resolution_of(b)));
  const auto* src = static_cast<const double*>(b.ptr);
  for (int c = 0; c < C; ++c) {
    auto& v = s.values[static_cast<std::size_t>(c)];
    std::memcpy(v.data(), src + c * v.size(), v.size() * sizeof(double));
  }
  return spectral::to_spectral(s);
}

py::dict stage_dict(const solver::StageReport& s) {
  py::dict d;
  d["stage"] = s.stage;
  d["status"] = s.status;
  d["message"] = s.message;
  d["diagnostics"] = s.diagnostics.dump();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "2D periodic Navier-Stokes toolkit (compiled core)";
  m.attr("__version__") = NSBMO_VERSION;

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);

  m.def("set_thread_count", &set_thread_count, py::arg("threads"));
  m.def("thread_count", &thread_count);

  // sampling
  m.def(
      "random_divergence_free",
      [](double L, int N, std::uint64_t seed, double slope, int max_mode, double l2_norm) {
        return from_field(sampling::random_divergence_free(Grid(L, N), seed, {slope, max_mode, l2_norm}));
      },
      py::arg("L"), py::arg("N"), py::arg("seed"), py::arg("slope") = 2.0, py::arg("max_mode") = 0, py::arg("l2_norm") = 1.0);
  m.def(
      "taylor_green", [](double L, int N, double amp) { return from_field(sampling::taylor_green(Grid(L, N), amp)); },
      py::arg("L"), py::arg("N"), py::arg("amplitude") = 1.0);
  m.def(
      "shear_mode",
      [](double L, int N, int mode, double amp) { return from_field(sampling::shear_mode(Grid(L, N), mode, amp)); },
      py::arg("L"), py::arg("N"), py::arg("mode") = 1, py::arg("amplitude") = 1.0);

  // spectral core
  m.def(
      "to_physical",
      [](const CArray& f, double L) {
        const bool scalar = f.ndim() == 2;
        return dispatch(f, L, [scalar](const auto& x) { return samples_array(spectral::to_physical(x), scalar); });
      },
      py::arg("coeffs"), py::arg("L"));
  m.def(
      "to_spectral",
      [](const RArray& s, double L) -> CArray {
        const int c = s.ndim() == 2 ? 1 : static_cast<int>(s.shape(0));
        if (c == 1) return from_field(samples_to_field<1>(s, L));
        if (c == 2) return from_field(samples_to_field<2>(s, L));
        if (c == 4) return from_field(samples_to_field<4>(s, L));
        throw InputError("fields have 1, 2 or 4 components");
      },
      py::arg("samples"), py::arg("L"));
  m.def(
      "leray_project", [](const CArray& u, double L) { return from_field(spectral::leray_project(to_field<2>(u, L))); },
      py::arg("u"), py::arg("L"));
  m.def(
      "nonlinear_term",
      [](const CArray& u, const CArray& v, double L, bool dealiased) {
        return from_field(spectral::nonlinear_term(to_field<2>(u, L), to_field<2>(v, L), dealiased));
      },
      py::arg("u"), py::arg("v"), py::arg("L"), py::arg("dealiased") = true);
  m.def(
      "heat_propagate",
      [](const CArray& f, double L, double t) {
        return dispatch(f, L, [t](const auto& x) { return from_field(spectral::heat_propagate(x, t)); });
      },
      py::arg("coeffs"), py::arg("L"), py::arg("t"));
  m.def(
      "dyadic_rescale",
      [](const CArray& f, double L, const std::string& direction) {
        if (direction != "up" && direction != "down") throw InputError("direction must be 'up' or 'down'");
        const auto dir = direction == "up" ? spectral::RescaleDirection::up : spectral::RescaleDirection::down;
        return dispatch(f, L, [dir](const auto& x) {
          const auto r = spectral::dyadic_rescale(x, dir);
          return py::make_tuple(from_field(r), r.grid().side_length());
        });
      },
      py::arg("coeffs"), py::arg("L"), py::arg("direction") = "up");

  // norms
  m.def(
      "norm",
      [](const CArray& f, double L, const std::string& spec_json, const std::string& carleson_json) {
        const auto spec = norms::norm_spec_from_json(json::parse(spec_json));
        const auto settings = carleson_from_json(json::parse(carleson_json));
        return dispatch(f, L, [&](const auto& x) { return norms::evaluate(spec, x, settings).value; });
      },
      py::arg("coeffs"), py::arg("L"), py::arg("spec_json"), py::arg("carleson_json") = "{}");

  // io
  m.def(
      "write_field",
      [](const std::string& path, const CArray& f, double L) {
        dispatch(f, L, [&](const auto& x) {
          io::write_field(x, path);
          return 0;
        });
      },
      py::arg("path"), py::arg("coeffs"), py::arg("L"));
  m.def(
      "read_field",
      [](const std::string& path) -> py::tuple {
        const int c = io::peek_components(path);
        auto pack = [](const auto& f) { return py::make_tuple(from_field(f), f.grid().side_length()); };
        if (c == 1) return pack(io::read_field<1>(path));
        if (c == 2) return pack(io::read_field<2>(path));
        if (c == 4) return pack(io::read_field<4>(path));
        throw FormatError("unsupported component count");
      },
      py::arg("path"));

  // solvers
  m.def(
      "solve_small_data",
      [](const CArray& w0, double L, const std::string& config_json) {
        const auto cfg = solver::solver_config_from_json(json::parse(config_json));
        solver::SmallDataResult r = [&] {
          py::gil_scoped_release release;
          return solver::solve_small_data(to_field<2>(w0, L), cfg);
        }();
        py::dict d = stage_dict(r.report);
        d["iterations"] = r.picard.iterations;
        d["contraction_ratios"] = r.picard.contraction_ratios;
        d["eta"] = r.eta;
        d["dbmo_initial"] = r.dbmo_initial;
        d["xt"] = r.xt;
        d["ratio"] = r.ratio;
        d["residual"] = r.residual;
        if (r.solution) {
          d["times"] = r.solution->times();
          d["trajectory"] = from_trajectory(*r.solution);
        }
        return d;
      },
      py::arg("w0"), py::arg("L"), py::arg("config_json") = "{}");
  m.def(
      "solve_global",
      [](const CArray& u0, double L, const std::string& config_json) {
        const auto cfg = solver::solver_config_from_json(json::parse(config_json));
        solver::GlobalResult r = [&] {
          py::gil_scoped_release release;
          return solver::solve_global(to_field<2>(u0, L), cfg);
        }();
        py::dict d = stage_dict(r.failure);
        py::list stages;
        for (const auto& s : r.stages) stages.append(stage_dict(s));
        d["stages"] = stages;
        d["tau"] = r.tau;
        d["series_times"] = r.series_times;
        d["series_dbmo"] = r.series_dbmo;
        d["growth_exponent"] = r.growth_exponent;
        d["growth_constant"] = r.growth_constant;
        d["overlap_discrepancy"] = r.overlap_discrepancy;
        if (r.solution) {
          d["times"] = r.solution->times();
          d["trajectory"] = from_trajectory(*r.solution);
        }
        return d;
      },
      py::arg("u0"), py::arg("L"), py::arg("config_json") = "{}");

  // harness
  m.def("suite_names", &harness::suite_names);
  m.def(
      "run_suite",
      [](const std::string& name, const std::string& experiment_json) {
        const auto spec = harness::experiment_from_json(json::parse(experiment_json));
        py::gil_scoped_release release;
        return json(harness::run_suite(name, spec)).dump();
      },
      py::arg("name"), py::arg("experiment_json") = "{}");
}
