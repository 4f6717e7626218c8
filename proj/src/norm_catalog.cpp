#include "nsbmo/norm_catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "nsbmo/errors.hpp"

namespace nsbmo::norms {

namespace {

constexpr std::array<const char*, 5> kFieldNorms{"lebesgue", "hdot1", "besov", "dbmo", "bmo_grad"};
constexpr std::array<const char*, 5> kTrajectoryNorms{"xt", "yt", "carleson", "lpt_lqx", "z"};

bool listed(const auto& names, const std::string& name) {
  return std::any_of(names.begin(), names.end(), [&](const char* n) { return name == n; });
}

double exponent_from_json(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "inf") return kInfinity;
  throw InputError(std::string("norm exponent '") + key + "' must be a number or \"inf\"");
}

std::string fmt(double x) {
  if (std::isinf(x)) return "inf";
  std::ostringstream s;
  s << x;
  return s.str();
}

nlohmann::json base_params(const NormSpec& spec, const Grid& grid) {
  nlohmann::json p{{"grid", grid_json(grid)}};
  if (spec.name == "lebesgue") p["p"] = exponent_json(spec.p);
  if (spec.name == "besov") {
    p["s"] = spec.s;
    p["p"] = exponent_json(spec.p);
    p["q"] = exponent_json(spec.q);
  }
  if (spec.name == "lpt_lqx") {
    p["p"] = exponent_json(spec.p);
    p["q"] = exponent_json(spec.q);
  }
  return p;
}

}  // namespace

nlohmann::json exponent_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

NormSpec norm_spec_from_json(const nlohmann::json& j) {
  NormSpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
  } else if (j.is_object() && j.contains("name") && j.at("name").is_string()) {
    spec.name = j.at("name").get<std::string>();
    spec.s = j.value("s", 0.0);
    spec.p = exponent_from_json(j, "p", 2.0);
    spec.q = exponent_from_json(j, "q", 2.0);
  } else {
    throw InputError("norm selection must be a name or an object with a name");
  }
  if (!is_field_norm(spec.name) && !is_trajectory_norm(spec.name)) throw InputError("unknown norm '" + spec.name + "'");
  if (!(spec.p >= 1.0) || !(spec.q >= 1.0)) throw InputError("norm exponents must be >= 1");
  return spec;
}

nlohmann::json to_json(const NormSpec& spec) {
  return {{"name", spec.name}, {"s", spec.s}, {"p", exponent_json(spec.p)}, {"q", exponent_json(spec.q)}};
}

std::string label(const NormSpec& spec) {
  if (spec.name == "lebesgue") return "lebesgue(p=" + fmt(spec.p) + ")";
  if (spec.name == "besov") return "besov(s=" + fmt(spec.s) + ",p=" + fmt(spec.p) + ",q=" + fmt(spec.q) + ")";
  if (spec.name == "lpt_lqx") return "lpt_lqx(p=" + fmt(spec.p) + ",q=" + fmt(spec.q) + ")";
  return spec.name;
}

bool is_field_norm(const std::string& name) { return listed(kFieldNorms, name); }
bool is_trajectory_norm(const std::string& name) { return listed(kTrajectoryNorms, name); }

template <int C>
NormReport evaluate(const NormSpec& spec, const Field<C>& f, const CarlesonSettings& settings) {
  NormReport r{label(spec), 0.0, base_params(spec, f.grid())};
  if (spec.name == "lebesgue") {
    r.value = lebesgue_norm(f, spec.p);
  } else if (spec.name == "hdot1") {
    r.value = hdot1_norm(f);
  } else if (spec.name == "besov") {
    r.value = besov_norm(f, spec.s, spec.p, spec.q);
  } else if (spec.name == "dbmo") {
    r.value = dbmo_norm(f, settings);
    r.params["carleson"] = carleson_json(settings);
  } else if (spec.name == "bmo_grad") {
    if constexpr (C == 1) {
      r.value = bmo_grad_norm(f, settings);
      r.params["carleson"] = carleson_json(settings);
    } else {
      throw InputError("bmo_grad applies to scalar fields only");
    }
  } else {
    throw InputError("'" + spec.name + "' is not a field norm");
  }
  return r;
}

template <int C>
NormReport evaluate(const NormSpec& spec, const Trajectory<C>& traj, double T, const CarlesonSettings& settings) {
  NormReport r{label(spec), 0.0, base_params(spec, traj.grid())};
  r.params["T"] = T;
  if (spec.name == "xt" || spec.name == "yt") {
    if constexpr (C == 2) {
      if (spec.name == "xt") {
        const auto b = xt_breakdown(traj, T, settings);
        r.value = b.total();
        r.params["sup_term"] = b.sup_term;
        r.params["gradient_term"] = b.gradient_term;
        r.params["carleson_term"] = b.carleson_term;
        r.params["carleson"] = carleson_json(settings);
      } else {
        r.value = yt_norm(traj, T);
      }
    } else {
      throw InputError(spec.name + " applies to vector trajectories only");
    }
  } else if (spec.name == "carleson") {
    r.value = carleson_norm(traj, T, settings);
    r.params["carleson"] = carleson_json(settings);
  } else if (spec.name == "lpt_lqx") {
    r.value = lpt_lqx_norm(traj, spec.p, spec.q, T);
  } else if (spec.name == "z") {
    r.value = z_norm(traj, T, settings);
    r.params["carleson"] = carleson_json(settings);
  } else {
    throw InputError("'" + spec.name + "' is not a trajectory norm");
  }
  return r;
}

template NormReport evaluate(const NormSpec&, const Field<1>&, const CarlesonSettings&);
template NormReport evaluate(const NormSpec&, const Field<2>&, const CarlesonSettings&);
template NormReport evaluate(const NormSpec&, const Field<4>&, const CarlesonSettings&);
template NormReport evaluate(const NormSpec&, const Trajectory<1>&, double, const CarlesonSettings&);
template NormReport evaluate(const NormSpec&, const Trajectory<2>&, double, const CarlesonSettings&);
template NormReport evaluate(const NormSpec&, const Trajectory<4>&, double, const CarlesonSettings&);

}  // namespace nsbmo::norms
