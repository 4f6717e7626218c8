#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsbmo/norms.hpp"
#include "nsbmo/report.hpp"
#include "nsbmo/trajectory.hpp"

namespace nsbmo::norms {

/// A norm selection by name plus its exponents. Field norms: lebesgue (p),
/// hdot1, besov (s, p, q), dbmo, bmo_grad (scalars only). Trajectory norms:
/// xt, yt (vectors only), carleson, lpt_lqx (p, q), z (T is the horizon).
/// Exponents may be written as the string "inf".
struct NormSpec {
  std::string name;
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
};

/// Throws InputError for an unknown name or a malformed exponent.
NormSpec norm_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NormSpec& spec);
/// Stable text label, e.g. "besov(s=-1,p=inf,q=inf)".
std::string label(const NormSpec& spec);

bool is_field_norm(const std::string& name);
bool is_trajectory_norm(const std::string& name);

/// Exponent as JSON: a number, or "inf".
nlohmann::json exponent_json(double x);

template <int C>
NormReport evaluate(const NormSpec& spec, const Field<C>& f, const CarlesonSettings& settings = {});

template <int C>
NormReport evaluate(const NormSpec& spec, const Trajectory<C>& traj, double T, const CarlesonSettings& settings = {});

}  // namespace nsbmo::norms
