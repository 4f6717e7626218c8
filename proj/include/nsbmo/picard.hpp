#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nsbmo::solver {

/// Fixed-point problem x = y + L x + B(x, x) with ||L|| <= lambda < 1 and
/// ||B(a, b)|| <= gamma ||a|| ||b|| in the primary norm. An optional secondary
/// norm tracks regularity carried along the iteration; mu and kappa are its
/// linear and mixed constants when known.
template <class State>
struct PicardProblem {
  explicit PicardProblem(State y) : source(std::move(y)) {}

  State source;
  std::function<State(const State&)> linear;  // empty means L = 0
  std::function<State(const State&, const State&)> bilinear;
  std::function<double(const State&)> norm;
  std::string norm_name = "primary";
  double lambda = 0.0;
  double gamma = 1.0;

  std::function<double(const State&)> secondary_norm;
  std::string secondary_name;
  std::optional<double> mu;
  std::optional<double> kappa;

  /// Refuse to iterate unless 4 gamma ||y|| < (1 - lambda)^2. When false only
  /// lambda < 1 is required.
  bool assert_solvable = true;
};

enum class PicardStatus { converged, refused, diverged };

inline const char* to_string(PicardStatus s) {
  switch (s) {
    case PicardStatus::converged: return "converged";
    case PicardStatus::refused: return "refused";
    case PicardStatus::diverged: return "diverged";
  }
  return "unknown";
}

template <class State>
struct PicardResult {
  PicardStatus status = PicardStatus::diverged;
  std::optional<State> solution;  // last iterate, also on divergence
  int iterations = 0;
  std::vector<double> increments;          // ||X_{n+1} - X_n||
  std::vector<double> contraction_ratios;  // increments[n] / increments[n-1]
  double source_norm = 0.0;
  double smallness_lhs = 0.0;  // 4 gamma ||y||
  double smallness_rhs = 0.0;  // (1 - lambda)^2
  double solution_norm = 0.0;
  double solution_bound = 0.0;  // 2 ||y|| / (1 - lambda)
  std::optional<double> secondary_source;
  std::optional<double> secondary_solution;
  std::optional<bool> secondary_condition;  // kappa (1 - lambda) < (1 - mu) gamma
  std::string message;

  bool converged() const { return status == PicardStatus::converged; }
  double max_contraction_ratio() const {
    double r = 0.0;
    for (double x : contraction_ratios) r = std::max(r, x);
    return r;
  }
};

/// X_0 = 0, X_{n+1} = y + L X_n + B(X_n, X_n) until ||X_{n+1} - X_n|| < tol.
/// State needs a - b and scalar * state.
template <class State>
PicardResult<State> picard_solve(const PicardProblem<State>& prob, double tol, int max_iter) {
  PicardResult<State> r;
  if (!(tol > 0.0) || max_iter < 1) {
    r.status = PicardStatus::refused;
    r.message = "tolerance must be positive and max_iter at least 1";
    return r;
  }
  r.source_norm = prob.norm(prob.source);
  r.smallness_lhs = 4.0 * prob.gamma * r.source_norm;
  r.smallness_rhs = (1.0 - prob.lambda) * (1.0 - prob.lambda);
  if (prob.secondary_norm) r.secondary_source = prob.secondary_norm(prob.source);
  if (prob.mu && prob.kappa) r.secondary_condition = *prob.kappa * (1.0 - prob.lambda) < (1.0 - *prob.mu) * prob.gamma;

  if (!(prob.lambda < 1.0)) {
    r.status = PicardStatus::refused;
    r.message = "linear part not contracting: lambda = " + std::to_string(prob.lambda) + " >= 1";
    return r;
  }
  if (prob.assert_solvable && !(r.smallness_lhs < r.smallness_rhs)) {
    r.status = PicardStatus::refused;
    r.message = "smallness gate failed: 4 gamma ||y|| = " + std::to_string(r.smallness_lhs) +
                " is not below (1 - lambda)^2 = " + std::to_string(r.smallness_rhs);
    return r;
  }
  r.solution_bound = 2.0 * r.source_norm / (1.0 - prob.lambda);

  State x = 0.0 * prob.source;
  // Below this size an increment is rounding noise and its ratio says nothing.
  const double floor = 1e-13 * std::max(r.source_norm, 1e-300);
  for (int n = 0; n < max_iter; ++n) {
    State next = prob.source;
    if (prob.linear) next = next + prob.linear(x);
    next = next + prob.bilinear(x, x);
    const double inc = prob.norm(next - x);
    x = std::move(next);
    r.iterations = n + 1;
    r.increments.push_back(inc);
    if (n >= 1 && r.increments[static_cast<std::size_t>(n) - 1] > floor) {
      r.contraction_ratios.push_back(inc / r.increments[static_cast<std::size_t>(n) - 1]);
    }
    if (!std::isfinite(inc)) {
      r.message = "iteration produced non-finite values";
      break;
    }
    if (inc < tol) {
      r.status = PicardStatus::converged;
      break;
    }
    if (n >= 2 && inc > 1e3 * std::max(r.increments.front(), floor)) {
      r.message = "increments growing: iteration diverges";
      break;
    }
  }
  if (r.status != PicardStatus::converged && r.message.empty()) {
    r.message = "no convergence within " + std::to_string(max_iter) + " iterations";
  }
  r.solution_norm = prob.norm(x);
  if (prob.secondary_norm) r.secondary_solution = prob.secondary_norm(x);
  r.solution = std::move(x);
  return r;
}

}  // namespace nsbmo::solver
