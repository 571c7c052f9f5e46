#pragma once

#include <functional>
#include <vector>

#include "hmp/dynamics.hpp"

namespace hmp {

enum class Criticality { Critical, LessCritical };

/// Smooth inequality-constrained problem
///   min f(x)  s.t.  g_j(x) <= 0,  lower <= x <= upper.
/// Critical constraints are enforced through multipliers (augmented
/// Lagrangian); less-critical ones through a quadratic penalty k_j g_j^2.
struct NlpProblem {
  int variables = 0;
  Vec lower;
  Vec upper;
  std::vector<Criticality> classes;  // one per constraint
  Vec gains;                         // initial k_j (used for LessCritical)

  /// Value; fills the gradient and (possibly approximate) Hessian when given.
  std::function<double(const Vec& x, Vec* grad, Mat* hess)> objective;
  /// Constraint values and Jacobian (rows = constraints).
  std::function<void(const Vec& x, Vec& g, Mat* jac)> constraints;
  /// Optional: sum_j w_j * Hessian(g_j). Gauss-Newton when absent.
  std::function<Mat(const Vec& x, const Vec& w)> constraint_curvature;

  int constraint_count() const noexcept { return static_cast<int>(classes.size()); }
};

struct NlpSettings {
  int max_iterations = 200;   // inner Newton iterations per round
  int max_rounds = 40;        // multiplier rounds per continuation stage
  double step_tolerance = 1e-10;
  double gradient_tolerance = 1e-10;  // projected merit gradient, inner loop
  double feasibility_tolerance = 1e-9;   // critical violation
  double penalty_tolerance = 1e-6;       // less-critical violation target
  double penalty_growth = 10.0;
  double penalty_max = 1e6;
  double rho_initial = 10.0;
  double rho_max = 1e6;
};

struct NlpResult {
  Vec x;
  Vec g;
  Vec multipliers;  // mu, zero for less-critical constraints
  Vec gains;        // final k_j
  double objective = 0.0;
  double critical_violation = 0.0;
  double penalty_violation = 0.0;   // V over less-critical constraints
  double slackness = 0.0;           // max_j |mu_j g_j|
  double stationarity = 0.0;        // inf-norm of the projected Lagrangian gradient
  std::vector<double> violation_history;  // less-critical V after each round
  int iterations = 0;
  int rounds = 0;
  bool converged = false;
};

/// Gradient of the Lagrangian f + sum mu_j g_j + sum_LC k_j max(0, g_j)^2.
Vec lagrangian_gradient(const NlpProblem& p, const Vec& x, const Vec& mu, const Vec& gains);

NlpResult solve_nlp(const NlpProblem& problem, const Vec& x0, const NlpSettings& settings = {});

}  // namespace hmp
