#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hmp/cost.hpp"
#include "hmp/errors.hpp"
#include "hmp/nlp.hpp"

namespace hmp {

/// Sum of positive parts of the constraint values.
double violation_measure(std::span<const double> g);

/// mu g for critical constraints; k max(0, g)^2 otherwise.
double penalty(double g, Criticality c, double mu, double k);

/// Costates of the state equations plus inequality multipliers.
struct AugmentedState {
  Vec costate;      // lambda
  Vec multipliers;  // mu, one per critical inequality
};

/// H_a = L + lambda^T f + mu^T g + sum(penalties). The penalties vector
/// holds the less-critical terms; critical ones enter through mu^T g.
double augmented_hamiltonian(double running_cost, const Vec& dynamics, const Vec& critical_g,
                             const AugmentedState& lambda, const Vec& penalties);

/// Box on the terminal joint state. Equal bounds pin the value.
struct GoalBox {
  double q_lo = -std::numeric_limits<double>::infinity();
  double q_hi = std::numeric_limits<double>::infinity();
  double qd_lo = -std::numeric_limits<double>::infinity();
  double qd_hi = std::numeric_limits<double>::infinity();

  static GoalBox point(double q, double qd) { return {q, q, qd, qd}; }
  bool bounded() const;
};

struct ConstraintClass {
  Criticality criticality = Criticality::Critical;
  double gain = 100.0;  // initial k_j when less critical
};

/// Joint torque as a function of the joint's own state and acceleration,
/// with the rest of the chain frozen. Must also return the partials.
struct TorqueSample {
  double tau = 0.0;
  double d_q = 0.0;
  double d_qd = 0.0;
  double d_u = 1.0;
};
using TorqueModel = std::function<TorqueSample(double t, double q, double qd, double u)>;

/// Constant-inertia double integrator, tau = inertia * u.
TorqueModel double_integrator(double inertia);

/// One joint, one interval of the schedule.
struct OcpSpec {
  double t_begin = 0.0;
  double t_end = 1.0;
  int nodes = 30;
  double q0 = 0.0;
  double qd0 = 0.0;
  GoalBox goal;
  double u_max = 100.0;
  double initial_control = 0.0;  // starting guess for every interval

  std::function<CostWeights(double t)> weights = [](double) { return CostWeights{}; };

  double q_min = -std::numeric_limits<double>::infinity();
  double q_max = std::numeric_limits<double>::infinity();
  double qd_max = std::numeric_limits<double>::infinity();
  double tau_min = -std::numeric_limits<double>::infinity();
  double tau_max = std::numeric_limits<double>::infinity();
  /// Bounds on signed joint power tau * qd, possibly time varying.
  std::function<double(double t)> power_lo;
  std::function<double(double t)> power_hi;

  ConstraintClass angle_class{Criticality::Critical, 100.0};
  ConstraintClass velocity_class{Criticality::Critical, 100.0};
  ConstraintClass torque_class{Criticality::Critical, 100.0};
  ConstraintClass power_class{Criticality::LessCritical, 100.0};
  ConstraintClass goal_class{Criticality::Critical, 100.0};

  NlpSettings solver;

  void validate() const;
};

/// Kind of each NLP row, for reporting.
enum class RowKind { AngleMax, AngleMin, VelocityMax, VelocityMin, TorqueMax, TorqueMin,
                     PowerMax, PowerMin, GoalQHi, GoalQLo, GoalQdHi, GoalQdLo };

struct SegmentSolution {
  JointMode mode = JointMode::Active;
  std::vector<double> t;   // nodes
  std::vector<double> q;
  std::vector<double> qd;
  std::vector<double> u;   // per interval (nodes - 1), held constant
  std::vector<double> tau; // at nodes, right-interval control (last: left)
  double objective = 0.0;
  double critical_violation = 0.0;
  double penalty_violation = 0.0;
  double defect_residual = 0.0;
  double stationarity = 0.0;
  double slackness = 0.0;
  double min_control_curvature = 0.0;  // min over intervals of d2H/du2
  bool convex = true;
  bool converged = false;
  int iterations = 0;
  std::vector<double> violation_history;
  AugmentedState multipliers;
  std::vector<RowKind> rows;
  Vec g;
  Vec gains;

  /// Control held on [t_i, t_{i+1}); the last node returns the last interval.
  double control_at(double t) const;
  /// Exact double-integrator state at any time inside the segment.
  void state_at(double t, double& q_out, double& qd_out) const;
  bool optimal() const { return converged && convex; }
};

/// Infeasible boundary pair under |u| <= u_max; throws InfeasibleError.
void check_reachability(const OcpSpec& spec);

/// Direct transcription of one joint segment: trapezoidal defects with a
/// piecewise-constant control, states condensed out of the NLP. Critical
/// rows are enforced through multipliers, less-critical rows through a
/// penalty with continuation. Throws InfeasibleError for unreachable goals
/// and NonConvergenceError when the cap is hit without a feasible iterate.
SegmentSolution solve_segment(const OcpSpec& spec, const TorqueModel& dynamics, JointMode mode);

/// The NLP actually handed to the solver, exposed for derivative checks.
struct SegmentNlp {
  NlpProblem problem;
  Vec initial;
  std::vector<RowKind> rows;
  double h = 0.0;
};
SegmentNlp build_segment_nlp(const OcpSpec& spec, const TorqueModel& dynamics);

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, SegmentSolution best)
      : Error(what), best_(std::move(best)) {}
  const SegmentSolution& best() const noexcept { return best_; }

 private:
  SegmentSolution best_;
};

}  // namespace hmp
