#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hmp/cost.hpp"
#include "hmp/scenario.hpp"
#include "hmp/schedule.hpp"
#include "hmp/trajectory.hpp"

namespace hmp {

/// Resolution of one evaluate_motion call.
struct Resolution {
  double dt = 1e-3;
  int nodes = 30;
};

struct SegmentReport {
  int joint = 0;
  int sweep = 0;
  double begin = 0.0;
  double end = 0.0;
  bool driven = true;         // solved by the segment OCP; false: compliant
  bool ok = true;
  bool converged = true;
  bool convex = true;
  double objective = 0.0;
  double critical_violation = 0.0;
  double penalty_violation = 0.0;
  double defect = 0.0;
  double stationarity = 0.0;
  double slackness = 0.0;
  int iterations = 0;
  std::string message;
};

struct Evaluation {
  double score = 0.0;        // H_a = J - penalty, or -(1e6 + V) when infeasible
  double objective = 0.0;    // J
  double penalty = 0.0;      // less-critical penalty integral
  double violation = 0.0;    // V over critical families on the grid
  bool feasible = false;
  int failed_segments = 0;
  ResponseTimeMatrix T;
  ModeSchedule schedule;
  Trajectory trajectory;
  std::vector<double> power;  // sum |tau qd| per sample
  double peak_power = 0.0;
  double torque_integral = 0.0;  // int sum tau^2 dt
  std::optional<ThrowOutcome> release;
  std::vector<SegmentReport> segments;
};

constexpr double kInfeasibleScore = -1e6;

/// Block-coordinate evaluation of a response time matrix: joints N..1, each
/// along its own timeline, driven intervals through solve_segment and
/// passive intervals through the compliance law. Never throws for
/// infeasible motion; the score carries the violation instead.
Evaluation evaluate_motion(const ResponseTimeMatrix& T, const Scenario& sc, const Resolution& res);
Evaluation evaluate_motion(const ResponseTimeMatrix& T, const Scenario& sc);

/// Score of an assembled trajectory under the scenario objective and
/// constraints; fills every Evaluation field derived from the samples.
void score_trajectory(const Scenario& sc, Evaluation& ev);

/// Free entries of T: every nonzero entry except those equal to the
/// horizon, which stays fixed. Encoded row-wise as log increments.
struct TimingCode {
  ResponseTimeMatrix base;
  std::vector<std::vector<int>> free_columns;
  int size() const;
  Eigen::VectorXd encode(const ResponseTimeMatrix& T) const;
  /// Decoded matrix and how far entries exceed the last admissible instant.
  ResponseTimeMatrix decode(const Eigen::VectorXd& z, double latest, double& excess) const;
  static TimingCode of(const ResponseTimeMatrix& T);
};

struct SearchTrace {
  int evaluations = 0;
  std::vector<double> best_so_far;
  std::vector<double> restart_best;
};

struct PlanResult {
  ResponseTimeMatrix T;
  Evaluation plan;  // regenerated at full resolution
  double objective = 0.0;
  double score = 0.0;
  SearchTrace trace;
  double wall_seconds = 0.0;
};

/// Simplex search over the timing code with seeded restarts. Throws
/// PlanningError when no candidate regenerates to a feasible plan.
PlanResult optimize_T(const Scenario& sc, const ResponseTimeMatrix& T_init, int budget);
PlanResult optimize_T(const Scenario& sc);

/// Every switching row collapsed to [eps, t_f]: active for the whole horizon.
ResponseTimeMatrix synchronous_matrix(const Scenario& sc);

struct OracleResult {
  bool converged = false;
  std::string message;
  Evaluation plan;
  int iterations = 0;
};

/// Whole-horizon collocation over all joints at once, no schedule.
OracleResult dense_oracle(const Scenario& sc, int nodes = 0);

struct Baselines {
  Evaluation synchronous;
  OracleResult oracle;
};
Baselines make_baselines(const Scenario& sc);

/// J_planner / J_oracle for reward objectives, J_oracle / J_planner for cost
/// objectives, so that 1 means parity and smaller means worse. Empty when
/// the oracle failed.
std::optional<double> oracle_ratio(const Scenario& sc, const Evaluation& planner,
                                   const OracleResult& oracle);

/// Worker threads for restarts, from HMP_WORKERS (default 1).
int worker_count();

}  // namespace hmp
