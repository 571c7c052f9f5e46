#pragma once

#include <span>

#include "hmp/dynamics.hpp"
#include "hmp/schedule.hpp"
#include "hmp/trajectory.hpp"

namespace hmp {

/// Running-cost weights: k_u * int u^2 - k_v * int qd^2 - k_a * int qdd^2.
struct CostWeights {
  double k_u = 1.0;
  double k_v = 0.0;
  double k_a = 0.0;

  void validate() const;
  friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

CostWeights blend(const CostWeights& a, const CostWeights& b, double s);

/// Weight triples per mode. Transition weights are interpolated between the
/// neighbouring modes across the blend window.
struct WeightTable {
  CostWeights active{1.0, 4.0, 1.0};
  CostWeights passive{5.0, 0.1, 0.1};

  const CostWeights& of(JointMode m) const;
  void validate() const;
};

/// Weights in force at time t inside the given interval.
CostWeights weights_for_mode(const ModeInterval& interval, const WeightTable& table, double t);
/// Pure-mode lookup; Transition returns the midpoint blend.
CostWeights weights_for_mode(JointMode mode, const WeightTable& table);

/// Trapezoidal k_u int u^2 - k_v int qd^2 - k_a int qdd^2 on a sample grid.
double segment_cost(const CostWeights& w, std::span<const double> t, std::span<const double> qd,
                    std::span<const double> u, std::span<const double> qdd);

/// Same on a trajectory slice [first, last] of one joint, with u = qdd.
double segment_cost(const CostWeights& w, const Trajectory& traj, int joint, int first, int last);

/// Time of flight of a point released at height h with speed v at angle
/// theta above the horizontal. DomainError for h < 0 or g <= 0.
double flight_time(double speed, double angle, double height, double gravity);

/// Joint sweeps and rates at release for the two-link throw.
struct ReleaseState {
  double sweep_proximal = 0.0;  // integral of qd_1 from its first activation
  double sweep_distal = 0.0;
  double rate_proximal = 0.0;
  double rate_distal = 0.0;
};

struct ThrowOutcome {
  double vx = 0.0;
  double vy = 0.0;
  double speed = 0.0;
  double angle = 0.0;  // sum of both sweeps
  double height = 0.0;
  double flight_time = 0.0;
  double range = 0.0;
  bool feasible = true;  // false when the release height is negative
};

/// Release velocity, angle, height, flight time and range of the two-link
/// throw. A negative height gives an infeasible outcome with zero range.
ThrowOutcome throw_objective(const ChainModel& model, const ReleaseState& release);

/// Release state from a trajectory: sweeps are integrated from each joint's
/// first switch to the horizon.
ReleaseState release_from(const Trajectory& traj, const ResponseTimeMatrix& T);

}  // namespace hmp
