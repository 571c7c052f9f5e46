#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hmp/cost.hpp"
#include "hmp/dynamics.hpp"
#include "hmp/ocp.hpp"
#include "hmp/schedule.hpp"

namespace hmp {

enum class TaskObjective { ThrowRange, TerminalTimeTorque };

const char* to_string(TaskObjective o) noexcept;

/// Criticality of each constraint family. Power covers both the per-joint
/// signed power bounds and the system cap sum |tau qd| <= P_sys.
struct ConstraintPolicy {
  ConstraintClass angle{Criticality::Critical, 100.0};
  ConstraintClass velocity{Criticality::Critical, 100.0};
  ConstraintClass torque{Criticality::Critical, 100.0};
  ConstraintClass power{Criticality::LessCritical, 100.0};
  ConstraintClass goal{Criticality::Critical, 100.0};
};

struct SearchSettings {
  int budget = 500;        // evaluate_motion calls over all restarts
  int restarts = 5;
  double jitter = 0.2;     // std-dev of the restart perturbation in z
  double step = 0.3;       // initial simplex edge in z
  std::uint64_t seed = 0;
  double dt = 4e-3;        // integrator step used while searching
  int nodes = 16;          // collocation nodes per driven segment while searching
};

struct Scenario {
  std::string name;
  ChainModel model;
  JointState initial;
  ResponseTimeMatrix T;  // column template and initial guess
  WeightTable weights;
  ConstraintPolicy constraints;
  TaskObjective objective = TaskObjective::TerminalTimeTorque;
  double time_weight = 100.0;    // w_t
  double torque_weight = 1e-3;   // w_tau
  ComplianceParams compliance;
  std::vector<GoalBox> goals;    // terminal box per joint
  double dt = 1e-3;              // emitted plans
  double blend_width = kDefaultBlendWidth;
  int nodes = 30;
  double accel_max = 200.0;      // bound on the segment control, rad/s^2
  Vec initial_control;           // starting guess per joint
  double margin = 0.05;          // back-off on coupled torque and power rows
  int sweeps = 2;
  SearchSettings search;

  int dof() const noexcept { return model.dof(); }
  /// The paper's epsilon entry: an activation right after t = 0.
  double epsilon() const { return std::min(1e-3, dt); }
  /// Throws ConfigError naming the first broken invariant.
  void validate() const;
};

}  // namespace hmp
