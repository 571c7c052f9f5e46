#include "hmp/scenario.hpp"

#include <cmath>
#include <string>

#include "hmp/errors.hpp"

namespace hmp {

const char* to_string(TaskObjective o) noexcept {
  return o == TaskObjective::ThrowRange ? "throw_range" : "terminal_time_torque";
}

void Scenario::validate() const {
  const auto fail = [this](const std::string& why) {
    throw ConfigError("scenario '" + name + "': " + why);
  };
  try {
    model.validate();
    compliance.validate();
    weights.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  const int n = dof();
  if (n < 1) fail("model has no joints");
  if (initial.q.size() != n || initial.qd.size() != n) fail("initial state size differs from the model");
  if (!initial.q.allFinite() || !initial.qd.allFinite()) fail("initial state not finite");
  if (T.joints() != n) fail("response time matrix needs one row per joint");
  if (static_cast<int>(T.initial_mode.size()) != n) fail("one initial mode per joint required");
  for (JointMode m : T.initial_mode)
    if (m == JointMode::Transition) fail("initial mode must be active or passive");
  if (compliance.size() != n) fail("compliance parameters need one entry per joint");
  if (static_cast<int>(goals.size()) != n) fail("one goal box per joint required");
  if (initial_control.size() != n) fail("initial control needs one entry per joint");
  if (objective == TaskObjective::ThrowRange && n != 2) fail("throw objective requires two joints");
  if (!(dt > 0.0) || !(search.dt > 0.0)) fail("integrator step must be positive");
  if (nodes < 3 || search.nodes < 3) fail("at least three collocation nodes per segment");
  if (!(accel_max > 0.0)) fail("accel_max must be positive");
  if (margin < 0.0 || margin >= 1.0) fail("margin must lie in [0, 1)");
  if (sweeps < 1) fail("at least one coordinate sweep");
  if (blend_width < 0.0) fail("blend width must be non-negative");
  if (search.budget < 1) fail("budget must allow at least one evaluation");
  if (search.restarts < 1) fail("at least one restart");
  if (time_weight < 0.0 || torque_weight < 0.0) fail("objective weights must be non-negative");
  for (const auto* c : {&constraints.angle, &constraints.velocity, &constraints.torque,
                        &constraints.power, &constraints.goal}) {
    if (!(c->gain > 0.0)) fail("penalty gains must be positive");
  }
  try {
    (void)hmp::validate(T, blend_width);
  } catch (const Error& e) {
    fail(e.what());
  }
}

}  // namespace hmp
