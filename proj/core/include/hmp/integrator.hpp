#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hmp/trajectory.hpp"

namespace hmp {

/// Torque command for the chain given time, state and the current modes.
using ControlLaw = std::function<Vec(double t, const Vec& q, const Vec& qd,
                                     std::span<const JointMode> modes)>;

/// Mode lookup used to label samples and feed the control law. The result
/// for a step is taken at the step's left end and held for all stages.
using ModeLookup = std::function<std::vector<JointMode>(double t)>;

struct IntegrationSettings {
  double t0 = 0.0;
  double tf = 1.0;
  double dt = 1e-3;
  std::vector<double> events;  // switch instants, aligned exactly
};

/// Classic fixed-step RK4 on the chain dynamics with step boundaries aligned
/// to every event. Aborts with IntegrationError when the law returns a
/// non-finite torque.
Trajectory integrate(const ChainModel& model, const ControlLaw& law,
                     const JointState& initial, const IntegrationSettings& settings,
                     const ModeLookup& modes = {});

/// Single RK4 step for a first-order system x' = f(t, x).
template <class F>
Vec rk4_step(const F& f, double t, const Vec& x, double h) {
  const Vec k1 = f(t, x);
  const Vec k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const Vec k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const Vec k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace hmp
