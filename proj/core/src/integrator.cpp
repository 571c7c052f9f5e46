#include "hmp/integrator.hpp"

#include <cmath>
#include <sstream>

#include "hmp/errors.hpp"

namespace hmp {

Trajectory integrate(const ChainModel& model, const ControlLaw& law, const JointState& initial,
                     const IntegrationSettings& settings, const ModeLookup& modes) {
  const int n = model.dof();
  if (initial.q.size() != n || initial.qd.size() != n) throw InputError("initial state size");
  Trajectory traj(build_time_grid(settings.t0, settings.tf, settings.dt, settings.events), n);

  auto modes_at = [&](double t) {
    return modes ? modes(t) : std::vector<JointMode>(n, JointMode::Active);
  };
  auto command = [&](double t, const Vec& q, const Vec& qd, std::span<const JointMode> m) {
    Vec tau = law(t, q, qd, m);
    if (tau.size() != n || !tau.allFinite()) {
      std::ostringstream os;
      os << "control law returned a non-finite torque at t = " << t;
      throw IntegrationError(os.str(), t);
    }
    return tau;
  };

  Vec x(2 * n);
  x << initial.q, initial.qd;
  const int K = traj.size();
  for (int k = 0; k < K; ++k) {
    const double t = traj.t[k];
    // The last sample keeps the mode of the final step.
    const auto m = modes_at(k + 1 < K ? t : traj.t[k - 1 >= 0 ? k - 1 : 0]);
    const Vec q = x.head(n);
    const Vec qd = x.tail(n);
    const Vec tau = command(t, q, qd, m);
    traj.q.row(k) = q.transpose();
    traj.qd.row(k) = qd.transpose();
    traj.tau.row(k) = tau.transpose();
    traj.qdd.row(k) = forward_dynamics(model, q, qd, tau).transpose();
    traj.modes[k] = m;
    if (k + 1 == K) break;

    const double h = traj.t[k + 1] - t;
    auto rhs = [&](double s, const Vec& y) {
      const Vec yq = y.head(n);
      const Vec yqd = y.tail(n);
      Vec dy(2 * n);
      dy << yqd, forward_dynamics(model, yq, yqd, command(s, yq, yqd, m));
      return dy;
    };
    x = rk4_step(rhs, t, x, h);
  }
  return traj;
}

}  // namespace hmp
