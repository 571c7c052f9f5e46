#include "hmp/cost.hpp"

#include <algorithm>
#include <cmath>

#include "hmp/errors.hpp"

namespace hmp {

void CostWeights::validate() const {
  if (!(std::isfinite(k_u) && std::isfinite(k_v) && std::isfinite(k_a))) {
    throw ParameterError("cost weights must be finite");
  }
  if (!(k_u > 0.0)) throw ParameterError("k_u must be positive");
  if (k_v < 0.0 || k_a < 0.0) throw ParameterError("k_v and k_a must be non-negative");
}

CostWeights blend(const CostWeights& a, const CostWeights& b, double s) {
  return {a.k_u + s * (b.k_u - a.k_u), a.k_v + s * (b.k_v - a.k_v), a.k_a + s * (b.k_a - a.k_a)};
}

const CostWeights& WeightTable::of(JointMode m) const {
  return m == JointMode::Active ? active : passive;
}

void WeightTable::validate() const {
  active.validate();
  passive.validate();
}

CostWeights weights_for_mode(const ModeInterval& interval, const WeightTable& table, double t) {
  if (interval.mode != JointMode::Transition) return table.of(interval.mode);
  return blend(table.of(interval.from), table.of(interval.to), interval.blend_fraction(t));
}

CostWeights weights_for_mode(JointMode mode, const WeightTable& table) {
  if (mode == JointMode::Transition) return blend(table.active, table.passive, 0.5);
  return table.of(mode);
}

double segment_cost(const CostWeights& w, std::span<const double> t, std::span<const double> qd,
                    std::span<const double> u, std::span<const double> qdd) {
  if (t.empty() || qd.size() != t.size() || u.size() != t.size() || qdd.size() != t.size()) {
    throw InputError("segment samples must be non-empty and equally long");
  }
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double h = t[k + 1] - t[k];
    auto f = [&](std::size_t i) {
      return w.k_u * u[i] * u[i] - w.k_v * qd[i] * qd[i] - w.k_a * qdd[i] * qdd[i];
    };
    s += 0.5 * h * (f(k) + f(k + 1));
  }
  return s;
}

double segment_cost(const CostWeights& w, const Trajectory& traj, int joint, int first, int last) {
  if (first < 0 || last >= traj.size() || first > last) throw InputError("bad trajectory slice");
  const auto n = static_cast<std::size_t>(last - first + 1);
  std::vector<double> t(traj.t.begin() + first, traj.t.begin() + last + 1);
  std::vector<double> qd(n), qdd(n);
  for (std::size_t k = 0; k < n; ++k) {
    qd[k] = traj.qd(first + static_cast<int>(k), joint);
    qdd[k] = traj.qdd(first + static_cast<int>(k), joint);
  }
  return segment_cost(w, t, qd, qdd, qdd);
}

double flight_time(double speed, double angle, double height, double gravity) {
  if (!(gravity > 0.0)) throw DomainError("gravity must be positive");
  if (height < 0.0) throw DomainError("release below the landing plane is unsupported");
  const double vy = speed * std::sin(angle);
  return (vy + std::sqrt(vy * vy + 2.0 * gravity * height)) / gravity;
}

ThrowOutcome throw_objective(const ChainModel& model, const ReleaseState& r) {
  if (model.dof() != 2) throw InputError("throw objective needs a two-link chain");
  const double L1 = model.links[0].length;
  const double L2 = model.links[1].length;
  ThrowOutcome o;
  o.vx = L2 * r.rate_distal * std::cos(r.sweep_distal) + L1 * r.rate_proximal * std::cos(r.sweep_proximal);
  o.vy = L2 * r.rate_distal * std::sin(r.sweep_distal) + L1 * r.rate_proximal * std::sin(r.sweep_proximal);
  o.speed = std::hypot(o.vx, o.vy);
  o.angle = r.sweep_distal + r.sweep_proximal;
  o.height = L2 * std::sin(o.angle) + L1 * std::sin(r.sweep_proximal);
  if (o.height < 0.0) {
    o.feasible = false;
    return o;
  }
  o.flight_time = flight_time(o.speed, o.angle, o.height, model.gravity);
  o.range = o.speed * std::cos(o.angle) * o.flight_time;
  return o;
}

ReleaseState release_from(const Trajectory& traj, const ResponseTimeMatrix& T) {
  if (traj.dof() != 2 || T.joints() != 2) throw InputError("release state needs two joints");
  ReleaseState r;
  const int last = traj.size() - 1;
  double sweep[2];
  for (int j = 0; j < 2; ++j) {
    const auto sw = T.switches(j);
    const double start = sw.empty() ? traj.t.back() : sw.front();
    // The grid contains every switch instant, so the start is a sample and
    // the integral of qd is a position difference.
    auto it = std::lower_bound(traj.t.begin(), traj.t.end(), start - 1e-12);
    const int k0 = std::min(static_cast<int>(it - traj.t.begin()), last);
    const double s = traj.q(last, j) - traj.q(k0, j);
    sweep[j] = s;
  }
  r.sweep_proximal = sweep[0];
  r.sweep_distal = sweep[1];
  r.rate_proximal = traj.qd(last, 0);
  r.rate_distal = traj.qd(last, 1);
  return r;
}

}  // namespace hmp
