#include "hmp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "hmp/errors.hpp"

namespace hmp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Row of the transcribed constraint set, stored with its partials with
// respect to the node state and the interval control it touches.
struct Row {
  RowKind kind;
  int node;
  int interval;  // -1 when the row does not depend on a control directly
  double value;
  double d_q;
  double d_qd;
  double d_u;
  double scale = 1.0;  // row normalization
};

struct Transcription {
  const OcpSpec& spec;
  const TorqueModel& torque;
  int nodes;
  int controls;
  double h;
  Mat Sp;  // q = bq + Sp u
  Mat Sv;  // qd = bv + Sv u
  Vec bq;
  Vec bv;
  std::vector<double> t;

  Transcription(const OcpSpec& s, const TorqueModel& tm)
      : spec(s), torque(tm), nodes(s.nodes), controls(s.nodes - 1) {
    h = (s.t_end - s.t_begin) / static_cast<double>(controls);
    Sp = Mat::Zero(nodes, controls);
    Sv = Mat::Zero(nodes, controls);
    bq.resize(nodes);
    bv.resize(nodes);
    t.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
      t[i] = s.t_begin + h * i;
      bq[i] = s.q0 + h * i * s.qd0;
      bv[i] = s.qd0;
      for (int j = 0; j < i; ++j) {
        Sv(i, j) = h;
        Sp(i, j) = h * h * (i - j - 0.5);
      }
    }
    t.back() = s.t_end;
  }

  double interval_mid(int j) const { return t[j] + 0.5 * h; }

  double trapezoid_weight(int i) const { return (i == 0 || i == nodes - 1) ? 0.5 * h : h; }

  double objective(const Vec& u, Vec* grad, Mat* hess) const {
    const Vec qd = bv + Sv * u;
    double f = 0.0;
    Vec dqd = Vec::Zero(nodes);  // df/dqd_i
    Vec du = Vec::Zero(controls);
    Vec cu = Vec::Zero(controls);
    Vec cv = Vec::Zero(nodes);
    for (int j = 0; j < controls; ++j) {
      const CostWeights w = spec.weights(interval_mid(j));
      cu[j] = h * (w.k_u - w.k_a);
      f += cu[j] * u[j] * u[j];
      du[j] = 2.0 * cu[j] * u[j];
    }
    for (int i = 0; i < nodes; ++i) {
      const CostWeights w = spec.weights(t[i]);
      cv[i] = trapezoid_weight(i) * w.k_v;
      f -= cv[i] * qd[i] * qd[i];
      dqd[i] = -2.0 * cv[i] * qd[i];
    }
    if (grad) *grad = du + Sv.transpose() * dqd;
    if (hess) {
      *hess = Mat(2.0 * cu.asDiagonal());
      *hess -= 2.0 * Sv.transpose() * cv.asDiagonal() * Sv;
    }
    return f;
  }

  std::vector<Row> rows(const Vec& u) const {
    const Vec q = bq + Sp * u;
    const Vec qd = bv + Sv * u;
    std::vector<Row> out;
    const double ascale = 1.0;
    const double vscale = std::isfinite(spec.qd_max) ? std::max(1.0, spec.qd_max) : 1.0;
    const double tscale =
        std::max({1.0, std::isfinite(spec.tau_max) ? std::abs(spec.tau_max) : 1.0,
                  std::isfinite(spec.tau_min) ? std::abs(spec.tau_min) : 1.0});
    for (int i = 1; i < nodes; ++i) {
      if (std::isfinite(spec.q_max))
        out.push_back({RowKind::AngleMax, i, -1, (q[i] - spec.q_max) / ascale, 1.0 / ascale, 0, 0});
      if (std::isfinite(spec.q_min))
        out.push_back({RowKind::AngleMin, i, -1, (spec.q_min - q[i]) / ascale, -1.0 / ascale, 0, 0});
      if (std::isfinite(spec.qd_max)) {
        out.push_back({RowKind::VelocityMax, i, -1, (qd[i] - spec.qd_max) / vscale, 0, 1.0 / vscale, 0});
        out.push_back({RowKind::VelocityMin, i, -1, (-spec.qd_max - qd[i]) / vscale, 0, -1.0 / vscale, 0});
      }
    }
    const bool torque_rows = std::isfinite(spec.tau_max) || std::isfinite(spec.tau_min);
    const bool power_rows = static_cast<bool>(spec.power_hi) || static_cast<bool>(spec.power_lo);
    if (torque_rows || power_rows) {
      for (int j = 0; j < controls; ++j) {
        for (int e : {j, j + 1}) {
          const TorqueSample ts = torque(t[e], q[e], qd[e], u[j]);
          if (std::isfinite(spec.tau_max))
            out.push_back({RowKind::TorqueMax, e, j, (ts.tau - spec.tau_max) / tscale,
                           ts.d_q / tscale, ts.d_qd / tscale, ts.d_u / tscale});
          if (std::isfinite(spec.tau_min))
            out.push_back({RowKind::TorqueMin, e, j, (spec.tau_min - ts.tau) / tscale,
                           -ts.d_q / tscale, -ts.d_qd / tscale, -ts.d_u / tscale});
          const double p = ts.tau * qd[e];
          const double pq = ts.d_q * qd[e];
          const double pqd = ts.d_qd * qd[e] + ts.tau;
          const double pu = ts.d_u * qd[e];
          if (spec.power_hi) {
            const double hi = spec.power_hi(t[e]);
            const double sc = std::max(1.0, std::abs(hi));
            out.push_back({RowKind::PowerMax, e, j, (p - hi) / sc, pq / sc, pqd / sc, pu / sc, 1.0 / sc});
          }
          if (spec.power_lo) {
            const double lo = spec.power_lo(t[e]);
            const double sc = std::max(1.0, std::abs(lo));
            out.push_back({RowKind::PowerMin, e, j, (lo - p) / sc, -pq / sc, -pqd / sc, -pu / sc, 1.0 / sc});
          }
        }
      }
    }
    const int last = nodes - 1;
    const auto& g = spec.goal;
    if (std::isfinite(g.q_hi)) out.push_back({RowKind::GoalQHi, last, -1, q[last] - g.q_hi, 1, 0, 0});
    if (std::isfinite(g.q_lo)) out.push_back({RowKind::GoalQLo, last, -1, g.q_lo - q[last], -1, 0, 0});
    if (std::isfinite(g.qd_hi))
      out.push_back({RowKind::GoalQdHi, last, -1, (qd[last] - g.qd_hi) / vscale, 0, 1.0 / vscale, 0});
    if (std::isfinite(g.qd_lo))
      out.push_back({RowKind::GoalQdLo, last, -1, (g.qd_lo - qd[last]) / vscale, 0, -1.0 / vscale, 0});
    return out;
  }

  ConstraintClass class_of(RowKind k) const {
    switch (k) {
      case RowKind::AngleMax:
      case RowKind::AngleMin:
        return spec.angle_class;
      case RowKind::VelocityMax:
      case RowKind::VelocityMin:
        return spec.velocity_class;
      case RowKind::TorqueMax:
      case RowKind::TorqueMin:
        return spec.torque_class;
      case RowKind::PowerMax:
      case RowKind::PowerMin:
        return spec.power_class;
      default:
        return spec.goal_class;
    }
  }

  Eigen::RowVectorXd jacobian_row(const Row& r) const {
    Eigen::RowVectorXd row = r.d_q * Sp.row(r.node) + r.d_qd * Sv.row(r.node);
    if (r.interval >= 0) row[r.interval] += r.d_u;
    return row;
  }
};

// Extreme positions reachable at final velocity vf, bang-bang with one switch.
bool reachable_position_range(double q0, double v0, double vf, double a, double W, double& lo,
                              double& hi) {
  if (std::abs(vf - v0) > a * W + 1e-12) return false;
  // Max: accelerate for s then decelerate. v0 + a s - a (W - s) = vf.
  const double s_up = std::clamp((vf - v0 + a * W) / (2.0 * a), 0.0, W);
  const double v_mid = v0 + a * s_up;
  hi = q0 + v0 * s_up + 0.5 * a * s_up * s_up + v_mid * (W - s_up) - 0.5 * a * (W - s_up) * (W - s_up);
  const double s_dn = std::clamp((v0 - vf + a * W) / (2.0 * a), 0.0, W);
  const double v_low = v0 - a * s_dn;
  lo = q0 + v0 * s_dn - 0.5 * a * s_dn * s_dn + v_low * (W - s_dn) + 0.5 * a * (W - s_dn) * (W - s_dn);
  return true;
}

}  // namespace

double violation_measure(std::span<const double> g) {
  double v = 0.0;
  for (double x : g) v += std::max(0.0, x);
  return v;
}

double penalty(double g, Criticality c, double mu, double k) {
  if (c == Criticality::Critical) return mu * g;
  return g > 0.0 ? k * g * g : 0.0;
}

double augmented_hamiltonian(double running_cost, const Vec& dynamics, const Vec& critical_g,
                             const AugmentedState& lambda, const Vec& penalties) {
  if (lambda.costate.size() != dynamics.size()) throw InputError("costate/dynamics size mismatch");
  if (lambda.multipliers.size() != critical_g.size()) {
    throw InputError("multiplier/constraint size mismatch");
  }
  return running_cost + lambda.costate.dot(dynamics) + lambda.multipliers.dot(critical_g) +
         penalties.sum();
}

bool GoalBox::bounded() const {
  return std::isfinite(q_lo) || std::isfinite(q_hi) || std::isfinite(qd_lo) || std::isfinite(qd_hi);
}

TorqueModel double_integrator(double inertia) {
  return [inertia](double, double, double, double u) {
    return TorqueSample{inertia * u, 0.0, 0.0, inertia};
  };
}

void OcpSpec::validate() const {
  if (!(t_begin < t_end)) throw InputError("segment horizon must satisfy t_begin < t_end");
  if (nodes < 3) throw InputError("at least three collocation nodes required");
  if (!(u_max > 0.0)) throw InputError("control bound must be positive");
  if (!std::isfinite(q0) || !std::isfinite(qd0)) throw InputError("initial state not finite");
  for (const auto* c : {&angle_class, &velocity_class, &torque_class, &power_class, &goal_class}) {
    if (c->criticality == Criticality::LessCritical && !(c->gain > 0.0)) {
      throw InputError("less-critical penalty gains must be positive");
    }
  }
  if (goal.q_lo > goal.q_hi || goal.qd_lo > goal.qd_hi) throw InputError("empty goal box");
}

void check_reachability(const OcpSpec& s) {
  if (!s.goal.bounded()) return;
  const double W = s.t_end - s.t_begin;
  const double a = s.u_max;
  const double v_lo = std::max(s.goal.qd_lo, s.qd0 - a * W);
  const double v_hi = std::min(s.goal.qd_hi, s.qd0 + a * W);
  if (v_lo > v_hi + 1e-12) throw InfeasibleError("goal velocity unreachable under the control bound");
  double best_lo = kInf, best_hi = -kInf;
  constexpr int samples = 65;
  for (int k = 0; k < samples; ++k) {
    const double vf = v_hi > v_lo ? v_lo + (v_hi - v_lo) * k / (samples - 1.0) : v_lo;
    double lo = 0.0, hi = 0.0;
    if (reachable_position_range(s.q0, s.qd0, vf, a, W, lo, hi)) {
      best_lo = std::min(best_lo, lo);
      best_hi = std::max(best_hi, hi);
    }
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(s.q0));
  if (best_hi < s.goal.q_lo - slack || best_lo > s.goal.q_hi + slack) {
    throw InfeasibleError("goal position unreachable under the control bound");
  }
}

SegmentNlp build_segment_nlp(const OcpSpec& spec, const TorqueModel& dynamics) {
  spec.validate();
  auto tr = std::make_shared<Transcription>(spec, dynamics);
  SegmentNlp out;
  out.h = tr->h;
  const int n = tr->controls;
  auto& p = out.problem;
  p.variables = n;
  p.lower = Vec::Constant(n, -spec.u_max);
  p.upper = Vec::Constant(n, spec.u_max);
  const auto rows0 = tr->rows(Vec::Zero(n));
  p.classes.reserve(rows0.size());
  p.gains.resize(static_cast<Eigen::Index>(rows0.size()));
  for (std::size_t r = 0; r < rows0.size(); ++r) {
    const auto c = tr->class_of(rows0[r].kind);
    p.classes.push_back(c.criticality);
    p.gains[static_cast<Eigen::Index>(r)] = c.gain;
    out.rows.push_back(rows0[r].kind);
  }
  p.objective = [tr](const Vec& u, Vec* grad, Mat* hess) { return tr->objective(u, grad, hess); };
  p.constraints = [tr](const Vec& u, Vec& g, Mat* jac) {
    const auto rows = tr->rows(u);
    g.resize(static_cast<Eigen::Index>(rows.size()));
    if (jac) jac->resize(static_cast<Eigen::Index>(rows.size()), tr->controls);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      g[static_cast<Eigen::Index>(r)] = rows[r].value;
      if (jac) jac->row(static_cast<Eigen::Index>(r)) = tr->jacobian_row(rows[r]);
    }
  };
  // Power rows are products tau * qd; keep their bilinear curvature.
  p.constraint_curvature = [tr](const Vec& u, const Vec& w) {
    Mat H = Mat::Zero(tr->controls, tr->controls);
    const auto rows = tr->rows(u);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (w[static_cast<Eigen::Index>(r)] == 0.0) continue;
      if (row.kind != RowKind::PowerMax && row.kind != RowKind::PowerMin) continue;
      const Vec q = tr->bq + tr->Sp * u;
      const Vec qd = tr->bv + tr->Sv * u;
      const int e = row.node;
      const TorqueSample ts = tr->torque(tr->t[e], q[e], qd[e], u[row.interval]);
      Vec a = ts.d_q * tr->Sp.row(e).transpose() + ts.d_qd * tr->Sv.row(e).transpose();
      a[row.interval] += ts.d_u;
      const Vec b = tr->Sv.row(e).transpose();
      const double sign = row.kind == RowKind::PowerMax ? 1.0 : -1.0;
      H += (w[static_cast<Eigen::Index>(r)] * sign * row.scale) * (a * b.transpose() + b * a.transpose());
    }
    return H;
  };
  out.initial = Vec::Constant(n, std::clamp(spec.initial_control, -spec.u_max, spec.u_max));
  return out;
}

double SegmentSolution::control_at(double time) const {
  if (u.empty()) return 0.0;
  const double h = (t.back() - t.front()) / static_cast<double>(u.size());
  const auto j = static_cast<long>(std::floor((time - t.front()) / h + 1e-9));
  return u[static_cast<std::size_t>(std::clamp<long>(j, 0, static_cast<long>(u.size()) - 1))];
}

void SegmentSolution::state_at(double time, double& q_out, double& qd_out) const {
  const double h = (t.back() - t.front()) / static_cast<double>(u.size());
  const auto j = static_cast<std::size_t>(
      std::clamp<long>(static_cast<long>(std::floor((time - t.front()) / h + 1e-9)), 0,
                       static_cast<long>(u.size()) - 1));
  const double s = time - t[j];
  q_out = q[j] + qd[j] * s + 0.5 * u[j] * s * s;
  qd_out = qd[j] + u[j] * s;
}

SegmentSolution solve_segment(const OcpSpec& spec, const TorqueModel& dynamics, JointMode mode) {
  spec.validate();
  check_reachability(spec);
  const Transcription tr(spec, dynamics);
  SegmentNlp nlp = build_segment_nlp(spec, dynamics);
  const NlpResult res = solve_nlp(nlp.problem, nlp.initial, spec.solver);

  SegmentSolution sol;
  sol.mode = mode;
  sol.t = tr.t;
  const Vec& u = res.x;
  const Vec q = tr.bq + tr.Sp * u;
  const Vec qd = tr.bv + tr.Sv * u;
  sol.q.assign(q.data(), q.data() + q.size());
  sol.qd.assign(qd.data(), qd.data() + qd.size());
  sol.u.assign(u.data(), u.data() + u.size());
  sol.tau.resize(static_cast<std::size_t>(tr.nodes));
  for (int i = 0; i < tr.nodes; ++i) {
    const int j = std::min(i, tr.controls - 1);
    sol.tau[static_cast<std::size_t>(i)] = dynamics(tr.t[i], q[i], qd[i], u[j]).tau;
  }
  sol.objective = res.objective;
  sol.critical_violation = res.critical_violation;
  sol.penalty_violation = res.penalty_violation;
  sol.stationarity = res.stationarity;
  sol.slackness = res.slackness;
  sol.converged = res.converged;
  sol.iterations = res.iterations;
  sol.violation_history = res.violation_history;
  sol.rows = nlp.rows;
  sol.g = res.g;
  sol.gains = res.gains;

  // Trapezoidal defects of the reconstructed nodal states.
  double defect = 0.0;
  for (int i = 0; i + 1 < tr.nodes; ++i) {
    defect = std::max(defect, std::abs(qd[i + 1] - qd[i] - tr.h * u[i]));
    defect = std::max(defect, std::abs(q[i + 1] - q[i] - 0.5 * tr.h * (qd[i] + qd[i + 1])));
  }
  sol.defect_residual = defect;

  // Multipliers of critical rows, costates by the discrete adjoint
  // lambda_i = dl_i/dx_i + A^T lambda_{i+1}, A = [1 h; 0 1].
  const auto rows = tr.rows(u);
  std::vector<double> mu_crit;
  Mat dl = Mat::Zero(tr.nodes, 2);
  for (int i = 0; i < tr.nodes; ++i) {
    const CostWeights w = spec.weights(tr.t[i]);
    dl(i, 1) += -2.0 * tr.trapezoid_weight(i) * w.k_v * qd[i];
  }
  Vec curvature(tr.controls);
  for (int j = 0; j < tr.controls; ++j) {
    const CostWeights w = spec.weights(tr.interval_mid(j));
    curvature[j] = 2.0 * tr.h * (w.k_u - w.k_a);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto idx = static_cast<Eigen::Index>(r);
    double weight = 0.0;
    if (nlp.problem.classes[r] == Criticality::Critical) {
      weight = res.multipliers[idx];
      mu_crit.push_back(weight);
    } else if (rows[r].value > 0.0) {
      weight = 2.0 * res.gains[idx] * rows[r].value;
      if (rows[r].interval >= 0) {
        curvature[rows[r].interval] += 2.0 * res.gains[idx] * rows[r].d_u * rows[r].d_u;
      }
    }
    dl(rows[r].node, 0) += weight * rows[r].d_q;
    dl(rows[r].node, 1) += weight * rows[r].d_qd;
  }
  Vec lambda(2 * tr.nodes);
  double lq = 0.0, lv = 0.0;
  for (int i = tr.nodes - 1; i >= 0; --i) {
    const double nq = dl(i, 0) + lq;
    const double nv = dl(i, 1) + tr.h * lq + lv;
    lq = nq;
    lv = nv;
    lambda[2 * i] = lq;
    lambda[2 * i + 1] = lv;
  }
  sol.multipliers.costate = lambda;
  sol.multipliers.multipliers = Eigen::Map<const Vec>(mu_crit.data(), static_cast<Eigen::Index>(mu_crit.size()));
  sol.min_control_curvature = curvature.minCoeff();
  sol.convex = sol.min_control_curvature > 0.0;

  if (!res.converged && res.critical_violation > 1e-6) {
    std::ostringstream os;
    os << "segment NLP did not converge (critical violation " << res.critical_violation << ")";
    throw NonConvergenceError(os.str(), sol);
  }
  return sol;
}

}  // namespace hmp
