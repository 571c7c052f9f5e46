// Whole-horizon, all-joint direct collocation used as the reference optimum.
#include <algorithm>
#include <cmath>
#include <memory>

#include "hmp/errors.hpp"
#include "hmp/planner.hpp"

namespace hmp {
namespace {

struct DenseTranscription {
  const Scenario& sc;
  int n;      // joints
  int nodes;
  int m;      // intervals
  double h;
  double tf;
  Mat Sp, Sv;
  std::vector<double> t;
  std::vector<Criticality> classes;
  Vec gains;

  DenseTranscription(const Scenario& s, int nodes_, double horizon)
      : sc(s), n(s.dof()), nodes(nodes_), m(nodes_ - 1), tf(horizon) {
    h = tf / m;
    Sp = Mat::Zero(nodes, m);
    Sv = Mat::Zero(nodes, m);
    t.resize(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
      t[static_cast<std::size_t>(i)] = i + 1 == nodes ? tf : h * i;
      for (int j = 0; j < i; ++j) {
        Sv(i, j) = h;
        Sp(i, j) = h * h * (i - j - 0.5);
      }
    }
  }

  int var(int joint, int interval) const { return joint * m + interval; }

  // Joint positions and velocities at every node, (nodes, n).
  void states(const Vec& u, Mat& q, Mat& qd) const {
    q.resize(nodes, n);
    qd.resize(nodes, n);
    for (int j = 0; j < n; ++j) {
      const Vec uj = u.segment(j * m, m);
      for (int i = 0; i < nodes; ++i) {
        q(i, j) = sc.initial.q[j] + t[static_cast<std::size_t>(i)] * sc.initial.qd[j] + Sp.row(i).dot(uj);
        qd(i, j) = sc.initial.qd[j] + Sv.row(i).dot(uj);
      }
    }
  }

  // Torque at node e under the control of interval i, with its local
  // partials (finite differences in the joint state, M for the control).
  struct Local {
    Vec tau;
    Mat dq, dqd, du;  // (n, n): d tau_a / d x_b
  };
  Local local(const Mat& q, const Mat& qd, const Vec& u, int e, int i, bool partials) const {
    Vec Q = q.row(e).transpose(), QD = qd.row(e).transpose(), U(n);
    for (int j = 0; j < n; ++j) U[j] = u[var(j, i)];
    Local L;
    L.tau = inverse_dynamics(sc.model, {Q, QD, U});
    if (!partials) return L;
    L.dq.resize(n, n);
    L.dqd.resize(n, n);
    for (int b = 0; b < n; ++b) {
      const double d = 1e-6;
      Vec Qp = Q, Qm = Q;
      Qp[b] += d;
      Qm[b] -= d;
      L.dq.col(b) = (inverse_dynamics(sc.model, {Qp, QD, U}) - inverse_dynamics(sc.model, {Qm, QD, U})) / (2 * d);
      Vec Vp = QD, Vm = QD;
      Vp[b] += d;
      Vm[b] -= d;
      L.dqd.col(b) = (inverse_dynamics(sc.model, {Q, Vp, U}) - inverse_dynamics(sc.model, {Q, Vm, U})) / (2 * d);
    }
    L.du = mass_matrix(sc.model, Q);
    return L;
  }

  // Row of d tau_a / d u for a point (e, i).
  Eigen::RowVectorXd torque_row(const Local& L, int a, int e, int i) const {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n * m);
    for (int b = 0; b < n; ++b) {
      r.segment(b * m, m) += L.dq(a, b) * Sp.row(e) + L.dqd(a, b) * Sv.row(e);
      r[var(b, i)] += L.du(a, b);
    }
    return r;
  }
};

// Constraint rows; classes are fixed by the row layout, which does not
// depend on u.
void dense_constraints(const DenseTranscription& d, const Vec& u, Vec& g, Mat* jac,
                       std::vector<Criticality>* classes, Vec* gains) {
  const auto& sc = d.sc;
  const auto& C = sc.constraints;
  const int n = d.n;
  Mat q, qd;
  d.states(u, q, qd);
  std::vector<double> vals;
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<Criticality> cls;
  std::vector<double> gn;
  const bool want = jac != nullptr;
  const Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(n * d.m);
  auto push = [&](double v, const Eigen::RowVectorXd& r, const ConstraintClass& c) {
    vals.push_back(v);
    if (want) rows.push_back(r);
    cls.push_back(c.criticality);
    gn.push_back(c.gain);
  };
  constexpr double keep = 0.99;

  for (int i = 1; i < d.nodes; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& lim = sc.model.limits[static_cast<std::size_t>(j)];
      Eigen::RowVectorXd rq = zero, rv = zero;
      if (want) {
        rq.segment(j * d.m, d.m) = d.Sp.row(i);
        rv.segment(j * d.m, d.m) = d.Sv.row(i);
      }
      push(q(i, j) - lim.theta_max, rq, C.angle);
      push(lim.theta_min - q(i, j), -rq, C.angle);
      const double vs = std::max(1.0, lim.velocity_max);
      push((qd(i, j) - lim.velocity_max) / vs, rv / vs, C.velocity);
      push((-lim.velocity_max - qd(i, j)) / vs, -rv / vs, C.velocity);
    }

  const double P = sc.model.system_power;
  for (int i = 0; i < d.m; ++i)
    for (int e : {i, i + 1}) {
      const auto L = d.local(q, qd, u, e, i, want);
      std::vector<Eigen::RowVectorXd> dtau(static_cast<std::size_t>(n), zero);
      if (want)
        for (int a = 0; a < n; ++a) dtau[static_cast<std::size_t>(a)] = d.torque_row(L, a, e, i);
      Vec pw(n);
      std::vector<Eigen::RowVectorXd> dp(static_cast<std::size_t>(n), zero);
      for (int a = 0; a < n; ++a) {
        const auto& lim = sc.model.limits[static_cast<std::size_t>(a)];
        const double ts = std::max({1.0, std::abs(lim.tau_max), std::abs(lim.tau_min)});
        const auto& r = dtau[static_cast<std::size_t>(a)];
        push((L.tau[a] - keep * lim.tau_max) / ts, r / ts, C.torque);
        push((keep * lim.tau_min - L.tau[a]) / ts, -r / ts, C.torque);
        pw[a] = L.tau[a] * qd(e, a);
        if (want) {
          Eigen::RowVectorXd rv = zero;
          rv.segment(a * d.m, d.m) = d.Sv.row(e);
          dp[static_cast<std::size_t>(a)] = qd(e, a) * r + L.tau[a] * rv;
        }
        const double ps = std::max({1.0, std::abs(lim.power_max), std::abs(lim.power_min)});
        push((pw[a] - keep * lim.power_max) / ps, dp[static_cast<std::size_t>(a)] / ps, C.power);
        push((keep * lim.power_min - pw[a]) / ps, -dp[static_cast<std::size_t>(a)] / ps, C.power);
      }
      // sum |p_a| <= P as the 2^n signed sums.
      const double ss = std::max(1.0, P);
      for (int mask = 0; mask < (1 << n); ++mask) {
        double v = 0.0;
        Eigen::RowVectorXd r = zero;
        for (int a = 0; a < n; ++a) {
          const double s = (mask >> a) & 1 ? -1.0 : 1.0;
          v += s * pw[a];
          if (want) r += s * dp[static_cast<std::size_t>(a)];
        }
        push((v - keep * P) / ss, r / ss, C.power);
      }
    }

  const int last = d.nodes - 1;
  for (int j = 0; j < n; ++j) {
    const auto& gb = sc.goals[static_cast<std::size_t>(j)];
    Eigen::RowVectorXd rq = zero, rv = zero;
    if (want) {
      rq.segment(j * d.m, d.m) = d.Sp.row(last);
      rv.segment(j * d.m, d.m) = d.Sv.row(last);
    }
    if (std::isfinite(gb.q_hi)) push(q(last, j) - gb.q_hi, rq, C.goal);
    if (std::isfinite(gb.q_lo)) push(gb.q_lo - q(last, j), -rq, C.goal);
    if (std::isfinite(gb.qd_hi)) push(qd(last, j) - gb.qd_hi, rv, C.goal);
    if (std::isfinite(gb.qd_lo)) push(gb.qd_lo - qd(last, j), -rv, C.goal);
  }

  g = Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  if (jac) {
    jac->resize(static_cast<Eigen::Index>(rows.size()), n * d.m);
    for (std::size_t r = 0; r < rows.size(); ++r) jac->row(static_cast<Eigen::Index>(r)) = rows[r];
  }
  if (classes) *classes = cls;
  if (gains) *gains = Eigen::Map<const Vec>(gn.data(), static_cast<Eigen::Index>(gn.size()));
}

// Negated range as a function of the release features (s1, s2, r1, r2).
double neg_range(const ChainModel& model, const Eigen::Vector4d& f) {
  const ThrowOutcome o = throw_objective(model, {f[0], f[1], f[2], f[3]});
  return o.feasible ? -o.range : 0.0;
}

}  // namespace

OracleResult dense_oracle(const Scenario& sc, int nodes) {
  sc.validate();
  OracleResult out;
  const double tf = sc.T.horizon();
  if (nodes <= 0) nodes = std::max(sc.nodes, 20);
  auto d = std::make_shared<DenseTranscription>(sc, nodes, tf);
  const int n = d->n, m = d->m;

  NlpProblem p;
  p.variables = n * m;
  p.lower = Vec::Constant(n * m, -sc.accel_max);
  p.upper = Vec::Constant(n * m, sc.accel_max);
  {
    Vec g;
    dense_constraints(*d, Vec::Zero(n * m), g, nullptr, &p.classes, &p.gains);
  }
  p.constraints = [d](const Vec& u, Vec& g, Mat* jac) { dense_constraints(*d, u, g, jac, nullptr, nullptr); };

  // Small control regularization keeps the reward problem well posed where
  // the range is flat in u.
  constexpr double reg = 1e-6;
  if (sc.objective == TaskObjective::ThrowRange) {
    p.objective = [d, reg](const Vec& u, Vec* grad, Mat* hess) {
      Mat q, qd;
      d->states(u, q, qd);
      const int last = d->nodes - 1;
      Eigen::Vector4d f(q(last, 0) - d->sc.initial.q[0], q(last, 1) - d->sc.initial.q[1],
                        qd(last, 0), qd(last, 1));
      const auto& model = d->sc.model;
      double v = neg_range(model, f) + reg * d->h * u.squaredNorm();
      if (grad || hess) {
        Mat A = Mat::Zero(4, u.size());  // d features / d u
        A.block(0, 0, 1, d->m) = d->Sp.row(last);
        A.block(1, d->m, 1, d->m) = d->Sp.row(last);
        A.block(2, 0, 1, d->m) = d->Sv.row(last);
        A.block(3, d->m, 1, d->m) = d->Sv.row(last);
        const double e = 1e-5;
        Eigen::Vector4d gf;
        Eigen::Matrix4d Hf;
        for (int a = 0; a < 4; ++a) {
          Eigen::Vector4d fp = f, fm = f;
          fp[a] += e;
          fm[a] -= e;
          gf[a] = (neg_range(model, fp) - neg_range(model, fm)) / (2 * e);
          for (int b = 0; b < 4; ++b) {
            Eigen::Vector4d pp = f, pm = f, mp = f, mm = f;
            pp[a] += e; pp[b] += e;
            pm[a] += e; pm[b] -= e;
            mp[a] -= e; mp[b] += e;
            mm[a] -= e; mm[b] -= e;
            Hf(a, b) = (neg_range(model, pp) - neg_range(model, pm) - neg_range(model, mp) +
                        neg_range(model, mm)) / (4 * e * e);
          }
        }
        if (grad) *grad = A.transpose() * gf + 2.0 * reg * d->h * u;
        if (hess) {
          *hess = A.transpose() * (0.5 * (Hf + Hf.transpose())) * A;
          hess->diagonal().array() += 2.0 * reg * d->h;
        }
      }
      return v;
    };
  } else {
    const double wt = sc.torque_weight, wtime = sc.time_weight;
    p.objective = [d, wt, wtime](const Vec& u, Vec* grad, Mat* hess) {
      Mat q, qd;
      d->states(u, q, qd);
      const bool partials = grad || hess;
      double v = wtime * d->tf;
      if (grad) *grad = Vec::Zero(u.size());
      if (hess) *hess = Mat::Zero(u.size(), u.size());
      // Interval i contributes h/2 (|tau(i)|^2 + |tau(i+1)|^2) under u_i.
      for (int i = 0; i < d->m; ++i)
        for (int e : {i, i + 1}) {
          const auto L = d->local(q, qd, u, e, i, partials);
          const double c = 0.5 * d->h * wt;
          v += c * L.tau.squaredNorm();
          if (!partials) continue;
          Mat J(d->n, u.size());
          for (int a = 0; a < d->n; ++a) J.row(a) = d->torque_row(L, a, e, i);
          if (grad) *grad += 2.0 * c * J.transpose() * L.tau;
          if (hess) *hess += 2.0 * c * J.transpose() * J;
        }
      return v;
    };
  }

  Vec u0(n * m);
  for (int j = 0; j < n; ++j) u0.segment(j * m, m).setConstant(std::clamp(sc.initial_control[j], -sc.accel_max, sc.accel_max));
  NlpSettings st;
  st.max_iterations = 400;
  const NlpResult r = solve_nlp(p, u0, st);
  out.iterations = r.iterations;
  out.converged = r.converged || r.critical_violation <= 1e-6;
  if (!out.converged) out.message = "oracle NLP stopped with critical violation " + std::to_string(r.critical_violation);

  // Sample the condensed motion on the emitted grid.
  std::vector<double> events(d->t.begin() + 1, d->t.end() - 1);
  const std::vector<double> grid = build_time_grid(0.0, tf, sc.dt, events);
  Trajectory tr(grid, n);
  tr.modes.assign(grid.size(), std::vector<JointMode>(static_cast<std::size_t>(n), JointMode::Active));
  Mat q, qd;
  d->states(r.x, q, qd);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const double t = grid[s];
    const int i = std::clamp(static_cast<int>(std::floor(t / d->h + 1e-9)), 0, m - 1);
    const double tau_local = t - d->t[static_cast<std::size_t>(i)];
    Vec Q(n), QD(n), U(n);
    for (int j = 0; j < n; ++j) {
      U[j] = r.x[d->var(j, i)];
      Q[j] = q(i, j) + qd(i, j) * tau_local + 0.5 * U[j] * tau_local * tau_local;
      QD[j] = qd(i, j) + U[j] * tau_local;
    }
    const auto k = static_cast<Eigen::Index>(s);
    tr.q.row(k) = Q.transpose();
    tr.qd.row(k) = QD.transpose();
    tr.qdd.row(k) = U.transpose();
    tr.tau.row(k) = inverse_dynamics(sc.model, {Q, QD, U}).transpose();
  }
  out.plan.T = synchronous_matrix(sc);
  out.plan.schedule = validate(out.plan.T, sc.blend_width);
  out.plan.trajectory = std::move(tr);
  score_trajectory(sc, out.plan);
  return out;
}

}  // namespace hmp
