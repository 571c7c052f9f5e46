#include "hmp/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <memory>
#include <random>

#include "hmp/errors.hpp"
#include "hmp/nelder_mead.hpp"
#include "hmp/integrator.hpp"
#include "hmp/ocp.hpp"

namespace hmp {
namespace {

struct PathSample {
  double q = 0.0;
  double qd = 0.0;
  double qdd = 0.0;
};

// One joint's motion over [0, t_f] as a list of pieces.
struct Piece {
  enum class Kind { Linear, Ocp, Sampled } kind = Kind::Linear;
  double begin = 0.0;
  double end = 0.0;
  double q0 = 0.0, qd0 = 0.0;  // Linear
  std::shared_ptr<const SegmentSolution> ocp;
  std::vector<double> t, q, qd, qdd;  // Sampled

  PathSample at(double time) const {
    switch (kind) {
      case Kind::Linear:
        return {q0 + qd0 * (time - begin), qd0, 0.0};
      case Kind::Ocp: {
        PathSample s;
        ocp->state_at(time, s.q, s.qd);
        s.qdd = ocp->control_at(time);
        return s;
      }
      case Kind::Sampled: {
        const auto it = std::upper_bound(t.begin(), t.end(), time);
        std::size_t k = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
        k = std::min(k, t.size() - 2);
        const double h = t[k + 1] - t[k];
        const double s = std::clamp((time - t[k]) / h, 0.0, 1.0);
        if (s == 0.0) return {q[k], qd[k], qdd[k]};
        if (s == 1.0) return {q[k + 1], qd[k + 1], qdd[k + 1]};
        const double s2 = s * s, s3 = s2 * s;
        const double qq = (2 * s3 - 3 * s2 + 1) * q[k] + (s3 - 2 * s2 + s) * h * qd[k] +
                          (-2 * s3 + 3 * s2) * q[k + 1] + (s3 - s2) * h * qd[k + 1];
        return {qq, qd[k] + s * (qd[k + 1] - qd[k]), qdd[k] + s * (qdd[k + 1] - qdd[k])};
      }
    }
    return {};
  }
};

struct JointPath {
  std::vector<Piece> pieces;

  PathSample at(double time) const {
    auto it = std::upper_bound(pieces.begin(), pieces.end(), time,
                               [](double v, const Piece& p) { return v < p.end; });
    if (it == pieces.end()) --it;
    return it->at(time);
  }
};

struct Run {
  double begin;
  double end;
  bool driven;
};

// Driven runs are maximal stretches that are not Passive, so a Transition
// window is solved together with the Active interval it borders.
std::vector<Run> runs_of(const std::vector<ModeInterval>& intervals) {
  std::vector<Run> out;
  for (const auto& iv : intervals) {
    const bool driven = iv.mode != JointMode::Passive;
    if (!out.empty() && out.back().driven == driven && out.back().end == iv.begin) {
      out.back().end = iv.end;
    } else {
      out.push_back({iv.begin, iv.end, driven});
    }
  }
  return out;
}

struct Coupling {
  const ChainModel& model;
  const std::vector<JointPath>& paths;

  void full_state(double t, Vec& q, Vec& qd, Vec& qdd) const {
    const int n = model.dof();
    q.resize(n);
    qd.resize(n);
    qdd.resize(n);
    for (int j = 0; j < n; ++j) {
      const PathSample s = paths[static_cast<std::size_t>(j)].at(t);
      q[j] = s.q;
      qd[j] = s.qd;
      qdd[j] = s.qdd;
    }
  }
};

// Torque of joint k with the rest of the chain frozen at the coupling
// estimate, tabulated at the collocation knots.
struct FrozenChainTorque {
  const ChainModel* model;
  int k;
  double begin;
  double h;
  std::vector<Vec> q, qd, qdd;

  double tau(int e, double qk, double qdk, double u) const {
    Vec Q = q[e], QD = qd[e], QDD = qdd[e];
    Q[k] = qk;
    QD[k] = qdk;
    QDD[k] = u;
    return inverse_dynamics(*model, {Q, QD, QDD})[k];
  }

  TorqueSample operator()(double t, double qk, double qdk, double u) const {
    const int last = static_cast<int>(q.size()) - 1;
    const int e = std::clamp(static_cast<int>(std::lround((t - begin) / h)), 0, last);
    const double dq = 1e-6 * std::max(1.0, std::abs(qk));
    const double dv = 1e-6 * std::max(1.0, std::abs(qdk));
    TorqueSample s;
    s.tau = tau(e, qk, qdk, u);
    s.d_q = (tau(e, qk + dq, qdk, u) - tau(e, qk - dq, qdk, u)) / (2 * dq);
    s.d_qd = (tau(e, qk, qdk + dv, u) - tau(e, qk, qdk - dv, u)) / (2 * dv);
    s.d_u = tau(e, qk, qdk, u + 1.0) - s.tau;  // torque is affine in u
    return s;
  }
};

double violation(double v, double lo, double hi) { return std::max({0.0, v - hi, lo - v}); }

}  // namespace

Evaluation evaluate_motion(const ResponseTimeMatrix& T, const Scenario& sc) {
  return evaluate_motion(T, sc, {sc.dt, sc.nodes});
}

Evaluation evaluate_motion(const ResponseTimeMatrix& T, const Scenario& sc, const Resolution& res) {
  const int n = sc.dof();
  if (T.joints() != n) throw InputError("response time matrix does not match the scenario");
  Evaluation ev;
  ev.T = T;
  ev.schedule = validate(T, sc.blend_width);
  const double tf = ev.schedule.horizon;
  const auto& model = sc.model;

  std::vector<JointPath> paths(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Piece p;
    p.begin = 0.0;
    p.end = tf;
    p.q0 = sc.initial.q[j];
    p.qd0 = sc.initial.qd[j];
    paths[static_cast<std::size_t>(j)].pieces.push_back(p);
  }

  if (!(tf > 0.0)) {
    Trajectory tr({0.0}, n);
    tr.q.row(0) = sc.initial.q.transpose();
    tr.qd.row(0) = sc.initial.qd.transpose();
    tr.qdd.row(0).setZero();
    tr.tau.row(0) = inverse_dynamics(model, {sc.initial.q, sc.initial.qd, Vec::Zero(n)}).transpose();
    tr.modes[0] = T.initial_mode;
    ev.trajectory = std::move(tr);
    score_trajectory(sc, ev);
    return ev;
  }

  std::vector<std::vector<Run>> runs(static_cast<std::size_t>(n));
  std::vector<double> events = ev.schedule.change_points();
  for (int j = 0; j < n; ++j) {
    runs[static_cast<std::size_t>(j)] = runs_of(ev.schedule.joints[static_cast<std::size_t>(j)]);
    for (const Run& r : runs[static_cast<std::size_t>(j)]) {
      events.push_back(r.begin);
      events.push_back(r.end);
      if (!r.driven) continue;
      const double h = (r.end - r.begin) / (res.nodes - 1);
      for (int i = 1; i + 1 < res.nodes; ++i) events.push_back(r.begin + h * i);
    }
  }
  const std::vector<double> grid = build_time_grid(0.0, tf, res.dt, events);
  const Coupling coupling{model, paths};
  const double P_sys = model.system_power;
  const double keep = 1.0 - sc.margin;
  const auto cls = [](const ConstraintClass& c) { return c; };

  for (int sweep = 0; sweep < sc.sweeps; ++sweep) {
    const bool last_sweep = sweep + 1 == sc.sweeps;
    for (int k = n - 1; k >= 0; --k) {
      const auto& lim = model.limits[static_cast<std::size_t>(k)];
      JointPath next;
      double q = sc.initial.q[k];
      double qd = sc.initial.qd[k];
      for (const Run& run : runs[static_cast<std::size_t>(k)]) {
        SegmentReport rep;
        rep.joint = k;
        rep.sweep = sweep;
        rep.begin = run.begin;
        rep.end = run.end;
        rep.driven = run.driven;
        Piece piece;
        piece.begin = run.begin;
        piece.end = run.end;
        if (run.driven) {
          OcpSpec spec;
          spec.t_begin = run.begin;
          spec.t_end = run.end;
          spec.nodes = res.nodes;
          spec.q0 = q;
          spec.qd0 = qd;
          if (run.end >= tf) spec.goal = sc.goals[static_cast<std::size_t>(k)];
          spec.u_max = sc.accel_max;
          spec.initial_control = sc.initial_control[k];
          const auto& schedule = ev.schedule;
          const WeightTable table = sc.weights;
          const double lo_t = run.begin, hi_t = std::nextafter(std::min(run.end, tf), 0.0);
          spec.weights = [&schedule, table, k, lo_t, hi_t](double t) {
            const double s = std::clamp(t, lo_t, hi_t);
            return weights_for_mode(schedule.interval_at(k, s), table, s);
          };
          spec.q_min = lim.theta_min;
          spec.q_max = lim.theta_max;
          spec.qd_max = lim.velocity_max;
          spec.tau_min = keep * lim.tau_min;
          spec.tau_max = keep * lim.tau_max;
          spec.angle_class = cls(sc.constraints.angle);
          spec.velocity_class = cls(sc.constraints.velocity);
          spec.torque_class = cls(sc.constraints.torque);
          spec.power_class = cls(sc.constraints.power);
          spec.goal_class = cls(sc.constraints.goal);

          auto torque = std::make_shared<FrozenChainTorque>();
          torque->model = &model;
          torque->k = k;
          torque->begin = run.begin;
          torque->h = (run.end - run.begin) / (res.nodes - 1);
          auto others = std::make_shared<std::vector<double>>();
          for (int e = 0; e < res.nodes; ++e) {
            const double t = e + 1 == res.nodes ? run.end : run.begin + torque->h * e;
            Vec Q, QD, QDD;
            coupling.full_state(t, Q, QD, QDD);
            const Vec tau = inverse_dynamics(model, {Q, QD, QDD});
            double p = 0.0;
            for (int j = 0; j < n; ++j)
              if (j != k) p += std::abs(tau[j] * QD[j]);
            others->push_back(p);
            torque->q.push_back(Q);
            torque->qd.push_back(QD);
            torque->qdd.push_back(QDD);
          }
          const double b = run.begin, hh = torque->h;
          const int last = res.nodes - 1;
          auto knot = [b, hh, last](double t) {
            return std::clamp(static_cast<int>(std::lround((t - b) / hh)), 0, last);
          };
          const double pmax = lim.power_max, pmin = lim.power_min;
          spec.power_hi = [others, knot, keep, pmax, P_sys](double t) {
            return keep * std::min(pmax, P_sys - (*others)[static_cast<std::size_t>(knot(t))]);
          };
          spec.power_lo = [others, knot, keep, pmin, P_sys](double t) {
            return keep * std::max(pmin, -(P_sys - (*others)[static_cast<std::size_t>(knot(t))]));
          };
          const TorqueModel tm = [torque](double t, double a, double v, double u) {
            return (*torque)(t, a, v, u);
          };

          std::shared_ptr<SegmentSolution> sol;
          try {
            sol = std::make_shared<SegmentSolution>(solve_segment(spec, tm, JointMode::Active));
          } catch (const NonConvergenceError& e) {
            sol = std::make_shared<SegmentSolution>(e.best());
            rep.ok = false;
            rep.message = e.what();
          } catch (const Error& e) {
            rep.ok = false;
            rep.message = e.what();
          }
          if (sol) {
            piece.kind = Piece::Kind::Ocp;
            piece.ocp = sol;
            rep.converged = sol->converged;
            rep.convex = sol->convex;
            rep.objective = sol->objective;
            rep.critical_violation = sol->critical_violation;
            rep.penalty_violation = sol->penalty_violation;
            rep.defect = sol->defect_residual;
            rep.stationarity = sol->stationarity;
            rep.slackness = sol->slackness;
            rep.iterations = sol->iterations;
            q = sol->q.back();
            qd = sol->qd.back();
          } else {
            piece.kind = Piece::Kind::Linear;
            piece.q0 = q;
            piece.qd0 = qd;
            q += qd * (run.end - run.begin);
            rep.converged = false;
          }
        } else {
          // Compliant response about the reference frozen at entry.
          const double B = sc.compliance.inertia[k];
          const double D = sc.compliance.damping[k];
          const double K = sc.compliance.stiffness[k];
          const double q_ref = q;
          auto accel = [&](double t, double qq, double vv) {
            Vec Q, QD, QDD;
            coupling.full_state(t, Q, QD, QDD);
            Q[k] = qq;
            QD[k] = vv;
            const Mat M = mass_matrix(model, Q);
            const Vec bias = bias_torque(model, Q, QD) - gravity_torque(model, Q);
            double tau_pr = -bias[k];
            for (int j = 0; j < n; ++j)
              if (j != k) tau_pr -= M(k, j) * QDD[j];
            return (tau_pr - D * vv - K * (qq - q_ref)) / B;
          };
          auto i0 = std::lower_bound(grid.begin(), grid.end(), run.begin - 1e-9);
          auto i1 = std::lower_bound(grid.begin(), grid.end(), run.end - 1e-9);
          piece.kind = Piece::Kind::Sampled;
          Vec x(2);
          x << q, qd;
          for (auto it = i0; it != i1 + 1; ++it) {
            if (it != i0) {
              const double t0 = *(it - 1);
              const double step = *it - t0;
              const auto f = [&](double t, const Vec& s) {
                Vec d(2);
                d << s[1], accel(t, s[0], s[1]);
                return d;
              };
              x = rk4_step(f, t0, x, step);
              if (!x.allFinite()) {
                rep.ok = false;
                rep.message = "compliant response diverged";
                x << q, 0.0;
              }
            }
            piece.t.push_back(*it);
            piece.q.push_back(x[0]);
            piece.qd.push_back(x[1]);
            piece.qdd.push_back(accel(*it, x[0], x[1]));
          }
          if (piece.t.size() < 2) {
            piece.t.push_back(run.end);
            piece.q.push_back(x[0]);
            piece.qd.push_back(x[1]);
            piece.qdd.push_back(piece.qdd.back());
          }
          q = x[0];
          qd = x[1];
        }
        if (last_sweep && !rep.ok) ++ev.failed_segments;
        ev.segments.push_back(std::move(rep));
        next.pieces.push_back(std::move(piece));
      }
      paths[static_cast<std::size_t>(k)] = std::move(next);
    }
  }

  Trajectory tr(grid, n);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const double t = grid[s];
    Vec Q, QD, QDD;
    coupling.full_state(t, Q, QD, QDD);
    tr.q.row(static_cast<Eigen::Index>(s)) = Q.transpose();
    tr.qd.row(static_cast<Eigen::Index>(s)) = QD.transpose();
    tr.qdd.row(static_cast<Eigen::Index>(s)) = QDD.transpose();
    tr.tau.row(static_cast<Eigen::Index>(s)) = inverse_dynamics(model, {Q, QD, QDD}).transpose();
    const double tm = t < tf ? t : grid[grid.size() > 1 ? grid.size() - 2 : 0];
    for (int j = 0; j < n; ++j) tr.modes[s][static_cast<std::size_t>(j)] = mode_at(ev.schedule, j, tm);
  }
  ev.trajectory = std::move(tr);
  score_trajectory(sc, ev);
  return ev;
}

void score_trajectory(const Scenario& sc, Evaluation& ev) {
  const Trajectory& tr = ev.trajectory;
  const auto& model = sc.model;
  const int n = tr.dof();
  const int K = tr.size();
  const auto& C = sc.constraints;
  constexpr double tol = 1e-6;

  ev.power.assign(static_cast<std::size_t>(K), 0.0);
  std::vector<double> crit(static_cast<std::size_t>(K), 0.0);
  std::vector<double> soft(static_cast<std::size_t>(K), 0.0);  // sum k v^2
  std::vector<double> tau2(static_cast<std::size_t>(K), 0.0);
  bool feasible = true;
  auto account = [&](const ConstraintClass& c, double v, std::size_t s) {
    if (v <= 0.0) return;
    if (c.criticality == Criticality::Critical) {
      crit[s] += v;
      if (v > tol) feasible = false;
    } else {
      soft[s] += c.gain * v * v;
    }
  };
  for (int s = 0; s < K; ++s) {
    const auto us = static_cast<std::size_t>(s);
    double p = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto& lim = model.limits[static_cast<std::size_t>(j)];
      const double q = tr.q(s, j), qd = tr.qd(s, j), tau = tr.tau(s, j);
      account(C.angle, violation(q, lim.theta_min, lim.theta_max), us);
      account(C.velocity, violation(qd, -lim.velocity_max, lim.velocity_max), us);
      account(C.torque, violation(tau, lim.tau_min, lim.tau_max), us);
      account(C.power, violation(tau * qd, lim.power_min, lim.power_max), us);
      p += std::abs(tau * qd);
      tau2[us] += tau * tau;
    }
    ev.power[us] = p;
    account(C.power, std::max(0.0, p - model.system_power), us);
  }
  double V = 0.0, pen = 0.0, tint = 0.0;
  for (int s = 0; s + 1 < K; ++s) {
    const auto a = static_cast<std::size_t>(s), b = a + 1;
    const double h = tr.t[b] - tr.t[a];
    V += 0.5 * h * (crit[a] + crit[b]);
    pen += 0.5 * h * (soft[a] + soft[b]);
    tint += 0.5 * h * (tau2[a] + tau2[b]);
  }
  if (K == 1) V += crit[0];
  // Terminal boxes are pointwise.
  for (int j = 0; j < n; ++j) {
    const auto& g = sc.goals[static_cast<std::size_t>(j)];
    const double v = std::max(violation(tr.q(K - 1, j), g.q_lo, g.q_hi),
                              violation(tr.qd(K - 1, j), g.qd_lo, g.qd_hi));
    if (v <= 0.0) continue;
    if (C.goal.criticality == Criticality::Critical) {
      V += v;
      if (v > tol) feasible = false;
    } else {
      pen += C.goal.gain * v * v;
    }
  }
  ev.peak_power = K ? *std::max_element(ev.power.begin(), ev.power.end()) : 0.0;
  ev.torque_integral = tint;
  ev.violation = V;
  ev.penalty = pen;

  const double tf = tr.t.empty() ? 0.0 : tr.t.back();
  if (sc.objective == TaskObjective::ThrowRange) {
    const ReleaseState r = release_from(tr, ev.T);
    ev.release = throw_objective(model, r);
    ev.objective = ev.release->feasible ? ev.release->range : 0.0;
  } else {
    ev.objective = -(sc.time_weight * tf + sc.torque_weight * tint);
  }
  ev.feasible = feasible && ev.failed_segments == 0;
  ev.score = ev.feasible ? ev.objective - ev.penalty
                         : kInfeasibleScore - V - static_cast<double>(ev.failed_segments);
}

// ---------------------------------------------------------------------------

int TimingCode::size() const {
  int s = 0;
  for (const auto& r : free_columns) s += static_cast<int>(r.size());
  return s;
}

TimingCode TimingCode::of(const ResponseTimeMatrix& T) {
  TimingCode c;
  c.base = T;
  const double tf = T.horizon();
  c.free_columns.resize(static_cast<std::size_t>(T.joints()));
  for (int i = 0; i < T.joints(); ++i)
    for (int col = 0; col < T.columns(); ++col) {
      const double v = T.times(i, col);
      if (v != 0.0 && v < tf) c.free_columns[static_cast<std::size_t>(i)].push_back(col);
    }
  return c;
}

Eigen::VectorXd TimingCode::encode(const ResponseTimeMatrix& T) const {
  Eigen::VectorXd z(size());
  int k = 0;
  for (int i = 0; i < T.joints(); ++i) {
    double prev = 0.0;
    for (int col : free_columns[static_cast<std::size_t>(i)]) {
      const double v = T.times(i, col);
      z[k++] = std::log(std::max(v - prev, 1e-12));
      prev = v;
    }
  }
  return z;
}

ResponseTimeMatrix TimingCode::decode(const Eigen::VectorXd& z, double latest, double& excess) const {
  if (z.size() != size()) throw InputError("timing code size mismatch");
  ResponseTimeMatrix T = base;
  excess = 0.0;
  int k = 0;
  for (int i = 0; i < T.joints(); ++i) {
    double acc = 0.0;
    for (int col : free_columns[static_cast<std::size_t>(i)]) {
      acc += std::exp(z[k++]);
      excess += std::max(0.0, acc - latest);
      T.times(i, col) = acc;
    }
  }
  return T;
}

ResponseTimeMatrix synchronous_matrix(const Scenario& sc) {
  ResponseTimeMatrix T = sc.T;
  const double tf = T.horizon();
  for (int i = 0; i < T.joints(); ++i) {
    bool switches = false;
    for (int c = 0; c < T.columns(); ++c)
      if (T.times(i, c) != 0.0 && T.times(i, c) < tf) switches = true;
    if (!switches) continue;
    T.times.row(i).setZero();
    T.times(i, 0) = sc.epsilon();
    T.times(i, T.columns() - 1) = tf;
    T.initial_mode[static_cast<std::size_t>(i)] = JointMode::Passive;
  }
  return T;
}

int worker_count() {
  if (const char* env = std::getenv("HMP_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return std::min(w, 64);
  }
  return 1;
}

namespace {

struct Candidate {
  double score;
  Eigen::VectorXd z;
};

struct RestartOutcome {
  std::vector<Candidate> candidates;
  SimplexResult simplex;
};

}  // namespace

PlanResult optimize_T(const Scenario& sc) { return optimize_T(sc, sc.T, sc.search.budget); }

PlanResult optimize_T(const Scenario& sc, const ResponseTimeMatrix& T_init, int budget) {
  if (budget < 1) throw InputError("budget must allow at least one evaluation");
  const auto t_start = std::chrono::steady_clock::now();
  const TimingCode code = TimingCode::of(T_init);
  const double tf = T_init.horizon();
  const double latest = tf - std::max(sc.blend_width, 10.0 * sc.dt);
  const Resolution coarse{sc.search.dt, sc.search.nodes};
  const Eigen::VectorXd z0 = code.encode(T_init);

  PlanResult out;
  std::vector<Candidate> all;
  if (code.size() == 0) {
    all.push_back({evaluate_motion(T_init, sc, coarse).score, z0});
    out.trace.evaluations = 1;
    out.trace.best_so_far.push_back(all.front().score);
    out.trace.restart_best.push_back(all.front().score);
  } else {
    const int R = std::max(1, std::min(sc.search.restarts, budget));
    std::mt19937_64 rng(sc.search.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Eigen::VectorXd> starts;
    for (int r = 0; r < R; ++r) {
      Eigen::VectorXd z = z0;
      for (int i = 0; i < z.size(); ++i) z[i] += sc.search.jitter * normal(rng);
      starts.push_back(z);
    }
    auto run = [&](int r) {
      RestartOutcome o;
      SimplexSettings ss;
      ss.budget = budget / R + (r < budget % R ? 1 : 0);
      ss.step = sc.search.step;
      const auto f = [&](const Eigen::VectorXd& z) {
        double excess = 0.0;
        const ResponseTimeMatrix T = code.decode(z, latest, excess);
        double s;
        if (excess > 0.0) {
          s = kInfeasibleScore - 1e3 * excess;
        } else {
          s = evaluate_motion(T, sc, coarse).score;
        }
        o.candidates.push_back({s, z});
        return s;
      };
      o.simplex = nelder_mead_max(f, starts[static_cast<std::size_t>(r)], ss);
      return o;
    };
    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(R));
    const int workers = std::min(worker_count(), R);
    for (int r0 = 0; r0 < R; r0 += workers) {
      std::vector<std::future<RestartOutcome>> jobs;
      for (int r = r0; r < std::min(R, r0 + workers); ++r)
        jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run, r));
      for (int r = r0; r < std::min(R, r0 + workers); ++r)
        outcomes[static_cast<std::size_t>(r)] = jobs[static_cast<std::size_t>(r - r0)].get();
    }
    double best = -std::numeric_limits<double>::infinity();
    for (auto& o : outcomes) {
      for (double v : o.simplex.best_so_far) {
        best = std::max(best, v);
        out.trace.best_so_far.push_back(best);
      }
      out.trace.evaluations += o.simplex.evaluations;
      out.trace.restart_best.push_back(o.simplex.value);
      all.insert(all.end(), o.candidates.begin(), o.candidates.end());
    }
  }

  std::stable_sort(all.begin(), all.end(),
                   [](const Candidate& a, const Candidate& b) { return better(a.score, a.z, b.score, b.z); });
  // Regenerate at full resolution; fall back down the ranking if the fine
  // plan breaks a critical constraint the coarse one did not.
  std::optional<Evaluation> chosen;
  Evaluation first_try;
  int tried = 0;
  for (std::size_t i = 0; i < all.size() && tried < 5; ++i) {
    if (i > 0 && all[i].z == all[i - 1].z) continue;
    if (all[i].score <= kInfeasibleScore) break;
    double excess = 0.0;
    const ResponseTimeMatrix T = code.size() ? code.decode(all[i].z, latest, excess) : T_init;
    Evaluation ev = evaluate_motion(T, sc, {sc.dt, sc.nodes});
    if (tried == 0) first_try = ev;
    ++tried;
    if (ev.feasible) {
      chosen = std::move(ev);
      break;
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (!chosen) {
    std::string why = "no feasible plan found";
    if (tried > 0) {
      why += " (best regenerated candidate: violation " + std::to_string(first_try.violation) +
             ", failed segments " + std::to_string(first_try.failed_segments) + ")";
    } else if (!all.empty()) {
      why += " (best search score " + std::to_string(all.front().score) + ")";
    }
    throw PlanningError(why);
  }
  out.plan = std::move(*chosen);
  out.T = out.plan.T;
  out.objective = out.plan.objective;
  out.score = out.plan.score;
  return out;
}

std::optional<double> oracle_ratio(const Scenario& sc, const Evaluation& planner,
                                   const OracleResult& oracle) {
  if (!oracle.converged || !oracle.plan.feasible) return std::nullopt;
  const double jp = planner.objective, jo = oracle.plan.objective;
  if (sc.objective == TaskObjective::ThrowRange) {
    if (!(jo > 0.0)) return std::nullopt;
    return jp / jo;
  }
  // Costs are stored negated; the ratio compares the positive costs.
  if (!(jp < 0.0)) return std::nullopt;
  return jo / jp;
}

Baselines make_baselines(const Scenario& sc) {
  Baselines b;
  b.synchronous = evaluate_motion(synchronous_matrix(sc), sc);
  b.oracle = dense_oracle(sc);
  return b;
}

}  // namespace hmp
