// One line per acceptance criterion; exit status is non-zero if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "hmp/compliance.hpp"
#include "hmp/cost.hpp"
#include "hmp/dynamics.hpp"
#include "hmp/integrator.hpp"
#include "hmp/ocp.hpp"
#include "hmp/planner.hpp"
#include "hmp/scenarios.hpp"
#include "oracles.hpp"

using namespace hmp;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double peak_power(const Evaluation& ev) {
  double p = 0.0;
  for (double v : ev.power) p = std::max(p, v);
  return p;
}

double first_activation(const ResponseTimeMatrix& T, int j) {
  const auto sw = T.switches(j);
  if (T.initial_mode[j] == JointMode::Active) return 0.0;
  return sw.empty() ? T.horizon() : sw.front();
}

struct ThrowRuns {
  std::vector<PlanResult> plans;
  Baselines base;
};

ThrowRuns throwing_runs() {
  ThrowRuns r;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Scenario sc = throwing_scenario();
    sc.search.seed = seed;
    r.plans.push_back(optimize_T(sc));
  }
  r.base = make_baselines(throwing_scenario());
  return r;
}

void criterion1(const ThrowRuns& r) {
  bool ok = true;
  std::string d;
  for (std::size_t s = 0; s < r.plans.size(); ++s) {
    const auto& p = r.plans[s];
    const double a = first_activation(p.T, 0), b = first_activation(p.T, 1);
    ok = ok && a < b && p.trace.evaluations <= 500 && p.wall_seconds <= 60.0;
    d += fmt("seed%zu %.3f<%.3f (%d evals, %.0fs) ", s, a, b, p.trace.evaluations, p.wall_seconds);
  }
  report(1, ok, "shoulder before wrist: " + d);
}

void criterion2(const ThrowRuns& r) {
  const double sync = r.base.synchronous.release ? r.base.synchronous.release->range : 0.0;
  bool ok = r.base.synchronous.feasible;
  std::string d = fmt("sync %.4f m; ", sync);
  for (const auto& p : r.plans) {
    const double range = p.plan.release ? p.plan.release->range : 0.0;
    ok = ok && p.plan.feasible && range >= 1.10 * sync;
    d += fmt("%.2fx ", range / sync);
  }
  report(2, ok, d);
}

void criterion3(const ThrowRuns& r, const PlanResult& stand, const Baselines& sb) {
  const Scenario th = throwing_scenario(), st = standing_scenario();
  const auto rt = oracle_ratio(th, r.plans.front().plan, r.base.oracle);
  const auto rs = oracle_ratio(st, stand.plan, sb.oracle);
  const bool ok = rt && rs && *rt >= 0.70 && *rs >= 0.70;
  std::string d = fmt("throwing %.3f, standing %.3f", rt.value_or(NAN), rs.value_or(NAN));
  d += " (other throwing seeds:";
  for (std::size_t s = 1; s < r.plans.size(); ++s)
    d += fmt(" %.3f", oracle_ratio(th, r.plans[s].plan, r.base.oracle).value_or(NAN));
  report(3, ok, d + ")");
}

void criterion4(const PlanResult& stand, const Baselines& sb) {
  const double p = peak_power(stand.plan), s = peak_power(sb.synchronous);
  const bool ok = stand.plan.feasible && sb.synchronous.feasible && p <= 0.85 * s;
  report(4, ok, fmt("planner peak %.2f W, synchronous %.2f W, ratio %.3f (needs <= 0.85)", p, s, p / s));
}

void criterion5(const ThrowRuns& r) {
  const Scenario sc = throwing_scenario();
  double worst = 0.0;
  for (const auto& p : r.plans) worst = std::max(worst, peak_power(p.plan));
  worst = std::max(worst, peak_power(r.base.synchronous));
  if (r.base.oracle.converged) worst = std::max(worst, peak_power(r.base.oracle.plan));
  const bool critical = sc.constraints.power.criticality == Criticality::Critical;
  report(5, critical && worst <= sc.model.system_power + 1e-6,
         fmt("max sum|tau qd| %.3f W over %zu plans and both baselines, cap %.0f W", worst, r.plans.size(),
             sc.model.system_power));
}

void criterion6() {
  const auto model = throwing_scenario().model;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> sweep(0.1, 1.3), rate(-2.0, 8.0);
  const auto t0 = std::chrono::steady_clock::now();
  double et = 0.0, ex = 0.0;
  int n = 0;
  while (n < 100) {
    const auto o = throw_objective(model, {sweep(rng), sweep(rng) - 0.6, rate(rng), rate(rng)});
    if (!o.feasible) continue;
    const auto [tf, x] = oracle::projectile(o.speed, o.angle, o.height, model.gravity);
    et = std::max(et, std::abs(tf - o.flight_time));
    ex = std::max(ex, std::abs(x - o.range));
    ++n;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(6, et < 1e-6 && ex < 1e-6 && secs < 1.0,
         fmt("max |dt| %.1e s, max |dx| %.1e m over %d states in %.3f s", et, ex, n, secs));
}

void criterion7() {
  std::mt19937_64 rng(7);
  const auto arm = throwing_scenario().model;
  double rt = 0.0, skew = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec q = oracle::random_vec(rng, 2, 3.0), qd = oracle::random_vec(rng, 2, 3.0);
    const Vec tau = oracle::random_vec(rng, 2, 20.0);
    const Vec qdd = forward_dynamics(arm, q, qd, tau);
    rt = std::max(rt, (inverse_dynamics(arm, {q, qd, qdd}) - tau).lpNorm<Eigen::Infinity>());
    const auto dM = mass_matrix_partials(arm, q);
    Mat S = -2.0 * coriolis_matrix(arm, q, qd);
    for (int l = 0; l < 2; ++l) S += dM[l] * qd[l];
    skew = std::max(skew, (S + S.transpose()).lpNorm<Eigen::Infinity>());
  }
  ControlLaw zero = [](double, const Vec& q, const Vec&, std::span<const JointMode>) {
    return Vec::Zero(q.size());
  };
  JointState s0 = JointState::zero(2);
  s0.q << 0.3, 0.8;
  s0.qd << 1.0, -2.0;
  const auto tr = integrate(arm, zero, s0, {0.0, 2.0, 1e-4, {}});
  auto energy = [&](int k) {
    const Vec q = tr.q.row(k).transpose(), qd = tr.qd.row(k).transpose();
    return kinetic_energy(arm, q, qd) + potential_energy(arm, q);
  };
  double drift = 0.0;
  for (int k = 0; k < tr.size(); ++k) drift = std::max(drift, std::abs(energy(k) - energy(0)));
  drift /= std::abs(energy(0));
  report(7, rt < 1e-9 && drift < 1e-6 && skew < 1e-8,
         fmt("round-trip %.1e, energy drift %.1e (rel, 2 s), skew %.1e", rt, drift, skew));
}

OcpSpec rest_to_rest() {
  OcpSpec s;
  s.nodes = 41;
  s.goal = GoalBox::point(1.0, 0.0);
  s.weights = [](double) { return CostWeights{1.0, 0.0, 0.0}; };
  return s;
}

void criterion8() {
  const auto di = double_integrator(1.0);
  const auto base = solve_segment(rest_to_rest(), di, JointMode::Active);
  const double cost_err = std::abs(base.objective - 12.0) / 12.0;

  double slack = 0.0;
  for (double vmax : {1.3, 1.45}) {
    OcpSpec s = rest_to_rest();
    s.qd_max = vmax;
    slack = std::max(slack, solve_segment(s, di, JointMode::Active).slackness);
  }
  {
    OcpSpec s = rest_to_rest();
    s.tau_max = 4.0;
    s.tau_min = -4.0;
    slack = std::max(slack, solve_segment(s, di, JointMode::Active).slackness);
  }

  OcpSpec g = rest_to_rest();
  g.nodes = 31;
  g.qd_max = 1.4;
  g.power_hi = [](double) { return 0.8; };
  g.power_lo = [](double) { return -0.8; };
  g.power_class = {Criticality::LessCritical, 1.0};
  g.weights = [](double t) { return CostWeights{1.0, 0.5 * t, 0.1}; };
  TorqueModel bent = [](double, double q, double qd, double u) {
    return TorqueSample{(1.0 + 0.3 * std::cos(q)) * u + 0.2 * qd * qd + 2.0 * std::sin(q),
                        -0.3 * std::sin(q) * u + 2.0 * std::cos(q), 0.4 * qd, 1.0 + 0.3 * std::cos(q)};
  };
  const auto nlp = build_segment_nlp(g, bent);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  double grad_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vec x(nlp.problem.variables);
    for (int i = 0; i < x.size(); ++i) x[i] = ux(rng);
    Vec grad;
    nlp.problem.objective(x, &grad, nullptr);
    Vec fd(x.size());
    for (int i = 0; i < x.size(); ++i) {
      Vec a = x, b = x;
      a[i] += 1e-6;
      b[i] -= 1e-6;
      fd[i] = (nlp.problem.objective(a, nullptr, nullptr) - nlp.problem.objective(b, nullptr, nullptr)) / 2e-6;
    }
    grad_err = std::max(grad_err, (grad - fd).norm() / std::max(1.0, fd.norm()));
  }

  bool monotone = true;
  int instances = 0;
  for (double cap : {0.6, 0.9, 1.2, 2.0}) {
    OcpSpec s = rest_to_rest();
    s.nodes = 31;
    s.power_hi = [cap](double) { return cap; };
    s.power_lo = [cap](double) { return -cap; };
    s.power_class = {Criticality::LessCritical, 1.0};
    const auto v = solve_segment(s, di, JointMode::Active).violation_history;
    if (v.size() >= 2) ++instances;
    for (std::size_t k = 1; k < v.size(); ++k) monotone = monotone && v[k] <= v[k - 1];
  }
  report(8, cost_err < 0.01 && slack < 1e-6 && grad_err < 1e-4 && monotone && instances >= 3,
         fmt("rest-to-rest cost %.4f (err %.2f%%), slackness %.1e, gradient rel err %.1e, V monotone on %d "
             "continuation instances: %s",
             base.objective, 100 * cost_err, slack, grad_err, instances, monotone ? "yes" : "no"));
}

void criterion9() {
  const double B = 1.0, D = 0.5, K = 4.0;
  const auto tr = simulate_compliance(B, D, K, [](double) { return 1.0; }, 150.0, 1e-3);
  const double zeta = D / (2 * std::sqrt(K * B)), wd = std::sqrt(K / B) * std::sqrt(1 - zeta * zeta);
  const double tp_ref = std::numbers::pi / wd;
  const double os_ref = std::exp(-zeta * std::numbers::pi / std::sqrt(1 - zeta * zeta));
  const auto it = std::max_element(tr.deflection.begin(), tr.deflection.end());
  const auto k = static_cast<std::size_t>(it - tr.deflection.begin());
  const double a = tr.deflection[k - 1], b = *it, c = tr.deflection[k + 1];
  const double tp = tr.t[k] + 0.5 * (a - c) / (a - 2 * b + c) * 1e-3;
  const double os = (b - 1.0 / K) / (1.0 / K);
  const double e_tp = std::abs(tp - tp_ref) / tp_ref, e_os = std::abs(os - os_ref) / os_ref;

  const auto rows = compliance_sweep({});
  bool mono = rows.size() == 10;
  for (int i = 1; i < 5 && mono; ++i) mono = rows[i].trace.peak_deflection <= rows[i - 1].trace.peak_deflection;
  for (int i = 6; i < 10 && mono; ++i) mono = rows[i].trace.error_theta <= rows[i - 1].trace.error_theta;
  report(9, e_tp < 0.01 && e_os < 0.01 && mono,
         fmt("peak time err %.3f%%, overshoot err %.3f%%, K/D sweeps monotone: %s", 100 * e_tp, 100 * e_os,
             mono ? "yes" : "no"));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion10() {
  const auto root = fs::temp_directory_path() / ("hmp_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  bool ok = true;
  for (const char* d : {"a", "b"}) {
    const std::string cmd = std::string(HMP_CLI_PATH) + " plan --scenario throwing --seed 0 --out " +
                            (root / d).string() + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    ok = ok && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
  }
  const bool csv = ok && slurp(root / "a" / "trajectory.csv") == slurp(root / "b" / "trajectory.csv");
  const bool json = ok && slurp(root / "a" / "report.json") == slurp(root / "b" / "report.json");
  const auto bytes = ok ? fs::file_size(root / "a" / "trajectory.csv") : 0;
  fs::remove_all(root);
  report(10, ok && csv && json,
         fmt("two CLI plan runs: csv identical %s (%ju bytes), report identical %s", csv ? "yes" : "no",
             static_cast<std::uintmax_t>(bytes), json ? "yes" : "no"));
}

}  // namespace

int main() {
  try {
    const auto th = throwing_runs();
    criterion1(th);
    criterion2(th);
    const auto stand = optimize_T(standing_scenario());
    const auto sb = make_baselines(standing_scenario());
    criterion3(th, stand, sb);
    criterion4(stand, sb);
    criterion5(th);
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
  } catch (const std::exception& e) {
    std::printf("aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
