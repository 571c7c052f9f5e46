#include "hmp/report.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

namespace hmp {
namespace {

using nlohmann::json;

// Fixed precision so that CSV bytes do not depend on stream state.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

char letter(JointMode m) {
  switch (m) {
    case JointMode::Active:
      return 'A';
    case JointMode::Passive:
      return 'P';
    case JointMode::Transition:
      return 'T';
  }
  return '?';
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json baseline_json(const BaselineSummary& b) {
  json j{{"name", b.name}, {"available", b.available}};
  if (!b.note.empty()) j["note"] = b.note;
  if (b.available) {
    j["objective"] = b.objective;
    j["score"] = finite_or_null(b.score);
    j["peak_power"] = b.peak_power;
    j["feasible"] = b.feasible;
  }
  j["ratio"] = b.ratio ? json(*b.ratio) : json(nullptr);
  return j;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  const int n = tr.dof();
  out << "t";
  for (int j = 1; j <= n; ++j) {
    const std::string s = std::to_string(j);
    out << ",theta_" << s << ",theta_dot_" << s << ",theta_ddot_" << s << ",tau_" << s;
  }
  out << ",mode\n";
  for (int k = 0; k < tr.size(); ++k) {
    out << fmt(tr.t[static_cast<std::size_t>(k)]);
    for (int j = 0; j < n; ++j)
      out << ',' << fmt(tr.q(k, j)) << ',' << fmt(tr.qd(k, j)) << ',' << fmt(tr.qdd(k, j)) << ','
          << fmt(tr.tau(k, j));
    out << ',';
    if (static_cast<std::size_t>(k) < tr.modes.size())
      for (JointMode m : tr.modes[static_cast<std::size_t>(k)]) out << letter(m);
    out << '\n';
  }
}

BaselineSummary summarize_baseline(const std::string& name, const Scenario& sc,
                                   const Evaluation& baseline, const Evaluation& plan) {
  BaselineSummary b;
  b.name = name;
  b.available = true;
  b.objective = baseline.objective;
  b.score = baseline.score;
  b.peak_power = baseline.peak_power;
  b.feasible = baseline.feasible;
  const double jp = plan.objective, jb = baseline.objective;
  if (sc.objective == TaskObjective::ThrowRange) {
    if (jb > 0.0) b.ratio = jp / jb;
  } else if (jp < 0.0) {
    b.ratio = jb / jp;
  }
  return b;
}

BaselineSummary summarize_oracle(const Scenario& sc, const OracleResult& oracle, const Evaluation& plan) {
  BaselineSummary b = summarize_baseline("oracle", sc, oracle.plan, plan);
  b.ratio = oracle_ratio(sc, plan, oracle);
  if (!oracle.converged) {
    b.available = false;
    b.note = oracle.message.empty() ? "oracle did not converge" : oracle.message;
  }
  return b;
}

std::string summary_json(const Scenario& sc, const Evaluation& plan, const RunSummary& run) {
  json d;
  d["command"] = run.command;
  d["scenario"] = run.scenario;
  d["objective_type"] = to_string(sc.objective);
  d["seed"] = run.seed;
  if (run.budget > 0) d["budget"] = run.budget;
  if (run.evaluations > 0) d["evaluations"] = run.evaluations;

  json rows = json::array();
  for (int i = 0; i < plan.T.joints(); ++i) {
    json r = json::array();
    for (int c = 0; c < plan.T.columns(); ++c) r.push_back(plan.T.times(i, c));
    rows.push_back(r);
  }
  json init = json::array();
  for (JointMode m : plan.T.initial_mode) init.push_back(to_string(m));
  d["T"] = {{"times", rows}, {"initial_mode", init}, {"horizon", plan.schedule.horizon}};

  json sched = json::array();
  for (int j = 0; j < plan.schedule.size(); ++j) {
    json iv = json::array();
    for (const auto& m : plan.schedule.joints[static_cast<std::size_t>(j)])
      iv.push_back({{"begin", m.begin}, {"end", m.end}, {"mode", to_string(m.mode)}});
    json first_active = nullptr;
    for (const auto& m : plan.schedule.joints[static_cast<std::size_t>(j)])
      if (m.mode == JointMode::Active) {
        first_active = m.begin;
        break;
      }
    sched.push_back({{"joint", j}, {"first_active", first_active}, {"intervals", iv}});
  }
  d["schedule"] = sched;

  d["objective"] = plan.objective;
  d["score"] = plan.score;
  d["feasible"] = plan.feasible;
  d["violation"] = plan.violation;
  d["penalty"] = plan.penalty;
  d["peak_power"] = plan.peak_power;
  d["torque_integral"] = plan.torque_integral;
  if (plan.release) {
    const auto& r = *plan.release;
    d["release"] = {{"speed", r.speed}, {"angle", r.angle}, {"height", r.height},
                    {"flight_time", r.flight_time}, {"range", r.range}, {"feasible", r.feasible}};
  }

  int failed = 0, nonconv = 0, nonconvex = 0;
  double defect = 0.0, stat = 0.0, slack = 0.0;
  for (const auto& s : plan.segments) {
    failed += s.ok ? 0 : 1;
    if (!s.driven) continue;
    nonconv += s.converged ? 0 : 1;
    nonconvex += s.convex ? 0 : 1;
    defect = std::max(defect, s.defect);
    stat = std::max(stat, s.stationarity);
    slack = std::max(slack, s.slackness);
  }
  json messages = json::array();
  for (const auto& s : plan.segments)
    if (!s.message.empty())
      messages.push_back({{"joint", s.joint}, {"sweep", s.sweep}, {"begin", s.begin}, {"message", s.message}});
  d["diagnostics"] = {{"segments", plan.segments.size()}, {"failed_segments", failed},
                      {"unconverged_segments", nonconv}, {"nonconvex_segments", nonconvex},
                      {"max_defect", defect}, {"max_stationarity", stat},
                      {"max_slackness", slack}, {"messages", messages}};

  json bl = json::array();
  for (const auto& b : run.baselines) bl.push_back(baseline_json(b));
  d["baselines"] = bl;
  if (!run.best_so_far.empty()) d["search_trace"] = run.best_so_far;

  json t = json::array(), p = json::array();
  const auto& tr = plan.trajectory;
  for (int k = 0; k < tr.size() && static_cast<std::size_t>(k) < plan.power.size(); ++k) {
    t.push_back(tr.t[static_cast<std::size_t>(k)]);
    p.push_back(plan.power[static_cast<std::size_t>(k)]);
  }
  d["power_curve"] = {{"t", t}, {"power", p}, {"cap", finite_or_null(sc.model.system_power)}};
  return d.dump(2) + "\n";
}

}  // namespace hmp
