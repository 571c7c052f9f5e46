#include "hmp/scenarios.hpp"

#include <cmath>
#include <numbers>

#include "hmp/errors.hpp"

namespace hmp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double deg(double d) { return d * kPi / 180.0; }

Link rod(double length, double mass) {
  return {length, mass, 0.5 * length, mass * length * length / 12.0};
}

ResponseTimeMatrix matrix(std::initializer_list<std::initializer_list<double>> rows,
                          std::vector<JointMode> modes) {
  ResponseTimeMatrix T;
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  T.times.resize(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) T.times(i, j++) = v;
    ++i;
  }
  T.initial_mode = std::move(modes);
  return T;
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

Scenario throwing_scenario() {
  Scenario s;
  s.name = "throwing";
  s.model.links = {rod(0.6, 2.0), rod(0.3, 1.0)};
  JointLimits shoulder;
  shoulder.theta_min = -kPi;
  shoulder.theta_max = kPi;
  shoulder.tau_min = -20.0;
  shoulder.tau_max = 20.0;
  shoulder.power_min = -350.0;
  shoulder.power_max = 350.0;
  shoulder.velocity_max = 3.14;
  JointLimits wrist = shoulder;
  wrist.tau_min = -5.0;
  wrist.tau_max = 5.0;
  // Ranges of motion keep both joints throwing forward.
  shoulder.theta_min = -deg(100);
  wrist.theta_min = -0.2;
  s.model.limits = {shoulder, wrist};
  s.model.system_power = 350.0;
  s.initial = JointState::zero(2);
  s.initial.q = vec({-deg(90), 0.0});
  s.T = matrix({{0.05, 0.25, 0.30}, {0.05, 0.25, 0.30}}, {JointMode::Passive, JointMode::Passive});
  s.constraints.power = {Criticality::Critical, 100.0};
  s.objective = TaskObjective::ThrowRange;
  s.compliance = {vec({1.0, 1.0}), vec({0.5, 0.5}), vec({0.0, 0.0})};
  s.goals = {GoalBox{}, GoalBox{}};
  s.accel_max = 100.0;
  s.initial_control = vec({5.0, 5.0});
  s.nodes = 30;
  s.search.nodes = 16;
  return s;
}

Scenario standing_scenario() {
  Scenario s;
  s.name = "standing";
  s.model.links = {rod(0.9, 20.0), rod(0.45, 25.0), rod(0.5, 35.0)};
  JointLimits leg;
  leg.theta_min = -kPi;
  leg.theta_max = kPi;
  leg.tau_min = -800.0;  // 800 N through a unit moment arm
  leg.tau_max = 800.0;
  leg.power_min = -2000.0;
  leg.power_max = 2000.0;
  leg.velocity_max = 3.14;
  JointLimits hip = leg;
  hip.tau_min = -200.0;
  hip.tau_max = 200.0;
  JointLimits waist = hip;
  s.model.limits = {leg, hip, waist};
  s.model.system_power = 105.0;
  s.initial = JointState::zero(3);
  s.initial.q = vec({deg(70), deg(60), -deg(40)});
  const double eps = std::min(1e-3, s.dt);
  s.T = matrix({{0.6, 0.0, 3.0}, {eps, 0.0, 3.0}, {0.0, 0.0, 3.0}},
               {JointMode::Passive, JointMode::Passive, JointMode::Passive});
  s.weights.active = {1.0, 0.0, 0.0};
  s.constraints.power = {Criticality::LessCritical, 100.0};
  s.objective = TaskObjective::TerminalTimeTorque;
  s.time_weight = 100.0;
  s.torque_weight = 1e-3;
  s.compliance = {vec({10.0, 10.0, 10.0}), vec({400.0, 400.0, 400.0}), vec({2000.0, 2000.0, 2000.0})};
  s.goals = {GoalBox::point(deg(90), 0.0), GoalBox::point(0.0, 0.0), GoalBox{}};
  s.accel_max = 50.0;
  s.initial_control = vec({0.0, 0.0, 0.0});
  s.nodes = 40;
  s.search.nodes = 20;
  s.search.dt = 1e-2;
  return s;
}

std::vector<Scenario> toy_scenarios() {
  std::vector<Scenario> out;
  ChainModel free_joint;
  free_joint.links = {Link{1.0, 1.0, 0.0, 1.0}};  // unit inertia about the joint
  JointLimits open;
  open.theta_min = -10.0;
  open.theta_max = 10.0;
  open.tau_min = -1e3;
  open.tau_max = 1e3;
  open.power_min = -1e4;
  open.power_max = 1e4;
  open.velocity_max = 100.0;
  free_joint.limits = {open};
  free_joint.gravity = 0.0;
  free_joint.system_power = 1e4;

  {
    Scenario s;
    s.name = "rest_to_rest";
    s.model = free_joint;
    s.initial = JointState::zero(1);
    s.T = matrix({{1e-3, 1.0}}, {JointMode::Passive});
    s.T.times(0, 0) = 0.0;  // active throughout
    s.T.initial_mode = {JointMode::Active};
    s.weights.active = {1.0, 0.0, 0.0};
    s.objective = TaskObjective::TerminalTimeTorque;
    s.time_weight = 0.0;
    s.torque_weight = 1.0;
    s.compliance = {vec({1.0}), vec({0.0}), vec({0.0})};
    s.goals = {GoalBox::point(1.0, 0.0)};
    s.blend_width = 0.0;
    s.initial_control = vec({0.0});
    s.nodes = 41;
    out.push_back(s);
  }
  {
    Scenario s = out.front();
    s.name = "single_switch";
    s.initial.qd = vec({1.0});
    s.T = matrix({{0.3, 1.0}}, {JointMode::Passive});
    // The velocity reward makes long active phases wasteful and short ones
    // expensive, so the best switch time is interior.
    s.weights.active = {1.0, 4.0, 0.0};
    s.compliance = {vec({1.0}), vec({0.5}), vec({0.0})};
    s.goals = {GoalBox::point(0.6, 0.0)};
    s.search.restarts = 2;
    s.search.budget = 60;
    s.search.dt = 2e-3;
    s.search.nodes = 41;
    out.push_back(s);
  }
  {
    Scenario s;
    s.name = "free_pair";
    s.model.links = {rod(1.0, 1.0), rod(1.0, 1.0)};
    s.model.limits = {open, open};
    s.model.gravity = 0.0;
    s.model.system_power = 1e4;
    s.initial = JointState::zero(2);
    s.T = matrix({{0.0, 1.0}, {0.0, 1.0}}, {JointMode::Passive, JointMode::Passive});
    s.compliance = {vec({1.0, 1.0}), vec({1.0, 1.0}), vec({1.0, 1.0})};
    s.goals = {GoalBox{}, GoalBox{}};
    s.initial_control = vec({0.0, 0.0});
    out.push_back(s);
  }
  return out;
}

std::vector<std::string> builtin_names() {
  return {"throwing", "standing", "rest_to_rest", "single_switch", "free_pair"};
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "throwing") return throwing_scenario();
  if (name == "standing") return standing_scenario();
  for (auto& s : toy_scenarios())
    if (s.name == name) return s;
  throw ConfigError("unknown built-in scenario '" + name + "'");
}

ResponseTimeMatrix example_matrix() {
  return matrix({{0.1, 0.3, 0.9}, {0.0, 0.2, 0.9}}, {JointMode::Passive, JointMode::Passive});
}

}  // namespace hmp
