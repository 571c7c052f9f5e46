#include "hmp/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hmp/errors.hpp"
#include "hmp/scenarios.hpp"

namespace hmp {
namespace {

using nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw ConfigError(path + ": " + why);
}

// Unbounded values are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_num(const json& j, const std::string& path, double if_null) {
  if (j.is_null()) return if_null;
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

template <class F>
void with(const json& obj, const char* key, const std::string& path, F&& f) {
  if (!obj.contains(key)) return;
  f(obj.at(key), path + "." + key);
}

void read(const json& obj, const char* key, const std::string& path, double& v, double if_null = kInf) {
  with(obj, key, path, [&](const json& j, const std::string& p) { v = get_num(j, p, if_null); });
}
void read(const json& obj, const char* key, const std::string& path, int& v) {
  with(obj, key, path, [&](const json& j, const std::string& p) {
    if (!j.is_number_integer()) bad(p, "expected an integer");
    v = j.get<int>();
  });
}

Vec read_vec(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = get_num(j[i], path + "[" + std::to_string(i) + "]", kInf);
  return v;
}
json write_vec(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

JointMode read_mode(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected \"active\" or \"passive\"");
  const auto s = j.get<std::string>();
  if (s == "active") return JointMode::Active;
  if (s == "passive") return JointMode::Passive;
  bad(path, "unknown mode '" + s + "'");
}

Criticality read_criticality(const json& j, const std::string& path) {
  const auto s = j.is_string() ? j.get<std::string>() : std::string();
  if (s == "critical") return Criticality::Critical;
  if (s == "less_critical") return Criticality::LessCritical;
  bad(path, "expected \"critical\" or \"less_critical\"");
}

void read_weights(const json& j, const std::string& path, CostWeights& w) {
  if (!j.is_object()) bad(path, "expected an object");
  read(j, "k_u", path, w.k_u);
  read(j, "k_v", path, w.k_v);
  read(j, "k_a", path, w.k_a);
}
json write_weights(const CostWeights& w) { return {{"k_u", w.k_u}, {"k_v", w.k_v}, {"k_a", w.k_a}}; }

void read_class(const json& j, const std::string& path, ConstraintClass& c) {
  if (!j.is_object()) bad(path, "expected an object");
  with(j, "criticality", path, [&](const json& v, const std::string& p) { c.criticality = read_criticality(v, p); });
  read(j, "gain", path, c.gain);
}
json write_class(const ConstraintClass& c) {
  return {{"criticality", c.criticality == Criticality::Critical ? "critical" : "less_critical"}, {"gain", c.gain}};
}

void apply_overrides(const json& d, Scenario& s) {
  const std::string root = "$";
  if (!d.is_object()) bad(root, "expected an object");
  static const char* known[] = {"base", "name", "model", "initial", "schedule", "weights", "constraints",
                                "objective", "compliance", "goals", "integrator", "ocp", "search"};
  for (const auto& [k, v] : d.items()) {
    bool ok = false;
    for (const char* n : known) ok = ok || k == n;
    if (!ok) bad(root + "." + k, "unknown key");
  }
  with(d, "name", root, [&](const json& j, const std::string& p) {
    if (!j.is_string()) bad(p, "expected a string");
    s.name = j.get<std::string>();
  });
  with(d, "model", root, [&](const json& m, const std::string& p) {
    read(m, "gravity", p, s.model.gravity);
    read(m, "system_power", p, s.model.system_power);
    with(m, "links", p, [&](const json& a, const std::string& pp) {
      if (!a.is_array()) bad(pp, "expected an array");
      s.model.links.assign(a.size(), Link{});
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string pi = pp + "[" + std::to_string(i) + "]";
        auto& L = s.model.links[i];
        read(a[i], "length", pi, L.length);
        read(a[i], "mass", pi, L.mass);
        read(a[i], "com", pi, L.com);
        read(a[i], "inertia", pi, L.inertia);
      }
    });
    with(m, "limits", p, [&](const json& a, const std::string& pp) {
      if (!a.is_array()) bad(pp, "expected an array");
      s.model.limits.assign(a.size(), JointLimits{});
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string pi = pp + "[" + std::to_string(i) + "]";
        auto& L = s.model.limits[i];
        read(a[i], "theta_min", pi, L.theta_min, -kInf);
        read(a[i], "theta_max", pi, L.theta_max);
        read(a[i], "tau_min", pi, L.tau_min, -kInf);
        read(a[i], "tau_max", pi, L.tau_max);
        read(a[i], "power_min", pi, L.power_min, -kInf);
        read(a[i], "power_max", pi, L.power_max);
        read(a[i], "velocity_max", pi, L.velocity_max);
      }
    });
  });
  with(d, "initial", root, [&](const json& j, const std::string& p) {
    with(j, "q", p, [&](const json& v, const std::string& pp) { s.initial.q = read_vec(v, pp); });
    with(j, "qd", p, [&](const json& v, const std::string& pp) { s.initial.qd = read_vec(v, pp); });
    s.initial.qdd = Vec::Zero(s.initial.q.size());
  });
  with(d, "schedule", root, [&](const json& j, const std::string& p) {
    with(j, "times", p, [&](const json& a, const std::string& pp) {
      if (!a.is_array() || a.empty() || !a[0].is_array()) bad(pp, "expected an array of rows");
      const auto cols = a[0].size();
      s.T.times.resize(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(cols));
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_array() || a[i].size() != cols) bad(pp + "[" + std::to_string(i) + "]", "rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c)
          s.T.times(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
              get_num(a[i][c], pp + "[" + std::to_string(i) + "][" + std::to_string(c) + "]", 0.0);
      }
    });
    with(j, "initial_mode", p, [&](const json& a, const std::string& pp) {
      if (!a.is_array()) bad(pp, "expected an array");
      s.T.initial_mode.clear();
      for (std::size_t i = 0; i < a.size(); ++i) s.T.initial_mode.push_back(read_mode(a[i], pp + "[" + std::to_string(i) + "]"));
    });
  });
  with(d, "weights", root, [&](const json& j, const std::string& p) {
    with(j, "active", p, [&](const json& v, const std::string& pp) { read_weights(v, pp, s.weights.active); });
    with(j, "passive", p, [&](const json& v, const std::string& pp) { read_weights(v, pp, s.weights.passive); });
  });
  with(d, "constraints", root, [&](const json& j, const std::string& p) {
    with(j, "angle", p, [&](const json& v, const std::string& pp) { read_class(v, pp, s.constraints.angle); });
    with(j, "velocity", p, [&](const json& v, const std::string& pp) { read_class(v, pp, s.constraints.velocity); });
    with(j, "torque", p, [&](const json& v, const std::string& pp) { read_class(v, pp, s.constraints.torque); });
    with(j, "power", p, [&](const json& v, const std::string& pp) { read_class(v, pp, s.constraints.power); });
    with(j, "goal", p, [&](const json& v, const std::string& pp) { read_class(v, pp, s.constraints.goal); });
  });
  with(d, "objective", root, [&](const json& j, const std::string& p) {
    with(j, "type", p, [&](const json& v, const std::string& pp) {
      const auto t = v.is_string() ? v.get<std::string>() : std::string();
      if (t == "throw_range") s.objective = TaskObjective::ThrowRange;
      else if (t == "terminal_time_torque") s.objective = TaskObjective::TerminalTimeTorque;
      else bad(pp, "expected \"throw_range\" or \"terminal_time_torque\"");
    });
    read(j, "time_weight", p, s.time_weight);
    read(j, "torque_weight", p, s.torque_weight);
  });
  with(d, "compliance", root, [&](const json& j, const std::string& p) {
    with(j, "inertia", p, [&](const json& v, const std::string& pp) { s.compliance.inertia = read_vec(v, pp); });
    with(j, "damping", p, [&](const json& v, const std::string& pp) { s.compliance.damping = read_vec(v, pp); });
    with(j, "stiffness", p, [&](const json& v, const std::string& pp) { s.compliance.stiffness = read_vec(v, pp); });
  });
  with(d, "goals", root, [&](const json& a, const std::string& p) {
    if (!a.is_array()) bad(p, "expected an array");
    s.goals.assign(a.size(), GoalBox{});
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string pi = p + "[" + std::to_string(i) + "]";
      if (a[i].is_null()) continue;
      auto& g = s.goals[i];
      read(a[i], "q_lo", pi, g.q_lo, -kInf);
      read(a[i], "q_hi", pi, g.q_hi);
      read(a[i], "qd_lo", pi, g.qd_lo, -kInf);
      read(a[i], "qd_hi", pi, g.qd_hi);
    }
  });
  with(d, "integrator", root, [&](const json& j, const std::string& p) {
    read(j, "dt", p, s.dt);
    read(j, "blend_width", p, s.blend_width);
  });
  with(d, "ocp", root, [&](const json& j, const std::string& p) {
    read(j, "nodes", p, s.nodes);
    read(j, "accel_max", p, s.accel_max);
    read(j, "margin", p, s.margin);
    read(j, "sweeps", p, s.sweeps);
    with(j, "initial_control", p, [&](const json& v, const std::string& pp) { s.initial_control = read_vec(v, pp); });
  });
  with(d, "search", root, [&](const json& j, const std::string& p) {
    read(j, "budget", p, s.search.budget);
    read(j, "restarts", p, s.search.restarts);
    read(j, "jitter", p, s.search.jitter);
    read(j, "step", p, s.search.step);
    read(j, "dt", p, s.search.dt);
    read(j, "nodes", p, s.search.nodes);
    with(j, "seed", p, [&](const json& v, const std::string& pp) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) bad(pp, "expected a non-negative integer");
      s.search.seed = v.get<std::uint64_t>();
    });
  });
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json d;
  try {
    d = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  Scenario s;
  if (d.is_object() && d.contains("base")) {
    if (!d["base"].is_string()) bad("$.base", "expected a built-in scenario name");
    s = builtin_scenario(d["base"].get<std::string>());
  }
  try {
    apply_overrides(d, s);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid value: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const Scenario& s) {
  json d;
  d["name"] = s.name;
  json links = json::array(), limits = json::array();
  for (const auto& L : s.model.links)
    links.push_back({{"length", L.length}, {"mass", L.mass}, {"com", L.com}, {"inertia", L.inertia}});
  for (const auto& L : s.model.limits)
    limits.push_back({{"theta_min", num(L.theta_min)}, {"theta_max", num(L.theta_max)},
                      {"tau_min", num(L.tau_min)}, {"tau_max", num(L.tau_max)},
                      {"power_min", num(L.power_min)}, {"power_max", num(L.power_max)},
                      {"velocity_max", num(L.velocity_max)}});
  d["model"] = {{"gravity", s.model.gravity}, {"system_power", num(s.model.system_power)}, {"links", links}, {"limits", limits}};
  d["initial"] = {{"q", write_vec(s.initial.q)}, {"qd", write_vec(s.initial.qd)}};
  json rows = json::array();
  for (int i = 0; i < s.T.joints(); ++i) {
    json r = json::array();
    for (int c = 0; c < s.T.columns(); ++c) r.push_back(s.T.times(i, c));
    rows.push_back(r);
  }
  json modes = json::array();
  for (JointMode m : s.T.initial_mode) modes.push_back(to_string(m));
  d["schedule"] = {{"times", rows}, {"initial_mode", modes}};
  d["weights"] = {{"active", write_weights(s.weights.active)}, {"passive", write_weights(s.weights.passive)}};
  d["constraints"] = {{"angle", write_class(s.constraints.angle)}, {"velocity", write_class(s.constraints.velocity)},
                      {"torque", write_class(s.constraints.torque)}, {"power", write_class(s.constraints.power)},
                      {"goal", write_class(s.constraints.goal)}};
  d["objective"] = {{"type", to_string(s.objective)}, {"time_weight", s.time_weight}, {"torque_weight", s.torque_weight}};
  d["compliance"] = {{"inertia", write_vec(s.compliance.inertia)}, {"damping", write_vec(s.compliance.damping)},
                     {"stiffness", write_vec(s.compliance.stiffness)}};
  json goals = json::array();
  for (const auto& g : s.goals)
    goals.push_back({{"q_lo", num(g.q_lo)}, {"q_hi", num(g.q_hi)}, {"qd_lo", num(g.qd_lo)}, {"qd_hi", num(g.qd_hi)}});
  d["goals"] = goals;
  d["integrator"] = {{"dt", s.dt}, {"blend_width", s.blend_width}};
  d["ocp"] = {{"nodes", s.nodes}, {"accel_max", s.accel_max}, {"margin", s.margin}, {"sweeps", s.sweeps},
              {"initial_control", write_vec(s.initial_control)}};
  d["search"] = {{"budget", s.search.budget}, {"restarts", s.search.restarts}, {"jitter", s.search.jitter},
                 {"step", s.search.step}, {"seed", s.search.seed}, {"dt", s.search.dt}, {"nodes", s.search.nodes}};
  return d.dump(2);
}

ResponseTimeMatrix parse_matrix(const std::string& text, const ResponseTimeMatrix& like) {
  std::vector<std::vector<double>> rows(1);
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError("matrix entry '" + tok + "' is not a number");
    rows.back().push_back(v);
    tok.clear();
  };
  for (char c : text) {
    if (c == ';') {
      flush();
      rows.emplace_back();
    } else if (c == ' ' || c == ',' || c == '\t' || c == '[' || c == ']') {
      flush();
    } else {
      tok += c;
    }
  }
  flush();
  if (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw ConfigError("empty matrix");
  ResponseTimeMatrix T;
  T.times.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("matrix rows must have equal length");
    for (std::size_t c = 0; c < rows[i].size(); ++c)
      T.times(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  }
  if (T.joints() != like.joints()) {
    throw ConfigError("matrix has " + std::to_string(T.joints()) + " rows, scenario has " +
                      std::to_string(like.joints()) + " joints");
  }
  T.initial_mode = like.initial_mode;
  return T;
}

}  // namespace hmp
