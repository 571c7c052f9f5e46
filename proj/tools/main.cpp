// hmp: plan, evaluate, baseline and sweep from the command line.
#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hmp/compliance.hpp"
#include "hmp/config.hpp"
#include "hmp/errors.hpp"
#include "hmp/planner.hpp"
#include "hmp/report.hpp"
#include "hmp/scenarios.hpp"

namespace fs = std::filesystem;
using namespace hmp;

namespace {

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kInfeasible = 3 };

struct Options {
  std::string scenario = "throwing";
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> budget;
  std::string matrix;
  std::string format = "csv";
  bool no_oracle = false;
};

Scenario load(const Options& o) {
  Scenario sc = o.config.empty() ? builtin_scenario(o.scenario) : load_scenario_file(o.config);
  if (o.seed) sc.search.seed = *o.seed;
  if (o.budget) {
    if (*o.budget < 1) throw ConfigError("--budget must be at least 1");
    sc.search.budget = *o.budget;
  }
  sc.validate();
  return sc;
}

fs::path out_dir(const Options& o) {
  fs::path p(o.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory '" + o.out + "': " + ec.message());
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

void write_csv(const fs::path& p, const Trajectory& tr) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  write_trajectory_csv(f, tr);
}

RunSummary base_summary(const std::string& command, const Scenario& sc) {
  RunSummary r;
  r.command = command;
  r.scenario = sc.name;
  r.seed = sc.search.seed;
  return r;
}

void add_baselines(RunSummary& run, const Scenario& sc, const Evaluation& plan, bool oracle) {
  const Evaluation sync = evaluate_motion(synchronous_matrix(sc), sc);
  run.baselines.push_back(summarize_baseline("synchronous", sc, sync, plan));
  if (oracle) {
    run.baselines.push_back(summarize_oracle(sc, dense_oracle(sc), plan));
  } else {
    BaselineSummary b;
    b.name = "oracle";
    b.note = "skipped";
    run.baselines.push_back(b);
  }
}

int cmd_plan(const Options& o) {
  const Scenario sc = load(o);
  const auto dir = out_dir(o);
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult p;
  try {
    p = optimize_T(sc);
  } catch (const PlanningError& e) {
    std::cerr << "hmp: no feasible plan: " << e.what() << "\n";
    return kInfeasible;
  }
  RunSummary run = base_summary("plan", sc);
  run.budget = sc.search.budget;
  run.evaluations = p.trace.evaluations;
  run.best_so_far = p.trace.best_so_far;
  add_baselines(run, sc, p.plan, !o.no_oracle);
  write_csv(dir / "trajectory.csv", p.plan.trajectory);
  write_file(dir / "report.json", summary_json(sc, p.plan, run));
  std::cerr << "hmp: plan " << sc.name << " objective " << p.plan.objective << " after "
            << p.trace.evaluations << " evaluations ("
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s)\n";
  return p.plan.feasible ? kOk : kInfeasible;
}

int cmd_evaluate(const Options& o) {
  const Scenario sc = load(o);
  const ResponseTimeMatrix T = o.matrix.empty() ? sc.T : parse_matrix(o.matrix, sc.T);
  validate(T, sc.blend_width);  // schedule errors surface before any output
  const auto dir = out_dir(o);
  const Evaluation ev = evaluate_motion(T, sc);
  RunSummary run = base_summary("evaluate", sc);
  write_csv(dir / "trajectory.csv", ev.trajectory);
  write_file(dir / "report.json", summary_json(sc, ev, run));
  return ev.feasible ? kOk : kInfeasible;
}

int cmd_baseline(const Options& o) {
  const Scenario sc = load(o);
  const auto dir = out_dir(o);
  const Evaluation sync = evaluate_motion(synchronous_matrix(sc), sc);
  RunSummary run = base_summary("baseline", sc);
  write_csv(dir / "synchronous.csv", sync.trajectory);
  write_file(dir / "synchronous.json", summary_json(sc, sync, run));
  bool ok = sync.feasible;
  if (!o.no_oracle) {
    const OracleResult orc = dense_oracle(sc);
    RunSummary r2 = base_summary("baseline", sc);
    r2.baselines.push_back(summarize_baseline("synchronous", sc, sync, orc.plan));
    write_csv(dir / "oracle.csv", orc.plan.trajectory);
    write_file(dir / "oracle.json", summary_json(sc, orc.plan, r2));
    if (!orc.converged) std::cerr << "hmp: oracle did not converge: " << orc.message << "\n";
  }
  return ok ? kOk : kInfeasible;
}

int cmd_sweep(const Options& o) {
  const auto dir = out_dir(o);
  std::ofstream f(dir / "sweep.csv", std::ios::binary);
  if (!f) throw Error("cannot write sweep.csv");
  f << "parameter,value,peak_deflection,peak_rate,error_theta,error_rate\n";
  char buf[200];
  for (const auto& r : compliance_sweep({})) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.parameter.c_str(), r.value,
                  r.trace.peak_deflection, r.trace.peak_rate, r.trace.error_theta, r.trace.error_rate);
    f << buf;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-like multi-joint motion planner"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--scenario", o.scenario, "built-in scenario name")->capture_default_str();
    c->add_option("--config", o.config, "scenario JSON file (overrides --scenario)");
    c->add_option("--out", o.out, "output directory")->capture_default_str();
    c->add_option("--seed", o.seed, "search seed");
    c->add_option("--budget", o.budget, "evaluation budget");
    c->add_option("--format", o.format, "trajectory format")->check(CLI::IsMember({"csv"}))->capture_default_str();
  };
  auto* plan = app.add_subcommand("plan", "search the response time matrix and write the plan");
  common(plan);
  plan->add_flag("--no-oracle", o.no_oracle, "skip the dense-collocation baseline");
  auto* evaluate = app.add_subcommand("evaluate", "score one response time matrix");
  common(evaluate);
  evaluate->add_option("--matrix", o.matrix, "rows separated by ';', e.g. \"0.1 0.3 0.9; 0 0.2 0.9\"");
  auto* baseline = app.add_subcommand("baseline", "write the synchronous and oracle plans");
  common(baseline);
  baseline->add_flag("--no-oracle", o.no_oracle, "skip the dense-collocation baseline");
  auto* sweep = app.add_subcommand("sweep", "compliance stiffness/damping sweep table");
  sweep->add_option("--out", o.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*plan) return cmd_plan(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*baseline) return cmd_baseline(o);
    if (*sweep) return cmd_sweep(o);
  } catch (const ScheduleError& e) {
    std::cerr << "hmp: invalid response time matrix: " << e.what() << "\n";
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "hmp: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InputError& e) {
    std::cerr << "hmp: invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const ParameterError& e) {
    std::cerr << "hmp: invalid parameter: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "hmp: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
