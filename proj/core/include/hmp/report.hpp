#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hmp/planner.hpp"

namespace hmp {

/// t, then theta, theta_dot, theta_ddot, tau per joint, then one mode
/// column with a letter per joint (A active, P passive, T transition).
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);

struct BaselineSummary {
  std::string name;
  bool available = false;
  std::string note;  // why it is missing, when it is
  double objective = 0.0;
  double score = 0.0;
  double peak_power = 0.0;
  bool feasible = false;
  std::optional<double> ratio;  // planner relative to this baseline, 1 = parity
};

BaselineSummary summarize_baseline(const std::string& name, const Scenario& sc,
                                   const Evaluation& baseline, const Evaluation& plan);
BaselineSummary summarize_oracle(const Scenario& sc, const OracleResult& oracle,
                                 const Evaluation& plan);

struct RunSummary {
  std::string command;
  std::string scenario;
  std::uint64_t seed = 0;
  int budget = 0;
  int evaluations = 0;
  std::vector<double> best_so_far;
  std::vector<BaselineSummary> baselines;
};

/// Structured-text summary: T*, decoded schedule, objective and score,
/// constraint diagnostics, baselines and the power curve. Contains no
/// timing information, so equal inputs give equal bytes.
std::string summary_json(const Scenario& sc, const Evaluation& plan, const RunSummary& run);

}  // namespace hmp
