#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace hmp {

struct SimplexSettings {
  int budget = 100;          // objective evaluations
  double step = 0.3;         // initial edge length along each axis
  double tolerance = 1e-8;   // spread of values across the simplex
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  std::vector<double> best_so_far;  // after every evaluation
};

/// Nelder-Mead maximization (standard coefficients 1, 2, 1/2, 1/2).
/// Deterministic; equal values are ordered by the lexicographically
/// smaller point.
SimplexResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& x0, const SimplexSettings& s);

/// a before b when a has the larger value, or equal value and smaller point.
bool better(double fa, const Eigen::VectorXd& a, double fb, const Eigen::VectorXd& b);

}  // namespace hmp
