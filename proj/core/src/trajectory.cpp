#include "hmp/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "hmp/errors.hpp"

namespace hmp {

Trajectory::Trajectory(std::vector<double> grid, int dof)
    : t(std::move(grid)),
      q(Mat::Zero(static_cast<Eigen::Index>(t.size()), dof)),
      qd(Mat::Zero(static_cast<Eigen::Index>(t.size()), dof)),
      qdd(Mat::Zero(static_cast<Eigen::Index>(t.size()), dof)),
      tau(Mat::Zero(static_cast<Eigen::Index>(t.size()), dof)),
      modes(t.size(), std::vector<JointMode>(dof, JointMode::Active)) {}

double Trajectory::derivative_mismatch() const {
  double worst = 0.0;
  for (int k = 0; k + 1 < size(); ++k) {
    const double h = t[k + 1] - t[k];
    for (int j = 0; j < dof(); ++j) {
      const double e = std::abs(q(k + 1, j) - q(k, j) - 0.5 * h * (qd(k, j) + qd(k + 1, j))) / h;
      worst = std::max(worst, e);
    }
  }
  return worst;
}

std::vector<double> build_time_grid(double t0, double tf, double dt, std::vector<double> events) {
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  if (!(tf > t0)) throw InputError("empty time span");
  for (double e : events) {
    if (!std::isfinite(e) || e < t0 || e > tf) throw InputError("event outside the time span");
  }
  events.push_back(t0);
  events.push_back(tf);
  std::sort(events.begin(), events.end());
  // Events from different sources can differ by rounding only; keep one.
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) { return b - a <= 1e-9; }),
               events.end());
  events.back() = tf;

  const double tol = 1e-6 * dt;
  const auto steps = static_cast<long>(std::floor((tf - t0) / dt + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + events.size() + 1);
  std::size_t e = 0;
  for (long k = 0; k <= steps; ++k) {
    const double u = t0 + static_cast<double>(k) * dt;
    while (e < events.size() && events[e] < u - tol) grid.push_back(events[e++]);
    if (e < events.size() && std::abs(events[e] - u) <= tol) {
      grid.push_back(events[e++]);
      continue;
    }
    if (u < tf) grid.push_back(u);
  }
  while (e < events.size()) grid.push_back(events[e++]);
  return grid;
}

}  // namespace hmp
