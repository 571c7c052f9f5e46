#pragma once

#include <vector>

#include "hmp/dynamics.hpp"
#include "hmp/modes.hpp"

namespace hmp {

/// Time-gridded joint motion. Row k of each matrix is the sample at t[k].
struct Trajectory {
  std::vector<double> t;
  Mat q;    // (K, N)
  Mat qd;
  Mat qdd;
  Mat tau;
  std::vector<std::vector<JointMode>> modes;  // [k][joint]

  Trajectory() = default;
  Trajectory(std::vector<double> grid, int dof);

  int size() const noexcept { return static_cast<int>(t.size()); }
  int dof() const noexcept { return static_cast<int>(q.cols()); }

  JointState state(int k) const {
    return {q.row(k).transpose(), qd.row(k).transpose(), qdd.row(k).transpose()};
  }
  /// Largest |qd - trapezoid-consistent derivative| over all steps, i.e.
  /// max_k |q[k+1] - q[k] - h/2 (qd[k] + qd[k+1])| / h.
  double derivative_mismatch() const;
};

/// Uniform grid on [t0, tf] with step dt, merged with the event instants.
/// Events are inserted verbatim; uniform points closer than 1e-6 dt to an
/// event are dropped so that every event appears exactly once.
std::vector<double> build_time_grid(double t0, double tf, double dt,
                                    std::vector<double> events);

}  // namespace hmp
