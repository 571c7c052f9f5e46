#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hmp/modes.hpp"

namespace hmp {

/// Per-joint transition instants. Row i lists the times at which joint i
/// toggles between Active and Passive; a zero entry means "no change in
/// this slot". The largest entry is the horizon t_f.
struct ResponseTimeMatrix {
  Eigen::MatrixXd times;                // (N, M)
  std::vector<JointMode> initial_mode;  // Active or Passive per joint

  int joints() const noexcept { return static_cast<int>(times.rows()); }
  int columns() const noexcept { return static_cast<int>(times.cols()); }
  double horizon() const;
  /// Nonzero entries of row i in column order.
  std::vector<double> switches(int joint) const;
};

struct ModeInterval {
  double begin = 0.0;
  double end = 0.0;
  JointMode mode = JointMode::Passive;
  // Transition intervals only: modes on either side and the unclipped
  // blend window used for weight interpolation.
  JointMode from = JointMode::Passive;
  JointMode to = JointMode::Passive;
  double blend_begin = 0.0;
  double blend_end = 0.0;

  /// Blend fraction in [0, 1] at time t (Transition intervals).
  double blend_fraction(double t) const;
};

/// Decoded timeline: for every joint an ordered partition of [0, t_f).
struct ModeSchedule {
  std::vector<std::vector<ModeInterval>> joints;
  double horizon = 0.0;
  double blend_width = 0.0;

  int size() const noexcept { return static_cast<int>(joints.size()); }
  /// Interval containing t (right-open convention).
  const ModeInterval& interval_at(int joint, double t) const;
  /// Every instant at which some joint changes mode, sorted and unique.
  std::vector<double> change_points() const;
};

constexpr double kDefaultBlendWidth = 0.05;

/// Decodes T. Throws InputError on negative/non-finite entries and
/// ScheduleError when a row's nonzero entries are not strictly increasing.
ModeSchedule validate(const ResponseTimeMatrix& T, double blend_width = kDefaultBlendWidth);

/// Mode of joint at time t; RangeError outside [0, t_f).
JointMode mode_at(const ModeSchedule& schedule, int joint, double t);

/// Nonzero pattern of a matrix; the unconstrained encoding maps one real
/// per nonzero entry.
struct SwitchPattern {
  std::vector<std::vector<int>> columns;  // per row, columns holding nonzeros
  int rows = 0;
  int cols = 0;

  static SwitchPattern of(const ResponseTimeMatrix& T);
  int parameters() const;
};

/// Row entries are cumulative sums of exp(z); strictly increasing for any z.
ResponseTimeMatrix parameterize(const Eigen::VectorXd& z, const SwitchPattern& pattern,
                                const std::vector<JointMode>& initial_mode);
Eigen::VectorXd unparameterize(const ResponseTimeMatrix& T);

}  // namespace hmp
