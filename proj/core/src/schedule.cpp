#include "hmp/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hmp/errors.hpp"

namespace hmp {
namespace {

JointMode toggled(JointMode m) {
  return m == JointMode::Active ? JointMode::Passive : JointMode::Active;
}

struct Window {
  double begin, end;  // unclipped
};

}  // namespace

double ResponseTimeMatrix::horizon() const {
  if (times.size() == 0) return 0.0;
  return times.maxCoeff();
}

std::vector<double> ResponseTimeMatrix::switches(int joint) const {
  std::vector<double> out;
  for (int c = 0; c < columns(); ++c)
    if (times(joint, c) != 0.0) out.push_back(times(joint, c));
  return out;
}

double ModeInterval::blend_fraction(double t) const {
  if (mode != JointMode::Transition || blend_end <= blend_begin) return 0.0;
  return std::clamp((t - blend_begin) / (blend_end - blend_begin), 0.0, 1.0);
}

const ModeInterval& ModeSchedule::interval_at(int joint, double t) const {
  if (joint < 0 || joint >= size()) throw RangeError("joint index out of range");
  if (!(t >= 0.0 && t < horizon)) {
    throw RangeError("time " + std::to_string(t) + " outside [0, " + std::to_string(horizon) + ")");
  }
  const auto& iv = joints[joint];
  auto it = std::upper_bound(iv.begin(), iv.end(), t,
                             [](double v, const ModeInterval& m) { return v < m.end; });
  return *it;
}

std::vector<double> ModeSchedule::change_points() const {
  std::vector<double> pts;
  for (const auto& iv : joints)
    for (std::size_t i = 1; i < iv.size(); ++i) pts.push_back(iv[i].begin);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

ModeSchedule validate(const ResponseTimeMatrix& T, double blend_width) {
  if (T.times.size() == 0) throw InputError("response time matrix is empty");
  if (static_cast<int>(T.initial_mode.size()) != T.joints()) {
    throw InputError("one initial mode per joint required");
  }
  if (!(blend_width >= 0.0)) throw InputError("blend width must be non-negative");
  for (int i = 0; i < T.joints(); ++i) {
    if (T.initial_mode[i] == JointMode::Transition) {
      throw InputError("initial mode must be active or passive");
    }
    double prev = 0.0;
    int prev_col = -1;
    for (int c = 0; c < T.columns(); ++c) {
      const double v = T.times(i, c);
      if (!std::isfinite(v) || v < 0.0) {
        throw InputError("entry (" + std::to_string(i) + ", " + std::to_string(c) +
                         ") is negative or non-finite");
      }
      if (v == 0.0) continue;
      if (prev_col >= 0 && !(v > prev)) {
        throw ScheduleError("joint " + std::to_string(i) + ": column " + std::to_string(c) +
                                " is not later than column " + std::to_string(prev_col),
                            i, c);
      }
      prev = v;
      prev_col = c;
    }
  }

  ModeSchedule out;
  out.horizon = T.horizon();
  out.blend_width = blend_width;
  if (!(out.horizon > 0.0)) throw InputError("response time matrix has no positive entry");
  const double tf = out.horizon;

  for (int i = 0; i < T.joints(); ++i) {
    // Switches at the horizon take effect after the plan ends.
    std::vector<double> sw;
    for (double s : T.switches(i))
      if (s < tf) sw.push_back(s);

    // Base Active/Passive timeline.
    std::vector<ModeInterval> base;
    JointMode m = T.initial_mode[i];
    double start = 0.0;
    for (double s : sw) {
      base.push_back({start, s, m});
      m = toggled(m);
      start = s;
    }
    base.push_back({start, tf, m});

    // Blend windows centred on switches, merged when they overlap.
    std::vector<Window> windows;
    std::vector<std::pair<JointMode, JointMode>> ends;
    JointMode before = T.initial_mode[i];
    for (double s : sw) {
      const Window w{s - 0.5 * blend_width, s + 0.5 * blend_width};
      const JointMode after = toggled(before);
      if (!windows.empty() && w.begin <= windows.back().end) {
        windows.back().end = w.end;
        ends.back().second = after;
      } else {
        windows.push_back(w);
        ends.emplace_back(before, after);
      }
      before = after;
    }

    // Elementary pieces between every base switch and clipped window edge.
    std::vector<double> cuts{0.0, tf};
    cuts.insert(cuts.end(), sw.begin(), sw.end());
    if (blend_width > 0.0) {
      for (const auto& win : windows) {
        cuts.push_back(std::clamp(win.begin, 0.0, tf));
        cuts.push_back(std::clamp(win.end, 0.0, tf));
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<ModeInterval> iv;
    int last_window = -1;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k];
      const double hi = cuts[k + 1];
      const double mid = 0.5 * (lo + hi);
      int win = -1;
      if (blend_width > 0.0) {
        for (std::size_t w = 0; w < windows.size(); ++w)
          if (mid > windows[w].begin && mid < windows[w].end) win = static_cast<int>(w);
      }
      if (win >= 0) {
        if (!iv.empty() && iv.back().mode == JointMode::Transition && last_window == win) {
          iv.back().end = hi;
        } else {
          iv.push_back({lo, hi, JointMode::Transition, ends[win].first, ends[win].second,
                        windows[win].begin, windows[win].end});
        }
        last_window = win;
        continue;
      }
      const auto& b = *std::find_if(base.begin(), base.end(),
                                    [&](const ModeInterval& x) { return mid < x.end; });
      if (!iv.empty() && iv.back().mode == b.mode) {
        iv.back().end = hi;
      } else {
        iv.push_back({lo, hi, b.mode});
      }
    }
    out.joints.push_back(std::move(iv));
  }
  return out;
}

JointMode mode_at(const ModeSchedule& schedule, int joint, double t) {
  return schedule.interval_at(joint, t).mode;
}

SwitchPattern SwitchPattern::of(const ResponseTimeMatrix& T) {
  SwitchPattern p;
  p.rows = T.joints();
  p.cols = T.columns();
  p.columns.resize(p.rows);
  for (int i = 0; i < p.rows; ++i)
    for (int c = 0; c < p.cols; ++c)
      if (T.times(i, c) != 0.0) p.columns[i].push_back(c);
  return p;
}

int SwitchPattern::parameters() const {
  int n = 0;
  for (const auto& r : columns) n += static_cast<int>(r.size());
  return n;
}

ResponseTimeMatrix parameterize(const Eigen::VectorXd& z, const SwitchPattern& pattern,
                                const std::vector<JointMode>& initial_mode) {
  if (z.size() != pattern.parameters()) throw InputError("parameter vector size mismatch");
  if (!z.allFinite()) throw InputError("parameter vector is not finite");
  ResponseTimeMatrix T;
  T.times = Eigen::MatrixXd::Zero(pattern.rows, pattern.cols);
  T.initial_mode = initial_mode;
  int k = 0;
  for (int i = 0; i < pattern.rows; ++i) {
    double acc = 0.0;
    for (int c : pattern.columns[i]) {
      acc += std::exp(z[k++]);
      T.times(i, c) = acc;
    }
  }
  return T;
}

Eigen::VectorXd unparameterize(const ResponseTimeMatrix& T) {
  const auto pattern = SwitchPattern::of(T);
  Eigen::VectorXd z(pattern.parameters());
  int k = 0;
  for (int i = 0; i < pattern.rows; ++i) {
    double prev = 0.0;
    for (int c : pattern.columns[i]) {
      const double v = T.times(i, c);
      if (!(v > prev)) throw ScheduleError("row is not strictly increasing", i, c);
      z[k++] = std::log(v - prev);
      prev = v;
    }
  }
  return z;
}

}  // namespace hmp
