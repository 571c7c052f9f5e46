#include "hmp/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmp/errors.hpp"

namespace hmp {

ComplianceTrace simulate_compliance(double B, double D, double K,
                                    const std::function<double(double)>& tau, double tf, double dt) {
  if (!(B > 0.0) || D < 0.0 || K < 0.0) throw ParameterError("compliance needs B > 0, D >= 0, K >= 0");
  if (!(dt > 0.0) || !(tf > 0.0)) throw InputError("compliance simulation needs dt > 0 and tf > 0");
  const int steps = static_cast<int>(std::ceil(tf / dt - 1e-9));
  const double h = tf / steps;
  auto f = [&](double t, double d, double v, double& dd, double& dv) {
    dd = v;
    dv = (tau(t) - D * v - K * d) / B;
  };
  ComplianceTrace out;
  double d = 0.0, v = 0.0, se = 0.0, sr = 0.0;
  out.t.push_back(0.0);
  out.deflection.push_back(d);
  out.rate.push_back(v);
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    double a1, b1, a2, b2, a3, b3, a4, b4;
    f(t, d, v, a1, b1);
    f(t + h / 2, d + h / 2 * a1, v + h / 2 * b1, a2, b2);
    f(t + h / 2, d + h / 2 * a2, v + h / 2 * b2, a3, b3);
    f(t + h, d + h * a3, v + h * b3, a4, b4);
    const double dn = d + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    const double vn = v + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    se += h / 2 * (d * d + dn * dn);
    sr += h / 2 * (v * v + vn * vn);
    d = dn;
    v = vn;
    out.t.push_back((i + 1) * h);
    out.deflection.push_back(d);
    out.rate.push_back(v);
    out.peak_deflection = std::max(out.peak_deflection, std::abs(d));
    out.peak_rate = std::max(out.peak_rate, std::abs(v));
  }
  out.error_theta = std::sqrt(se / tf);
  out.error_rate = std::sqrt(sr / tf);
  return out;
}

std::function<double(double)> pulse_disturbance(double amplitude, double width) {
  return [amplitude, width](double t) {
    return t >= 0.0 && t <= width ? amplitude * std::sin(std::numbers::pi * t / width) : 0.0;
  };
}

std::vector<SweepRow> compliance_sweep(const SweepSettings& s) {
  const auto tau = pulse_disturbance(s.amplitude, s.width);
  std::vector<SweepRow> rows;
  for (double k : s.stiffness_values)
    rows.push_back({"K", k, simulate_compliance(s.inertia, s.damping, k, tau, s.horizon, s.dt)});
  for (double d : s.damping_values)
    rows.push_back({"D", d, simulate_compliance(s.inertia, d, s.stiffness, tau, s.horizon, s.dt)});
  return rows;
}

}  // namespace hmp
