#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hmp {

/// One passive joint driven by a disturbance torque, deflection measured
/// from a fixed reference: B a + D v + K d = tau(t), starting at rest.
struct ComplianceTrace {
  std::vector<double> t, deflection, rate;
  double peak_deflection = 0.0;  // max |d|
  double peak_rate = 0.0;        // max |v|
  double error_theta = 0.0;      // RMS of e = theta_ref - theta
  double error_rate = 0.0;       // RMS of its derivative
};

ComplianceTrace simulate_compliance(double B, double D, double K,
                                    const std::function<double(double)>& tau, double tf, double dt);

/// Half-sine pulse of the given amplitude and width, zero afterwards.
std::function<double(double)> pulse_disturbance(double amplitude, double width);

struct SweepRow {
  std::string parameter;  // "K" or "D"
  double value = 0.0;
  ComplianceTrace trace;
};

struct SweepSettings {
  double inertia = 1.0;
  double damping = 4.0;    // held while K varies
  double stiffness = 40.0; // held while D varies
  std::vector<double> stiffness_values{10.0, 20.0, 40.0, 80.0, 160.0};
  std::vector<double> damping_values{1.0, 2.0, 4.0, 8.0, 16.0};
  double amplitude = 1.0;
  double width = 0.5;
  double horizon = 3.0;
  double dt = 1e-3;
};

/// K rows first, then D rows, each in the order given.
std::vector<SweepRow> compliance_sweep(const SweepSettings& s);

}  // namespace hmp
