#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace hmp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One rigid link of a planar serial chain. The joint sits at the proximal end.
struct Link {
  double length = 1.0;   // m
  double mass = 1.0;     // kg
  double com = 0.5;      // m, distance of the centre of mass from the joint
  double inertia = 0.1;  // kg m^2 about the centre of mass
};

/// Per-joint operating limits.
struct JointLimits {
  double theta_min = -3.0;
  double theta_max = 3.0;
  double tau_min = -100.0;
  double tau_max = 100.0;
  double power_min = -1e3;  // W, bound on the signed joint power tau * theta_dot
  double power_max = 1e3;
  double velocity_max = 10.0;  // rad/s, symmetric
};

/// Planar serial chain in a vertical plane, gravity along -y.
///
/// Joint angles are relative; the absolute angle of link i, measured from
/// the +x axis, is the sum of the first i+1 joint angles.
struct ChainModel {
  std::vector<Link> links;
  std::vector<JointLimits> limits;
  double gravity = 9.81;
  double system_power = 1e3;  // W, cap on sum_i |tau_i theta_dot_i|

  int dof() const noexcept { return static_cast<int>(links.size()); }

  /// Throws ParameterError when an invariant is broken.
  void validate() const;
};

struct JointState {
  Vec q;
  Vec qd;
  Vec qdd;

  static JointState zero(int n) {
    return {Vec::Zero(n), Vec::Zero(n), Vec::Zero(n)};
  }
};

/// Inertia-damping-spring law applied to passive joints (diagonal gains).
struct ComplianceParams {
  Vec inertia;    // B_p > 0
  Vec damping;    // D_p >= 0
  Vec stiffness;  // K_p >= 0

  int size() const noexcept { return static_cast<int>(inertia.size()); }
  void validate() const;
};

/// Joint-space mass matrix. Closed form for up to three joints, composite
/// rigid body recursion beyond that.
Mat mass_matrix(const ChainModel& model, const Vec& q);

Mat mass_matrix_closed_form(const ChainModel& model, const Vec& q);
Mat mass_matrix_crb(const ChainModel& model, const Vec& q);

/// dM/dq_l for every joint l.
std::vector<Mat> mass_matrix_partials(const ChainModel& model, const Vec& q);

/// Coriolis/centrifugal matrix built from the Christoffel symbols of M, so
/// that dM/dt - 2C is skew-symmetric.
Mat coriolis_matrix(const ChainModel& model, const Vec& q, const Vec& qd);

Vec gravity_torque(const ChainModel& model, const Vec& q);

/// C(q, qd) qd + G(q).
Vec bias_torque(const ChainModel& model, const Vec& q, const Vec& qd);

/// qdd = M^-1 (tau + tau_c - C qd - G).
Vec forward_dynamics(const ChainModel& model, const Vec& q, const Vec& qd,
                     const Vec& tau, const Vec& tau_contact);
Vec forward_dynamics(const ChainModel& model, const Vec& q, const Vec& qd,
                     const Vec& tau);

/// tau = M qdd + C qd + G.
Vec inverse_dynamics(const ChainModel& model, const JointState& state);

/// Blocks of M selected by an active/passive index split.
struct PartitionedInertia {
  Mat active;          // M_a
  Mat active_passive;  // M_ap
  Mat passive_active;  // M_pa
  Mat passive;         // M_p
};

PartitionedInertia partition(const Mat& mass, std::span<const int> active,
                             std::span<const int> passive);

/// Forward dynamics solved through the active/passive block equations.
/// Algebraically identical to forward_dynamics.
Vec forward_dynamics_partitioned(const ChainModel& model, const Vec& q,
                                 const Vec& qd, const Vec& tau,
                                 const Vec& tau_contact,
                                 std::span<const int> active);

double kinetic_energy(const ChainModel& model, const Vec& q, const Vec& qd);
double potential_energy(const ChainModel& model, const Vec& q);

/// Position of the distal end of every link, shape (N, 2).
Mat link_tips(const ChainModel& model, const Vec& q);

/// Acceleration of the deflection from the reference:
///   B a + D deflection_rate + K deflection = tau_pr.
/// Deflection is measured along the external torque (theta - theta_ref).
Vec compliant_response(const ComplianceParams& params, const Vec& deflection,
                       const Vec& deflection_rate, const Vec& tau_pr);

/// sum_i |tau_i qd_i|.
double total_power(const Vec& tau, const Vec& qd);

}  // namespace hmp
