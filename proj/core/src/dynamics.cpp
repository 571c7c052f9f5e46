#include "hmp/dynamics.hpp"

#include <cmath>
#include <string>

#include "hmp/errors.hpp"

namespace hmp {
namespace {

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw InputError(std::string(what) + " contains non-finite entries");
}

void require_size(const Vec& v, int n, const char* what) {
  if (v.size() != n) {
    throw InputError(std::string(what) + " has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(n));
  }
}

// Lever arm of segment a as seen from body i: full length for the links
// before i, the centre-of-mass offset for i itself.
double lever(const ChainModel& m, int a, int i) {
  return a == i ? m.links[a].com : m.links[a].length;
}

Vec absolute_angles(const Vec& q) {
  Vec phi(q.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    acc += q[i];
    phi[i] = acc;
  }
  return phi;
}

}  // namespace

void ChainModel::validate() const {
  if (links.empty()) throw ParameterError("chain needs at least one link");
  if (limits.size() != links.size()) throw ParameterError("one limit block per joint required");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    const std::string tag = "joint " + std::to_string(i) + ": ";
    if (!(l.length > 0.0 && l.mass > 0.0 && l.inertia > 0.0)) {
      throw ParameterError(tag + "length, mass and inertia must be positive");
    }
    if (!(l.com >= 0.0 && l.com <= l.length)) throw ParameterError(tag + "com offset outside link");
    const auto& lim = limits[i];
    if (!(lim.theta_min < lim.theta_max)) throw ParameterError(tag + "theta_min >= theta_max");
    if (!(lim.tau_min < lim.tau_max)) throw ParameterError(tag + "tau_min >= tau_max");
    if (!(lim.power_min < lim.power_max)) throw ParameterError(tag + "power_min >= power_max");
    if (!(lim.velocity_max > 0.0)) throw ParameterError(tag + "velocity_max must be positive");
  }
  if (!(system_power > 0.0)) throw ParameterError("system power cap must be positive");
  if (!(gravity >= 0.0)) throw ParameterError("gravity must be non-negative");
}

void ComplianceParams::validate() const {
  if (damping.size() != inertia.size() || stiffness.size() != inertia.size()) {
    throw ParameterError("compliance gains must have matching sizes");
  }
  for (int i = 0; i < size(); ++i) {
    if (!(inertia[i] > 0.0)) throw ParameterError("virtual inertia must be positive");
    if (!(damping[i] >= 0.0)) throw ParameterError("damping must be non-negative");
    if (!(stiffness[i] >= 0.0)) throw ParameterError("stiffness must be non-negative");
  }
}

Mat mass_matrix_closed_form(const ChainModel& model, const Vec& q) {
  const int n = model.dof();
  const Vec phi = absolute_angles(q);
  Mat M = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      double s = 0.0;
      for (int i = k; i < n; ++i) {
        double lin = 0.0;
        for (int a = j; a <= i; ++a) {
          for (int b = k; b <= i; ++b) {
            lin += lever(model, a, i) * lever(model, b, i) * std::cos(phi[a] - phi[b]);
          }
        }
        s += model.links[i].inertia + model.links[i].mass * lin;
      }
      M(j, k) = s;
      M(k, j) = s;
    }
  }
  return M;
}

Mat mass_matrix_crb(const ChainModel& model, const Vec& q) {
  const int n = model.dof();
  const Vec phi = absolute_angles(q);
  // joint origins and link centres of mass
  Mat origin(n, 2), com(n, 2);
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d dir(std::cos(phi[i]), std::sin(phi[i]));
    origin.row(i) = p.transpose();
    com.row(i) = (p + model.links[i].com * dir).transpose();
    p += model.links[i].length * dir;
  }
  // Composite body k..n-1: mass, centre of mass, inertia about joint k.
  Vec cmass(n), cinertia(n);
  Mat ccom(n, 2);
  double m_acc = 0.0;
  Eigen::Vector2d moment = Eigen::Vector2d::Zero();
  for (int k = n - 1; k >= 0; --k) {
    m_acc += model.links[k].mass;
    moment += model.links[k].mass * com.row(k).transpose();
    cmass[k] = m_acc;
    ccom.row(k) = (moment / m_acc).transpose();
    double inertia = 0.0;
    for (int i = k; i < n; ++i) {
      inertia += model.links[i].inertia +
                 model.links[i].mass * (com.row(i) - origin.row(k)).squaredNorm();
    }
    cinertia[k] = inertia;
  }
  Mat M(n, n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector2d c_rel = (ccom.row(k) - origin.row(k)).transpose();
    for (int j = 0; j <= k; ++j) {
      const Eigen::Vector2d arm = (origin.row(k) - origin.row(j)).transpose();
      M(j, k) = cinertia[k] + cmass[k] * arm.dot(c_rel);
      M(k, j) = M(j, k);
    }
  }
  return M;
}

Mat mass_matrix(const ChainModel& model, const Vec& q) {
  require_size(q, model.dof(), "theta");
  require_finite(q, "theta");
  return model.dof() <= 3 ? mass_matrix_closed_form(model, q) : mass_matrix_crb(model, q);
}

std::vector<Mat> mass_matrix_partials(const ChainModel& model, const Vec& q) {
  const int n = model.dof();
  const Vec phi = absolute_angles(q);
  std::vector<Mat> dM(n, Mat::Zero(n, n));
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      for (int i = k; i < n; ++i) {
        const double m = model.links[i].mass;
        for (int a = j; a <= i; ++a) {
          for (int b = k; b <= i; ++b) {
            if (a == b) continue;
            const double w = -m * lever(model, a, i) * lever(model, b, i) * std::sin(phi[a] - phi[b]);
            // d(phi_a - phi_b)/dq_l = [l <= a] - [l <= b]
            const int lo = std::min(a, b);
            const int hi = std::max(a, b);
            const double sign = a > b ? 1.0 : -1.0;
            for (int l = lo + 1; l <= hi; ++l) dM[l](j, k) += w * sign;
          }
        }
      }
      for (int l = 0; l < n; ++l) dM[l](k, j) = dM[l](j, k);
    }
  }
  return dM;
}

Mat coriolis_matrix(const ChainModel& model, const Vec& q, const Vec& qd) {
  const int n = model.dof();
  const auto dM = mass_matrix_partials(model, q);
  Mat C = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        s += 0.5 * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qd[k];
      }
      C(i, j) = s;
    }
  }
  return C;
}

Vec gravity_torque(const ChainModel& model, const Vec& q) {
  const int n = model.dof();
  const Vec phi = absolute_angles(q);
  Vec G = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      double arm = 0.0;
      for (int a = j; a <= i; ++a) arm += lever(model, a, i) * std::cos(phi[a]);
      G[j] += model.gravity * model.links[i].mass * arm;
    }
  }
  return G;
}

Vec bias_torque(const ChainModel& model, const Vec& q, const Vec& qd) {
  return coriolis_matrix(model, q, qd) * qd + gravity_torque(model, q);
}

Vec forward_dynamics(const ChainModel& model, const Vec& q, const Vec& qd, const Vec& tau,
                     const Vec& tau_contact) {
  const int n = model.dof();
  require_size(qd, n, "theta_dot");
  require_size(tau, n, "tau");
  require_size(tau_contact, n, "tau_c");
  require_finite(qd, "theta_dot");
  require_finite(tau, "tau");
  require_finite(tau_contact, "tau_c");
  const Mat M = mass_matrix(model, q);
  return M.llt().solve(tau + tau_contact - bias_torque(model, q, qd));
}

Vec forward_dynamics(const ChainModel& model, const Vec& q, const Vec& qd, const Vec& tau) {
  return forward_dynamics(model, q, qd, tau, Vec::Zero(model.dof()));
}

Vec inverse_dynamics(const ChainModel& model, const JointState& s) {
  const int n = model.dof();
  require_size(s.qd, n, "theta_dot");
  require_size(s.qdd, n, "theta_ddot");
  require_finite(s.qd, "theta_dot");
  require_finite(s.qdd, "theta_ddot");
  require_size(s.q, n, "theta");
  require_finite(s.q, "theta");
  // Recursive Newton-Euler in the plane; gravity enters as an upward base
  // acceleration. O(N) and allocation-free apart from the result.
  constexpr int kStack = 16;
  double fx[kStack + 1], fy[kStack + 1], mom[kStack + 1];
  double ax[kStack], ay[kStack], cx[kStack], cy[kStack], rx[kStack], ry[kStack], alpha[kStack];
  if (n > kStack) return mass_matrix(model, s.q) * s.qdd + bias_torque(model, s.q, s.qd);
  double phi = 0.0, w = 0.0, a = 0.0, ox = 0.0, oy = model.gravity;
  for (int i = 0; i < n; ++i) {
    phi += s.q[i];
    w += s.qd[i];
    a += s.qdd[i];
    const double c = std::cos(phi), sn = std::sin(phi);
    const double lc = model.links[i].com, l = model.links[i].length;
    rx[i] = lc * c;
    ry[i] = lc * sn;
    alpha[i] = a;
    cx[i] = ox - a * ry[i] - w * w * rx[i];
    cy[i] = oy + a * rx[i] - w * w * ry[i];
    ax[i] = l * c;  // reused below as the link vector
    ay[i] = l * sn;
    ox += -a * ay[i] - w * w * ax[i];
    oy += a * ax[i] - w * w * ay[i];
  }
  fx[n] = fy[n] = mom[n] = 0.0;
  Vec tau(n);
  for (int i = n - 1; i >= 0; --i) {
    const double m = model.links[i].mass;
    const double mx = m * cx[i], my = m * cy[i];
    fx[i] = mx + fx[i + 1];
    fy[i] = my + fy[i + 1];
    mom[i] = model.links[i].inertia * alpha[i] + (rx[i] * my - ry[i] * mx) +
             (ax[i] * fy[i + 1] - ay[i] * fx[i + 1]) + mom[i + 1];
    tau[i] = mom[i];
  }
  return tau;
}

PartitionedInertia partition(const Mat& mass, std::span<const int> active,
                             std::span<const int> passive) {
  auto block = [&](std::span<const int> rows, std::span<const int> cols) {
    Mat b(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) b(r, c) = mass(rows[r], cols[c]);
    return b;
  };
  return {block(active, active), block(active, passive), block(passive, active),
          block(passive, passive)};
}

Vec forward_dynamics_partitioned(const ChainModel& model, const Vec& q, const Vec& qd,
                                 const Vec& tau, const Vec& tau_contact,
                                 std::span<const int> active) {
  const int n = model.dof();
  std::vector<bool> is_active(n, false);
  for (int a : active) {
    if (a < 0 || a >= n) throw InputError("active index out of range");
    is_active[a] = true;
  }
  std::vector<int> act(active.begin(), active.end());
  std::vector<int> pas;
  for (int i = 0; i < n; ++i)
    if (!is_active[i]) pas.push_back(i);

  const Mat M = mass_matrix(model, q);
  const Vec rhs = tau + tau_contact - bias_torque(model, q, qd);
  const auto blocks = partition(M, act, pas);
  auto gather = [&](const std::vector<int>& idx) {
    Vec v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) v[i] = rhs[idx[i]];
    return v;
  };
  const Vec ra = gather(act);
  const Vec rp = gather(pas);

  Vec qa, qp;
  if (act.empty()) {
    qp = blocks.passive.llt().solve(rp);
  } else if (pas.empty()) {
    qa = blocks.active.llt().solve(ra);
  } else {
    // Eliminate the active block: Schur complement on the passive joints.
    const auto llt_a = blocks.active.llt();
    const Mat schur = blocks.passive - blocks.passive_active * llt_a.solve(blocks.active_passive);
    qp = schur.llt().solve(rp - blocks.passive_active * llt_a.solve(ra));
    qa = llt_a.solve(ra - blocks.active_passive * qp);
  }
  Vec qdd(n);
  for (std::size_t i = 0; i < act.size(); ++i) qdd[act[i]] = qa[i];
  for (std::size_t i = 0; i < pas.size(); ++i) qdd[pas[i]] = qp[i];
  return qdd;
}

double kinetic_energy(const ChainModel& model, const Vec& q, const Vec& qd) {
  return 0.5 * qd.dot(mass_matrix(model, q) * qd);
}

double potential_energy(const ChainModel& model, const Vec& q) {
  const Vec phi = absolute_angles(q);
  double y = 0.0, v = 0.0;
  for (int i = 0; i < model.dof(); ++i) {
    v += model.links[i].mass * model.gravity * (y + model.links[i].com * std::sin(phi[i]));
    y += model.links[i].length * std::sin(phi[i]);
  }
  return v;
}

Mat link_tips(const ChainModel& model, const Vec& q) {
  const Vec phi = absolute_angles(q);
  Mat tips(model.dof(), 2);
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  for (int i = 0; i < model.dof(); ++i) {
    p += model.links[i].length * Eigen::Vector2d(std::cos(phi[i]), std::sin(phi[i]));
    tips.row(i) = p.transpose();
  }
  return tips;
}

Vec compliant_response(const ComplianceParams& params, const Vec& deflection,
                       const Vec& deflection_rate, const Vec& tau_pr) {
  params.validate();
  const int n = params.size();
  require_size(deflection, n, "deflection");
  require_size(deflection_rate, n, "deflection rate");
  require_size(tau_pr, n, "tau_pr");
  return ((tau_pr.array() - params.damping.array() * deflection_rate.array() -
           params.stiffness.array() * deflection.array()) /
          params.inertia.array())
      .matrix();
}

double total_power(const Vec& tau, const Vec& qd) {
  if (tau.size() != qd.size()) throw InputError("tau and theta_dot lengths differ");
  return (tau.array() * qd.array()).abs().sum();
}

}  // namespace hmp
