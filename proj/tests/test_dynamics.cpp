#include <gtest/gtest.h>

#include <random>

#include "hmp/dynamics.hpp"
#include "hmp/integrator.hpp"
#include "hmp/scenarios.hpp"
#include "oracles.hpp"

using namespace hmp;

namespace {

ChainModel arm() { return throwing_scenario().model; }

// Hessian of the kinetic energy in qd, by differences of the oracle Lagrangian.
Mat ke_hessian(const ChainModel& m, const Vec& q) {
  const int n = m.dof();
  Mat H(n, n);
  const double h = 1e-3;
  const Vec z = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec a = z, b = z, c = z, d = z;
      a[i] += h; a[j] += h;
      b[i] += h; b[j] -= h;
      c[i] -= h; c[j] += h;
      d[i] -= h; d[j] -= h;
      H(i, j) = (oracle::lagrangian(m, q, a) - oracle::lagrangian(m, q, b) -
                 oracle::lagrangian(m, q, c) + oracle::lagrangian(m, q, d)) / (4 * h * h);
    }
  return H;
}

}  // namespace

TEST(Dynamics, MassMatrixIsKineticEnergyHessian) {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 5; ++n) {
    const auto m = oracle::random_chain(rng, n);
    for (int k = 0; k < 10; ++k) {
      const Vec q = oracle::random_vec(rng, n, 3.0);
      EXPECT_LT((mass_matrix(m, q) - ke_hessian(m, q)).norm(), 1e-6) << "n=" << n;
    }
  }
}

TEST(Dynamics, CompositeBodyMatchesClosedForm) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 3; ++n) {
    const auto m = oracle::random_chain(rng, n);
    for (int k = 0; k < 20; ++k) {
      const Vec q = oracle::random_vec(rng, n, 3.0);
      EXPECT_LT((mass_matrix_crb(m, q) - mass_matrix_closed_form(m, q)).norm(), 1e-12);
    }
  }
}

TEST(Dynamics, InverseDynamicsMatchesEulerLagrange) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 4; ++n) {
    const auto m = oracle::random_chain(rng, n);
    for (int k = 0; k < 10; ++k) {
      JointState s{oracle::random_vec(rng, n, 3.0), oracle::random_vec(rng, n, 2.0),
                   oracle::random_vec(rng, n, 5.0)};
      const Vec ref = oracle::euler_lagrange(m, s.q, s.qd, s.qdd);
      EXPECT_LT((inverse_dynamics(m, s) - ref).lpNorm<Eigen::Infinity>(), 1e-5 * (1 + ref.norm()));
    }
  }
}

TEST(Dynamics, RecursiveInverseMatchesMassMatrixForm) {
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 6; ++n) {
    const auto m = oracle::random_chain(rng, n);
    for (int k = 0; k < 10; ++k) {
      JointState s{oracle::random_vec(rng, n, 3.0), oracle::random_vec(rng, n, 2.0),
                   oracle::random_vec(rng, n, 5.0)};
      const Vec closed = mass_matrix(m, s.q) * s.qdd + bias_torque(m, s.q, s.qd);
      EXPECT_LT((inverse_dynamics(m, s) - closed).norm(), 1e-10 * (1 + closed.norm()));
    }
  }
}

TEST(Dynamics, ForwardInverseRoundTrip) {
  std::mt19937_64 rng(5);
  const auto m = arm();
  for (int k = 0; k < 100; ++k) {
    const Vec q = oracle::random_vec(rng, 2, 3.0), qd = oracle::random_vec(rng, 2, 3.0);
    const Vec tau = oracle::random_vec(rng, 2, 20.0);
    const Vec qdd = forward_dynamics(m, q, qd, tau);
    EXPECT_LT((inverse_dynamics(m, {q, qd, qdd}) - tau).norm(), 1e-9);
  }
}

TEST(Dynamics, SkewSymmetry) {
  std::mt19937_64 rng(6);
  for (int n : {2, 3, 4}) {
    const auto m = oracle::random_chain(rng, n);
    for (int k = 0; k < 100; ++k) {
      const Vec q = oracle::random_vec(rng, n, 3.0), qd = oracle::random_vec(rng, n, 3.0);
      const auto dM = mass_matrix_partials(m, q);
      Mat Mdot = Mat::Zero(n, n);
      for (int l = 0; l < n; ++l) Mdot += dM[l] * qd[l];
      const Mat S = Mdot - 2.0 * coriolis_matrix(m, q, qd);
      EXPECT_LT((S + S.transpose()).lpNorm<Eigen::Infinity>(), 1e-8);
    }
  }
}

TEST(Dynamics, PartialsMatchDifferences) {
  std::mt19937_64 rng(7);
  const auto m = oracle::random_chain(rng, 3);
  const Vec q = oracle::random_vec(rng, 3, 2.0);
  const auto dM = mass_matrix_partials(m, q);
  for (int l = 0; l < 3; ++l) {
    Vec a = q, b = q;
    a[l] += 1e-6;
    b[l] -= 1e-6;
    const Mat fd = (mass_matrix(m, a) - mass_matrix(m, b)) / 2e-6;
    EXPECT_LT((dM[l] - fd).norm(), 1e-7);
  }
}

TEST(Dynamics, EnergyConservedUnforced) {
  const auto m = arm();
  ControlLaw zero = [](double, const Vec& q, const Vec&, std::span<const JointMode>) {
    return Vec::Zero(q.size());
  };
  JointState s0{Vec::Zero(2), Vec::Zero(2), Vec::Zero(2)};
  s0.q << 0.3, 0.8;
  s0.qd << 1.0, -2.0;
  const auto tr = integrate(m, zero, s0, {0.0, 2.0, 1e-4, {}});
  auto energy = [&](int k) {
    const Vec q = tr.q.row(k).transpose(), qd = tr.qd.row(k).transpose();
    return kinetic_energy(m, q, qd) + potential_energy(m, q);
  };
  const double e0 = energy(0);
  double drift = 0.0;
  for (int k = 0; k < tr.size(); ++k) drift = std::max(drift, std::abs(energy(k) - e0));
  EXPECT_LT(drift / std::abs(e0), 1e-6);
  EXPECT_NEAR(e0, -oracle::lagrangian(m, s0.q, s0.qd) + 2 * kinetic_energy(m, s0.q, s0.qd), 1e-10);
}

TEST(Dynamics, PartitionedForwardEqualsForward) {
  std::mt19937_64 rng(8);
  const auto m = oracle::random_chain(rng, 3);
  const Vec q = oracle::random_vec(rng, 3, 2.0), qd = oracle::random_vec(rng, 3, 2.0);
  const Vec tau = oracle::random_vec(rng, 3, 5.0), tc = oracle::random_vec(rng, 3, 1.0);
  const Vec ref = forward_dynamics(m, q, qd, tau, tc);
  for (std::vector<int> act : {std::vector<int>{}, {0}, {1, 2}, {0, 2}, {0, 1, 2}}) {
    EXPECT_LT((forward_dynamics_partitioned(m, q, qd, tau, tc, act) - ref).norm(), 1e-10);
  }
}

TEST(Dynamics, RejectsBadInput) {
  const auto m = arm();
  EXPECT_THROW(forward_dynamics(m, Vec::Zero(3), Vec::Zero(3), Vec::Zero(3)), InputError);
  Vec q = Vec::Zero(2);
  q[0] = NAN;
  EXPECT_THROW(inverse_dynamics(m, {q, Vec::Zero(2), Vec::Zero(2)}), InputError);
  ChainModel bad = m;
  bad.links[0].mass = -1.0;
  EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(Dynamics, CompliantResponseSign) {
  ComplianceParams p{Vec::Constant(1, 2.0), Vec::Constant(1, 1.0), Vec::Constant(1, 4.0)};
  // B a + D v + K d = tau
  const Vec a = compliant_response(p, Vec::Constant(1, 0.5), Vec::Constant(1, 1.0), Vec::Constant(1, 5.0));
  EXPECT_DOUBLE_EQ(a[0], (5.0 - 1.0 - 2.0) / 2.0);
}
