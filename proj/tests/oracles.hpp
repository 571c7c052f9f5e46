#pragma once
// Reference computations written straight from first principles, sharing
// nothing with the library beyond the Link/ChainModel structs.
#include <array>
#include <cmath>
#include <utility>
#include <random>

#include "hmp/dynamics.hpp"

namespace oracle {

using hmp::ChainModel;
using hmp::Vec;

// Lagrangian from link centre-of-mass velocities, no mass matrix involved.
inline double lagrangian(const ChainModel& m, const Vec& q, const Vec& qd) {
  double x = 0, y = 0, vx = 0, vy = 0, phi = 0, w = 0, L = 0;
  for (int i = 0; i < m.dof(); ++i) {
    phi += q[i];
    w += qd[i];
    const auto& l = m.links[i];
    const double cx = x + l.com * std::cos(phi), cy = y + l.com * std::sin(phi);
    const double cvx = vx - l.com * std::sin(phi) * w, cvy = vy + l.com * std::cos(phi) * w;
    L += 0.5 * l.mass * (cvx * cvx + cvy * cvy) + 0.5 * l.inertia * w * w;
    L -= l.mass * m.gravity * cy;
    (void)cx;
    x += l.length * std::cos(phi);
    y += l.length * std::sin(phi);
    vx -= l.length * std::sin(phi) * w;
    vy += l.length * std::cos(phi) * w;
  }
  return L;
}

// Euler-Lagrange residual by nested central differences.
inline Vec euler_lagrange(const ChainModel& m, const Vec& q, const Vec& qd, const Vec& qdd) {
  const int n = m.dof();
  const double h = 1e-5, dt = 1e-4;
  auto dL_dqd = [&](const Vec& qq, const Vec& vv, int i) {
    Vec a = vv, b = vv;
    a[i] += h;
    b[i] -= h;
    return (lagrangian(m, qq, a) - lagrangian(m, qq, b)) / (2 * h);
  };
  Vec tau(n);
  for (int i = 0; i < n; ++i) {
    const Vec qp = q + dt * qd + 0.5 * dt * dt * qdd, qm = q - dt * qd + 0.5 * dt * dt * qdd;
    const double ddt = (dL_dqd(qp, qd + dt * qdd, i) - dL_dqd(qm, qd - dt * qdd, i)) / (2 * dt);
    Vec a = q, b = q;
    a[i] += h;
    b[i] -= h;
    const double dq = (lagrangian(m, a, qd) - lagrangian(m, b, qd)) / (2 * h);
    tau[i] = ddt - dq;
  }
  return tau;
}

// Point projectile, RK4 with the last step cut at y = 0 by Newton on the
// local cubic Hermite. Returns {flight time, range}.
inline std::pair<double, double> projectile(double speed, double angle, double height, double g) {
  double x = 0, y = height, vx = speed * std::cos(angle), vy = speed * std::sin(angle), t = 0;
  const double h = 1e-3;
  auto f = [g](const std::array<double, 4>& s) { return std::array<double, 4>{s[2], s[3], 0.0, -g}; };
  for (int k = 0; k < 10000000; ++k) {
    std::array<double, 4> s{x, y, vx, vy};
    auto add = [](const std::array<double, 4>& a, const std::array<double, 4>& b, double c) {
      return std::array<double, 4>{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]};
    };
    auto step = [&](double dt) {
      auto k1 = f(s), k2 = f(add(s, k1, dt / 2)), k3 = f(add(s, k2, dt / 2)), k4 = f(add(s, k3, dt));
      std::array<double, 4> r;
      for (int i = 0; i < 4; ++i) r[i] = s[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      return r;
    };
    auto n = step(h);
    if (n[1] < 0.0) {
      // bisect the step length, RK4 is exact on this quadratic
      double lo = 0, hi = h;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (step(mid)[1] < 0.0 ? hi : lo) = mid;
      }
      const auto e = step(lo);
      return {t + lo, e[0]};
    }
    x = n[0];
    y = n[1];
    vx = n[2];
    vy = n[3];
    t += h;
  }
  return {NAN, NAN};
}

inline ChainModel random_chain(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.3, 1.5);
  ChainModel m;
  for (int i = 0; i < n; ++i) {
    const double len = u(rng);
    m.links.push_back({len, u(rng) * 3.0, len * u(rng) / 1.5, u(rng) * 0.1});
    m.limits.push_back({});
  }
  return m;
}

inline Vec random_vec(std::mt19937_64& rng, int n, double a) {
  std::uniform_real_distribution<double> u(-a, a);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace oracle
