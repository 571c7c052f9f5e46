#include "hmp/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hmp/errors.hpp"

namespace hmp {
namespace {

struct Merit {
  const NlpProblem& p;
  const Vec& mu;
  const Vec& gains;
  double rho;

  // Augmented Lagrangian for critical rows, quadratic penalty otherwise.
  double value(const Vec& x, Vec* grad, Mat* hess) const {
    const int n = p.variables;
    const int m = p.constraint_count();
    Vec fg;
    Mat fh;
    double v = p.objective(x, grad ? &fg : nullptr, hess ? &fh : nullptr);
    if (grad) *grad = fg;
    if (hess) *hess = fh;
    if (m == 0) return v;
    Vec g(m);
    Mat J;
    p.constraints(x, g, grad || hess ? &J : nullptr);
    Vec w = Vec::Zero(m);  // d merit / d g_j
    for (int j = 0; j < m; ++j) {
      if (p.classes[j] == Criticality::LessCritical) {
        if (g[j] > 0.0) {
          v += gains[j] * g[j] * g[j];
          w[j] = 2.0 * gains[j] * g[j];
        }
      } else {
        const double s = std::max(0.0, mu[j] + rho * g[j]);
        v += (s * s - mu[j] * mu[j]) / (2.0 * rho);
        w[j] = s;
      }
    }
    if (grad) *grad += J.transpose() * w;
    if (hess) {
      Vec diag = Vec::Zero(m);
      for (int j = 0; j < m; ++j) {
        if (p.classes[j] == Criticality::LessCritical) {
          if (g[j] > 0.0) diag[j] = 2.0 * gains[j];
        } else if (mu[j] + rho * g[j] > 0.0) {
          diag[j] = rho;
        }
      }
      *hess += J.transpose() * diag.asDiagonal() * J;
      if (p.constraint_curvature) *hess += p.constraint_curvature(x, w);
    }
    (void)n;
    return v;
  }
};

Vec project(const Vec& x, const NlpProblem& p) {
  return x.cwiseMax(p.lower).cwiseMin(p.upper);
}

// Inf-norm of the gradient over variables not held at a bound.
double projected_norm(const NlpProblem& p, const Vec& x, const Vec& grad) {
  double r = 0.0;
  for (int i = 0; i < p.variables; ++i) {
    const bool lo = x[i] <= p.lower[i] + 1e-9 && grad[i] > 0.0;
    const bool hi = x[i] >= p.upper[i] - 1e-9 && grad[i] < 0.0;
    if (!lo && !hi) r = std::max(r, std::abs(grad[i]));
  }
  return r;
}

// Projected Newton on the box (Bertsekas 1982), Levenberg shift on
// indefinite Hessians, Armijo search along the projection arc.
int minimize_box(const Merit& merit, Vec& x, const NlpSettings& s, bool& converged) {
  const auto& p = merit.p;
  const int n = p.variables;
  converged = false;
  int it = 0;
  Vec grad;
  Mat hess;
  double fx = merit.value(x, &grad, &hess);
  for (; it < s.max_iterations; ++it) {
    if (projected_norm(p, x, grad) <= s.gradient_tolerance) {
      converged = true;
      break;
    }
    const double eps = 1e-12;
    std::vector<int> free_idx;
    std::vector<bool> bound(n, false);
    for (int i = 0; i < n; ++i) {
      const bool at_lo = x[i] <= p.lower[i] + eps && grad[i] > 0.0;
      const bool at_hi = x[i] >= p.upper[i] - eps && grad[i] < 0.0;
      if (at_lo || at_hi) {
        bound[i] = true;
      } else {
        free_idx.push_back(i);
      }
    }
    Vec d = Vec::Zero(n);
    const int nf = static_cast<int>(free_idx.size());
    if (nf > 0) {
      Mat H(nf, nf);
      Vec gf(nf);
      for (int a = 0; a < nf; ++a) {
        gf[a] = grad[free_idx[a]];
        for (int b = 0; b < nf; ++b) H(a, b) = hess(free_idx[a], free_idx[b]);
      }
      const double scale = std::max(1e-12, H.diagonal().cwiseAbs().maxCoeff());
      double shift = 0.0;
      Vec df;
      for (int attempt = 0; attempt < 60; ++attempt) {
        Mat Hs = H;
        Hs.diagonal().array() += shift;
        Eigen::LLT<Mat> llt(Hs);
        if (llt.info() == Eigen::Success) {
          df = -llt.solve(gf);
          if (df.allFinite()) break;
        }
        shift = shift == 0.0 ? 1e-10 * scale : shift * 10.0;
        df.resize(0);
      }
      if (df.size() == 0) df = -gf / scale;
      for (int a = 0; a < nf; ++a) d[free_idx[a]] = df[a];
    }
    for (int i = 0; i < n; ++i) {
      if (bound[i]) d[i] = -grad[i] / std::max(std::abs(hess(i, i)), 1e-12);
    }

    double alpha = 1.0;
    Vec xn;
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      xn = project(x + alpha * d, p);
      fn = merit.value(xn, nullptr, nullptr);
      const double decrease = grad.dot(xn - x);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no descent left at machine precision
      break;
    }
    const double step = (xn - x).lpNorm<Eigen::Infinity>();
    x = xn;
    fx = merit.value(x, &grad, &hess);
    if (step < s.step_tolerance || projected_norm(p, x, grad) <= s.gradient_tolerance) {
      converged = true;
      ++it;
      break;
    }
  }
  return it;
}

}  // namespace

Vec lagrangian_gradient(const NlpProblem& p, const Vec& x, const Vec& mu, const Vec& gains) {
  Vec grad;
  p.objective(x, &grad, nullptr);
  const int m = p.constraint_count();
  if (m == 0) return grad;
  Vec g(m);
  Mat J;
  p.constraints(x, g, &J);
  Vec w = Vec::Zero(m);
  for (int j = 0; j < m; ++j) {
    if (p.classes[j] == Criticality::Critical) {
      w[j] = mu[j];
    } else if (g[j] > 0.0) {
      w[j] = 2.0 * gains[j] * g[j];
    }
  }
  return grad + J.transpose() * w;
}

NlpResult solve_nlp(const NlpProblem& p, const Vec& x0, const NlpSettings& s) {
  const int n = p.variables;
  const int m = p.constraint_count();
  if (x0.size() != n || p.lower.size() != n || p.upper.size() != n) {
    throw InputError("NLP dimension mismatch");
  }
  if (p.gains.size() != m) throw InputError("one penalty gain per constraint required");

  NlpResult r;
  r.x = project(x0, p);
  r.multipliers = Vec::Zero(m);
  r.gains = p.gains;
  double rho = s.rho_initial;
  Vec g(m);

  // Outer: penalty continuation on the less-critical rows. Inner: augmented
  // Lagrangian rounds on the critical rows at fixed gains, so each recorded
  // V belongs to a converged subproblem and cannot grow with k.
  const bool any_lc = std::any_of(p.classes.begin(), p.classes.end(),
                                  [](Criticality c) { return c == Criticality::LessCritical; });
  struct Snapshot {
    Vec x, multipliers, gains;
  };
  std::optional<Snapshot> saved;
  for (int stage = 0;; ++stage) {
    bool stage_ok = false;
    double prev_crit = std::numeric_limits<double>::infinity();
    for (int round = 0; round < s.max_rounds; ++round) {
      const Merit merit{p, r.multipliers, r.gains, rho};
      bool inner_ok = false;
      r.iterations += minimize_box(merit, r.x, s, inner_ok);
      ++r.rounds;

      if (m > 0) p.constraints(r.x, g, nullptr);
      double crit = 0.0;
      for (int j = 0; j < m; ++j)
        if (p.classes[j] == Criticality::Critical) crit += std::max(0.0, g[j]);

      for (int j = 0; j < m; ++j) {
        if (p.classes[j] != Criticality::Critical) continue;
        r.multipliers[j] = std::max(0.0, r.multipliers[j] + rho * g[j]);
      }
      if (crit > s.feasibility_tolerance && crit > 0.25 * prev_crit) {
        rho = std::min(rho * 10.0, s.rho_max);
      }
      prev_crit = crit;

      Vec fgrad;
      p.objective(r.x, &fgrad, nullptr);
      const double kkt =
          projected_norm(p, r.x, lagrangian_gradient(p, r.x, r.multipliers, r.gains));
      const double kkt_tol = 1e-6 * std::max(1.0, fgrad.lpNorm<Eigen::Infinity>());
      if (inner_ok && crit <= s.feasibility_tolerance && kkt <= kkt_tol) {
        stage_ok = true;
        // Degenerate active sets can leave weight on inactive rows; further
        // rounds shift it onto the active ones.
        double slack = 0.0;
        for (int j = 0; j < m; ++j)
          if (p.classes[j] == Criticality::Critical) slack = std::max(slack, std::abs(r.multipliers[j] * g[j]));
        if (slack <= kkt_tol) break;
      }
    }
    if (!stage_ok) {
      // A stiffer stage that fails falls back to the last converged one.
      if (saved) {
        r.x = saved->x;
        r.multipliers = saved->multipliers;
        r.gains = saved->gains;
      }
      break;
    }
    double pen = 0.0;
    for (int j = 0; j < m; ++j)
      if (p.classes[j] == Criticality::LessCritical) pen += std::max(0.0, g[j]);
    if (any_lc) r.violation_history.push_back(pen);
    saved = Snapshot{r.x, r.multipliers, r.gains};

    const bool at_cap = r.gains.size() > 0 && r.gains.maxCoeff() >= s.penalty_max;
    if (pen <= s.penalty_tolerance || at_cap) {
      r.converged = true;
      break;
    }
    for (int j = 0; j < m; ++j)
      if (p.classes[j] == Criticality::LessCritical)
        r.gains[j] = std::min(r.gains[j] * s.penalty_growth, s.penalty_max);
  }

  if (m > 0) p.constraints(r.x, g, nullptr);
  r.g = g;
  r.objective = p.objective(r.x, nullptr, nullptr);
  r.critical_violation = 0.0;
  r.penalty_violation = 0.0;
  r.slackness = 0.0;
  for (int j = 0; j < m; ++j) {
    const double pos = std::max(0.0, g[j]);
    if (p.classes[j] == Criticality::Critical) {
      r.critical_violation += pos;
      r.slackness = std::max(r.slackness, std::abs(r.multipliers[j] * g[j]));
    } else {
      r.penalty_violation += pos;
    }
  }
  r.stationarity = projected_norm(p, r.x, lagrangian_gradient(p, r.x, r.multipliers, r.gains));
  return r;
}

}  // namespace hmp
