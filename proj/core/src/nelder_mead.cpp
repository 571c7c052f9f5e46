#include "hmp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hmp {

bool better(double fa, const Eigen::VectorXd& a, double fb, const Eigen::VectorXd& b) {
  if (fa != fb) return fa > fb;
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

SimplexResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& x0, const SimplexSettings& s) {
  using V = Eigen::VectorXd;
  const int n = static_cast<int>(x0.size());
  SimplexResult r;
  r.x = x0;
  r.value = -std::numeric_limits<double>::infinity();

  auto eval = [&](const V& x) {
    const double v = f(x);
    ++r.evaluations;
    if (r.evaluations == 1 || better(v, x, r.value, r.x)) {
      r.value = v;
      r.x = x;
    }
    r.best_so_far.push_back(r.value);
    return v;
  };
  auto left = [&] { return s.budget - r.evaluations; };

  std::vector<V> pts{x0};
  std::vector<double> val{eval(x0)};
  if (n == 0) return r;
  for (int i = 0; i < n && left() > 0; ++i) {
    V x = x0;
    x[i] += s.step;
    pts.push_back(x);
    val.push_back(eval(x));
  }
  if (static_cast<int>(pts.size()) < n + 1) return r;

  std::vector<int> order(n + 1);
  while (left() > 0) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return better(val[a], pts[a], val[b], pts[b]); });
    std::vector<V> p2;
    std::vector<double> v2;
    for (int i : order) {
      p2.push_back(pts[i]);
      v2.push_back(val[i]);
    }
    pts.swap(p2);
    val.swap(v2);
    if (std::abs(val.front() - val.back()) <= s.tolerance * (1.0 + std::abs(val.front()))) {
      double spread = 0.0;
      for (int i = 1; i <= n; ++i) spread = std::max(spread, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
      if (spread <= 1e-6) break;
    }

    V centroid = V::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;
    const V& worst = pts[n];

    const V xr = centroid + (centroid - worst);
    const double fr = eval(xr);
    if (fr > val[0]) {
      if (left() <= 0) {
        pts[n] = xr;
        val[n] = fr;
        break;
      }
      const V xe = centroid + 2.0 * (centroid - worst);
      const double fe = eval(xe);
      if (fe > fr) {
        pts[n] = xe;
        val[n] = fe;
      } else {
        pts[n] = xr;
        val[n] = fr;
      }
      continue;
    }
    if (fr > val[n - 1]) {
      pts[n] = xr;
      val[n] = fr;
      continue;
    }
    if (left() <= 0) break;
    // Contraction, outside when the reflection beat the worst point.
    const bool outside = fr > val[n];
    const V xc = outside ? V(centroid + 0.5 * (xr - centroid)) : V(centroid + 0.5 * (worst - centroid));
    const double fc = eval(xc);
    if (fc > (outside ? fr : val[n])) {
      pts[n] = xc;
      val[n] = fc;
      continue;
    }
    for (int i = 1; i <= n && left() > 0; ++i) {
      pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
      val[i] = eval(pts[i]);
    }
  }
  return r;
}

}  // namespace hmp
