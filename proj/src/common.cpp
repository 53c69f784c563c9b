// SPDX-License-Identifier: MIT
//
// Quadrature rule construction (Gauss–Legendre by Newton iteration,
// Gauss–Laguerre by Golub–Welsch).

#include "common.hpp"

#include <Eigen/Dense>

namespace cuspwave {

Quadrature1D gauss_legendre(int n) {
  check(n >= 1, "gauss_legendre: need n >= 1");
  Quadrature1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // Roots come in ± pairs; iterate on the upper half starting from the
  // Chebyshev-based initial guess (standard Newton on the 3-term recurrence).
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      // p0 = P_n(x); derivative from the recurrence.
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;  // exact middle root
  return q;
}

Quadrature1D gauss_laguerre(int n) {
  check(n >= 1, "gauss_laguerre: need n >= 1");
  // Jacobi matrix for the e^{-t} weight: diag 2i+1, offdiag sqrt(i²) = i.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = 2.0 * i + 1.0;
    if (i + 1 < n) {
      J(i, i + 1) = i + 1.0;
      J(i + 1, i) = i + 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  check(es.info() == Eigen::Success, "gauss_laguerre: eigensolver failed");
  Quadrature1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    q.weights[i] = v0 * v0;  // μ₀ = ∫ e^{-t} dt = 1
  }
  return q;
}

Quadrature1D map_to_interval(const Quadrature1D& base, double a, double b) {
  Quadrature1D q;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  q.nodes.reserve(base.nodes.size());
  q.weights.reserve(base.nodes.size());
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    q.nodes.push_back(mid + half * base.nodes[i]);
    q.weights.push_back(half * base.weights[i]);
  }
  return q;
}

Quadrature1D panel_rule(const std::vector<double>& breakpoints, int per_panel) {
  check(breakpoints.size() >= 2, "panel_rule: need at least one panel");
  const Quadrature1D base = gauss_legendre(per_panel);
  Quadrature1D q;
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    const Quadrature1D panel =
        map_to_interval(base, breakpoints[p], breakpoints[p + 1]);
    q.nodes.insert(q.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    q.weights.insert(q.weights.end(), panel.weights.begin(),
                     panel.weights.end());
  }
  return q;
}

}  // namespace cuspwave
