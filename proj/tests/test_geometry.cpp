// SPDX-License-Identifier: MIT
//
// Geometry tests: cusp profiles, curvature, normals, the Condition-2 margin,
// and truncated-domain validation.  Also exercises the shared numerics
// utilities (quadrature rules, smoothstep) that everything downstream uses.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"

using namespace cuspwave;
using namespace cuspwave::geometry;

namespace {

// Closed tabulated curve sampling an ellipse of semi-axes (a, b) centered at
// (0, b): the same shape as make_ellipse, but through the spline path.
std::vector<std::array<double, 3>> ellipse_samples(double a, double b, int n) {
  std::vector<std::array<double, 3>> s;
  s.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    s.push_back({t, a * std::sin(t), b - b * std::cos(t)});
  }
  return s;
}

double integrand_condition2(const Vec2& p, const Vec2& n) {
  return p.x1 * (p.x1 * p.x1 - p.x2 * p.x2) * n.x1 +
         2.0 * p.x1 * p.x1 * p.x2 * n.x2;
}

}  // namespace

TEST_CASE("numerics utilities: quadrature and smoothstep") {
  SUBCASE("Gauss-Legendre integrates polynomials exactly") {
    const auto q = gauss_legendre(8);  // exact through degree 15
    double s0 = 0.0, s14 = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      s0 += q.weights[i];
      s14 += q.weights[i] * std::pow(q.nodes[i], 14);
    }
    CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
  }

  SUBCASE("Gauss-Legendre on a mapped interval") {
    const auto base = gauss_legendre(16);
    const auto q = map_to_interval(base, 0.0, kPi);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      s += q.weights[i] * std::sin(q.nodes[i]);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
  }

  SUBCASE("Gauss-Laguerre moments of exp(-t)") {
    const auto q = gauss_laguerre(24);
    double m0 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      m0 += q.weights[i];
      m3 += q.weights[i] * std::pow(q.nodes[i], 3);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m3 == doctest::Approx(6.0).epsilon(1e-11));  // Gamma(4)
  }

  SUBCASE("panel rule handles piecewise-smooth integrands") {
    const auto q = panel_rule({0.0, 0.5, 2.0}, 12);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      s += q.weights[i] * std::abs(q.nodes[i] - 0.5);
    CHECK(s == doctest::Approx(0.25 * 0.5 + 0.5 * 1.5 * 1.5).epsilon(1e-13));
  }

  SUBCASE("smoothstep5 endpoint values and derivatives") {
    CHECK(smoothstep5(0.0) == 0.0);
    CHECK(smoothstep5(1.0) == 1.0);
    CHECK(smoothstep5(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smoothstep5_d1(0.0) == 0.0);
    CHECK(smoothstep5_d1(1.0) == 0.0);
    CHECK(smoothstep5_d2(0.0) == 0.0);
    CHECK(smoothstep5_d2(1.0) == 0.0);
  }

  SUBCASE("square root limit from above the branch cut") {
    const Complex z = sqrt_limit_above(Complex(-4.0, 0.0));
    CHECK(z.real() == doctest::Approx(0.0));
    CHECK(z.imag() == doctest::Approx(2.0));  // limit from Im > 0: +2i
    const Complex w = sqrt_limit_above(Complex(0.0, -1.0));
    CHECK(w.real() > 0.0);  // principal branch for off-axis arguments
    CHECK(w.imag() < 0.0);
  }
}

TEST_CASE("ellipse profile: closed forms") {
  const auto body = BodyShape::make_ellipse(1.0, 2.0);
  CHECK(body.half_width() == doctest::Approx(1.0));
  CHECK(body.depth() == doctest::Approx(4.0));
  CHECK(body.tau() == doctest::Approx(0.8));

  CHECK(body.phi(0.0) == 0.0);
  CHECK(body.dphi(0.0) == 0.0);
  CHECK(body.phi(0.5) == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-14));
  CHECK(body.lower(0.0) == doctest::Approx(4.0));
  CHECK(body.lower(0.5) == doctest::Approx(2.0 + std::sqrt(3.0)).epsilon(1e-14));
  CHECK(body.width_at(2.0) == doctest::Approx(1.0));  // widest at x2 = b

  // phi and width_at are inverse to each other on the right branch.
  const double y = body.phi(0.3);
  CHECK(body.width_at(y) == doctest::Approx(0.3).epsilon(1e-12));

  // Derivatives against central differences.
  const double h = 1e-6;
  CHECK(body.dphi(0.4) ==
        doctest::Approx((body.phi(0.4 + h) - body.phi(0.4 - h)) / (2 * h))
            .epsilon(1e-8));
  CHECK(body.dlower(0.4) ==
        doctest::Approx((body.lower(0.4 + h) - body.lower(0.4 - h)) / (2 * h))
            .epsilon(1e-8));
  CHECK(body.dwidth_at(1.0) ==
        doctest::Approx((body.width_at(1.0 + h) - body.width_at(1.0 - h)) /
                        (2 * h))
            .epsilon(1e-8));

  // Parametric boundary: widest point and its external (into-body) normal.
  const Vec2 p = body.point(kPi / 2.0);
  CHECK(p.x1 == doctest::Approx(1.0));
  CHECK(p.x2 == doctest::Approx(2.0));
  const Vec2 n = body.unit_normal(kPi / 2.0);
  CHECK(n.x1 == doctest::Approx(-1.0));
  CHECK(n.x2 == doctest::Approx(0.0));

  // Perimeter of the unit circle body.
  const auto circle = BodyShape::make_ellipse(1.0, 1.0);
  CHECK(circle.perimeter() == doctest::Approx(2.0 * kPi).epsilon(1e-5));
}

TEST_CASE("cusp curvature: analytic and finite-difference paths agree") {
  // Closed forms: kappa = b/a^2.
  CHECK(cusp_curvature(BodyShape::make_ellipse(1.0, 2.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cusp_curvature(BodyShape::make_ellipse(2.0, 2.0)) ==
        doctest::Approx(0.5).epsilon(1e-12));

  // Tabulated circle of radius 1 centered (0,1): profile x^2/2 + O(x^4),
  // curvature 1, computed through the finite-difference path.
  const auto circ = BodyShape::make_tabulated(ellipse_samples(1.0, 1.0, 512));
  CHECK(cusp_curvature(circ) == doctest::Approx(1.0).epsilon(2e-4));

  // Tabulated ellipse matches the analytic ellipse.
  const auto tab = BodyShape::make_tabulated(ellipse_samples(1.0, 2.0, 512));
  CHECK(cusp_curvature(tab) == doctest::Approx(2.0).epsilon(5e-4));
}

TEST_CASE("tabulated body: tangency, profiles, and normals track the ellipse") {
  const auto exact = BodyShape::make_ellipse(1.0, 2.0);
  const auto tab = BodyShape::make_tabulated(ellipse_samples(1.0, 2.0, 512));

  CHECK(tab.phi(0.0) == 0.0);
  CHECK(tab.dphi(0.0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(tab.half_width() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tab.depth() == doctest::Approx(4.0).epsilon(1e-6));

  for (const double x : {0.05, 0.15, 0.3, -0.05, -0.25}) {
    CHECK(tab.phi(x) == doctest::Approx(exact.phi(x)).epsilon(1e-6));
    CHECK(tab.dphi(x) == doctest::Approx(exact.dphi(x)).epsilon(1e-4));
    CHECK(tab.lower(x) == doctest::Approx(exact.lower(x)).epsilon(1e-6));
  }
  for (const double y : {0.5, 1.0, 2.0, 3.0}) {
    CHECK(tab.width_at(y) == doctest::Approx(exact.width_at(y)).epsilon(1e-5));
  }

  // Normal direction at the widest point: into the body means -x1 there.
  // (The spline parameterizes by chord length, so locate the widest point by
  // scanning rather than reusing the ellipse parameter.)
  double best_t = 0.0, best_x = -1.0;
  for (int i = 0; i < 4096; ++i) {
    const double t = 2.0 * kPi * i / 4096;
    const Vec2 p = tab.point(t);
    if (p.x1 > best_x) { best_x = p.x1; best_t = t; }
  }
  const Vec2 nw = tab.unit_normal(best_t);
  CHECK(nw.x1 == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(std::abs(nw.x2) < 2e-3);
}

TEST_CASE("Condition-2 margin") {
  SUBCASE("integrand vanishes at the tangency point") {
    const auto body = BodyShape::make_ellipse(1.0, 2.0);
    const Vec2 p = body.point(0.0);
    const Vec2 n = body.unit_normal(0.0);
    CHECK(std::abs(integrand_condition2(p, n)) < 1e-14);
  }

  SUBCASE("vertical-major ellipse satisfies the condition") {
    const auto body = BodyShape::make_ellipse(1.0, 2.0);
    const double m = mazya_margin(body, 256);
    CHECK(m >= 0.0);
    // Regression pin: the minimum sits at the tangency point for this shape.
    CHECK(m == doctest::Approx(0.0).epsilon(1e-10));
  }

  SUBCASE("horizontal-major ellipse violates the condition") {
    const auto body = BodyShape::make_ellipse(2.0, 1.0);
    const double m = mazya_margin(body, 256);
    CHECK(m < 0.0);
    CHECK(m == doctest::Approx(-8.2069).epsilon(1e-3));  // regression value
  }

  SUBCASE("flipping the normal flips the integrand sign") {
    const auto body = BodyShape::make_ellipse(1.0, 2.0);
    const double t = 1.3;
    const Vec2 p = body.point(t);
    const Vec2 n = body.unit_normal(t);
    const double v = integrand_condition2(p, n);
    const Vec2 nin{-n.x1, -n.x2};
    CHECK(integrand_condition2(p, nin) == doctest::Approx(-v).epsilon(1e-14));
    CHECK(v != 0.0);
  }

  SUBCASE("sample-refinement invariance") {
    const auto body = BodyShape::make_ellipse(2.0, 1.0);
    const double m1 = mazya_margin(body, 128);
    const double m2 = mazya_margin(body, 512);
    CHECK(m1 == doctest::Approx(m2).epsilon(5e-3));
  }
}

TEST_CASE("truncated domain validation") {
  const auto body = BodyShape::make_ellipse(1.0, 2.0);
  const double nu = 1.0;

  SUBCASE("accepts a standard configuration") {
    const auto dom = truncate_domain(body, 0.0, 10.0 / nu, 8.0 / nu,
                                     {0.02, 0.2}, nu);
    CHECK(dom.N == doctest::Approx(2.0));  // max(1.5*1, 2/1)
    CHECK(dom.L == doctest::Approx(10.0));
    CHECK(dom.fit_window[0] == doctest::Approx(0.02));
  }

  SUBCASE("rejects shallow depth truncation") {
    CHECK_THROWS_AS(
        truncate_domain(body, 0.0, 10.0, 1.0, {0.02, 0.2}, nu),
        Error);
  }

  SUBCASE("rejects a fit window reaching past the profile region") {
    CHECK_THROWS_AS(
        truncate_domain(body, 0.0, 10.0, 8.0, {0.02, 0.9}, nu),
        Error);
  }

  SUBCASE("rejects lateral truncation inside the cutoff region") {
    CHECK_THROWS_AS(
        truncate_domain(body, 0.0, 3.9, 8.0, {0.02, 0.2}, nu, 2.0),
        Error);
  }

  SUBCASE("rejects a window below the excision radius") {
    CHECK_THROWS_AS(
        truncate_domain(body, 0.05, 10.0, 8.0, {0.02, 0.2}, nu),
        Error);
  }
}
