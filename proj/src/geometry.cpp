// SPDX-License-Identifier: MIT
//
// Body geometry: ellipse (closed-form) and tabulated (periodic cubic spline)
// bodies, cusp profile queries, Condition-2 margin, domain truncation.

#include "geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace cuspwave::geometry {

// ---------------------------------------------------------------------------
// Periodic cubic spline (tabulated bodies)
// ---------------------------------------------------------------------------

// Interpolates one coordinate as a periodic C² cubic in a chord-length-like
// parameter.  Knot count is small (body samples), so the cyclic system is
// solved densely.
namespace {

// Solves g(t) = target for t in [lo, hi] by bisection; g must be monotone.
template <class F>
double bisect(F&& g, double lo, double hi, double target) {
  double glo = g(lo) - target;
  const double ghi = g(hi) - target;
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  check(glo * ghi < 0.0, "geometry: bisection bracket failure");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid) - target;
    if (gm == 0.0 || hi - lo < 1e-15 * (1.0 + std::abs(mid))) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct PeriodicSpline1 {
  std::vector<double> t;   // knots, strictly increasing, t.size() = n
  double period = 0.0;     // t[n-1] + closing interval = t[0] + period
  std::vector<double> y;   // values at knots
  std::vector<double> m;   // second derivatives at knots

  void build(const std::vector<double>& knots, double per,
             const std::vector<double>& values) {
    t = knots;
    period = per;
    y = values;
    const int n = static_cast<int>(t.size());
    check(n >= 4, "tabulated body: need at least 4 samples");
    check(n <= 8192, "tabulated body: too many samples (max 8192)");
    auto h = [&](int i) {
      return (i + 1 < n ? t[i + 1] : t[0] + period) - t[i];
    };
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      const int im = (i + n - 1) % n;
      const double hm = h(im), hi = h(i);
      A(i, im) += hm / 6.0;
      A(i, i) += (hm + hi) / 3.0;
      A(i, (i + 1) % n) += hi / 6.0;
      const double yp = y[(i + 1) % n], ym = y[im];
      r(i) = (yp - y[i]) / hi - (y[i] - ym) / hm;
    }
    Eigen::VectorXd sol = A.fullPivLu().solve(r);
    m.assign(sol.data(), sol.data() + n);
  }

  // Locates the knot interval for parameter u (wrapped into one period).
  std::pair<int, double> locate(double u) const {
    double w = std::fmod(u - t[0], period);
    if (w < 0) w += period;
    w += t[0];
    const auto it = std::upper_bound(t.begin(), t.end(), w);
    const int i = std::max(0, static_cast<int>(it - t.begin()) - 1);
    return {i, w};
  }

  double h_of(int i) const {
    const int n = static_cast<int>(t.size());
    return (i + 1 < n ? t[i + 1] : t[0] + period) - t[i];
  }

  double eval(double u) const {
    auto [i, w] = locate(u);
    const int n = static_cast<int>(t.size());
    const int j = (i + 1) % n;
    const double hi = h_of(i), A = (t[i] + hi - w) / hi, B = 1.0 - A;
    return A * y[i] + B * y[j] +
           ((A * A * A - A) * m[i] + (B * B * B - B) * m[j]) * hi * hi / 6.0;
  }

  double deriv(double u) const {
    auto [i, w] = locate(u);
    const int n = static_cast<int>(t.size());
    const int j = (i + 1) % n;
    const double hi = h_of(i), A = (t[i] + hi - w) / hi, B = 1.0 - A;
    return (y[j] - y[i]) / hi -
           (3.0 * A * A - 1.0) / 6.0 * hi * m[i] +
           (3.0 * B * B - 1.0) / 6.0 * hi * m[j];
  }

  double deriv2(double u) const {
    auto [i, w] = locate(u);
    const int n = static_cast<int>(t.size());
    const int j = (i + 1) % n;
    const double hi = h_of(i), A = (t[i] + hi - w) / hi, B = 1.0 - A;
    return A * m[i] + B * m[j];
  }
};

}  // namespace

struct BodyShape::Spline {
  PeriodicSpline1 cx;  // x1(t)
  PeriodicSpline1 cy;  // x2(t)
  double t0 = 0.0;     // parameter of the tangency point O
  double orient = 1.0; // +1 if increasing t enters x1 > 0 first
  double nsign = 1.0;  // sign making (-T2, T1)·orient-rotation external to water
  double t_wplus = 0.0, t_wminus = 0.0;   // widest-point parameters (±side)
  double t_bottom = 0.0;                  // deepest-point parameter
  Vec2 centroid{0.0, 0.0};

  // Body-frame parameter: u = t0 + orient * t, so t = 0 ↦ O and small t > 0
  // moves to x1 > 0.
  Vec2 at(double t) const {
    const double u = t0 + orient * t;
    return {cx.eval(u), cy.eval(u)};
  }
  Vec2 d1(double t) const {
    const double u = t0 + orient * t;
    return {orient * cx.deriv(u), orient * cy.deriv(u)};
  }
  Vec2 d2(double t) const {
    const double u = t0 + orient * t;
    return {cx.deriv2(u), cy.deriv2(u)};
  }
  double period() const { return cx.period; }

  // Parameter of the profile point above x1 ≠ 0: the branch from O to the
  // widest point on the same side, where x1(t) is monotone (convex body).
  double profile_param(double x1) const {
    if (x1 > 0.0)
      return bisect([&](double t) { return at(t).x1; }, 0.0, t_wplus, x1);
    return bisect([&](double t) { return at(t).x1; }, t_wminus, period(), x1);
  }
};

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

BodyShape BodyShape::make_ellipse(double a, double b) {
  check(a > 0.0 && b > 0.0, "make_ellipse: semi-axes must be positive");
  BodyShape s;
  s.kind_ = Kind::Ellipse;
  s.a_ = a;
  s.b_ = b;
  s.half_width_ = a;
  s.depth_ = 2.0 * b;
  s.tau_ = 0.8 * a;  // φ is strictly monotone on each side for the ellipse
  return s;
}

BodyShape BodyShape::make_none() { return BodyShape{}; }

BodyShape BodyShape::make_tabulated(
    const std::vector<std::array<double, 3>>& samples) {
  check(samples.size() >= 8, "make_tabulated: need at least 8 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    check(samples[i][0] > samples[i - 1][0],
          "make_tabulated: parameter s must be strictly increasing");

  // Internal parameterization by cumulative chord length (robust regardless
  // of the scale of the supplied s, which fixes only the ordering).
  const int n = static_cast<int>(samples.size());
  std::vector<double> t(n), px(n), py(n);
  t[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    px[i] = samples[i][1];
    py[i] = samples[i][2];
    check(py[i] >= -1e-12, "make_tabulated: samples must satisfy x2 >= 0");
    if (i > 0) {
      const double d = std::hypot(px[i] - px[i - 1], py[i] - py[i - 1]);
      check(d > 0.0, "make_tabulated: repeated sample point");
      t[i] = t[i - 1] + d;
    }
  }
  const double closing = std::hypot(px[0] - px[n - 1], py[0] - py[n - 1]);
  check(closing > 0.0, "make_tabulated: do not repeat the first sample");
  const double period = t[n - 1] + closing;

  auto sp = std::make_shared<Spline>();
  sp->cx.build(t, period, px);
  sp->cy.build(t, period, py);

  // Locate the tangency point: the minimum of x2(t) (must be ≈ 0).  Start at
  // the sample closest to the origin and polish with Newton on x2'(t) = 0.
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (std::hypot(px[i], py[i]) < std::hypot(px[i0], py[i0])) i0 = i;
  double u = t[i0];
  for (int it = 0; it < 60; ++it) {
    const double d1 = sp->cy.deriv(u), d2 = sp->cy.deriv2(u);
    if (std::abs(d2) < 1e-14) break;
    const double du = d1 / d2;
    u -= du;
    if (std::abs(du) < 1e-14 * period) break;
  }
  sp->t0 = u;
  const Vec2 O{sp->cx.eval(u), sp->cy.eval(u)};
  check(std::hypot(O.x1, O.x2) < 1e-4,
        "make_tabulated: tangency point not found at the origin (|O| >= 1e-4)");

  // Orientation: increasing body-frame t must enter x1 > 0.
  sp->orient = (sp->cx.deriv(u) >= 0.0) ? 1.0 : -1.0;

  Vec2 c{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    c.x1 += px[i] / n;
    c.x2 += py[i] / n;
  }
  sp->centroid = c;

  BodyShape s;
  s.kind_ = Kind::Tabulated;
  s.spline_ = sp;
  s.finish_setup();
  return s;
}

// Derives widths, depths, widest/bottom parameters, the normal sign, and the
// profile window for tabulated bodies; validates tangency.
void BodyShape::finish_setup() {
  auto sp = std::const_pointer_cast<Spline>(spline_);
  const double per = sp->period();

  // Scan for extremes in the body frame.
  const int ns = 4096;
  double wmax = 0.0, wmin = 0.0, dmax = 0.0;
  double t_wplus = 0.0, t_wminus = 0.0, t_bottom = 0.0;
  for (int i = 0; i < ns; ++i) {
    const double tt = per * i / ns;
    const Vec2 p = sp->at(tt);
    if (p.x1 > wmax) { wmax = p.x1; t_wplus = tt; }
    if (p.x1 < wmin) { wmin = p.x1; t_wminus = tt; }
    if (p.x2 > dmax) { dmax = p.x2; t_bottom = tt; }
  }
  auto polish = [&](double tt, auto deriv_of) {
    for (int it = 0; it < 50; ++it) {
      const double h = 1e-6 * per;
      const double d1 = deriv_of(tt);
      const double d2 = (deriv_of(tt + h) - deriv_of(tt - h)) / (2.0 * h);
      if (std::abs(d2) < 1e-14) break;
      const double du = d1 / d2;
      tt -= du;
      if (std::abs(du) < 1e-13 * per) break;
    }
    return tt;
  };
  t_wplus = polish(t_wplus, [&](double x) { return sp->d1(x).x1; });
  t_wminus = polish(t_wminus, [&](double x) { return sp->d1(x).x1; });
  t_bottom = polish(t_bottom, [&](double x) { return sp->d1(x).x2; });
  sp->t_wplus = t_wplus;
  sp->t_wminus = t_wminus;
  sp->t_bottom = t_bottom;
  half_width_ = std::max(sp->at(t_wplus).x1, -sp->at(t_wminus).x1);
  depth_ = sp->at(t_bottom).x2;
  check(half_width_ > 0.0 && depth_ > 0.0, "tabulated body: degenerate shape");

  // Normal sign: at the widest point the into-body normal must point at the
  // centroid.
  {
    const Vec2 T = sp->d1(t_wplus);
    const Vec2 nc{-T.x2, T.x1};
    const Vec2 p = sp->at(t_wplus);
    const Vec2 toc{sp->centroid.x1 - p.x1, sp->centroid.x2 - p.x2};
    sp->nsign = (dot(nc, toc) >= 0.0) ? 1.0 : -1.0;
  }

  // Tangency invariants at tolerance 1e-4: φ(0) = 0 was checked; φ′(0) = 0
  // means the curve tangent at O is horizontal.
  {
    const Vec2 T = sp->d1(0.0);
    check(std::abs(T.x2) <= 1e-4 * std::max(1.0, std::abs(T.x1)),
          "tabulated body: boundary not tangent to the surface at O");
  }

  // Profile window: stop at the first inflection of φ, at the first steep
  // slope (|φ′| > 2, approaching the widest point), or at 0.95·half-width.
  double infl = half_width_;
  {
    const int m = 512;
    double prev = 1.0;
    for (int i = 1; i <= m; ++i) {
      const double x = 0.95 * half_width_ * i / m;
      if (x < 2e-3 * half_width_) continue;
      try {
        if (std::abs(dphi(x)) > 2.0) { infl = x; break; }
        const double cur = ddphi(x);
        if (prev > 0.0 && cur <= 0.0) { infl = x; break; }
        prev = cur;
      } catch (const Error&) {
        infl = x;  // vertical tangent reached: window ends here
        break;
      }
    }
  }
  tau_ = 0.8 * std::min(half_width_, infl);
  check(tau_ > 0.0, "tabulated body: empty profile window");
}

// ---------------------------------------------------------------------------
// Profile queries
// ---------------------------------------------------------------------------

namespace {

}  // namespace

double BodyShape::phi(double x1) const {
  switch (kind_) {
    case Kind::Ellipse: {
      const double u = x1 / a_;
      check(std::abs(u) <= 1.0, "phi: |x1| exceeds the body half-width");
      return b_ - b_ * std::sqrt(std::max(0.0, 1.0 - u * u));
    }
    case Kind::Tabulated: {
      check(std::abs(x1) <= half_width_, "phi: |x1| exceeds the body half-width");
      if (x1 == 0.0) return 0.0;
      return spline_->at(spline_->profile_param(x1)).x2;
    }
    default:
      fail("phi: no body");
  }
}

double BodyShape::dphi(double x1) const {
  switch (kind_) {
    case Kind::Ellipse: {
      const double u = x1 / a_;
      check(std::abs(u) < 1.0, "dphi: |x1| must be inside the body half-width");
      return b_ * x1 / (a_ * a_ * std::sqrt(1.0 - u * u));
    }
    case Kind::Tabulated: {
      if (x1 == 0.0) return 0.0;
      const Vec2 T = spline_->d1(spline_->profile_param(x1));
      check(std::abs(T.x1) > 1e-14, "dphi: vertical tangent in the profile window");
      return T.x2 / T.x1;
    }
    default:
      fail("dphi: no body");
  }
}

double BodyShape::ddphi(double x1) const {
  switch (kind_) {
    case Kind::Ellipse: {
      const double u = x1 / a_;
      check(std::abs(u) < 1.0, "ddphi: |x1| must be inside the body half-width");
      const double c = 1.0 - u * u;
      return b_ / (a_ * a_ * c * std::sqrt(c));
    }
    case Kind::Tabulated: {
      const auto& sp = *spline_;
      if (x1 == 0.0) {
        const Vec2 T = sp.d1(0.0), S = sp.d2(0.0);
        check(std::abs(T.x1) > 1e-14, "ddphi: degenerate tangent at O");
        // Chain rule at the tangency point (T.x2 ≈ 0 there).
        return (S.x2 * T.x1 - T.x2 * S.x1) / (T.x1 * T.x1 * T.x1);
      }
      const double tt = sp.profile_param(x1);
      const Vec2 T = sp.d1(tt), S = sp.d2(tt);
      check(std::abs(T.x1) > 1e-14, "ddphi: vertical tangent in the profile window");
      return (S.x2 * T.x1 - T.x2 * S.x1) / (T.x1 * T.x1 * T.x1);
    }
    default:
      fail("ddphi: no body");
  }
}

double BodyShape::lower(double x1) const {
  switch (kind_) {
    case Kind::Ellipse: {
      const double u = x1 / a_;
      check(std::abs(u) <= 1.0, "lower: |x1| exceeds the body half-width");
      return b_ + b_ * std::sqrt(std::max(0.0, 1.0 - u * u));
    }
    case Kind::Tabulated: {
      const auto& sp = *spline_;
      // Deep branch: from the +widest point, through the bottom, to -widest.
      double tb0 = sp.t_wplus, tb1 = sp.t_wminus;
      while (tb1 <= tb0) tb1 += sp.period();
      const double tt =
          bisect([&](double t) { return sp.at(t).x1; }, tb0, tb1, x1);
      return sp.at(tt).x2;
    }
    default:
      fail("lower: no body");
  }
}

double BodyShape::dlower(double x1) const {
  switch (kind_) {
    case Kind::Ellipse: {
      const double u = x1 / a_;
      check(std::abs(u) < 1.0, "dlower: |x1| must be inside the body half-width");
      return -b_ * x1 / (a_ * a_ * std::sqrt(1.0 - u * u));
    }
    case Kind::Tabulated: {
      const auto& sp = *spline_;
      double tb0 = sp.t_wplus, tb1 = sp.t_wminus;
      while (tb1 <= tb0) tb1 += sp.period();
      const double tt = bisect([&](double t) { return sp.at(t).x1; }, tb0, tb1, x1);
      const Vec2 T = sp.d1(tt);
      check(std::abs(T.x1) > 1e-14, "dlower: vertical tangent");
      return T.x2 / T.x1;
    }
    default:
      fail("dlower: no body");
  }
}

double BodyShape::width_at(double x2) const {
  switch (kind_) {
    case Kind::Ellipse: {
      check(x2 >= 0.0 && x2 <= depth_, "width_at: depth outside the body");
      const double u = (x2 - b_) / b_;
      return a_ * std::sqrt(std::max(0.0, 1.0 - u * u));
    }
    case Kind::Tabulated: {
      check(x2 >= 0.0 && x2 <= depth_, "width_at: depth outside the body");
      const auto& sp = *spline_;
      // Right branch from O to the bottom: x2 monotone increasing (convex
      // body assumption).
      double tb = sp.t_bottom;
      if (tb <= 0.0) tb += sp.period();
      const double tt =
          bisect([&](double t) { return sp.at(t).x2; }, 0.0, tb, x2);
      return sp.at(tt).x1;
    }
    default:
      fail("width_at: no body");
  }
}

double BodyShape::dwidth_at(double x2) const {
  switch (kind_) {
    case Kind::Ellipse: {
      check(x2 > 0.0 && x2 < depth_, "dwidth_at: depth strictly inside body");
      const double u = (x2 - b_) / b_;
      const double c = std::sqrt(1.0 - u * u);
      check(c > 1e-14, "dwidth_at: degenerate");
      return -a_ * u / (b_ * c);
    }
    case Kind::Tabulated: {
      const auto& sp = *spline_;
      double tb = sp.t_bottom;
      if (tb <= 0.0) tb += sp.period();
      const double tt = bisect([&](double t) { return sp.at(t).x2; }, 0.0, tb, x2);
      const Vec2 T = sp.d1(tt);
      check(std::abs(T.x2) > 1e-14, "dwidth_at: horizontal tangent");
      return T.x1 / T.x2;
    }
    default:
      fail("dwidth_at: no body");
  }
}

// ---------------------------------------------------------------------------
// Parametric boundary
// ---------------------------------------------------------------------------

Vec2 BodyShape::point(double t) const {
  switch (kind_) {
    case Kind::Ellipse:
      return {a_ * std::sin(t), b_ - b_ * std::cos(t)};
    case Kind::Tabulated:
      return spline_->at(t * spline_->period() / (2.0 * kPi));
    default:
      fail("point: no body");
  }
}

Vec2 BodyShape::tangent(double t) const {
  switch (kind_) {
    case Kind::Ellipse:
      return {a_ * std::cos(t), b_ * std::sin(t)};
    case Kind::Tabulated: {
      const double scale = spline_->period() / (2.0 * kPi);
      const Vec2 T = spline_->d1(t * scale);
      return {T.x1 * scale, T.x2 * scale};
    }
    default:
      fail("tangent: no body");
  }
}

Vec2 BodyShape::unit_normal(double t) const {
  const Vec2 T = tangent(t);
  const double len = norm(T);
  check(len > 1e-14, "unit_normal: degenerate tangent at t = " + std::to_string(t));
  double sgn = 1.0;
  if (kind_ == Kind::Tabulated) sgn = spline_->nsign;
  // Ellipse parameterization: (-T2, T1)/|T| points into the body (checked at
  // the widest point t = π/2 where it equals (-1, 0)).
  return {sgn * (-T.x2) / len, sgn * T.x1 / len};
}

double BodyShape::perimeter() const {
  check(kind_ != Kind::None, "perimeter: no body");
  const int n = 4096;
  double len = 0.0;
  Vec2 prev = point(0.0);
  for (int i = 1; i <= n; ++i) {
    const Vec2 cur = point(2.0 * kPi * i / n);
    len += norm(cur - prev);
    prev = cur;
  }
  return len;
}

// ---------------------------------------------------------------------------
// Derived quantities
// ---------------------------------------------------------------------------

double cusp_curvature(const BodyShape& body) {
  check(!body.empty(), "cusp_curvature: no body");
  double kappa;
  if (body.is_ellipse()) {
    kappa = body.b() / (body.a() * body.a());
  } else {
    // Central difference with h = τ/100 plus one Richardson refinement
    // (fourth-order for the symmetric profile).
    const double h = body.tau() / 100.0;
    auto d2 = [&](double step) {
      return (body.phi(step) - 2.0 * body.phi(0.0) + body.phi(-step)) /
             (step * step);
    };
    const double c1 = d2(h), c2 = d2(h / 2.0);
    kappa = (4.0 * c2 - c1) / 3.0;
  }
  check(kappa > 0.0, "cusp_curvature: nonpositive curvature");
  return kappa;
}

double mazya_margin(const BodyShape& body, int n_samples) {
  check(!body.empty(), "mazya_margin: no body");
  check(n_samples >= 64, "mazya_margin: need n_samples >= 64");

  // Build an arclength table on a fine parameter grid, then resample
  // uniformly in arclength.
  const int fine = 16 * n_samples;
  std::vector<double> cum(fine + 1, 0.0);
  Vec2 prev = body.point(0.0);
  for (int i = 1; i <= fine; ++i) {
    const Vec2 cur = body.point(2.0 * kPi * i / fine);
    cum[i] = cum[i - 1] + norm(cur - prev);
    prev = cur;
  }
  const double total = cum[fine];

  double mn = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const double target = total * k / n_samples;
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    int i = std::max(0, static_cast<int>(it - cum.begin()) - 1);
    const double seg = cum[i + 1] - cum[i];
    const double frac = seg > 0.0 ? (target - cum[i]) / seg : 0.0;
    const double t = 2.0 * kPi * (i + frac) / fine;
    const Vec2 p = body.point(t);
    const Vec2 n = body.unit_normal(t);
    const double val = p.x1 * (p.x1 * p.x1 - p.x2 * p.x2) * n.x1 +
                       2.0 * p.x1 * p.x1 * p.x2 * n.x2;
    mn = std::min(mn, val);
  }
  return mn;
}

DomainSpec truncate_domain(const BodyShape& body, double delta, double L,
                           double D, std::array<double, 2> fit_window,
                           double nu, double N) {
  check(nu > 0.0, "truncate_domain: need nu > 0");
  check(delta >= 0.0, "truncate_domain: need delta >= 0");
  check(L > 0.0 && D > 0.0, "truncate_domain: need positive L, D");
  if (N <= 0.0) N = std::max(1.5 * body.half_width(), 2.0 / nu);
  check(L > 2.0 * N, "truncate_domain: need L > 2N (cutoff region inside)");
  check(D * nu >= 8.0, "truncate_domain: need D*nu >= 8 (depth truncation)");
  if (!body.empty()) {
    check(delta <= fit_window[0] && fit_window[0] < fit_window[1] &&
              fit_window[1] < body.tau(),
          "truncate_domain: need delta <= d1 < d2 < tau");
  }
  DomainSpec s;
  s.body = body;
  s.delta = delta;
  s.L = L;
  s.D = D;
  s.N = N;
  s.fit_window = fit_window;
  s.nu = nu;
  return s;
}

}  // namespace cuspwave::geometry
