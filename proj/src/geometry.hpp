// SPDX-License-Identifier: MIT
//
// cuspwave/geometry: the submerged body tangent to the free surface, its
// cusp profile, normals, the Condition-2 margin, and the truncated domain.
//
// Frame: x2 points DOWN into the water; the free surface Γ is x2 = 0 and the
// water occupies x2 > 0 outside the body.  The body boundary S is a closed
// smooth curve lying in x2 ≥ 0 and touching Γ only at the origin O.  Near O
// the water forms two cusp channels  { 0 < x2 < φ(x1), 0 < ±x1 < τ }  with
//
//     φ(0) = φ′(0) = 0,   κ := φ″(0) > 0,
//
// φ strictly monotone on each side of 0.  For the ellipse with horizontal
// semi-axis a and vertical semi-axis b (centered at (0, b)):
//
//     φ(x1)  = b − b·sqrt(1 − x1²/a²),        κ = b/a²,
//     φlo(x1) = b + b·sqrt(1 − x1²/a²)          (deep side of the body).
//
// Normal convention: "external to the water domain Ω" means pointing out of
// the water INTO the body.  It is fixed by n·(centroid(body) − x) > 0 near the
// body's widest point, and the Condition-2 integrand
//
//     x1(x1² − x2²) n1 + 2 x1² x2 · n2
//
// is evaluated with this normal (its nonnegativity on S is the Maz'ya
// uniqueness condition for vertical-major bodies).

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "common.hpp"

namespace cuspwave::geometry {

class BodyShape {
 public:
  // Default-constructed shape is the "no body" case, same as make_none().
  BodyShape() = default;

  // Ellipse tangent to the surface at O: center (0, b), semi-axes (a, b).
  static BodyShape make_ellipse(double a, double b);

  // Closed curve through (s, x1, x2) samples, periodic cubic interpolation in
  // the supplied parameter s.  Samples must trace the boundary once, with the
  // tangency point O = (0,0) included (x1 = x2 = 0 at some sample); enough
  // points near O are required for the tangency invariants to hold to 1e-4.
  static BodyShape make_tabulated(
      const std::vector<std::array<double, 3>>& samples);

  // No body at all: flat half-plane runs (oracle comparisons).
  static BodyShape make_none();

  bool empty() const { return kind_ == Kind::None; }
  bool is_ellipse() const { return kind_ == Kind::Ellipse; }
  double a() const { return a_; }
  double b() const { return b_; }

  // --- cusp profile ------------------------------------------------------
  double tau() const { return tau_; }
  double phi(double x1) const;    // channel profile, |x1| within the body width
  double dphi(double x1) const;   // dφ/dx1
  double ddphi(double x1) const;  // d²φ/dx1²
  double lower(double x1) const;  // deep-side boundary φlo(x1)
  double dlower(double x1) const;
  double half_width() const { return half_width_; }  // max |x1| over the body
  double depth() const { return depth_; }            // max x2 over the body

  // Body half-width w(x2): boundary points at depth x2 sit at x1 = ±w(x2),
  // for x2 strictly between 0 and depth().  (Flank meshing.)
  double width_at(double x2) const;
  double dwidth_at(double x2) const;

  // --- parametric boundary -----------------------------------------------
  // t ∈ [0, 2π), t = 0 at O, increasing t enters the x1 > 0 side first.
  Vec2 point(double t) const;
  Vec2 tangent(double t) const;      // d(point)/dt, not normalized
  Vec2 unit_normal(double t) const;  // external to the water (into the body)
  double perimeter() const;

 private:
  enum class Kind { Ellipse, Tabulated, None };

  struct Spline;  // periodic cubic spline data for tabulated bodies

  void finish_setup();  // derives tau_, widths, validates tangency

  Kind kind_ = Kind::None;
  double a_ = 0.0, b_ = 0.0;       // ellipse semi-axes
  double tau_ = 0.0;               // profile window
  double half_width_ = 0.0;        // max |x1|
  double depth_ = 0.0;             // max x2
  std::shared_ptr<const Spline> spline_;  // tabulated only
};

// φ″(0): analytic when available, otherwise second-order central difference
// with step h = τ/100 plus one Richardson refinement.  Fails if κ ≤ 0.
double cusp_curvature(const BodyShape& body);

// Minimum over an arclength-uniform sample of S of the Condition-2 integrand
// x1(x1²−x2²)n1 + 2x1²x2·n2 with the external-to-water normal.  n_samples ≥ 64.
double mazya_margin(const BodyShape& body, int n_samples);

// ---------------------------------------------------------------------------
// Truncated computational domain
// ---------------------------------------------------------------------------

struct DomainSpec {
  BodyShape body;
  double delta = 0.0;  // cusp excision: channel region |x1| < delta removed
  double L = 0.0;      // lateral truncation |x1| <= L
  double D = 0.0;      // depth truncation x2 <= D
  double N = 0.0;      // infinity-cutoff start (body and sources in |x1| < N)
  std::array<double, 2> fit_window{0.0, 0.0};  // (δ1, δ2) for exponent fits
  double nu = 0.0;     // surface spectral parameter (used by the validators)
};

// Validates: window ordering δ ≤ δ1 < δ2 < τ, L > 2N, D·ν ≥ 8.
// N = 0 selects the default max(1.5·half_width, 2/ν).
// delta = 0 means "grade into the cusp": the mesher then excises at the
// default δ_mesh = δ1/4 and applies the configured tip face condition there.
DomainSpec truncate_domain(const BodyShape& body, double delta, double L,
                           double D, std::array<double, 2> fit_window,
                           double nu, double N = 0.0);

}  // namespace cuspwave::geometry
