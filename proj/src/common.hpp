// SPDX-License-Identifier: MIT
//
// cuspwave/common: shared scalar types, error handling and quadrature rules.
//
// Everything in the engine works with complex<double>; the only global
// conventions fixed here are the coordinate frame (x2 points DOWN into the
// water, the free surface is x2 = 0) and the principal-branch complex square
// root with "limit from above" on the negative real axis, which every module
// must use consistently when deriving wave exponents.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cuspwave {

using Complex = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr Complex kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// All precondition/validation failures throw Error; the C API layer converts
// them into status codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void check(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

// ---------------------------------------------------------------------------
// Geometry scalars
// ---------------------------------------------------------------------------

struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }

// ---------------------------------------------------------------------------
// Branch-consistent square root
// ---------------------------------------------------------------------------

// Principal branch, with the cut on the negative real axis approached from
// above: sqrt(-r ± 0i) = +i sqrt(r).  Exactly real-negative inputs are the
// subcritical ε = 0 case; the limit from above makes Λ⁻ = 1/2 - i√λ carry the
// larger real part there, reproducing the real decaying/growing exponent pair.
inline Complex sqrt_limit_above(Complex z) {
  if (z.imag() == 0.0) z = Complex(z.real(), +0.0);
  return std::sqrt(z);
}

// ---------------------------------------------------------------------------
// Quadrature rules
// ---------------------------------------------------------------------------

struct Quadrature1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss–Legendre rule on [-1, 1] (Newton iteration on P_n; deterministic).
Quadrature1D gauss_legendre(int n);

// Gauss–Laguerre rule for ∫₀^∞ g(t) e^{-t} dt ≈ Σ w_i g(t_i) (Golub–Welsch).
Quadrature1D gauss_laguerre(int n);

// Maps a [-1,1] rule onto [a, b]; weights include the interval scaling.
Quadrature1D map_to_interval(const Quadrature1D& base, double a, double b);

// Composite Gauss–Legendre rule over consecutive panels given by breakpoints.
Quadrature1D panel_rule(const std::vector<double>& breakpoints, int per_panel);

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

// C² quintic smoothstep: 0 for t ≤ 0, 1 for t ≥ 1, 6t⁵-15t⁴+10t³ between.
inline double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
inline double smoothstep5_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return t * t * (30.0 + t * (-60.0 + 30.0 * t));
}
inline double smoothstep5_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return t * (60.0 + t * (-180.0 + 120.0 * t));
}

}  // namespace cuspwave
