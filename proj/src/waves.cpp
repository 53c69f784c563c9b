// SPDX-License-Identifier: MIT
//
// Wave family evaluation: spectral exponents, cusp profile polynomials,
// cutoff ramps, and the analytic derivatives used in data construction.

#include "waves.hpp"

#include <cmath>

namespace cuspwave::waves {

Regime classify_regime(double nu, double kappa) {
  check(nu > 0.0 && kappa > 0.0, "classify_regime: need nu > 0, kappa > 0");
  const double thr = kappa / 8.0;
  if (std::abs(nu - thr) <= 1e-12 * std::max(nu, thr)) return Regime::Threshold;
  return nu > thr ? Regime::Supercritical : Regime::Subcritical;
}

double omega(double nu, double kappa) {
  check(classify_regime(nu, kappa) == Regime::Supercritical,
        "omega: defined only in the supercritical regime (nu > kappa/8)");
  return std::sqrt(2.0 * nu / kappa - 0.25);
}

SpectralContext make_context(double nu, double kappa, double eps) {
  check(nu > 0.0, "make_context: need nu > 0");
  check(kappa > 0.0, "make_context: need kappa > 0");
  check(eps >= 0.0, "make_context: need eps >= 0");
  SpectralContext c;
  c.nu = nu;
  c.kappa = kappa;
  c.eps = eps;
  c.regime = classify_regime(nu, kappa);
  c.lambda = 2.0 * (nu - 2.0 * kI * eps) / kappa - 0.25;
  const Complex root = sqrt_limit_above(c.lambda);
  c.lambda_plus = 0.5 + kI * root;
  c.lambda_minus = 0.5 - kI * root;
  c.omega = (c.regime == Regime::Supercritical)
                ? std::sqrt(2.0 * nu / kappa - 0.25)
                : 0.0;
  return c;
}

std::tuple<Complex, Complex, Complex> lambda_and_exponents(
    const SpectralContext& ctx) {
  return {ctx.lambda, ctx.lambda_plus, ctx.lambda_minus};
}

Complex s_infinity(const SpectralContext& ctx) {
  // Principal square root of ν² − iε lies in the fourth quadrant: Im s ≤ 0.
  return std::sqrt(Complex(ctx.nu * ctx.nu, -ctx.eps));
}

namespace {

// Quadratic profile P(z) = c0 + c1 z + c2 z² with derivatives.
struct Poly2 {
  Complex c0, c1, c2;
  Complex val(double z) const { return c0 + z * (c1 + z * c2); }
  Complex d1(double z) const { return c1 + 2.0 * z * c2; }
  Complex d2() const { return 2.0 * c2; }
};

// Q±_ε expanded in powers of z:
//   (κ/2)(ν−iε)(z²/2 − z + 1/3) − (κ/2)(κΛ + iε)(z²/2 − 1/6).
Poly2 q_poly(const SpectralContext& ctx, Complex Lam) {
  const Complex a = 0.5 * ctx.kappa * Complex(ctx.nu, -ctx.eps);
  const Complex b = 0.5 * ctx.kappa * (ctx.kappa * Lam + kI * ctx.eps);
  Poly2 p;
  p.c0 = a / 3.0 + b / 6.0;
  p.c1 = -a;
  p.c2 = 0.5 * (a - b);
  return p;
}

// Threshold extra profile −(κ²/2)(z²/2 − 1/6).
Poly2 q_extra_poly(const SpectralContext& ctx) {
  Poly2 p;
  p.c0 = ctx.kappa * ctx.kappa / 12.0;
  p.c1 = 0.0;
  p.c2 = -ctx.kappa * ctx.kappa / 4.0;
  return p;
}

Complex branch_exponent(const SpectralContext& ctx, int branch) {
  check(branch == +1 || branch == -1, "waves: branch must be +1 or -1");
  return branch > 0 ? ctx.lambda_plus : ctx.lambda_minus;
}

}  // namespace

Complex q_profile(const SpectralContext& ctx, int branch, double z) {
  check(z >= 0.0 && z <= 1.0, "q_profile: z must lie in [0, 1]");
  return q_poly(ctx, branch_exponent(ctx, branch)).val(z);
}

Complex q_profile_threshold_extra(const SpectralContext& ctx, double z) {
  check(z >= 0.0 && z <= 1.0, "q_profile: z must lie in [0, 1]");
  check(ctx.regime == Regime::Threshold,
        "q_profile_threshold_extra: threshold regime only");
  return q_extra_poly(ctx).val(z);
}

std::pair<double, double> subcritical_exponents(const SpectralContext& ctx) {
  check(ctx.regime == Regime::Subcritical,
        "subcritical_exponents: subcritical regime only");
  const double s = std::sqrt(0.25 - 2.0 * ctx.nu / ctx.kappa);
  return {-0.5 + s, -0.5 - s};
}

// ---------------------------------------------------------------------------
// Cutoffs
// ---------------------------------------------------------------------------

double chi_cutoff(const CutoffSpec& c, double t) {
  check(c.N > 0.0, "chi_cutoff: need N > 0");
  if (t <= c.N) return 0.0;
  if (t >= 2.0 * c.N) return 1.0;
  return smoothstep5((t - c.N) / c.N);
}

double chi_cutoff_d1(const CutoffSpec& c, double t) {
  if (t <= c.N || t >= 2.0 * c.N) return 0.0;
  return smoothstep5_d1((t - c.N) / c.N) / c.N;
}

double chi_cutoff_d2(const CutoffSpec& c, double t) {
  if (t <= c.N || t >= 2.0 * c.N) return 0.0;
  return smoothstep5_d2((t - c.N) / c.N) / (c.N * c.N);
}

double zeta_cutoff(const CutoffSpec& c, int side, double x1) {
  check(c.tau > 0.0, "zeta_cutoff: need tau > 0");
  check(side == +1 || side == -1, "zeta_cutoff: side must be +1 or -1");
  const double r = side * x1;  // distance into the correct side
  if (r <= 0.0) return 0.0;
  if (r <= 0.5 * c.tau) return 1.0;
  if (r >= c.tau) return 0.0;
  return 1.0 - smoothstep5((r - 0.5 * c.tau) / (0.5 * c.tau));
}

double zeta_cutoff_d1(const CutoffSpec& c, int side, double x1) {
  const double r = side * x1;
  if (r <= 0.5 * c.tau || r >= c.tau) return 0.0;
  const double h = 0.5 * c.tau;
  return -side * smoothstep5_d1((r - h) / h) / h;
}

double zeta_cutoff_d2(const CutoffSpec& c, int side, double x1) {
  const double r = side * x1;
  if (r <= 0.5 * c.tau || r >= c.tau) return 0.0;
  const double h = 0.5 * c.tau;
  return -smoothstep5_d2((r - h) / h) / (h * h);
}

// ---------------------------------------------------------------------------
// Infinity waves
// ---------------------------------------------------------------------------

Complex infinity_wave(int j, Direction dir, const SpectralContext& ctx,
                      const CutoffSpec& cutoff, Vec2 x) {
  check(j == 1 || j == 2, "infinity_wave: j must be 1 or 2");
  const double side = (j == 1) ? x.x1 : -x.x1;
  const double ramp = chi_cutoff(cutoff, side);
  if (ramp == 0.0) return 0.0;
  const double depth = std::exp(-ctx.nu * x.x2);
  if (dir == Direction::Outgoing) {
    const Complex s = s_infinity(ctx);
    const Complex phase = (j == 1) ? -kI * s * x.x1 : kI * s * x.x1;
    return ramp * depth * std::exp(phase);
  }
  // Incoming waves are the ε = 0 complex conjugates of the outgoing ones.
  const Complex phase = (j == 1) ? kI * ctx.nu * x.x1 : -kI * ctx.nu * x.x1;
  return ramp * depth * std::exp(phase);
}

// ---------------------------------------------------------------------------
// Cusp modes: value + analytic derivatives
// ---------------------------------------------------------------------------

namespace {

// Radial factor A(r) with two derivatives: r^α or r^α ln r.
struct Radial {
  Complex a, a1, a2;  // A, A', A''
};

Radial radial_power(double r, Complex alpha) {
  const Complex ra = std::pow(Complex(r, 0.0), alpha);
  Radial out;
  out.a = ra;
  out.a1 = alpha * ra / r;
  out.a2 = alpha * (alpha - 1.0) * ra / (r * r);
  return out;
}

Radial radial_power_log(double r, Complex alpha) {
  const Complex ra = std::pow(Complex(r, 0.0), alpha);
  const double lg = std::log(r);
  Radial out;
  out.a = ra * lg;
  out.a1 = ra / r * (alpha * lg + 1.0);
  out.a2 = ra / (r * r) * (alpha * (alpha - 1.0) * lg + 2.0 * alpha - 1.0);
  return out;
}

// Accumulates one term A(|x1|) P(z) of a cusp mode into the evaluation.
// z = x2/φ(x1);  z' = −z φ'/φ;  z'' = z(2φ'²/φ² − φ''/φ);  ∂₂z = 1/φ.
struct ChannelFrame {
  double sgn;                   // sign of x1
  double phi, dphi, ddphi, z;   // at the signed x1
  double zp, zpp;               // ∂₁z, ∂₁²z
};

void accumulate(const ChannelFrame& f, const Radial& A, const Poly2& P,
                ModeEval& out) {
  const Complex p = P.val(f.z), p1 = P.d1(f.z), p2 = P.d2();
  out.value += A.a * p;
  out.d1 += f.sgn * A.a1 * p + A.a * p1 * f.zp;
  out.d2 += A.a * p1 / f.phi;
  out.lap += A.a2 * p + 2.0 * f.sgn * A.a1 * p1 * f.zp +
             A.a * (p2 * f.zp * f.zp + p1 * f.zpp) + A.a * p2 / (f.phi * f.phi);
}

}  // namespace

ModeEval cusp_mode_eval(CuspModeKind kind, int branch,
                        const SpectralContext& ctx,
                        const geometry::BodyShape& body, Vec2 x) {
  check(x.x1 != 0.0, "cusp_mode_eval: x1 = 0 is the singular point");
  check(!body.empty(), "cusp_mode_eval: need a body with cusp channels");

  ChannelFrame f;
  f.sgn = (x.x1 > 0.0) ? 1.0 : -1.0;
  f.phi = body.phi(x.x1);
  f.dphi = body.dphi(x.x1);
  f.ddphi = body.ddphi(x.x1);
  check(f.phi > 0.0, "cusp_mode_eval: degenerate channel height");
  f.z = x.x2 / f.phi;
  f.zp = -f.z * f.dphi / f.phi;
  f.zpp = f.z * (2.0 * f.dphi * f.dphi / (f.phi * f.phi) - f.ddphi / f.phi);

  const double r = std::abs(x.x1);
  const Poly2 one{1.0, 0.0, 0.0};
  ModeEval out{};

  switch (kind) {
    case CuspModeKind::Standard: {
      const Complex Lam = branch_exponent(ctx, branch);
      accumulate(f, radial_power(r, -Lam), one, out);
      accumulate(f, radial_power(r, 2.0 - Lam), q_poly(ctx, Lam), out);
      break;
    }
    case CuspModeKind::ThresholdMinus: {
      check(ctx.regime == Regime::Threshold,
            "cusp_mode_eval: threshold kind in non-threshold regime");
      accumulate(f, radial_power(r, -0.5), one, out);
      accumulate(f, radial_power(r, 1.5), q_poly(ctx, 0.5), out);
      break;
    }
    case CuspModeKind::ThresholdPlus: {
      check(ctx.regime == Regime::Threshold,
            "cusp_mode_eval: threshold kind in non-threshold regime");
      accumulate(f, radial_power_log(r, -0.5), one, out);
      accumulate(f, radial_power_log(r, 1.5), q_poly(ctx, 0.5), out);
      accumulate(f, radial_power(r, 1.5), q_extra_poly(ctx), out);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cusp waves (normalized traveling forms)
// ---------------------------------------------------------------------------

Complex cusp_wave(int j, Direction dir, const SpectralContext& ctx,
                  const CutoffSpec& cutoff, const geometry::BodyShape& body,
                  Vec2 x) {
  check(j == 3 || j == 4, "cusp_wave: j must be 3 or 4");
  check(ctx.regime == Regime::Supercritical,
        "cusp_wave: supercritical regime only");
  check(x.x1 != 0.0, "cusp_wave: x1 = 0 is the singular point");
  const int side = (j == 3) ? +1 : -1;
  const double ramp = zeta_cutoff(cutoff, side, x.x1);
  if (ramp == 0.0) return 0.0;
  const int branch = (dir == Direction::Outgoing) ? -1 : +1;
  const ModeEval m = cusp_mode_eval(CuspModeKind::Standard, branch, ctx, body, x);
  const double norm = 1.0 / std::sqrt(ctx.omega * ctx.kappa);
  return norm * m.value * ramp;
}

Complex threshold_cusp_wave(int j, Direction dir, const SpectralContext& ctx,
                            const CutoffSpec& cutoff,
                            const geometry::BodyShape& body, Vec2 x) {
  check(j == 3 || j == 4, "threshold_cusp_wave: j must be 3 or 4");
  check(ctx.regime == Regime::Threshold,
        "threshold_cusp_wave: threshold regime only");
  check(x.x1 != 0.0, "threshold_cusp_wave: x1 = 0 is the singular point");
  const int side = (j == 3) ? +1 : -1;
  const double ramp = zeta_cutoff(cutoff, side, x.x1);
  if (ramp == 0.0) return 0.0;
  const Complex vp =
      cusp_mode_eval(CuspModeKind::ThresholdPlus, 0, ctx, body, x).value;
  const Complex vm =
      cusp_mode_eval(CuspModeKind::ThresholdMinus, 0, ctx, body, x).value;
  // u₃± = (v⁺ ± i v⁻)ζ⁺ and u₄± = (v⁺ ∓ i v⁻)ζ⁻.
  double sign = (dir == Direction::Incoming) ? +1.0 : -1.0;
  if (j == 4) sign = -sign;
  return (vp + sign * kI * vm) * ramp;
}

}  // namespace cuspwave::waves
