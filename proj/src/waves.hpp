// SPDX-License-Identifier: MIT
//
// cuspwave/waves: closed-form incoming/outgoing wave families at infinity and
// in the cusp channels, for all regimes and all absorption ε ≥ 0.
//
// Spectral data.  With surface parameter ν > 0 and cusp curvature κ > 0,
//
//     λ_ε = 2(ν − 2iε)/κ − 1/4,      Λ±_ε = 1/2 ± i√λ_ε,
//
// with the principal square-root branch; on the negative real axis
// (subcritical, ε = 0) the limit is taken from above, so Λ⁻ carries the
// larger real part.  Regimes: supercritical ν > κ/8 (propagating cusp waves,
// ω = √(2ν/κ − 1/4), λ₀ = ω²), threshold ν = κ/8 (λ₀ = 0, logarithmic
// second solution), subcritical ν < κ/8 (two real exponents).
//
// Cusp waves.  In the channel 0 < x2 < φ(x1), with z = x2/φ(x1),
//
//     v±_ε(x) = |x1|^(−Λ±_ε) + |x1|^(2−Λ±_ε) Q±_ε(z),
//     Q±_ε(z) = (κ/2)(ν−iε)((z−1)²/2 − 1/6) − (κ/2)(κΛ±_ε + iε)(z²/2 − 1/6),
//
// and ∫₀¹ Q±_ε = 0, so the channel average of v± is exactly |x1|^(−Λ±).
// The normalized supercritical traveling waves are
//
//     u₃∓ = (ωκ)^(−1/2) v∓₀ ζτ⁺   (right cusp; − outgoing, + incoming),
//     u₄∓ = (ωκ)^(−1/2) v∓₀ ζτ⁻   (left cusp),
//
// outgoing exponent −1/2 + iω with Q⁻, incoming −1/2 − iω with Q⁺.  At the
// threshold, with the extra profile Q(z) = −(κ²/2)(z²/2 − 1/6),
//
//     v⁻ = |x1|^(−1/2) + |x1|^(3/2) Q₀⁻(z),
//     v⁺ = |x1|^(−1/2) ln|x1| + |x1|^(3/2) ln|x1| Q₀⁺(z) + |x1|^(3/2) Q(z),
//     u₃± = (v⁺ ± i v⁻) ζτ⁺,     u₄± = (v⁺ ∓ i v⁻) ζτ⁻.
//
// Infinity waves.  With s_ε = (ν² − iε)^(1/2) (principal branch, Im ≤ 0),
//
//     u₁⁻ = χ(x1) e^(−i s_ε x1 − ν x2),   u₂⁻ = χ(−x1) e^(+i s_ε x1 − ν x2),
//
// and the incoming waves are the ε = 0 complex conjugates.  χ ramps 0 → 1
// over [N, 2N]; ζτ± equal 1 on the half-cusp 0 < ±x1 < τ/2 and ramp to 0 at
// |x1| = τ (quintic smoothstep ramps: exact polynomial evaluation and two
// continuous derivatives, which is all the solver needs).

#pragma once

#include <tuple>
#include <utility>

#include "common.hpp"
#include "geometry.hpp"

namespace cuspwave::waves {

enum class Regime { Subcritical, Threshold, Supercritical };
enum class Direction { Incoming, Outgoing };

// Regime from ν vs κ/8, with relative tolerance 1e-12 for the threshold.
Regime classify_regime(double nu, double kappa);

// ω = √(2ν/κ − 1/4); rejects non-supercritical input.
double omega(double nu, double kappa);

struct SpectralContext {
  double nu = 0.0;
  double kappa = 0.0;
  double eps = 0.0;
  Regime regime = Regime::Supercritical;
  Complex lambda;        // λ_ε
  Complex lambda_plus;   // Λ⁺_ε (more singular mode exponent)
  Complex lambda_minus;  // Λ⁻_ε (finite-energy/outgoing mode exponent)
  double omega = 0.0;    // supercritical only, else 0
};

// Validates ν > 0, κ > 0, ε ≥ 0 and derives all spectral fields.
SpectralContext make_context(double nu, double kappa, double eps);

// (λ_ε, Λ⁺_ε, Λ⁻_ε); Λ⁺ + Λ⁻ = 1 exactly.
std::tuple<Complex, Complex, Complex> lambda_and_exponents(
    const SpectralContext& ctx);

// Deformed surface-wave exponent s_ε = (ν² − iε)^(1/2), Im s ≤ 0.
Complex s_infinity(const SpectralContext& ctx);

// Q±_ε(z); branch = +1 or −1.  z restricted to [0, 1].
Complex q_profile(const SpectralContext& ctx, int branch, double z);

// Threshold-only extra profile Q(z) = −(κ²/2)(z²/2 − 1/6).
Complex q_profile_threshold_extra(const SpectralContext& ctx, double z);

// Real decay exponents (−1/2 + √(1/4 − 2ν/κ), −1/2 − √(1/4 − 2ν/κ));
// rejects non-subcritical input.
std::pair<double, double> subcritical_exponents(const SpectralContext& ctx);

// ---------------------------------------------------------------------------
// Cutoffs
// ---------------------------------------------------------------------------

struct CutoffSpec {
  double N = 0.0;    // infinity cutoff: χ = 0 below N, 1 above 2N
  double tau = 0.0;  // cusp window: ζ± = 1 on (0, ±τ/2], 0 at |x1| ≥ τ
};

double chi_cutoff(const CutoffSpec& c, double t);
double chi_cutoff_d1(const CutoffSpec& c, double t);
double chi_cutoff_d2(const CutoffSpec& c, double t);

// side = +1 for ζ⁺ (right cusp), −1 for ζ⁻ (left cusp).
double zeta_cutoff(const CutoffSpec& c, int side, double x1);
double zeta_cutoff_d1(const CutoffSpec& c, int side, double x1);
double zeta_cutoff_d2(const CutoffSpec& c, int side, double x1);

// ---------------------------------------------------------------------------
// Wave families (values, as used for extraction and matrix bookkeeping)
// ---------------------------------------------------------------------------

// j = 1 (right infinity) or 2 (left infinity).
Complex infinity_wave(int j, Direction dir, const SpectralContext& ctx,
                      const CutoffSpec& cutoff, Vec2 x);

// j = 3 (right cusp) or 4 (left cusp); supercritical regime, any ε ≥ 0.
// The channel profile φ comes from the body.  x1 = 0 is rejected; the wrong
// side or |x1| ≥ τ gives 0 through the cutoff.
Complex cusp_wave(int j, Direction dir, const SpectralContext& ctx,
                  const CutoffSpec& cutoff, const geometry::BodyShape& body,
                  Vec2 x);

// Threshold analogue (ν = κ/8): the (v⁺ ± i v⁻) combinations.
Complex threshold_cusp_wave(int j, Direction dir, const SpectralContext& ctx,
                            const CutoffSpec& cutoff,
                            const geometry::BodyShape& body, Vec2 x);

// ---------------------------------------------------------------------------
// Analytic evaluation machinery (data construction needs derivatives)
// ---------------------------------------------------------------------------

// Value and derivatives of an un-cut, un-normalized cusp mode v at x.
struct ModeEval {
  Complex value;
  Complex d1;   // ∂/∂x1
  Complex d2;   // ∂/∂x2
  Complex lap;  // Δ
};

enum class CuspModeKind {
  Standard,        // v^branch_ε per Λ±_ε/Q±_ε (any regime, any ε)
  ThresholdMinus,  // v⁻ at λ = 0
  ThresholdPlus,   // v⁺ at λ = 0 (logarithmic)
};

// branch = ±1 selects Λ±/Q± for Standard; ignored for the threshold kinds.
ModeEval cusp_mode_eval(CuspModeKind kind, int branch,
                        const SpectralContext& ctx,
                        const geometry::BodyShape& body, Vec2 x);

}  // namespace cuspwave::waves
