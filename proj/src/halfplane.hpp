// ---------------------------------------------------------------------------
// halfplane: semi-analytic solver for the body-free water-wave problem
//
//     Δu - iεu = f          in the half-plane  x2 > 0   (x2 points down),
//     ∂_n u - νu = g2       on the surface     x2 = 0   (∂_n = -∂_{x2}),
//
// with absorption ε > 0 and compactly supported data.  A Fourier transform in
// x1 (convention  F(ξ) = ∫ f e^{-iξx1} dx1) reduces the problem to a vertical
// two-point ODE per transform variable ξ,
//
//     û'' - m²û = f̂,   m = (ξ² + iε)^{1/2}  (Re m > 0),
//     -û'(0) - ν û(0) = ĝ2,    û → 0  as x2 → ∞,
//
// solved in closed Green form:
//
//     û(y) = -(1/m)[ e^{-my} ∫₀^y sinh(mt) f̂ dt + sinh(my) ∫_y^∞ e^{-mt} f̂ dt ]
//            - (F̃(m) - ĝ2) e^{-my} / (m - ν),        F̃(m) = ∫₀^∞ e^{-mt} f̂ dt.
//
// The surface pole m = ν sits at ξ = ±s, s = (ν² - iε)^{1/2}, a distance
// ~ ε/(2ν) off the real axis; the inverse-transform quadrature uses composite
// Gauss-Legendre panels geometrically refined toward ±ν (down to that scale)
// and toward ξ = 0 (the kink scale √ε of m), so the node count grows only
// logarithmically as ε ↓ 0.  All evaluations are deterministic and
// single-threaded; solves for distinct sources or ε may run concurrently.
//
// The module also provides, as executable checks, the structural results this
// solver is trusted for downstream:
//   * outgoing coefficients  b1 = iν s⁻¹ ∫ f e^{+isx1 - νx2} dx  (b2: -is),
//   * the surface-channel projection u = w1(x1) e^{-νx2} + w2 with
//     ∫ w2 e^{-νx2} dx2 = 0, and the decoupled 1-D equation
//     w1'' + (ν² - iε) w1 = f1,
//   * the energy identity  ∫|∇w2|² - ν∫|w2(·,0)|² + Re∫ f2 w̄2 = 0,
//   * ε-uniform a-priori bounds: the w2 estimate
//     ‖w2‖²_{Ḣ²} ≤ c (1+ν²)/ν² ‖(x2+1) f2‖² and the 1-D Schrödinger bound
//     ν/(1+ν²)‖u''‖ + ‖u'‖ + ν‖u‖ ≤ c (∫ |f|²⟨t⟩² e^{(|ε|/ν)⟨t⟩} dt)^{1/2},
//     the latter applied to the remainder problem in which the outgoing waves
//     (coefficients b1, b2) have been subtracted — the subtraction cancels the
//     transform poles exactly, which is what makes the bound ε-uniform.
// ---------------------------------------------------------------------------

#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "common.hpp"

namespace cuspwave::halfplane {

using cuspwave::Complex;
using cuspwave::Vec2;

// Complex-valued volume field f(x1, x2) and surface line data g2(x1).
using FieldFn = std::function<Complex(double, double)>;
using LineFn = std::function<Complex(double)>;

// ---------------------------------------------------------------------------
// Problem data
// ---------------------------------------------------------------------------

// Either part may be empty (interpreted as zero).  Supports must lie inside
// |x1| ≤ support_radius and 0 ≤ x2 ≤ support_radius; the solver truncates all
// data integrals there, so a violated promise silently biases results.
struct SourceData {
  FieldFn f;
  LineFn g2;
  double support_radius = 0.0;
};

struct OracleContext {
  double nu = 0.0;           // surface wavenumber, > 0
  double eps = 0.0;          // absorption (solves require > 0)
  double cutoff_scale = 0.0; // N: data live in |x1| < N; cutoffs ramp on [N, 2N]
  double probe_reach = 0.0;  // max |x1| evaluations must resolve (0: 4.5 N)
  double xi_max = 0.0;       // transform window cap (0: grown automatically)
  int xi_order = 12;         // Gauss-Legendre order per ξ panel
  int t_order = 8;           // Gauss-Legendre order per vertical panel
};

// A sampled field on probe points (the oracle-side analogue of a mesh field).
struct ProbeField {
  std::vector<Vec2> points;
  std::vector<Complex> values;
};

// ---------------------------------------------------------------------------
// Transform-space solution handle
// ---------------------------------------------------------------------------

struct EnergyIdentityReport {
  double residual = 0.0;     // |∫|∇w2|² - ν∫|w2(·,0)|² + Re∫ f2 w̄2|
  double scale = 0.0;        // sum of the three term magnitudes
  bool precondition_ok = true; // mean-zero check on w2 (generic-field path)
  double mean_defect = 0.0;  // largest |∫ w2 e^{-νx2}| seen, relative
};

class HalfplaneSolution {
 public:
  // Builds the ξ-panel machinery and transform data; requires ε > 0.
  // Reports transform-window underresolution if the data's spectrum has not
  // decayed at the (capped) window edge.
  HalfplaneSolution(SourceData source, OracleContext ctx);
  ~HalfplaneSolution();
  HalfplaneSolution(HalfplaneSolution&&) noexcept;
  HalfplaneSolution& operator=(HalfplaneSolution&&) noexcept;

  Complex value(Vec2 x) const;
  ProbeField sample(const std::vector<Vec2>& points) const;

  // Outgoing coefficients by direct quadrature of the closed formulas
  // (volume sources only).
  std::pair<Complex, Complex> coefficients() const;

  // Energy identity of the projection remainder w2, evaluated exactly in x1
  // (Parseval) and by an ny-interval trapezoid rule in x2 with analytic
  // two-exponential tails beyond the source support.  The raw rule has O(h²)
  // residual; with richardson=true two grids are combined, giving a
  // quadrature-converged residual suitable for tight acceptance checks.
  EnergyIdentityReport energy_identity(int ny, bool richardson = false) const;

  // Lemma ingredients: ‖w2‖²_{Ḣ²} (all second derivatives, transform space)
  // and ‖(x2+1) f2‖²_{L²} of the projected source part.
  double w2_hdot2_squared(int ny = 800) const;
  double f2_weighted_norm_squared() const;

  const OracleContext& context() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Solves the absorption problem and samples it on the probe grid.  ε > 0.
ProbeField solve_halfplane(const SourceData& source, const OracleContext& ctx,
                           const std::vector<Vec2>& grid);

// b1, b2 from the closed outgoing-coefficient formulas; accepts ε ≥ 0 (the
// ε = 0 values are the plane-wave overlap integrals).  Volume source only:
// a source with surface data is rejected.
std::pair<Complex, Complex> outgoing_coefficients(const SourceData& source,
                                                  const OracleContext& ctx);

// Surface-channel projection of an arbitrary decaying field:
//   w1(x1) = 2ν ∫₀^∞ u(x1, t) e^{-νt} dt   (Gauss-Laguerre),
//   w2 = u - w1 e^{-νx2}.
// depth is the resolved sampling depth; ν·depth ≥ 8 is required.
struct ModeProjection {
  std::vector<double> stations;
  std::vector<Complex> w1;
  FieldFn field;
  double nu = 0.0;

  Complex w2_at(std::size_t station, double x2) const;
};
ModeProjection project_modes(const FieldFn& u, double nu,
                             const std::vector<double>& stations, double depth);

// Solves w1'' + (ν² - iε) w1 = f1 on the line by transform division
// (pole-free for ε > 0) and evaluates at the given points.
std::vector<Complex> solve_schrodinger_1d(const LineFn& f1,
                                          double support_radius,
                                          const OracleContext& ctx,
                                          const std::vector<double>& points);

// Energy identity in transform space for an oracle solution (see member).
EnergyIdentityReport check_energy_identity(const HalfplaneSolution& solution,
                                           int ny, bool richardson = false);

// Generic-field energy identity on the box [-box_x, box_x] × [0, box_y] with
// grid spacing h (gradients by central differences).  Checks the mean-zero
// precondition on w2 first and flags the report when it fails.
EnergyIdentityReport check_energy_identity(const FieldFn& w2, const FieldFn& f2,
                                           double nu, double box_x,
                                           double box_y, double h);

// Appendix-estimate ratios for a fixed volume source across an ε schedule:
//   ratio_w2 = [ν²/(1+ν²)] ‖w2‖²_{Ḣ²} / ‖(x2+1) f2‖²,
//   ratio_w1 = LHS/RHS of the 1-D Schrödinger bound applied to the remainder
//              problem (outgoing waves subtracted; cutoffs ramp on [N, 2N]),
// plus the Hardy-inequality demonstration on v = e^{-x2}:
//   ∫ (x2+1)^{-2}|v|² ≤ c (∫ |v'|² + |v(0)|²) with c = 4 sufficient.
struct AppendixRow {
  double eps = 0.0;
  double ratio_w2 = 0.0;
  double ratio_w1 = 0.0;
};
struct AppendixReport {
  std::vector<AppendixRow> rows;
  double max_ratio_w2 = 0.0;
  double max_ratio_w1 = 0.0;
  double hardy_lhs = 0.0;      // ∫ (x2+1)^{-2} e^{-2x2} dx2
  double hardy_rhs_unit = 0.0; // ∫ |v'|² + |v(0)|²  (= 3/2 for v = e^{-x2})
  double hardy_c_required = 0.0;
};
AppendixReport check_appendix_estimates(const SourceData& source,
                                        const OracleContext& ctx,
                                        const std::vector<double>& eps_list);

}  // namespace cuspwave::halfplane
