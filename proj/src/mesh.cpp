// SPDX-License-Identifier: MIT
//
// cuspwave/mesh implementation.
//
// Construction is structured multi-block with shared interface node ids:
//
//     surface Γ (x2 = 0)
//   ┌─────────┬───────────── A_R ══ channel ══ ▓ ══ channel ══ A_L ──···
//   │         │  collar     .    (graded        ▓ excised       .
//   │ far R   │ (transfinite.     trapezoid     ▓  |x1| < δm     .
//   │         │  C-grid)   body   columns)      ▓
//   │         ├────────────────────────────────────────────···
//   │         │  deep block under the body
//   └─────────┴────────────────────────────────────────────···
//     x2 = D bottom
//
// Channel columns: marching from the channel mouth x = τ toward the excision
// radius δm, the column width is
//
//     w(x) = min( β·φ(x)/n_v,  (1 − 1/q)·x,  h )        for x ≥ δ1,
//     w(x) = min( (1 − 1/q)·x,  h,  2·w_prev )           for x < δ1,
//
// with q = 10^(1/(12·2^level)).  The first rule bounds the cell aspect ratio
// by ≈ β inside the exponent-fit window [δ1, δ2] (minimum angle ≳ atan(1/β));
// the second is geometric grading giving 12·2^level layers per decade of
// |x1|, with deliberately thin channel-aligned cells below the window where
// the field's vertical profile varies slowly.  The 2·w_prev clamp bridges the
// width jump at δ1 smoothly.
//
// Collar: transfinite blend X(s, r) = (1-r)·C_in(u) + r·C_out(s), u = s/|C_out|,
// between the body arc from one channel mouth around the deep side to the
// other (arclength parametrized) and the box path surface→wall→under-body→
// wall→surface.  The cap edges at s ∈ {0, 1} degenerate to the channel mouth
// columns, so the radial subdivision equals the channel's vertical one and
// the blocks conform node-for-node.  s-cells are refined until the inner
// chord's sagitta is ≤ 12% of its length, which also keeps the quadratic
// boundary arcs (midside nodes placed exactly on the body curve) well shaped.

#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <utility>

namespace cuspwave::mesh {
namespace {

using geometry::BodyShape;
using geometry::DomainSpec;

constexpr double kAspectCap = 2.6;  // channel width / cell height in window
constexpr double kSagitta = 0.15;   // max inner-chord sagitta / chord length
constexpr double kCellAspect = 2.5;  // width/height bound for block cells
constexpr double kSigmaMax = 3.0;    // max consecutive radial step ratio
constexpr int kWinslowIters = 300;   // Jacobi sweeps of collar relaxation

// Partition [y0, y1] into steps that start near `first`, grow by at most 2x
// per step, and never exceed `cap`; the list is then rescaled (by a factor
// close to one) so it lands on y1 exactly.
std::vector<double> graded_steps(double y0, double y1, double first,
                                 double cap) {
  check(y1 > y0 && first > 0.0 && cap >= first * (1.0 - 1e-12),
        "mesh: bad graded interval");
  std::vector<double> st;
  double d = std::min(first, y1 - y0);
  double acc = 0.0;
  while (acc < y1 - y0) {
    st.push_back(d);
    acc += d;
    d = std::min(2.0 * d, cap);
  }
  const double f = (y1 - y0) / acc;
  std::vector<double> ys{y0};
  for (double s : st) ys.push_back(ys.back() + s * f);
  ys.back() = y1;
  return ys;
}

double cross2(Vec2 a, Vec2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }

// Channel column breakpoints |x1|, from x_outer down to the excision dm.
std::vector<double> channel_columns(const BodyShape& body, int sgn,
                                    double x_outer, double dm, double d1,
                                    int n_v, double q, double h) {
  std::vector<double> xs{x_outer};
  double x = x_outer;
  const double cq = 1.0 - 1.0 / q;
  double wprev = std::numeric_limits<double>::infinity();
  while (x > dm * (1.0 + 1e-12)) {
    double w = std::min(cq * x, h);
    if (x >= d1) {
      // Aspect cap against the column's inner height: solve the fixed point
      // w = β·φ(x−w)/n_v (φ shrinks fast toward the cusp, so the inner edge
      // is the binding one).  The map contracts; a few sweeps suffice.
      double wa = std::min(w, kAspectCap * body.phi(sgn * x) / n_v);
      for (int it = 0; it < 8; ++it)
        wa = kAspectCap * body.phi(sgn * std::max(x - wa, 0.4 * x)) / n_v;
      w = std::min(w, wa);
    }
    w = std::min(w, 2.0 * wprev);
    check(w > 1e-14 * x_outer, "mesh: channel grading stalled");
    double xn = x - w;
    if (xn <= dm + 0.45 * w) xn = dm;  // snap the final column
    xs.push_back(xn);
    wprev = x - xn;
    x = xn;
    check(xs.size() < 200000, "mesh: channel grading runaway");
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Body arc: channel mouth to channel mouth around the deep side
// ---------------------------------------------------------------------------

struct BodyArc {
  const BodyShape* body = nullptr;
  double t_r = 0.0, t_l = 0.0;  // parameter at (+x_ch, φ) and (−x_ch, φ)
  std::vector<double> cum;      // cumulative chord length at uniform params
  double length = 0.0;

  // t with point(t).x1 = x_target on the shallow branch: the first crossing
  // scanning from the tangency point (t = 0 rightward, t = 2π leftward).
  static double solve_mouth(const BodyShape& b, double x_target) {
    const int n = 4096;
    const double sgn = x_target >= 0.0 ? 1.0 : -1.0;
    double t_prev = sgn > 0 ? 0.0 : 2.0 * kPi;
    double x_prev = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double t = sgn > 0 ? (2.0 * kPi * i / n)
                               : (2.0 * kPi - 2.0 * kPi * i / n);
      const double x = b.point(t).x1;
      if (sgn * x >= sgn * x_target) {
        // Bracketed between t_prev and t; bisect on x1(t) − x_target.
        double lo = t_prev, hi = t, xl = x_prev;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double xm = b.point(mid).x1;
          if (std::abs(hi - lo) < 1e-15 * (1.0 + std::abs(mid))) return mid;
          if ((sgn * (xm - x_target) < 0.0) == (sgn * (xl - x_target) < 0.0)) {
            lo = mid;
            xl = xm;
          } else {
            hi = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
      check(sgn * x >= -1e-9 * std::max(1.0, std::abs(x_target)),
            "mesh: channel mouth not found on the shallow branch");
      t_prev = t;
      x_prev = x;
    }
    fail("mesh: channel mouth beyond the body half-width");
  }

  void build(const BodyShape& b, double x_ch) {
    body = &b;
    t_r = solve_mouth(b, +x_ch);
    t_l = solve_mouth(b, -x_ch);
    check(t_l > t_r, "mesh: body arc orientation");
    const int m = 16384;
    cum.assign(m + 1, 0.0);
    Vec2 prev = b.point(t_r);
    for (int i = 1; i <= m; ++i) {
      const Vec2 cur = b.point(t_r + (t_l - t_r) * i / m);
      cum[i] = cum[i - 1] + norm(cur - prev);
      prev = cur;
    }
    length = cum.back();
    check(length > 0.0, "mesh: degenerate body arc");
  }

  // Parameter t at arclength fraction u ∈ [0, 1].
  double param_at(double u) const {
    const int m = static_cast<int>(cum.size()) - 1;
    const double target = std::clamp(u, 0.0, 1.0) * length;
    auto it = std::lower_bound(cum.begin(), cum.end(), target);
    int hi = static_cast<int>(it - cum.begin());
    if (hi == 0) hi = 1;
    const double seg = cum[hi] - cum[hi - 1];
    const double f = seg > 0.0 ? (target - cum[hi - 1]) / seg : 0.0;
    return t_r + (t_l - t_r) * (hi - 1 + f) / m;
  }

  Vec2 point_at(double u) const { return body->point(param_at(u)); }
};

// ---------------------------------------------------------------------------
// Outer collar path: A_R → (XB,0) → (XB,YB) → (−XB,YB) → (−XB,0) → A_L
// ---------------------------------------------------------------------------

struct OuterPath {
  std::array<Vec2, 6> pt{};   // segment endpoints
  std::array<double, 6> c{};  // cumulative arclength at segment starts
  double total = 0.0;

  void build(double x_ch, double xb, double yb) {
    pt = {Vec2{x_ch, 0.0}, Vec2{xb, 0.0},  Vec2{xb, yb},
          Vec2{-xb, yb},   Vec2{-xb, 0.0}, Vec2{-x_ch, 0.0}};
    c[0] = 0.0;
    for (int k = 0; k < 5; ++k) c[k + 1] = c[k] + norm(pt[k + 1] - pt[k]);
    total = c[5];
  }

  int segment_of(double s) const {
    for (int k = 4; k > 0; --k)
      if (s >= c[k]) return k;
    return 0;
  }

  Vec2 at(double s) const {
    const int k = segment_of(s);
    const double len = c[k + 1] - c[k];
    const double f = len > 0.0 ? (s - c[k]) / len : 0.0;
    return pt[k] + f * (pt[k + 1] - pt[k]);
  }
};

// Arc fraction of the body point closest to `target`.  For a convex body the
// squared distance is unimodal along the arc, so ternary search converges.
// Used to pair each outer-path corner with its nearest body point: the spoke
// then runs along the body normal (first-order optimality of the nearest
// point), which keeps the collar cells adjacent to it free of shear.
double nearest_arc_fraction(const BodyArc& arc, Vec2 target, double u_lo,
                            double u_hi) {
  auto d2 = [&](double u) {
    const Vec2 p = arc.point_at(u) - target;
    return dot(p, p);
  };
  const int n = 512;
  double best_u = u_lo, best = d2(u_lo);
  for (int i = 1; i <= n; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / n;
    const double v = d2(u);
    if (v < best) {
      best = v;
      best_u = u;
    }
  }
  double lo = std::max(u_lo, best_u - (u_hi - u_lo) / n);
  double hi = std::min(u_hi, best_u + (u_hi - u_lo) / n);
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (d2(m1) < d2(m2))
      hi = m2;
    else
      lo = m1;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Mesh builder: vertices, triangles, tag records, curved-midside bookkeeping
// ---------------------------------------------------------------------------

// Boundary-parameter kinds for curved midside placement.
enum { kParamNone = 0, kParamProfile = 1, kParamArc = 2 };

struct Builder {
  std::vector<Vec2> verts;
  std::vector<std::array<std::size_t, 3>> tris;
  std::vector<Region> region;
  std::vector<int> bkind;
  std::vector<double> bparam;
  std::map<std::pair<std::size_t, std::size_t>, BoundaryTag> tag_of;

  std::size_t add_vertex(Vec2 p, int kind = kParamNone, double param = 0.0) {
    verts.push_back(p);
    bkind.push_back(kind);
    bparam.push_back(param);
    return verts.size() - 1;
  }

  void add_tri(std::size_t a, std::size_t b, std::size_t cc, Region r) {
    const double s2 = cross2(verts[b] - verts[a], verts[cc] - verts[a]);
    check(s2 != 0.0, "mesh: degenerate triangle");
    if (s2 < 0.0) std::swap(b, cc);
    tris.push_back({a, b, cc});
    region.push_back(r);
  }

  // Structured quad (n00 n10 n11 n01 counter-clockwise in index space); the
  // diagonal choice alternates per cell for near-isotropic splits.
  void add_quad(std::size_t n00, std::size_t n10, std::size_t n11,
                std::size_t n01, Region r, bool main_diag) {
    if (main_diag) {
      add_tri(n00, n10, n11, r);
      add_tri(n00, n11, n01, r);
    } else {
      add_tri(n10, n11, n01, r);
      add_tri(n10, n01, n00, r);
    }
  }

  // Smallest interior angle of a triangle (radians); used only to compare
  // the two possible diagonal splits of a quad.
  double min_angle(std::size_t ia, std::size_t ib, std::size_t ic) const {
    const Vec2 &a = verts[ia], &b = verts[ib], &c = verts[ic];
    auto corner = [](const Vec2& p, const Vec2& q, const Vec2& r) {
      const Vec2 u = q - p, v = r - p;
      const double nu = norm(u), nv = norm(v);
      if (nu == 0.0 || nv == 0.0) return 0.0;
      const double co = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
      return std::acos(co);
    };
    return std::min({corner(a, b, c), corner(b, c, a), corner(c, a, b)});
  }

  // Structured quad split along whichever diagonal maximizes the smallest
  // triangle angle.  Sheared cells (a short body arc fanning onto a long
  // box side) need the diagonal aligned with the shear; exact ties (e.g.
  // rectangles) fall back to the caller's alternating pattern.  Mirror
  // images evaluate to mirrored choices because the angle comparison uses
  // dot products, which are exact under x1 negation.
  void add_quad_best(std::size_t n00, std::size_t n10, std::size_t n11,
                     std::size_t n01, Region r, bool tie_main) {
    const double a_main =
        std::min(min_angle(n00, n10, n11), min_angle(n00, n11, n01));
    const double a_cross =
        std::min(min_angle(n10, n11, n01), min_angle(n10, n01, n00));
    const bool main_diag = a_main == a_cross ? tie_main : a_main > a_cross;
    add_quad(n00, n10, n11, n01, r, main_diag);
  }

  void tag(std::size_t a, std::size_t b, BoundaryTag t) {
    auto key = std::minmax(a, b);
    auto [it, fresh] = tag_of.emplace(std::make_pair(key.first, key.second), t);
    check(fresh || it->second == t, "mesh: conflicting boundary tags");
  }

  Mesh finish(const BodyShape* body, const BodyArc* arc, double x_mouth) {
    Mesh m;
    m.vertices = std::move(verts);
    m.triangles = std::move(tris);
    m.tri_region = std::move(region);

    // Edge table with (triangle, side) uses; side k is opposite corner k.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> eid;
    std::vector<std::array<long, 2>> use;  // up to two (tri, side) packed
    m.tri_edges.resize(m.triangles.size());
    std::map<std::pair<std::size_t, std::size_t>, int> directed;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const auto& tv = m.triangles[t];
      for (int k = 0; k < 3; ++k) {
        const std::size_t a = tv[(k + 1) % 3], b = tv[(k + 2) % 3];
        check(++directed[{a, b}] == 1,
              "mesh: repeated directed edge at (" +
                  std::to_string(m.vertices[a].x1) + ", " +
                  std::to_string(m.vertices[a].x2) + ")-(" +
                  std::to_string(m.vertices[b].x1) + ", " +
                  std::to_string(m.vertices[b].x2) + ")");
        auto key = std::minmax(a, b);
        auto [it, fresh] = eid.emplace(std::make_pair(key.first, key.second),
                                       m.edges.size());
        if (fresh) {
          m.edges.push_back({key.first, key.second});
          use.push_back({-1, -1});
        }
        const std::size_t e = it->second;
        m.tri_edges[t][k] = e;
        auto& u = use[e];
        check(u[1] < 0, "mesh: edge shared by more than two triangles");
        (u[0] < 0 ? u[0] : u[1]) = static_cast<long>(4 * t + k);
      }
    }

    // Midside nodes: chord midpoints, except edges lying on the body, whose
    // midsides are placed exactly on the curve via the recorded parameters
    // (signed |x1| on the channel profile, arclength fraction on the arc).
    m.edge_midpoints.resize(m.edges.size());
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
      const std::size_t a = m.edges[e][0], b = m.edges[e][1];
      m.edge_midpoints[e] = 0.5 * (m.vertices[a] + m.vertices[b]);
      const int ka = bkind[a], kb = bkind[b];
      if (ka == kParamProfile && kb == kParamProfile &&
          bparam[a] * bparam[b] > 0.0) {
        const double xm = 0.5 * (bparam[a] + bparam[b]);
        m.edge_midpoints[e] = {xm, body->phi(xm)};
      } else if ((ka == kParamArc || kb == kParamArc) && arc != nullptr) {
        auto as_u = [&](std::size_t v, int kv) {
          if (kv == kParamArc) return bparam[v];
          // Channel-mouth bottom vertex: arc end.
          check(kv == kParamProfile &&
                    std::abs(std::abs(bparam[v]) - x_mouth) <=
                        1e-9 * std::max(1.0, x_mouth),
                "mesh: curved edge with inconsistent parameters");
          return bparam[v] > 0.0 ? 0.0 : 1.0;
        };
        if (ka != kParamNone && kb != kParamNone) {
          const double u = 0.5 * (as_u(a, ka) + as_u(b, kb));
          m.edge_midpoints[e] = arc->point_at(u);
        }
      }
    }

    // Boundary faces and tags.
    m.edge_tags.assign(m.edges.size(), BoundaryTag::None);
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
      if (use[e][1] >= 0) continue;  // interior
      BoundaryFace f;
      f.edge = e;
      f.tri = static_cast<std::size_t>(use[e][0] / 4);
      f.side = static_cast<int>(use[e][0] % 4);
      auto it = tag_of.find({m.edges[e][0], m.edges[e][1]});
      check(it != tag_of.end(), "mesh: untagged boundary edge");
      f.tag = it->second;
      m.edge_tags[e] = f.tag;
      m.boundary_faces.push_back(f);
    }
    // Every tag record must refer to an actual boundary edge.
    for (const auto& [key, t] : tag_of) {
      auto it = eid.find(key);
      check(it != eid.end() && use[it->second][1] < 0,
            "mesh: tag on interior or missing edge");
      (void)t;
    }
    return m;
  }
};

// ---------------------------------------------------------------------------
// Channel block
// ---------------------------------------------------------------------------

struct ChannelBlock {
  std::vector<std::vector<std::size_t>> node;  // [column][row 0..n_v]
};

// Columns at |x1| = xs[i] (outer→inner), rows x2 = φ·k/n_v.  sgn selects the
// side; tags cover the surface, the body and the excision face.
ChannelBlock make_channel(Builder& B, const BodyShape& body,
                          const std::vector<double>& xs, int n_v, int sgn,
                          bool strip_outer) {
  const Region reg = sgn > 0 ? Region::ChannelRight : Region::ChannelLeft;
  const std::size_t M = xs.size();
  ChannelBlock cb;
  cb.node.assign(M, std::vector<std::size_t>(n_v + 1));
  for (std::size_t i = 0; i < M; ++i) {
    const double x = sgn * xs[i];
    const double ph = body.phi(x);
    check(ph > 0.0, "mesh: channel height must be positive");
    for (int k = 0; k <= n_v; ++k) {
      const bool on_body = (k == n_v);
      cb.node[i][k] =
          B.add_vertex({x, ph * k / n_v}, on_body ? kParamProfile : kParamNone,
                       on_body ? x : 0.0);
    }
  }
  for (std::size_t i = 0; i + 1 < M; ++i)
    for (int k = 0; k + 1 <= n_v; ++k)
      B.add_quad(cb.node[i][k], cb.node[i + 1][k], cb.node[i + 1][k + 1],
                 cb.node[i][k + 1], reg, true);
  for (std::size_t i = 0; i + 1 < M; ++i) {
    B.tag(cb.node[i][0], cb.node[i + 1][0], BoundaryTag::Surface);
    B.tag(cb.node[i][n_v], cb.node[i + 1][n_v], BoundaryTag::Body);
  }
  const BoundaryTag exc = sgn > 0 ? BoundaryTag::CuspExcisionRight
                                  : BoundaryTag::CuspExcisionLeft;
  for (int k = 0; k + 1 <= n_v; ++k)
    B.tag(cb.node[M - 1][k], cb.node[M - 1][k + 1], exc);
  if (strip_outer)
    for (int k = 0; k + 1 <= n_v; ++k)
      B.tag(cb.node[0][k], cb.node[0][k + 1], BoundaryTag::StripOuter);
  return cb;
}

// ---------------------------------------------------------------------------
// Empty-body rectangle
// ---------------------------------------------------------------------------

Mesh build_rectangle(const DomainSpec& dom, int level, double h) {
  Builder B;
  const double L = dom.L, D = dom.D;
  const int nxh = std::max(2, static_cast<int>(std::ceil(L / h - 1e-12)));
  const int ny = std::max(2, static_cast<int>(std::ceil(D / h - 1e-12)));
  std::vector<double> xs;
  for (int i = nxh; i >= 1; --i) xs.push_back(-L * i / nxh);
  for (int i = 0; i <= nxh; ++i) xs.push_back(L * i / nxh);
  const int nx = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<std::size_t>> g(nx + 1,
                                          std::vector<std::size_t>(ny + 1));
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) g[i][j] = B.add_vertex({xs[i], D * j / ny});
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      B.add_quad(g[i][j], g[i + 1][j], g[i + 1][j + 1], g[i][j + 1],
                 Region::Bulk, (i + j) % 2 == 0);
  for (int i = 0; i < nx; ++i) {
    B.tag(g[i][0], g[i + 1][0], BoundaryTag::Surface);
    B.tag(g[i][ny], g[i + 1][ny], BoundaryTag::Bottom);
  }
  for (int j = 0; j < ny; ++j) {
    B.tag(g[0][j], g[0][j + 1], BoundaryTag::LateralLeft);
    B.tag(g[nx][j], g[nx][j + 1], BoundaryTag::LateralRight);
  }
  Mesh m = B.finish(nullptr, nullptr, 0.0);
  m.level = level;
  m.target_h = h;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// build_mesh
// ---------------------------------------------------------------------------

Mesh build_mesh(const DomainSpec& dom, int level) {
  check(level >= 0 && level <= 6, "build_mesh: level must be in [0, 6]");
  const double h_scale = 1.0 / static_cast<double>(1 << level);

  if (dom.body.empty()) {
    const double h0 = std::min({0.5 / dom.nu, dom.L / 4.0, dom.D / 4.0});
    return build_rectangle(dom, level, h0 * h_scale);
  }

  const BodyShape& body = dom.body;
  const double hw = body.half_width(), depth = body.depth();
  const double x_ch = body.tau();
  const double dm = excision_radius(dom);
  const double d1 = dom.fit_window[0];
  check(dm > 0.0, "build_mesh: excision radius must be positive");
  check(dm < x_ch, "build_mesh: excision must be inside the profile window");

  // Collar box and bulk target size.
  const double XB = std::max(1.5 * hw, x_ch + 0.5 * hw);
  const double YB = std::max(1.6 * depth, depth + 0.3 * hw);
  check(dom.L > XB * (1.0 + 1e-9), "build_mesh: L too small for the body");
  check(dom.D > YB * (1.0 + 1e-9), "build_mesh: D too small for the body");
  const double h0 =
      std::min({0.5 / dom.nu, 0.5 * (dom.L - XB), 0.5 * (dom.D - YB)});
  const double h = h0 * h_scale;
  const int n_v = 4 << level;
  const double q = std::pow(10.0, 1.0 / (12.0 * (1 << level)));

  Builder B;

  // --- channels ---
  const std::vector<double> xs_r =
      channel_columns(body, +1, x_ch, dm, d1, n_v, q, h);
  const std::vector<double> xs_l =
      channel_columns(body, -1, x_ch, dm, d1, n_v, q, h);
  const ChannelBlock chR = make_channel(B, body, xs_r, n_v, +1, false);
  const ChannelBlock chL = make_channel(B, body, xs_l, n_v, -1, false);

  // --- collar breakpoints: (u on the body arc, s on the outer path) ---
  BodyArc arc;
  arc.build(body, x_ch);
  OuterPath path;
  path.build(x_ch, XB, YB);

  // Mouth-side surface cells continue the channel's column grading.
  const double w_last_r = xs_r[0] - xs_r[1];
  const double w_last_l = xs_l[0] - xs_l[1];
  const double wa_r = std::max(1.2 * w_last_r, 2.4 * body.phi(+x_ch) / n_v);
  const double wa_l = std::max(1.2 * w_last_l, 2.4 * body.phi(-x_ch) / n_v);

  // Spokes: each path corner pairs with the nearest body point, splitting the
  // collar into five blocks (surface R, wall R, under-body, wall L,
  // surface L).  Within a block, inner and outer breakpoints share the same
  // fraction list, so the stretch is uniform inside a block and the shear is
  // concentrated at the spokes — where the pairing is normal-aligned.
  std::array<double, 6> ub{};  // block boundaries in arc fraction
  ub[0] = 0.0;
  ub[5] = 1.0;
  for (int k = 1; k <= 4; ++k)
    ub[k] = nearest_arc_fraction(arc, path.pt[k], 0.0, 1.0);
  for (int k = 0; k < 5; ++k)
    check(ub[k + 1] > ub[k] + 1e-6, "mesh: collar spokes out of order");

  // Breakpoints along the outer path come from 1D equidistribution of a
  // width target t(s): at each sample, the minimum of
  //   - the bulk size h and the inner-chord cap 1.05 h / r_in(s), where
  //     r_in = d(inner arclength)/ds is the local block stretch,
  //   - the gap rule 2 g(s) / n_v (near-isotropic cells where the collar is
  //     thin: spoke ends, under the body),
  //   - the sagitta rule (8 kSagitta / kappa) / r_in, which keeps the
  //     quadratic boundary arcs well shaped on high-curvature flanks,
  // pinned to the channel continuation width at the two cap ends and swept
  // with a Lipschitz slope so neighboring cells differ by a bounded ratio.
  // Equidistributing the integral of ds / t(s) inside each block hits the
  // targets without the 2x overshoot of bisection refinement and keeps
  // widths smooth across block joints; corner breakpoints stay exact.
  constexpr int kM = 2048;         // samples per block
  constexpr double kTSlope = 0.5;  // Lipschitz slope of the width target
  const int nsamp = 5 * kM + 1;
  std::vector<double> ss(nsamp), uu(nsamp), tt(nsamp);
  std::vector<Vec2> II(nsamp);
  for (int k = 0; k < 5; ++k)
    for (int i = 0; i <= kM; ++i) {
      const int idx = k * kM + i;
      const double w = static_cast<double>(i) / kM;
      ss[idx] = path.c[k] + w * (path.c[k + 1] - path.c[k]);
      uu[idx] = ub[k] + w * (ub[k + 1] - ub[k]);
      II[idx] = arc.point_at(uu[idx]);
    }
  for (int i = 0; i < nsamp; ++i) {
    const int im = std::max(0, i - 1), ip = std::min(nsamp - 1, i + 1);
    const double r_in =
        std::max(norm(II[ip] - II[im]) / (ss[ip] - ss[im]), 1e-12);
    const Vec2 e1 = II[i] - II[im], e2 = II[ip] - II[i], e3 = II[ip] - II[im];
    const double kappa =
        2.0 * std::abs(cross2(e1, e2)) /
        std::max(norm(e1) * norm(e2) * norm(e3), 1e-300);
    const double g = norm(path.at(ss[i]) - II[i]);
    tt[i] = std::min({h, 1.05 * h / r_in, 2.0 * g / n_v,
                      8.0 * kSagitta / std::max(kappa, 1e-12) / r_in});
  }
  tt.front() = std::min(tt.front(), wa_r);
  tt.back() = std::min(tt.back(), wa_l);
  for (int i = 1; i < nsamp; ++i)
    tt[i] = std::min(tt[i], tt[i - 1] + kTSlope * (ss[i] - ss[i - 1]));
  for (int i = nsamp - 2; i >= 0; --i)
    tt[i] = std::min(tt[i], tt[i + 1] + kTSlope * (ss[i + 1] - ss[i]));

  struct BP {
    double u, s;
  };
  std::vector<BP> S{{0.0, 0.0}};
  for (int k = 0; k < 5; ++k) {
    std::vector<double> cum(kM + 1, 0.0);
    for (int i = 0; i < kM; ++i) {
      const int idx = k * kM + i;
      cum[i + 1] = cum[i] + (ss[idx + 1] - ss[idx]) *
                                (0.5 / tt[idx] + 0.5 / tt[idx + 1]);
    }
    const int nk = std::max(1, static_cast<int>(std::ceil(cum[kM] - 1e-9)));
    int i = 0;
    for (int j = 1; j < nk; ++j) {
      const double target = cum[kM] * j / nk;
      while (cum[i + 1] < target) ++i;
      const double f =
          (target - cum[i]) / std::max(cum[i + 1] - cum[i], 1e-300);
      const double w = (i + f) / kM;
      S.push_back({ub[k] + w * (ub[k + 1] - ub[k]),
                   path.c[k] + w * (path.c[k + 1] - path.c[k])});
    }
    S.push_back({ub[k + 1], path.c[k + 1]});  // exact corner
  }
  for (std::size_t j = 0; j + 1 < S.size(); ++j)
    check(S[j].u < S[j + 1].u && S[j].s < S[j + 1].s,
          "mesh: collar breakpoints not monotone");

  const std::size_t NS = S.size() - 1;  // collar cell count
  const int n_r = n_v;

  // Corner indices in S (corner s-values were inserted exactly).
  std::array<std::size_t, 4> jc{};
  for (int k = 1; k <= 4; ++k) {
    bool found = false;
    for (std::size_t j = 0; j < S.size(); ++j)
      if (S[j].s == path.c[k]) {
        jc[k - 1] = j;
        found = true;
        break;
      }
    check(found, "mesh: collar corner lost");
  }

  // --- collar nodes ---
  std::vector<std::vector<std::size_t>> cg(NS + 1,
                                           std::vector<std::size_t>(n_r + 1));
  for (int mrow = 0; mrow <= n_r; ++mrow) {
    cg[0][mrow] = chR.node[0][n_v - mrow];
    cg[NS][mrow] = chL.node[0][n_v - mrow];
  }
  // Interior columns start as straight blends with a geometric radial
  // grading: the first step off the body matches the local azimuthal width
  // (bounded by kCellAspect and ratio-smoothed along the ring, so the caps'
  // uniform channel distribution is approached gradually), later steps grow
  // toward the box.  The blend is then relaxed below.
  std::vector<Vec2> Icol(NS + 1), Ocol(NS + 1);
  for (std::size_t j = 0; j <= NS; ++j) {
    Icol[j] = arc.point_at(S[j].u);
    Ocol[j] = path.at(S[j].s);
  }
  std::vector<double> tcol(NS + 1);
  for (std::size_t j = 0; j <= NS; ++j) {
    const double g = norm(Ocol[j] - Icol[j]);
    if (j == 0 || j == NS) {
      tcol[j] = g / n_r;
      continue;
    }
    const double a_lo = std::min(norm(Icol[j] - Icol[j - 1]),
                                 norm(Icol[j + 1] - Icol[j]));
    tcol[j] = std::min(kCellAspect * a_lo, g / n_r);
  }
  for (std::size_t j = 1; j <= NS; ++j)
    tcol[j] = std::min(tcol[j], 1.5 * tcol[j - 1]);
  for (std::size_t j = NS; j-- > 0;)
    tcol[j] = std::min(tcol[j], 1.5 * tcol[j + 1]);

  for (std::size_t j = 1; j < NS; ++j) {
    for (int mrow = 0; mrow <= n_r; ++mrow) {
      if (mrow == 0) {
        cg[j][0] = B.add_vertex(Icol[j], kParamArc, S[j].u);
      } else if (mrow == n_r) {
        cg[j][n_r] = B.add_vertex(Ocol[j]);
      } else {
        const double rho = static_cast<double>(mrow) / n_r;
        cg[j][mrow] = B.add_vertex((1.0 - rho) * Icol[j] + rho * Ocol[j]);
      }
    }
  }

  // Winslow (elliptic) relaxation of the interior collar nodes.  The
  // algebraic blend carries shear wherever the short body arc fans onto a
  // long box side; sweeping the inverse harmonic map smooths the radials
  // into a quasi-conformal, shear-free layout while the body ring, box
  // ring, and cap columns stay fixed.  Jacobi sweeps (not Gauss-Seidel)
  // keep the relaxation mirror symmetric.
  {
    std::vector<std::vector<Vec2>> X(NS + 1, std::vector<Vec2>(n_r + 1));
    for (std::size_t j = 0; j <= NS; ++j)
      for (int m = 0; m <= n_r; ++m) X[j][m] = B.verts[cg[j][m]];
    auto Xn = X;
    // A fixed sweep count is enough: cell quality is set by the local
    // near-equilibrium reached within the collar's few rings, not by
    // global convergence, and it keeps the cost bounded at every level.
    for (int it = 0; it < kWinslowIters; ++it) {
      for (std::size_t j = 1; j < NS; ++j)
        for (int m = 1; m < n_r; ++m) {
          const Vec2 xr = X[j + 1][m], xl = X[j - 1][m];
          const Vec2 xt = X[j][m + 1], xb = X[j][m - 1];
          const Vec2 xi = 0.5 * (xr - xl), eta = 0.5 * (xt - xb);
          const double g11 = dot(xi, xi), g22 = dot(eta, eta);
          const double g12 = dot(xi, eta);
          const double denom = 2.0 * (g11 + g22);
          if (denom < 1e-300) continue;
          const Vec2 xc = X[j + 1][m + 1] - X[j + 1][m - 1] -
                          X[j - 1][m + 1] + X[j - 1][m - 1];
          Xn[j][m] = (1.0 / denom) * (g22 * (xr + xl) + g11 * (xt + xb) -
                                      (0.5 * g12) * xc);
        }
      std::swap(X, Xn);  // boundary rows/columns are never overwritten
    }
    for (std::size_t j = 1; j < NS; ++j)
      for (int m = 1; m < n_r; ++m) B.verts[cg[j][m]] = X[j][m];

    // Relaxation yields a shear-free direction field, but its equilibrium
    // first step off the body can exceed the local azimuthal width.  Clamp
    // just the first-step fraction to tcol and remap the remaining relaxed
    // fractions affinely, resampling each column along its own polyline;
    // the outer cells keep their relaxed proportions (a full geometric
    // regrade would stretch the last step across the slanted midsection of
    // the column and reintroduce shear at the surface).  Nodes only move
    // along already untangled column curves, so no crossings can appear.
    std::vector<double> cum(n_r + 1);
    for (std::size_t j = 1; j < NS; ++j) {
      cum[0] = 0.0;
      for (int m = 1; m <= n_r; ++m)
        cum[m] = cum[m - 1] + norm(X[j][m] - X[j][m - 1]);
      const double Lc = cum[n_r];
      const double r1 = cum[1] / Lc;  // relaxed first-step fraction
      const double p1 = std::min(std::min(tcol[j], Lc / n_r) / Lc, r1);
      if (p1 >= r1 * (1.0 - 1e-12)) continue;  // already fine enough
      int qb = 0;
      for (int m = 1; m < n_r; ++m) {
        const double rm = cum[m] / Lc;
        const double target =
            (p1 + (1.0 - p1) * (rm - r1) / (1.0 - r1)) * Lc;
        while (cum[qb + 1] < target) ++qb;
        const double f =
            (target - cum[qb]) / std::max(cum[qb + 1] - cum[qb], 1e-300);
        B.verts[cg[j][m]] = X[j][qb] + f * (X[j][qb + 1] - X[j][qb]);
      }
    }
  }
  for (std::size_t j = 0; j < NS; ++j)
    for (int mrow = 0; mrow < n_r; ++mrow)
      B.add_quad_best(cg[j][mrow], cg[j + 1][mrow], cg[j + 1][mrow + 1],
                      cg[j][mrow + 1], Region::Collar,
                      (static_cast<int>(j) + mrow) % 2 == 0);
  for (std::size_t j = 0; j < NS; ++j) {
    B.tag(cg[j][0], cg[j + 1][0], BoundaryTag::Body);
    const int seg = path.segment_of(0.5 * (S[j].s + S[j + 1].s));
    if (seg == 0 || seg == 4)
      B.tag(cg[j][n_r], cg[j + 1][n_r], BoundaryTag::Surface);
  }

  // --- deep block under the collar ---
  // Column positions are adopted from the collar's bottom ring.  Row heights
  // start at the finest adopted column width and grow geometrically up to
  // kCellAspect times it, bounding every cell's aspect ratio against the
  // narrowest column.
  const std::size_t NB = jc[2] - jc[1];  // under-body cells (x1 decreasing)
  double dx_min = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < NB; ++p)
    dx_min = std::min(dx_min, std::abs(B.verts[cg[jc[2] - p - 1][n_r]].x1 -
                                       B.verts[cg[jc[2] - p][n_r]].x1));
  const std::vector<double> ydeep = graded_steps(
      YB, dom.D, dx_min, std::min(h, kCellAspect * dx_min));
  const int nd = static_cast<int>(ydeep.size()) - 1;
  std::vector<std::vector<std::size_t>> bc(NB + 1,
                                           std::vector<std::size_t>(nd + 1));
  for (std::size_t p = 0; p <= NB; ++p) {
    bc[p][0] = cg[jc[2] - p][n_r];  // p = 0 at x1 = −XB, p = NB at +XB
    const double x = B.verts[bc[p][0]].x1;
    for (int qd = 1; qd <= nd; ++qd)
      bc[p][qd] = B.add_vertex({x, ydeep[qd]});
  }
  for (std::size_t p = 0; p < NB; ++p)
    for (int qd = 0; qd < nd; ++qd)
      B.add_quad(bc[p][qd], bc[p + 1][qd], bc[p + 1][qd + 1], bc[p][qd + 1],
                 Region::Deep, (static_cast<int>(p) + qd) % 2 == 0);
  for (std::size_t p = 0; p < NB; ++p)
    B.tag(bc[p][nd], bc[p + 1][nd], BoundaryTag::Bottom);

  // --- lateral far blocks ---
  // The far columns adopt every row height along the shared collar-wall /
  // deep column, which mixes fine surface grading with coarser wall and deep
  // spacing.  One graded width schedule (shared by both sides, keeping the
  // mesh mirror symmetric) starts at the geometric mean of the extreme row
  // heights — feasible while they are within kCellAspect² of each other —
  // and grows toward h.
  std::vector<double> row_h;
  auto wall_rows = [&](std::size_t a, std::size_t b) {
    for (std::size_t j = a; j < b; ++j)
      row_h.push_back(
          std::abs(B.verts[cg[j + 1][n_r]].x2 - B.verts[cg[j][n_r]].x2));
  };
  wall_rows(jc[0], jc[1]);
  wall_rows(jc[2], jc[3]);
  for (int qd = 0; qd < nd; ++qd) row_h.push_back(ydeep[qd + 1] - ydeep[qd]);
  const double rmin = *std::min_element(row_h.begin(), row_h.end());
  const double rmax = *std::max_element(row_h.begin(), row_h.end());
  check(rmax <= kCellAspect * kCellAspect * rmin * (1.0 + 1e-9),
        "mesh: far-block row heights too disparate");
  const double dx0 =
      std::clamp(std::sqrt(rmin * rmax),
                 std::min(rmax / kCellAspect, kCellAspect * rmin),
                 kCellAspect * rmin);
  const std::vector<double> xfar = graded_steps(XB, dom.L, dx0, h);
  const int npx = static_cast<int>(xfar.size()) - 1;
  auto far_block = [&](int side) {  // +1 right, −1 left
    const std::size_t w0 = side > 0 ? jc[0] : jc[3];
    const std::size_t n_wall = side > 0 ? jc[1] - jc[0] : jc[3] - jc[2];
    std::vector<std::size_t> left_ids;
    for (std::size_t r = 0; r <= n_wall; ++r)
      left_ids.push_back(side > 0 ? cg[w0 + r][n_r] : cg[w0 - r][n_r]);
    for (int qd = 1; qd <= nd; ++qd)
      left_ids.push_back(side > 0 ? bc[NB][qd] : bc[0][qd]);
    const std::size_t nyf = left_ids.size() - 1;
    std::vector<double> ys(nyf + 1);
    for (std::size_t r = 0; r <= nyf; ++r) ys[r] = B.verts[left_ids[r]].x2;
    std::vector<std::vector<std::size_t>> fr(
        npx + 1, std::vector<std::size_t>(nyf + 1));
    fr[0] = left_ids;
    for (int p = 1; p <= npx; ++p) {
      const double x = side * xfar[p];
      for (std::size_t r = 0; r <= nyf; ++r)
        fr[p][r] = B.add_vertex({x, ys[r]});
    }
    const Region reg = side > 0 ? Region::FarRight : Region::FarLeft;
    for (int p = 0; p < npx; ++p)
      for (std::size_t r = 0; r < nyf; ++r)
        B.add_quad(fr[p][r], fr[p + 1][r], fr[p + 1][r + 1], fr[p][r + 1], reg,
                   (p + static_cast<int>(r)) % 2 == 0);
    const BoundaryTag lat =
        side > 0 ? BoundaryTag::LateralRight : BoundaryTag::LateralLeft;
    for (int p = 0; p < npx; ++p) {
      B.tag(fr[p][0], fr[p + 1][0], BoundaryTag::Surface);
      B.tag(fr[p][nyf], fr[p + 1][nyf], BoundaryTag::Bottom);
    }
    for (std::size_t r = 0; r < nyf; ++r)
      B.tag(fr[npx][r], fr[npx][r + 1], lat);
  };
  far_block(+1);
  far_block(-1);

  Mesh m = B.finish(&body, &arc, x_ch);
  m.level = level;
  m.target_h = h;
  m.q_ratio = q;
  m.n_v = n_v;
  m.excision = dm;
  m.channel_breakpoints_right = xs_r;
  m.channel_breakpoints_left = xs_l;
  return m;
}

// ---------------------------------------------------------------------------
// Isolated channel strip
// ---------------------------------------------------------------------------

Mesh build_channel_strip_mesh(const DomainSpec& dom, int level,
                              double x_outer) {
  check(level >= 0 && level <= 6, "strip mesh: level must be in [0, 6]");
  check(!dom.body.empty(), "strip mesh: needs a body");
  const BodyShape& body = dom.body;
  const double dm = excision_radius(dom);
  check(x_outer > dm && x_outer <= body.tau() * (1.0 + 1e-12),
        "strip mesh: need excision < x_outer <= tau");
  const double h_scale = 1.0 / static_cast<double>(1 << level);
  const double h = (0.5 / dom.nu) * h_scale;
  const int n_v = 4 << level;
  const double q = std::pow(10.0, 1.0 / (12.0 * (1 << level)));

  Builder B;
  const std::vector<double> xs =
      channel_columns(body, +1, x_outer, dm, dom.fit_window[0], n_v, q, h);
  make_channel(B, body, xs, n_v, +1, true);
  Mesh m = B.finish(&body, nullptr, x_outer);
  m.level = level;
  m.target_h = h;
  m.q_ratio = q;
  m.n_v = n_v;
  m.excision = dm;
  m.channel_breakpoints_right = xs;
  return m;
}

// ---------------------------------------------------------------------------
// Quality audit
// ---------------------------------------------------------------------------

QualityReport mesh_quality(const Mesh& m, const DomainSpec& dom) {
  QualityReport r;
  r.triangle_count = m.triangles.size();
  r.vertex_count = m.vertices.size();
  r.p2_dof_count = m.p2_dof_count();

  const double d1 = dom.fit_window[0], d2 = dom.fit_window[1];
  double mb = 180.0, mw = 180.0, mt = 180.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const Vec2 P[3] = {m.vertices[m.triangles[t][0]],
                       m.vertices[m.triangles[t][1]],
                       m.vertices[m.triangles[t][2]]};
    if (cross2(P[1] - P[0], P[2] - P[0]) <= 0.0) ++r.inverted_count;
    double amin = 180.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = P[(k + 1) % 3] - P[k], v = P[(k + 2) % 3] - P[k];
      amin = std::min(
          amin, std::atan2(std::abs(cross2(u, v)), dot(u, v)) * 180.0 / kPi);
    }
    const Region reg = m.tri_region[t];
    const bool channel =
        reg == Region::ChannelRight || reg == Region::ChannelLeft;
    const double cx =
        std::abs(P[0].x1 + P[1].x1 + P[2].x1) / 3.0;
    if (channel && cx < d1) {
      mt = std::min(mt, amin);
    } else {
      mb = std::min(mb, amin);
      if (channel && cx <= d2) mw = std::min(mw, amin);
    }
  }
  r.min_angle_bulk_deg = mb;
  r.min_angle_window_deg = mw;
  r.min_angle_tip_deg = mt;

  // Edge-use structure.
  std::vector<int> cnt(m.edges.size(), 0);
  for (const auto& te : m.tri_edges)
    for (int k = 0; k < 3; ++k) ++cnt[te[k]];
  bool conforming = true, tags_ok = true;
  std::size_t nb = 0;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    if (cnt[e] < 1 || cnt[e] > 2) conforming = false;
    if (cnt[e] == 1) {
      ++nb;
      if (m.edge_tags[e] == BoundaryTag::None) tags_ok = false;
    } else if (m.edge_tags[e] != BoundaryTag::None) {
      tags_ok = false;
    }
  }
  if (nb != m.boundary_faces.size()) conforming = false;
  r.conforming = conforming;
  r.tags_ok = tags_ok;

  // Channel layer densities (columns per decade of |x1|).
  const double inf = std::numeric_limits<double>::infinity();
  auto per_decade = [&](double lo, double hi) {
    if (hi <= lo * (1.0 + 1e-12)) return inf;
    double best = inf;
    for (const auto* xs :
         {&m.channel_breakpoints_right, &m.channel_breakpoints_left}) {
      if (xs->empty()) continue;
      int n = 0;
      for (double x : *xs)
        if (x >= lo * (1.0 - 1e-12) && x <= hi * (1.0 + 1e-12)) ++n;
      best = std::min(best, (n - 1) / std::log10(hi / lo));
    }
    return best;
  };
  if (!m.channel_breakpoints_right.empty() ||
      !m.channel_breakpoints_left.empty()) {
    r.window_layers_per_decade = per_decade(d1, d2);
    r.tip_layers_per_decade = per_decade(m.excision, d1);
  } else {
    r.window_layers_per_decade = inf;
    r.tip_layers_per_decade = inf;
  }

  // Midside offsets of curved body edges relative to the chord.
  double sag = 0.0;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    if (m.edge_tags[e] != BoundaryTag::Body) continue;
    const Vec2 A = m.vertices[m.edges[e][0]], Bv = m.vertices[m.edges[e][1]];
    const double chord = norm(Bv - A);
    if (chord > 0.0)
      sag = std::max(sag,
                     norm(m.edge_midpoints[e] - 0.5 * (A + Bv)) / chord);
  }
  r.max_body_sagitta_ratio = sag;
  return r;
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

void write_mesh_csv(const Mesh& m, const std::string& vertex_path,
                    const std::string& triangle_path) {
  std::ofstream vf(vertex_path);
  check(vf.good(), "write_mesh_csv: cannot open " + vertex_path);
  vf.precision(17);
  vf << "id,x1,x2\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    vf << i << ',' << m.vertices[i].x1 << ',' << m.vertices[i].x2 << '\n';
  check(vf.good(), "write_mesh_csv: write failed for " + vertex_path);

  std::ofstream tf(triangle_path);
  check(tf.good(), "write_mesh_csv: cannot open " + triangle_path);
  tf << "id,v0,v1,v2,region\n";
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    tf << t << ',' << m.triangles[t][0] << ',' << m.triangles[t][1] << ','
       << m.triangles[t][2] << ',' << static_cast<int>(m.tri_region[t])
       << '\n';
  check(tf.good(), "write_mesh_csv: write failed for " + triangle_path);
}

}  // namespace cuspwave::mesh
