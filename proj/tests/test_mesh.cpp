// SPDX-License-Identifier: MIT
//
// Mesh generator tests: structural invariants (conformity, orientation,
// boundary tags on their geometry), angle and grading quality, tip
// excision, refinement scaling, mirror symmetry, determinism, the
// body-free rectangle, the isolated channel strip, and CSV export.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "mesh.hpp"

using namespace cuspwave;
using namespace cuspwave::mesh;
using geometry::BodyShape;
using geometry::DomainSpec;

namespace {

DomainSpec ellipse_domain(double delta = 0.0) {
  BodyShape body = BodyShape::make_ellipse(1.0, 0.3);
  return geometry::truncate_domain(body, delta, 10.0, 8.0, {0.02, 0.2}, 1.0);
}

bool has_tag(const Mesh& m, BoundaryTag t) {
  for (const auto& f : m.boundary_faces)
    if (f.tag == t) return true;
  return false;
}

double ellipse_residual(Vec2 p, double a, double b) {
  const double u = p.x1 / a, v = (p.x2 - b) / b;
  return std::abs(u * u + v * v - 1.0);
}

}  // namespace

TEST_CASE("ellipse level 0: structural invariants and quality") {
  const DomainSpec dom = ellipse_domain();
  const Mesh m = build_mesh(dom, 0);
  const QualityReport q = mesh_quality(m, dom);

  CHECK(q.conforming);
  CHECK(q.tags_ok);
  CHECK(q.inverted_count == 0);

  // Shape regularity away from the tip, and inside the fit window.
  CHECK(q.min_angle_bulk_deg >= 15.0);
  CHECK(q.min_angle_window_deg >= 15.0);
  CHECK(q.min_angle_tip_deg > 0.0);  // anisotropic but not degenerate

  // Channel resolution: at least 12 graded layers per decade of |x1|.
  CHECK(q.window_layers_per_decade >= 12.0);
  CHECK(q.tip_layers_per_decade >= 12.0);

  // Curved boundary fidelity: midside offset stays a small fraction of the
  // chord, so the quadratic arcs track the body well.
  CHECK(q.max_body_sagitta_ratio <= 0.2);

  // Desk-scale size band (exact counts are covered by the determinism
  // case; this guards against runaway or collapsed grading).
  CHECK(q.triangle_count >= 6000);
  CHECK(q.triangle_count <= 16000);
  CHECK(q.p2_dof_count == m.p2_dof_count());

  // All boundary pieces of the cut domain are represented.
  CHECK(has_tag(m, BoundaryTag::Surface));
  CHECK(has_tag(m, BoundaryTag::Body));
  CHECK(has_tag(m, BoundaryTag::LateralRight));
  CHECK(has_tag(m, BoundaryTag::LateralLeft));
  CHECK(has_tag(m, BoundaryTag::Bottom));
  CHECK(has_tag(m, BoundaryTag::CuspExcisionRight));
  CHECK(has_tag(m, BoundaryTag::CuspExcisionLeft));
  CHECK_FALSE(has_tag(m, BoundaryTag::StripOuter));

  // Grading descriptor matches the level-0 contract.
  CHECK(m.level == 0);
  CHECK(m.n_v == 4);
  CHECK(m.target_h > 0.0);
  CHECK(m.q_ratio == doctest::Approx(std::pow(10.0, 1.0 / 12.0)).epsilon(1e-12));
  CHECK(m.channel_breakpoints_right.size() == m.channel_breakpoints_left.size());
  CHECK(m.channel_breakpoints_right.size() > 100);
}

TEST_CASE("refinement: level 1 quadruples the mesh and halves the scales") {
  const DomainSpec dom = ellipse_domain();
  const Mesh m0 = build_mesh(dom, 0);
  const Mesh m1 = build_mesh(dom, 1);
  const double ratio = static_cast<double>(m1.triangles.size()) /
                       static_cast<double>(m0.triangles.size());
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
  CHECK(m1.target_h == doctest::Approx(0.5 * m0.target_h).epsilon(1e-15));
  CHECK(m1.n_v == 2 * m0.n_v);
  // Tip grading ratio: q^(2) at level 1 equals q at level 0.
  CHECK(m1.q_ratio * m1.q_ratio == doctest::Approx(m0.q_ratio).epsilon(1e-12));
}

TEST_CASE("levels 1 and 2 keep the angle and grading contract") {
  const DomainSpec dom = ellipse_domain();
  for (int level : {1, 2}) {
    CAPTURE(level);
    const Mesh m = build_mesh(dom, level);
    const QualityReport q = mesh_quality(m, dom);
    CHECK(q.conforming);
    CHECK(q.tags_ok);
    CHECK(q.inverted_count == 0);
    CHECK(q.min_angle_bulk_deg >= 15.0);
    CHECK(q.min_angle_window_deg >= 15.0);
    CHECK(q.window_layers_per_decade >= 12.0 * (1 << level));
    CHECK(q.max_body_sagitta_ratio <= 0.2);
  }
}

TEST_CASE("tip excision: default radius and explicit delta") {
  // Default: delta = 0 grades into the cusp down to delta_mesh = d1/4.
  {
    const DomainSpec dom = ellipse_domain();
    const Mesh m = build_mesh(dom, 0);
    const double dm = excision_radius(dom);
    CHECK(dm == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(m.excision == doctest::Approx(dm).epsilon(1e-15));
    const double gap = dom.body.phi(dm);
    for (const Vec2& v : m.vertices) {
      // No vertex inside the excised channel wedge |x1| < delta_mesh.
      if (std::abs(v.x1) < dm * (1.0 - 1e-9)) CHECK(v.x2 >= gap - 1e-12);
    }
    // The excision faces span the channel height at |x1| = delta_mesh.
    int n_right = 0;
    for (const auto& f : m.boundary_faces) {
      if (f.tag != BoundaryTag::CuspExcisionRight) continue;
      ++n_right;
      const auto& e = m.edges[f.edge];
      CHECK(m.vertices[e[0]].x1 == doctest::Approx(dm).epsilon(1e-12));
      CHECK(m.vertices[e[1]].x1 == doctest::Approx(dm).epsilon(1e-12));
    }
    CHECK(n_right == m.n_v);
  }
  // Explicit delta wins over the default.
  {
    const DomainSpec dom = ellipse_domain(0.01);
    const Mesh m = build_mesh(dom, 0);
    CHECK(m.excision == doctest::Approx(0.01).epsilon(1e-15));
    for (const Vec2& v : m.vertices)
      if (std::abs(v.x1) < 0.01 * (1.0 - 1e-9))
        CHECK(v.x2 >= dom.body.phi(0.01) - 1e-12);
    const QualityReport q = mesh_quality(m, dom);
    CHECK(q.conforming);
    CHECK(q.inverted_count == 0);
  }
}

TEST_CASE("boundary tags lie on their geometry") {
  const DomainSpec dom = ellipse_domain();
  const Mesh m = build_mesh(dom, 0);
  const double dm = m.excision;
  for (const auto& f : m.boundary_faces) {
    const auto& e = m.edges[f.edge];
    const Vec2 p = m.vertices[e[0]], r = m.vertices[e[1]];
    const Vec2 mid = m.edge_midpoints[f.edge];
    switch (f.tag) {
      case BoundaryTag::Surface:
        CHECK(std::abs(p.x2) <= 1e-14);
        CHECK(std::abs(r.x2) <= 1e-14);
        break;
      case BoundaryTag::LateralRight:
        CHECK(p.x1 == doctest::Approx(dom.L).epsilon(1e-12));
        CHECK(r.x1 == doctest::Approx(dom.L).epsilon(1e-12));
        break;
      case BoundaryTag::LateralLeft:
        CHECK(p.x1 == doctest::Approx(-dom.L).epsilon(1e-12));
        break;
      case BoundaryTag::Bottom:
        CHECK(p.x2 == doctest::Approx(dom.D).epsilon(1e-12));
        CHECK(r.x2 == doctest::Approx(dom.D).epsilon(1e-12));
        break;
      case BoundaryTag::Body:
        // Vertices and the curved midside node sit on the ellipse.
        CHECK(ellipse_residual(p, 1.0, 0.3) <= 1e-10);
        CHECK(ellipse_residual(r, 1.0, 0.3) <= 1e-10);
        CHECK(ellipse_residual(mid, 1.0, 0.3) <= 1e-10);
        break;
      case BoundaryTag::CuspExcisionRight:
        CHECK(std::abs(p.x1 - dm) <= 1e-12);
        break;
      case BoundaryTag::CuspExcisionLeft:
        CHECK(std::abs(p.x1 + dm) <= 1e-12);
        break;
      default:
        FAIL("unexpected boundary tag");
    }
  }
}

TEST_CASE("straight-boundary midsides are chord midpoints") {
  const DomainSpec dom = ellipse_domain();
  const Mesh m = build_mesh(dom, 0);
  double max_body_offset = 0.0;
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const Vec2 chord_mid =
        0.5 * (m.vertices[m.edges[e][0]] + m.vertices[m.edges[e][1]]);
    const double off = norm(m.edge_midpoints[e] - chord_mid);
    if (m.edge_tags[e] == BoundaryTag::Body) {
      max_body_offset = std::max(max_body_offset, off);
    } else {
      CHECK(off <= 1e-14);  // only the body boundary is curved
    }
  }
  CHECK(max_body_offset > 0.0);  // the body really is curved
}

TEST_CASE("mirror symmetry of the vertex set") {
  const DomainSpec dom = ellipse_domain();
  const Mesh m = build_mesh(dom, 1);
  // Every vertex must have a partner at (-x1, x2).  Matching is by nearest
  // neighbor inside a small x1 window (vertex separations are orders of
  // magnitude above the tolerance, so the match is unambiguous).
  std::vector<Vec2> sorted = m.vertices;
  auto lex = [](const Vec2& u, const Vec2& v) {
    return u.x1 != v.x1 ? u.x1 < v.x1 : u.x2 < v.x2;
  };
  std::sort(sorted.begin(), sorted.end(), lex);
  double worst = 0.0;
  for (const Vec2& p : m.vertices) {
    const Vec2 q{-p.x1, p.x2};
    auto it = std::lower_bound(sorted.begin(), sorted.end(),
                               Vec2{q.x1 - 1e-6, q.x2}, lex);
    double best = std::numeric_limits<double>::infinity();
    for (; it != sorted.end() && it->x1 < q.x1 + 1e-6; ++it)
      best = std::min(best, norm(*it - q));
    worst = std::max(worst, best);
  }
  CHECK(worst <= 5e-8);

  // Region bookkeeping mirrors as well.
  std::size_t n_right = 0, n_left = 0, far_r = 0, far_l = 0;
  for (Region r : m.tri_region) {
    n_right += r == Region::ChannelRight;
    n_left += r == Region::ChannelLeft;
    far_r += r == Region::FarRight;
    far_l += r == Region::FarLeft;
  }
  CHECK(n_right == n_left);
  CHECK(far_r == far_l);
  CHECK(n_right > 0);
  CHECK(far_r > 0);
}

TEST_CASE("deterministic rebuild is bitwise identical") {
  const DomainSpec dom = ellipse_domain();
  const Mesh m1 = build_mesh(dom, 1);
  const Mesh m2 = build_mesh(dom, 1);
  REQUIRE(m1.vertices.size() == m2.vertices.size());
  REQUIRE(m1.triangles.size() == m2.triangles.size());
  REQUIRE(m1.edges.size() == m2.edges.size());
  bool same = true;
  for (std::size_t i = 0; i < m1.vertices.size(); ++i)
    same = same && m1.vertices[i].x1 == m2.vertices[i].x1 &&
           m1.vertices[i].x2 == m2.vertices[i].x2;
  for (std::size_t t = 0; t < m1.triangles.size(); ++t)
    same = same && m1.triangles[t] == m2.triangles[t];
  for (std::size_t e = 0; e < m1.edges.size(); ++e)
    same = same && m1.edges[e] == m2.edges[e] &&
           m1.edge_tags[e] == m2.edge_tags[e];
  CHECK(same);
}

TEST_CASE("body-free domain meshes as a plain rectangle") {
  BodyShape none = BodyShape::make_none();
  DomainSpec dom =
      geometry::truncate_domain(none, 0.0, 10.0, 8.0, {0.02, 0.2}, 1.0);
  const Mesh m = build_mesh(dom, 0);
  const QualityReport q = mesh_quality(m, dom);
  CHECK(q.conforming);
  CHECK(q.tags_ok);
  CHECK(q.inverted_count == 0);
  CHECK(q.min_angle_bulk_deg >= 15.0);
  CHECK(has_tag(m, BoundaryTag::Surface));
  CHECK(has_tag(m, BoundaryTag::Bottom));
  CHECK(has_tag(m, BoundaryTag::LateralRight));
  CHECK(has_tag(m, BoundaryTag::LateralLeft));
  CHECK_FALSE(has_tag(m, BoundaryTag::Body));
  CHECK_FALSE(has_tag(m, BoundaryTag::CuspExcisionRight));
  CHECK(m.channel_breakpoints_right.empty());
  for (const Vec2& v : m.vertices) {
    CHECK(v.x2 >= -1e-14);
    CHECK(v.x2 <= dom.D + 1e-12);
    CHECK(std::abs(v.x1) <= dom.L + 1e-12);
  }
}

TEST_CASE("isolated channel strip mesh") {
  const DomainSpec dom = ellipse_domain();
  const double x_outer = dom.body.tau();
  const Mesh m = build_channel_strip_mesh(dom, 0, x_outer);
  const QualityReport q = mesh_quality(m, dom);
  CHECK(q.conforming);
  CHECK(q.inverted_count == 0);
  CHECK(q.min_angle_window_deg >= 15.0);
  CHECK(q.window_layers_per_decade >= 12.0);
  CHECK(has_tag(m, BoundaryTag::StripOuter));
  CHECK(has_tag(m, BoundaryTag::Surface));
  CHECK(has_tag(m, BoundaryTag::Body));
  CHECK(has_tag(m, BoundaryTag::CuspExcisionRight));
  CHECK_FALSE(has_tag(m, BoundaryTag::LateralRight));
  CHECK_FALSE(has_tag(m, BoundaryTag::Bottom));
  for (const auto& f : m.boundary_faces) {
    if (f.tag != BoundaryTag::StripOuter) continue;
    const auto& e = m.edges[f.edge];
    CHECK(m.vertices[e[0]].x1 == doctest::Approx(x_outer).epsilon(1e-12));
    CHECK(m.vertices[e[1]].x1 == doctest::Approx(x_outer).epsilon(1e-12));
  }
  // Strictly inside the strip: delta_mesh <= x1 <= x_outer.
  for (const Vec2& v : m.vertices) {
    CHECK(v.x1 >= m.excision - 1e-12);
    CHECK(v.x1 <= x_outer + 1e-12);
  }
}

TEST_CASE("tabulated body builds an equivalent mesh") {
  // Sample the reference ellipse densely and rebuild it through the periodic
  // spline; the meshes need not match node-for-node, but the quality and
  // structure contracts must hold unchanged.
  BodyShape ref = BodyShape::make_ellipse(1.0, 0.3);
  std::vector<std::array<double, 3>> samples;
  const int n = 720;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * i / n;
    const Vec2 p = ref.point(t);
    samples.push_back({t, p.x1, p.x2});
  }
  BodyShape tab = BodyShape::make_tabulated(samples);
  DomainSpec dom =
      geometry::truncate_domain(tab, 0.0, 10.0, 8.0, {0.02, 0.2}, 1.0);
  const Mesh m = build_mesh(dom, 0);
  const QualityReport q = mesh_quality(m, dom);
  CHECK(q.conforming);
  CHECK(q.tags_ok);
  CHECK(q.inverted_count == 0);
  CHECK(q.min_angle_bulk_deg >= 15.0);
  CHECK(q.min_angle_window_deg >= 15.0);
  CHECK(q.window_layers_per_decade >= 12.0);
  CHECK(q.max_body_sagitta_ratio <= 0.2);
}

TEST_CASE("level validation") {
  const DomainSpec dom = ellipse_domain();
  CHECK_THROWS_AS(build_mesh(dom, -1), Error);
  CHECK_THROWS_AS(build_mesh(dom, 7), Error);
  CHECK_THROWS_AS(build_channel_strip_mesh(dom, -1, 0.8), Error);
}

TEST_CASE("csv export writes both tables") {
  namespace fs = std::filesystem;
  const DomainSpec dom = ellipse_domain();
  const Mesh m = build_mesh(dom, 0);
  const fs::path dir = fs::temp_directory_path() / "cuspwave_mesh_csv";
  fs::create_directories(dir);
  const std::string vp = (dir / "vertices.csv").string();
  const std::string tp = (dir / "triangles.csv").string();
  write_mesh_csv(m, vp, tp);
  auto count_lines = [](const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++n;
    return n;
  };
  CHECK(count_lines(vp) == m.vertices.size() + 1);   // header + rows
  CHECK(count_lines(tp) == m.triangles.size() + 1);
  std::ifstream in(vp);
  std::string header;
  std::getline(in, header);
  CHECK(header == "id,x1,x2");
  fs::remove_all(dir);
}
