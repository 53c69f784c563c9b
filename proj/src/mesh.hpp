// SPDX-License-Identifier: MIT
//
// cuspwave/mesh: conforming P2-ready triangulations of the truncated water
// domain around a surface-tangent body.
//
// The generator is structured and fully deterministic.  The water region
// { |x1| <= L, 0 <= x2 <= D } \ body splits into
//
//   * two cusp-channel blocks { delta_mesh <= ±x1 <= tau, 0 <= x2 <= phi(x1) }
//     meshed by graded trapezoid columns.  Inside the exponent-fit window the
//     column width is capped at a fixed multiple of the local channel height
//     (bounded aspect ratio, hence bounded minimum angle); below the window
//     the grading is geometric with ratio q = 10^(1/(12·2^level)), which
//     yields 12·2^level layers per decade of |x1| and deliberately thin,
//     channel-aligned cells (the field there varies like |x1|^(-Λ) with a
//     slowly varying vertical profile, so anisotropy matches the solution),
//   * a transfinite "C-grid" annulus between the body boundary (from one
//     channel mouth around the deep side to the other) and an outer box path
//     running along the surface, down the sides and under the body,
//   * three tensor-product blocks filling the rest of the box: two lateral
//     far-field blocks and one deep block under the C-grid.
//
// Blocks share interface node ids, so the mesh is conforming by construction.
// Midside nodes of boundary edges on the body are placed exactly on the body
// curve (quadratic/isoparametric boundary arcs); all other midside nodes are
// chord midpoints.  The cusp tip region |x1| < delta_mesh is excised and its
// vertical faces are tagged CuspExcision± (the discretization chooses the tip
// face condition).

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"

namespace cuspwave::mesh {

enum class BoundaryTag : int {
  None = 0,          // interior edge
  Surface = 1,       // free surface x2 = 0
  Body = 2,          // body boundary S
  LateralRight = 3,  // x1 = +L
  LateralLeft = 4,   // x1 = -L
  Bottom = 5,        // x2 = D
  CuspExcisionRight = 6,  // x1 = +delta_mesh channel face
  CuspExcisionLeft = 7,   // x1 = -delta_mesh channel face
  StripOuter = 8,    // outer face of an isolated channel strip mesh
};

// Mesh regions (per triangle, for audits and diagnostics).
enum class Region : int {
  Bulk = 0,
  ChannelRight = 1,
  ChannelLeft = 2,
  Collar = 3,     // C-grid annulus around the body
  FarRight = 4,
  FarLeft = 5,
  Deep = 6,       // block under the body collar
};

// A boundary edge together with its owning triangle and local side index
// (side k is the edge opposite local vertex k, i.e. between corners k+1, k+2).
struct BoundaryFace {
  std::size_t edge = 0;
  std::size_t tri = 0;
  int side = 0;
  BoundaryTag tag = BoundaryTag::None;
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;  // positive orientation
  std::vector<Region> tri_region;

  // Edge table: canonical (lo, hi) vertex pairs; tri_edges[t][k] is the edge
  // opposite local vertex k of triangle t.  P2 dof = vertex ids followed by
  // (n_vertices + edge id).
  std::vector<std::array<std::size_t, 2>> edges;
  std::vector<std::array<std::size_t, 3>> tri_edges;
  std::vector<Vec2> edge_midpoints;  // geometric midside nodes (curved on S)
  std::vector<BoundaryTag> edge_tags;
  std::vector<BoundaryFace> boundary_faces;

  // Grading descriptor.
  int level = 0;
  double target_h = 0.0;    // bulk cell size at this level
  double q_ratio = 0.0;     // geometric grading ratio in the tip zone
  int n_v = 0;              // vertical cells across the channel (= radial cells)
  double excision = 0.0;    // delta_mesh actually applied
  std::vector<double> channel_breakpoints_right;  // |x1| columns, outer→inner
  std::vector<double> channel_breakpoints_left;

  std::size_t p2_dof_count() const { return vertices.size() + edges.size(); }
};

// Structural quality audit (geometric checks beyond what construction
// guarantees live in the tests).
struct QualityReport {
  bool conforming = false;     // every edge borders 1 or 2 triangles, oriented
  bool tags_ok = false;        // boundary edges tagged, interior edges not
  int inverted_count = 0;      // triangles with nonpositive signed area
  double min_angle_bulk_deg = 0.0;    // all triangles except channel |x1| < d1
  double min_angle_window_deg = 0.0;  // channel triangles with |x1| in [d1,d2]
  double min_angle_tip_deg = 0.0;     // channel triangles with |x1| < d1
  double window_layers_per_decade = 0.0;  // channel columns per decade in window
  double tip_layers_per_decade = 0.0;     // ... below the window
  double max_body_sagitta_ratio = 0.0;    // midside offset / chord on S
  std::size_t triangle_count = 0;
  std::size_t vertex_count = 0;
  std::size_t p2_dof_count = 0;
};

// The excision radius the mesher applies: the user's delta when positive,
// otherwise delta_mesh = d1/4 (grade into the cusp through the fit window).
inline double excision_radius(const geometry::DomainSpec& dom) {
  return dom.delta > 0.0 ? dom.delta : dom.fit_window[0] / 4.0;
}

// Build the mesh at refinement `level` >= 0.  Level k+1 halves the target
// cell size of level k everywhere (bulk h, channel aspect cap, tip grading
// ratio and vertical subdivision), so triangle counts grow by ~4x.
// An empty body yields a plain graded rectangle mesh of the box.
Mesh build_mesh(const geometry::DomainSpec& dom, int level);

// An isolated right-channel strip { delta_mesh <= x1 <= x_outer } meshed
// exactly as the channel block of build_mesh; the outer vertical face is
// tagged StripOuter (for Dirichlet injection in grading studies).
Mesh build_channel_strip_mesh(const geometry::DomainSpec& dom, int level,
                              double x_outer);

QualityReport mesh_quality(const Mesh& m, const geometry::DomainSpec& dom);

// CSV export: vertex table "id,x1,x2" and triangle table
// "id,v0,v1,v2,region".  Paths are created/truncated.
void write_mesh_csv(const Mesh& m, const std::string& vertex_path,
                    const std::string& triangle_path);

}  // namespace cuspwave::mesh
