#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "tac/types.hpp"

namespace tac {

enum class BoundaryTag { Gamma1, Gamma2, GammaC };

/// Conforming P1 triangulation of the body with tagged boundary parts.
/// Gamma1 = clamped part (top), Gamma2 = traction part (lateral sides),
/// GammaC = contact surface (bottom edge, a 1-D interface).
struct Mesh {
  struct BoundaryEdge {
    int a = 0, b = 0;
    BoundaryTag tag = BoundaryTag::Gamma1;
  };

  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> surface_nodes;  // GammaC nodes ordered by x
  double h = 0.0;                  // max element diameter

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_surface_nodes() const { return static_cast<int>(surface_nodes.size()); }

  // Outward normal and tangent of the (flat) contact surface.
  Vec2 contact_normal() const { return Vec2(0.0, -1.0); }
  Vec2 contact_tangent() const { return Vec2(1.0, 0.0); }

  std::vector<bool> gamma1_node_mask() const;

  /// Conformity, tag partition and surface ordering checks; throws on defects.
  void validate() const;
};

/// Structured triangulation of the unit square with n subdivisions per side
/// (2 n^2 triangles). Throws std::invalid_argument for n < 2.
Mesh build_unit_square_mesh(int n);

// Plain-text exchange format. Header line "tacmesh <nnodes> <ntris> <nedges>",
// then one "x y" line per node, one "i j k" line per triangle, and one
// "a b tag" line per boundary edge (tag in {gamma1, gamma2, gammac}).
void write_mesh(const Mesh& mesh, std::ostream& os);
Mesh read_mesh(std::istream& is);
void write_mesh_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_file(const std::string& path);

}  // namespace tac
