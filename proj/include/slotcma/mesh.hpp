#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace slotcma {

// Axis-aligned rectangular cutout, dimensions in meters.
struct SlotSpec {
  Eigen::Vector2d center{0.0, 0.0};
  double len_x = 0.0;
  double len_y = 0.0;
};

// Rectangular PEC plate in the z = 0 plane, centered at the origin,
// x along the length, y along the width.
struct PlateSpec {
  double length_x = 0.0;
  double width_y = 0.0;
  std::optional<SlotSpec> slot;
  double target_edge = 0.0;
};

using EdgeKey = std::pair<int, int>;  // vertex ids, smaller first

struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  // Undirected edge -> adjacent triangle ids, in triangle-index order.
  std::map<EdgeKey, std::vector<int>> edge_table;

  double triangle_area(int t) const;
  Eigen::Vector3d centroid(int t) const;
  double total_area() const;

  // xy extent of the modeled plate (z = 0).
  Eigen::AlignedBox2d footprint() const;

  void rebuild_edge_table();
};

// One basis function per interior edge, defined on the two adjacent
// triangles. Current flows from the plus triangle into the minus one.
struct RwgEntry {
  int edge_id = -1;
  int vert_a = -1, vert_b = -1;  // edge endpoints, vert_a < vert_b
  int plus_triangle = -1, minus_triangle = -1;
  double edge_length = 0.0;
  int plus_free_vertex = -1, minus_free_vertex = -1;
};

struct RwgSet {
  std::vector<RwgEntry> entries;
  int count() const { return static_cast<int>(entries.size()); }
};

// Structured grid with slot edges snapped onto mesh lines; slot interior
// cells removed. Throws GeometryError / ResolutionError on invalid specs.
TriMesh build_plate(const PlateSpec& spec);

// Interior-edge census in lexicographic (vertex-pair) order.
// Throws TopologyError on non-manifold edges.
RwgSet enumerate_rwg(const TriMesh& mesh);

// Plain-text mesh format: "v x y z" lines (meters, 17 significant digits)
// followed by "t i j k" lines (0-based).
void write_mesh_text(const TriMesh& mesh, std::ostream& os);
TriMesh read_mesh_text(std::istream& is);

}  // namespace slotcma
