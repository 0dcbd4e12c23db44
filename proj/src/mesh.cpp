#include "slotcma/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "slotcma/errors.hpp"

namespace slotcma {

namespace {

Eigen::Vector3d tri_cross(const TriMesh& m, int t) {
  const auto& tri = m.triangles[t];
  const Eigen::Vector3d& a = m.vertices[tri[0]];
  const Eigen::Vector3d& b = m.vertices[tri[1]];
  const Eigen::Vector3d& c = m.vertices[tri[2]];
  return (b - a).cross(c - a);
}

}  // namespace

double TriMesh::triangle_area(int t) const { return 0.5 * tri_cross(*this, t).norm(); }

Eigen::Vector3d TriMesh::centroid(int t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

double TriMesh::total_area() const {
  // Kahan summation keeps the area ledger exact to well below 1e-12 relative.
  double sum = 0.0, comp = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    double y = triangle_area(t) - comp;
    double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

Eigen::AlignedBox2d TriMesh::footprint() const {
  Eigen::AlignedBox2d box;
  for (const auto& v : vertices) box.extend(Eigen::Vector2d(v.x(), v.y()));
  return box;
}

void TriMesh::rebuild_edge_table() {
  edge_table.clear();
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    const auto& tri = triangles[t];
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edge_table[{a, b}].push_back(t);
    }
  }
}

namespace {

constexpr double kSnapFraction = 0.06;  // keeps every edge under 1.5x target

struct AxisLines {
  std::vector<double> pos;
  std::vector<bool> pinned;
};

// Uniform subdivision of [lo, hi]; slot bounds are snapped onto existing
// lines when within kSnapFraction of a cell, inserted otherwise. For a slot
// narrower than the target edge the lines crossing its interior are dropped
// so it occupies a single thin row of cells.
AxisLines axis_lines(double lo, double hi, double target,
                     std::optional<std::pair<double, double>> slot_span) {
  const double span = hi - lo;
  const int n = std::max(1, static_cast<int>(std::ceil(span / target - 1e-9)));
  AxisLines lines;
  lines.pos.resize(n + 1);
  for (int i = 0; i <= n; ++i) lines.pos[i] = lo + span * i / n;
  lines.pos.front() = lo;
  lines.pos.back() = hi;
  lines.pinned.assign(lines.pos.size(), false);
  if (!slot_span) return lines;

  const double h = span / n;
  const double tol_eq = 1e-12 * std::max(span, std::max(std::abs(lo), std::abs(hi)));
  for (double b : {slot_span->first, slot_span->second}) {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(lines.pos.size()); ++j) {
      if (lines.pinned[j]) continue;
      double d = std::abs(lines.pos[j] - b);
      if (d < dist) {
        dist = d;
        best = j;
      }
    }
    const bool endpoint = (best == 0 || best == static_cast<int>(lines.pos.size()) - 1);
    if (best >= 0 && !endpoint && (dist <= tol_eq || dist <= kSnapFraction * h)) {
      lines.pos[best] = b;
      lines.pinned[best] = true;
      continue;
    }
    auto it = std::upper_bound(lines.pos.begin(), lines.pos.end(), b);
    auto idx = it - lines.pos.begin();
    lines.pos.insert(it, b);
    lines.pinned.insert(lines.pinned.begin() + idx, true);
  }

  const double extent = slot_span->second - slot_span->first;
  if (extent <= target * (1.0 + 1e-9)) {
    for (int j = static_cast<int>(lines.pos.size()) - 1; j >= 0; --j) {
      if (lines.pinned[j]) continue;
      if (lines.pos[j] > slot_span->first + tol_eq && lines.pos[j] < slot_span->second - tol_eq) {
        lines.pos.erase(lines.pos.begin() + j);
        lines.pinned.erase(lines.pinned.begin() + j);
      }
    }
  }
  return lines;
}

void validate_spec(const PlateSpec& spec) {
  if (!(spec.length_x > 0.0) || !(spec.width_y > 0.0))
    throw GeometryError("plate dimensions must be positive");
  if (!(spec.target_edge > 0.0)) throw GeometryError("target edge length must be positive");
  if (spec.target_edge > 0.5 * std::min(spec.length_x, spec.width_y))
    throw ResolutionError("target edge length exceeds half the smaller plate dimension");
  if (spec.slot) {
    const auto& s = *spec.slot;
    if (!(s.len_x > 0.0) || !(s.len_y > 0.0))
      throw GeometryError("slot dimensions must be positive");
    const double margin = 1e-12 * std::max(spec.length_x, spec.width_y);
    const double x0 = s.center.x() - 0.5 * s.len_x, x1 = s.center.x() + 0.5 * s.len_x;
    const double y0 = s.center.y() - 0.5 * s.len_y, y1 = s.center.y() + 0.5 * s.len_y;
    if (x0 <= -0.5 * spec.length_x + margin || x1 >= 0.5 * spec.length_x - margin ||
        y0 <= -0.5 * spec.width_y + margin || y1 >= 0.5 * spec.width_y - margin)
      throw GeometryError("slot must lie strictly inside the plate boundary");
  }
}

void validate_mesh(const TriMesh& mesh, double expected_area) {
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    if (!(mesh.triangle_area(t) > 0.0)) throw TopologyError("triangle with non-positive area");
  }
  for (const auto& [key, tris] : mesh.edge_table) {
    if (tris.empty() || tris.size() > 2)
      throw TopologyError("edge (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) + ") adjacent to " +
                          std::to_string(tris.size()) + " triangles");
  }
  if (expected_area > 0.0) {
    const double rel = std::abs(mesh.total_area() - expected_area) / expected_area;
    if (rel > 1e-12)
      throw GeometryError("mesh area deviates from analytic plate area by " +
                          std::to_string(rel));
  }
}

}  // namespace

TriMesh build_plate(const PlateSpec& spec) {
  validate_spec(spec);

  std::optional<std::pair<double, double>> xs_span, ys_span;
  if (spec.slot) {
    xs_span = {spec.slot->center.x() - 0.5 * spec.slot->len_x,
               spec.slot->center.x() + 0.5 * spec.slot->len_x};
    ys_span = {spec.slot->center.y() - 0.5 * spec.slot->len_y,
               spec.slot->center.y() + 0.5 * spec.slot->len_y};
  }
  const AxisLines xs = axis_lines(-0.5 * spec.length_x, 0.5 * spec.length_x, spec.target_edge, xs_span);
  const AxisLines ys = axis_lines(-0.5 * spec.width_y, 0.5 * spec.width_y, spec.target_edge, ys_span);
  const int nx = static_cast<int>(xs.pos.size()) - 1;
  const int ny = static_cast<int>(ys.pos.size()) - 1;

  auto grid_id = [&](int ix, int iy) { return iy * (nx + 1) + ix; };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double cx = 0.5 * (xs.pos[ix] + xs.pos[ix + 1]);
      const double cy = 0.5 * (ys.pos[iy] + ys.pos[iy + 1]);
      if (spec.slot) {
        const auto& s = *spec.slot;
        if (std::abs(cx - s.center.x()) < 0.5 * s.len_x &&
            std::abs(cy - s.center.y()) < 0.5 * s.len_y)
          continue;
      }
      const int v00 = grid_id(ix, iy), v10 = grid_id(ix + 1, iy);
      const int v01 = grid_id(ix, iy + 1), v11 = grid_id(ix + 1, iy + 1);
      // Union-jack diagonals: mirror-symmetric mesh about both axes.
      const bool flip = (cx < 0.0) != (cy < 0.0);
      if (!flip) {
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      } else {
        tris.push_back({v00, v10, v01});
        tris.push_back({v10, v11, v01});
      }
    }
  }

  // Compact to referenced vertices, preserving grid order.
  std::vector<int> remap(static_cast<std::size_t>((nx + 1) * (ny + 1)), -1);
  for (const auto& t : tris)
    for (int v : t) remap[v] = 0;
  TriMesh mesh;
  for (int iy = 0; iy <= ny; ++iy) {
    for (int ix = 0; ix <= nx; ++ix) {
      const int id = grid_id(ix, iy);
      if (remap[id] == 0) {
        remap[id] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.emplace_back(xs.pos[ix], ys.pos[iy], 0.0);
      }
    }
  }
  mesh.triangles.reserve(tris.size());
  for (const auto& t : tris) mesh.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  mesh.rebuild_edge_table();

  double expected = spec.length_x * spec.width_y;
  if (spec.slot) expected -= spec.slot->len_x * spec.slot->len_y;
  validate_mesh(mesh, expected);
  return mesh;
}

RwgSet enumerate_rwg(const TriMesh& mesh) {
  RwgSet set;
  for (const auto& [key, tris] : mesh.edge_table) {
    if (tris.size() > 2)
      throw TopologyError("non-manifold edge (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) + ")");
    if (tris.size() != 2) continue;

    RwgEntry e;
    e.edge_id = set.count();
    e.vert_a = key.first;
    e.vert_b = key.second;
    e.plus_triangle = std::min(tris[0], tris[1]);
    e.minus_triangle = std::max(tris[0], tris[1]);
    e.edge_length = (mesh.vertices[e.vert_a] - mesh.vertices[e.vert_b]).norm();
    auto free_vertex = [&](int t) {
      for (int v : mesh.triangles[t])
        if (v != e.vert_a && v != e.vert_b) return v;
      throw TopologyError("triangle does not contain its edge endpoints");
    };
    e.plus_free_vertex = free_vertex(e.plus_triangle);
    e.minus_free_vertex = free_vertex(e.minus_triangle);
    set.entries.push_back(e);
  }
  return set;
}

void write_mesh_text(const TriMesh& mesh, std::ostream& os) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    os << buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof(buf), "t %d %d %d\n", t[0], t[1], t[2]);
    os << buf;
  }
}

TriMesh read_mesh_text(std::istream& is) {
  TriMesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    char tag;
    ss >> tag;
    if (tag == 'v') {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw GeometryError("mesh text: bad vertex at line " + std::to_string(lineno));
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == 't') {
      int i, j, k;
      if (!(ss >> i >> j >> k))
        throw GeometryError("mesh text: bad triangle at line " + std::to_string(lineno));
      const int n = static_cast<int>(mesh.vertices.size());
      if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n)
        throw GeometryError("mesh text: vertex index out of range at line " +
                            std::to_string(lineno));
      mesh.triangles.push_back({i, j, k});
    } else {
      throw GeometryError("mesh text: unknown record at line " + std::to_string(lineno));
    }
  }
  mesh.rebuild_edge_table();
  validate_mesh(mesh, 0.0);
  return mesh;
}

}  // namespace slotcma
