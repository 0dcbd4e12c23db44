#pragma once

#include <Eigen/Dense>
#include <vector>

namespace slotcma {

// Symmetric quadrature rule on the unit triangle, barycentric form.
// Weights sum to 1: integral ~ area * sum_i w_i f(p_i).
struct TriQuadPoint {
  double l1, l2, l3;
  double w;
};

// Supported sizes: 1, 3, 7 (degree 5), 13 (degree 7).
const std::vector<TriQuadPoint>& triangle_rule(int points);

// Rule mapped onto a physical triangle: points and weights (weight includes
// the triangle area).
struct MappedRule {
  std::vector<Eigen::Vector3d> p;
  std::vector<double> w;
};

MappedRule map_rule(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                    const Eigen::Vector3d& v2, int points);

}  // namespace slotcma
