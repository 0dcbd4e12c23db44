#pragma once

#include <Eigen/Dense>

namespace slotcma {

// Static-kernel potential integrals over a flat triangle for an observation
// point in the same plane (the plate is planar, so every assembly pair is):
//
//   i0 = integral over T of 1/R dS'
//   i1 = integral over T of (r' - obs)/R dS'   (in-plane 2-vector)
//
// Closed forms via per-edge line contributions; valid for observation points
// inside, outside, or on the triangle boundary.
struct StaticTriangleIntegrals {
  double i0 = 0.0;
  Eigen::Vector2d i1{0.0, 0.0};
};

StaticTriangleIntegrals static_triangle_integrals(const Eigen::Vector2d& v0,
                                                  const Eigen::Vector2d& v1,
                                                  const Eigen::Vector2d& v2,
                                                  const Eigen::Vector2d& obs);

}  // namespace slotcma
