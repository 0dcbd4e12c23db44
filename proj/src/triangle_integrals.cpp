#include "slotcma/triangle_integrals.hpp"

#include <algorithm>
#include <cmath>

namespace slotcma {

StaticTriangleIntegrals static_triangle_integrals(const Eigen::Vector2d& v0,
                                                  const Eigen::Vector2d& v1,
                                                  const Eigen::Vector2d& v2,
                                                  const Eigen::Vector2d& obs) {
  const Eigen::Vector2d verts[3] = {v0, v1, v2};
  const double ccw = (v1 - v0).x() * (v2 - v0).y() - (v1 - v0).y() * (v2 - v0).x();
  const double orient = ccw >= 0.0 ? 1.0 : -1.0;
  const double scale = std::max({(v1 - v0).norm(), (v2 - v1).norm(), (v0 - v2).norm()});

  StaticTriangleIntegrals out;
  for (int e = 0; e < 3; ++e) {
    const Eigen::Vector2d& a = verts[e];
    const Eigen::Vector2d& b = verts[(e + 1) % 3];
    const Eigen::Vector2d edge = b - a;
    const double len = edge.norm();
    if (len <= 0.0) continue;
    const Eigen::Vector2d s_hat = edge / len;
    // In-plane outward normal for a CCW triangle; flip with orientation.
    const Eigen::Vector2d m_hat = orient * Eigen::Vector2d(s_hat.y(), -s_hat.x());

    const double p0 = m_hat.dot(a - obs);  // signed distance to the edge line
    const double l_lo = s_hat.dot(a - obs);
    const double l_hi = s_hat.dot(b - obs);
    const double r_lo = (a - obs).norm();
    const double r_hi = (b - obs).norm();

    // ln((r_hi + l_hi)/(r_lo + l_lo)), written to avoid cancellation when
    // both parameters are negative: (r + l)(r - l) = p0^2. With the
    // observation point on the edge line both the i0 coefficient p0 and the
    // i1 coefficient p0^2 vanish, so the (divergent) log is skipped.
    double log_term = 0.0;
    const bool on_line = std::abs(p0) < 1e-14 * scale;
    if (!on_line) {
      if (l_lo + l_hi >= 0.0)
        log_term = std::log((r_hi + l_hi) / (r_lo + l_lo));
      else
        log_term = std::log((r_lo - l_lo) / (r_hi - l_hi));
    }

    out.i0 += p0 * log_term;
    out.i1 += m_hat * 0.5 * (l_hi * r_hi - l_lo * r_lo + p0 * p0 * log_term);
  }
  return out;
}

}  // namespace slotcma
