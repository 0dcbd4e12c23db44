#include "slotcma/quadrature.hpp"

#include <stdexcept>

namespace slotcma {

namespace {

std::vector<TriQuadPoint> make_rule(int points) {
  std::vector<TriQuadPoint> r;
  auto push3 = [&](double a, double b, double w) {
    // orbit of (a, b, 1-a-b) under the 3 cyclic permutations
    double c = 1.0 - a - b;
    r.push_back({a, b, c, w});
    r.push_back({c, a, b, w});
    r.push_back({b, c, a, w});
  };
  auto push6 = [&](double a, double b, double w) {
    double c = 1.0 - a - b;
    r.push_back({a, b, c, w});
    r.push_back({c, a, b, w});
    r.push_back({b, c, a, w});
    r.push_back({b, a, c, w});
    r.push_back({c, b, a, w});
    r.push_back({a, c, b, w});
  };
  switch (points) {
    case 1:
      r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0});
      break;
    case 3:
      push3(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 7:  // degree 5 (Strang-Fix / Stroud T2:5-1)
      r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225});
      push3(0.059715871789770, 0.470142064105115, 0.132394152788506);
      push3(0.797426985353087, 0.101286507323456, 0.125939180544827);
      break;
    case 13:  // degree 7 (Strang-Fix formula #10)
      r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -0.149570044467670});
      push3(0.479308067841923, 0.260345966079038, 0.175615257433204);
      push3(0.869739794195568, 0.065130102902216, 0.053347235608839);
      push6(0.638444188569809, 0.312865496004875, 0.077113760890257);
      break;
    default:
      throw std::invalid_argument("unsupported triangle rule size");
  }
  return r;
}

}  // namespace

const std::vector<TriQuadPoint>& triangle_rule(int points) {
  static const std::vector<TriQuadPoint> r1 = make_rule(1);
  static const std::vector<TriQuadPoint> r3 = make_rule(3);
  static const std::vector<TriQuadPoint> r7 = make_rule(7);
  static const std::vector<TriQuadPoint> r13 = make_rule(13);
  switch (points) {
    case 1: return r1;
    case 3: return r3;
    case 7: return r7;
    case 13: return r13;
    default: throw std::invalid_argument("unsupported triangle rule size");
  }
}

MappedRule map_rule(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                    const Eigen::Vector3d& v2, int points) {
  const auto& rule = triangle_rule(points);
  const double area = 0.5 * (v1 - v0).cross(v2 - v0).norm();
  MappedRule m;
  m.p.reserve(rule.size());
  m.w.reserve(rule.size());
  for (const auto& q : rule) {
    m.p.push_back(q.l1 * v0 + q.l2 * v1 + q.l3 * v2);
    m.w.push_back(q.w * area);
  }
  return m;
}

}  // namespace slotcma
