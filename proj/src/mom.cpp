#include "slotcma/mom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

#include "slotcma/constants.hpp"
#include "slotcma/errors.hpp"
#include "slotcma/parallel.hpp"
#include "slotcma/quadrature.hpp"
#include "slotcma/triangle_integrals.hpp"

namespace slotcma {

namespace {

using cplx = std::complex<double>;
using Eigen::Vector3cd;
using Eigen::Vector3d;

constexpr double inv4pi = 1.0 / (4.0 * constants::pi);

// exp(-jkR)/(4 pi R) minus the 1/(4 pi R) static part; smooth through R = 0.
inline cplx green_smooth(double r, double k) {
  if (r == 0.0) return {0.0, -k * inv4pi};
  const double sh = std::sin(0.5 * k * r);
  return {-2.0 * sh * sh * inv4pi / r, -std::sin(k * r) * inv4pi / r};
}

struct TriGeom {
  Vector3d v[3];
  Eigen::Vector2d v2[3];
  Vector3d centroid;
  double area = 0.0;
  double reach = 0.0;  // max vertex distance from the centroid
  MappedRule quad;
};

// Double-quadrature moments of a kernel over a triangle pair:
//   s  = int int g
//   vr = int int r g      (test-point moment)
//   vs = int int r' g     (source-point moment)
//   t  = int int (r.r') g
struct PairMoments {
  cplx s{0.0, 0.0};
  Vector3cd vr = Vector3cd::Zero();
  Vector3cd vs = Vector3cd::Zero();
  cplx t{0.0, 0.0};
};

struct RealMoments {
  double s = 0.0;
  Vector3d vr = Vector3d::Zero();
  Vector3d vs = Vector3d::Zero();
  double t = 0.0;
};

template <bool Smooth>
PairMoments kernel_moments(const TriGeom& tp, const TriGeom& tq, double k) {
  PairMoments m;
  const auto np = tp.quad.p.size();
  const auto nq = tq.quad.p.size();
  for (std::size_t i = 0; i < np; ++i) {
    const Vector3d& ri = tp.quad.p[i];
    const double wi = tp.quad.w[i];
    cplx in0{0.0, 0.0};
    Vector3cd in1 = Vector3cd::Zero();
    for (std::size_t j = 0; j < nq; ++j) {
      const Vector3d& rj = tq.quad.p[j];
      const double r = (ri - rj).norm();
      cplx g;
      if constexpr (Smooth) {
        g = green_smooth(r, k);
      } else {
        const double kr = k * r;
        const double inv = inv4pi / r;
        g = {std::cos(kr) * inv, -std::sin(kr) * inv};
      }
      g *= tq.quad.w[j];
      in0 += g;
      in1 += g * rj;
    }
    m.s += wi * in0;
    m.vr += (wi * in0) * ri;
    m.vs += wi * in1;
    m.t += wi * (ri.x() * in1.x() + ri.y() * in1.y() + ri.z() * in1.z());
  }
  return m;
}

// Numeric test integration of the analytically integrated 1/(4 pi R) source
// potential.
RealMoments static_moments_one_sided(const TriGeom& test, const TriGeom& src) {
  RealMoments m;
  for (std::size_t i = 0; i < test.quad.p.size(); ++i) {
    const Vector3d& ri = test.quad.p[i];
    const double wi = test.quad.w[i];
    const Eigen::Vector2d obs(ri.x(), ri.y());
    const auto ints = static_triangle_integrals(src.v2[0], src.v2[1], src.v2[2], obs);
    const double a0 = ints.i0 * inv4pi;
    const Vector3d a1 = inv4pi * Vector3d(ints.i1.x() + ri.x() * ints.i0,
                                          ints.i1.y() + ri.y() * ints.i0,
                                          ri.z() * ints.i0);
    m.s += wi * a0;
    m.vr += (wi * a0) * ri;
    m.vs += wi * a1;
    m.t += wi * ri.dot(a1);
  }
  return m;
}

double aspect_ratio(const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  const double lmax = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  const double area2 = (b - a).cross(c - a).norm();
  return lmax * lmax / area2;
}

bool share_vertex(const std::array<int, 3>& a, const std::array<int, 3>& b) {
  for (int i : a)
    for (int j : b)
      if (i == j) return true;
  return false;
}

}  // namespace

std::complex<double> green(const Eigen::Vector3d& r, const Eigen::Vector3d& r_src, double k) {
  const double dist = (r - r_src).norm();
  if (dist == 0.0) throw SingularityError("green: coincident source and observation points");
  const double kr = k * dist;
  const double inv = inv4pi / dist;
  return {std::cos(kr) * inv, -std::sin(kr) * inv};
}

double MomSystem::max_asymmetry() const {
  const double scale = z.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const double dev = (z - z.transpose()).cwiseAbs().maxCoeff();
  return dev / scale;
}

std::string basis_fingerprint(const TriMesh& mesh, const RwgSet& basis) {
  // FNV-1a over structural counts and the area ledger.
  auto mix = [](std::uint64_t h, std::uint64_t x) {
    h ^= x;
    return h * 1099511628211ull;
  };
  std::uint64_t h = 1469598103934665603ull;
  h = mix(h, static_cast<std::uint64_t>(basis.count()));
  h = mix(h, static_cast<std::uint64_t>(mesh.vertices.size()));
  h = mix(h, static_cast<std::uint64_t>(mesh.triangles.size()));
  double area = mesh.total_area();
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(area));
  std::memcpy(&bits, &area, sizeof(bits));
  h = mix(h, bits);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "rwg:M=%d:h=%016llx", basis.count(),
                static_cast<unsigned long long>(h));
  return buf;
}

MomSystem assemble_z(const TriMesh& mesh, const RwgSet& basis, double frequency_hz,
                     const AssemblyOptions& opts) {
  const int n_tri = static_cast<int>(mesh.triangles.size());
  const int m = basis.count();
  if (m == 0) throw ConsistencyError("assemble_z: empty basis");
  for (const auto& e : basis.entries) {
    if (e.plus_triangle < 0 || e.plus_triangle >= n_tri || e.minus_triangle < 0 ||
        e.minus_triangle >= n_tri || e.plus_triangle == e.minus_triangle)
      throw ConsistencyError("assemble_z: basis references triangles outside the mesh");
  }
  if (!(frequency_hz > 0.0)) throw ConsistencyError("assemble_z: frequency must be positive");

  const double omega = 2.0 * constants::pi * frequency_hz;
  const double k = constants::wavenumber(frequency_hz);
  const cplx j_omega_mu(0.0, omega * constants::mu0);
  const cplx inv_j_omega_eps(0.0, -1.0 / (omega * constants::eps0));

  std::vector<TriGeom> geom(n_tri);
  for (int t = 0; t < n_tri; ++t) {
    auto& g = geom[t];
    for (int i = 0; i < 3; ++i) {
      g.v[i] = mesh.vertices[mesh.triangles[t][i]];
      g.v2[i] = Eigen::Vector2d(g.v[i].x(), g.v[i].y());
    }
    g.centroid = (g.v[0] + g.v[1] + g.v[2]) / 3.0;
    g.area = 0.5 * (g.v[1] - g.v[0]).cross(g.v[2] - g.v[0]).norm();
    g.reach = std::max({(g.v[0] - g.centroid).norm(), (g.v[1] - g.centroid).norm(),
                        (g.v[2] - g.centroid).norm()});
    const int rule =
        aspect_ratio(g.v[0], g.v[1], g.v[2]) > opts.thin_aspect ? opts.refined_rule : opts.base_rule;
    g.quad = map_rule(g.v[0], g.v[1], g.v[2], rule);
  }

  struct TriUse {
    int rwg;
    double sign;
    Vector3d free_vertex;
  };
  std::vector<std::vector<TriUse>> tri_use(n_tri);
  for (int e = 0; e < m; ++e) {
    const auto& entry = basis.entries[e];
    tri_use[entry.plus_triangle].push_back({e, +1.0, mesh.vertices[entry.plus_free_vertex]});
    tri_use[entry.minus_triangle].push_back({e, -1.0, mesh.vertices[entry.minus_free_vertex]});
  }

  MomSystem sys;
  sys.frequency = frequency_hz;
  sys.wavenumber = k;
  sys.basis_ref = basis_fingerprint(mesh, basis);
  sys.z = Eigen::MatrixXcd::Zero(m, m);

  parallel_for(m, opts.threads, [&](int row) {
    const auto& er = basis.entries[row];
    const int row_tris[2] = {er.plus_triangle, er.minus_triangle};
    const double row_sign[2] = {+1.0, -1.0};
    const Vector3d row_free[2] = {mesh.vertices[er.plus_free_vertex],
                                  mesh.vertices[er.minus_free_vertex]};
    for (int side = 0; side < 2; ++side) {
      const int p = row_tris[side];
      const TriGeom& gp = geom[p];
      const double cm = row_sign[side] * er.edge_length;
      const Vector3d& a = row_free[side];
      for (int q = 0; q < n_tri; ++q) {
        if (tri_use[q].empty()) continue;
        const TriGeom& gq = geom[q];
        const bool near = p == q || share_vertex(mesh.triangles[p], mesh.triangles[q]) ||
                          (gp.centroid - gq.centroid).norm() <=
                              opts.near_factor * (gp.reach + gq.reach);
        PairMoments mom;
        if (near) {
          mom = kernel_moments<true>(gp, gq, k);
          const RealMoments s1 = static_moments_one_sided(gp, gq);
          const RealMoments s2 = (p == q) ? s1 : static_moments_one_sided(gq, gp);
          mom.s += 0.5 * (s1.s + s2.s);
          mom.vr += (0.5 * (s1.vr + s2.vs)).cast<cplx>();
          mom.vs += (0.5 * (s1.vs + s2.vr)).cast<cplx>();
          mom.t += 0.5 * (s1.t + s2.t);
        } else {
          mom = kernel_moments<false>(gp, gq, k);
        }
        for (const TriUse& use : tri_use[q]) {
          const double cn = use.sign * basis.entries[use.rwg].edge_length;
          const Vector3d& b = use.free_vertex;
          const cplx dot_ab =
              mom.t - (b.x() * mom.vr.x() + b.y() * mom.vr.y() + b.z() * mom.vr.z()) -
              (a.x() * mom.vs.x() + a.y() * mom.vs.y() + a.z() * mom.vs.z()) + a.dot(b) * mom.s;
          const double geom_fac = cm * cn / (gp.area * gq.area);
          sys.z(row, use.rwg) +=
              j_omega_mu * (0.25 * geom_fac) * dot_ab + inv_j_omega_eps * geom_fac * mom.s;
        }
      }
    }
  });

  // Contract checks: Galerkin reciprocity and radiating diagonal.
  const double asym = sys.max_asymmetry();
  if (asym > 1e-10)
    throw ConsistencyError("assembled matrix asymmetry " + std::to_string(asym) +
                           " exceeds 1e-10");
  for (int i = 0; i < m; ++i) {
    if (!(sys.z(i, i).real() > 0.0))
      throw ConsistencyError("non-positive diagonal resistance at entry " + std::to_string(i));
  }
  return sys;
}

Excitation excite_delta_gap(const RwgSet& basis, int feed_edge, double volts) {
  if (feed_edge < 0 || feed_edge >= basis.count())
    throw LookupError("excite_delta_gap: unknown edge id " + std::to_string(feed_edge));
  Excitation exc;
  exc.kind = ExcitationKind::DeltaGap;
  exc.feed_edge = feed_edge;
  exc.volts = volts;
  exc.v = Eigen::VectorXcd::Zero(basis.count());
  exc.v(feed_edge) = volts * basis.entries[feed_edge].edge_length;
  return exc;
}

Eigen::VectorXcd solve_direct(const MomSystem& sys, const Excitation& exc) {
  if (exc.v.size() != sys.z.rows())
    throw ConsistencyError("solve_direct: excitation/basis dimension mismatch");
  const double vnorm = exc.v.norm();
  if (vnorm == 0.0) return Eigen::VectorXcd::Zero(sys.z.rows());

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.z);
  const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = diag.minCoeff() / diag.maxCoeff();
  if (pivot_ratio < 1e-14)
    throw SolverError("solve_direct: matrix numerically singular (pivot ratio " +
                      std::to_string(pivot_ratio) + ")");

  Eigen::VectorXcd x = lu.solve(exc.v);
  x += lu.solve(exc.v - sys.z * x);  // one refinement pass
  const double resid = (sys.z * x - exc.v).norm() / vnorm;
  if (resid > 1e-10)
    throw SolverError("solve_direct: residual " + std::to_string(resid) + " exceeds 1e-10");
  return x;
}

void dump_matrix(const MomSystem& sys, std::ostream& os) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "# frequency_hz %.17g\n", sys.frequency);
  os << buf;
  for (int i = 0; i < sys.z.rows(); ++i) {
    for (int j = 0; j < sys.z.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g\n", i, j, sys.z(i, j).real(),
                    sys.z(i, j).imag());
      os << buf;
    }
  }
}

}  // namespace slotcma
