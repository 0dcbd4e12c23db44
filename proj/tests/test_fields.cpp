#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "slotcma/cma.hpp"
#include "slotcma/constants.hpp"
#include "slotcma/errors.hpp"
#include "slotcma/fields.hpp"
#include "slotcma/mesh.hpp"
#include "slotcma/mom.hpp"

using namespace slotcma;
namespace cst = slotcma::constants;
using cplx = std::complex<double>;

namespace {

PlateSpec paper_plate(double target_edge) { return {0.050, 0.040, std::nullopt, target_edge}; }

// Textbook spherical-component fields of a z-directed current element,
// independent of the Cartesian construction under test.
struct SphericalDipole {
  cplx e_r, e_theta;
};

SphericalDipole balanis_dipole(double current_moment, double r, double theta, double k) {
  const cplx j(0.0, 1.0);
  const double eta = cst::eta0;
  const cplx phase = std::exp(-j * k * r);
  SphericalDipole out;
  out.e_r = eta * current_moment * std::cos(theta) / (2.0 * cst::pi * r * r) *
            (1.0 + 1.0 / (j * k * r)) * phase;
  out.e_theta = j * eta * k * current_moment * std::sin(theta) / (4.0 * cst::pi * r) *
                (1.0 + 1.0 / (j * k * r) - 1.0 / (k * k * r * r)) * phase;
  return out;
}

}  // namespace

TEST_CASE("dipole field matches the spherical-component forms at any range") {
  const double k = 2.0 * cst::pi / 0.125;  // 2.4 GHz
  const Eigen::Vector3cd moment(0.0, 0.0, cplx(1e-3, 0.0));
  for (double kr : {0.05, 0.5, 3.0, 40.0}) {
    const double r = kr / k;
    for (double theta : {0.3, 1.0, 1.5}) {
      const Eigen::Vector3d obs(r * std::sin(theta), 0.0, r * std::cos(theta));
      const Eigen::Vector3cd e = hertzian_dipole_field(moment, obs, k);
      const SphericalDipole ref = balanis_dipole(1e-3, r, theta, k);
      const Eigen::Vector3d rhat = obs.normalized();
      const Eigen::Vector3d that(std::cos(theta), 0.0, -std::sin(theta));
      const cplx e_r = rhat.x() * e.x() + rhat.y() * e.y() + rhat.z() * e.z();
      const cplx e_t = that.x() * e.x() + that.y() * e.y() + that.z() * e.z();
      CHECK(std::abs(e_r - ref.e_r) <= 1e-10 * std::abs(ref.e_r));
      CHECK(std::abs(e_t - ref.e_theta) <= 1e-10 * std::abs(ref.e_theta));
    }
  }
}

TEST_CASE("far-zone broadside magnitude matches eta k I dl / (4 pi R)") {
  const double k = 2.0 * cst::pi / 0.125;
  const double r = 100.0 / k;  // kR = 100
  const double idl = 2.5e-4;
  const Eigen::Vector3cd moment(0.0, 0.0, cplx(idl, 0.0));
  const Eigen::Vector3cd e = hertzian_dipole_field(moment, {r, 0.0, 0.0}, k);
  const double expected = cst::eta0 * k * idl / (4.0 * cst::pi * r);
  CHECK(e.norm() == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("far-zone 1/R decay: doubling the range halves the field within 1%") {
  const double k = 2.0 * cst::pi / 0.125;
  const double r = 100.0 / k;
  const Eigen::Vector3cd moment(0.0, 0.0, cplx(1e-3, 0.0));
  const double e1 = hertzian_dipole_field(moment, {r, 0.0, 0.0}, k).norm();
  const double e2 = hertzian_dipole_field(moment, {2.0 * r, 0.0, 0.0}, k).norm();
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("far-zone transversality of the superposed plate field") {
  const TriMesh mesh = build_plate(paper_plate(0.005));
  const RwgSet basis = enumerate_rwg(mesh);
  SurfaceCurrent cur;
  cur.mesh_triangle_count = static_cast<int>(mesh.triangles.size());
  cur.j.assign(mesh.triangles.size(), Eigen::Vector3cd(cplx(1.0, 0.0), cplx(0.0, 0.0), 0.0));
  const double f = 2.4e9;
  ObservationSet obs;
  obs.points = {{3.0, 1.0, 2.0}, {-2.5, 2.0, 1.5}, {0.5, 4.0, 0.3}};
  const FieldResult res = near_field(cur, mesh, obs, f);
  for (std::size_t i = 0; i < obs.points.size(); ++i) {
    const Eigen::Vector3d rhat = obs.points[i].normalized();
    const cplx radial = rhat.x() * res.e[i].x() + rhat.y() * res.e[i].y() + rhat.z() * res.e[i].z();
    CHECK(std::abs(radial) / res.e[i].norm() <= 0.01);
  }
}

TEST_CASE("superposition of currents equals the sum of their fields") {
  const TriMesh mesh = build_plate(paper_plate(0.01));
  SurfaceCurrent a, b, ab;
  const int n = static_cast<int>(mesh.triangles.size());
  a.mesh_triangle_count = b.mesh_triangle_count = ab.mesh_triangle_count = n;
  a.j.resize(n);
  b.j.resize(n);
  ab.j.resize(n);
  for (int t = 0; t < n; ++t) {
    a.j[t] = Eigen::Vector3cd(cplx(0.3 + 0.01 * t, -0.2), cplx(0.1, 0.05 * t), 0.0);
    b.j[t] = Eigen::Vector3cd(cplx(-0.6, 0.4), cplx(0.2 * t, -0.1), 0.0);
    ab.j[t] = a.j[t] + b.j[t];
  }
  ObservationSet obs;
  obs.points = {{0.01, 0.05, 0.01}, {0.0, 0.0, 0.005}, {-0.04, 0.01, 0.02}};
  const double f = 2.4e9;
  const FieldResult fa = near_field(a, mesh, obs, f);
  const FieldResult fb = near_field(b, mesh, obs, f);
  const FieldResult fab = near_field(ab, mesh, obs, f);
  for (std::size_t i = 0; i < obs.points.size(); ++i)
    CHECK((fab.e[i] - fa.e[i] - fb.e[i]).norm() <= 1e-12 * fab.e[i].norm());
}

TEST_CASE("symmetric mode current radiates a symmetric line magnitude") {
  const TriMesh mesh = build_plate(paper_plate(0.0025));
  const RwgSet basis = enumerate_rwg(mesh);
  const MomSystem sys = assemble_z(mesh, basis, 2.4e9);
  const ModeSet modes = eig_modes_auto(sys);
  const SurfaceCurrent cur = mode_current(modes, 0, mesh, basis, CurrentNormalization::MaxAmplitude);
  const PlateSpec spec = paper_plate(0.0025);
  const ObservationSet line = observation_line(spec, 'x', 0.005, 0.005, spec.length_x, 41);
  const FieldResult res = near_field(cur, mesh, line, 2.4e9);
  const int n = static_cast<int>(res.e.size());
  for (int i = 0; i < n / 2; ++i) {
    const double lhs = res.magnitude(i);
    const double rhs = res.magnitude(n - 1 - i);
    CHECK(std::abs(lhs - rhs) / std::max(lhs, rhs) <= 0.01);
  }
}

TEST_CASE("dB of a doubled field is +6.0206 dB") {
  FieldResult f;
  f.points = {{0, 0, 1}, {0, 0, 1}};
  f.e = {Eigen::Vector3cd(cplx(0.3, 0.4), cplx(0.0, 0.0), 0.0),
         Eigen::Vector3cd(cplx(0.6, 0.8), cplx(0.0, 0.0), 0.0)};
  CHECK(f.magnitude_db(1) - f.magnitude_db(0) ==
        doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
}

TEST_CASE("observation line geometry: constant transverse coordinates") {
  const PlateSpec spec = paper_plate(0.005);
  const ObservationSet set = observation_line(spec, 'x', 0.005, 0.005, spec.length_x, 51);
  REQUIRE(set.points.size() == 51);
  CHECK(set.kind == ObservationKind::LineX);
  for (const auto& p : set.points) {
    CHECK(p.y() == doctest::Approx(0.025).epsilon(1e-15));  // W/2 + 5 mm
    CHECK(p.z() == doctest::Approx(0.005).epsilon(1e-15));
  }
  CHECK(set.points.front().x() == doctest::Approx(-0.025));
  CHECK(set.points.back().x() == doctest::Approx(0.025));

  const ObservationSet two = observation_line(spec, 'y', 0.003, 0.005, spec.width_y, 2);
  REQUIRE(two.points.size() == 2);
  CHECK(two.points[0].y() == doctest::Approx(-0.020));
  CHECK(two.points[1].y() == doctest::Approx(0.020));

  const ObservationSet fwd = observation_line(spec, 'x', 0.005, 0.005, spec.length_x, 5);
  const ObservationSet rev = observation_line(spec, 'x', 0.005, 0.005, -spec.length_x, 5);
  for (int i = 0; i < 5; ++i) CHECK((fwd.points[i] - rev.points[4 - i]).norm() <= 1e-18);

  CHECK_THROWS_AS(observation_line(spec, 'x', 0.005, 0.005, 0.05, 1), ConsistencyError);
  CHECK_THROWS_AS(observation_line(spec, 'q', 0.005, 0.005, 0.05, 5), ConsistencyError);
}

TEST_CASE("observation plane covers the plate footprint") {
  const PlateSpec spec = paper_plate(0.005);
  const ObservationSet corners = observation_plane(spec, 0.005, 2, 2);
  REQUIRE(corners.points.size() == 4);
  CHECK(corners.points[0].x() == doctest::Approx(-0.025));
  CHECK(corners.points[0].y() == doctest::Approx(-0.020));
  CHECK(corners.points[3].x() == doctest::Approx(0.025));
  CHECK(corners.points[3].y() == doctest::Approx(0.020));

  const ObservationSet grid = observation_plane(spec, 0.005, 6, 5);
  const double dx0 = grid.points[1].x() - grid.points[0].x();
  for (int j = 0; j < 5; ++j)
    for (int i = 1; i < 6; ++i)
      CHECK(grid.points[j * 6 + i].x() - grid.points[j * 6 + i - 1].x() ==
            doctest::Approx(dx0).epsilon(1e-12));
  CHECK_THROWS_AS(observation_plane(spec, 0.005, 1, 3), ConsistencyError);
}

TEST_CASE("standoff violations name the offending point") {
  const TriMesh mesh = build_plate(paper_plate(0.01));
  SurfaceCurrent cur;
  cur.mesh_triangle_count = static_cast<int>(mesh.triangles.size());
  cur.j.assign(mesh.triangles.size(), Eigen::Vector3cd(cplx(1.0, 0.0), 0.0, 0.0));
  ObservationSet bad;
  bad.points = {{0.0, 0.0, 5e-5}};  // 0.05 mm above the plate center
  CHECK_THROWS_AS(near_field(cur, mesh, bad, 2.4e9), GeometryError);
  // Same height but laterally clear of the plate is allowed.
  ObservationSet ok;
  ok.points = {{0.0, 0.022, 0.0}};
  CHECK_NOTHROW(near_field(cur, mesh, ok, 2.4e9));
}

TEST_CASE("field evaluation is deterministic across thread counts") {
  const TriMesh mesh = build_plate(paper_plate(0.005));
  SurfaceCurrent cur;
  cur.mesh_triangle_count = static_cast<int>(mesh.triangles.size());
  cur.j.assign(mesh.triangles.size(), Eigen::Vector3cd(cplx(0.5, -0.1), cplx(0.2, 0.3), 0.0));
  const PlateSpec spec = paper_plate(0.005);
  const ObservationSet line = observation_line(spec, 'x', 0.005, 0.005, spec.length_x, 33);
  const FieldResult f1 = near_field(cur, mesh, line, 2.4e9, 1);
  const FieldResult f4 = near_field(cur, mesh, line, 2.4e9, 4);
  for (std::size_t i = 0; i < f1.e.size(); ++i) CHECK((f1.e[i] - f4.e[i]).norm() == 0.0);
}
