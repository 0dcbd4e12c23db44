#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "slotcma/cma.hpp"
#include "slotcma/constants.hpp"
#include "slotcma/errors.hpp"
#include "slotcma/mesh.hpp"
#include "slotcma/mom.hpp"
#include "slotcma/planner.hpp"

using namespace slotcma;
namespace cst = slotcma::constants;
using cplx = std::complex<double>;

namespace {

PlateSpec paper_plate(double target_edge) { return {0.050, 0.040, std::nullopt, target_edge}; }

MomSystem diag_system(const std::vector<cplx>& diag) {
  MomSystem sys;
  const int n = static_cast<int>(diag.size());
  sys.z = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) sys.z(i, i) = diag[i];
  sys.frequency = 2.4e9;
  sys.basis_ref = "synthetic";
  return sys;
}

// ModeSet with hand-chosen eigenvectors over a synthetic identity-R system.
ModeSet synthetic_modes(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& lambdas) {
  ModeSet m;
  m.frequency = 2.4e9;
  m.basis_count = static_cast<int>(vectors.rows());
  m.eigenvalues = lambdas;
  m.eigenvectors = vectors;
  m.r_eigenvectors = vectors;  // R = identity
  m.significance.resize(lambdas.size());
  for (int i = 0; i < lambdas.size(); ++i) m.significance(i) = modal_significance(lambdas(i));
  m.residuals = Eigen::VectorXd::Zero(lambdas.size());
  m.source_index.resize(lambdas.size());
  return m;
}

SurfaceCurrent uniform_current(const TriMesh& mesh, const Eigen::Vector2d& direction) {
  SurfaceCurrent cur;
  cur.mesh_triangle_count = static_cast<int>(mesh.triangles.size());
  cur.j.assign(mesh.triangles.size(),
               Eigen::Vector3cd(cplx(direction.x(), 0.0), cplx(direction.y(), 0.0), 0.0));
  return cur;
}

}  // namespace

TEST_CASE("select_feed: single-RWG mesh picks edge zero") {
  TriMesh mesh;
  mesh.vertices = {{0, 0, 0}, {0.01, 0, 0}, {0.01, 0.01, 0}, {0, 0.01, 0}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  mesh.rebuild_edge_table();
  const RwgSet basis = enumerate_rwg(mesh);
  Eigen::MatrixXd v(1, 1);
  v << 1.0;
  Eigen::VectorXd lam(1);
  lam << 0.5;
  const ModeSet modes = synthetic_modes(v, lam);
  CHECK(select_feed(modes, 0, mesh, basis) == 0);
}

TEST_CASE("select_feed: dominant entry wins; invariant to sign and scale") {
  const TriMesh mesh = build_plate(paper_plate(0.01));
  const RwgSet basis = enumerate_rwg(mesh);
  const int m = basis.count();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m, 1);
  for (int i = 0; i < m; ++i) v(i, 0) = 0.1 * std::sin(0.7 * i);
  v(17, 0) = 2.0;
  Eigen::VectorXd lam(1);
  lam << -0.3;
  CHECK(select_feed(synthetic_modes(v, lam), 0, mesh, basis) == 17);
  CHECK(select_feed(synthetic_modes(-v, lam), 0, mesh, basis) == 17);
  CHECK(select_feed(synthetic_modes(5.0 * v, lam), 0, mesh, basis) == 17);
  CHECK_THROWS_AS(select_feed(synthetic_modes(v, lam), 1, mesh, basis), ConsistencyError);
}

TEST_CASE("select_feed ties break toward the lowest edge id") {
  const TriMesh mesh = build_plate(paper_plate(0.01));
  const RwgSet basis = enumerate_rwg(mesh);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(basis.count(), 1);
  v(4, 0) = 1.0;
  v(9, 0) = -1.0;  // same magnitude
  Eigen::VectorXd lam(1);
  lam << 0.0;
  CHECK(select_feed(synthetic_modes(v, lam), 0, mesh, basis) == 4);
}

TEST_CASE("rank_interferers orders by |alpha| and excludes the desired mode") {
  // R identity; lambdas 0 for simple alpha = projection.
  const MomSystem sys = diag_system({cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0)});
  const ModeSet modes = eig_modes(sys, 3);
  Excitation exc;
  exc.v = Eigen::VectorXcd::Zero(3);
  exc.v(0) = 5.0;
  exc.v(1) = 5.0;  // the desired mode's own projection, ignored
  exc.v(2) = 3.0;
  // modes sorted by MS: all lambda 0 -> tie -> source order preserved
  const auto ranking = rank_interferers(modes, exc, 1, 1);
  REQUIRE(ranking.size() == 1);
  CHECK(ranking[0].mode_index == 0);
  CHECK(ranking[0].alpha_mag == doctest::Approx(5.0));
  CHECK(!ranking[0].negligible);

  const auto two = rank_interferers(modes, exc, 1, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].mode_index == 0);
  CHECK(two[1].mode_index == 2);
  CHECK(two[1].alpha_mag == doctest::Approx(3.0));
}

TEST_CASE("orthogonal excitation yields a negligible-but-present ranking") {
  const MomSystem sys = diag_system({cplx(1.0, 0.0), cplx(1.0, 1.0), cplx(1.0, 2.0)});
  const ModeSet modes = eig_modes(sys, 3);
  Excitation exc;
  exc.v = Eigen::VectorXcd::Zero(3);
  exc.v(0) = 1.0;  // drives only the first sorted mode
  const auto ranking = rank_interferers(modes, exc, 0, 2);
  REQUIRE(ranking.size() == 2);
  for (const auto& r : ranking) {
    CHECK(r.alpha_mag <= 1e-14);
    CHECK(r.negligible);
  }
}

TEST_CASE("ranking order is invariant under excitation voltage scaling") {
  const TriMesh mesh = build_plate(paper_plate(0.008));
  const RwgSet basis = enumerate_rwg(mesh);
  const MomSystem sys = assemble_z(mesh, basis, 2.4e9);
  const ModeSet modes = eig_modes_auto(sys);
  const int feed = select_feed(modes, 0, mesh, basis);
  const auto r1 = rank_interferers(modes, excite_delta_gap(basis, feed, 1.0), 0, 3);
  const auto r2 = rank_interferers(modes, excite_delta_gap(basis, feed, 7.5), 0, 3);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].mode_index == r2[i].mode_index);
    CHECK(r2[i].alpha_mag == doctest::Approx(7.5 * r1[i].alpha_mag).epsilon(1e-10));
  }
}

TEST_CASE("undesired current is the |alpha|-weighted modal sum") {
  const TriMesh mesh = build_plate(paper_plate(0.01));
  const RwgSet basis = enumerate_rwg(mesh);
  const MomSystem sys = assemble_z(mesh, basis, 2.4e9);
  const ModeSet modes = eig_modes(sys, 4);

  std::vector<InterfererRank> ranking = {{1, 2.0, cplx(2.0, 0.0), false},
                                         {2, 0.5, cplx(0.0, 0.5), false}};
  const SurfaceCurrent sum = undesired_current(modes, ranking, mesh, basis);
  const SurfaceCurrent j1 = mode_current(modes, 1, mesh, basis);
  const SurfaceCurrent j2 = mode_current(modes, 2, mesh, basis);
  for (int t = 0; t < sum.mesh_triangle_count; ++t) {
    const Eigen::Vector3cd expect = 2.0 * j1.j[t] + 0.5 * j2.j[t];
    CHECK((sum.j[t] - expect).norm() <= 1e-14 * std::max(1.0, expect.norm()));
  }

  std::vector<InterfererRank> zero = {{1, 0.0, cplx(0.0, 0.0), true}};
  const SurfaceCurrent none = undesired_current(modes, zero, mesh, basis);
  for (const auto& j : none.j) CHECK(j.norm() == 0.0);

  CHECK_THROWS_AS(undesired_current(modes, {}, mesh, basis), ConsistencyError);
}

TEST_CASE("recommend_slot: pure-Y current gives the x-directed slot") {
  const PlateSpec patch = paper_plate(0.005);
  const TriMesh mesh = build_plate(patch);
  const SlotSpec slot = recommend_slot(uniform_current(mesh, {0.0, 1.0}), patch);
  CHECK(slot.len_x == doctest::Approx(0.030));
  CHECK(slot.len_y == doctest::Approx(0.0002));
  CHECK(slot.center.norm() == 0.0);
}

TEST_CASE("recommend_slot: pure-X current gives the y-directed slot") {
  const PlateSpec patch = paper_plate(0.005);
  const TriMesh mesh = build_plate(patch);
  const SlotSpec slot = recommend_slot(uniform_current(mesh, {1.0, 0.0}), patch);
  CHECK(slot.len_x == doctest::Approx(0.0002));
  CHECK(slot.len_y == doctest::Approx(0.030));
}

TEST_CASE("recommend_slot: rotating the current by 90 degrees flips the slot") {
  const PlateSpec patch = paper_plate(0.005);
  const TriMesh mesh = build_plate(patch);
  const Eigen::Vector2d dir(std::cos(0.3), std::sin(0.3));
  const Eigen::Vector2d rot(-dir.y(), dir.x());
  const SlotSpec a = recommend_slot(uniform_current(mesh, dir), patch);
  const SlotSpec b = recommend_slot(uniform_current(mesh, rot), patch);
  CHECK(a.len_x == doctest::Approx(b.len_y));
  CHECK(a.len_y == doctest::Approx(b.len_x));
}

TEST_CASE("recommend_slot: 45-degree tie snaps toward x (y-directed slot)") {
  const PlateSpec patch = paper_plate(0.005);
  const TriMesh mesh = build_plate(patch);
  const SlotSpec slot = recommend_slot(uniform_current(mesh, {1.0, 1.0}), patch);
  CHECK(slot.len_y == doctest::Approx(0.030));
  CHECK(slot.len_x == doctest::Approx(0.0002));
}

TEST_CASE("recommend_slot rejects a zero current") {
  const PlateSpec patch = paper_plate(0.005);
  const TriMesh mesh = build_plate(patch);
  CHECK_THROWS_AS(recommend_slot(uniform_current(mesh, {0.0, 0.0}), patch), PlanningError);
}

TEST_CASE("polarization angle tracks the principal axis") {
  const PlateSpec patch = paper_plate(0.005);
  const TriMesh mesh = build_plate(patch);
  for (double ang : {0.0, 0.4, 1.2, -0.9}) {
    const Eigen::Vector2d dir(std::cos(ang), std::sin(ang));
    const double got = polarization_angle(uniform_current(mesh, dir), mesh);
    double expect = ang;
    if (expect >= 0.5 * cst::pi) expect -= cst::pi;
    if (expect < -0.5 * cst::pi) expect += cst::pi;
    CHECK(got == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("make_plan on the reference plate recommends an axis-aligned slot") {
  const PlateSpec patch = paper_plate(0.005);
  const TriMesh mesh = build_plate(patch);
  const RwgSet basis = enumerate_rwg(mesh);
  const MomSystem sys = assemble_z(mesh, basis, 2.4e9);
  const ModeSet modes = eig_modes_auto(sys);
  PlanInput input;
  input.desired_mode = 0;
  input.interferer_count = 1;
  const PlanOutput plan = make_plan(modes, mesh, basis, input);
  CHECK(plan.feed_edge >= 0);
  REQUIRE(plan.ranking.size() == 1);
  const bool x_slot = plan.slot.len_x == doctest::Approx(0.030).epsilon(1e-12);
  const bool y_slot = plan.slot.len_y == doctest::Approx(0.030).epsilon(1e-12);
  CHECK((x_slot || y_slot));
  // The slot's long axis must be orthogonal to the snapped polarization.
  const bool x_pol = std::abs(std::cos(plan.polarization_angle)) >=
                     std::abs(std::sin(plan.polarization_angle));
  CHECK(x_pol == y_slot);
}

TEST_CASE("evaluate_plan with no slot reports all-zero deltas") {
  EvaluateSettings settings;
  settings.frequency = 2.4e9;
  settings.target_edge = 0.008;
  settings.feed_position = Eigen::Vector2d(0.0, 0.015);
  settings.tissue_nx = 12;
  settings.tissue_nz = 9;
  settings.line_samples = 11;
  const PlanComparison cmp =
      evaluate_plan(paper_plate(0.008), std::nullopt, 2.4e9, settings);
  CHECK(cmp.delta_ms_target == 0.0);
  CHECK(cmp.delta_db_desired_x == 0.0);
  CHECK(cmp.delta_db_desired_y == 0.0);
  CHECK(cmp.delta_db_target_x == 0.0);
  CHECK(cmp.delta_db_target_y == 0.0);
  CHECK(cmp.sar_peak_ratio == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("evaluate_plan: the planned x-slot suppresses the targeted mode") {
  EvaluateSettings settings;
  settings.frequency = 2.4e9;
  settings.target_edge = 0.005;
  settings.feed_position = Eigen::Vector2d(0.0, 0.015);
  settings.desired_mode = 0;
  settings.target_mode = 1;
  settings.tissue_nx = 12;
  settings.tissue_nz = 9;
  settings.line_samples = 11;
  const SlotSpec xslot{Eigen::Vector2d(0.0, 0.0), 0.030, 0.0002};
  const PlanComparison cmp = evaluate_plan(paper_plate(0.005), xslot, 2.4e9, settings);
  CHECK(cmp.delta_ms_target < 0.0);
}
