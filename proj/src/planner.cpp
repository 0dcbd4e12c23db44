#include "slotcma/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slotcma/constants.hpp"
#include "slotcma/errors.hpp"

namespace slotcma {

int select_feed(const ModeSet& modes, int desired_mode, const TriMesh&, const RwgSet& basis) {
  if (desired_mode < 0 || desired_mode >= modes.retained())
    throw ConsistencyError("select_feed: desired mode out of range");
  if (basis.count() != modes.basis_count)
    throw ConsistencyError("select_feed: basis does not match the mode set");
  const Eigen::VectorXd coeffs = modes.eigenvectors.col(desired_mode).cwiseAbs();
  int best = 0;
  for (int e = 1; e < basis.count(); ++e)
    if (coeffs(e) > coeffs(best)) best = e;
  return best;
}

std::vector<InterfererRank> rank_interferers(const ModeSet& modes, const Excitation& exc,
                                             int desired_mode, int count) {
  if (count < 1) throw ConsistencyError("rank_interferers: need at least one interferer");
  if (count + 1 > modes.retained())
    throw ConsistencyError("rank_interferers: not enough retained modes");
  const ModalWeights w = modal_weights(modes, exc);
  std::vector<InterfererRank> all;
  double peak = 0.0;
  for (int n = 0; n < modes.retained(); ++n) {
    if (n == desired_mode) continue;
    const double mag = std::abs(w.alpha(n));
    peak = std::max(peak, mag);
    all.push_back({n, mag, w.alpha(n), false});
  }
  std::stable_sort(all.begin(), all.end(), [](const InterfererRank& a, const InterfererRank& b) {
    if (a.alpha_mag != b.alpha_mag) return a.alpha_mag > b.alpha_mag;
    return a.mode_index < b.mode_index;
  });
  all.resize(count);
  for (auto& r : all) r.negligible = r.alpha_mag <= 1e-14 * std::max(peak, 1e-300);
  return all;
}

SurfaceCurrent undesired_current(const ModeSet& modes, const std::vector<InterfererRank>& ranking,
                                 const TriMesh& mesh, const RwgSet& basis,
                                 InterfererWeighting weighting) {
  if (ranking.empty()) throw ConsistencyError("undesired_current: empty ranking");
  SurfaceCurrent sum;
  sum.mesh_triangle_count = static_cast<int>(mesh.triangles.size());
  sum.j.assign(mesh.triangles.size(), Eigen::Vector3cd::Zero());
  for (const auto& r : ranking) {
    const SurfaceCurrent jn = mode_current(modes, r.mode_index, mesh, basis);
    // The flowchart weights by |alpha_n|; the complex option keeps modal phase.
    const std::complex<double> wgt =
        weighting == InterfererWeighting::Magnitude ? std::complex<double>(r.alpha_mag) : r.alpha;
    for (std::size_t t = 0; t < sum.j.size(); ++t) sum.j[t] += wgt * jn.j[t];
  }
  return sum;
}

double polarization_angle(const SurfaceCurrent& j, const TriMesh& mesh) {
  if (j.mesh_triangle_count != static_cast<int>(mesh.triangles.size()))
    throw ConsistencyError("polarization_angle: current was built on a different mesh");
  Eigen::Matrix2d corr = Eigen::Matrix2d::Zero();
  for (int t = 0; t < j.mesh_triangle_count; ++t) {
    const double area = mesh.triangle_area(t);
    const auto& v = j.j[t];
    corr(0, 0) += area * std::norm(v.x());
    corr(1, 1) += area * std::norm(v.y());
    const double cross = area * (v.x() * std::conj(v.y())).real();
    corr(0, 1) += cross;
    corr(1, 0) += cross;
  }
  if (!(corr.trace() > 0.0)) throw PlanningError("polarization_angle: zero current, nothing to suppress");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(corr);
  const Eigen::Vector2d axis = es.eigenvectors().col(1);  // largest eigenvalue
  double angle = std::atan2(axis.y(), axis.x());
  if (angle < -0.5 * constants::pi) angle += constants::pi;
  if (angle >= 0.5 * constants::pi) angle -= constants::pi;
  return angle;
}

namespace {

// Snap the polarization to an axis; ties (45 degrees) go to x. An x-polarized
// undesired current calls for a y-directed slot and vice versa.
SlotSpec slot_for_polarization(double angle, double slot_length, double slot_width) {
  SlotSpec slot;
  slot.center = Eigen::Vector2d(0.0, 0.0);  // centre of the patch
  const bool x_polarized = std::abs(std::cos(angle)) >= std::abs(std::sin(angle));
  if (x_polarized) {
    slot.len_x = slot_width;
    slot.len_y = slot_length;
  } else {
    slot.len_x = slot_length;
    slot.len_y = slot_width;
  }
  return slot;
}

}  // namespace

SlotSpec recommend_slot(const SurfaceCurrent& j_und, const PlateSpec& patch, double slot_length,
                        double slot_width) {
  double total = 0.0;
  for (const auto& v : j_und.j) total += v.squaredNorm();
  if (!(total > 0.0)) throw PlanningError("recommend_slot: zero undesired current, nothing to suppress");

  // The current carries triangle values only; re-derive its mesh from the
  // patch spec (build_plate is deterministic) to weight by areas.
  const TriMesh mesh = build_plate(patch);
  if (static_cast<int>(mesh.triangles.size()) != j_und.mesh_triangle_count)
    throw ConsistencyError("recommend_slot: current does not match the patch mesh");
  return slot_for_polarization(polarization_angle(j_und, mesh), slot_length, slot_width);
}

PlanOutput make_plan(const ModeSet& modes, const TriMesh& mesh, const RwgSet& basis,
                     const PlanInput& input) {
  if (input.interferer_count < 1 || input.interferer_count + 1 > modes.retained())
    throw ConsistencyError("make_plan: interferer count incompatible with retained modes");
  PlanOutput out;
  out.feed_edge = select_feed(modes, input.desired_mode, mesh, basis);
  const Excitation exc = excite_delta_gap(basis, out.feed_edge, input.feed_volts);
  out.ranking = rank_interferers(modes, exc, input.desired_mode, input.interferer_count);
  out.undesired = undesired_current(modes, out.ranking, mesh, basis, input.weighting);
  out.polarization_angle = polarization_angle(out.undesired, mesh);
  out.slot = slot_for_polarization(out.polarization_angle, input.slot_length, input.slot_width);
  return out;
}

int nearest_edge(const TriMesh& mesh, const RwgSet& basis, const Eigen::Vector2d& position) {
  if (basis.count() == 0) throw ConsistencyError("nearest_edge: empty basis");
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int e = 0; e < basis.count(); ++e) {
    const auto& entry = basis.entries[e];
    const Eigen::Vector3d mid = 0.5 * (mesh.vertices[entry.vert_a] + mesh.vertices[entry.vert_b]);
    const double d = (Eigen::Vector2d(mid.x(), mid.y()) - position).norm();
    if (d < best_dist) {
      best_dist = d;
      best = e;
    }
  }
  return best;
}

namespace {

double mean_line_db(const FieldResult& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.e.size(); ++i) sum += f.magnitude_db(static_cast<int>(i));
  return sum / static_cast<double>(f.e.size());
}

GeometryMetrics run_geometry(const PlateSpec& spec, double frequency, Eigen::AlignedBox2d tissue_box,
                             const EvaluateSettings& s, const TissueLayer& tissue) {
  GeometryMetrics gm;
  const TriMesh mesh = build_plate(spec);
  const RwgSet basis = enumerate_rwg(mesh);
  gm.basis_count = basis.count();
  AssemblyOptions aopts;
  aopts.threads = s.threads;
  const MomSystem sys = assemble_z(mesh, basis, frequency, aopts);
  const ModeSet modes = eig_modes_auto(sys);
  gm.lambdas.assign(modes.eigenvalues.data(), modes.eigenvalues.data() + modes.retained());
  gm.significances.assign(modes.significance.data(),
                          modes.significance.data() + modes.retained());

  const int n_needed = std::max(s.desired_mode, s.target_mode);
  if (n_needed >= modes.retained())
    throw ConsistencyError("evaluate_plan: requested mode beyond retained set");

  // Modal near-field line levels.
  const PlateSpec ref_extent{spec.length_x, spec.width_y, std::nullopt, spec.target_edge};
  const ObservationSet line_x =
      observation_line(ref_extent, 'x', s.line_offset, s.line_height, spec.length_x, s.line_samples);
  const ObservationSet line_y =
      observation_line(ref_extent, 'y', s.line_offset, s.line_height, spec.width_y, s.line_samples);
  const SurfaceCurrent j_desired = mode_current(modes, s.desired_mode, mesh, basis, s.field_norm);
  const SurfaceCurrent j_target = mode_current(modes, s.target_mode, mesh, basis, s.field_norm);
  gm.desired_mean_db_x = mean_line_db(near_field(j_desired, mesh, line_x, frequency, s.threads));
  gm.desired_mean_db_y = mean_line_db(near_field(j_desired, mesh, line_y, frequency, s.threads));
  gm.target_mean_db_x = mean_line_db(near_field(j_target, mesh, line_x, frequency, s.threads));
  gm.target_mean_db_y = mean_line_db(near_field(j_target, mesh, line_y, frequency, s.threads));

  // Driven solve and SAR on the shared tissue plane.
  gm.feed_edge = nearest_edge(mesh, basis, s.feed_position);
  const Excitation exc = excite_delta_gap(basis, gm.feed_edge, s.feed_volts);
  const Eigen::VectorXcd coeffs = solve_direct(sys, exc);
  gm.accepted_power = (coeffs.adjoint() * exc.v)(0).real();
  const SurfaceCurrent driven = current_on_centroids(mesh, basis, coeffs);
  const ObservationSet plane =
      tissue_plane(tissue_box, s.tissue_separation, 0.085, 0.060, s.tissue_nx, s.tissue_nz);
  const FieldResult fields = near_field(driven, mesh, plane, frequency, s.threads);
  gm.sar_peak = sar_from_field(fields, tissue).peak;
  return gm;
}

}  // namespace

PlanComparison evaluate_plan(const PlateSpec& reference, const std::optional<SlotSpec>& planned,
                             double frequency_hz, const EvaluateSettings& settings) {
  PlateSpec ref = reference;
  if (!(ref.target_edge > 0.0))
    ref.target_edge = settings.target_edge > 0.0
                          ? settings.target_edge
                          : constants::wavelength(frequency_hz) / 10.0;
  PlateSpec var = ref;
  var.slot = planned;

  const TissueLayer tissue =
      settings.tissue.name.empty() ? tissue_preset("skin") : settings.tissue;

  // Both geometries share one tissue plane anchored at the reference extent.
  const Eigen::AlignedBox2d box(Eigen::Vector2d(-0.5 * ref.length_x, -0.5 * ref.width_y),
                                Eigen::Vector2d(0.5 * ref.length_x, 0.5 * ref.width_y));

  PlanComparison cmp;
  cmp.frequency = frequency_hz;
  cmp.power_norm = settings.power_norm;
  cmp.reference = run_geometry(ref, frequency_hz, box, settings, tissue);
  cmp.variant = run_geometry(var, frequency_hz, box, settings, tissue);

  cmp.delta_ms_target = cmp.variant.significances[settings.target_mode] -
                        cmp.reference.significances[settings.target_mode];
  cmp.delta_db_desired_x = cmp.variant.desired_mean_db_x - cmp.reference.desired_mean_db_x;
  cmp.delta_db_desired_y = cmp.variant.desired_mean_db_y - cmp.reference.desired_mean_db_y;
  cmp.delta_db_target_x = cmp.variant.target_mean_db_x - cmp.reference.target_mean_db_x;
  cmp.delta_db_target_y = cmp.variant.target_mean_db_y - cmp.reference.target_mean_db_y;

  double ref_peak = cmp.reference.sar_peak;
  double var_peak = cmp.variant.sar_peak;
  if (settings.power_norm == PowerNormalization::EqualAcceptedPower &&
      cmp.variant.accepted_power > 0.0) {
    // SAR scales linearly with accepted power at fixed geometry.
    var_peak *= cmp.reference.accepted_power / cmp.variant.accepted_power;
  }
  if (var_peak == 0.0) throw DivisionError("evaluate_plan: variant peak SAR is zero");
  cmp.sar_peak_ratio = ref_peak / var_peak;
  return cmp;
}

}  // namespace slotcma
