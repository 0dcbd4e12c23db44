#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "slotcma/cma.hpp"
#include "slotcma/fields.hpp"
#include "slotcma/mesh.hpp"
#include "slotcma/mom.hpp"
#include "slotcma/sar.hpp"

namespace slotcma {

// Flowchart weighting of the undesired current: magnitudes |alpha_n| as
// written, or the complex coefficients for experimentation.
enum class InterfererWeighting { Magnitude, Complex };

// Field scaling used when comparing geometries.
enum class PowerNormalization { EqualVoltage, EqualAcceptedPower };

struct PlanInput {
  int desired_mode = 0;    // index into the sorted ModeSet
  int interferer_count = 1;
  double feed_volts = 1.0;
  InterfererWeighting weighting = InterfererWeighting::Magnitude;
  double slot_length = 0.030;  // recommended slot dimensions
  double slot_width = 0.0002;
};

struct InterfererRank {
  int mode_index = -1;
  double alpha_mag = 0.0;
  std::complex<double> alpha{0.0, 0.0};
  bool negligible = false;
};

struct PlanOutput {
  int feed_edge = -1;
  std::vector<InterfererRank> ranking;
  SurfaceCurrent undesired;
  double polarization_angle = 0.0;  // radians from +x, principal axis of J_und
  SlotSpec slot;
};

// Step 1: feed at the maximum-|coefficient| edge of the desired mode.
// Ties break toward the lowest edge id.
int select_feed(const ModeSet& modes, int desired_mode, const TriMesh& mesh,
                const RwgSet& basis);

// Steps 3-4: the U modes with the largest |alpha_n|, n != desired, descending;
// all-zero projections are still returned, flagged negligible.
std::vector<InterfererRank> rank_interferers(const ModeSet& modes, const Excitation& exc,
                                             int desired_mode, int count);

// Step 5: J_und = sum |alpha_n| J_n over the ranking.
SurfaceCurrent undesired_current(const ModeSet& modes, const std::vector<InterfererRank>& ranking,
                                 const TriMesh& mesh, const RwgSet& basis,
                                 InterfererWeighting weighting = InterfererWeighting::Magnitude);

// Step 6: slot centered on the patch, long axis orthogonal to the dominant
// polarization of J_und, snapped to x or y (ties toward an x-polarized
// current, hence a y-directed slot).
SlotSpec recommend_slot(const SurfaceCurrent& j_und, const PlateSpec& patch,
                        double slot_length = 0.030, double slot_width = 0.0002);

// Principal polarization axis of an area-weighted current distribution.
double polarization_angle(const SurfaceCurrent& j, const TriMesh& mesh);

// Steps 1-6 in sequence for a prebuilt mode set.
PlanOutput make_plan(const ModeSet& modes, const TriMesh& mesh, const RwgSet& basis,
                     const PlanInput& input);

// ---------------------------------------------------------------------------
// Full-chain before/after comparison of a slot plan.

struct EvaluateSettings {
  double frequency = 2.4e9;
  double target_edge = 0.0;            // 0 = lambda/10 at `frequency`
  Eigen::Vector2d feed_position{0.0, 0.0};
  double feed_volts = 1.0;
  int desired_mode = 0;
  int target_mode = 1;                 // mode the slot is meant to suppress
  CurrentNormalization field_norm = CurrentNormalization::MaxAmplitude;
  PowerNormalization power_norm = PowerNormalization::EqualVoltage;
  TissueLayer tissue;                  // defaults to skin when name empty
  double line_offset = 0.005;
  double line_height = 0.005;
  int line_samples = 51;
  double tissue_separation = 0.002;
  int tissue_nx = 35;
  int tissue_nz = 25;
  unsigned threads = 0;
};

struct GeometryMetrics {
  int basis_count = 0;
  int feed_edge = -1;
  std::vector<double> lambdas;       // retained modes
  std::vector<double> significances;
  double desired_mean_db_x = 0.0;    // modal near-field line levels
  double desired_mean_db_y = 0.0;
  double target_mean_db_x = 0.0;
  double target_mean_db_y = 0.0;
  double sar_peak = 0.0;             // driven SAR on the tissue plane
  double accepted_power = 0.0;       // Re(I^H V) of the driven solve
};

struct PlanComparison {
  double frequency = 0.0;
  GeometryMetrics reference;
  GeometryMetrics variant;
  double delta_ms_target = 0.0;        // variant - reference
  double delta_db_desired_x = 0.0;
  double delta_db_desired_y = 0.0;
  double delta_db_target_x = 0.0;
  double delta_db_target_y = 0.0;
  double sar_peak_ratio = 0.0;         // reference / variant
  PowerNormalization power_norm = PowerNormalization::EqualVoltage;
};

// Runs mesh -> Z -> modes -> weights -> near field -> SAR for the reference
// plate and the slotted variant. A null slot compares the reference with
// itself (all deltas zero).
PlanComparison evaluate_plan(const PlateSpec& reference, const std::optional<SlotSpec>& planned,
                             double frequency_hz, const EvaluateSettings& settings);

// Interior edge whose midpoint is closest to an xy position (ties toward the
// lower edge id).
int nearest_edge(const TriMesh& mesh, const RwgSet& basis, const Eigen::Vector2d& position);

}  // namespace slotcma
