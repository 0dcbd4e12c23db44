#pragma once

#include <array>
#include <string>
#include <vector>

#include "slotcma/cma.hpp"
#include "slotcma/mesh.hpp"
#include "slotcma/planner.hpp"

namespace slotcma {

// The three canonical geometries: 50 mm x 40 mm reference plate, the same
// plate with a 30 mm x 0.2 mm x-directed slot, and with the y-directed slot.
PlateSpec canonical_reference(double target_edge);
PlateSpec canonical_slot_x(double target_edge);
PlateSpec canonical_slot_y(double target_edge);

struct ScenarioSettings {
  double frequency = 2.4e9;
  double target_edge = 2.5e-3;
  double line_offset = 0.005;
  double line_height = 0.005;
  int line_samples = 51;
  double tissue_separation = 0.002;
  int tissue_nx = 35;
  int tissue_nz = 25;
  CurrentNormalization field_norm = CurrentNormalization::MaxAmplitude;
  unsigned threads = 0;
  std::string output_dir;  // empty: compute only, write nothing
};

struct ModeMetrics {
  double lambda = 0.0;
  double significance = 0.0;
  double mean_abs_jx = 0.0;  // centroid-current component means
  double mean_abs_jy = 0.0;
  double line_db_x = 0.0;    // mean 20 log10 |E| along the x/y lines
  double line_db_y = 0.0;

  double level_db() const { return 0.5 * (line_db_x + line_db_y); }
};

struct GeometryReport {
  std::string name;
  PlateSpec spec;
  int basis_count = 0;
  double r_scrub = 0.0, x_scrub = 0.0;
  double max_residual = 0.0;
  double max_r_orthogonality = 0.0;  // max |I'RI - delta|
  double max_x_orthogonality = 0.0;  // max |I'XI - lambda delta|
  double max_lambda = 0.0;
  std::vector<double> lambdas;
  std::vector<double> significances;
  std::array<ModeMetrics, 2> mode;   // two dominant modes
  int x_role = 0, y_role = 1;        // which dominant mode is x-/y-polarized
  double slot_end_fraction = 0.0;    // |J|-area share within 2 mm of slot ends
  int feed_edge = -1;
  double sar_peak = 0.0;
  double accepted_power = 0.0;
};

struct ScenarioSuite {
  ScenarioSettings settings;
  GeometryReport reference, slot_x, slot_y;

  // Outcome of the qualitative checks the suite asserts.
  bool ref_polarization_ok = false;     // mode roles split 3:1 between axes
  bool xslot_concentration_ok = false;  // slot mode pinned to the slot ends
  bool nearfield_trend_ok = false;      // parallel slot raises, orthogonal lowers
  bool sar_trend_ok = false;            // x-slot lowers the peak SAR

  double nf_delta_x_mode_xslot = 0.0;
  double nf_delta_x_mode_yslot = 0.0;
  double nf_delta_y_mode_xslot = 0.0;
  double nf_delta_y_mode_yslot = 0.0;
  double sar_ratio_ref_over_xslot = 0.0;
  double sar_ratio_ref_over_yslot = 0.0;

  bool all_ok() const {
    return ref_polarization_ok && xslot_concentration_ok && nearfield_trend_ok && sar_trend_ok;
  }
};

// End-to-end run of the three canonical geometries at the configured
// frequency; writes plot-ready exports when an output directory is set.
ScenarioSuite run_canonical_scenarios(const ScenarioSettings& settings);

}  // namespace slotcma
