#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "slotcma/cma.hpp"
#include "slotcma/mesh.hpp"
#include "slotcma/planner.hpp"

namespace slotcma {

// Run configuration, internal units strictly SI. Config files carry explicit
// unit suffixes in key names (length_mm, frequencies_ghz, ...).
struct RunConfig {
  PlateSpec geometry{0.050, 0.040, std::nullopt, 0.0025};
  std::vector<double> frequencies{2.4e9};  // Hz, strictly increasing

  double feed_volts = 1.0;
  std::optional<int> feed_edge;
  std::optional<Eigen::Vector2d> feed_position;  // defaults to the mode maximum

  double line_offset = 0.005;
  double line_height = 0.005;
  int line_samples = 51;
  double plane_height = 0.005;
  int plane_nx = 51;
  int plane_ny = 41;

  std::string tissue_name = "skin";
  double tissue_separation = 0.002;
  int tissue_nx = 35;
  int tissue_nz = 25;

  int retained_modes = 0;  // 0 = automatic retention rule
  CurrentNormalization field_norm = CurrentNormalization::MaxAmplitude;

  int desired_mode = 0;  // 0-based; config files use 1-based mode ids
  int interferers = 1;
  double slot_length = 0.030;
  double slot_width = 0.0002;
  InterfererWeighting weighting = InterfererWeighting::Magnitude;
  PowerNormalization power_norm = PowerNormalization::EqualVoltage;

  std::string output_dir = "out";
  unsigned threads = 0;

  bool operator==(const RunConfig& other) const;
};

// Parse from JSON text; throws ConfigError with a line-numbered diagnostic.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Canonical serialization (mm/GHz suffixes); parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace slotcma
