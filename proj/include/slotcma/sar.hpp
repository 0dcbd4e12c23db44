#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "slotcma/fields.hpp"

namespace slotcma {

struct TissueLayer {
  std::string name;
  double sigma = 0.0;      // S/m
  double eps_r = 1.0;
  double rho = 0.0;        // kg/m^3
  double thickness = 0.0;  // m (carried for reporting)

  bool operator==(const TissueLayer&) const = default;
};

struct SarResult {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> sar;  // W/kg
  TissueLayer tissue;
  double frequency = 0.0;
  double peak = 0.0;
  int peak_index = -1;

  Eigen::Vector3d peak_location() const { return points.at(peak_index); }
};

// Material presets: "skin" and "fat".
TissueLayer tissue_preset(const std::string& name);

// SAR_i = (sigma/rho) |E_i|^2, incident-field approximation (no tissue
// back-action modeled).
SarResult sar_from_field(const FieldResult& field, const TissueLayer& tissue);

// Sampling grid parallel to the XZ plane, offset beyond the structure's +Y
// extent. Default extent 85 mm x 60 mm.
ObservationSet tissue_plane(const Eigen::AlignedBox2d& antenna_bbox, double separation,
                            double width = 0.085, double height = 0.060, int nx = 35,
                            int nz = 25);

// Peak ratio reference/variant. Throws DivisionError when the variant peak
// is zero; ConsistencyError for mismatched grids or tissues.
double sar_ratio(const SarResult& reference, const SarResult& variant);

// Separation expressed in free-space wavelengths at the given frequency.
double electrical_separation(double separation_m, double frequency_hz);

}  // namespace slotcma
