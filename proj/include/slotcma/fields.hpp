#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slotcma/cma.hpp"
#include "slotcma/mesh.hpp"

namespace slotcma {

enum class ObservationKind { LineX, LineY, PlaneZ, Custom };

struct ObservationSet {
  std::vector<Eigen::Vector3d> points;
  ObservationKind kind = ObservationKind::Custom;
};

struct FieldResult {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3cd> e;  // V/m
  double frequency = 0.0;

  double magnitude(int i) const;     // Euclidean norm of the complex vector
  double magnitude_db(int i) const;  // 20 log10 |E|
};

// Exact Hertzian-dipole field of a current moment (A*m) at displacement rvec.
Eigen::Vector3cd hertzian_dipole_field(const Eigen::Vector3cd& moment,
                                       const Eigen::Vector3d& rvec, double k);

// Radiated E field: one infinitesimal dipole of moment J*area per triangle
// centroid, superposed with the exact 1/R, 1/R^2, 1/R^3 terms. Observation
// points closer than 0.1 mm to the plate raise GeometryError.
FieldResult near_field(const SurfaceCurrent& current, const TriMesh& mesh,
                       const ObservationSet& obs, double frequency_hz,
                       unsigned threads = 0);

// Uniform line parallel to the given axis at a lateral offset beyond the
// plate edge and height z. A negative extent reverses the point order.
ObservationSet observation_line(const PlateSpec& plate, char axis, double offset,
                                double height, double extent, int samples);

// Rectangular grid covering the plate footprint at height z.
ObservationSet observation_plane(const PlateSpec& plate, double z_height, int nx, int ny);

}  // namespace slotcma
