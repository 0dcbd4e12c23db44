#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>

#include "slotcma/mesh.hpp"

namespace slotcma {

struct AssemblyOptions {
  int base_rule = 7;          // quadrature points per triangle
  int refined_rule = 13;      // used on high-aspect (slot rim) triangles
  double thin_aspect = 8.0;   // aspect ratio triggering the refined rule
  double near_factor = 2.0;   // centroid-distance multiple for extraction
  unsigned threads = 0;       // 0 = hardware concurrency
};

// Galerkin EFIE impedance system. Z is complex symmetric; R = Re(Z) is the
// radiation part, X = Im(Z) the reactance part.
struct MomSystem {
  Eigen::MatrixXcd z;
  double frequency = 0.0;   // Hz
  double wavenumber = 0.0;  // rad/m
  std::string basis_ref;

  int size() const { return static_cast<int>(z.rows()); }
  double max_asymmetry() const;  // max |Z_ij - Z_ji| / max |Z_ij|
};

enum class ExcitationKind { DeltaGap, PlaneWave };

struct Excitation {
  Eigen::VectorXcd v;  // volts (tested field inner products)
  ExcitationKind kind = ExcitationKind::DeltaGap;
  std::optional<int> feed_edge;
  double volts = 0.0;
};

// Free-space Green's function exp(-jkR)/(4 pi R).
// Throws SingularityError for coincident points.
std::complex<double> green(const Eigen::Vector3d& r, const Eigen::Vector3d& r_src, double k);

// Dense impedance-matrix assembly. Deterministic for any thread count:
// every matrix row is produced by exactly one worker with a fixed
// source-triangle loop order.
MomSystem assemble_z(const TriMesh& mesh, const RwgSet& basis, double frequency_hz,
                     const AssemblyOptions& opts = {});

// Delta-gap voltage across a single basis edge: V[feed] = volts * edge length.
Excitation excite_delta_gap(const RwgSet& basis, int feed_edge, double volts);

// Direct dense solve of Z I = V with one refinement pass.
// Post: ||Z I - V|| / ||V|| <= 1e-10, else SolverError.
Eigen::VectorXcd solve_direct(const MomSystem& sys, const Excitation& exc);

// Debug dump: "# frequency_hz <f>" header then "row col re im" lines (ohms).
void dump_matrix(const MomSystem& sys, std::ostream& os);

// Stable identifier for a basis set (size + geometry hash).
std::string basis_fingerprint(const TriMesh& mesh, const RwgSet& basis);

}  // namespace slotcma
