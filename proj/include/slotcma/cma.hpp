#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "slotcma/mesh.hpp"
#include "slotcma/mom.hpp"

namespace slotcma {

// Characteristic modes of X I = lambda R I at one frequency. Eigenvectors are
// stored R-orthonormal (I' R I = 1), sorted by descending modal significance,
// sign-fixed so the largest-magnitude entry is positive.
struct ModeSet {
  double frequency = 0.0;
  int basis_count = 0;
  std::string basis_ref;

  Eigen::VectorXd eigenvalues;     // retained modes, sorted
  Eigen::MatrixXd eigenvectors;    // basis_count x retained
  Eigen::MatrixXd r_eigenvectors;  // R * eigenvectors (tracking, weights)
  Eigen::VectorXd significance;    // 1/sqrt(1 + lambda^2)
  std::vector<int> source_index;   // position in the unsorted spectrum

  // Diagnostics recorded at decomposition time.
  double r_scrub = 0.0;  // max |R - R'| / max |R|
  double x_scrub = 0.0;
  Eigen::VectorXd residuals;  // ||X I - lambda R I|| / ||X I|| per mode

  int retained() const { return static_cast<int>(eigenvalues.size()); }
};

// Modal excitation coefficients alpha_m = I'V / ((1 + j lambda)(I'R I)) and
// the per-mode radiated power |alpha_m|^2.
struct ModalWeights {
  Eigen::VectorXcd alpha;
  Eigen::VectorXd modal_power;
  std::string excitation_ref;
};

// Per-triangle-centroid surface current density, A/m.
struct SurfaceCurrent {
  std::vector<Eigen::Vector3cd> j;
  int mesh_triangle_count = 0;
};

enum class CurrentNormalization { None, MaxAmplitude };

double modal_significance(double lambda);

// Generalized symmetric eigendecomposition via Cholesky reduction of
// R = Re(Z). Throws DecompositionError if R is not positive definite
// (reporting its smallest eigenvalue) or the symmetry scrub exceeds 1e-10.
ModeSet eig_modes(const MomSystem& sys, int num_modes);

// Retains every mode with MS >= 0.01, and not fewer than five.
ModeSet eig_modes_auto(const MomSystem& sys);

ModalWeights modal_weights(const ModeSet& modes, const Excitation& exc);

double total_power(const ModalWeights& w);

// RWG superposition evaluated at triangle centroids.
SurfaceCurrent current_on_centroids(const TriMesh& mesh, const RwgSet& basis,
                                    const Eigen::VectorXcd& coefficients);

SurfaceCurrent mode_current(const ModeSet& modes, int index, const TriMesh& mesh,
                            const RwgSet& basis,
                            CurrentNormalization norm = CurrentNormalization::None);

// Modes linked across a frequency sweep by |I_m(f)' R(f+df) I_n(f+df)|
// correlation; greedy maximal matching, breaks below `threshold` are
// reported, never silently patched.
struct ModeTrajectory {
  int start_set = 0;               // index of the first ModeSet on this path
  std::vector<int> mode_index;     // per covered set, the matched mode
  std::vector<double> frequencies;
  std::vector<double> lambdas;
  std::vector<double> significances;
  std::vector<double> resonances;  // interpolated lambda zero crossings, Hz
  bool broken = false;             // ended before the sweep did
};

std::vector<ModeTrajectory> track_modes(const std::vector<ModeSet>& sweep,
                                        double threshold = 0.7);

}  // namespace slotcma
