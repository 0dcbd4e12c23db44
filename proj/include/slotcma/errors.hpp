#pragma once

#include <stdexcept>

namespace slotcma {

// Invalid geometric input (slot outside plate, bad dimensions, standoff
// violation, ...).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mesh resolution incompatible with the requested geometry.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken mesh connectivity (non-manifold edges and the like).
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Objects from different meshes/bases combined, or dimension mismatch.
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kernel evaluated at a coincident source/observation point.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown name or id (tissue preset, feed edge, ...).
struct LookupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear solve failed or matrix numerically singular.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigendecomposition preconditions violated (R not positive definite,
// symmetry scrub beyond tolerance).
struct DecompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Slot-orientation planning cannot proceed (nothing to suppress).
struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ratio of peak values against a zero denominator.
struct DivisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or unreadable run configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace slotcma
