#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "slotcma/cma.hpp"
#include "slotcma/fields.hpp"
#include "slotcma/mesh.hpp"
#include "slotcma/sar.hpp"

namespace slotcma {

// All writers emit fixed-order rows with %.17g numbers, so identical inputs
// produce byte-identical files.

void write_modes_csv(std::ostream& os, const ModeSet& modes);
void write_sweep_csv(std::ostream& os, const std::vector<ModeSet>& sweep);
void write_resonance_csv(std::ostream& os, const std::vector<ModeTrajectory>& paths);
void write_mode_current_csv(std::ostream& os, const TriMesh& mesh, const SurfaceCurrent& current);
void write_field_csv(std::ostream& os, const FieldResult& field);
void write_sar_csv(std::ostream& os, const SarResult& sar);

std::uint64_t fnv1a64(const std::string& data);

// Machine-readable run manifest: inputs hash, version, stage timings.
struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  std::string version;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::vector<std::string> outputs;
};

void write_manifest(std::ostream& os, const RunManifest& manifest);

std::string format_g17(double v);

}  // namespace slotcma
