#include "slotcma/exports.hpp"

#include <cstdio>
#include <ostream>

namespace slotcma {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_modes_csv(std::ostream& os, const ModeSet& modes) {
  os << "f_Hz,mode_id,lambda,MS\n";
  for (int i = 0; i < modes.retained(); ++i) {
    os << format_g17(modes.frequency) << ',' << (i + 1) << ','
       << format_g17(modes.eigenvalues(i)) << ',' << format_g17(modes.significance(i)) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<ModeSet>& sweep) {
  os << "f_Hz,mode_id,lambda,MS\n";
  for (const auto& set : sweep) {
    for (int i = 0; i < set.retained(); ++i) {
      os << format_g17(set.frequency) << ',' << (i + 1) << ',' << format_g17(set.eigenvalues(i))
         << ',' << format_g17(set.significance(i)) << '\n';
    }
  }
}

void write_resonance_csv(std::ostream& os, const std::vector<ModeTrajectory>& paths) {
  os << "trajectory,start_set,points,broken,resonance_Hz\n";
  for (std::size_t t = 0; t < paths.size(); ++t) {
    const auto& p = paths[t];
    if (p.resonances.empty()) {
      os << t << ',' << p.start_set << ',' << p.mode_index.size() << ',' << (p.broken ? 1 : 0)
         << ",\n";
    } else {
      for (double r : p.resonances) {
        os << t << ',' << p.start_set << ',' << p.mode_index.size() << ',' << (p.broken ? 1 : 0)
           << ',' << format_g17(r) << '\n';
      }
    }
  }
}

void write_mode_current_csv(std::ostream& os, const TriMesh& mesh, const SurfaceCurrent& current) {
  os << "tri_id,cx,cy,cz,Jx_mag,Jy_mag,Jz_mag\n";
  for (int t = 0; t < current.mesh_triangle_count; ++t) {
    const Eigen::Vector3d c = mesh.centroid(t);
    const auto& j = current.j[t];
    os << t << ',' << format_g17(c.x()) << ',' << format_g17(c.y()) << ',' << format_g17(c.z())
       << ',' << format_g17(std::abs(j.x())) << ',' << format_g17(std::abs(j.y())) << ','
       << format_g17(std::abs(j.z())) << '\n';
  }
}

void write_field_csv(std::ostream& os, const FieldResult& field) {
  os << "x,y,z,Ex_re,Ex_im,Ey_re,Ey_im,Ez_re,Ez_im,absE,absE_dB\n";
  for (std::size_t i = 0; i < field.points.size(); ++i) {
    const auto& p = field.points[i];
    const auto& e = field.e[i];
    os << format_g17(p.x()) << ',' << format_g17(p.y()) << ',' << format_g17(p.z()) << ','
       << format_g17(e.x().real()) << ',' << format_g17(e.x().imag()) << ','
       << format_g17(e.y().real()) << ',' << format_g17(e.y().imag()) << ','
       << format_g17(e.z().real()) << ',' << format_g17(e.z().imag()) << ','
       << format_g17(field.magnitude(static_cast<int>(i))) << ','
       << format_g17(field.magnitude_db(static_cast<int>(i))) << '\n';
  }
}

void write_sar_csv(std::ostream& os, const SarResult& sar) {
  os << "x,y,z,SAR_W_per_kg\n";
  for (std::size_t i = 0; i < sar.points.size(); ++i) {
    const auto& p = sar.points[i];
    os << format_g17(p.x()) << ',' << format_g17(p.y()) << ',' << format_g17(p.z()) << ','
       << format_g17(sar.sar[i]) << '\n';
  }
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_manifest(std::ostream& os, const RunManifest& manifest) {
  os << "{\n";
  os << "  \"subcommand\": \"" << manifest.subcommand << "\",\n";
  os << "  \"config_hash\": \"" << manifest.config_hash << "\",\n";
  os << "  \"version\": \"" << manifest.version << "\",\n";
  os << "  \"timings_ms\": {";
  for (std::size_t i = 0; i < manifest.timings_ms.size(); ++i) {
    if (i) os << ", ";
    os << '"' << manifest.timings_ms[i].first << "\": " << format_g17(manifest.timings_ms[i].second);
  }
  os << "},\n";
  os << "  \"outputs\": [";
  for (std::size_t i = 0; i < manifest.outputs.size(); ++i) {
    if (i) os << ", ";
    os << '"' << manifest.outputs[i] << '"';
  }
  os << "]\n}\n";
}

}  // namespace slotcma
