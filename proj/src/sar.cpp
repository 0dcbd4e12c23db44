#include "slotcma/sar.hpp"

#include <cmath>

#include "slotcma/constants.hpp"
#include "slotcma/errors.hpp"

namespace slotcma {

TissueLayer tissue_preset(const std::string& name) {
  if (name == "skin") return {"skin", 1.43, 38.1, 1100.0, 1.5e-3};
  if (name == "fat") return {"fat", 0.1, 5.29, 916.0, 1.5e-3};
  throw LookupError("tissue_preset: unknown tissue '" + name + "' (available: skin, fat)");
}

SarResult sar_from_field(const FieldResult& field, const TissueLayer& tissue) {
  if (field.points.size() != field.e.size())
    throw ConsistencyError("sar_from_field: field/grid geometry mismatch");
  SarResult out;
  out.points = field.points;
  out.tissue = tissue;
  out.frequency = field.frequency;
  out.sar.resize(field.e.size());
  const double factor = tissue.sigma / tissue.rho;
  for (std::size_t i = 0; i < field.e.size(); ++i) {
    const double mag2 = field.e[i].squaredNorm();
    out.sar[i] = factor * mag2;
    if (out.peak_index < 0 || out.sar[i] > out.peak) {
      out.peak = out.sar[i];
      out.peak_index = static_cast<int>(i);
    }
  }
  return out;
}

ObservationSet tissue_plane(const Eigen::AlignedBox2d& antenna_bbox, double separation,
                            double width, double height, int nx, int nz) {
  if (!(separation > 0.0)) throw GeometryError("tissue_plane: separation must be positive");
  if (nx < 2 || nz < 2) throw ConsistencyError("tissue_plane: need at least a 2x2 grid");
  ObservationSet set;
  set.kind = ObservationKind::Custom;
  const double y = antenna_bbox.max().y() + separation;
  const double xc = 0.5 * (antenna_bbox.min().x() + antenna_bbox.max().x());
  set.points.reserve(static_cast<std::size_t>(nx) * nz);
  for (int k = 0; k < nz; ++k) {
    const double z = -0.5 * height + height * k / (nz - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = xc - 0.5 * width + width * i / (nx - 1);
      set.points.emplace_back(x, y, z);
    }
  }
  return set;
}

double sar_ratio(const SarResult& reference, const SarResult& variant) {
  if (reference.points.size() != variant.points.size())
    throw ConsistencyError("sar_ratio: results sampled on different grids");
  for (std::size_t i = 0; i < reference.points.size(); ++i) {
    if ((reference.points[i] - variant.points[i]).norm() > 1e-12)
      throw ConsistencyError("sar_ratio: results sampled on different grids");
  }
  if (!(reference.tissue == variant.tissue))
    throw ConsistencyError("sar_ratio: results use different tissues");
  if (variant.peak == 0.0) throw DivisionError("sar_ratio: variant peak SAR is zero");
  return reference.peak / variant.peak;
}

double electrical_separation(double separation_m, double frequency_hz) {
  return separation_m / constants::wavelength(frequency_hz);
}

}  // namespace slotcma
