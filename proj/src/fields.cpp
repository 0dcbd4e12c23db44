#include "slotcma/fields.hpp"

#include <cmath>
#include <cstdio>

#include "slotcma/constants.hpp"
#include "slotcma/errors.hpp"
#include "slotcma/parallel.hpp"

namespace slotcma {

namespace {

constexpr double kStandoff = 1e-4;  // 0.1 mm

double distance_to_plate(const Eigen::AlignedBox2d& box, const Eigen::Vector3d& p) {
  const double dx = std::max({box.min().x() - p.x(), 0.0, p.x() - box.max().x()});
  const double dy = std::max({box.min().y() - p.y(), 0.0, p.y() - box.max().y()});
  return std::sqrt(dx * dx + dy * dy + p.z() * p.z());
}

}  // namespace

double FieldResult::magnitude(int i) const { return e[i].norm(); }

double FieldResult::magnitude_db(int i) const { return 20.0 * std::log10(magnitude(i)); }

Eigen::Vector3cd hertzian_dipole_field(const Eigen::Vector3cd& moment,
                                       const Eigen::Vector3d& rvec, double k) {
  using cplx = std::complex<double>;
  const double r = rvec.norm();
  const Eigen::Vector3d rhat = rvec / r;
  const cplx mr = rhat.x() * moment.x() + rhat.y() * moment.y() + rhat.z() * moment.z();
  const Eigen::Vector3cd transverse = moment - mr * rhat.cast<cplx>();
  const Eigen::Vector3cd radial = 3.0 * mr * rhat.cast<cplx>() - moment;
  const cplx phase(std::cos(k * r), -std::sin(k * r));
  const double omega_eps = k / constants::eta0;  // omega * eps0
  const cplx prefactor = phase / (cplx(0.0, omega_eps) * 4.0 * constants::pi);
  const cplx near_terms = cplx(1.0 / (r * r * r), k / (r * r));
  return prefactor * ((k * k / r) * transverse + near_terms * radial);
}

FieldResult near_field(const SurfaceCurrent& current, const TriMesh& mesh,
                       const ObservationSet& obs, double frequency_hz, unsigned threads) {
  if (current.mesh_triangle_count != static_cast<int>(mesh.triangles.size()))
    throw ConsistencyError("near_field: current was built on a different mesh");
  const Eigen::AlignedBox2d box = mesh.footprint();
  for (const auto& p : obs.points) {
    if (distance_to_plate(box, p) < kStandoff) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "near_field: observation point (%g, %g, %g) within 0.1 mm of the plate",
                    p.x(), p.y(), p.z());
      throw GeometryError(buf);
    }
  }

  const double k = constants::wavenumber(frequency_hz);
  const int n_tri = static_cast<int>(mesh.triangles.size());
  std::vector<Eigen::Vector3cd> moments(n_tri);
  std::vector<Eigen::Vector3d> centers(n_tri);
  for (int t = 0; t < n_tri; ++t) {
    moments[t] = current.j[t] * mesh.triangle_area(t);
    centers[t] = mesh.centroid(t);
  }

  FieldResult out;
  out.points = obs.points;
  out.frequency = frequency_hz;
  out.e.assign(obs.points.size(), Eigen::Vector3cd::Zero());
  parallel_for(static_cast<int>(obs.points.size()), threads, [&](int i) {
    Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
    for (int t = 0; t < n_tri; ++t)
      acc += hertzian_dipole_field(moments[t], obs.points[i] - centers[t], k);
    out.e[i] = acc;
  });
  return out;
}

ObservationSet observation_line(const PlateSpec& plate, char axis, double offset,
                                double height, double extent, int samples) {
  if (samples < 2) throw ConsistencyError("observation_line: need at least 2 samples");
  ObservationSet set;
  set.points.reserve(samples);
  if (axis == 'x' || axis == 'X') {
    set.kind = ObservationKind::LineX;
    const double y = 0.5 * plate.width_y + offset;
    for (int i = 0; i < samples; ++i) {
      const double x = -0.5 * extent + extent * i / (samples - 1);
      set.points.emplace_back(x, y, height);
    }
  } else if (axis == 'y' || axis == 'Y') {
    set.kind = ObservationKind::LineY;
    const double x = 0.5 * plate.length_x + offset;
    for (int i = 0; i < samples; ++i) {
      const double y = -0.5 * extent + extent * i / (samples - 1);
      set.points.emplace_back(x, y, height);
    }
  } else {
    throw ConsistencyError("observation_line: axis must be 'x' or 'y'");
  }
  return set;
}

ObservationSet observation_plane(const PlateSpec& plate, double z_height, int nx, int ny) {
  if (nx < 2 || ny < 2) throw ConsistencyError("observation_plane: need at least a 2x2 grid");
  ObservationSet set;
  set.kind = ObservationKind::PlaneZ;
  set.points.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    const double y = -0.5 * plate.width_y + plate.width_y * j / (ny - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = -0.5 * plate.length_x + plate.length_x * i / (nx - 1);
      set.points.emplace_back(x, y, z_height);
    }
  }
  return set;
}

}  // namespace slotcma
