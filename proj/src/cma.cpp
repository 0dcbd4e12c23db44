#include "slotcma/cma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slotcma/errors.hpp"

namespace slotcma {

double modal_significance(double lambda) { return 1.0 / std::sqrt(1.0 + lambda * lambda); }

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

ModeSet eig_modes(const MomSystem& sys, int num_modes) {
  const int m = sys.size();
  if (num_modes < 1 || num_modes > m)
    throw ConsistencyError("eig_modes: requested mode count out of range");

  Eigen::MatrixXd r0 = sys.z.real();
  Eigen::MatrixXd x0 = sys.z.imag();
  const double r_scale = max_abs(r0), x_scale = max_abs(x0);
  const double r_scrub = r_scale > 0.0 ? max_abs(r0 - r0.transpose()) / r_scale : 0.0;
  const double x_scrub = x_scale > 0.0 ? max_abs(x0 - x0.transpose()) / x_scale : 0.0;
  if (r_scrub > 1e-10 || x_scrub > 1e-10)
    throw DecompositionError("eig_modes: symmetry scrub beyond 1e-10 (R " +
                             std::to_string(r_scrub) + ", X " + std::to_string(x_scrub) + ")");
  const Eigen::MatrixXd r = 0.5 * (r0 + r0.transpose());
  const Eigen::MatrixXd x = 0.5 * (x0 + x0.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) {
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r).eigenvalues().minCoeff();
    throw DecompositionError(
        "eig_modes: R is not positive definite; smallest eigenvalue of R = " +
        std::to_string(lmin));
  }

  // C = L^-1 X L^-T, then a standard symmetric eigenproblem.
  Eigen::MatrixXd c = llt.matrixL().solve(x);
  c = llt.matrixL().solve(Eigen::MatrixXd(c.transpose()));
  c = 0.5 * (c + Eigen::MatrixXd(c.transpose()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) throw DecompositionError("eig_modes: eigensolver failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd vec = llt.matrixU().solve(es.eigenvectors());  // R-orthonormal

  // Descending MS, ties by ascending lambda then source position.
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double aa = std::abs(lam(a)), ab = std::abs(lam(b));
    if (aa != ab) return aa < ab;
    if (lam(a) != lam(b)) return lam(a) < lam(b);
    return a < b;
  });

  ModeSet out;
  out.frequency = sys.frequency;
  out.basis_count = m;
  out.basis_ref = sys.basis_ref;
  out.eigenvalues.resize(num_modes);
  out.eigenvectors.resize(m, num_modes);
  out.significance.resize(num_modes);
  out.source_index.resize(num_modes);
  out.r_scrub = r_scrub;
  out.x_scrub = x_scrub;

  for (int i = 0; i < num_modes; ++i) {
    const int src = order[i];
    out.eigenvalues(i) = lam(src);
    Eigen::VectorXd v = vec.col(src);
    int peak = 0;
    for (int j = 1; j < m; ++j)
      if (std::abs(v(j)) > std::abs(v(peak))) peak = j;
    if (v(peak) < 0.0) v = -v;
    out.eigenvectors.col(i) = v;
    out.significance(i) = modal_significance(lam(src));
    out.source_index[i] = src;
  }
  out.r_eigenvectors = r * out.eigenvectors;

  out.residuals.resize(num_modes);
  const Eigen::MatrixXd xe = x * out.eigenvectors;
  for (int i = 0; i < num_modes; ++i) {
    const double denom = xe.col(i).norm();
    const double num = (xe.col(i) - out.eigenvalues(i) * out.r_eigenvectors.col(i)).norm();
    out.residuals(i) = denom > 0.0 ? num / denom : num;
  }
  return out;
}

ModeSet eig_modes_auto(const MomSystem& sys) {
  ModeSet all = eig_modes(sys, sys.size());
  int keep = 0;
  for (int i = 0; i < all.retained(); ++i)
    if (all.significance(i) >= 0.01) keep = i + 1;
  keep = std::min(all.retained(), std::max(keep, 5));

  ModeSet out = all;
  out.eigenvalues = all.eigenvalues.head(keep).eval();
  out.eigenvectors = all.eigenvectors.leftCols(keep).eval();
  out.r_eigenvectors = all.r_eigenvectors.leftCols(keep).eval();
  out.significance = all.significance.head(keep).eval();
  out.residuals = all.residuals.head(keep).eval();
  out.source_index.assign(all.source_index.begin(), all.source_index.begin() + keep);
  return out;
}

ModalWeights modal_weights(const ModeSet& modes, const Excitation& exc) {
  if (exc.v.size() != modes.basis_count)
    throw ConsistencyError("modal_weights: excitation/basis dimension mismatch");
  ModalWeights w;
  const int k = modes.retained();
  w.alpha.resize(k);
  w.modal_power.resize(k);
  for (int i = 0; i < k; ++i) {
    const std::complex<double> proj = modes.eigenvectors.col(i).cast<std::complex<double>>().dot(exc.v);
    const double r_norm = modes.eigenvectors.col(i).dot(modes.r_eigenvectors.col(i));
    const std::complex<double> denom =
        std::complex<double>(1.0, modes.eigenvalues(i)) * r_norm;
    w.alpha(i) = proj / denom;
    w.modal_power(i) = std::norm(w.alpha(i));
  }
  return w;
}

double total_power(const ModalWeights& w) { return w.modal_power.sum(); }

SurfaceCurrent current_on_centroids(const TriMesh& mesh, const RwgSet& basis,
                                    const Eigen::VectorXcd& coefficients) {
  if (coefficients.size() != basis.count())
    throw ConsistencyError("current_on_centroids: coefficient/basis size mismatch");
  SurfaceCurrent cur;
  cur.mesh_triangle_count = static_cast<int>(mesh.triangles.size());
  cur.j.assign(mesh.triangles.size(), Eigen::Vector3cd::Zero());
  for (int e = 0; e < basis.count(); ++e) {
    const auto& entry = basis.entries[e];
    const std::complex<double> c = coefficients(e);
    const auto add = [&](int tri, double sign, int free_vertex) {
      const double area = mesh.triangle_area(tri);
      const Eigen::Vector3d arm = mesh.centroid(tri) - mesh.vertices[free_vertex];
      cur.j[tri] += c * (sign * entry.edge_length / (2.0 * area)) * arm;
    };
    add(entry.plus_triangle, +1.0, entry.plus_free_vertex);
    add(entry.minus_triangle, -1.0, entry.minus_free_vertex);
  }
  return cur;
}

SurfaceCurrent mode_current(const ModeSet& modes, int index, const TriMesh& mesh,
                            const RwgSet& basis, CurrentNormalization norm) {
  if (index < 0 || index >= modes.retained())
    throw ConsistencyError("mode_current: mode index out of range");
  if (basis.count() != modes.basis_count)
    throw ConsistencyError("mode_current: basis does not match the mode set");
  SurfaceCurrent cur = current_on_centroids(
      mesh, basis, modes.eigenvectors.col(index).cast<std::complex<double>>());
  if (norm == CurrentNormalization::MaxAmplitude) {
    double peak = 0.0;
    for (const auto& j : cur.j) peak = std::max(peak, j.norm());
    if (peak > 0.0)
      for (auto& j : cur.j) j /= peak;
  }
  return cur;
}

std::vector<ModeTrajectory> track_modes(const std::vector<ModeSet>& sweep, double threshold) {
  if (sweep.size() < 2) throw ConsistencyError("track_modes: need at least two frequencies");
  for (const auto& s : sweep)
    if (s.basis_count != sweep.front().basis_count)
      throw ConsistencyError("track_modes: mode sets use different bases");

  std::vector<ModeTrajectory> paths;
  std::vector<int> live;  // trajectory id carried by each mode of the current set
  for (int n = 0; n < sweep.front().retained(); ++n) {
    ModeTrajectory t;
    t.start_set = 0;
    t.mode_index.push_back(n);
    t.frequencies.push_back(sweep.front().frequency);
    t.lambdas.push_back(sweep.front().eigenvalues(n));
    t.significances.push_back(sweep.front().significance(n));
    live.push_back(static_cast<int>(paths.size()));
    paths.push_back(std::move(t));
  }

  for (std::size_t s = 0; s + 1 < sweep.size(); ++s) {
    const ModeSet& cur = sweep[s];
    const ModeSet& nxt = sweep[s + 1];
    struct Cand {
      double corr;
      int from, to;
    };
    std::vector<Cand> cands;
    for (int a = 0; a < cur.retained(); ++a)
      for (int b = 0; b < nxt.retained(); ++b)
        cands.push_back({std::abs(cur.eigenvectors.col(a).dot(nxt.r_eigenvectors.col(b))), a, b});
    std::sort(cands.begin(), cands.end(), [](const Cand& lhs, const Cand& rhs) {
      if (lhs.corr != rhs.corr) return lhs.corr > rhs.corr;
      if (lhs.from != rhs.from) return lhs.from < rhs.from;
      return lhs.to < rhs.to;
    });

    std::vector<int> next_live(nxt.retained(), -1);
    std::vector<bool> from_used(cur.retained(), false), to_used(nxt.retained(), false);
    for (const Cand& c : cands) {
      if (c.corr < threshold) break;
      if (from_used[c.from] || to_used[c.to]) continue;
      from_used[c.from] = true;
      to_used[c.to] = true;
      const int id = live[c.from];
      next_live[c.to] = id;
      paths[id].mode_index.push_back(c.to);
      paths[id].frequencies.push_back(nxt.frequency);
      paths[id].lambdas.push_back(nxt.eigenvalues(c.to));
      paths[id].significances.push_back(nxt.significance(c.to));
    }
    for (int a = 0; a < cur.retained(); ++a)
      if (!from_used[a]) paths[live[a]].broken = true;
    for (int b = 0; b < nxt.retained(); ++b) {
      if (next_live[b] >= 0) continue;
      ModeTrajectory t;
      t.start_set = static_cast<int>(s) + 1;
      t.mode_index.push_back(b);
      t.frequencies.push_back(nxt.frequency);
      t.lambdas.push_back(nxt.eigenvalues(b));
      t.significances.push_back(nxt.significance(b));
      next_live[b] = static_cast<int>(paths.size());
      paths.push_back(std::move(t));
    }
    live = std::move(next_live);
  }

  for (auto& t : paths) {
    for (std::size_t i = 0; i + 1 < t.lambdas.size(); ++i) {
      const double l0 = t.lambdas[i], l1 = t.lambdas[i + 1];
      if (l0 == 0.0) {
        t.resonances.push_back(t.frequencies[i]);
      } else if ((l0 < 0.0 && l1 >= 0.0) || (l0 > 0.0 && l1 <= 0.0)) {
        const double f0 = t.frequencies[i], f1 = t.frequencies[i + 1];
        t.resonances.push_back(f0 + (0.0 - l0) * (f1 - f0) / (l1 - l0));
      }
    }
  }
  return paths;
}

}  // namespace slotcma
