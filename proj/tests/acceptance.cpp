// Acceptance suite: runs every agreed criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slotcma/cma.hpp"
#include "slotcma/constants.hpp"
#include "slotcma/fields.hpp"
#include "slotcma/mesh.hpp"
#include "slotcma/mom.hpp"
#include "slotcma/planner.hpp"
#include "slotcma/sar.hpp"
#include "slotcma/scenarios.hpp"

using namespace slotcma;
namespace cst = slotcma::constants;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

struct Assembled {
  TriMesh mesh;
  RwgSet basis;
  MomSystem sys;
};

Assembled assemble_plate(const PlateSpec& spec, double freq) {
  Assembled a;
  a.mesh = build_plate(spec);
  a.basis = enumerate_rwg(a.mesh);
  a.sys = assemble_z(a.mesh, a.basis, freq);
  return a;
}

// --- criterion 1: operator symmetry and assembly runtime --------------------

void run_symmetry() {
  const double freq = 2.4e9;
  const double lambda10 = cst::wavelength(freq) / 10.0;
  const Assembled coarse = assemble_plate({0.050, 0.040, std::nullopt, lambda10}, freq);
  const double asym = coarse.sys.max_asymmetry();

  const auto t0 = std::chrono::steady_clock::now();
  const Assembled big = assemble_plate({0.050, 0.040, std::nullopt, 0.002}, freq);
  const double asym_big = big.sys.max_asymmetry();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool ok = asym <= 1e-10 && asym_big <= 1e-10 && big.basis.count() <= 1500 && secs < 60.0;
  criterion(1, "operator symmetry + runtime", ok,
            fmt("asym %.2e (lambda/10), %.2e at M=%d in %.1f s", asym, asym_big,
                big.basis.count(), secs));
}

// --- criterion 2: eigen integrity on the canonical geometries ---------------

void run_eigen_integrity(const ScenarioSuite& suite) {
  bool ok = true;
  std::string detail;
  for (const GeometryReport* rep : {&suite.reference, &suite.slot_x, &suite.slot_y}) {
    const bool geo_ok = rep->max_residual <= 1e-8 && rep->max_r_orthogonality <= 1e-8 &&
                        rep->max_x_orthogonality <= 1e-6 * rep->max_lambda &&
                        rep->r_scrub <= 1e-10 && rep->x_scrub <= 1e-10;
    ok = ok && geo_ok;
    detail += fmt("%s[res %.1e orthR %.1e orthX %.1e scrub %.1e] ", rep->name.c_str(),
                  rep->max_residual, rep->max_r_orthogonality,
                  rep->max_x_orthogonality / std::max(rep->max_lambda, 1e-300),
                  std::max(rep->r_scrub, rep->x_scrub));
  }
  criterion(2, "eigen integrity (3 geometries)", ok, detail);
}

// --- criterion 3: modal completeness ----------------------------------------

void run_completeness() {
  const double freq = 2.4e9;
  const Assembled a = assemble_plate({0.050, 0.040, std::nullopt, cst::wavelength(freq) / 10.0},
                                     freq);
  const ModeSet modes = eig_modes(a.sys, a.sys.size());
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> pick(0, a.basis.count() - 1);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Excitation exc = excite_delta_gap(a.basis, pick(rng), 1.0);
    const Eigen::VectorXcd direct = solve_direct(a.sys, exc);
    const ModalWeights w = modal_weights(modes, exc);
    Eigen::VectorXcd recon = Eigen::VectorXcd::Zero(a.sys.size());
    for (int m = 0; m < modes.retained(); ++m)
      recon += w.alpha(m) * modes.eigenvectors.col(m).cast<std::complex<double>>();
    worst = std::max(worst, (recon - direct).norm() / direct.norm());
  }
  criterion(3, "modal completeness (5 feeds)", worst <= 1e-6,
            fmt("worst relative error %.2e (M=%d)", worst, a.basis.count()));
}

// --- criterion 4: modal significance unit values -----------------------------

void run_ms_values() {
  const bool ok = std::abs(modal_significance(0.0) - 1.0) <= 1e-12 &&
                  std::abs(modal_significance(1.0) - 1.0 / std::sqrt(2.0)) <= 1e-12 &&
                  std::abs(modal_significance(-1.0) - 1.0 / std::sqrt(2.0)) <= 1e-12 &&
                  std::abs(modal_significance(3.0) - 1.0 / std::sqrt(10.0)) <= 1e-12;
  criterion(4, "modal significance values", ok,
            fmt("MS(0)=%.15f MS(1)=%.15f MS(3)=%.15f", modal_significance(0.0),
                modal_significance(1.0), modal_significance(3.0)));
}

// --- criteria 5-7, 9: canonical scenario checks -----------------------------

void run_polarization(const ScenarioSuite& suite) {
  const auto& rm = suite.reference;
  const auto& mx = rm.mode[rm.x_role];
  const auto& my = rm.mode[rm.y_role];
  criterion(5, "reference polarization roles", suite.ref_polarization_ok,
            fmt("mode%d |Jx|/|Jy|=%.2f, mode%d |Jy|/|Jx|=%.2f (need > 3)", rm.x_role + 1,
                mx.mean_abs_jx / mx.mean_abs_jy, rm.y_role + 1, my.mean_abs_jy / my.mean_abs_jx));
}

void run_slot_mode(const ScenarioSuite& suite) {
  criterion(6, "slot-mode end concentration", suite.xslot_concentration_ok,
            fmt("|J|-area fraction within 2 mm of slot ends: %.3f (need >= 0.60)",
                suite.slot_x.slot_end_fraction));
}

void run_nearfield_trend(const ScenarioSuite& suite) {
  criterion(7, "near-field slot trend", suite.nearfield_trend_ok,
            fmt("x-mode: xslot %+.2f dB, yslot %+.2f dB; y-mode: xslot %+.2f dB, yslot %+.2f dB",
                suite.nf_delta_x_mode_xslot, suite.nf_delta_x_mode_yslot,
                suite.nf_delta_y_mode_xslot, suite.nf_delta_y_mode_yslot));
}

void run_sar_trend(const ScenarioSuite& suite) {
  criterion(9, "SAR trend (equal voltage)", suite.sar_trend_ok,
            fmt("peak ratio ref/x-slot = %.2f (need > 1), ref/y-slot = %.2f",
                suite.sar_ratio_ref_over_xslot, suite.sar_ratio_ref_over_yslot));
}

// --- criterion 8: SAR arithmetic --------------------------------------------

void run_sar_arithmetic() {
  FieldResult f;
  f.frequency = 2.4e9;
  for (int i = 0; i < 16; ++i) {
    f.points.emplace_back(0.001 * i, 0.022, 0.0);
    f.e.emplace_back(std::complex<double>(0.2 + 0.1 * i, 0.05 * i),
                     std::complex<double>(-0.3, 0.07 * i), std::complex<double>(0.0, 0.0));
  }
  f.e[0] = Eigen::Vector3cd(std::complex<double>(1.0, 0.0), 0.0, 0.0);
  const SarResult skin = sar_from_field(f, tissue_preset("skin"));
  const SarResult fat = sar_from_field(f, tissue_preset("fat"));
  const double unit = skin.sar[0];
  const double expect_unit = 1.43 / 1100.0;
  bool ok = std::abs(unit - expect_unit) <= 1e-15 * expect_unit;
  const double expect_ratio = (1.43 / 1100.0) / (0.1 / 916.0);
  double worst_ratio_dev = 0.0;
  for (std::size_t i = 0; i < skin.sar.size(); ++i) {
    const double dev = std::abs(skin.sar[i] / fat.sar[i] - expect_ratio) / expect_ratio;
    worst_ratio_dev = std::max(worst_ratio_dev, dev);
  }
  ok = ok && worst_ratio_dev <= 1e-12;
  criterion(8, "SAR arithmetic", ok,
            fmt("unit-field skin SAR %.10e (expect %.10e), ratio dev %.1e", unit, expect_unit,
                worst_ratio_dev));
}

// --- criterion 10: planner correctness ---------------------------------------

void run_planner_checks() {
  const PlateSpec patch{0.050, 0.040, std::nullopt, 0.005};
  const TriMesh mesh = build_plate(patch);
  auto uniform = [&](double ux, double uy) {
    SurfaceCurrent cur;
    cur.mesh_triangle_count = static_cast<int>(mesh.triangles.size());
    cur.j.assign(mesh.triangles.size(),
                 Eigen::Vector3cd(std::complex<double>(ux, 0.0), std::complex<double>(uy, 0.0),
                                  0.0));
    return cur;
  };
  const SlotSpec from_y = recommend_slot(uniform(0.0, 1.0), patch);
  const SlotSpec from_x = recommend_slot(uniform(1.0, 0.0), patch);
  const bool orient_ok = from_y.len_x == 0.030 && from_y.len_y == 0.0002 &&
                         from_x.len_x == 0.0002 && from_x.len_y == 0.030;

  // Feed selection invariance under sign flip and positive rescale.
  const RwgSet basis = enumerate_rwg(mesh);
  const MomSystem sys = assemble_z(mesh, basis, 2.4e9);
  const ModeSet modes = eig_modes_auto(sys);
  const int feed = select_feed(modes, 0, mesh, basis);
  ModeSet flipped = modes;
  flipped.eigenvectors = -flipped.eigenvectors;
  flipped.r_eigenvectors = -flipped.r_eigenvectors;
  ModeSet scaled = modes;
  scaled.eigenvectors *= 12.5;
  const bool feed_ok =
      select_feed(flipped, 0, mesh, basis) == feed && select_feed(scaled, 0, mesh, basis) == feed;

  criterion(10, "planner correctness", orient_ok && feed_ok,
            fmt("pureY->%gx%g mm, pureX->%gx%g mm, feed edge %d invariant: %s",
                from_y.len_x * 1e3, from_y.len_y * 1e3, from_x.len_x * 1e3, from_x.len_y * 1e3,
                feed, feed_ok ? "yes" : "no"));
}

// --- criterion 11: resonance tracking under refinement ----------------------

double mode1_resonance(double target_edge) {
  const PlateSpec spec{0.050, 0.040, std::nullopt, target_edge};
  const TriMesh mesh = build_plate(spec);
  const RwgSet basis = enumerate_rwg(mesh);
  std::vector<ModeSet> sweep;
  for (int i = 0; i < 21; ++i) {
    const double f = 2.0e9 + (4.0e9 - 2.0e9) * i / 20.0;
    const MomSystem sys = assemble_z(mesh, basis, f);
    sweep.push_back(eig_modes_auto(sys));
  }
  const auto paths = track_modes(sweep);
  // The trajectory starting at the first sorted mode of the 2.0 GHz set.
  for (const auto& p : paths) {
    if (p.start_set == 0 && p.mode_index.front() == 0) {
      if (p.resonances.size() != 1) return -static_cast<double>(p.resonances.size());
      return p.resonances.front();
    }
  }
  return -1.0;
}

void run_resonance_tracking() {
  const double f10 = mode1_resonance(cst::wavelength(2.4e9) / 10.0);
  const double f15 = mode1_resonance(cst::wavelength(2.4e9) / 15.0);
  const bool found = f10 > 0.0 && f15 > 0.0;
  const double shift = found ? std::abs(f10 - f15) / f15 : 1.0;
  criterion(11, "resonance self-convergence", found && shift < 0.02,
            fmt("crossing %.4f GHz (l/10) vs %.4f GHz (l/15), shift %.2f%%", f10 / 1e9, f15 / 1e9,
                shift * 100.0));
}

// --- criterion 12: byte-identical repeat runs -------------------------------

void run_determinism() {
  ScenarioSettings s;
  s.target_edge = 0.004;  // density-independent property; keep the repeat cheap
  s.tissue_nx = 18;
  s.tissue_nz = 13;
  s.line_samples = 21;
  const fs::path base = fs::temp_directory_path() / "slotcma_acceptance";
  fs::remove_all(base);
  ScenarioSettings s1 = s, s2 = s;
  s1.output_dir = (base / "run1").string();
  s2.output_dir = (base / "run2").string();
  run_canonical_scenarios(s1);
  run_canonical_scenarios(s2);

  bool ok = true;
  int files = 0;
  std::string mismatch;
  for (const auto& entry : fs::directory_iterator(s1.output_dir)) {
    ++files;
    const fs::path other = fs::path(s2.output_dir) / entry.path().filename();
    std::ifstream f1(entry.path(), std::ios::binary), f2(other, std::ios::binary);
    std::stringstream b1, b2;
    b1 << f1.rdbuf();
    b2 << f2.rdbuf();
    if (!f2 || b1.str() != b2.str()) {
      ok = false;
      mismatch = entry.path().filename().string();
    }
  }
  ok = ok && files > 0;
  criterion(12, "determinism of exports", ok,
            ok ? fmt("%d files byte-identical", files) : ("mismatch in " + mismatch));
}

}  // namespace

int main() {
  std::printf("acceptance suite (2.4 GHz canonical geometries)\n");
  run_symmetry();

  ScenarioSettings scenario;
  const ScenarioSuite suite = run_canonical_scenarios(scenario);
  run_eigen_integrity(suite);
  run_completeness();
  run_ms_values();
  run_polarization(suite);
  run_slot_mode(suite);
  run_nearfield_trend(suite);
  run_sar_arithmetic();
  run_sar_trend(suite);
  run_planner_checks();
  run_resonance_tracking();
  run_determinism();

  std::printf("%d of 12 criteria failed\n", g_failures);
  return g_failures;
}
