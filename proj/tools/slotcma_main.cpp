// Command-line front end: characteristic-mode analysis of slot-loaded
// rectangular PEC plates, near-field and SAR evaluation, and slot-orientation
// planning.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "slotcma/config.hpp"
#include "slotcma/constants.hpp"
#include "slotcma/errors.hpp"
#include "slotcma/exports.hpp"
#include "slotcma/scenarios.hpp"

namespace fs = std::filesystem;
using namespace slotcma;

namespace {

constexpr const char* kVersion = "slotcma 0.1.0";

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct RunContext {
  RunConfig config;
  std::string config_text;
  fs::path out_dir;
  RunManifest manifest;

  void stage(const std::string& name, double ms) { manifest.timings_ms.emplace_back(name, ms); }

  std::ofstream open(const std::string& filename) {
    fs::create_directories(out_dir);
    manifest.outputs.push_back(filename);
    return std::ofstream(out_dir / filename);
  }

  void finish() {
    fs::create_directories(out_dir);
    std::ofstream os(out_dir / ("manifest_" + manifest.subcommand + ".json"));
    write_manifest(os, manifest);
  }
};

RunContext make_context(const std::string& subcommand, const std::string& config_path,
                        const std::string& out_override, double freq_ghz_override) {
  RunContext ctx;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("config: cannot open '" + config_path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    ctx.config_text = ss.str();
    ctx.config = parse_config(ctx.config_text);
  } else {
    ctx.config = RunConfig{};
    ctx.config_text = serialize_config(ctx.config);
  }
  if (freq_ghz_override > 0.0) ctx.config.frequencies = {freq_ghz_override * 1e9};
  if (!out_override.empty()) ctx.config.output_dir = out_override;
  ctx.out_dir = ctx.config.output_dir;
  ctx.manifest.subcommand = subcommand;
  char hash[24];
  std::snprintf(hash, sizeof(hash), "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_config(ctx.config))));
  ctx.manifest.config_hash = hash;
  ctx.manifest.version = kVersion;
  return ctx;
}

struct Pipeline {
  TriMesh mesh;
  RwgSet basis;
  MomSystem sys;
  ModeSet modes;
};

Pipeline build_pipeline(RunContext& ctx, double frequency) {
  Pipeline p;
  Timer t_mesh;
  p.mesh = build_plate(ctx.config.geometry);
  p.basis = enumerate_rwg(p.mesh);
  ctx.stage("mesh", t_mesh.ms());
  Timer t_asm;
  AssemblyOptions aopts;
  aopts.threads = ctx.config.threads;
  p.sys = assemble_z(p.mesh, p.basis, frequency, aopts);
  ctx.stage("assembly", t_asm.ms());
  Timer t_eig;
  p.modes = ctx.config.retained_modes > 0 ? eig_modes(p.sys, ctx.config.retained_modes)
                                          : eig_modes_auto(p.sys);
  ctx.stage("eigendecomposition", t_eig.ms());
  return p;
}

int pick_feed_edge(const RunConfig& cfg, const Pipeline& p) {
  if (cfg.feed_edge) {
    if (*cfg.feed_edge < 0 || *cfg.feed_edge >= p.basis.count())
      throw LookupError("feed edge id out of range");
    return *cfg.feed_edge;
  }
  if (cfg.feed_position) return nearest_edge(p.mesh, p.basis, *cfg.feed_position);
  return select_feed(p.modes, cfg.desired_mode, p.mesh, p.basis);
}

int cmd_mesh(RunContext& ctx) {
  Timer t;
  const TriMesh mesh = build_plate(ctx.config.geometry);
  const RwgSet basis = enumerate_rwg(mesh);
  ctx.stage("mesh", t.ms());
  auto os = ctx.open("mesh.txt");
  write_mesh_text(mesh, os);
  std::cout << "mesh: " << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
            << " triangles, " << basis.count() << " basis functions\n";
  ctx.finish();
  return 0;
}

int cmd_modes(RunContext& ctx) {
  const double f = ctx.config.frequencies.front();
  Pipeline p = build_pipeline(ctx, f);
  {
    auto os = ctx.open("modes.csv");
    write_modes_csv(os, p.modes);
  }
  const int n_export = std::min(2, p.modes.retained());
  for (int m = 0; m < n_export; ++m) {
    const SurfaceCurrent cur = mode_current(p.modes, m, p.mesh, p.basis, ctx.config.field_norm);
    auto os = ctx.open("mode" + std::to_string(m + 1) + "_current.csv");
    write_mode_current_csv(os, p.mesh, cur);
  }
  std::cout << "modes at " << f / 1e9 << " GHz: " << p.modes.retained() << " retained (of "
            << p.basis.count() << ")\n";
  for (int m = 0; m < std::min(5, p.modes.retained()); ++m)
    std::cout << "  mode " << (m + 1) << ": lambda = " << p.modes.eigenvalues(m)
              << ", MS = " << p.modes.significance(m) << "\n";
  ctx.finish();
  return 0;
}

int cmd_sweep(RunContext& ctx) {
  if (ctx.config.frequencies.size() < 2)
    throw ConfigError("sweep: config must list at least two frequencies");
  std::vector<ModeSet> sweep;
  TriMesh mesh = build_plate(ctx.config.geometry);
  RwgSet basis = enumerate_rwg(mesh);
  AssemblyOptions aopts;
  aopts.threads = ctx.config.threads;
  Timer t;
  for (double f : ctx.config.frequencies) {
    const MomSystem sys = assemble_z(mesh, basis, f, aopts);
    sweep.push_back(ctx.config.retained_modes > 0 ? eig_modes(sys, ctx.config.retained_modes)
                                                  : eig_modes_auto(sys));
  }
  ctx.stage("sweep", t.ms());
  const auto paths = track_modes(sweep);
  {
    auto os = ctx.open("sweep.csv");
    write_sweep_csv(os, sweep);
  }
  {
    auto os = ctx.open("resonances.csv");
    write_resonance_csv(os, paths);
  }
  int crossings = 0;
  for (const auto& path : paths) crossings += static_cast<int>(path.resonances.size());
  std::cout << "sweep: " << sweep.size() << " frequencies, " << paths.size() << " trajectories, "
            << crossings << " resonance crossings\n";
  for (const auto& path : paths)
    for (double r : path.resonances)
      std::cout << "  resonance at " << r / 1e9 << " GHz (trajectory starting set "
                << path.start_set << ")\n";
  ctx.finish();
  return 0;
}

int cmd_nearfield(RunContext& ctx) {
  const double f = ctx.config.frequencies.front();
  Pipeline p = build_pipeline(ctx, f);
  Timer t;
  const int n_export = std::min(2, p.modes.retained());
  for (int m = 0; m < n_export; ++m) {
    const SurfaceCurrent cur = mode_current(p.modes, m, p.mesh, p.basis, ctx.config.field_norm);
    const ObservationSet lx =
        observation_line(ctx.config.geometry, 'x', ctx.config.line_offset, ctx.config.line_height,
                         ctx.config.geometry.length_x, ctx.config.line_samples);
    const ObservationSet ly =
        observation_line(ctx.config.geometry, 'y', ctx.config.line_offset, ctx.config.line_height,
                         ctx.config.geometry.width_y, ctx.config.line_samples);
    const ObservationSet plane = observation_plane(ctx.config.geometry, ctx.config.plane_height,
                                                   ctx.config.plane_nx, ctx.config.plane_ny);
    {
      auto os = ctx.open("mode" + std::to_string(m + 1) + "_lineX.csv");
      write_field_csv(os, near_field(cur, p.mesh, lx, f, ctx.config.threads));
    }
    {
      auto os = ctx.open("mode" + std::to_string(m + 1) + "_lineY.csv");
      write_field_csv(os, near_field(cur, p.mesh, ly, f, ctx.config.threads));
    }
    {
      auto os = ctx.open("mode" + std::to_string(m + 1) + "_plane.csv");
      write_field_csv(os, near_field(cur, p.mesh, plane, f, ctx.config.threads));
    }
  }
  ctx.stage("nearfield", t.ms());
  std::cout << "nearfield: exported line and plane fields for " << n_export << " modes\n";
  ctx.finish();
  return 0;
}

int cmd_sar(RunContext& ctx) {
  const double f = ctx.config.frequencies.front();
  Pipeline p = build_pipeline(ctx, f);
  Timer t;
  const int feed = pick_feed_edge(ctx.config, p);
  const Excitation exc = excite_delta_gap(p.basis, feed, ctx.config.feed_volts);
  const Eigen::VectorXcd coeffs = solve_direct(p.sys, exc);
  const SurfaceCurrent driven = current_on_centroids(p.mesh, p.basis, coeffs);
  const TissueLayer tissue = tissue_preset(ctx.config.tissue_name);
  const ObservationSet plane =
      tissue_plane(p.mesh.footprint(), ctx.config.tissue_separation, 0.085, 0.060,
                   ctx.config.tissue_nx, ctx.config.tissue_nz);
  const FieldResult field = near_field(driven, p.mesh, plane, f, ctx.config.threads);
  const SarResult sar = sar_from_field(field, tissue);
  ctx.stage("sar", t.ms());
  {
    auto os = ctx.open("sar_" + tissue.name + ".csv");
    write_sar_csv(os, sar);
  }
  {
    auto os = ctx.open("sar_summary.json");
    const Eigen::Vector3d loc = sar.peak_location();
    os << "{\n"
       << "  \"tissue\": \"" << tissue.name << "\",\n"
       << "  \"frequency_hz\": " << format_g17(f) << ",\n"
       << "  \"feed_edge\": " << feed << ",\n"
       << "  \"normalization\": \""
       << (ctx.config.power_norm == PowerNormalization::EqualVoltage ? "equal-voltage"
                                                                     : "equal-power")
       << "\",\n"
       << "  \"electrical_separation_lambda0\": "
       << format_g17(electrical_separation(ctx.config.tissue_separation, f)) << ",\n"
       << "  \"peak_W_per_kg\": " << format_g17(sar.peak) << ",\n"
       << "  \"peak_location_m\": [" << format_g17(loc.x()) << ", " << format_g17(loc.y()) << ", "
       << format_g17(loc.z()) << "],\n"
       << "  \"label\": \"incident-field approximation\"\n}\n";
  }
  std::cout << "sar: peak " << sar.peak << " W/kg on " << tissue.name << " at 1 V feed (edge "
            << feed << ")\n";
  ctx.finish();
  return 0;
}

int cmd_plan(RunContext& ctx) {
  const double f = ctx.config.frequencies.front();
  PlateSpec reference = ctx.config.geometry;
  reference.slot.reset();
  RunConfig ref_cfg = ctx.config;
  ref_cfg.geometry = reference;
  RunContext ref_ctx = ctx;
  ref_ctx.config = ref_cfg;
  Pipeline p = build_pipeline(ref_ctx, f);
  ctx.manifest.timings_ms = ref_ctx.manifest.timings_ms;

  PlanInput input;
  input.desired_mode = ctx.config.desired_mode;
  input.interferer_count = ctx.config.interferers;
  input.feed_volts = ctx.config.feed_volts;
  input.weighting = ctx.config.weighting;
  input.slot_length = ctx.config.slot_length;
  input.slot_width = ctx.config.slot_width;

  Timer t_plan;
  const PlanOutput plan = make_plan(p.modes, p.mesh, p.basis, input);
  ctx.stage("plan", t_plan.ms());

  Timer t_eval;
  EvaluateSettings es;
  es.frequency = f;
  es.target_edge = ctx.config.geometry.target_edge;
  const auto& feed_entry = p.basis.entries[plan.feed_edge];
  const Eigen::Vector3d mid =
      0.5 * (p.mesh.vertices[feed_entry.vert_a] + p.mesh.vertices[feed_entry.vert_b]);
  es.feed_position = Eigen::Vector2d(mid.x(), mid.y());
  es.feed_volts = ctx.config.feed_volts;
  es.desired_mode = ctx.config.desired_mode;
  es.target_mode = plan.ranking.front().mode_index;
  es.field_norm = ctx.config.field_norm;
  es.power_norm = ctx.config.power_norm;
  es.tissue = tissue_preset(ctx.config.tissue_name);
  es.line_offset = ctx.config.line_offset;
  es.line_height = ctx.config.line_height;
  es.line_samples = ctx.config.line_samples;
  es.tissue_separation = ctx.config.tissue_separation;
  es.tissue_nx = ctx.config.tissue_nx;
  es.tissue_nz = ctx.config.tissue_nz;
  es.threads = ctx.config.threads;
  const PlanComparison cmp = evaluate_plan(reference, plan.slot, f, es);
  ctx.stage("evaluate", t_eval.ms());

  {
    auto os = ctx.open("plan_report.json");
    os << "{\n  \"frequency_hz\": " << format_g17(f) << ",\n";
    os << "  \"feed_edge\": " << plan.feed_edge << ",\n";
    os << "  \"ranking\": [";
    for (std::size_t i = 0; i < plan.ranking.size(); ++i) {
      if (i) os << ", ";
      os << "{\"mode\": " << (plan.ranking[i].mode_index + 1)
         << ", \"alpha_mag\": " << format_g17(plan.ranking[i].alpha_mag)
         << ", \"negligible\": " << (plan.ranking[i].negligible ? "true" : "false") << "}";
    }
    os << "],\n";
    os << "  \"polarization_angle_rad\": " << format_g17(plan.polarization_angle) << ",\n";
    os << "  \"slot_mm\": {\"center\": [" << format_g17(plan.slot.center.x() * 1e3) << ", "
       << format_g17(plan.slot.center.y() * 1e3)
       << "], \"len_x\": " << format_g17(plan.slot.len_x * 1e3)
       << ", \"len_y\": " << format_g17(plan.slot.len_y * 1e3) << "},\n";
    os << "  \"normalization\": \""
       << (cmp.power_norm == PowerNormalization::EqualVoltage ? "equal-voltage" : "equal-power")
       << "\",\n";
    os << "  \"delta_ms_target\": " << format_g17(cmp.delta_ms_target) << ",\n";
    os << "  \"delta_db_desired\": [" << format_g17(cmp.delta_db_desired_x) << ", "
       << format_g17(cmp.delta_db_desired_y) << "],\n";
    os << "  \"delta_db_target\": [" << format_g17(cmp.delta_db_target_x) << ", "
       << format_g17(cmp.delta_db_target_y) << "],\n";
    os << "  \"sar_peak_ratio_ref_over_variant\": " << format_g17(cmp.sar_peak_ratio) << "\n}\n";
  }

  std::cout << "plan: slot " << plan.slot.len_x * 1e3 << " mm x " << plan.slot.len_y * 1e3
            << " mm at patch center (undesired polarization angle "
            << plan.polarization_angle * 180.0 / constants::pi << " deg)\n";
  std::cout << "  target-mode MS change: " << cmp.delta_ms_target
            << ", SAR peak ratio ref/variant: " << cmp.sar_peak_ratio << "\n";
  ctx.finish();
  return 0;
}

int cmd_reproduce(RunContext& ctx) {
  ScenarioSettings s;
  s.frequency = ctx.config.frequencies.front();
  s.target_edge = ctx.config.geometry.target_edge;
  s.line_offset = ctx.config.line_offset;
  s.line_height = ctx.config.line_height;
  s.line_samples = ctx.config.line_samples;
  s.tissue_separation = ctx.config.tissue_separation;
  s.tissue_nx = ctx.config.tissue_nx;
  s.tissue_nz = ctx.config.tissue_nz;
  s.field_norm = ctx.config.field_norm;
  s.threads = ctx.config.threads;
  s.output_dir = (ctx.out_dir / "scenarios").string();

  Timer t;
  const ScenarioSuite suite = run_canonical_scenarios(s);
  ctx.stage("scenarios", t.ms());

  auto verdict = [](bool ok) { return ok ? "pass" : "FAIL"; };
  std::cout << "reference : mode polarization roles .......... "
            << verdict(suite.ref_polarization_ok) << "\n";
  std::cout << "slot_x    : slot-mode end concentration ...... "
            << verdict(suite.xslot_concentration_ok) << " (fraction "
            << suite.slot_x.slot_end_fraction << ")\n";
  std::cout << "slot_x/y  : near-field trend ................. " << verdict(suite.nearfield_trend_ok)
            << " (dX+ " << suite.nf_delta_x_mode_xslot << " dB, dX- " << suite.nf_delta_x_mode_yslot
            << " dB, dY- " << suite.nf_delta_y_mode_xslot << " dB, dY+ "
            << suite.nf_delta_y_mode_yslot << " dB)\n";
  std::cout << "sar       : peak ratio ref/slot_x > 1 ........ " << verdict(suite.sar_trend_ok)
            << " (" << suite.sar_ratio_ref_over_xslot << ")\n";

  {
    auto os = ctx.open("scenario_summary.json");
    os << "{\n  \"frequency_hz\": " << format_g17(s.frequency) << ",\n";
    os << "  \"checks\": {\n";
    os << "    \"reference_polarization\": " << (suite.ref_polarization_ok ? "true" : "false")
       << ",\n";
    os << "    \"xslot_concentration\": " << (suite.xslot_concentration_ok ? "true" : "false")
       << ",\n";
    os << "    \"nearfield_trend\": " << (suite.nearfield_trend_ok ? "true" : "false") << ",\n";
    os << "    \"sar_trend\": " << (suite.sar_trend_ok ? "true" : "false") << "\n  },\n";
    os << "  \"slot_end_fraction\": " << format_g17(suite.slot_x.slot_end_fraction) << ",\n";
    os << "  \"sar_ratio_ref_over_xslot\": " << format_g17(suite.sar_ratio_ref_over_xslot)
       << ",\n";
    os << "  \"sar_ratio_ref_over_yslot\": " << format_g17(suite.sar_ratio_ref_over_yslot)
       << "\n}\n";
  }
  ctx.finish();
  return suite.all_ok() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic-mode analysis of slot-loaded rectangular plates"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  double freq_ghz = 0.0;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--freq-ghz", freq_ghz, "analysis frequency override, GHz");

  auto* c_mesh = app.add_subcommand("mesh", "build and export the plate mesh");
  auto* c_modes = app.add_subcommand("modes", "characteristic modes at one frequency");
  auto* c_sweep = app.add_subcommand("sweep", "frequency sweep with mode tracking");
  auto* c_nf = app.add_subcommand("nearfield", "modal near-field lines and plane");
  auto* c_sar = app.add_subcommand("sar", "driven SAR on the tissue plane");
  auto* c_plan = app.add_subcommand("plan", "slot-orientation procedure and evaluation");
  auto* c_repro = app.add_subcommand("reproduce", "canonical reference/slot scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    RunContext ctx = make_context(sub, config_path, out_dir, freq_ghz);
    if (app.got_subcommand(c_mesh)) return cmd_mesh(ctx);
    if (app.got_subcommand(c_modes)) return cmd_modes(ctx);
    if (app.got_subcommand(c_sweep)) return cmd_sweep(ctx);
    if (app.got_subcommand(c_nf)) return cmd_nearfield(ctx);
    if (app.got_subcommand(c_sar)) return cmd_sar(ctx);
    if (app.got_subcommand(c_plan)) return cmd_plan(ctx);
    if (app.got_subcommand(c_repro)) return cmd_reproduce(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
