#include "slotcma/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "slotcma/errors.hpp"
#include "slotcma/exports.hpp"

namespace slotcma {

using nlohmann::json;

namespace {

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

void reject_unknown_keys(const json& node, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : node.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

double require_number(const json& node, const std::string& key, const std::string& where) {
  if (!node.contains(key) || !node[key].is_number())
    throw ConfigError("config: " + where + " needs numeric '" + key + "'");
  return node[key].get<double>();
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
  auto slot_eq = [](const std::optional<SlotSpec>& a, const std::optional<SlotSpec>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->center == b->center && a->len_x == b->len_x && a->len_y == b->len_y;
  };
  auto pos_eq = [](const std::optional<Eigen::Vector2d>& a,
                   const std::optional<Eigen::Vector2d>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
  };
  return geometry.length_x == other.geometry.length_x &&
         geometry.width_y == other.geometry.width_y &&
         geometry.target_edge == other.geometry.target_edge &&
         slot_eq(geometry.slot, other.geometry.slot) && frequencies == other.frequencies &&
         feed_volts == other.feed_volts && feed_edge == other.feed_edge &&
         pos_eq(feed_position, other.feed_position) && line_offset == other.line_offset &&
         line_height == other.line_height && line_samples == other.line_samples &&
         plane_height == other.plane_height && plane_nx == other.plane_nx &&
         plane_ny == other.plane_ny && tissue_name == other.tissue_name &&
         tissue_separation == other.tissue_separation && tissue_nx == other.tissue_nx &&
         tissue_nz == other.tissue_nz && retained_modes == other.retained_modes &&
         field_norm == other.field_norm && desired_mode == other.desired_mode &&
         interferers == other.interferers && slot_length == other.slot_length &&
         slot_width == other.slot_width && weighting == other.weighting &&
         power_norm == other.power_norm && output_dir == other.output_dir &&
         threads == other.threads;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: parse error at line " + std::to_string(line_of_byte(text, e.byte)) +
                      ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown_keys(root,
                      {"geometry", "frequencies_ghz", "excitation", "observation", "tissue",
                       "modes", "planner", "power_normalization", "output_dir", "threads"},
                      "the top level");

  RunConfig c;

  if (root.contains("geometry")) {
    const json& g = root["geometry"];
    reject_unknown_keys(g, {"length_mm", "width_mm", "target_edge_mm", "slot"}, "geometry");
    c.geometry.length_x = require_number(g, "length_mm", "geometry") * 1e-3;
    c.geometry.width_y = require_number(g, "width_mm", "geometry") * 1e-3;
    c.geometry.target_edge = require_number(g, "target_edge_mm", "geometry") * 1e-3;
    c.geometry.slot.reset();
    if (g.contains("slot") && !g["slot"].is_null()) {
      const json& s = g["slot"];
      reject_unknown_keys(s, {"center_mm", "len_x_mm", "len_y_mm"}, "geometry.slot");
      SlotSpec slot;
      if (s.contains("center_mm")) {
        if (!s["center_mm"].is_array() || s["center_mm"].size() != 2)
          throw ConfigError("config: geometry.slot.center_mm must be [x, y]");
        slot.center = Eigen::Vector2d(s["center_mm"][0].get<double>() * 1e-3,
                                      s["center_mm"][1].get<double>() * 1e-3);
      }
      slot.len_x = require_number(s, "len_x_mm", "geometry.slot") * 1e-3;
      slot.len_y = require_number(s, "len_y_mm", "geometry.slot") * 1e-3;
      c.geometry.slot = slot;
    }
  }

  if (root.contains("frequencies_ghz")) {
    const json& f = root["frequencies_ghz"];
    if (!f.is_array() || f.empty())
      throw ConfigError("config: frequencies_ghz must be a nonempty array");
    c.frequencies.clear();
    for (const auto& v : f) {
      if (!v.is_number()) throw ConfigError("config: frequencies_ghz entries must be numbers");
      c.frequencies.push_back(v.get<double>() * 1e9);
    }
    for (std::size_t i = 1; i < c.frequencies.size(); ++i)
      if (c.frequencies[i] <= c.frequencies[i - 1])
        throw ConfigError("config: frequencies_ghz must be strictly increasing");
  }

  if (root.contains("excitation")) {
    const json& e = root["excitation"];
    reject_unknown_keys(e, {"volts", "edge", "position_mm"}, "excitation");
    if (e.contains("volts")) c.feed_volts = require_number(e, "volts", "excitation");
    if (e.contains("edge")) {
      if (!e["edge"].is_number_integer())
        throw ConfigError("config: excitation.edge must be an integer edge id");
      c.feed_edge = e["edge"].get<int>();
    }
    if (e.contains("position_mm")) {
      if (!e["position_mm"].is_array() || e["position_mm"].size() != 2)
        throw ConfigError("config: excitation.position_mm must be [x, y]");
      c.feed_position = Eigen::Vector2d(e["position_mm"][0].get<double>() * 1e-3,
                                        e["position_mm"][1].get<double>() * 1e-3);
    }
  }

  if (root.contains("observation")) {
    const json& o = root["observation"];
    reject_unknown_keys(o,
                        {"line_offset_mm", "line_height_mm", "line_samples", "plane_height_mm",
                         "plane_nx", "plane_ny"},
                        "observation");
    if (o.contains("line_offset_mm")) c.line_offset = o["line_offset_mm"].get<double>() * 1e-3;
    if (o.contains("line_height_mm")) c.line_height = o["line_height_mm"].get<double>() * 1e-3;
    if (o.contains("line_samples")) c.line_samples = o["line_samples"].get<int>();
    if (o.contains("plane_height_mm")) c.plane_height = o["plane_height_mm"].get<double>() * 1e-3;
    if (o.contains("plane_nx")) c.plane_nx = o["plane_nx"].get<int>();
    if (o.contains("plane_ny")) c.plane_ny = o["plane_ny"].get<int>();
  }

  if (root.contains("tissue")) {
    const json& t = root["tissue"];
    reject_unknown_keys(t, {"name", "separation_mm", "nx", "nz"}, "tissue");
    if (t.contains("name")) c.tissue_name = t["name"].get<std::string>();
    if (t.contains("separation_mm")) c.tissue_separation = t["separation_mm"].get<double>() * 1e-3;
    if (t.contains("nx")) c.tissue_nx = t["nx"].get<int>();
    if (t.contains("nz")) c.tissue_nz = t["nz"].get<int>();
  }

  if (root.contains("modes")) {
    const json& m = root["modes"];
    reject_unknown_keys(m, {"retained", "normalization"}, "modes");
    if (m.contains("retained")) c.retained_modes = m["retained"].get<int>();
    if (m.contains("normalization")) {
      const std::string norm = m["normalization"].get<std::string>();
      if (norm == "max")
        c.field_norm = CurrentNormalization::MaxAmplitude;
      else if (norm == "none")
        c.field_norm = CurrentNormalization::None;
      else
        throw ConfigError("config: modes.normalization must be 'max' or 'none'");
    }
  }

  if (root.contains("planner")) {
    const json& p = root["planner"];
    reject_unknown_keys(
        p, {"desired_mode", "interferers", "slot_length_mm", "slot_width_mm", "weighting"},
        "planner");
    if (p.contains("desired_mode")) {
      const int one_based = p["desired_mode"].get<int>();
      if (one_based < 1) throw ConfigError("config: planner.desired_mode is 1-based");
      c.desired_mode = one_based - 1;
    }
    if (p.contains("interferers")) c.interferers = p["interferers"].get<int>();
    if (p.contains("slot_length_mm")) c.slot_length = p["slot_length_mm"].get<double>() * 1e-3;
    if (p.contains("slot_width_mm")) c.slot_width = p["slot_width_mm"].get<double>() * 1e-3;
    if (p.contains("weighting")) {
      const std::string w = p["weighting"].get<std::string>();
      if (w == "magnitude")
        c.weighting = InterfererWeighting::Magnitude;
      else if (w == "complex")
        c.weighting = InterfererWeighting::Complex;
      else
        throw ConfigError("config: planner.weighting must be 'magnitude' or 'complex'");
    }
  }

  if (root.contains("power_normalization")) {
    const std::string p = root["power_normalization"].get<std::string>();
    if (p == "equal-voltage")
      c.power_norm = PowerNormalization::EqualVoltage;
    else if (p == "equal-power")
      c.power_norm = PowerNormalization::EqualAcceptedPower;
    else
      throw ConfigError("config: power_normalization must be 'equal-voltage' or 'equal-power'");
  }

  if (root.contains("output_dir")) c.output_dir = root["output_dir"].get<std::string>();
  if (root.contains("threads")) c.threads = root["threads"].get<unsigned>();

  if (c.line_samples < 2) throw ConfigError("config: observation.line_samples must be >= 2");
  if (c.interferers < 1) throw ConfigError("config: planner.interferers must be >= 1");
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json root;
  json g;
  g["length_mm"] = c.geometry.length_x * 1e3;
  g["width_mm"] = c.geometry.width_y * 1e3;
  g["target_edge_mm"] = c.geometry.target_edge * 1e3;
  if (c.geometry.slot) {
    json s;
    s["center_mm"] = {c.geometry.slot->center.x() * 1e3, c.geometry.slot->center.y() * 1e3};
    s["len_x_mm"] = c.geometry.slot->len_x * 1e3;
    s["len_y_mm"] = c.geometry.slot->len_y * 1e3;
    g["slot"] = s;
  }
  root["geometry"] = g;

  json freqs = json::array();
  for (double f : c.frequencies) freqs.push_back(f * 1e-9);
  root["frequencies_ghz"] = freqs;

  json e;
  e["volts"] = c.feed_volts;
  if (c.feed_edge) e["edge"] = *c.feed_edge;
  if (c.feed_position)
    e["position_mm"] = {c.feed_position->x() * 1e3, c.feed_position->y() * 1e3};
  root["excitation"] = e;

  root["observation"] = {{"line_offset_mm", c.line_offset * 1e3},
                         {"line_height_mm", c.line_height * 1e3},
                         {"line_samples", c.line_samples},
                         {"plane_height_mm", c.plane_height * 1e3},
                         {"plane_nx", c.plane_nx},
                         {"plane_ny", c.plane_ny}};
  root["tissue"] = {{"name", c.tissue_name},
                    {"separation_mm", c.tissue_separation * 1e3},
                    {"nx", c.tissue_nx},
                    {"nz", c.tissue_nz}};
  root["modes"] = {
      {"retained", c.retained_modes},
      {"normalization", c.field_norm == CurrentNormalization::MaxAmplitude ? "max" : "none"}};
  root["planner"] = {
      {"desired_mode", c.desired_mode + 1},
      {"interferers", c.interferers},
      {"slot_length_mm", c.slot_length * 1e3},
      {"slot_width_mm", c.slot_width * 1e3},
      {"weighting", c.weighting == InterfererWeighting::Magnitude ? "magnitude" : "complex"}};
  root["power_normalization"] =
      c.power_norm == PowerNormalization::EqualVoltage ? "equal-voltage" : "equal-power";
  root["output_dir"] = c.output_dir;
  root["threads"] = c.threads;
  return root.dump(2) + "\n";
}

}  // namespace slotcma
