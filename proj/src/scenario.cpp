#include "leoisl/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace leoisl {

std::vector<GroundNode> default_ground_stations() {
  return {make_ground_station("gs-london", 51.5074, -0.1278),
          make_ground_station("gs-madrid", 40.4168, -3.7038),
          make_ground_station("gs-rome", 41.9028, 12.4964),
          make_ground_station("gs-reykjavik", 64.1466, -21.9426),
          make_ground_station("gs-gander", 48.9569, -54.6089)};
}

std::vector<GroundNode> default_aircraft() {
  constexpr double alt = 10.7;
  constexpr double speed = 0.23;
  return {make_aircraft("ac-01", 52.0, -10.0, 280.0, speed, alt),
          make_aircraft("ac-02", 48.5, 2.0, 150.0, speed, alt),
          make_aircraft("ac-03", 45.0, 10.0, 90.0, speed, alt),
          make_aircraft("ac-04", 50.0, 8.5, 60.0, speed, alt),
          make_aircraft("ac-05", 41.0, -5.0, 40.0, speed, alt),
          make_aircraft("ac-06", 55.0, 0.0, 330.0, speed, alt),
          make_aircraft("ac-07", 60.0, -20.0, 270.0, speed, alt),
          make_aircraft("ac-08", 52.5, 13.4, 200.0, speed, alt),
          make_aircraft("ac-09", 43.0, 20.0, 300.0, speed, alt),
          make_aircraft("ac-10", 38.0, 0.0, 20.0, speed, alt)};
}

namespace {

struct Located : std::invalid_argument {
  Located(std::string f, const std::string& why) : std::invalid_argument(why), field(std::move(f)) {}
  std::string field;
};

void check_nodes(const std::vector<GroundNode>& nodes, const std::string& section, GroundKind kind,
                 std::set<std::string>& ids) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto prefix = fmt::format("{}[{}]", section, i);
    if (nodes[i].kind != kind) throw Located(prefix + ".kind", "wrong node kind for this list");
    try {
      nodes[i].validate();
    } catch (const std::invalid_argument& e) {
      std::string msg = e.what();
      const auto colon = msg.find(": ");
      std::string field = colon == std::string::npos ? "" : msg.substr(0, colon);
      if (field == "node_id") field = "id";
      throw Located(prefix + (field.empty() ? "" : "." + field),
                    colon == std::string::npos ? msg : msg.substr(colon + 2));
    }
    if (!ids.insert(nodes[i].node_id).second)
      throw Located(prefix + ".id", "duplicate node id '" + nodes[i].node_id + "'");
  }
}

template <class F>
void in_section(const std::string& section, F&& f) {
  try {
    f();
  } catch (const Located&) {
    throw;
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon == std::string::npos) throw Located(section, msg);
    throw Located(section + "." + msg.substr(0, colon), msg.substr(colon + 2));
  }
}

constexpr LinkClass kClasses[] = {LinkClass::sat_to_air, LinkClass::ground_to_air,
                                  LinkClass::ground_to_sat, LinkClass::isl_laser};

void validate_located(const Scenario& s) {
  in_section("constellation", [&] { s.constellation.validate(); });
  std::set<std::string> ids;
  check_nodes(s.ground_stations, "ground_stations", GroundKind::ground_station, ids);
  check_nodes(s.aircraft, "aircraft", GroundKind::aircraft, ids);
  for (auto cls : kClasses) {
    const std::string section = "link_params." + std::string(to_string(cls));
    if (s.links[cls].link_class != cls) throw Located(section, "link class mismatch");
    in_section(section, [&] { s.links[cls].validate(); });
  }
  in_section("topology", [&] { s.topology.validate(); });
  in_section("ifc", [&] { s.ifc.validate(); });
  if (!(s.snapshot_duration_s > 0.0)) throw Located("snapshot_duration_s", "must be > 0");
  if (s.seeds.empty()) throw Located("seeds", "needs at least one seed");
}

// --- YAML reading -----------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& why) const {
    throw ScenarioError(source_, line_of(node), field, why);
  }

  static int line_of(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.line >= 0 ? mark.line + 1 : 0;
  }

  void expect_map(const YAML::Node& node, const std::string& field,
                  std::initializer_list<std::string_view> allowed) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(kv.first, join(field, key), "unknown field");
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a scalar value");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "cannot convert '" + node.Scalar() + "'");
    }
  }

  template <class T>
  void read(const YAML::Node& map, std::string_view key, const std::string& section, T& out) {
    const YAML::Node v = map[std::string(key)];
    if (!v) return;
    const auto field = join(section, key);
    out = scalar<T>(v, field);
    lines_[field] = line_of(v);
  }

  void remember(const std::string& field, const YAML::Node& node) { lines_[field] = line_of(node); }

  int line_for(const std::string& field) const {
    // Fall back to the closest enclosing section that was seen.
    std::string f = field;
    while (true) {
      if (auto it = lines_.find(f); it != lines_.end()) return it->second;
      const auto cut = f.find_last_of(".[");
      if (cut == std::string::npos) return 0;
      f = f.substr(0, cut);
    }
  }

  const std::string& source() const { return source_; }

  static std::string join(const std::string& section, std::string_view key) {
    return section.empty() ? std::string(key) : section + "." + std::string(key);
  }

 private:
  std::string source_;
  std::map<std::string, int> lines_;
};

void read_constellation(Reader& rd, const YAML::Node& n, ConstellationConfig& c) {
  rd.expect_map(n, "constellation",
                {"num_planes", "sats_per_plane", "altitude_km", "inclination_deg", "phasing_factor",
                 "raan_spread_deg"});
  rd.read(n, "num_planes", "constellation", c.num_planes);
  rd.read(n, "sats_per_plane", "constellation", c.sats_per_plane);
  rd.read(n, "altitude_km", "constellation", c.altitude_km);
  rd.read(n, "inclination_deg", "constellation", c.inclination_deg);
  rd.read(n, "phasing_factor", "constellation", c.phasing_factor);
  rd.read(n, "raan_spread_deg", "constellation", c.raan_spread_deg);
}

std::vector<GroundNode> read_nodes(Reader& rd, const YAML::Node& n, const std::string& section,
                                   GroundKind kind) {
  if (!n.IsSequence()) rd.fail(n, section, "expected a list");
  std::vector<GroundNode> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto item = n[i];
    const auto prefix = fmt::format("{}[{}]", section, i);
    rd.remember(prefix, item);
    if (kind == GroundKind::aircraft) {
      rd.expect_map(item, prefix,
                    {"id", "latitude_deg", "longitude_deg", "altitude_km", "heading_deg", "speed_km_s"});
    } else {
      rd.expect_map(item, prefix, {"id", "latitude_deg", "longitude_deg", "altitude_km"});
    }
    GroundNode g;
    g.kind = kind;
    if (!item["id"]) rd.fail(item, prefix + ".id", "missing required field");
    if (!item["latitude_deg"]) rd.fail(item, prefix + ".latitude_deg", "missing required field");
    if (!item["longitude_deg"]) rd.fail(item, prefix + ".longitude_deg", "missing required field");
    if (kind == GroundKind::aircraft) {
      g.altitude_km = 10.7;
      g.speed_km_s = 0.23;
    }
    rd.read(item, "id", prefix, g.node_id);
    rd.read(item, "latitude_deg", prefix, g.latitude_deg);
    rd.read(item, "longitude_deg", prefix, g.longitude_deg);
    rd.read(item, "altitude_km", prefix, g.altitude_km);
    if (kind == GroundKind::aircraft) {
      rd.read(item, "heading_deg", prefix, g.heading_deg);
      rd.read(item, "speed_km_s", prefix, g.speed_km_s);
    }
    out.push_back(std::move(g));
  }
  return out;
}

void read_links(Reader& rd, const YAML::Node& n, LinkBudgetSet& links) {
  rd.expect_map(n, "link_params", {"sat_to_air", "ground_to_air", "ground_to_sat", "isl_laser"});
  for (auto cls : kClasses) {
    const std::string name(to_string(cls));
    const YAML::Node block = n[name];
    if (!block) continue;
    const std::string section = "link_params." + name;
    rd.remember(section, block);
    rd.expect_map(block, section,
                  {"tx_power_w", "tx_gain_db", "rx_gain_db", "carrier_hz", "bandwidth_hz",
                   "noise_temperature_k", "lisl_fixed_rate_bps"});
    auto& p = links[cls];
    rd.read(block, "tx_power_w", section, p.tx_power_w);
    rd.read(block, "tx_gain_db", section, p.tx_gain_db);
    rd.read(block, "rx_gain_db", section, p.rx_gain_db);
    rd.read(block, "carrier_hz", section, p.carrier_hz);
    rd.read(block, "bandwidth_hz", section, p.bandwidth_hz);
    rd.read(block, "noise_temperature_k", section, p.noise_temperature_k);
    rd.read(block, "lisl_fixed_rate_bps", section, p.lisl_fixed_rate_bps);
  }
}

template <class T, class Parse>
void read_enum(Reader& rd, const YAML::Node& map, std::string_view key, const std::string& section,
               T& out, Parse parse) {
  std::string text;
  rd.read(map, key, section, text);
  if (text.empty()) return;
  try {
    out = parse(text);
  } catch (const std::invalid_argument& e) {
    rd.fail(map[std::string(key)], Reader::join(section, key), e.what());
  }
}

void read_topology(Reader& rd, const YAML::Node& n, TopologySettings& t) {
  rd.expect_map(n, "topology",
                {"mode", "max_isls", "max_range_km", "grazing_altitude_km", "elevation_mask_deg",
                 "link_policy"});
  read_enum(rd, n, "mode", "topology", t.mode, topology_mode_from_string);
  rd.read(n, "max_isls", "topology", t.max_isls);
  rd.read(n, "max_range_km", "topology", t.max_range_km);
  rd.read(n, "grazing_altitude_km", "topology", t.grazing_altitude_km);
  rd.read(n, "elevation_mask_deg", "topology", t.elevation_mask_deg);
  read_enum(rd, n, "link_policy", "topology", t.policy, link_policy_from_string);
}

void read_ifc(Reader& rd, const YAML::Node& n, ifc::IfcSettings& s) {
  rd.expect_map(n, "ifc",
                {"cache_fraction", "hit_probability", "request_probability", "packet_bits",
                 "class_ranges", "delay_model", "cached_gs_fallback", "local_search_max_iterations",
                 "exhaustive_candidate_limit", "sweep_max_isls", "epochs_s"});
  rd.read(n, "cache_fraction", "ifc", s.cache_fraction);
  rd.read(n, "hit_probability", "ifc", s.hit_probability);
  rd.read(n, "request_probability", "ifc", s.request_probability);
  rd.read(n, "packet_bits", "ifc", s.packet_bits);
  if (const YAML::Node ranges = n["class_ranges"]) {
    rd.remember("ifc.class_ranges", ranges);
    if (!ranges.IsSequence() || ranges.size() != s.class_ranges.size())
      rd.fail(ranges, "ifc.class_ranges", "expected a list of 4 [low, high] pairs");
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const auto pair = ranges[i];
      const auto field = fmt::format("ifc.class_ranges[{}]", i);
      if (!pair.IsSequence() || pair.size() != 2) rd.fail(pair, field, "expected [low, high]");
      s.class_ranges[i] = {rd.scalar<int>(pair[0], field), rd.scalar<int>(pair[1], field)};
    }
  }
  read_enum(rd, n, "delay_model", "ifc", s.delay_model, delay_model_from_string);
  rd.read(n, "cached_gs_fallback", "ifc", s.cached_gs_fallback);
  rd.read(n, "local_search_max_iterations", "ifc", s.local_search_max_iterations);
  rd.read(n, "exhaustive_candidate_limit", "ifc", s.exhaustive_candidate_limit);
  rd.read(n, "sweep_max_isls", "ifc", s.sweep_max_isls);
  if (const YAML::Node epochs = n["epochs_s"]) {
    rd.remember("ifc.epochs_s", epochs);
    if (!epochs.IsSequence()) rd.fail(epochs, "ifc.epochs_s", "expected a list");
    s.epochs_s.clear();
    for (std::size_t i = 0; i < epochs.size(); ++i) {
      s.epochs_s.push_back(rd.scalar<double>(epochs[i], fmt::format("ifc.epochs_s[{}]", i)));
    }
  }
}

}  // namespace

ScenarioError::ScenarioError(std::string source, int line, std::string field, const std::string& message)
    : std::runtime_error(fmt::format("{}:{}: {}: {}", source, line, field, message)),
      source_(std::move(source)),
      line_(line),
      field_(std::move(field)) {}

void Scenario::validate() const {
  try {
    validate_located(*this);
  } catch (const Located& e) {
    throw std::invalid_argument(e.field + ": " + e.what());
  }
}

ifc::SlotInputs Scenario::slot_inputs() const {
  return {constellation, ground_stations, aircraft, links, topology, ifc};
}

Scenario parse_scenario(std::string_view text, std::string_view source) {
  Reader rd{std::string(source)};
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(rd.source(), e.mark.line + 1, "<document>", e.msg);
  }
  Scenario s;
  if (!root || root.IsNull()) {
    s.validate();
    return s;
  }
  rd.expect_map(root, "",
                {"constellation", "ground_stations", "aircraft", "link_params", "topology", "ifc",
                 "snapshot_duration_s", "seeds"});
  if (const YAML::Node n = root["constellation"]) {
    rd.remember("constellation", n);
    read_constellation(rd, n, s.constellation);
  }
  if (const YAML::Node n = root["ground_stations"]) {
    rd.remember("ground_stations", n);
    s.ground_stations = read_nodes(rd, n, "ground_stations", GroundKind::ground_station);
  }
  if (const YAML::Node n = root["aircraft"]) {
    rd.remember("aircraft", n);
    s.aircraft = read_nodes(rd, n, "aircraft", GroundKind::aircraft);
  }
  if (const YAML::Node n = root["link_params"]) {
    rd.remember("link_params", n);
    read_links(rd, n, s.links);
  }
  if (const YAML::Node n = root["topology"]) {
    rd.remember("topology", n);
    read_topology(rd, n, s.topology);
  }
  if (const YAML::Node n = root["ifc"]) {
    rd.remember("ifc", n);
    read_ifc(rd, n, s.ifc);
  }
  rd.read(root, "snapshot_duration_s", "", s.snapshot_duration_s);
  if (const YAML::Node n = root["seeds"]) {
    rd.remember("seeds", n);
    if (!n.IsSequence()) rd.fail(n, "seeds", "expected a list of integers");
    s.seeds.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      s.seeds.push_back(rd.scalar<std::uint64_t>(n[i], fmt::format("seeds[{}]", i)));
    }
  }
  try {
    validate_located(s);
  } catch (const Located& e) {
    throw ScenarioError(rd.source(), rd.line_for(e.field), e.field, e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, 0, "<file>", "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

namespace {

std::string num(double v) { return fmt::format("{}", v); }

void emit_node(YAML::Emitter& out, const GroundNode& g) {
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << g.node_id;
  out << YAML::Key << "latitude_deg" << YAML::Value << num(g.latitude_deg);
  out << YAML::Key << "longitude_deg" << YAML::Value << num(g.longitude_deg);
  out << YAML::Key << "altitude_km" << YAML::Value << num(g.altitude_km);
  if (g.kind == GroundKind::aircraft) {
    out << YAML::Key << "heading_deg" << YAML::Value << num(g.heading_deg);
    out << YAML::Key << "speed_km_s" << YAML::Value << num(g.speed_km_s);
  }
  out << YAML::EndMap;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  const auto& c = s.constellation;
  out << YAML::Key << "constellation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "num_planes" << YAML::Value << c.num_planes;
  out << YAML::Key << "sats_per_plane" << YAML::Value << c.sats_per_plane;
  out << YAML::Key << "altitude_km" << YAML::Value << num(c.altitude_km);
  out << YAML::Key << "inclination_deg" << YAML::Value << num(c.inclination_deg);
  out << YAML::Key << "phasing_factor" << YAML::Value << c.phasing_factor;
  out << YAML::Key << "raan_spread_deg" << YAML::Value << num(c.raan_spread_deg);
  out << YAML::EndMap;

  out << YAML::Key << "ground_stations" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : s.ground_stations) emit_node(out, g);
  out << YAML::EndSeq;
  out << YAML::Key << "aircraft" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : s.aircraft) emit_node(out, g);
  out << YAML::EndSeq;

  out << YAML::Key << "link_params" << YAML::Value << YAML::BeginMap;
  for (auto cls : kClasses) {
    const auto& p = s.links[cls];
    out << YAML::Key << std::string(to_string(cls)) << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "tx_power_w" << YAML::Value << num(p.tx_power_w);
    out << YAML::Key << "tx_gain_db" << YAML::Value << num(p.tx_gain_db);
    out << YAML::Key << "rx_gain_db" << YAML::Value << num(p.rx_gain_db);
    out << YAML::Key << "carrier_hz" << YAML::Value << num(p.carrier_hz);
    out << YAML::Key << "bandwidth_hz" << YAML::Value << num(p.bandwidth_hz);
    out << YAML::Key << "noise_temperature_k" << YAML::Value << num(p.noise_temperature_k);
    out << YAML::Key << "lisl_fixed_rate_bps" << YAML::Value << num(p.lisl_fixed_rate_bps);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  const auto& t = s.topology;
  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(t.mode));
  out << YAML::Key << "max_isls" << YAML::Value << t.max_isls;
  out << YAML::Key << "max_range_km" << YAML::Value << num(t.max_range_km);
  out << YAML::Key << "grazing_altitude_km" << YAML::Value << num(t.grazing_altitude_km);
  out << YAML::Key << "elevation_mask_deg" << YAML::Value << num(t.elevation_mask_deg);
  out << YAML::Key << "link_policy" << YAML::Value << std::string(to_string(t.policy));
  out << YAML::EndMap;

  const auto& f = s.ifc;
  out << YAML::Key << "ifc" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cache_fraction" << YAML::Value << num(f.cache_fraction);
  out << YAML::Key << "hit_probability" << YAML::Value << num(f.hit_probability);
  out << YAML::Key << "request_probability" << YAML::Value << num(f.request_probability);
  out << YAML::Key << "packet_bits" << YAML::Value << f.packet_bits;
  out << YAML::Key << "class_ranges" << YAML::Value << YAML::BeginSeq;
  for (const auto& [lo, hi] : f.class_ranges) {
    out << YAML::Flow << YAML::BeginSeq << lo << hi << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "delay_model" << YAML::Value << std::string(to_string(f.delay_model));
  out << YAML::Key << "cached_gs_fallback" << YAML::Value << f.cached_gs_fallback;
  out << YAML::Key << "local_search_max_iterations" << YAML::Value << f.local_search_max_iterations;
  out << YAML::Key << "exhaustive_candidate_limit" << YAML::Value << f.exhaustive_candidate_limit;
  out << YAML::Key << "sweep_max_isls" << YAML::Value << f.sweep_max_isls;
  out << YAML::Key << "epochs_s" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double e : f.epochs_s) out << num(e);
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "snapshot_duration_s" << YAML::Value << num(s.snapshot_duration_s);
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto seed : s.seeds) out << seed;
  out << YAML::EndSeq;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace leoisl
