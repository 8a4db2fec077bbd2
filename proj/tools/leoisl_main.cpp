// leoisl command line: scenario-driven snapshots, routing reports and the
// max-ISL delivery sweep. Exit status 0 on success, 1 for bad input, 2 for
// runtime failures.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "leoisl/csv.hpp"
#include "leoisl/ifc.hpp"
#include "leoisl/routing.hpp"
#include "leoisl/scenario.hpp"
#include "leoisl/topology.hpp"

namespace {

using namespace leoisl;

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario scenario_from(const std::string& path) {
  return path.empty() ? Scenario{} : load_scenario(path);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

// "1..8", "1,2,4" or "3".
std::vector<int> parse_isls(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || v < 0) throw BadInput("--isls: bad value '" + text + "'");
    return v;
  };
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (hi < lo) throw BadInput("--isls: empty range '" + text + "'");
    for (int k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_int(item));
  if (out.empty()) throw BadInput("--isls: empty list");
  return out;
}

std::vector<ifc::PlanMode> parse_modes(const std::string& text) {
  std::vector<ifc::PlanMode> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(ifc::plan_mode_from_string(item));
    } catch (const std::invalid_argument& e) {
      throw BadInput(std::string("--modes: ") + e.what());
    }
  }
  if (out.empty()) throw BadInput("--modes: empty list");
  return out;
}

TopologySnapshot snapshot_with_ground(const Scenario& sc, const TopologySettings& settings,
                                      double epoch) {
  auto ground = sc.ground_stations;
  ground.insert(ground.end(), sc.aircraft.begin(), sc.aircraft.end());
  const auto sats = build_satellite_topology(sc.constellation, settings, epoch, sc.links.isl_laser);
  return attach_ground_links(sats, ground, sc.links, settings.elevation_mask_deg);
}

const GroundNode& ground_node(const Scenario& sc, const std::string& id) {
  for (const auto& g : sc.ground_stations) {
    if (g.node_id == id) return g;
  }
  for (const auto& g : sc.aircraft) {
    if (g.node_id == id) return g;
  }
  throw BadInput("unknown ground node '" + id + "'");
}

std::vector<double> epoch_grid(const Scenario& sc, int count) {
  if (count < 1) throw BadInput("--epochs must be >= 1");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(i * sc.snapshot_duration_s);
  return out;
}

std::string states_csv(const ConstellationConfig& config, double epoch) {
  std::string out = "epoch_s,sat_id,plane,slot,x_km,y_km,z_km,vx_km_s,vy_km_s,vz_km_s\n";
  for (const auto& s : propagate(config, epoch)) {
    out += csv::row({csv::number(epoch), satellite_node_id(s.id), std::to_string(s.id.plane),
                     std::to_string(s.id.slot), csv::number(s.position_km.x()),
                     csv::number(s.position_km.y()), csv::number(s.position_km.z()),
                     csv::number(s.velocity_km_s.x()), csv::number(s.velocity_km_s.y()),
                     csv::number(s.velocity_km_s.z())});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LEO inter-satellite link network toolkit"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "Scenario YAML file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Write output here instead of stdout");
  };

  double epoch = 0.0;
  std::string mode_name;
  std::optional<int> max_isls;

  auto* propagate_cmd = app.add_subcommand("propagate", "Satellite states at an epoch (CSV)");
  common(propagate_cmd);
  propagate_cmd->add_option("--epoch", epoch, "Epoch in seconds");

  bool with_ground = false;
  auto* topology_cmd = app.add_subcommand("topology", "Edge list of one snapshot (CSV)");
  common(topology_cmd);
  topology_cmd->add_option("--epoch", epoch, "Epoch in seconds");
  topology_cmd->add_option("--mode", mode_name, "grid | dynamic")->check(CLI::IsMember({"grid", "dynamic"}));
  topology_cmd->add_option("--max-isls", max_isls, "ISL limit per satellite (dynamic mode)");
  topology_cmd->add_flag("--with-ground", with_ground, "Also list ground and air links");

  std::string src_id;
  std::string dst_id;
  std::string metric_name = "distance";
  auto* route_cmd = app.add_subcommand("route", "Path between two nodes");
  common(route_cmd);
  route_cmd->add_option("--src", src_id, "Source node id")->required();
  route_cmd->add_option("--dst", dst_id, "Destination node id")->required();
  route_cmd->add_option("--metric", metric_name, "distance | hops")->check(CLI::IsMember({"distance", "hops"}));
  route_cmd->add_option("--epoch", epoch, "Epoch in seconds");
  route_cmd->add_option("--mode", mode_name, "grid | dynamic")->check(CLI::IsMember({"grid", "dynamic"}));
  route_cmd->add_option("--max-isls", max_isls, "ISL limit per satellite (dynamic mode)");

  std::string pairs_file;
  int epochs = 10;
  auto* hops_cmd = app.add_subcommand("hops", "Hop statistics for ground pairs (CSV)");
  common(hops_cmd);
  hops_cmd->add_option("--pairs", pairs_file, "File of 'src_id,dst_id' lines")->required()->check(CLI::ExistingFile);
  hops_cmd->add_option("--epochs", epochs, "Number of epochs, spaced by snapshot_duration_s");
  hops_cmd->add_option("--mode", mode_name, "grid | dynamic")->check(CLI::IsMember({"grid", "dynamic"}));
  hops_cmd->add_option("--max-isls", max_isls, "ISL limit per satellite (dynamic mode)");

  int sample_pairs = 200;
  std::uint64_t seed = 1;
  auto* sdp_cmd = app.add_subcommand("sdp-mhp", "Share of shortest-distance paths that are minimum-hop");
  common(sdp_cmd);
  sdp_cmd->add_option("--pairs", sample_pairs, "Satellite pairs sampled per epoch")->check(CLI::PositiveNumber);
  sdp_cmd->add_option("--seed", seed, "Sampling seed");
  sdp_cmd->add_option("--epochs", epochs, "Number of epochs, spaced by snapshot_duration_s");
  sdp_cmd->add_option("--mode", mode_name, "grid | dynamic")->check(CLI::IsMember({"grid", "dynamic"}));
  sdp_cmd->add_option("--max-isls", max_isls, "ISL limit per satellite (dynamic mode)");

  std::string isls_text = "1..8";
  std::string modes_text = "optimized,greedy,equal,full";
  std::optional<int> seed_count;
  bool summary = false;
  auto* sweep_cmd = app.add_subcommand("ifc-sweep", "Average delivery delay versus the ISL limit (CSV)");
  common(sweep_cmd);
  sweep_cmd->add_option("--isls", isls_text, "ISL limits: 'a..b' or a comma list");
  sweep_cmd->add_option("--modes", modes_text, "Comma list of optimized, greedy, equal, full");
  sweep_cmd->add_option("--seeds", seed_count, "Use seeds 1..N instead of the scenario's list")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--summary", summary, "Mean delay per (max_isls, mode) instead of raw rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const Scenario sc = scenario_from(scenario_path);
    TopologySettings settings = sc.topology;
    if (!mode_name.empty()) settings.mode = topology_mode_from_string(mode_name);
    if (max_isls) settings.max_isls = *max_isls;
    try {
      settings.validate();
    } catch (const std::invalid_argument& e) {
      throw BadInput(e.what());
    }

    if (*propagate_cmd) {
      emit(states_csv(sc.constellation, epoch), out_path);
    } else if (*topology_cmd) {
      const auto snap = with_ground ? snapshot_with_ground(sc, settings, epoch)
                                    : build_satellite_topology(sc.constellation, settings, epoch,
                                                               sc.links.isl_laser);
      emit(edges_to_csv(snap), out_path);
    } else if (*route_cmd) {
      const auto snap = snapshot_with_ground(sc, settings, epoch);
      const auto src = snap.find_node(src_id);
      const auto dst = snap.find_node(dst_id);
      if (!src) throw BadInput("unknown node '" + src_id + "'");
      if (!dst) throw BadInput("unknown node '" + dst_id + "'");
      const Graph graph(snap);
      const auto metric = metric_name == "hops" ? RouteMetric::hops : RouteMetric::distance;
      const auto path = find_path(graph, *src, *dst, metric);
      std::string out = "metric,src,dst,found,hops,distance_km,delay_s,bottleneck_bps,path\n";
      if (!path) {
        out += csv::row({metric_name, csv::field(src_id), csv::field(dst_id), "false", "", "", "", "", ""});
      } else {
        std::string nodes;
        for (std::size_t i = 0; i < path->nodes.size(); ++i) {
          if (i) nodes += ' ';
          nodes += snap.nodes()[static_cast<std::size_t>(path->nodes[i])].id;
        }
        out += csv::row({metric_name, csv::field(src_id), csv::field(dst_id), "true",
                         std::to_string(path->hop_count), csv::number(path->total_distance_km),
                         csv::number(path->total_propagation_delay_s),
                         csv::number(path->bottleneck_capacity_bps), csv::field(nodes)});
      }
      emit(out, out_path);
    } else if (*hops_cmd) {
      std::ifstream in(pairs_file);
      std::vector<std::pair<GroundNode, GroundNode>> pairs;
      int line_no = 0;
      for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
          throw BadInput(fmt::format("{}:{}: expected 'src_id,dst_id'", pairs_file, line_no));
        const auto a = line.substr(0, comma);
        const auto b = line.substr(comma + 1);
        if (line_no == 1 && a == "src" && b == "dst") continue;
        pairs.emplace_back(ground_node(sc, a), ground_node(sc, b));
      }
      const auto grid = epoch_grid(sc, epochs);
      const auto stats = ground_pair_hop_stats(sc.constellation, pairs, grid, settings);
      emit(hop_stats_to_csv(stats), out_path);
      if (stats.skipped_samples > 0)
        std::cerr << stats.skipped_samples << " (pair, epoch) samples had no reachable association\n";
    } else if (*sdp_cmd) {
      const auto grid = epoch_grid(sc, epochs);
      const auto r = sdp_mhp_fraction(sc.constellation, settings, sample_pairs, grid, seed);
      std::string out = "fraction,matched,sampled,disconnected\n";
      out += csv::row({csv::number(r.fraction), std::to_string(r.matched), std::to_string(r.sampled),
                       std::to_string(r.disconnected)});
      emit(out, out_path);
    } else if (*sweep_cmd) {
      const auto isls = parse_isls(isls_text);
      const auto modes = parse_modes(modes_text);
      std::vector<std::uint64_t> seeds = sc.seeds;
      if (seed_count) {
        seeds.clear();
        for (int i = 1; i <= *seed_count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
      }
      const auto rows = ifc::sweep_max_isls(sc.slot_inputs(), isls, modes, sc.ifc.epochs_s, seeds);
      if (summary) {
        std::string out = "max_isls,mode,mean_avg_delay_s\n";
        for (const auto& s : ifc::summarize(rows)) {
          out += csv::row({std::to_string(s.max_isls), std::string(ifc::to_string(s.mode)),
                           csv::number(s.mean_avg_delay_s)});
        }
        emit(out, out_path);
      } else {
        emit(ifc::sweep_to_csv(rows), out_path);
      }
    }
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const BadInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
