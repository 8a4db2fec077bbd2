#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "leoisl/ifc.hpp"
#include "leoisl/link_budget.hpp"
#include "leoisl/orbital.hpp"
#include "leoisl/routing.hpp"
#include "leoisl/scenario.hpp"
#include "leoisl/topology.hpp"
#include "leoisl/waterfill.hpp"

namespace py = pybind11;
using namespace leoisl;

namespace {

py::array_t<double> to_array(const std::vector<SatelliteState>& states, bool velocity) {
  py::array_t<double> out({static_cast<py::ssize_t>(states.size()), py::ssize_t{3}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Vec3& x = velocity ? states[i].velocity_km_s : states[i].position_km;
    for (int k = 0; k < 3; ++k) v(static_cast<py::ssize_t>(i), k) = x[k];
  }
  return out;
}

int node_index(const TopologySnapshot& snap, const std::string& id) {
  const auto i = snap.find_node(id);
  if (!i) throw py::key_error("unknown node '" + id + "'");
  return *i;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "LEO constellation, ISL topology and in-flight content delivery models";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::class_<ConstellationConfig>(m, "ConstellationConfig")
      .def(py::init([](int planes, int per_plane, double alt, double inc, int phasing, double spread) {
             ConstellationConfig c{planes, per_plane, alt, inc, phasing, spread};
             c.validate();
             return c;
           }),
           py::arg("num_planes") = 6, py::arg("sats_per_plane") = 20, py::arg("altitude_km") = 1000.0,
           py::arg("inclination_deg") = 53.0, py::arg("phasing_factor") = 1, py::arg("raan_spread_deg") = 360.0)
      .def_readwrite("num_planes", &ConstellationConfig::num_planes)
      .def_readwrite("sats_per_plane", &ConstellationConfig::sats_per_plane)
      .def_readwrite("altitude_km", &ConstellationConfig::altitude_km)
      .def_readwrite("inclination_deg", &ConstellationConfig::inclination_deg)
      .def_readwrite("phasing_factor", &ConstellationConfig::phasing_factor)
      .def_readwrite("raan_spread_deg", &ConstellationConfig::raan_spread_deg)
      .def_property_readonly("size", &ConstellationConfig::size)
      .def_property_readonly("period_s", &ConstellationConfig::period_s)
      .def("validate", &ConstellationConfig::validate);

  py::class_<TopologySettings>(m, "TopologySettings")
      .def(py::init([](const std::string& mode, int max_isls, double range, const std::string& policy) {
             TopologySettings t;
             t.mode = topology_mode_from_string(mode);
             t.max_isls = max_isls;
             t.max_range_km = range;
             t.policy = link_policy_from_string(policy);
             t.validate();
             return t;
           }),
           py::arg("mode") = "dynamic", py::arg("max_isls") = 4, py::arg("max_range_km") = 5000.0,
           py::arg("policy") = "nearest_first")
      .def_property(
          "mode", [](const TopologySettings& t) { return std::string(to_string(t.mode)); },
          [](TopologySettings& t, const std::string& s) { t.mode = topology_mode_from_string(s); })
      .def_readwrite("max_isls", &TopologySettings::max_isls)
      .def_readwrite("max_range_km", &TopologySettings::max_range_km)
      .def_property(
          "policy", [](const TopologySettings& t) { return std::string(to_string(t.policy)); },
          [](TopologySettings& t, const std::string& s) { t.policy = link_policy_from_string(s); });

  m.def(
      "propagate",
      [](const ConstellationConfig& cfg, double epoch_s) {
        const auto st = propagate(cfg, epoch_s);
        std::vector<std::string> ids;
        for (const auto& s : st) ids.push_back(satellite_node_id(s.id));
        return py::make_tuple(ids, to_array(st, false), to_array(st, true));
      },
      py::arg("config"), py::arg("epoch_s") = 0.0,
      "Satellite ids plus (N, 3) position [km] and velocity [km/s] arrays.");

  m.def("fspl_db", &fspl_db, py::arg("distance_km"), py::arg("carrier_hz"));
  m.def("propagation_delay_s", &propagation_delay_s, py::arg("distance_km"));
  m.def(
      "capacity_bps",
      [](const std::string& cls, double d, double share) {
        return capacity_bps(LinkBudgetParams::defaults(link_class_from_string(cls)), d, share);
      },
      py::arg("link_class"), py::arg("distance_km"), py::arg("bandwidth_share") = 1.0,
      "Capacity with the default parameters of a link class.");

  m.def(
      "optimal_ratio_delay",
      [](const std::vector<std::pair<double, double>>& sources, double bits) {
        std::vector<RatioSource> src;
        for (const auto& [p, r] : sources) src.push_back({p, r});
        const auto sol = optimal_ratio_delay(src, bits);
        return py::make_tuple(sol.delay_s, sol.ratios);
      },
      py::arg("sources"), py::arg("bits"), "sources: [(prop_s, rate_bps)]; returns (delay_s, ratios).");

  py::class_<TopologySnapshot>(m, "TopologySnapshot")
      .def_property_readonly("epoch_s", &TopologySnapshot::epoch_s)
      .def_property_readonly("node_ids",
                             [](const TopologySnapshot& s) {
                               std::vector<std::string> ids;
                               for (const auto& n : s.nodes()) ids.push_back(n.id);
                               return ids;
                             })
      .def_property_readonly("edges",
                             [](const TopologySnapshot& s) {
                               py::list out;
                               for (const auto& e : s.edges()) {
                                 out.append(py::make_tuple(s.nodes()[static_cast<std::size_t>(e.a)].id,
                                                           s.nodes()[static_cast<std::size_t>(e.b)].id,
                                                           std::string(to_string(e.link_class)), e.distance_km,
                                                           e.capacity_bps, e.delay_s));
                               }
                               return out;
                             })
      .def("isl_degree", [](const TopologySnapshot& s, const std::string& id) {
        return s.isl_degree(node_index(s, id));
      })
      .def("to_csv", [](const TopologySnapshot& s) { return edges_to_csv(s); });

  m.def(
      "route",
      [](const TopologySnapshot& snap, const std::string& src, const std::string& dst,
         const std::string& metric) -> py::object {
        if (metric != "hops" && metric != "distance") throw py::value_error("metric must be distance or hops");
        const Graph g(snap);
        const auto p = find_path(g, node_index(snap, src), node_index(snap, dst),
                                 metric == "hops" ? RouteMetric::hops : RouteMetric::distance);
        if (!p) return py::none();
        py::dict d;
        std::vector<std::string> nodes;
        for (int i : p->nodes) nodes.push_back(snap.nodes()[static_cast<std::size_t>(i)].id);
        d["nodes"] = nodes;
        d["hops"] = p->hop_count;
        d["distance_km"] = p->total_distance_km;
        d["delay_s"] = p->total_propagation_delay_s;
        d["bottleneck_bps"] = p->bottleneck_capacity_bps;
        return d;
      },
      py::arg("snapshot"), py::arg("src"), py::arg("dst"), py::arg("metric") = "distance");

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("constellation", &Scenario::constellation)
      .def_readwrite("topology", &Scenario::topology)
      .def_readwrite("seeds", &Scenario::seeds)
      .def_property_readonly("ground_station_ids",
                             [](const Scenario& s) {
                               std::vector<std::string> ids;
                               for (const auto& g : s.ground_stations) ids.push_back(g.node_id);
                               return ids;
                             })
      .def_property_readonly("aircraft_ids",
                             [](const Scenario& s) {
                               std::vector<std::string> ids;
                               for (const auto& g : s.aircraft) ids.push_back(g.node_id);
                               return ids;
                             })
      .def("to_yaml", &serialize_scenario)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<string>");
  m.def("load_scenario", &load_scenario, py::arg("path"));

  m.def(
      "build_topology",
      [](const Scenario& sc, double epoch_s, bool with_ground) {
        auto snap = build_satellite_topology(sc.constellation, sc.topology, epoch_s, sc.links.isl_laser);
        if (!with_ground) return snap;
        std::vector<GroundNode> ground = sc.ground_stations;
        ground.insert(ground.end(), sc.aircraft.begin(), sc.aircraft.end());
        return attach_ground_links(snap, ground, sc.links, sc.topology.elevation_mask_deg);
      },
      py::arg("scenario"), py::arg("epoch_s") = 0.0, py::arg("with_ground") = false);

  m.def(
      "ifc_sweep",
      [](const Scenario& sc, const std::vector<int>& isls, const std::vector<std::string>& modes,
         const std::vector<std::uint64_t>& seeds) {
        std::vector<ifc::PlanMode> pm;
        for (const auto& s : modes) pm.push_back(ifc::plan_mode_from_string(s));
        const auto in = sc.slot_inputs();
        std::vector<ifc::SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = ifc::sweep_max_isls(in, isls, pm, in.ifc.epochs_s, seeds.empty() ? sc.seeds : seeds);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["max_isls"] = r.max_isls;
          d["mode"] = std::string(ifc::to_string(r.mode));
          d["seed"] = r.seed;
          d["epoch_s"] = r.epoch_s;
          d["avg_delay_s"] = r.avg_delay_s;
          d["delivered"] = r.delivered;
          d["undelivered"] = r.undelivered;
          out.append(d);
        }
        return out;
      },
      py::arg("scenario"), py::arg("isls"), py::arg("modes") = std::vector<std::string>{"optimized"},
      py::arg("seeds") = std::vector<std::uint64_t>{},
      "One dict per (max_isls, mode, seed, epoch); seeds default to the scenario's.");
}
