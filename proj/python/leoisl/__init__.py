"""LEO constellation, ISL topology, routing and in-flight content delivery."""

from ._core import (
    ConstellationConfig,
    Scenario,
    ScenarioError,
    TopologySettings,
    TopologySnapshot,
    build_topology,
    capacity_bps,
    fspl_db,
    ifc_sweep,
    load_scenario,
    optimal_ratio_delay,
    parse_scenario,
    propagate,
    propagation_delay_s,
    route,
)

__all__ = [
    "ConstellationConfig",
    "Scenario",
    "ScenarioError",
    "TopologySettings",
    "TopologySnapshot",
    "build_topology",
    "capacity_bps",
    "fspl_db",
    "ifc_sweep",
    "load_scenario",
    "optimal_ratio_delay",
    "parse_scenario",
    "propagate",
    "propagation_delay_s",
    "route",
]
