import math

import numpy as np
import pytest

import leoisl


def test_constellation_and_propagation():
    cfg = leoisl.ConstellationConfig()
    assert cfg.size == 120
    assert abs(cfg.period_s - 6298.0) < 1.0
    ids, pos, vel = leoisl.propagate(cfg, 0.0)
    assert ids[0] == "sat-0-0" and len(ids) == 120
    assert pos.shape == (120, 3) and vel.shape == (120, 3)
    radius = np.linalg.norm(pos, axis=1)
    assert np.allclose(radius, 6371.0 + 1000.0)
    assert np.allclose(np.einsum("ij,ij->i", pos, vel), 0.0, atol=1e-6)
    with pytest.raises(ValueError):
        leoisl.ConstellationConfig(inclination_deg=200.0)


def test_link_budget():
    assert leoisl.fspl_db(2000.0, 30e9) - leoisl.fspl_db(1000.0, 30e9) == pytest.approx(20 * math.log10(2))
    assert leoisl.capacity_bps("isl_laser", 1234.0) == 1e10
    near = leoisl.capacity_bps("sat_to_air", 1000.0)
    assert leoisl.capacity_bps("sat_to_air", 2000.0) < near
    assert leoisl.capacity_bps("sat_to_air", 1000.0, 0.5) < near
    assert leoisl.propagation_delay_s(299792.458) == pytest.approx(1.0)


def test_ratio_split():
    delay, ratios = leoisl.optimal_ratio_delay([(0.0, 2e8), (0.0, 1e8)], 3e6)
    assert delay == pytest.approx(0.01)
    assert ratios == pytest.approx([2 / 3, 1 / 3])
    delay, ratios = leoisl.optimal_ratio_delay([(0.0, 1e8), (10.0, 1e8)], 1e3)
    assert ratios == [1.0, 0.0]


def test_topology_and_routing():
    sc = leoisl.Scenario()
    sc.topology = leoisl.TopologySettings(mode="grid")
    snap = leoisl.build_topology(sc, 0.0)
    assert all(snap.isl_degree(i) <= 4 for i in snap.node_ids)
    assert snap.to_csv().startswith("epoch_s,node_a,node_b,link_class")
    path = leoisl.route(snap, "sat-0-0", "sat-0-1", "hops")
    assert path["nodes"] == ["sat-0-0", "sat-0-1"] and path["hops"] == 1
    ground = leoisl.build_topology(sc, 0.0, with_ground=True)
    assert "gs-london" in ground.node_ids
    assert any(e[2] == "ground_to_sat" for e in ground.edges)
    with pytest.raises(KeyError):
        leoisl.route(snap, "sat-0-0", "nowhere")


def test_scenario_round_trip_and_errors():
    sc = leoisl.parse_scenario("constellation:\n  num_planes: 3\n")
    assert sc.constellation.num_planes == 3
    assert leoisl.parse_scenario(sc.to_yaml()) == sc
    with pytest.raises(leoisl.ScenarioError, match="inclination_deg"):
        leoisl.parse_scenario("constellation:\n  inclination_deg: 200\n")


def test_ifc_sweep():
    sc = leoisl.Scenario()
    rows = leoisl.ifc_sweep(sc, [1, 2, 3], ["optimized", "greedy"], [1])
    assert len(rows) == 6
    opt = {r["max_isls"]: r["avg_delay_s"] for r in rows if r["mode"] == "optimized"}
    greedy = {r["max_isls"]: r["avg_delay_s"] for r in rows if r["mode"] == "greedy"}
    assert opt[2] <= opt[1] + 1e-12 and opt[3] <= opt[2] + 1e-12
    assert all(opt[k] <= greedy[k] + 1e-12 for k in opt)
    assert rows == leoisl.ifc_sweep(sc, [1, 2, 3], ["optimized", "greedy"], [1])
