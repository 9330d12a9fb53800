import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from netgen import random_network
from oracles import march

from irchamber.physics import (
    ChamberGeometry,
    ConductionEdge,
    ConvergenceError,
    NetworkError,
    NetworkParams,
    RadiationEdge,
    Role,
    StabilityError,
    ThermalNetwork,
    ThermalNode,
    build_card_network,
    build_network,
    cross_conduction_ratio,
    default_chamber,
    initial_state,
    net_heat_flow,
    stability_bound,
    steady_state,
    step,
    time_constants,
)
from irchamber.sensor import LEGACY_CARD, SensorCardGeometry
from irchamber.viewfactor import view_factor_matrix

CARD = SensorCardGeometry()


def one_node(g=0.1, p=1.0, c=10.0):
    nodes = [ThermalNode(0, Role.AMBIENT, math.inf, 25.0, "ambient"), ThermalNode(1, Role.AIR, c, 25.0, "air")]
    return ThermalNetwork(nodes, [ConductionEdge(0, 1, g)], [], {1: p})


@pytest.fixture(scope="module")
def chamber_net():
    return build_network(default_chamber(CARD))


def test_default_network_node_counts(chamber_net):
    counts = {r: len(chamber_net.ids(r)) for r in Role}
    assert counts[Role.PIXEL] == 32 and counts[Role.JUNCTION] == 32
    assert counts[Role.FILAMENT] == 3
    assert counts[Role.AIR] == counts[Role.WALL] == counts[Role.DOOR] == counts[Role.BOARD] == counts[Role.AMBIENT] == 1


def test_legacy_network_has_16_pixels():
    net = build_network(default_chamber(LEGACY_CARD))
    assert len(net.ids(Role.PIXEL)) == 16


def test_minimal_network_has_seven_nodes():
    card = SensorCardGeometry(rows=1, cols=1)
    ch = default_chamber(card, rows_under_filaments=("A",))
    net = build_network(ch, NetworkParams(include_door=False))
    assert len(net) == 7
    assert sorted(n.role.value for n in net.nodes) == sorted(
        ["pixel", "junction", "board", "air", "filament", "wall", "ambient"]
    )


def test_degenerate_geometry_rejected():
    with pytest.raises(NetworkError, match="zero-length"):
        ChamberGeometry((((0, 0, 0.01), (0, 0, 0.01)),))
    with pytest.raises(NetworkError):
        ChamberGeometry((((0, 0, 0.01), (1, 0, 0.01)),), card_distance=0)
    with pytest.raises(NetworkError, match="not on the card"):
        ChamberGeometry((((0, 0, 0.01), (1, 0, 0.01)),), rows_under_filaments=frozenset("Q"))


def test_edge_and_network_invariants():
    with pytest.raises(NetworkError):
        ConductionEdge(1, 1, 1.0)
    with pytest.raises(NetworkError):
        ConductionEdge(0, 1, 0.0)
    with pytest.raises(NetworkError):
        RadiationEdge(0, 1, 1.0, 1.5, 0.9)
    with pytest.raises(NetworkError):
        RadiationEdge(0, 1, 1.0, 0.5, 0.0)
    with pytest.raises(NetworkError):
        ThermalNode(1, Role.WALL, 0.0, 25.0)
    amb = ThermalNode(0, Role.AMBIENT, math.inf, 25.0, "ambient")
    air = ThermalNode(1, Role.AIR, 1.0, 25.0, "air")
    wall = ThermalNode(2, Role.WALL, 1.0, 25.0, "wall")
    with pytest.raises(NetworkError, match="exactly one air"):
        ThermalNetwork([amb, ThermalNode(1, Role.WALL, 1.0, 25.0)], [ConductionEdge(0, 1, 1.0)])
    with pytest.raises(NetworkError, match="no path"):
        ThermalNetwork([amb, air, wall], [ConductionEdge(0, 1, 1.0)])
    with pytest.raises(NetworkError, match="missing"):
        ThermalNetwork([amb, air], [ConductionEdge(0, 5, 1.0)])
    with pytest.raises(NetworkError, match="ambient"):
        ThermalNetwork([amb, air], [ConductionEdge(0, 1, 1.0)], [], {0: 1.0})


def test_radiation_edges_respect_reciprocity(chamber_net):
    ch = default_chamber(CARD)
    f_pf = view_factor_matrix(ch)
    fils = chamber_net.ids(Role.FILAMENT)
    pixels = chamber_net.ids(Role.PIXEL)
    seen = 0
    for e in chamber_net.radiation:
        if e.emitter in fils and e.absorber in pixels:
            i, j = pixels.index(e.absorber), fils.index(e.emitter)
            assert e.area * e.view_factor == pytest.approx(CARD.pixel_area * f_pf[i, j], rel=1e-6)
            seen += 1
    assert seen == 96


def test_equilibrium_is_fixed(chamber_net):
    s = initial_state(chamber_net)
    assert np.array_equal(step(chamber_net, s, 0.1), s)


def test_relaxation_is_monotone():
    net = one_node(p=0.0)
    s = initial_state(net)
    s[1] = 80.0
    prev = s[1]
    for _ in range(200):
        s = step(net, s, 1.0)
        assert 25.0 < s[1] < prev
        prev = s[1]


def test_one_node_analytic_equilibrium():
    net = one_node()
    s = initial_state(net)
    for _ in range(3000):  # tau = 100 s, dt = 1 s
        s = step(net, s, 1.0)
    assert s[1] == pytest.approx(35.0, abs=0.01)
    assert steady_state(net)[1] == pytest.approx(35.0, abs=1e-6)


def test_stability_bound_enforced():
    net = one_node(g=0.1, c=10.0)
    s = initial_state(net)
    assert stability_bound(net, s) == pytest.approx(100.0)
    with pytest.raises(StabilityError, match="100"):
        step(net, s, 100.0)
    with pytest.raises(NetworkError):
        step(net, s, 0.0)


def test_step_matches_dense_linear_oracle():
    rng = np.random.default_rng(5)
    n = 5
    cap = rng.uniform(5, 20, n)
    g = np.triu(rng.uniform(0.1, 1, (n, n)) * (rng.random((n, n)) < 0.6), 1)
    g = g + g.T
    g_gnd = rng.uniform(0.1, 1, n)
    p = rng.uniform(0, 3, n)
    nodes = [ThermalNode(0, Role.AMBIENT, math.inf, 20.0, "ambient")]
    nodes += [ThermalNode(i + 1, Role.AIR if i == 0 else Role.WALL, cap[i], 20.0) for i in range(n)]
    edges = [ConductionEdge(0, i + 1, g_gnd[i]) for i in range(n)]
    edges += [ConductionEdge(i + 1, k + 1, g[i, k]) for i in range(n) for k in range(i + 1, n) if g[i, k] > 0]
    net = ThermalNetwork(nodes, edges, [], {i + 1: p[i] for i in range(n)})
    s = initial_state(net)
    for _ in range(50):
        s = step(net, s, 0.5)
    ref = march(cap, g, (g_gnd, 20.0), np.full(n, 20.0), p, 0.5, 50)
    assert np.allclose(s[1:], ref, rtol=0, atol=1e-10)


def test_step_is_deterministic(chamber_net):
    rng = np.random.default_rng(0)
    s = initial_state(chamber_net) + rng.uniform(0, 50, len(chamber_net)) * np.isfinite([n.heat_capacity for n in chamber_net.nodes])
    assert np.array_equal(step(chamber_net, s, 0.1), step(chamber_net, s, 0.1))


def test_ambient_never_moves(chamber_net):
    power = np.zeros(len(chamber_net))
    power[chamber_net.ids(Role.FILAMENT)] = 35.0
    s = initial_state(chamber_net)
    for _ in range(100):
        s = step(chamber_net, s, 0.1, power)
    assert s[chamber_net.ids(Role.AMBIENT)[0]] == 25.0
    assert s[chamber_net.node("air").id] > 25.0


def test_zero_power_steady_state_is_ambient(chamber_net):
    ss = steady_state(chamber_net)
    assert np.allclose(ss, 25.0, atol=1e-9)


def test_steady_state_residual_and_fixed_point(chamber_net):
    power = np.zeros(len(chamber_net))
    power[chamber_net.ids(Role.FILAMENT)] = 12.0
    ss = steady_state(chamber_net, power)
    free = np.isfinite([n.heat_capacity for n in chamber_net.nodes])
    assert np.abs(net_heat_flow(chamber_net, ss, power)[free]).max() < 1e-6
    assert np.abs(step(chamber_net, ss, 0.1, power) - ss).max() < 1e-6
    assert ss[chamber_net.node("air").id] > 60


def test_steady_state_non_convergence_reports_residual():
    nodes = [ThermalNode(0, Role.AMBIENT, math.inf, 25.0, "ambient"), ThermalNode(1, Role.AIR, 1.0, 25.0, "air")]
    net = ThermalNetwork(nodes, [], [RadiationEdge(1, 0, 1e-3, 1.0, 1.0)], {1: 50.0})
    with pytest.raises(ConvergenceError) as err:
        steady_state(net, max_iter=1)
    assert err.value.residual > 0 and err.value.iterations == 1
    # given room, Newton does solve the T^4 balance
    t = steady_state(net)[1] + 273.15
    assert 5.670374419e-8 * 1e-3 * (t**4 - 298.15**4) == pytest.approx(50.0, rel=1e-9)


def test_steady_state_pixel_field_mirror_symmetric(chamber_net):
    power = np.zeros(len(chamber_net))
    power[chamber_net.ids(Role.FILAMENT)] = 10.0
    ss = steady_state(chamber_net, power)
    pix = ss[chamber_net.ids(Role.PIXEL)].reshape(4, 8)
    assert np.allclose(pix, pix[:, ::-1], rtol=0, atol=1e-6)


def test_time_constants_sorted_positive(chamber_net):
    tau = time_constants(chamber_net)
    assert np.all(tau > 0)
    assert np.all(np.diff(tau) <= 0)
    # explicit stability needs dt below the fastest mode's scale
    assert tau[-1] > 0.1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_zero_power_dissipation_is_monotone(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    net = ThermalNetwork(net.nodes, net.conduction, net.radiation, {})
    amb = net.nodes[0].temperature
    s = initial_state(net)
    s[1:] = amb + rng.uniform(-40, 150, len(net) - 1)
    dt = 0.9 * stability_bound(net, s)
    dev = np.abs(s - amb).max()
    for _ in range(60):
        s = step(net, s, dt)
        new = np.abs(s - amb).max()
        assert new <= dev + 1e-12
        dev = new
        dt = 0.9 * stability_bound(net, s)


def test_cross_conduction_ratio_below_ten_percent():
    params = NetworkParams()
    ratio = cross_conduction_ratio(CARD, params)
    assert ratio < 0.1
    # heating one pixel of the full card barely moves its neighbour
    net = build_card_network(CARD, params, temperature=100.0)
    pixels = net.ids(Role.PIXEL)
    b2, b3 = pixels[CARD.index("B2")], pixels[CARD.index("B3")]
    base = steady_state(net)
    hot = steady_state(net, {b2: 0.05})
    rise_own = hot[b2] - base[b2]
    rise_nb = hot[b3] - base[b3]
    assert 0 < rise_nb < 0.1 * rise_own


def test_card_network_is_isothermal_at_rest():
    net = build_card_network(CARD, temperature=60.0)
    assert np.allclose(steady_state(net), 60.0, atol=1e-9)
