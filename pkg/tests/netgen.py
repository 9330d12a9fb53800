"""Random small thermal networks for property tests."""

import math

import numpy as np

from irchamber.physics import ConductionEdge, RadiationEdge, Role, ThermalNetwork, ThermalNode


def random_network(rng: np.random.Generator, max_nodes: int = 6) -> ThermalNetwork:
    """Grounded network of 2..max_nodes nodes: one ambient, one air, the rest walls.

    Every free node hangs off a random earlier node (node 0 is the
    ambient), so the graph is connected to ground by construction;
    extra conduction and radiation edges are sprinkled on top.
    """
    n = int(rng.integers(2, max_nodes + 1))
    t_amb = float(rng.uniform(0, 60))
    nodes = [ThermalNode(0, Role.AMBIENT, math.inf, t_amb, "ambient")]
    for i in range(1, n):
        role = Role.AIR if i == 1 else Role.WALL
        nodes.append(ThermalNode(i, role, float(rng.uniform(2, 40)), t_amb, f"n{i}"))
    cond = [ConductionEdge(int(rng.integers(0, i)), i, float(rng.uniform(0.2, 3))) for i in range(1, n)]
    rad = []
    for _ in range(int(rng.integers(0, 4))):
        a, b = (int(v) for v in rng.choice(n, 2, replace=False))
        if rng.random() < 0.5:
            cond.append(ConductionEdge(a, b, float(rng.uniform(0.05, 2))))
        else:
            rad.append(RadiationEdge(a, b, float(rng.uniform(1e-3, 2e-2)), float(rng.uniform(0, 1)), float(rng.uniform(0.1, 1))))
    power = {i: float(rng.uniform(0, 20)) for i in range(1, n) if rng.random() < 0.6}
    return ThermalNetwork(nodes, cond, rad, power)
