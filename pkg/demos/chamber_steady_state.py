"""
Steady-state field of the chamber
=================================

Solve the lumped network directly for a fixed heater power instead of
time-marching it, then look at where the heat goes and how fast the
network can respond.
"""

import numpy as np

from irchamber import NetworkParams, SensorCardGeometry, build_network, default_chamber, steady_state
from irchamber.physics import Role, net_heat_flow, stability_bound, time_constants
from irchamber.viewfactor import view_factor_matrix

card = SensorCardGeometry()
chamber = default_chamber(card)
net = build_network(chamber, NetworkParams())

###############################################################################
# Each pixel sees mostly the filament over its own row. Row A has no
# filament above it and only catches the edge of row B's.

f = view_factor_matrix(chamber).reshape(card.rows, card.cols, -1)
for r, label in enumerate(card.row_labels):
    print(label, " ".join(f"{v:.4f}" for v in f[r, 3]), f"(sum {f[r, 3].sum():.4f})")

###############################################################################
# The controller holds 100 °C with about 40 % delivered duty, 14 W per filament.

power = np.zeros(len(net))
power[net.ids(Role.FILAMENT)] = 14.0
ss = steady_state(net, power)
for role in (Role.AIR, Role.WALL, Role.DOOR, Role.FILAMENT, Role.BOARD):
    print(f"{role.value:9s} {ss[net.ids(role)].mean():7.2f} °C")

pix = ss[net.ids(Role.PIXEL)].reshape(card.rows, card.cols)
air = ss[net.node("air").id]
print("\npixel minus air, °C")
for label, row in zip(card.row_labels, pix - air):
    print(label, " ".join(f"{v:+.2f}" for v in row))

free = np.isfinite([n.heat_capacity for n in net.nodes])
print(f"\nresidual {np.abs(net_heat_flow(net, ss, power)[free]).max():.1e} W")

###############################################################################
# The slowest mode is the walls; the fastest is a diode junction, which
# sets the explicit integrator's step limit.

tau = time_constants(net, ss, power)
print(f"slowest tau {tau[0]:.0f} s, fastest {tau[-1]:.3f} s, dt must stay below {stability_bound(net, ss):.3f} s")
