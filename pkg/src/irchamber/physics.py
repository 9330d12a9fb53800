"""
Lumped thermal network of the test chamber and the sensor card.

Nodes carry a heat capacity and a temperature in °C. Conduction and film
edges move heat in proportion to the temperature difference; radiation
edges use the exact T^4 law with temperatures converted to kelvin.
Ambient nodes are fixed-temperature boundaries (infinite capacity).

The integrator is explicit Euler. It refuses any step at or above
``min(C_i / sum G_i)`` with radiation linearised by its secant at the
current temperatures; below that bound each update is a convex
combination of neighbouring temperatures, which is what keeps the scheme
monotone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .sensor import SensorCardGeometry
from .viewfactor import filament_view_factors, view_factor_matrix

__all__ = [
    "KELVIN",
    "STEFAN_BOLTZMANN",
    "Role",
    "ThermalNode",
    "ConductionEdge",
    "RadiationEdge",
    "ThermalNetwork",
    "ChamberGeometry",
    "NetworkParams",
    "NetworkError",
    "StabilityError",
    "ConvergenceError",
    "default_chamber",
    "build_network",
    "build_card_network",
    "initial_state",
    "net_heat_flow",
    "stability_bound",
    "step",
    "steady_state",
    "time_constants",
    "trace_conductance",
    "cross_conduction_ratio",
]

KELVIN = 273.15
STEFAN_BOLTZMANN = 5.670374419e-8


class NetworkError(ValueError):
    pass


class StabilityError(NetworkError):
    def __init__(self, dt: float, bound: float):
        super().__init__(f"dt={dt:g} s violates the explicit stability bound {bound:.6g} s")
        self.dt = dt
        self.bound = bound


class ConvergenceError(RuntimeError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(
            f"steady state did not converge after {iterations} iterations "
            f"(max residual {residual:.3e} W)"
        )
        self.iterations = iterations
        self.residual = residual


class Role(str, enum.Enum):
    AIR = "air"
    FILAMENT = "filament"
    WALL = "wall"
    DOOR = "door"
    PIXEL = "pixel"
    JUNCTION = "junction"
    BOARD = "board"
    AMBIENT = "ambient"


@dataclass
class ThermalNode:
    id: int
    role: Role
    heat_capacity: float
    temperature: float
    label: str = ""

    def __post_init__(self):
        self.role = Role(self.role)
        if self.role is Role.AMBIENT:
            self.heat_capacity = math.inf
        elif not (self.heat_capacity > 0 and math.isfinite(self.heat_capacity)):
            raise NetworkError(f"node {self.label or self.id}: heat capacity must be positive and finite")
        if not math.isfinite(self.temperature):
            raise NetworkError(f"node {self.label or self.id}: temperature must be finite")
        if not self.label:
            self.label = f"{self.role.value}{self.id}"


@dataclass(frozen=True)
class ConductionEdge:
    node_a: int
    node_b: int
    conductance: float

    def __post_init__(self):
        if self.node_a == self.node_b:
            raise NetworkError(f"conduction edge loops on node {self.node_a}")
        if not self.conductance > 0:
            raise NetworkError(f"conductance must be positive, got {self.conductance}")


@dataclass(frozen=True)
class RadiationEdge:
    """Grey-body exchange ``eps * sigma * area * F * (Te^4 - Ta^4)``.

    ``area`` belongs to the emitter and ``view_factor`` is emitter to
    absorber; the reverse factor is implied by reciprocity.
    """

    emitter: int
    absorber: int
    area: float
    view_factor: float
    effective_emissivity: float

    def __post_init__(self):
        if self.emitter == self.absorber:
            raise NetworkError(f"radiation edge loops on node {self.emitter}")
        if not self.area > 0:
            raise NetworkError("radiating area must be positive")
        if not 0.0 <= self.view_factor <= 1.0:
            raise NetworkError(f"view factor {self.view_factor} outside [0, 1]")
        if not 0.0 < self.effective_emissivity <= 1.0:
            raise NetworkError(f"emissivity {self.effective_emissivity} outside (0, 1]")

    @property
    def coefficient(self) -> float:
        return self.effective_emissivity * STEFAN_BOLTZMANN * self.area * self.view_factor


@dataclass
class _Arrays:
    capacity: np.ndarray
    free: np.ndarray
    ca: np.ndarray
    cb: np.ndarray
    cg: np.ndarray
    re: np.ndarray
    ra: np.ndarray
    rk: np.ndarray
    power: np.ndarray


@dataclass
class ThermalNetwork:
    nodes: list[ThermalNode]
    conduction: list[ConductionEdge] = field(default_factory=list)
    radiation: list[RadiationEdge] = field(default_factory=list)
    power_inputs: dict[int, float] = field(default_factory=dict)
    _cache: _Arrays | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.validate()

    def validate(self):
        ids = [n.id for n in self.nodes]
        if ids != list(range(len(ids))):
            raise NetworkError("node ids must be 0..n-1 in order")
        n = len(ids)
        if sum(node.role is Role.AIR for node in self.nodes) != 1:
            raise NetworkError("network needs exactly one air node")
        for e in self.conduction:
            if not (0 <= e.node_a < n and 0 <= e.node_b < n):
                raise NetworkError(f"conduction edge {e} references a missing node")
        for e in self.radiation:
            if not (0 <= e.emitter < n and 0 <= e.absorber < n):
                raise NetworkError(f"radiation edge {e} references a missing node")
        for k in self.power_inputs:
            if not 0 <= k < n:
                raise NetworkError(f"power input on missing node {k}")
            if self.nodes[k].role is Role.AMBIENT:
                raise NetworkError("power cannot be injected into an ambient node")
        self._check_grounded()

    def _check_grounded(self):
        adj: dict[int, set[int]] = {node.id: set() for node in self.nodes}
        for e in self.conduction:
            adj[e.node_a].add(e.node_b)
            adj[e.node_b].add(e.node_a)
        for e in self.radiation:
            if e.view_factor > 0:
                adj[e.emitter].add(e.absorber)
                adj[e.absorber].add(e.emitter)
        seen = {node.id for node in self.nodes if node.role is Role.AMBIENT}
        stack = list(seen)
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        floating = [node.label for node in self.nodes if node.id not in seen]
        if floating:
            raise NetworkError(f"nodes with no path to an ambient boundary: {floating}")

    def __len__(self):
        return len(self.nodes)

    def node(self, label: str) -> ThermalNode:
        for n in self.nodes:
            if n.label == label:
                return n
        raise KeyError(label)

    def ids(self, role: Role | str) -> list[int]:
        role = Role(role)
        return [n.id for n in self.nodes if n.role is role]

    @property
    def arrays(self) -> _Arrays:
        if self._cache is None:
            n = len(self.nodes)
            cap = np.array([node.heat_capacity for node in self.nodes])
            power = np.zeros(n)
            for k, p in self.power_inputs.items():
                power[k] = p
            self._cache = _Arrays(
                capacity=cap,
                free=np.isfinite(cap),
                ca=np.array([e.node_a for e in self.conduction], dtype=np.intp),
                cb=np.array([e.node_b for e in self.conduction], dtype=np.intp),
                cg=np.array([e.conductance for e in self.conduction], dtype=float),
                re=np.array([e.emitter for e in self.radiation], dtype=np.intp),
                ra=np.array([e.absorber for e in self.radiation], dtype=np.intp),
                rk=np.array([e.coefficient for e in self.radiation], dtype=float),
                power=power,
            )
        return self._cache


# ---------------------------------------------------------------------------
# dynamics


def initial_state(network: ThermalNetwork) -> np.ndarray:
    return np.array([n.temperature for n in network.nodes], dtype=float)


def _power(network: ThermalNetwork, power) -> np.ndarray:
    arr = network.arrays
    if power is None:
        return arr.power
    if isinstance(power, Mapping):
        p = np.zeros(len(network))
        for k, v in power.items():
            p[k] = v
        return p
    return np.asarray(power, dtype=float)


def net_heat_flow(network: ThermalNetwork, state, power=None) -> np.ndarray:
    """Net heat flow into each node in W (zero on ambient nodes)."""
    arr = network.arrays
    t = np.asarray(state, dtype=float)
    n = t.size
    q = _power(network, power).copy()
    if arr.cg.size:
        flow = arr.cg * (t[arr.cb] - t[arr.ca])
        q += np.bincount(arr.ca, flow, minlength=n) - np.bincount(arr.cb, flow, minlength=n)
    if arr.rk.size:
        tk = t + KELVIN
        t4 = tk * tk * tk * tk
        flux = arr.rk * (t4[arr.re] - t4[arr.ra])
        q += np.bincount(arr.ra, flux, minlength=n) - np.bincount(arr.re, flux, minlength=n)
    q[~arr.free] = 0.0
    return q


def _total_conductance(network: ThermalNetwork, t: np.ndarray) -> np.ndarray:
    arr = network.arrays
    n = t.size
    g = np.zeros(n)
    if arr.cg.size:
        g += np.bincount(arr.ca, arr.cg, minlength=n) + np.bincount(arr.cb, arr.cg, minlength=n)
    if arr.rk.size:
        tk = t + KELVIN
        te, ta = tk[arr.re], tk[arr.ra]
        secant = arr.rk * (te * te + ta * ta) * (te + ta)
        g += np.bincount(arr.re, secant, minlength=n) + np.bincount(arr.ra, secant, minlength=n)
    return g


def stability_bound(network: ThermalNetwork, state) -> float:
    """Largest admissible explicit step (exclusive) at ``state``."""
    arr = network.arrays
    g = _total_conductance(network, np.asarray(state, dtype=float))[arr.free]
    with np.errstate(divide="ignore"):
        ratios = arr.capacity[arr.free] / g
    return float(ratios.min()) if ratios.size else math.inf


def step(network: ThermalNetwork, state, dt: float, power=None, check: bool = True) -> np.ndarray:
    """Advance all non-ambient node temperatures by one explicit step.

    ``power`` overrides ``network.power_inputs`` for this step (a full
    array in W or a mapping node id -> W).
    """
    if not dt > 0:
        raise NetworkError("dt must be positive")
    t = np.asarray(state, dtype=float)
    if check:
        bound = stability_bound(network, t)
        if not dt < bound:
            raise StabilityError(dt, bound)
    arr = network.arrays
    q = net_heat_flow(network, t, power)
    out = t.copy()
    out[arr.free] += dt * q[arr.free] / arr.capacity[arr.free]
    return out


def _jacobian(network: ThermalNetwork, t: np.ndarray) -> np.ndarray:
    arr = network.arrays
    n = t.size
    jac = np.zeros((n, n))
    if arr.cg.size:
        np.add.at(jac, (arr.ca, arr.cb), arr.cg)
        np.add.at(jac, (arr.cb, arr.ca), arr.cg)
        np.add.at(jac, (arr.ca, arr.ca), -arr.cg)
        np.add.at(jac, (arr.cb, arr.cb), -arr.cg)
    if arr.rk.size:
        tk = t + KELVIN
        de = 4.0 * arr.rk * tk[arr.re] ** 3
        da = 4.0 * arr.rk * tk[arr.ra] ** 3
        # flux = k (Te^4 - Ta^4) leaves the emitter and enters the absorber
        np.add.at(jac, (arr.re, arr.re), -de)
        np.add.at(jac, (arr.re, arr.ra), da)
        np.add.at(jac, (arr.ra, arr.re), de)
        np.add.at(jac, (arr.ra, arr.ra), -da)
    return jac


def steady_state(
    network: ThermalNetwork,
    power=None,
    tol: float = 1e-6,
    max_iter: int = 100,
    initial=None,
) -> np.ndarray:
    """Solve for zero net heat flow at every non-ambient node.

    Damped Newton iteration on the nonlinear system. Iteration continues
    past ``tol`` until the Newton update stalls at round-off, so the
    returned state is a fixed point of :func:`step` to far better than
    1e-6 °C. Raises :class:`ConvergenceError` with the last residual if
    ``tol`` is not reached in ``max_iter`` iterations.
    """
    arr = network.arrays
    free = arr.free
    t = initial_state(network) if initial is None else np.array(initial, dtype=float)
    if initial is None and free.any():
        t[free] = t[~free].mean() if (~free).any() else t[free].mean()
    q = net_heat_flow(network, t, power)
    res = float(np.abs(q[free]).max()) if free.any() else 0.0
    if not free.any():
        return t
    for it in range(1, max_iter + 1):
        jac = _jacobian(network, t)[np.ix_(free, free)]
        delta = np.linalg.solve(jac, -q[free])
        lam = 1.0
        while True:
            trial = t.copy()
            trial[free] += lam * delta
            q_trial = net_heat_flow(network, trial, power)
            res_trial = float(np.abs(q_trial[free]).max())
            if res_trial <= res or lam < 1e-4:
                break
            lam *= 0.5
        t, q = trial, q_trial
        step_size = float(np.abs(lam * delta).max())
        stalled = res_trial >= res and res < tol
        res = res_trial
        if res < tol and (step_size < 1e-11 * (1.0 + float(np.abs(t).max())) or stalled):
            return t
    if res < tol:
        return t
    raise ConvergenceError(max_iter, res)


def time_constants(network: ThermalNetwork, state=None, power=None) -> np.ndarray:
    """Time constants (s) of the network linearised about ``state``.

    Defaults to the linearisation about the steady state. Sorted from
    slowest to fastest.
    """
    if state is None:
        state = steady_state(network, power)
    arr = network.arrays
    free = arr.free
    jac = _jacobian(network, np.asarray(state, dtype=float))[np.ix_(free, free)]
    eig = np.linalg.eigvals(jac / arr.capacity[free][:, None])
    return np.sort(-1.0 / eig.real)[::-1]


# ---------------------------------------------------------------------------
# geometry and network assembly


@dataclass(frozen=True)
class ChamberGeometry:
    """Heater filaments above the card, in card coordinates (metres).

    The card lies in z = 0 facing +z; see
    :meth:`SensorCardGeometry.pixel_centers`.
    """

    filament_segments: tuple[tuple[tuple[float, float, float], tuple[float, float, float]], ...]
    card_distance: float = 0.01
    card: SensorCardGeometry = field(default_factory=SensorCardGeometry)
    rows_under_filaments: frozenset[str] = frozenset("BCD")
    filament_diameter: float = 1e-3

    def __post_init__(self):
        if not self.card_distance > 0:
            raise NetworkError("card_distance must be positive")
        if not self.filament_diameter > 0:
            raise NetworkError("filament_diameter must be positive")
        if not self.filament_segments:
            raise NetworkError("chamber needs at least one filament")
        segs = tuple(
            (tuple(float(v) for v in a), tuple(float(v) for v in b)) for a, b in self.filament_segments
        )
        for a, b in segs:
            if len(a) != 3 or len(b) != 3:
                raise NetworkError("filament endpoints must be 3D points")
            if math.dist(a, b) <= 0:
                raise NetworkError(f"zero-length filament at {a}")
        object.__setattr__(self, "filament_segments", segs)
        rows = frozenset(self.rows_under_filaments)
        unknown = rows - set(self.card.row_labels)
        if unknown:
            raise NetworkError(f"rows {sorted(unknown)} are not on the card")
        object.__setattr__(self, "rows_under_filaments", rows)

    def filament_length(self, j: int) -> float:
        a, b = self.filament_segments[j]
        return math.dist(a, b)

    def filament_area(self, j: int) -> float:
        return math.pi * self.filament_diameter * self.filament_length(j)


def default_chamber(
    card: SensorCardGeometry | None = None,
    card_distance: float = 0.01,
    rows_under_filaments: Sequence[str] = ("B", "C", "D"),
    filament_length: float = 0.08,
    filament_diameter: float = 1e-3,
) -> ChamberGeometry:
    """Straight filaments parallel to the card's long axis, one over each listed row."""
    card = card or SensorCardGeometry()
    rows = [r for r in card.row_labels if r in set(rows_under_filaments)]
    half = filament_length / 2
    segs = tuple(
        ((-half, card.row_y(r), card_distance), (half, card.row_y(r), card_distance)) for r in rows
    )
    return ChamberGeometry(
        filament_segments=segs,
        card_distance=card_distance,
        card=card,
        rows_under_filaments=frozenset(rows),
        filament_diameter=filament_diameter,
    )


@dataclass(frozen=True)
class NetworkParams:
    """Material and coupling constants of the chamber model.

    Couplings marked "tuned" were fitted once against the reference
    scenarios and are frozen here.
    """

    ambient_temperature: float = 25.0
    # air lumped with light interior fittings
    air_capacitance: float = 25.0
    # heater filaments (per segment)
    filament_capacitance: float = 3.0
    filament_air_conductance: float = 0.25
    filament_emissivity: float = 0.85
    # chamber walls and door
    wall_capacitance: float = 120.0
    wall_air_conductance: float = 8.0
    wall_insulation: float = 0.35
    include_door: bool = True
    door_capacitance: float = 30.0
    door_air_conductance: float = 0.6
    door_leak: float = 0.35
    door_mount_conductance: float = 3.4e-4
    # sensor card
    pixel_emissivity: float = 0.95
    pixel_film_coefficient: float = 45.0  # W/m^2/K per face
    copper_heat_capacity: float = 3.45e6  # J/m^3/K
    board_heat_capacity: float = 1.9e6  # J/m^3/K, FR4
    board_conductivity: float = 0.3
    copper_conductivity: float = 390.0
    board_share: float = 0.7
    trace_length: float = 10e-3
    board_margin: float = 5e-3
    junction_capacitance: float = 5e-4
    junction_resistance: float = 500.0
    junction_air_conductance: float = 0.0

    def __post_init__(self):
        for name in (
            "air_capacitance",
            "filament_capacitance",
            "wall_capacitance",
            "door_capacitance",
            "junction_capacitance",
            "junction_resistance",
            "trace_length",
        ):
            if not getattr(self, name) > 0:
                raise NetworkError(f"{name} must be positive")


def trace_conductance(card: SensorCardGeometry, params: NetworkParams) -> float:
    """Conductance (W/K) of the copper trace joining two adjacent pixels."""
    return params.copper_conductivity * card.trace_width * card.copper_thickness / params.trace_length


def _pixel_capacitance(card: SensorCardGeometry, params: NetworkParams) -> float:
    area = card.pixel_area
    return area * (
        card.copper_thickness * params.copper_heat_capacity
        + params.board_share * card.board_thickness * params.board_heat_capacity
    )


def _pixel_board_conductance(card: SensorCardGeometry, params: NetworkParams) -> float:
    # lateral FR4 path from under the plate into the surrounding substrate
    return params.board_conductivity * card.board_thickness * card.pixel_size / card.gap


def _board_area(card: SensorCardGeometry, params: NetworkParams) -> float:
    outer = (card.width + 2 * params.board_margin) * (card.height + 2 * params.board_margin)
    return outer - card.n_pixels * card.pixel_area


class _Builder:
    def __init__(self):
        self.nodes: list[ThermalNode] = []
        self.conduction: list[ConductionEdge] = []
        self.radiation: list[RadiationEdge] = []

    def node(self, role, capacity, temperature, label) -> int:
        i = len(self.nodes)
        self.nodes.append(ThermalNode(i, Role(role), capacity, temperature, label))
        return i

    def conduct(self, a, b, g):
        if g > 0:
            self.conduction.append(ConductionEdge(a, b, g))

    def radiate(self, e, a, area, f, eps):
        if f > 0:
            self.radiation.append(RadiationEdge(e, a, area, min(f, 1.0), eps))


def _add_card(b: _Builder, card: SensorCardGeometry, params: NetworkParams, t0: float, air: int, enclosure: int):
    """Card nodes coupled by film to ``air`` and by radiation to ``enclosure``."""
    eps = params.pixel_emissivity
    board_area = _board_area(card, params)
    board = b.node(
        Role.BOARD, board_area * card.board_thickness * params.board_heat_capacity, t0, "board"
    )
    b.conduct(board, air, 2 * params.pixel_film_coefficient * board_area)
    b.radiate(board, enclosure, 2 * board_area, 1.0, eps)

    c_pix = _pixel_capacitance(card, params)
    g_film = 2 * params.pixel_film_coefficient * card.pixel_area
    g_board = _pixel_board_conductance(card, params)
    pixels = [b.node(Role.PIXEL, c_pix, t0, f"pixel:{card.label(i)}") for i in range(card.n_pixels)]
    junctions = [
        b.node(Role.JUNCTION, params.junction_capacitance, t0, f"junction:{card.label(i)}")
        for i in range(card.n_pixels)
    ]
    g_trace = trace_conductance(card, params)
    for p, j in zip(pixels, junctions):
        b.conduct(p, air, g_film)
        b.conduct(p, board, g_board)
        b.conduct(p, j, 1.0 / params.junction_resistance)
        b.conduct(j, air, params.junction_air_conductance)
    for i, k in card.neighbours():
        b.conduct(pixels[i], pixels[k], g_trace)
    return board, pixels, junctions


def build_network(chamber: ChamberGeometry, params: NetworkParams | None = None) -> ThermalNetwork:
    """Assemble the chamber + card network.

    Node layout: ambient, air, wall, [door], filaments, board, pixels
    (row-major), junctions. Every node starts at the ambient temperature.
    """
    params = params or NetworkParams()
    card = chamber.card
    if card.n_pixels < 1:
        raise NetworkError("card has no pixels")
    t0 = params.ambient_temperature
    b = _Builder()
    amb = b.node(Role.AMBIENT, math.inf, t0, "ambient")
    air = b.node(Role.AIR, params.air_capacitance, t0, "air")
    wall = b.node(Role.WALL, params.wall_capacitance, t0, "wall")
    b.conduct(wall, amb, params.wall_insulation)
    b.conduct(wall, air, params.wall_air_conductance)
    door = None
    if params.include_door:
        door = b.node(Role.DOOR, params.door_capacitance, t0, "door")
        b.conduct(door, amb, params.door_leak)
        b.conduct(door, air, params.door_air_conductance)

    fils = []
    for j in range(len(chamber.filament_segments)):
        f = b.node(Role.FILAMENT, params.filament_capacitance, t0, f"filament:{j}")
        b.conduct(f, air, params.filament_air_conductance)
        fils.append(f)

    _, pixels, _ = _add_card(b, card, params, t0, air, wall)

    f_pf = view_factor_matrix(chamber)
    f_fp = filament_view_factors(chamber, f_pf)
    eps_pf = params.pixel_emissivity * params.filament_emissivity
    for j, f in enumerate(fils):
        area = chamber.filament_area(j)
        b.radiate(f, wall, area, max(0.0, 1.0 - f_fp[j].sum()), params.filament_emissivity)
    for i, p in enumerate(pixels):
        for j, f in enumerate(fils):
            b.radiate(f, p, chamber.filament_area(j), f_fp[j, i], eps_pf)
        # filament-facing side sees the walls past the filaments, back side sees only walls
        b.radiate(p, wall, card.pixel_area, max(0.0, 1.0 - f_pf[i].sum()), params.pixel_emissivity)
        b.radiate(p, wall, card.pixel_area, 1.0, params.pixel_emissivity)

    if door is not None:
        top = card.row_labels[0]
        for i, p in enumerate(pixels):
            if card.label(i).startswith(top):
                b.conduct(p, door, params.door_mount_conductance)

    return ThermalNetwork(b.nodes, b.conduction, b.radiation, {f: 0.0 for f in fils})


def build_card_network(card: SensorCardGeometry, params: NetworkParams | None = None, temperature: float | None = None) -> ThermalNetwork:
    """Card alone inside an isothermal black-body enclosure.

    The enclosure is a single ambient node that also stands in for the
    surrounding air (an extra air node pinned to it by a large film
    conductance). Step the enclosure by editing the ambient entry of the
    state between integration steps.
    """
    params = params or NetworkParams()
    t0 = params.ambient_temperature if temperature is None else temperature
    b = _Builder()
    encl = b.node(Role.AMBIENT, math.inf, t0, "enclosure")
    # light air node tied to the enclosure (tau 0.25 s) keeps the one-air-node invariant
    air = b.node(Role.AIR, 1.0, t0, "air")
    b.conduct(air, encl, 4.0)
    _add_card(b, card, params, t0, air, encl)
    return ThermalNetwork(b.nodes, b.conduction, b.radiation, {})


def cross_conduction_ratio(card: SensorCardGeometry, params: NetworkParams | None = None, temperature: float = 100.0) -> float:
    """Neighbour rise / heated-pixel rise on the two-pixel sub-network.

    Each pixel keeps its own losses (film, board path, radiation
    linearised at ``temperature``) lumped to ground, and the two are
    joined by one trace. The ratio is ``G_t / (G_t + G_loss)``.
    """
    params = params or NetworkParams()
    g_t = trace_conductance(card, params)
    return g_t / (g_t + pixel_loss_conductance(card, params, temperature))


def pixel_loss_conductance(card: SensorCardGeometry, params: NetworkParams, temperature: float = 100.0) -> float:
    tk = temperature + KELVIN
    g_rad = 2 * params.pixel_emissivity * STEFAN_BOLTZMANN * card.pixel_area * 4 * tk**3
    return 2 * params.pixel_film_coefficient * card.pixel_area + _pixel_board_conductance(card, params) + g_rad
