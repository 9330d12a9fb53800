"""
Scenario runner tying chamber physics, control, sensor readout and host
analysis together, plus the CSV / PGM writers for its artifacts.

Two kinds of scenario exist. ``chamber`` runs the PID/PWM-heated test
chamber with the card mounted 1 cm from the filaments. ``blackbody``
puts the card alone inside an isothermal enclosure whose temperature
follows the profile directly, which is how the card is calibrated and
how its step response is measured.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .control import (
    PidConfig,
    PidState,
    PwmConfig,
    Segment,
    TctProfile,
    ThermocoupleModel,
    pid_step,
    profile_setpoint,
    pwm_gate,
    thermocouple_read,
)
from .frames import FrameDecoder, encode_frame, iter_frames
from .host import (
    CalibrationTable,
    Hotspot,
    TemperatureMap,
    TransientFit,
    UniformityReport,
    calibrate,
    codes_to_map,
    fit_transient,
    locate_hotspots,
    uniformity_report,
)
from .physics import (
    NetworkParams,
    Role,
    build_card_network,
    build_network,
    default_chamber,
    initial_state,
    step,
)
from .sensor import LEGACY_CARD, DiodeModel, SensorCardGeometry, SignalChainModel, scan_frame

__all__ = [
    "ScenarioError",
    "ChamberSettings",
    "Scenario",
    "RunArtifacts",
    "BUILTIN_SCENARIOS",
    "builtin_scenario",
    "run_scenario",
    "ideal_calibration",
    "replay_frames",
    "export_heatmap",
    "export_csv",
    "series_csv",
    "map_csv",
    "parse_map_csv",
    "calibration_csv",
    "parse_calibration_csv",
]


class ScenarioError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChamberSettings:
    card_distance: float = 0.01
    filament_length: float = 0.08
    filament_diameter: float = 1e-3
    rows_under_filaments: tuple[str, ...] = ("B", "C", "D")
    heater_power: float = 35.0  # W per filament at full duty

    def geometry(self, card: SensorCardGeometry):
        return default_chamber(
            card,
            card_distance=self.card_distance,
            rows_under_filaments=self.rows_under_filaments,
            filament_length=self.filament_length,
            filament_diameter=self.filament_diameter,
        )


@dataclass(frozen=True)
class Scenario:
    name: str
    mode: str = "chamber"
    card: SensorCardGeometry = field(default_factory=SensorCardGeometry)
    chamber: ChamberSettings = field(default_factory=ChamberSettings)
    network: NetworkParams = field(default_factory=NetworkParams)
    pid: PidConfig = field(default_factory=PidConfig)
    pwm: PwmConfig = field(default_factory=PwmConfig)
    thermocouple: ThermocoupleModel = field(default_factory=ThermocoupleModel)
    profile: TctProfile = field(default_factory=lambda: TctProfile.soak(100.0))
    diode: DiodeModel = field(default_factory=DiodeModel)
    chain: SignalChainModel = field(default_factory=SignalChainModel)
    duration: float = 900.0
    sample_interval: float = 1.0
    snapshots: tuple[float, ...] = ()
    seed: int = 0
    dt: float = 0.1
    control_period: float = 1.0
    calibration_low: float = 20.0
    calibration_high: float = 120.0
    hotspot_threshold: float = 1.5
    heatmap_span: float = 5.0
    heatmap_upscale: int = 20
    record_pixel: str = "B2"

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(float(s) for s in self.snapshots))
        self.validate()

    def validate(self):
        if self.mode not in ("chamber", "blackbody"):
            raise ScenarioError(f"unknown scenario mode {self.mode!r}")
        if not self.duration > 0:
            raise ScenarioError("duration must be positive")
        if not self.profile.segments:
            raise ScenarioError("profile has no segments")
        if not self.profile.duration > 0:
            raise ScenarioError("profile has zero duration")
        if not (self.dt > 0 and self.sample_interval > 0 and self.control_period > 0):
            raise ScenarioError("dt, sample_interval and control_period must be positive")
        for name in ("sample_interval", "control_period"):
            ratio = getattr(self, name) / self.dt
            if abs(ratio - round(ratio)) > 1e-9:
                raise ScenarioError(f"{name} must be a whole multiple of dt")
        for s in self.snapshots:
            if not 0 <= s <= self.duration:
                raise ScenarioError(f"snapshot {s} s outside run of {self.duration} s")
            k = s / self.sample_interval
            if abs(k - round(k)) > 1e-9:
                raise ScenarioError(f"snapshot {s} s is not on the {self.sample_interval} s sample grid")
        self.card.index(self.record_pixel)


def _soak100() -> Scenario:
    return Scenario(name="soak100", snapshots=(120.0, 600.0), duration=900.0)


def _tct() -> Scenario:
    profile = TctProfile.cycle(low=20.0, high=120.0, ramp_rate=0.5, dwell=300.0, cycles=2)
    return Scenario(name="tct", profile=profile, duration=2600.0, snapshots=(500.0, 1300.0))


def _calibration() -> Scenario:
    profile = TctProfile((Segment(20.0, 0.0, 600.0), Segment(120.0, 0.0, 900.0)), initial=20.0)
    return Scenario(name="calibration", mode="blackbody", profile=profile, duration=1500.0, snapshots=(590.0, 1500.0))


# first card: 10 mm plates and a thermal test die glued on with a
# non-conductive adhesive, giving a much weaker, heavier junction
LEGACY_NETWORK = NetworkParams(junction_capacitance=7.0e-3, junction_resistance=6000.0)


def _legacy44() -> Scenario:
    return Scenario(
        name="legacy44",
        mode="blackbody",
        card=LEGACY_CARD,
        network=LEGACY_NETWORK,
        profile=TctProfile((Segment(100.0, 0.0, 900.0),), initial=25.0),
        duration=900.0,
    )


def _blackbody100() -> Scenario:
    return Scenario(
        name="blackbody100",
        mode="blackbody",
        profile=TctProfile((Segment(100.0, 0.0, 900.0),), initial=25.0),
        duration=900.0,
    )


BUILTIN_SCENARIOS = {
    "soak100": _soak100,
    "calibration": _calibration,
    "tct": _tct,
    "legacy44": _legacy44,
    "blackbody100": _blackbody100,
}


def builtin_scenario(name: str) -> Scenario:
    try:
        return BUILTIN_SCENARIOS[name]()
    except KeyError:
        raise ScenarioError(f"no built-in scenario {name!r}; have {sorted(BUILTIN_SCENARIOS)}") from None


@dataclass
class RunArtifacts:
    scenario: Scenario
    series: dict[str, np.ndarray]
    frames: bytes
    calibration: CalibrationTable
    maps: dict[float, TemperatureMap] = field(default_factory=dict)
    reports: dict[float, UniformityReport] = field(default_factory=dict)
    hotspots: dict[float, list[Hotspot]] = field(default_factory=dict)
    settling: TransientFit | None = None
    measured_calibration: CalibrationTable | None = None

    @property
    def times(self) -> np.ndarray:
        return self.series["t"]

    def report_text(self) -> str:
        sc = self.scenario
        lines = [f"scenario {sc.name} ({sc.mode}), seed {sc.seed}, {sc.duration:g} s"]
        if sc.mode == "chamber":
            air = self.series["air"]
            lines.append(f"final air {air[-1]:.3f} °C, setpoint {self.series['setpoint'][-1]:g} °C")
        for t in sorted(self.reports):
            lines.append("")
            lines.append(self.reports[t].format())
            spots = self.hotspots.get(t, [])
            listed = ", ".join(f"{h.label}({h.delta:+.2f})" for h in spots) or "none"
            lines.append(f"hotspots |dT| >= {sc.hotspot_threshold:g} °C: {listed}")
        if self.settling is not None:
            s = self.settling
            lines.append("")
            lines.append(
                f"{sc.record_pixel} transient: T0 {s.t_initial:.3f} °C, Tinf {s.t_infinity:.3f} °C, "
                f"tau {s.tau:.3f} s, settling {s.settling_time:g} s"
            )
        return "\n".join(lines) + "\n"

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        sc = self.scenario
        written = []

        def put(name, data):
            p = out / name
            p.write_bytes(data if isinstance(data, bytes) else data.encode())
            written.append(p)

        put("frames.bin", self.frames)
        names = [k for k in self.series if k != "t"]
        put("series.csv", series_csv(self.series["t"], [self.series[k] for k in names], names))
        put("calibration.csv", calibration_csv(self.calibration, sc.card))
        for t, m in sorted(self.maps.items()):
            tag = f"{t:g}"
            put(f"map_{tag}.csv", map_csv(m))
            lo = m.reference_temperature - sc.heatmap_span
            hi = m.reference_temperature + sc.heatmap_span
            put(f"map_{tag}.pgm", export_heatmap(m, (lo, hi), sc.heatmap_upscale))
        put("report.txt", self.report_text())
        return written


def ideal_calibration(scenario: Scenario, rng=None) -> CalibrationTable:
    """Calibration from frames with every junction held exactly at the
    two calibration temperatures (the end of long black-body plateaus)."""
    sc = scenario
    rng = np.random.default_rng([sc.seed, 1]) if rng is None else rng
    n = sc.card.n_pixels
    lo = scan_frame(sc.card, sc.chain, sc.diode, np.full(n, sc.calibration_low), 0, rng)
    hi = scan_frame(sc.card, sc.chain, sc.diode, np.full(n, sc.calibration_high), 1, rng)
    return calibrate((lo, sc.calibration_low), (hi, sc.calibration_high), sc.card, sc.chain.order_for(sc.card))


def run_scenario(scenario: Scenario, calibration: CalibrationTable | None = None) -> RunArtifacts:
    """Run a scenario end to end.

    The physics advances in steps of ``dt``; the controller runs every
    ``control_period``; the card is scanned every ``sample_interval``
    and each frame goes over the byte protocol to the host decoder.
    Deterministic for a given scenario (including its seed).
    """
    sc = scenario
    sc.validate()
    table = calibration if calibration is not None else ideal_calibration(sc)
    if sc.mode == "chamber":
        return _run_chamber(sc, table)
    return _run_blackbody(sc, table)


def _context(t: float, subsystem: str, exc: Exception) -> ScenarioError:
    return ScenarioError(f"t={t:g} s [{subsystem}]: {exc}")


class _Acquisition:
    """Sensor scan -> wire bytes -> host decode, one frame per sample."""

    def __init__(self, sc: Scenario, table: CalibrationTable, rng):
        self.sc = sc
        self.table = table
        self.rng = rng
        self.stream = bytearray()
        self.decoder = FrameDecoder()
        self.count = 0

    def sample(self, t: float, junctions: np.ndarray, reference: float):
        try:
            frame = scan_frame(self.sc.card, self.sc.chain, self.sc.diode, junctions, self.count, self.rng)
            wire = encode_frame(frame)
        except Exception as exc:
            raise _context(t, "sensor", exc) from exc
        self.stream += wire
        self.count += 1
        try:
            (received,) = self.decoder.feed(wire)
            return received, codes_to_map(received, self.table, self.sc.card, reference, t)
        except Exception as exc:
            raise _context(t, "host", exc) from exc


def _snapshot_steps(sc: Scenario, steps_per_sample: int) -> dict[int, float]:
    return {int(round(s / sc.sample_interval)) * steps_per_sample: s for s in sc.snapshots}


def _finish_maps(art: RunArtifacts, snaps: dict[float, TemperatureMap]):
    for t, m in snaps.items():
        art.maps[t] = m
        art.reports[t] = uniformity_report(m)
        art.hotspots[t] = locate_hotspots(m, art.scenario.hotspot_threshold)


def _run_chamber(sc: Scenario, table: CalibrationTable) -> RunArtifacts:
    rng = np.random.default_rng(sc.seed)
    geom = sc.chamber.geometry(sc.card)
    net = build_network(geom, sc.network)
    state = initial_state(net)
    fils = np.array(net.ids(Role.FILAMENT))
    junctions = np.array(net.ids(Role.JUNCTION))
    tc_node = net.node(sc.thermocouple.node).id
    ids = {r: net.ids(r) for r in (Role.AIR, Role.WALL, Role.DOOR)}
    rec = sc.card.index(sc.record_pixel)

    n_steps = int(round(sc.duration / sc.dt))
    per_control = int(round(sc.control_period / sc.dt))
    per_sample = int(round(sc.sample_interval / sc.dt))
    snap_at = _snapshot_steps(sc, per_sample)

    acq = _Acquisition(sc, table, rng)
    pid = PidState()
    duty = 0.0
    reading = setpoint = math.nan
    power = np.zeros(len(net))
    cols = {k: [] for k in ("t", "setpoint", "thermocouple", "duty", "air", "wall", "door", "filament", "card_mean", "pixel", "junction")}
    snaps: dict[float, TemperatureMap] = {}

    for k in range(n_steps + 1):
        t = k * sc.dt
        if k % per_control == 0:
            try:
                reading = thermocouple_read(sc.thermocouple, state[tc_node], rng)
                setpoint = profile_setpoint(sc.profile, t)
                duty, pid = pid_step(sc.pid, pid, setpoint, reading, sc.control_period)
            except Exception as exc:
                raise _context(t, "control", exc) from exc
        if k % per_sample == 0:
            _, tmap = acq.sample(t, state[junctions], reading)
            cols["t"].append(t)
            cols["setpoint"].append(setpoint)
            cols["thermocouple"].append(reading)
            cols["duty"].append(duty)
            cols["air"].append(state[ids[Role.AIR]].mean())
            cols["wall"].append(state[ids[Role.WALL]].mean())
            cols["door"].append(state[ids[Role.DOOR]].mean() if ids[Role.DOOR] else math.nan)
            cols["filament"].append(state[fils].mean())
            cols["card_mean"].append(float(tmap.grid.mean()))
            cols["pixel"].append(float(tmap.grid.flat[rec]))
            cols["junction"].append(float(state[junctions[rec]]))
            if k in snap_at:
                snaps[snap_at[k]] = tmap
        if k == n_steps:
            break
        power[fils] = sc.chamber.heater_power if pwm_gate(duty, t, sc.pwm) else 0.0
        try:
            state = step(net, state, sc.dt, power)
        except Exception as exc:
            raise _context(t, "physics", exc) from exc

    art = RunArtifacts(sc, {k: np.asarray(v, dtype=float) for k, v in cols.items()}, bytes(acq.stream), table)
    _finish_maps(art, snaps)
    return art


def _first_transition(profile: TctProfile) -> tuple[float, float] | None:
    """(start, end) time of the first segment that changes the setpoint."""
    start_t = profile.breakpoints()
    prev = profile.initial
    for i, seg in enumerate(profile.segments):
        if seg.target != prev:
            end = start_t[i + 1] if i + 1 < len(start_t) else math.inf
            return start_t[i], end
        prev = seg.target
    return None


def _run_blackbody(sc: Scenario, table: CalibrationTable) -> RunArtifacts:
    rng = np.random.default_rng(sc.seed)
    net = build_card_network(sc.card, sc.network, temperature=sc.profile.initial)
    state = initial_state(net)
    encl = net.ids(Role.AMBIENT)[0]
    junctions = np.array(net.ids(Role.JUNCTION))
    rec = sc.card.index(sc.record_pixel)

    n_steps = int(round(sc.duration / sc.dt))
    per_sample = int(round(sc.sample_interval / sc.dt))
    snap_at = _snapshot_steps(sc, per_sample)
    acq = _Acquisition(sc, table, rng)
    cols = {k: [] for k in ("t", "blackbody", "card_mean", "pixel", "junction")}
    snaps: dict[float, TemperatureMap] = {}
    frames_at: dict[float, object] = {}

    for k in range(n_steps + 1):
        t = k * sc.dt
        state[encl] = profile_setpoint(sc.profile, t)
        if k % per_sample == 0:
            frame, tmap = acq.sample(t, state[junctions], state[encl])
            cols["t"].append(t)
            cols["blackbody"].append(state[encl])
            cols["card_mean"].append(float(tmap.grid.mean()))
            cols["pixel"].append(float(tmap.grid.flat[rec]))
            cols["junction"].append(float(state[junctions[rec]]))
            if k in snap_at:
                snaps[snap_at[k]] = tmap
                frames_at[snap_at[k]] = (frame, state[encl])
        if k == n_steps:
            break
        try:
            state = step(net, state, sc.dt)
        except Exception as exc:
            raise _context(t, "physics", exc) from exc

    art = RunArtifacts(sc, {k: np.asarray(v, dtype=float) for k, v in cols.items()}, bytes(acq.stream), table)
    _finish_maps(art, snaps)

    window = _first_transition(sc.profile)
    if window is not None:
        t = art.series["t"]
        sel = (t >= window[0]) & (t <= min(window[1], sc.duration))
        art.settling = fit_transient(t[sel], art.series["pixel"][sel])

    # two snapshots at distinct plateau temperatures calibrate the card
    plateaus = sorted(frames_at.items())
    if len(plateaus) >= 2 and plateaus[0][1][1] != plateaus[-1][1][1]:
        (_, low), (_, high) = plateaus[0], plateaus[-1]
        art.measured_calibration = calibrate(low, high, sc.card, sc.chain.order_for(sc.card))
    return art


def replay_frames(
    data: bytes,
    table: CalibrationTable,
    card: SensorCardGeometry,
    sample_interval: float,
    snapshots: Sequence[float],
    references: dict[float, float] | float,
) -> dict[float, TemperatureMap]:
    """Rebuild snapshot maps offline from a frame capture.

    Frame ``i`` of the capture was taken at ``i * sample_interval``.
    """
    frames = list(iter_frames(data))
    out = {}
    for s in snapshots:
        i = int(round(s / sample_interval))
        if i >= len(frames):
            raise ScenarioError(f"capture holds {len(frames)} frames, none at {s:g} s")
        ref = references[s] if isinstance(references, dict) else references
        out[float(s)] = codes_to_map(frames[i], table, card, ref, s)
    return out


# ---------------------------------------------------------------------------
# exports


def export_heatmap(tmap: TemperatureMap, bounds: tuple[float, float], upscale: int = 20) -> bytes:
    """Binary PGM (P5) rendering, black at ``bounds[0]``, white at ``bounds[1]``.

    Each sensor pixel becomes an ``upscale`` x ``upscale`` block; row A
    is at the top.
    """
    lo, hi = bounds
    if not lo < hi:
        raise ValueError("heatmap bounds need min < max")
    if upscale < 1:
        raise ValueError("upscale must be >= 1")
    frac = np.clip((tmap.grid - lo) / (hi - lo), 0.0, 1.0)
    gray = np.floor(frac * 255 + 0.5).astype(np.uint8)
    img = np.kron(gray, np.ones((upscale, upscale), dtype=np.uint8))
    h, w = img.shape
    return f"P5 {w} {h} 255\n".encode("ascii") + img.tobytes()


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def series_csv(t, values, names: Sequence[str] = ("value",)) -> str:
    """CSV with a header row and one row per sample.

    ``values`` is one sequence per column in ``names``; a single bare
    sequence is accepted for a one-column series.
    """
    t = list(t)
    if len(names) == 1 and (len(values) == 0 or np.ndim(values[0]) == 0):
        values = [values]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["t", *names])
    for i, ti in enumerate(t):
        w.writerow([_fmt(ti), *(_fmt(col[i]) for col in values)])
    return buf.getvalue()


def map_csv(tmap: TemperatureMap) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["row", *range(1, tmap.cols + 1)])
    for label, row in zip(tmap.row_labels, tmap.grid):
        w.writerow([label, *(_fmt(v) for v in row)])
    return buf.getvalue()


def export_csv(obj, values=None, names: Sequence[str] = ("value",)) -> str:
    """CSV text for a :class:`TemperatureMap` or a ``(t, values)`` series."""
    if isinstance(obj, TemperatureMap):
        return map_csv(obj)
    return series_csv(obj, [] if values is None else values, names)


def parse_map_csv(text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    return np.array([[float(v) for v in r[1:]] for r in rows[1:] if r])


def calibration_csv(table: CalibrationTable, card: SensorCardGeometry) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(table.to_rows(card))
    return buf.getvalue()


def parse_calibration_csv(text: str, card: SensorCardGeometry) -> CalibrationTable:
    return CalibrationTable.from_rows(list(csv.reader(io.StringIO(text))), card)
