"""
Host-side processing of sensor card frames: two-point calibration,
code-to-temperature maps, uniformity and hotspot analysis, and
single-exponential transient fitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import least_squares

from .frames import Frame
from .sensor import SensorCardGeometry

__all__ = [
    "CalibrationError",
    "NoTransientError",
    "CalibrationTable",
    "TemperatureMap",
    "UniformityReport",
    "Hotspot",
    "TransientFit",
    "calibrate",
    "codes_to_map",
    "uniformity_report",
    "locate_hotspots",
    "fit_transient",
    "settling_time",
]


class CalibrationError(ValueError):
    pass


class NoTransientError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationTable:
    """Per-pixel linear code -> °C map through two calibration points.

    Arrays are indexed by pixel index (row-major on the card), not by
    frame slot; ``scan_order`` links the two.
    """

    code_low: np.ndarray
    code_high: np.ndarray
    t_low: float
    t_high: float
    scan_order: tuple[int, ...]

    @property
    def span(self) -> tuple[float, float]:
        return (self.t_low, self.t_high)

    @property
    def gain(self) -> np.ndarray:
        """°C per code (negative for the default chain)."""
        return (self.t_high - self.t_low) / (self.code_high - self.code_low)

    @property
    def offset(self) -> np.ndarray:
        return self.t_low - self.gain * self.code_low

    def __len__(self):
        return len(self.scan_order)

    def temperature(self, codes) -> np.ndarray:
        """Convert codes given in pixel-index order.

        Written as a weighted mean of the two calibration temperatures so
        that both calibration codes map back exactly.
        """
        codes = np.asarray(codes, dtype=float)
        w = (codes - self.code_low) / (self.code_high - self.code_low)
        return (1.0 - w) * self.t_low + w * self.t_high

    def to_rows(self, card: SensorCardGeometry) -> list[list]:
        rows = [["pixel", "slot", "code_low", "code_high", "t_low", "t_high"]]
        slot_of = {p: s for s, p in enumerate(self.scan_order)}
        for i in range(len(self.scan_order)):
            rows.append(
                [card.label(i), slot_of[i], int(self.code_low[i]), int(self.code_high[i]), repr(self.t_low), repr(self.t_high)]
            )
        return rows

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[str]], card: SensorCardGeometry) -> "CalibrationTable":
        body = [r for r in rows[1:] if r]
        n = len(body)
        low = np.zeros(n)
        high = np.zeros(n)
        order = [0] * n
        t_low = t_high = None
        for r in body:
            i = card.index(r[0])
            order[int(r[1])] = i
            low[i] = float(r[2])
            high[i] = float(r[3])
            t_low, t_high = float(r[4]), float(r[5])
        return cls(low, high, t_low, t_high, tuple(order))


def _slot_codes_to_pixels(frame: Frame, order: Sequence[int]) -> np.ndarray:
    out = np.empty(len(order))
    out[list(order)] = frame.codes[: len(order)]
    return out


def calibrate(
    low: tuple[Frame, float],
    high: tuple[Frame, float],
    card: SensorCardGeometry,
    scan_order: Sequence[int] | None = None,
) -> CalibrationTable:
    """Two-point calibration from frames taken at two uniform temperatures.

    Parameters
    ----------
    low, high : (Frame, float)
        Frame read with the whole card at the given temperature (°C).
    card : SensorCardGeometry
        Card that produced the frames; fixes the pixel count and names.
    scan_order : sequence of int, optional
        Pixel index read into each frame slot. Row-major if omitted.

    Raises
    ------
    CalibrationError
        If the two temperatures coincide or a pixel reports the same
        code at both.
    """
    (f_low, t_low), (f_high, t_high) = low, high
    if t_low == t_high:
        raise CalibrationError("calibration temperatures must differ")
    order = tuple(range(card.n_pixels)) if scan_order is None else tuple(scan_order)
    if len(order) != card.n_pixels:
        raise CalibrationError(f"scan order covers {len(order)} pixels, card has {card.n_pixels}")
    c_low = _slot_codes_to_pixels(f_low, order)
    c_high = _slot_codes_to_pixels(f_high, order)
    flat = np.flatnonzero(c_low == c_high)
    if flat.size:
        names = ", ".join(card.label(int(i)) for i in flat)
        raise CalibrationError(f"degenerate pixel(s) {names}: same code at {t_low} and {t_high} °C")
    return CalibrationTable(c_low, c_high, float(t_low), float(t_high), order)


@dataclass(frozen=True)
class TemperatureMap:
    grid: np.ndarray
    timestamp: float = 0.0
    reference_temperature: float = 0.0

    @property
    def rows(self) -> int:
        return self.grid.shape[0]

    @property
    def cols(self) -> int:
        return self.grid.shape[1]

    @property
    def row_labels(self) -> list[str]:
        return [chr(ord("A") + r) for r in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, TemperatureMap):
            return NotImplemented
        return (
            self.timestamp == other.timestamp
            and self.reference_temperature == other.reference_temperature
            and np.array_equal(self.grid, other.grid)
        )


def codes_to_map(
    frame: Frame,
    table: CalibrationTable,
    card: SensorCardGeometry,
    reference: float,
    timestamp: float = 0.0,
) -> TemperatureMap:
    if len(table) != card.n_pixels:
        raise CalibrationError(f"table covers {len(table)} pixels, card has {card.n_pixels}")
    temps = table.temperature(_slot_codes_to_pixels(frame, table.scan_order))
    return TemperatureMap(temps.reshape(card.rows, card.cols), float(timestamp), float(reference))


class Hotspot(NamedTuple):
    row: str
    col: int  # 1-based
    delta: float

    @property
    def label(self) -> str:
        return f"{self.row}{self.col}"


@dataclass(frozen=True)
class UniformityReport:
    delta: np.ndarray
    max_abs_delta: float
    max_location: tuple[str, int]
    row_means: dict[str, float]
    row_mean_deltas: dict[str, float]
    mean_delta: float
    reference: float
    timestamp: float

    def format(self) -> str:
        lines = [
            f"t = {self.timestamp:g} s, reference {self.reference:g} °C",
            f"max |dT| = {self.max_abs_delta:.3f} °C at {self.max_location[0]}{self.max_location[1]}",
            f"mean dT = {self.mean_delta:+.3f} °C",
        ]
        for r, d in self.row_mean_deltas.items():
            cells = " ".join(f"{v:+6.2f}" for v in self.delta[ord(r) - ord("A")])
            lines.append(f"  {r}: mean {self.row_means[r]:8.3f} °C ({d:+.3f})  {cells}")
        return "\n".join(lines)


def uniformity_report(tmap: TemperatureMap) -> UniformityReport:
    delta = tmap.grid - tmap.reference_temperature
    flat = int(np.argmax(np.abs(delta)))
    r, c = divmod(flat, tmap.cols)
    labels = tmap.row_labels
    return UniformityReport(
        delta=delta,
        max_abs_delta=float(abs(delta[r, c])),
        max_location=(labels[r], c + 1),
        row_means={labels[i]: float(tmap.grid[i].mean()) for i in range(tmap.rows)},
        row_mean_deltas={labels[i]: float(delta[i].mean()) for i in range(tmap.rows)},
        mean_delta=float(delta.mean()),
        reference=tmap.reference_temperature,
        timestamp=tmap.timestamp,
    )


def locate_hotspots(tmap: TemperatureMap, threshold: float) -> list[Hotspot]:
    """Pixels with ``|T - reference| >= threshold``, largest deviation first.

    Ties are broken by row then column.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    delta = tmap.grid - tmap.reference_temperature
    labels = tmap.row_labels
    hits = [
        (r, c, float(delta[r, c]))
        for r in range(tmap.rows)
        for c in range(tmap.cols)
        if abs(delta[r, c]) >= threshold
    ]
    hits.sort(key=lambda h: (-abs(h[2]), h[0], h[1]))
    return [Hotspot(labels[r], c + 1, d) for r, c, d in hits]


@dataclass(frozen=True)
class TransientFit:
    t_infinity: float
    t_initial: float
    tau: float
    settling_time: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.t_infinity - (self.t_infinity - self.t_initial) * np.exp(-t / self.tau)


def settling_time(t, temps, final: float, swing: float, band: float = 0.01) -> float:
    """Time from ``t[0]`` of the first sample after which the series never
    leaves ``final +/- band * |swing|``. ``inf`` if it ends outside."""
    t = np.asarray(t, dtype=float)
    temps = np.asarray(temps, dtype=float)
    outside = np.flatnonzero(np.abs(temps - final) > band * abs(swing))
    if outside.size == 0:
        return 0.0
    k = outside[-1] + 1
    if k >= t.size:
        return math.inf
    return float(t[k] - t[0])


def fit_transient(t, temps, noise_floor: float = 1e-6) -> TransientFit:
    """Fit ``T(t) = T_inf - (T_inf - T0) exp(-t / tau)`` to a step response.

    Time is measured from the first sample. The fit is seeded by a
    straight line through ``log|T_inf_guess - T|``, with the final value
    guessed from the mean of the last 10 % of samples, then refined by
    nonlinear least squares. Settling time is taken on the raw series
    around the fitted final value, band 1 % of the fitted swing.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(temps, dtype=float)
    if t.size < 5 or t.size != y.size:
        raise ValueError("need at least 5 (t, T) samples of equal length")
    t = t - t[0]
    tail = max(1, int(math.ceil(0.1 * y.size)))
    t_inf0 = float(y[-tail:].mean())
    head = float(y[: max(1, min(tail, 3))].mean())
    noise = float(np.std(np.diff(y[-tail:]))) / math.sqrt(2) if tail > 2 else 0.0
    swing0 = t_inf0 - head
    if abs(swing0) <= max(noise_floor, 5.0 * noise) or float(np.ptp(y)) <= noise_floor:
        raise NoTransientError(f"series shows no transient (swing {swing0:.3g} °C)")

    gap = (t_inf0 - y) * math.copysign(1.0, swing0)
    use = gap > max(0.05 * abs(swing0), 3.0 * noise)
    if use.sum() >= 2:
        slope, intercept = np.polyfit(t[use], np.log(gap[use]), 1)
        tau0 = -1.0 / slope if slope < 0 else float(t[-1]) / 3.0
        t00 = t_inf0 - math.copysign(math.exp(intercept), swing0)
    else:
        tau0, t00 = float(t[-1]) / 5.0, head
    tau0 = min(max(tau0, 1e-3 * max(t[-1], 1e-9)), 1e3 * max(t[-1], 1e-9))

    def residual(p):
        t_inf, t_init, log_tau = p
        return t_inf - (t_inf - t_init) * np.exp(-t / math.exp(log_tau)) - y

    sol = least_squares(residual, [t_inf0, t00, math.log(tau0)], method="lm", xtol=1e-12, ftol=1e-12)
    t_inf, t_init, log_tau = sol.x
    tau = math.exp(log_tau)
    swing = t_inf - t_init
    return TransientFit(float(t_inf), float(t_init), tau, settling_time(t, y, t_inf, swing))
