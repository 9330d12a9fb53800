"""
Sensor card model: pixel geometry, diode sensing law, amplifier and ADC.

The card is a grid of black copper plates ("pixels"), each carrying a
small SMD diode whose forward voltage falls linearly with junction
temperature. An analog multiplexer walks the diodes in ``scan_order``;
each voltage goes through an instrumentation amplifier into a 10 bit
ADC. The serial framing of the resulting codes lives in
:mod:`irchamber.frames`.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .frames import FRAME_CODES, Frame

__all__ = [
    "SensorCardGeometry",
    "DiodeModel",
    "SignalChainModel",
    "SensorError",
    "LEGACY_CARD",
    "forward_voltage",
    "adc_quantize",
    "scan_frame",
]


class SensorError(ValueError):
    pass


@dataclass(frozen=True)
class SensorCardGeometry:
    """Layout of the pixel grid.

    Rows are labelled ``A``, ``B``, ... and columns are numbered from 1,
    so pixel ``B2`` is row index 1, column index 1. Pixel indices are
    row-major. All lengths are in metres.
    """

    rows: int = 4
    cols: int = 8
    pixel_size: float = 5e-3
    gap: float = 1.25e-3
    trace_width: float = 178e-6
    copper_thickness: float = 35e-6
    board_thickness: float = 1.55e-3

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise SensorError(f"card needs at least one pixel, got {self.rows}x{self.cols}")
        if self.rows > len(string.ascii_uppercase):
            raise SensorError(f"at most 26 rows are supported, got {self.rows}")
        for name in ("pixel_size", "gap", "trace_width", "copper_thickness", "board_thickness"):
            if not getattr(self, name) > 0:
                raise SensorError(f"{name} must be positive")

    @property
    def n_pixels(self) -> int:
        return self.rows * self.cols

    @property
    def pitch(self) -> float:
        return self.pixel_size + self.gap

    @property
    def pixel_area(self) -> float:
        return self.pixel_size**2

    @property
    def row_labels(self) -> list[str]:
        return list(string.ascii_uppercase[: self.rows])

    def label(self, index: int) -> str:
        r, c = divmod(index, self.cols)
        return f"{string.ascii_uppercase[r]}{c + 1}"

    def labels(self) -> list[str]:
        return [self.label(i) for i in range(self.n_pixels)]

    def index(self, label: str) -> int:
        r = string.ascii_uppercase.index(label[0].upper())
        c = int(label[1:]) - 1
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise SensorError(f"pixel {label!r} is not on a {self.rows}x{self.cols} card")
        return r * self.cols + c

    def pixel_centers(self) -> np.ndarray:
        """(n_pixels, 3) centre coordinates in the card plane z = 0.

        The card is centred on the origin; columns run along +x and row A
        sits at the largest y (the door side).
        """
        r, c = np.divmod(np.arange(self.n_pixels), self.cols)
        x = (c - (self.cols - 1) / 2) * self.pitch
        y = ((self.rows - 1) / 2 - r) * self.pitch
        return np.column_stack([x, y, np.zeros_like(x)])

    def row_y(self, label: str) -> float:
        r = self.row_labels.index(label)
        return ((self.rows - 1) / 2 - r) * self.pitch

    @property
    def width(self) -> float:
        return self.cols * self.pitch - self.gap

    @property
    def height(self) -> float:
        return self.rows * self.pitch - self.gap

    def neighbours(self) -> list[tuple[int, int]]:
        """Horizontally and vertically adjacent pixel index pairs."""
        pairs = []
        for i in range(self.n_pixels):
            r, c = divmod(i, self.cols)
            if c + 1 < self.cols:
                pairs.append((i, i + 1))
            if r + 1 < self.rows:
                pairs.append((i, i + self.cols))
        return pairs


# first-generation card: 4x4 grid of 10 mm plates
LEGACY_CARD = SensorCardGeometry(rows=4, cols=4, pixel_size=10e-3)


@dataclass(frozen=True)
class DiodeModel:
    v_ref: float = 0.650
    t_ref: float = 25.0
    sensitivity: float = -0.002
    noise_sigma: float = 0.0

    def __post_init__(self):
        if not self.sensitivity < 0:
            raise SensorError("diode sensitivity must be negative")
        if not self.v_ref > 0:
            raise SensorError("v_ref must be positive")
        if self.noise_sigma < 0:
            raise SensorError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class SignalChainModel:
    """Amplifier, ADC and multiplexer settings.

    ``scan_order[i]`` is the pixel index read into frame slot ``i``;
    ``None`` means row-major order over the whole card.
    """

    amp_gain: float = 5.0
    amp_offset: float = 0.200
    adc_bits: int = 10
    adc_vref: float = 2.5
    scan_order: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        if not self.amp_gain > 0:
            raise SensorError("amp_gain must be positive")
        if not self.adc_vref > 0:
            raise SensorError("adc_vref must be positive")
        if self.adc_bits != 10:
            raise SensorError("the readout carries 10 bit codes only")
        if self.scan_order is not None:
            order = tuple(int(i) for i in self.scan_order)
            if sorted(order) != list(range(len(order))):
                raise SensorError(f"scan_order is not a permutation: {order}")
            if len(order) > FRAME_CODES:
                raise SensorError(f"a frame holds at most {FRAME_CODES} pixels")
            object.__setattr__(self, "scan_order", order)

    @property
    def full_scale(self) -> int:
        return 1 << self.adc_bits

    def order_for(self, card: SensorCardGeometry) -> tuple[int, ...]:
        if self.scan_order is None:
            if card.n_pixels > FRAME_CODES:
                raise SensorError(f"a frame holds at most {FRAME_CODES} pixels")
            return tuple(range(card.n_pixels))
        if len(self.scan_order) != card.n_pixels:
            raise SensorError(
                f"scan_order covers {len(self.scan_order)} pixels, card has {card.n_pixels}"
            )
        return self.scan_order


def _rng(rng_seed):
    return np.random.default_rng(rng_seed)


def forward_voltage(model: DiodeModel, junction_temperature, rng_seed=None):
    """Diode forward voltage (V) at the given junction temperature (°C).

    Works elementwise on arrays. Noise is only drawn when
    ``model.noise_sigma > 0``; the result is then a deterministic
    function of ``rng_seed`` (an int or a ``numpy.random.Generator``).
    """
    t = np.asarray(junction_temperature, dtype=float)
    v = model.v_ref + model.sensitivity * (t - model.t_ref)
    if model.noise_sigma > 0:
        v = v + _rng(rng_seed).normal(0.0, model.noise_sigma, size=np.shape(t))
    return v if v.ndim else float(v)


def adc_quantize(chain: SignalChainModel, diode_voltage):
    """Amplify and convert diode voltage(s) to integer ADC codes.

    Out-of-range inputs clamp to 0 or full scale - 1.
    """
    v_amp = chain.amp_gain * (np.asarray(diode_voltage, dtype=float) - chain.amp_offset)
    code = np.floor(v_amp / chain.adc_vref * chain.full_scale)
    code = np.clip(code, 0, chain.full_scale - 1).astype(np.int64)
    return code if code.ndim else int(code)


def _temperatures_by_pixel(card: SensorCardGeometry, temperatures) -> np.ndarray:
    if isinstance(temperatures, Mapping):
        out = np.empty(card.n_pixels)
        for i in range(card.n_pixels):
            label = card.label(i)
            if label in temperatures:
                out[i] = temperatures[label]
            elif i in temperatures:
                out[i] = temperatures[i]
            else:
                raise SensorError(f"no junction temperature for pixel {label}")
        return out
    arr = np.asarray(temperatures, dtype=float).ravel()
    if arr.size < card.n_pixels:
        raise SensorError(f"no junction temperature for pixel {card.label(arr.size)}")
    return arr[: card.n_pixels]


def scan_frame(
    card: SensorCardGeometry,
    chain: SignalChainModel,
    diode: DiodeModel,
    junction_temperatures: Mapping | Sequence[float] | np.ndarray,
    sequence: int,
    rng_seed=None,
) -> Frame:
    """Read every diode through the mux into one frame.

    ``junction_temperatures`` is keyed by pixel label (``"B2"``) or
    index, or is an array in pixel-index order. Slots beyond the card's
    pixel count are zero.
    """
    order = chain.order_for(card)
    temps = _temperatures_by_pixel(card, junction_temperatures)
    volts = forward_voltage(diode, temps[list(order)], rng_seed)
    codes = [int(c) for c in np.atleast_1d(adc_quantize(chain, volts))]
    codes += [0] * (FRAME_CODES - len(codes))
    return Frame(sequence=sequence % 256, codes=tuple(codes))
