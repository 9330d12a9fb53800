"""
Chamber temperature control: discrete PID, PWM filament gating,
thermocouple readout and temperature-cycling setpoint profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "ControlError",
    "PidConfig",
    "PidState",
    "PwmConfig",
    "ThermocoupleModel",
    "Segment",
    "TctProfile",
    "pid_step",
    "quantized_duty",
    "pwm_gate",
    "thermocouple_read",
    "profile_setpoint",
    "CHAMBER_RANGE",
]

CHAMBER_RANGE = (20.0, 250.0)


class ControlError(ValueError):
    pass


@dataclass(frozen=True)
class PidConfig:
    kp: float = 0.08
    ki: float = 0.002
    kd: float = 0.0
    output_min: float = 0.0
    output_max: float = 1.0
    integral_clamp: float = 1.0

    def __post_init__(self):
        if not self.output_min < self.output_max:
            raise ControlError("output_min must be below output_max")
        if not (0.0 <= self.output_min and self.output_max <= 1.0):
            raise ControlError("output limits must lie in [0, 1]")
        if min(self.kp, self.ki, self.kd) < 0:
            raise ControlError("PID gains must be non-negative")
        if self.integral_clamp < 0:
            raise ControlError("integral_clamp must be non-negative")


@dataclass(frozen=True)
class PidState:
    # integral term already scaled by ki, i.e. in duty units
    integral: float = 0.0
    previous_error: float | None = None
    last_duty: float = 0.0


def pid_step(config: PidConfig, state: PidState, setpoint: float, measurement: float, dt: float):
    """One controller update; returns ``(duty, new_state)``.

    The integral is held whenever the unclamped output is saturated and
    the error would push it further into saturation. On the first call
    the derivative term is zero.
    """
    if not dt > 0:
        raise ControlError("dt must be positive")
    e = setpoint - measurement
    prev = e if state.previous_error is None else state.previous_error
    derivative = config.kd * (e - prev) / dt

    integral = state.integral + config.ki * e * dt
    integral = min(max(integral, -config.integral_clamp), config.integral_clamp)
    raw = config.kp * e + integral + derivative
    if (raw > config.output_max and e > 0) or (raw < config.output_min and e < 0):
        integral = state.integral
        raw = config.kp * e + integral + derivative
    duty = min(max(raw, config.output_min), config.output_max)
    return duty, PidState(integral=integral, previous_error=e, last_duty=duty)


@dataclass(frozen=True)
class PwmConfig:
    period: float = 4.0
    quantum: float = 0.1

    def __post_init__(self):
        if not 0 < self.quantum <= self.period:
            raise ControlError("need 0 < quantum <= period")

    @property
    def slots(self) -> int:
        return max(1, int(math.floor(self.period / self.quantum + 0.5)))


def _on_slots(duty: float, config: PwmConfig) -> int:
    if not 0.0 <= duty <= 1.0:
        raise ControlError(f"duty {duty} outside [0, 1]")
    return int(math.floor(duty * config.slots + 0.5))


def quantized_duty(duty: float, config: PwmConfig) -> float:
    """Duty actually delivered after rounding on-time to the time quantum."""
    return _on_slots(duty, config) / config.slots


def pwm_gate(duty: float, t: float, config: PwmConfig) -> bool:
    """Heater state at time ``t``: on during the first part of each period."""
    on = _on_slots(duty, config)
    # small offset absorbs accumulated float error in t
    slot = int(math.floor(t / config.quantum + 1e-9)) % config.slots
    return slot < on


@dataclass(frozen=True)
class ThermocoupleModel:
    node: str = "air"
    quantization: float = 1.0
    noise_sigma: float = 0.0

    def __post_init__(self):
        if not self.quantization > 0:
            raise ControlError("quantization must be positive")
        if self.noise_sigma < 0:
            raise ControlError("noise_sigma must be >= 0")


def thermocouple_read(model: ThermocoupleModel, true_temperature: float, rng_seed=None) -> float:
    """Reading rounded half-up to the nearest quantization step."""
    t = float(true_temperature)
    if model.noise_sigma > 0:
        t += float(np.random.default_rng(rng_seed).normal(0.0, model.noise_sigma))
    q = model.quantization
    return math.floor(t / q + 0.5) * q


@dataclass(frozen=True)
class Segment:
    target: float
    ramp_rate: float = 0.0  # °C/s, 0 means an instantaneous step
    dwell: float = math.inf

    def __post_init__(self):
        lo, hi = CHAMBER_RANGE
        if not lo <= self.target <= hi:
            raise ControlError(f"target {self.target} °C outside chamber range {lo}..{hi}")
        if self.ramp_rate < 0:
            raise ControlError("ramp_rate must be >= 0")
        if not self.dwell >= 0:
            raise ControlError("dwell must be >= 0")


@dataclass(frozen=True)
class TctProfile:
    segments: tuple[Segment, ...] = field(default_factory=tuple)
    initial: float = 25.0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def soak(cls, target: float, initial: float = 25.0) -> "TctProfile":
        return cls((Segment(target),), initial)

    @classmethod
    def cycle(cls, low: float, high: float, ramp_rate: float, dwell: float, cycles: int, initial: float = 25.0):
        segs = []
        for _ in range(cycles):
            segs += [Segment(high, ramp_rate, dwell), Segment(low, ramp_rate, dwell)]
        return cls(tuple(segs), initial)

    def breakpoints(self) -> list[float]:
        """Times at which each segment starts."""
        out, t, start = [], 0.0, self.initial
        for seg in self.segments:
            out.append(t)
            ramp = abs(seg.target - start) / seg.ramp_rate if seg.ramp_rate > 0 else 0.0
            t += ramp + seg.dwell
            start = seg.target
        return out

    @property
    def duration(self) -> float:
        return self.breakpoints()[-1] + _segment_length(self, len(self.segments) - 1) if self.segments else 0.0

    def with_initial(self, initial: float) -> "TctProfile":
        return replace(self, initial=initial)


def _segment_length(profile: TctProfile, i: int) -> float:
    seg = profile.segments[i]
    start = profile.initial if i == 0 else profile.segments[i - 1].target
    ramp = abs(seg.target - start) / seg.ramp_rate if seg.ramp_rate > 0 else 0.0
    return ramp + seg.dwell


def profile_setpoint(profile: TctProfile, t: float) -> float:
    """Setpoint at time ``t``: ramp toward each target, then dwell."""
    if not profile.segments:
        raise ControlError("profile has no segments")
    if t < 0:
        raise ControlError("t must be >= 0")
    start, t0 = profile.initial, 0.0
    for seg in profile.segments:
        if seg.ramp_rate > 0:
            ramp = abs(seg.target - start) / seg.ramp_rate
            if t < t0 + ramp:
                return start + math.copysign(seg.ramp_rate, seg.target - start) * (t - t0)
        else:
            ramp = 0.0
        if t < t0 + ramp + seg.dwell:
            return seg.target
        t0 += ramp + seg.dwell
        start = seg.target
    return profile.segments[-1].target
