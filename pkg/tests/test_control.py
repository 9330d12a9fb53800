import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from irchamber.control import (
    ControlError,
    PidConfig,
    PidState,
    PwmConfig,
    Segment,
    TctProfile,
    ThermocoupleModel,
    pid_step,
    profile_setpoint,
    pwm_gate,
    quantized_duty,
    thermocouple_read,
)


def test_pid_zero_error_zero_state():
    duty, st_ = pid_step(PidConfig(), PidState(), 100.0, 100.0, 1.0)
    assert duty == 0.0 and st_.integral == 0.0


def test_pid_proportional_only():
    duty, _ = pid_step(PidConfig(kp=0.01, ki=0, kd=0), PidState(), 150.0, 100.0, 1.0)
    assert duty == pytest.approx(0.5)


def test_pid_saturation_freezes_integral():
    cfg = PidConfig(kp=1.0, ki=0.1)
    duty, st_ = pid_step(cfg, PidState(integral=0.2), 500.0, 0.0, 1.0)
    assert duty == 1.0
    assert st_.integral == 0.2
    # saturated high but the error points back down: the integral unwinds
    cfg = PidConfig(kp=0.001, ki=0.1, output_max=0.8)
    duty, st2 = pid_step(cfg, PidState(integral=0.95), 0.0, 0.5, 1.0)
    assert duty == 0.8 and st2.integral == pytest.approx(0.9)


@given(st.floats(-300, 300), st.floats(-1, 1), st.floats(0.01, 10))
def test_pid_all_zero_gains_gives_output_min(e, integral, dt):
    cfg = PidConfig(kp=0, ki=0, kd=0, output_min=0.0)
    duty, _ = pid_step(cfg, PidState(integral=0.0), e, 0.0, dt)
    assert duty == 0.0


@given(st.lists(st.floats(-200, 200), min_size=1, max_size=50))
def test_pid_state_invariants(errors):
    cfg = PidConfig(kp=0.05, ki=0.02, kd=0.1, integral_clamp=0.6)
    s = PidState()
    for e in errors:
        duty, s = pid_step(cfg, s, e, 0.0, 1.0)
        assert cfg.output_min <= duty <= cfg.output_max
        assert abs(s.integral) <= cfg.integral_clamp
        assert s.last_duty == duty


def test_pid_derivative_zero_on_first_call():
    cfg = PidConfig(kp=0, ki=0, kd=5.0)
    d1, s = pid_step(cfg, PidState(), 10.0, 0.0, 1.0)
    assert d1 == 0.0
    d2, _ = pid_step(cfg, s, 10.1, 0.0, 1.0)
    assert d2 == pytest.approx(0.5)


def test_pid_validation():
    with pytest.raises(ControlError):
        PidConfig(output_min=0.5, output_max=0.5)
    with pytest.raises(ControlError):
        PidConfig(kp=-1)
    with pytest.raises(ControlError):
        pid_step(PidConfig(), PidState(), 1, 0, 0.0)


def test_pwm_quarter_duty_enumerated():
    cfg = PwmConfig(period=4.0, quantum=0.1)
    gates = [pwm_gate(0.25, k * 0.1, cfg) for k in range(40)]
    assert gates == [True] * 10 + [False] * 30
    assert sum(gates) / 40 == 0.25


@pytest.mark.parametrize("duty, expected", [(0.0, False), (1.0, True)])
def test_pwm_extremes(duty, expected):
    cfg = PwmConfig()
    assert all(pwm_gate(duty, k * 0.1, cfg) is expected for k in range(200))


@given(st.floats(0, 1), st.integers(0, 50))
def test_pwm_period_mean_equals_quantized_duty(duty, period_index):
    cfg = PwmConfig(period=4.0, quantum=0.1)
    t0 = period_index * cfg.period
    on = sum(pwm_gate(duty, t0 + k * cfg.quantum, cfg) for k in range(cfg.slots))
    assert on / cfg.slots == quantized_duty(duty, cfg)
    assert abs(quantized_duty(duty, cfg) - duty) <= 0.5 / cfg.slots + 1e-12


def test_pwm_validation():
    with pytest.raises(ControlError):
        PwmConfig(period=1.0, quantum=2.0)
    with pytest.raises(ControlError):
        pwm_gate(1.5, 0.0, PwmConfig())


@pytest.mark.parametrize("t, reading", [(100.0, 100.0), (100.4, 100.0), (100.5, 101.0), (99.5, 100.0), (-0.5, 0.0)])
def test_thermocouple_rounding(t, reading):
    assert thermocouple_read(ThermocoupleModel(), t) == reading


def test_thermocouple_noise_seeded():
    m = ThermocoupleModel(quantization=0.01, noise_sigma=0.5)
    a = [thermocouple_read(m, 50.0, np.random.default_rng(9)) for _ in range(3)]
    assert a[0] == a[1] == a[2]
    assert thermocouple_read(m, 50.0, 1) == thermocouple_read(m, 50.0, 1)
    with pytest.raises(ControlError):
        ThermocoupleModel(quantization=0)


def test_profile_examples():
    soak = TctProfile((Segment(100.0, 0.0, math.inf),))
    assert all(profile_setpoint(soak, t) == 100.0 for t in (0, 1, 1e6))
    ramp = TctProfile((Segment(100.0, 1.0, 60.0),), initial=25.0)
    assert profile_setpoint(ramp, 10.0) == pytest.approx(35.0)
    assert profile_setpoint(ramp, 75.0) == 100.0
    assert profile_setpoint(ramp, 1e5) == 100.0
    with pytest.raises(ControlError):
        profile_setpoint(TctProfile(()), 0.0)
    with pytest.raises(ControlError):
        profile_setpoint(ramp, -1.0)


def test_segment_validation():
    with pytest.raises(ControlError):
        Segment(300.0)
    with pytest.raises(ControlError):
        Segment(100.0, dwell=-1)
    with pytest.raises(ControlError):
        Segment(100.0, ramp_rate=-0.5)


def test_cycle_profile_breakpoints():
    p = TctProfile.cycle(low=20, high=120, ramp_rate=0.5, dwell=300, cycles=2)
    assert len(p.segments) == 4
    # 25 -> 120 at 0.5 °C/s is 190 s of ramp; each later ramp spans 100 °C
    assert p.breakpoints() == [0.0, 490.0, 990.0, 1490.0]
    assert p.duration == 1990.0


@given(st.floats(0, 3000), st.floats(1e-6, 1e-3))
def test_ramped_profile_is_continuous(t, h):
    p = TctProfile.cycle(low=20, high=120, ramp_rate=0.5, dwell=300, cycles=2)
    # ramps move at 0.5 °C/s, so a tiny time step moves the setpoint at most 0.5 h
    assert abs(profile_setpoint(p, t + h) - profile_setpoint(p, t)) <= 0.5 * h + 1e-9
