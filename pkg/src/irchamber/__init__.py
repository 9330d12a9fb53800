"""
Desk-scale co-simulation of a PID/PWM heated test chamber and the
contactless IR sensor card that maps its temperature field.
"""

from .config import dump_scenario, load_scenario, parse_scenario
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
from .frames import Frame, FrameDecoder, decode_frame, encode_frame, iter_frames
from .host import (
    CalibrationTable,
    TemperatureMap,
    TransientFit,
    calibrate,
    codes_to_map,
    fit_transient,
    locate_hotspots,
    uniformity_report,
)
from .physics import (
    ChamberGeometry,
    NetworkParams,
    ThermalNetwork,
    build_card_network,
    build_network,
    default_chamber,
    initial_state,
    steady_state,
    step,
)
from .scenario import Scenario, builtin_scenario, export_csv, export_heatmap, run_scenario
from .sensor import DiodeModel, SensorCardGeometry, SignalChainModel, adc_quantize, forward_voltage, scan_frame
from .viewfactor import view_factor_matrix

__version__ = "0.1.0"

__all__ = [
    "dump_scenario",
    "load_scenario",
    "parse_scenario",
    "PidConfig",
    "PidState",
    "PwmConfig",
    "Segment",
    "TctProfile",
    "ThermocoupleModel",
    "pid_step",
    "profile_setpoint",
    "pwm_gate",
    "thermocouple_read",
    "Frame",
    "FrameDecoder",
    "decode_frame",
    "encode_frame",
    "iter_frames",
    "CalibrationTable",
    "TemperatureMap",
    "TransientFit",
    "calibrate",
    "codes_to_map",
    "fit_transient",
    "locate_hotspots",
    "uniformity_report",
    "ChamberGeometry",
    "NetworkParams",
    "ThermalNetwork",
    "build_card_network",
    "build_network",
    "default_chamber",
    "initial_state",
    "steady_state",
    "step",
    "Scenario",
    "builtin_scenario",
    "export_csv",
    "export_heatmap",
    "run_scenario",
    "DiodeModel",
    "SensorCardGeometry",
    "SignalChainModel",
    "adc_quantize",
    "forward_voltage",
    "scan_frame",
    "view_factor_matrix",
]
