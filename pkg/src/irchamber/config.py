"""
Scenario files.

A scenario file is plain text, one ``key = value`` per line. ``#`` starts
a comment. Keys are either top-level scenario fields or
``section.field`` where the section is one of ``card``, ``chamber``,
``network``, ``pid``, ``pwm``, ``thermocouple``, ``diode``, ``chain``,
``profile``. A file may start from a built-in with ``base = soak100``;
later lines override it. Example::

    base = soak100
    name = soak150
    seed = 7
    snapshots = 120, 600
    profile.segments = 150/0/inf
    pid.kp = 0.06
    network.door_leak = 0.5

Value syntax:

* numbers as Python literals; ``inf`` is accepted
* booleans ``true`` / ``false``
* lists separated by commas (``snapshots``, ``chamber.rows_under_filaments``,
  ``chain.scan_order``; ``chain.scan_order = row-major`` restores the default)
* ``profile.segments`` is a comma-separated list of ``target/ramp_rate/dwell``
  triples (°C, °C/s with 0 for a step, s)
"""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path

from .control import Segment
from .scenario import Scenario, ScenarioError, builtin_scenario

__all__ = ["ConfigError", "parse_scenario", "load_scenario", "dump_scenario"]

SECTIONS = ("card", "chamber", "network", "pid", "pwm", "thermocouple", "diode", "chain", "profile")


class ConfigError(ScenarioError):
    pass


def _number(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("inf", "+inf", "infinity"):
        return math.inf
    if low in ("-inf", "-infinity"):
        return -math.inf
    try:
        return int(t)
    except ValueError:
        return float(t)


def _coerce(key: str, current, text: str):
    text = text.strip()
    if key == "profile.segments":
        segs = []
        for item in filter(None, (s.strip() for s in text.split(","))):
            parts = item.split("/")
            if len(parts) != 3:
                raise ConfigError(f"segment {item!r} is not target/ramp_rate/dwell")
            segs.append(Segment(*(float(_number(p)) for p in parts)))
        return tuple(segs)
    if key == "chain.scan_order":
        if text.lower() in ("", "row-major", "none"):
            return None
        return tuple(int(v) for v in text.split(","))
    if isinstance(current, bool):
        if text.lower() not in ("true", "false"):
            raise ConfigError(f"{key}: expected true or false, got {text!r}")
        return text.lower() == "true"
    if isinstance(current, tuple):
        items = [s.strip() for s in text.split(",") if s.strip()]
        if current and isinstance(current[0], str) or key.endswith("rows_under_filaments"):
            return tuple(items)
        return tuple(float(_number(s)) for s in items)
    if isinstance(current, int):
        value = _number(text)
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{key}: expected an integer, got {text!r}")
        return int(value)
    if isinstance(current, float):
        return float(_number(text))
    return text


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        entries.append((lineno, key, value))

    base = next((v for _, k, v in entries if k == "base"), None)
    scenario = builtin_scenario(base) if base else Scenario(name=Path(source).stem or "scenario")
    top: dict = {}
    sections: dict[str, dict] = {}
    for lineno, key, value in entries:
        if key == "base":
            continue
        where = f"{source}:{lineno}"
        if "." in key:
            sec, fld = key.split(".", 1)
            if sec not in SECTIONS:
                raise ConfigError(f"{where}: unknown section {sec!r}")
            obj = sections.get(sec) or {}
            target = getattr(scenario, sec)
            names = {f.name for f in dataclasses.fields(target)}
            if fld not in names:
                raise ConfigError(f"{where}: {sec} has no field {fld!r}")
            try:
                obj[fld] = _coerce(key, getattr(target, fld), value)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{where}: {exc}") from exc
            sections[sec] = obj
        else:
            names = {f.name for f in dataclasses.fields(scenario)}
            if key not in names or key in SECTIONS:
                raise ConfigError(f"{where}: unknown key {key!r}")
            try:
                top[key] = _coerce(key, getattr(scenario, key), value)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{where}: {exc}") from exc

    try:
        built = {sec: dataclasses.replace(getattr(scenario, sec), **kv) for sec, kv in sections.items()}
        return dataclasses.replace(scenario, **top, **built)
    except (ValueError, TypeError, ScenarioError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_scenario(path) -> Scenario:
    """Read a scenario file, or return the built-in of that name."""
    p = Path(path)
    if not p.exists():
        try:
            return builtin_scenario(str(path))
        except ScenarioError:
            raise ConfigError(f"{path}: no such file or built-in scenario") from None
    return parse_scenario(p.read_text(), str(p))


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if value == math.inf else repr(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], Segment):
            return ", ".join(f"{_render(s.target)}/{_render(s.ramp_rate)}/{_render(s.dwell)}" for s in value)
        return ", ".join(_render(v) for v in value)
    if isinstance(value, frozenset):
        return ", ".join(sorted(value))
    return str(value)


def dump_scenario(scenario: Scenario) -> str:
    """Render a scenario as a complete file that parses back to it."""
    lines = []
    for f in dataclasses.fields(scenario):
        if f.name in SECTIONS:
            continue
        lines.append(f"{f.name} = {_render(getattr(scenario, f.name))}")
    for sec in SECTIONS:
        obj = getattr(scenario, sec)
        for f in dataclasses.fields(obj):
            value = getattr(obj, f.name)
            if sec == "chain" and f.name == "scan_order" and value is None:
                value = "row-major"
            lines.append(f"{sec}.{f.name} = {_render(value)}")
    return "\n".join(lines) + "\n"
