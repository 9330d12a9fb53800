"""
Command line front end.

::

    python3 -m irchamber run soak100 --out-dir out/soak
    python3 -m irchamber run my.scn --seed 3 --snapshot 120 --snapshot 600
    python3 -m irchamber calibrate --out-dir out/cal
    python3 -m irchamber replay out/soak/frames.bin --calibration out/soak/calibration.csv \
        --series out/soak/series.csv --snapshot 600 --out-dir out/replay
    python3 -m irchamber export out/soak/map_600.csv --low 95 --high 105 -o map.pgm
    python3 -m irchamber show soak100
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from pathlib import Path

import numpy as np

from .config import dump_scenario, load_scenario
from .control import profile_setpoint
from .host import TemperatureMap, locate_hotspots, uniformity_report
from .scenario import (
    BUILTIN_SCENARIOS,
    ScenarioError,
    calibration_csv,
    export_heatmap,
    map_csv,
    parse_calibration_csv,
    parse_map_csv,
    replay_frames,
    run_scenario,
)

__all__ = ["main", "build_parser"]


def _scenario(args):
    sc = load_scenario(args.scenario)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.snapshot:
        changes["snapshots"] = tuple(args.snapshot)
    return dataclasses.replace(sc, **changes) if changes else sc


def _load_table(path, card):
    return parse_calibration_csv(Path(path).read_text(), card)


def _cmd_run(args) -> int:
    sc = _scenario(args)
    table = _load_table(args.calibration, sc.card) if args.calibration else None
    art = run_scenario(sc, table)
    out = Path(args.out_dir or f"out/{sc.name}")
    art.write(out)
    sys.stdout.write(art.report_text())
    print(f"wrote {out}")
    return 0


def _cmd_calibrate(args) -> int:
    sc = _scenario(args)
    if sc.mode != "blackbody" or len(sc.snapshots) < 2:
        raise ScenarioError("calibration needs a blackbody scenario with two plateau snapshots")
    art = run_scenario(sc)
    if art.measured_calibration is None:
        raise ScenarioError("first and last snapshots are at the same temperature")
    out = Path(args.out_dir or f"out/{sc.name}")
    art.write(out)
    # the measured table replaces the ideal one the run decoded with
    (out / "calibration.csv").write_text(calibration_csv(art.measured_calibration, sc.card), newline="")
    sys.stdout.write(art.report_text())
    print(f"wrote {out / 'calibration.csv'}")
    return 0


def _series_references(path, snapshots):
    rows = list(csv.DictReader(io.StringIO(Path(path).read_text())))
    col = "thermocouple" if rows and "thermocouple" in rows[0] else "blackbody"
    by_t = {float(r["t"]): float(r[col]) for r in rows}
    missing = [s for s in snapshots if s not in by_t]
    if missing:
        raise ScenarioError(f"series has no sample at {missing}")
    return {s: by_t[s] for s in snapshots}


def _cmd_replay(args) -> int:
    sc = load_scenario(args.scenario)
    table = _load_table(args.calibration, sc.card)
    snaps = tuple(args.snapshot or sc.snapshots)
    if not snaps:
        raise ScenarioError("no snapshot times given")
    if args.series:
        refs = _series_references(args.series, snaps)
    elif args.reference is not None:
        refs = {s: args.reference for s in snaps}
    else:
        refs = {s: profile_setpoint(sc.profile, s) for s in snaps}
    maps = replay_frames(Path(args.frames).read_bytes(), table, sc.card, sc.sample_interval, snaps, refs)
    out = Path(args.out_dir or "out/replay")
    out.mkdir(parents=True, exist_ok=True)
    text = []
    for t, m in sorted(maps.items()):
        tag = f"{t:g}"
        (out / f"map_{tag}.csv").write_text(map_csv(m), newline="")
        span = (m.reference_temperature - sc.heatmap_span, m.reference_temperature + sc.heatmap_span)
        (out / f"map_{tag}.pgm").write_bytes(export_heatmap(m, span, sc.heatmap_upscale))
        spots = locate_hotspots(m, sc.hotspot_threshold)
        text.append(uniformity_report(m).format())
        text.append(f"hotspots |dT| >= {sc.hotspot_threshold:g} °C: " + (", ".join(h.label for h in spots) or "none"))
    (out / "report.txt").write_text("\n".join(text) + "\n")
    print("\n".join(text))
    return 0


def _cmd_export(args) -> int:
    grid = parse_map_csv(Path(args.map).read_text())
    pgm = export_heatmap(TemperatureMap(np.asarray(grid)), (args.low, args.high), args.upscale)
    dest = Path(args.output or Path(args.map).with_suffix(".pgm"))
    dest.write_bytes(pgm)
    print(f"wrote {dest}")
    return 0


def _cmd_show(args) -> int:
    sys.stdout.write(dump_scenario(_scenario(args)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irchamber", description="Heated test chamber and IR sensor card simulator.")
    sub = p.add_subparsers(dest="command", required=True)
    builtins = ", ".join(sorted(BUILTIN_SCENARIOS))

    def scenario_flags(sp, default=None):
        kw = {"nargs": "?", "default": default} if default else {}
        sp.add_argument("scenario", help=f"scenario file or built-in ({builtins})", **kw)
        sp.add_argument("--seed", type=int, help="override the scenario seed")
        sp.add_argument("--snapshot", type=float, action="append", metavar="S", help="map snapshot time in s (repeatable)")

    r = sub.add_parser("run", help="run a scenario and write its artifacts")
    scenario_flags(r)
    r.add_argument("--out-dir", help="output directory (default out/<name>)")
    r.add_argument("--calibration", help="calibration.csv to decode with instead of the ideal table")
    r.set_defaults(func=_cmd_run)

    c = sub.add_parser("calibrate", help="run a black-body calibration and write the measured table")
    scenario_flags(c, default="calibration")
    c.add_argument("--out-dir", help="output directory (default out/<name>)")
    c.set_defaults(func=_cmd_calibrate)

    rp = sub.add_parser("replay", help="rebuild maps from a frames.bin capture")
    rp.add_argument("frames", help="frames.bin capture")
    rp.add_argument("--calibration", required=True, help="calibration.csv")
    rp.add_argument("--scenario", default="soak100", help="scenario the capture came from (card, sample interval)")
    rp.add_argument("--snapshot", type=float, action="append", metavar="S", help="snapshot time in s (repeatable)")
    ref = rp.add_mutually_exclusive_group()
    ref.add_argument("--series", help="series.csv of the run, for the reference temperatures")
    ref.add_argument("--reference", type=float, help="reference temperature for every snapshot")
    rp.add_argument("--out-dir", help="output directory (default out/replay)")
    rp.set_defaults(func=_cmd_replay)

    e = sub.add_parser("export", help="render a map CSV as a PGM heatmap")
    e.add_argument("map", help="map_<t>.csv")
    e.add_argument("--low", type=float, required=True, help="°C drawn black")
    e.add_argument("--high", type=float, required=True, help="°C drawn white")
    e.add_argument("--upscale", type=int, default=20, help="image pixels per sensor pixel")
    e.add_argument("-o", "--output", help="output file (default: map path with .pgm)")
    e.set_defaults(func=_cmd_export)

    s = sub.add_parser("show", help="print a scenario in config file form")
    scenario_flags(s)
    s.set_defaults(func=_cmd_show)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"irchamber: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
