"""Command-line interface: ``ringqec validate | table | run | sweep | fit``.

Every command accepts ``--config FILE`` holding flat ``key = value`` lines;
explicit flags override the file.  Results go to stdout (and ``--out``),
progress goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .codes import (
    CodeConstructionError,
    EnumerationBudgetError,
    build_code,
    enumeration_count,
    verify_distance,
)
from .decoder import build_table, default_w_max, format_table, load_table, save_table
from .experiment import (
    DEFAULT_FLOOR_MARGIN,
    FidelityCurve,
    FitError,
    fit_fidelity,
    fit_slope,
    plot_data,
    read_sweep_csv,
    run_memory_experiment,
    sweep_and_fit_slope,
    sweep_csv,
)
from .noise import NoiseParams, make_rng, sample_track
from .schedule import DEFAULT_NQ1, TimingParams, build_schedule
from .syndrome import format_trace, simulate_trial

log = logging.getLogger("ringqec")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_BUDGET = 4
EXIT_FIT = 5

OUT_DIR_ENV = "RINGQEC_OUT_DIR"
VERIFY_BUDGET = 20_000_000


class UsageError(Exception):
    pass


def _count(text) -> int:
    v = float(text)
    if v != int(v) or v < 0:
        raise ValueError(f"{text!r} is not a non-negative integer")
    return int(v)


def _flag(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


# name -> (parser, default, help); defaults apply after config file and flags
COMMON = {
    "family": (str, "linear", "code family: linear or cyclic"),
    "d": (int, None, "code distance"),
    "nq1": (int, DEFAULT_NQ1, "single-qubit gate layers per cycle"),
    "tg1": (float, 14.0, "single-qubit gate time, ns"),
    "tg2": (float, 26.0, "two-qubit gate time, ns"),
    "tm": (float, 880.0, "measurement + reset time, ns"),
}
OPTIONS = {
    "validate": {**COMMON,
                 "max_weight": (int, None, "distance-check enumeration weight "
                                           "(default: (d+1)/2, lowered to fit the budget)"),
                 "out": (str, None, "write the JSON report here")},
    "table": {**COMMON,
              "wmax": (int, None, "maximum enumerated error weight, default (d-1)/2"),
              "allow_large": (_flag, False, "permit tables beyond the enumeration budget"),
              "text": (_flag, False, "also write a human-readable dump next to the table"),
              "out": (str, None, "table file path")},
    "run": {**COMMON,
            "pb": (str, None, "between-cycle error probability"),
            "trials": (_count, 100_000, "Monte Carlo trials"),
            "cycles": (int, 50, "correction cycles"),
            "wmax": (int, None, "decode table weight, default (d-1)/2"),
            "table": (str, None, "load a prebuilt table file"),
            "seed": (int, None, "master seed (required)"),
            "workers": (int, 1, "worker processes"),
            "floor_margin": (float, DEFAULT_FLOOR_MARGIN, "fit excludes F <= 0.5 + margin"),
            "shared_coin": (_flag, False, "one readout coin per cycle instead of per ancilla"),
            "trace_dump": (_count, 0, "dump this many reference trial traces (debug)"),
            "out": (str, None, "result JSON path")},
    "sweep": {**COMMON,
              "pb": (str, "0.003..0.03", "list a,b,c or log range lo..hi"),
              "npoints": (int, 5, "points in a lo..hi range"),
              "trials": (_count, 100_000, "Monte Carlo trials per point"),
              "cycles": (int, 50, "correction cycles"),
              "wmax": (int, None, "decode table weight, default (d-1)/2"),
              "table": (str, None, "load a prebuilt table file"),
              "seed": (int, None, "master seed (required)"),
              "workers": (int, 1, "worker processes"),
              "floor_margin": (float, DEFAULT_FLOOR_MARGIN, "fit excludes F <= 0.5 + margin"),
              "shared_coin": (_flag, False, "one readout coin per cycle instead of per ancilla"),
              "out": (str, None, "CSV path; JSON and plot data are written alongside")},
    "fit": {"input": (str, None, "run JSON (re-fit curve) or sweep CSV (re-fit slope)"),
            "floor_margin": (float, DEFAULT_FLOOR_MARGIN, "fit excludes F <= 0.5 + margin")},
}


def parse_config_file(path: str, command: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; unknown keys are rejected."""
    spec = OPTIONS[command]
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in spec:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r} for {command}")
        values[key] = value
    return values


def resolve(command: str, args: argparse.Namespace) -> dict:
    spec = OPTIONS[command]
    raw = parse_config_file(args.config, command) if args.config else {}
    for key in spec:
        v = getattr(args, key, None)
        if v is not None:
            raw[key] = v
    cfg = {}
    for key, (conv, default, _) in spec.items():
        if key in raw:
            try:
                cfg[key] = conv(raw[key])
            except ValueError as exc:
                raise UsageError(f"--{key.replace('_', '-')}: {exc}") from None
        else:
            cfg[key] = default
    return cfg


def _parse_pb_list(text: str, npoints: int) -> list[float]:
    try:
        if ".." in text:
            lo, hi = (float(s) for s in text.split("..", 1))
            if not 0 < lo < hi:
                raise ValueError
            return [float(v) for v in np.geomspace(lo, hi, npoints)]
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"cannot parse p_b specification {text!r}") from None


def _code_and_schedule(cfg):
    if cfg["d"] is None:
        raise UsageError("--d is required")
    if cfg["family"] not in ("linear", "cyclic"):
        raise UsageError(f"unknown family {cfg['family']!r}")
    try:
        code = build_code(cfg["family"], cfg["d"])
    except CodeConstructionError as exc:
        raise UsageError(str(exc)) from None
    timing = TimingParams(cfg["tg1"], cfg["tg2"], cfg["tm"])
    return code, build_schedule(code, timing, cfg["nq1"])


def _out_path(cfg, default_name: str) -> Path:
    if cfg.get("out"):
        return Path(cfg["out"])
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / default_name


def _get_table(cfg, code):
    if cfg.get("table"):
        table = load_table(cfg["table"])
        if not table.matches(code):
            raise UsageError(f"table {cfg['table']} is not for {code.name}")
        return table
    return build_table(code, cfg["wmax"])


def _require_seed(cfg):
    if cfg["seed"] is None:
        raise UsageError("--seed is required")


def cmd_validate(cfg) -> int:
    code, schedule = _code_and_schedule(cfg)
    checks = code.invariant_report()
    checks.append((f"n_q2 == support span of g0 == {schedule.span}", schedule.n_q2 == schedule.span))
    checks.append(("windows are shifts of window 0",
                   all(schedule.windows[i] == frozenset((q + i) % code.n for q in schedule.windows[0])
                       for i in range(code.n))))
    mw = cfg["max_weight"]
    if mw is None:
        mw = max(w for w in range((code.distance + 1) // 2 + 1)
                 if enumeration_count(code.n, w) <= VERIFY_BUDGET)
    try:
        dist = verify_distance(code, mw, budget=VERIFY_BUDGET)
    except EnumerationBudgetError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    checks.append((f"errors up to weight {mw}: equal syndromes with combined weight < d "
                   "share a logical class", dist.correctable_pairs_ok))
    for desc, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}\t{code.name}\t{desc}")
    summary = schedule.summary()
    print("schedule\t" + "\t".join(f"{k}={v}" for k, v in summary.items() if k != "timing_ns"))
    report = {
        "code": {"family": code.family, "d": code.distance, "n": code.n, "base": str(code.base)},
        "checks": [{"check": d, "verdict": "PASS" if ok else "FAIL"} for d, ok in checks],
        "schedule": summary,
        "distance_check": dist.as_dict(),
        "min_logical_weight_found": dist.min_logical_weight_found,
        "verified_weight_bound": mw,
        "certified_distance_at_least": dist.certified_distance_at_least,
    }
    text = json.dumps(report, indent=2)
    if cfg["out"]:
        Path(cfg["out"]).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_VALIDATION


def cmd_table(cfg) -> int:
    code, _ = _code_and_schedule(cfg)
    w_max = cfg["wmax"] if cfg["wmax"] is not None else default_w_max(code)
    try:
        table = build_table(code, w_max, allow_large=cfg["allow_large"])
    except EnumerationBudgetError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    path = _out_path(cfg, f"table_{code.family}_d{code.distance}_w{w_max}.bin")
    save_table(table, path)
    if cfg["text"]:
        Path(str(path) + ".txt").write_text(format_table(table))
    print(json.dumps({"path": str(path), "family": code.family, "d": code.distance,
                      "n": code.n, "w_max": w_max, "entries": len(table)}))
    return EXIT_OK


def _noise_block(noise: NoiseParams) -> dict:
    return {"p_b": noise.p_b, "p_d": noise.p_d, "split": list(noise.split)}


def cmd_run(cfg) -> int:
    _require_seed(cfg)
    code, schedule = _code_and_schedule(cfg)
    if cfg["pb"] is None:
        raise UsageError("--pb is required")
    try:
        p_b = float(cfg["pb"])
    except ValueError:
        raise UsageError(f"--pb {cfg['pb']!r} is not a number") from None
    try:
        table = _get_table(cfg, code)
    except EnumerationBudgetError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    try:
        noise = NoiseParams.from_ratio(p_b, schedule.pd_ratio)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    log.info("run %s p_b=%g p_d=%g trials=%d cycles=%d", code.name, p_b, noise.p_d,
             cfg["trials"], cfg["cycles"])
    start = time.perf_counter()
    curve = run_memory_experiment(code, schedule, noise, cfg["cycles"], cfg["trials"],
                                  cfg["seed"], table, cfg["workers"], cfg["shared_coin"])
    wall = time.perf_counter() - start
    result = {
        "config": cfg,
        "code": {"family": code.family, "d": code.distance, "n": code.n,
                 "base": str(code.base), "w_max": table.w_max},
        "schedule": schedule.summary(),
        "noise": _noise_block(noise),
        "time_axis": "t_j = j * (cycle_gate_time + t_m), microseconds",
        "curve": curve.as_dict(),
        "floor_margin": cfg["floor_margin"],
        "fit": None,
        "misses": curve.misses,
        "version": __version__,
        "wall_clock_s": wall,
    }
    try:
        result["fit"] = fit_fidelity(curve, cfg["floor_margin"]).__dict__
    except FitError as exc:
        result["fit_error"] = str(exc)
        if p_b > 0:
            log.warning("fit failed: %s", exc)
    path = _out_path(cfg, f"run_{code.family}_d{code.distance}_pb{p_b:g}_s{cfg['seed']}.json")
    path.write_text(json.dumps(result, indent=2) + "\n")
    if cfg["trace_dump"]:
        rng = make_rng(cfg["seed"], 2**31)
        with open(str(path) + ".traces", "w") as fh:
            for k in range(cfg["trace_dump"]):
                track = sample_track(noise, code.n, cfg["cycles"], int(rng.integers(2**63)))
                trace = simulate_trial(code, schedule, track, rng, cfg["shared_coin"])
                fh.write(f"# trial {k}\n{format_trace(trace)}")
    print(json.dumps({k: result[k] for k in ("fit", "misses")} | {"path": str(path)}))
    return EXIT_OK


def cmd_sweep(cfg) -> int:
    _require_seed(cfg)
    code, schedule = _code_and_schedule(cfg)
    pbs = _parse_pb_list(cfg["pb"], cfg["npoints"])
    try:
        for p in pbs:
            NoiseParams.from_ratio(p, schedule.pd_ratio)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        table = _get_table(cfg, code)
    except EnumerationBudgetError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET

    def progress(row):
        log.info("%s p_b=%.4g eps_L=%.4g misses=%d", code.name, row.p_b, row.epsilon_L, row.misses)

    try:
        res = sweep_and_fit_slope(code, schedule, table, pbs, cfg["cycles"], cfg["trials"],
                                  cfg["seed"], cfg["workers"], cfg["floor_margin"],
                                  shared_coin=cfg["shared_coin"], progress=progress)
    except FitError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return EXIT_FIT
    slope = res.slope
    csv_text = sweep_csv(res.rows)
    path = _out_path(cfg, f"sweep_{code.family}_d{code.distance}_s{cfg['seed']}.csv")
    path.write_text(csv_text)
    meta = {
        "config": cfg,
        "code": {"family": code.family, "d": code.distance, "n": code.n,
                 "base": str(code.base), "w_max": table.w_max},
        "schedule": schedule.summary(),
        "p_b": pbs,
        "curves": [c.as_dict() for c in res.curves],
        "slope": {"r": slope.slope, "r_stderr": slope.slope_stderr,
                  "intercept": slope.intercept, "excluded_p_b": slope.excluded},
        "version": __version__,
        "wall_clock_s": res.wall_clock_s,
    }
    Path(str(path.with_suffix("")) + ".json").write_text(json.dumps(meta, indent=2) + "\n")
    Path(str(path.with_suffix("")) + ".plot.dat").write_text(plot_data(slope))
    sys.stdout.write(csv_text)
    print(f"# slope r = {slope.slope:.4f} +/- {slope.slope_stderr:.4f}")
    return EXIT_OK


def cmd_fit(cfg) -> int:
    if not cfg["input"]:
        raise UsageError("--input is required")
    path = Path(cfg["input"])
    text = path.read_text()
    try:
        if path.suffix == ".csv":
            rows = read_sweep_csv(text)
            if not rows:
                raise FitError("empty sweep file")
            name = f"{rows[0].family}-d{rows[0].d}"
            pts = [(r.p_b, r.epsilon_L) for r in rows if not math.isnan(r.epsilon_L)]
            s = fit_slope(name, pts)
            out = {"code": name, "r": s.slope, "r_stderr": s.slope_stderr,
                   "intercept": s.intercept, "points": len(s.points)}
        else:
            data = json.loads(text)
            curve = FidelityCurve.from_dict(data["curve"])
            out = fit_fidelity(curve, cfg["floor_margin"]).__dict__
    except FitError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return EXIT_FIT
    print(json.dumps(out))
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "table": cmd_table, "run": cmd_run,
            "sweep": cmd_sweep, "fit": cmd_fit}
HELP = {
    "validate": "check code invariants, distance and schedule",
    "table": "build and save a decode table",
    "run": "one memory experiment at a single p_b",
    "sweep": "memory experiments over p_b with a log-log slope fit",
    "fit": "re-fit a stored run curve or sweep CSV",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringqec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, spec in OPTIONS.items():
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", help="flat key = value config file")
        for key, (conv, default, helptext) in spec.items():
            flag = "--" + key.replace("_", "-")
            if conv is _flag:
                p.add_argument(flag, dest=key, action="store_const", const=True, default=None,
                               help=helptext)
            else:
                shown = f" (default {default})" if default is not None else ""
                p.add_argument(flag, dest=key, default=None, help=helptext + shown)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve(args.command, args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"ringqec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
