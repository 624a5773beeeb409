"""Command-line front end: runs sweeps, writes CSV + manifest (+ optional SVG).

Config precedence is flags > config file > built-in defaults.  A config file
is either an INI file with one section per command or a manifest JSON written
by a previous run; re-running a manifest reproduces its CSV byte-for-byte.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .montecarlo import (
    ExperimentConfig,
    default_phi_grid,
    run_ber_sweep,
    run_phi_sweep,
    run_rsr_sweep,
)
from .reconstruct import SIN_PHI_TOL, predicted_mse, predicted_trace
from .svgplot import write_svg

DEFAULT_SEED = 20260808

# built-in defaults per command (the m=512/n=2 variance-study geometry keeps
# the Taylor bias small while vectorizing the per-receiver statistics)
DEFAULTS = {
    "phi-sweep": {
        "m": 512, "n": 2, "rsr_db": 30.0, "sigma_v_sq": 0.1,
        "samples": 200_000, "phi_grid": "", "qam": 0,
    },
    "rsr-sweep": {
        "m": 512, "n": 2, "rsr_db_list": "15,20,25,30,35,40,45",
        "sigma_v_sq_list": "0.1,0.01,0.001", "samples": 100_000, "qam": 0,
    },
    "ber": {
        "m": 8, "n": 4, "scheme": "prss", "detector": "ml", "qam": 0,
        "rsr_db": 26.0, "snr_db_list": "0,2,4,6,8,10,12,14,16",
        "trials": 20_000, "target_errors": 200, "phi": math.pi / 2,
    },
    "trace-curve": {"sigma_v_sq": 0.1, "u_mod": 1.0, "phi_grid": ""},
}

CSV_HEADERS = {
    "phi-sweep": ["phi_rad", "sigma_ve_sq", "sigma_v_sq", "rsr_db", "samples", "seed"],
    "rsr-sweep": ["rsr_db", "sigma_v_sq", "sigma_ve_sq", "samples", "seed"],
    "ber": [
        "scheme", "detector", "snr_db", "rsr_db", "m", "n", "qam",
        "bit_errors", "bits_total", "ber", "ci95", "seed",
    ],
    "trace-curve": ["phi_rad", "predicted_trace", "predicted_mse", "sigma_v_sq", "u_mod"],
}


class UsageError(ValueError):
    pass


def _checked_config(**kwargs) -> ExperimentConfig:
    """Build a config, reporting validation failures as usage errors."""
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _g(x) -> str:
    """Stable CSV float formatting."""
    return format(float(x), ".12g")


def _float_list(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    text = str(text).strip()
    if not text:
        return ()
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramimo",
        description="Amplitude-only atomic MIMO link simulator: "
        "noise-variance and BER experiments.",
    )
    parser.add_argument("--version", action="version", version=f"ramimo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config or manifest JSON from a previous run")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
        p.add_argument("--threads", type=int, help="worker processes (default: all cores)")
        p.add_argument("--svg", action="store_true", help="also write an SVG plot")
        p.add_argument("--m", type=int, help="number of receivers")
        p.add_argument("--n", type=int, help="number of user antennas")
        p.add_argument("--qam", type=int, help="QAM order (0 = scheme default)")

    p = sub.add_parser("phi-sweep", help="reconstruction error vs phase offset")
    common(p)
    p.add_argument("--rsr-db", type=float, help="reference-to-signal ratio in dB")
    p.add_argument("--sigma-v-sq", type=float, help="receiver noise variance")
    p.add_argument("--samples", type=int, help="receiver samples per grid point")
    p.add_argument("--phi-grid", help="comma list of offsets in radians (default: pi/36 grid)")

    p = sub.add_parser("rsr-sweep", help="reconstruction error vs reference strength")
    common(p)
    p.add_argument("--rsr-db-list", help="comma list of RSR values in dB")
    p.add_argument("--sigma-v-sq-list", help="comma list of noise variances")
    p.add_argument("--samples", type=int, help="receiver samples per sweep point")

    p = sub.add_parser("ber", help="BER vs SNR for one scheme/detector")
    common(p)
    p.add_argument("--scheme", choices=("prss", "single_shot", "rf_baseline"))
    p.add_argument("--detector", choices=("ml", "zf"))
    p.add_argument("--rsr-db", type=float, help="reference-to-signal ratio in dB")
    p.add_argument("--snr-db-list", help="comma list of SNR points in dB")
    p.add_argument("--trials", type=int, help="max trials per SNR point")
    p.add_argument("--target-errors", type=int, help="bit-error stopping target (0 = run all)")
    p.add_argument("--phi", type=float, help="dual-slot phase offset in radians")

    p = sub.add_parser("trace-curve", help="analytic error-amplification curves")
    common(p)
    p.add_argument("--sigma-v-sq", type=float, help="noise variance for the MSE curve")
    p.add_argument("--u-mod", type=float, help="phase-normalizer modulus (default 1)")
    p.add_argument("--phi-grid", help="comma list of offsets in radians")
    return parser


def _load_config_layer(path: str, command: str) -> dict:
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        if manifest.get("command") not in (None, command):
            raise UsageError(
                f"manifest was written by {manifest.get('command')!r}, not {command!r}"
            )
        return dict(manifest.get("config", manifest))
    ini = configparser.ConfigParser()
    ini.read(path)
    if ini.has_section(command):
        return {k.replace("-", "_"): v for k, v in ini.items(command)}
    return {k.replace("-", "_"): v for k, v in ini.items("DEFAULT")}


def _resolve(args: argparse.Namespace, command: str) -> dict:
    """Materialize the full config: flags over config file over defaults."""
    layer = _load_config_layer(args.config, command) if args.config else {}
    resolved = {}
    for key, default in DEFAULTS[command].items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in layer:
            v = layer[key]
            resolved[key] = type(default)(v) if not isinstance(default, str) else str(v)
        else:
            resolved[key] = default
    for key, default in (("seed", DEFAULT_SEED), ("threads", os.cpu_count() or 1)):
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in layer:
            resolved[key] = int(layer[key])
        else:
            resolved[key] = default
    resolved["svg"] = bool(args.svg or str(layer.get("svg", "")).lower() in ("1", "true", "yes"))
    return resolved


def _write_csv(path: str, header: list[str], rows, comments=()) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for comment in comments:
            fh.write(f"# {comment}\n")
        writer.writerows(rows)


def _write_manifest(path: str, command: str, resolved: dict, outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "config": resolved,
        "master_seed": resolved["seed"],
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
        "note": "channel, reference and noise are redrawn every trial (fast fading)",
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _phi_grid_from(resolved: dict) -> tuple[tuple[float, ...], list[float]]:
    """Requested grid plus the singular points that will be skipped."""
    requested = _float_list(resolved.get("phi_grid", ""))
    if not requested:
        requested = default_phi_grid()
    skipped = [p for p in requested if abs(math.sin(p)) < SIN_PHI_TOL]
    return requested, skipped


def _cmd_phi_sweep(resolved: dict, out_dir: str) -> list[str]:
    grid, skipped = _phi_grid_from(resolved)
    for p in skipped:
        print(f"warning: skipping phi={p!r}: singular offset", file=sys.stderr)
    if len(skipped) == len(grid):
        raise UsageError("phi grid contains no usable (non-singular) offsets")
    cfg = _checked_config(
        m=resolved["m"], n=resolved["n"], scheme="prss", qam_order=resolved["qam"],
        rsr_db=resolved["rsr_db"], sigma_v_sq=resolved["sigma_v_sq"],
        phi_list=grid, samples=resolved["samples"],
        master_seed=resolved["seed"], workers=resolved["threads"],
    )
    records = run_phi_sweep(cfg)
    rows = [
        [_g(r.phi), _g(r.sigma_ve_sq), _g(r.sigma_v_sq), _g(r.rsr_db), r.samples, r.seed]
        for r in records
    ]
    csv_path = os.path.join(out_dir, "phi_sweep.csv")
    comments = [f"skipped phi={_g(p)}: singular offset" for p in skipped]
    _write_csv(csv_path, CSV_HEADERS["phi-sweep"], rows, comments)
    outputs = [csv_path]
    if resolved["svg"]:
        svg_path = os.path.join(out_dir, "phi_sweep.svg")
        write_svg(
            svg_path,
            [("empirical", [r.phi for r in records], [r.sigma_ve_sq for r in records]),
             ("predicted", [r.phi for r in records],
              [predicted_mse(r.phi, r.sigma_v_sq) for r in records])],
            "phase offset (rad)", "effective noise variance", log_y=True,
            title=f"RSR = {_g(resolved['rsr_db'])} dB",
        )
        outputs.append(svg_path)
    return outputs


def _cmd_rsr_sweep(resolved: dict, out_dir: str) -> list[str]:
    rsr_list = _float_list(resolved["rsr_db_list"])
    sv_list = _float_list(resolved["sigma_v_sq_list"])
    if not rsr_list or not sv_list:
        raise UsageError("rsr-db-list and sigma-v-sq-list must not be empty")
    cfg = _checked_config(
        m=resolved["m"], n=resolved["n"], scheme="prss", qam_order=resolved["qam"],
        rsr_db_list=rsr_list, sigma_v_sq_list=sv_list, samples=resolved["samples"],
        master_seed=resolved["seed"], workers=resolved["threads"],
    )
    records = run_rsr_sweep(cfg)
    rows = [
        [_g(r.rsr_db), _g(r.sigma_v_sq), _g(r.sigma_ve_sq), r.samples, r.seed]
        for r in records
    ]
    csv_path = os.path.join(out_dir, "rsr_sweep.csv")
    _write_csv(csv_path, CSV_HEADERS["rsr-sweep"], rows)
    outputs = [csv_path]
    if resolved["svg"]:
        svg_path = os.path.join(out_dir, "rsr_sweep.svg")
        series = []
        for sv in sv_list:
            pts = [r for r in records if r.sigma_v_sq == sv]
            series.append(
                (f"sigma_v_sq={_g(sv)}", [r.rsr_db for r in pts], [r.sigma_ve_sq for r in pts])
            )
        write_svg(svg_path, series, "RSR (dB)", "effective noise variance", log_y=True)
        outputs.append(svg_path)
    return outputs


def _cmd_ber(resolved: dict, out_dir: str) -> list[str]:
    snr_list = _float_list(resolved["snr_db_list"])
    if not snr_list:
        raise UsageError("snr-db-list must not be empty")
    cfg = _checked_config(
        m=resolved["m"], n=resolved["n"], scheme=resolved["scheme"],
        detector=resolved["detector"], qam_order=resolved["qam"],
        rsr_db=resolved["rsr_db"], phi=resolved["phi"], snr_db_list=snr_list,
        trials=resolved["trials"], target_errors=resolved["target_errors"],
        master_seed=resolved["seed"], workers=resolved["threads"],
    )
    records = run_ber_sweep(cfg)
    rows = [
        [r.scheme, r.detector, _g(r.snr_db), _g(r.rsr_db), r.m, r.n, r.qam,
         r.estimate.bit_errors, r.estimate.bits_total, _g(r.estimate.ber),
         _g(r.estimate.half_width_95), r.seed]
        for r in records
    ]
    csv_path = os.path.join(out_dir, "ber.csv")
    _write_csv(csv_path, CSV_HEADERS["ber"], rows)
    outputs = [csv_path]
    if resolved["svg"]:
        svg_path = os.path.join(out_dir, "ber.svg")
        label = f"{resolved['scheme']}/{resolved['detector']}"
        write_svg(
            svg_path,
            [(label, [r.snr_db for r in records], [r.estimate.ber for r in records])],
            "SNR (dB)", "BER", log_y=True,
        )
        outputs.append(svg_path)
    return outputs


def _cmd_trace_curve(resolved: dict, out_dir: str) -> list[str]:
    grid, skipped = _phi_grid_from(resolved)
    for p in skipped:
        print(f"warning: skipping phi={p!r}: singular offset", file=sys.stderr)
    usable = [p for p in grid if abs(math.sin(p)) >= SIN_PHI_TOL]
    if not usable:
        raise UsageError("phi grid contains no usable (non-singular) offsets")
    u_mod = resolved["u_mod"]
    sv = resolved["sigma_v_sq"]
    rows = [
        [_g(p), _g(predicted_trace(p, u_mod)), _g(predicted_mse(p, sv)), _g(sv), _g(u_mod)]
        for p in usable
    ]
    csv_path = os.path.join(out_dir, "trace_curve.csv")
    comments = [f"skipped phi={_g(p)}: singular offset" for p in skipped]
    _write_csv(csv_path, CSV_HEADERS["trace-curve"], rows, comments)
    outputs = [csv_path]
    if resolved["svg"]:
        svg_path = os.path.join(out_dir, "trace_curve.svg")
        write_svg(
            svg_path,
            [("trace", usable, [predicted_trace(p, u_mod) for p in usable]),
             ("mse", usable, [predicted_mse(p, sv) for p in usable])],
            "phase offset (rad)", "predicted value", log_y=True,
        )
        outputs.append(svg_path)
    return outputs


_RUNNERS = {
    "phi-sweep": _cmd_phi_sweep,
    "rsr-sweep": _cmd_rsr_sweep,
    "ber": _cmd_ber,
    "trace-curve": _cmd_trace_curve,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    try:
        resolved = _resolve(args, command)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = args.out
    try:
        os.makedirs(out_dir, exist_ok=True)
        outputs = _RUNNERS[command](resolved, out_dir)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 1
    manifest_path = os.path.join(out_dir, f"{command.replace('-', '_')}.manifest.json")
    _write_manifest(manifest_path, command, resolved, outputs)
    for path in outputs + [manifest_path]:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
