"""Command-line front end.

Subcommands: `exponents` (exact index queries), `verify` (bundled numerical
suites), `cover` (balanced covering demo), `sharpness` (dilation slope scan)
and `constant` (empirical constant estimation).  Rationals on the command
line are written as 'num/den' ('inf' is accepted where the top of the scale
makes sense); a JSON config file can mirror any flag.  Exit status: 0 on
success, 1 when a verification contract fails, 2 for invalid configuration.
Reports are deterministic for a fixed config and seed; volatile metadata
goes to a '<output>.meta.json' sidecar.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import covering, verifier
from .errors import ConfigInvalid, GNLabError
from .exponents import (
    GNParams,
    check_admissible,
    parse_rational,
    rational_to_json,
    scaling_deficit,
    solve_p,
    solve_special_p,
    solve_theta,
)
from .gridfn import FamilyKind, FamilySpec, sample_family
from .verifier import SUITES, FamilySweep, estimate_constant, sharpness_scan

MAX_GRID_CELLS = 2**28

EXIT_OK = 0
EXIT_CONTRACT_FAILED = 1
EXIT_CONFIG_INVALID = 2


def _rational(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {exc}")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="gnlab", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="JSON file mirroring the flags")
        p.add_argument("--output", type=Path, help="report file to write")
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None, help="worker cap")

    def param_flags(p, need_theta=True):
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--j", type=int, default=None)
        p.add_argument("--k", type=int, default=None)
        if need_theta:
            p.add_argument("--theta", type=_rational, default=None)
        p.add_argument("--p", type=_rational, default=None)
        p.add_argument("--q", type=_rational, default=None)
        p.add_argument("--r", type=_rational, default=None)

    pe = sub.add_parser("exponents", help="exact exponent queries")
    param_flags(pe)
    pe.add_argument("--special", action=argparse.BooleanOptionalAction, default=None,
                    help="also solve the theta=j/k special case")
    common(pe)

    pv = sub.add_parser("verify", help="run bundled verification suites")
    pv.add_argument("--suite", action="append", choices=sorted(SUITES) + ["all"],
                    default=None)
    pv.add_argument("--grid-points", type=int, default=None)
    pv.add_argument("--refine", action=argparse.BooleanOptionalAction, default=None,
                    help="also rerun key ratios at 2x grid (always on inside suites)")
    common(pv)

    pc = sub.add_parser("cover", help="balanced covering demo")
    pc.add_argument("--family", choices=("bump", "sine_bump"), default=None)
    pc.add_argument("--width", type=float, default=None)
    pc.add_argument("--freq", type=float, default=None)
    pc.add_argument("--center", type=float, default=None)
    pc.add_argument("--box", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    pc.add_argument("--grid-points", type=int, default=None)
    pc.add_argument("--p", type=_rational, default=None)
    pc.add_argument("--q", type=_rational, default=None)
    pc.add_argument("--r", type=_rational, default=None)
    pc.add_argument("--ascii", action=argparse.BooleanOptionalAction, default=None,
                    help="print the interval strip chart")
    common(pc)

    ps = sub.add_parser("sharpness", help="dilation slope scan")
    param_flags(ps)
    ps.add_argument("--family", choices=[k.value for k in FamilyKind], default=None)
    ps.add_argument("--width", type=float, default=None)
    ps.add_argument("--box", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    ps.add_argument("--grid-points", type=int, default=None)
    ps.add_argument("--s-min", type=float, default=None)
    ps.add_argument("--s-max", type=float, default=None)
    ps.add_argument("--s-count", type=int, default=None)
    common(ps)

    pk = sub.add_parser("constant", help="empirical constant estimation")
    param_flags(pk)
    pk.add_argument("--family", choices=[k.value for k in FamilyKind], default=None)
    pk.add_argument("--widths", type=float, nargs="+", default=None)
    pk.add_argument("--dilations", type=float, nargs="+", default=None)
    pk.add_argument("--box", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    pk.add_argument("--grid-points", type=int, default=None)
    pk.add_argument("--refine-search", action=argparse.BooleanOptionalAction, default=None)
    common(pk)

    return top


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Config file supplies values for flags the user left unset."""
    if args.config is None:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigInvalid("config must be a JSON object")
    rational_keys = {"theta", "p", "q", "r"}
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest == "command":
            continue
        if not hasattr(args, dest):
            raise ConfigInvalid(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            if dest in rational_keys and isinstance(value, (str, int)):
                value = parse_rational(str(value))
            if dest in ("output", "config"):
                value = Path(value)
            setattr(args, dest, value)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigInvalid(f"missing required options: {', '.join('--' + m for m in missing)}")


def _check_grid(*shape):
    cells = 1
    for m in shape:
        if m < 8:
            raise ConfigInvalid(f"grid needs at least 8 points per axis, got {m}")
        cells *= m
    if cells > MAX_GRID_CELLS:
        raise ConfigInvalid(f"grid of {cells} cells exceeds the {MAX_GRID_CELLS} budget")


def write_report(payload: dict, path: Optional[Path], fmt: Optional[str],
                 csv_rows=None) -> None:
    if path is None:
        return
    fmt = fmt or ("csv" if str(path).endswith(".csv") else "json")
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
        Path(path).write_text(text)
    else:
        rows = csv_rows or []
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["case_id", "metric", "value"])
            writer.writeheader()
            writer.writerows(rows)
    meta = {"created_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "argv": sys.argv}
    Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def cmd_exponents(args) -> int:
    _require(args, "n", "j", "k", "theta", "q", "r")
    theta = args.theta.frac
    p = solve_p(args.n, args.j, args.k, theta, args.q, args.r) if args.p is None else args.p
    params = GNParams(n=args.n, j=args.j, k=args.k, theta=theta, p=p, q=args.q, r=args.r)
    verdict = check_admissible(params)
    deficit = scaling_deficit(params)
    theta_back = None
    try:
        theta_back = solve_theta(args.n, args.j, args.k, params.p, args.q, args.r)
    except GNLabError:
        pass
    payload = {
        "command": "exponents",
        "params": params.to_json(),
        "p": rational_to_json(params.p),
        "scaling_deficit": rational_to_json(deficit),
        "admissible": verdict.admissible,
        "reason": verdict.reason.value,
        "theta_roundtrip": rational_to_json(theta_back) if theta_back is not None else None,
    }
    if args.special:
        payload["special_p"] = rational_to_json(solve_special_p(args.j, args.k, args.q, args.r))
    print(f"p = {params.p}")
    print(f"scaling deficit = {deficit}")
    print(f"admissible: {verdict.reason.value}")
    if args.special:
        payload_sp = solve_special_p(args.j, args.k, args.q, args.r)
        print(f"special-case p (theta = j/k) = {payload_sp}")
    write_report(payload, args.output, args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suite or ["all"]
    if "all" in names:
        names = sorted(SUITES)
    seed = args.seed if args.seed is not None else 0
    if args.grid_points is not None:
        _check_grid(args.grid_points)
    reports, ok = verifier.run_suites(names, seed=seed, grid_points=args.grid_points)
    payload = {
        "command": "verify",
        "suites": names,
        "seed": seed,
        "reports": [r.to_json() for r in reports],
        "pass": ok,
    }
    rows = [row for r in reports for row in r.csv_rows()]
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        print(f"[{status}] {r.case_id}")
        for name, flag in sorted(r.passes.items()):
            if not flag:
                print(f"    failed: {name}")
    write_report(payload, args.output, args.format, csv_rows=rows)
    return EXIT_OK if ok else EXIT_CONTRACT_FAILED


def cmd_cover(args) -> int:
    family = args.family or "bump"
    width = args.width if args.width is not None else 1.0
    center = args.center if args.center is not None else 0.0
    box = tuple(args.box) if args.box else (-2.5 * width + center, 2.5 * width + center)
    m = args.grid_points or 2049
    _check_grid(m)
    p = args.p or parse_rational("2")
    q = args.q or parse_rational("2")
    r = args.r or parse_rational("2")
    if family == "bump":
        spec = FamilySpec(FamilyKind.BUMP, (width,), (center,))
    else:
        spec = FamilySpec(FamilyKind.SINE_BUMP, (width, args.freq or 3.0), (center,))
    u = sample_family(spec, (box,), (m,))
    cover = covering.build_cover(u, p, q, r)
    chain = covering.cover_sum_bound(u, cover, p, q, r)
    payload = {
        "command": "cover",
        "family": spec.to_json(),
        "grid_points": m,
        "cover": cover.to_json(),
        "summation_chain": chain.to_json(),
        "pass": cover.ok and chain.chain_ok,
    }
    print(f"intervals: {len(cover.intervals)}  max multiplicity: {cover.max_multiplicity}")
    print(f"balance residual max: {max(iv.residual for iv in cover.intervals):.3e}")
    print(f"summation-chain slack factor: {chain.slack_factor:.4f}")
    if args.ascii or args.ascii is None:
        print(covering.ascii_strip_chart(cover))
    write_report(payload, args.output, args.format)
    return EXIT_OK if payload["pass"] else EXIT_CONTRACT_FAILED


def cmd_sharpness(args) -> int:
    _require(args, "n", "j", "k", "theta", "q", "r")
    theta = args.theta.frac
    p = solve_p(args.n, args.j, args.k, theta, args.q, args.r) if args.p is None else args.p
    params = GNParams(n=args.n, j=args.j, k=args.k, theta=theta, p=p, q=args.q, r=args.r)
    width = args.width if args.width is not None else 1.0
    half = abs(args.box[0]) if args.box else 8.0 * width
    m = args.grid_points or (4097 if args.n == 1 else 257)
    _check_grid(*([m] * args.n))
    spec = FamilySpec(FamilyKind.GAUSSIAN, (width,), (0.0,) * args.n)
    u = sample_family(spec, ((-half, half),) * args.n, (m,) * args.n)
    s_min = args.s_min if args.s_min is not None else 0.25
    s_max = args.s_max if args.s_max is not None else 4.0
    count = args.s_count if args.s_count is not None else 7
    import numpy as np

    s_values = np.geomspace(s_min, s_max, count)
    report = sharpness_scan(u, params, s_values)
    payload = {
        "command": "sharpness",
        "params": params.to_json(),
        "report": report.to_json(),
        "pass": report.ok,
    }
    sd = report.slope_data
    print(f"measured slope = {sd['slope']:+.6f}")
    print(f"exact deficit  = {sd['deficit']:+.6f} ({sd['deficit_exact']})")
    print(f"slope matches deficit: {report.passes['slope_matches_deficit']}")
    write_report(payload, args.output, args.format, csv_rows=report.csv_rows())
    return EXIT_OK if report.ok else EXIT_CONTRACT_FAILED


def cmd_constant(args) -> int:
    _require(args, "n", "j", "k", "theta", "q", "r")
    theta = args.theta.frac
    p = solve_p(args.n, args.j, args.k, theta, args.q, args.r) if args.p is None else args.p
    params = GNParams(n=args.n, j=args.j, k=args.k, theta=theta, p=p, q=args.q, r=args.r)
    kind = FamilyKind(args.family or "gaussian")
    widths = args.widths or [0.5, 1.0, 2.0]
    dilations = tuple(args.dilations or [1.0])
    m = args.grid_points or (4097 if args.n == 1 else 257)
    _check_grid(*([m] * args.n))
    half = 8.0 * max(widths)
    center = (0.0,) * args.n
    specs = []
    for w in widths:
        if kind == FamilyKind.SINE_BUMP:
            specs.append(FamilySpec(kind, (w, 3.0), center))
        elif kind == FamilyKind.POLY_GAUSSIAN:
            specs.append(FamilySpec(kind, (w, 0.0, 1.0), center))
        else:
            specs.append(FamilySpec(kind, (w,), center))
    sweep = FamilySweep(
        specs=tuple(specs),
        box=((-half, half),) * args.n,
        shape=(m,) * args.n,
        dilations=dilations,
    )
    report = estimate_constant(
        sweep,
        params,
        refine=args.refine_search if args.refine_search is not None else True,
        seed=args.seed or 0,
        threads=args.threads or 1,
    )
    payload = {
        "command": "constant",
        "params": params.to_json(),
        "report": report.to_json(),
        "pass": report.ok,
    }
    print(f"estimated constant = {report.estimated_constant:.6f}")
    print(f"argmax family: {report.details['argmax_family']}")
    write_report(payload, args.output, args.format, csv_rows=report.csv_rows())
    return EXIT_OK if report.ok else EXIT_CONTRACT_FAILED


COMMANDS = {
    "exponents": cmd_exponents,
    "verify": cmd_verify,
    "cover": cmd_cover,
    "sharpness": cmd_sharpness,
    "constant": cmd_constant,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _merge_config(args)
        return COMMANDS[args.command](args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_INVALID
    except GNLabError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CONTRACT_FAILED


if __name__ == "__main__":
    sys.exit(main())
