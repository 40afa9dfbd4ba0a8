"""Command-line front end: eval, count, zeros, verify, figure.

All numeric output is formatted at 17 significant digits, so identical
flags and configuration produce byte-identical JSON/CSV/SVG.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import List, Optional

from .eisenstein import (
    AccuracyError,
    EvalMode,
    EvalParams,
    SeriesKind,
    evaluate,
)
from .moebius import Cusp, CUSP_INFINITY, apply_moebius, gamma_for_lambda, parse_extended_rational
from .winding import CountOptions, UnreliableSnap, count_zeros
from .zerofinder import CSV_FIELDS, CountMismatch, figure_dataset, locate_zeros
from . import verify as verify_mod

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_ACCURACY = 3
EXIT_UNRELIABLE = 4
EXIT_IO = 5
EXIT_MISMATCH = 6


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class RunConfig:
    target_abs_err: float = 1e-10
    lattice_cap: int = 10 ** 6
    top_height: float = 8.0
    snap_tol: float = 0.05
    workers: int = 1

    def validate(self):
        if not (self.target_abs_err > 0 and self.lattice_cap > 0
                and self.top_height > 0 and self.snap_tol > 0 and self.workers >= 1):
            raise ValueError("config values must be positive (workers >= 1)")
        return self


def load_config(path: Optional[str]) -> RunConfig:
    """Plain key=value file; unknown keys rejected; flags override later."""
    if path is None:
        path = os.environ.get("EISENZERO_CONFIG")
    if not path:
        return RunConfig()
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key in ("target_abs_err", "top_height", "snap_tol"):
                values[key] = float(val)
            elif key in ("lattice_cap", "workers"):
                values[key] = int(float(val))
            else:
                raise ValueError(f"unknown config key {key!r}")
    return RunConfig(**values).validate()


def parse_tau(text: str):
    text = text.strip().lower().replace(" ", "")
    if text in ("inf", "oo", "i*inf", "iinf", "infinity"):
        return CUSP_INFINITY
    try:
        value = complex(text.replace("i", "j"))
    except ValueError as exc:
        raise ValueError(f"cannot parse point {text!r}") from exc
    if value.imag <= 0:
        raise ValueError(f"point {value} is not in the upper half plane")
    return value


def parse_lambdas(text: str) -> List:
    text = text.strip()
    if not text:
        return []
    return [parse_extended_rational(part) for part in text.split(",")]


def _eval_params(cfg: RunConfig, mode: str = "auto") -> EvalParams:
    return EvalParams(target_abs_err=cfg.target_abs_err,
                      lattice_cap=cfg.lattice_cap, mode=EvalMode(mode))


def _count_options(cfg: RunConfig, method: str = "auto") -> CountOptions:
    return CountOptions(top_height=cfg.top_height, snap_tol=cfg.snap_tol,
                        method=method)


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args, cfg: RunConfig) -> int:
    try:
        tau = parse_tau(args.tau)
        kind = SeriesKind.parse(args.kind)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        result = evaluate(kind, args.k, tau, _eval_params(cfg, args.mode))
    except AccuracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(json.dumps({
        "kind": kind.value, "k": args.k, "tau": args.tau,
        "re": float(result.value.real), "im": float(result.value.imag),
        "abs_err_bound": float(result.abs_err_bound),
    }, default=fmt))
    return EXIT_OK


def cmd_count(args, cfg: RunConfig) -> int:
    try:
        lam = parse_extended_rational(args.lam)
        kind = SeriesKind.parse(args.kind)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        result = count_zeros(kind, args.k, lam, _count_options(cfg, args.method))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(json.dumps(result.as_dict()))
    if not result.reliable:
        return EXIT_UNRELIABLE
    return EXIT_OK


def cmd_zeros(args, cfg: RunConfig) -> int:
    try:
        lam = parse_extended_rational(args.lam)
        kind = SeriesKind.parse(args.kind)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        zeros = locate_zeros(kind, args.k, lam, _count_options(cfg))
    except CountMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    rows = [z.csv_row(kind.value, args.k) for z in zeros]
    print(json.dumps(rows))
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    try:
        cells = verify_mod.run_suite(args.suite, args.k_max, cfg.workers)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    gate_fail = 0
    for cell in cells:
        status = "PASS" if cell["ok"] else ("FAIL" if cell["gating"] else "INFO")
        if not cell["ok"] and cell["gating"]:
            gate_fail += 1
        print(f"{status} {cell['suite']} {cell['cell']}: {cell['detail']}")
    total = len(cells)
    ok = sum(1 for c in cells if c["ok"])
    print(f"# {ok}/{total} cells pass; gating failures: {gate_fail}")
    return EXIT_OK if gate_fail == 0 else EXIT_FAIL


def _figure_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _figure_svg(rows, lambdas, kind: str, k: int, top_height: float = 8.0) -> str:
    """Self-contained scatter of the zeros over the translate boundaries.

    Fixed viewBox mapping Re in [-1.6, 1.6], Im in [0, 2.2]; boundaries are
    drawn as sampled polylines of the Moebius images of the standard
    contour.
    """
    width, height = 840, 580

    def sx(re: float) -> float:
        return (re + 1.6) / 3.2 * width

    def sy(im: float) -> float:
        return (2.2 - im) / 2.2 * height

    import numpy as np

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="10" y="20" font-family="monospace" font-size="14">'
        f'{kind}_{k} zeros, lambda in {{{",".join(str(l) for l in lambdas)}}}</text>',
    ]
    ts = np.linspace(0.0, 1.0, 129)
    for lam in lambdas:
        gamma = gamma_for_lambda(lam)
        segs = []
        theta = 2 * math.pi / 3 - ts * (math.pi / 3)
        segs.append(np.exp(1j * theta))
        segs.append(0.5 + 1j * (math.sqrt(3) / 2 + ts * (top_height - math.sqrt(3) / 2)))
        segs.append(-0.5 + 1j * (math.sqrt(3) / 2 + ts * (top_height - math.sqrt(3) / 2)))
        for seg in segs:
            pts = [apply_moebius(gamma, complex(z)) for z in seg]
            coords = " ".join(
                f"{sx(p.real):.2f},{sy(p.imag):.2f}" for p in pts
                if -1.6 <= p.real <= 1.6 and 0 <= p.imag <= 2.2
            )
            if coords:
                parts.append(
                    f'<polyline points="{coords}" fill="none" '
                    f'stroke="#888" stroke-width="0.7"/>'
                )
    for row in rows:
        if int(row["is_cusp"]):
            continue
        re, im = float(row["re"]), float(row["im"])
        if -1.6 <= re <= 1.6 and 0 <= im <= 2.2:
            parts.append(
                f'<circle cx="{sx(re):.2f}" cy="{sy(im):.2f}" r="2.4" fill="#c00"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_figure(args, cfg: RunConfig) -> int:
    try:
        lambdas = parse_lambdas(args.lambdas)
        kind = SeriesKind.parse(args.kind)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        rows = figure_dataset(kind, args.k, lambdas, _count_options(cfg),
                              strip_translates=args.strip)
    except CountMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    if args.format == "csv":
        payload = _figure_csv(rows)
    else:
        payload = _figure_svg(rows, lambdas, kind.value, args.k, cfg.top_height)
    try:
        if args.out == "-":
            sys.stdout.write(payload)
        else:
            with open(args.out, "w") as fh:
                fh.write(payload)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eisenzero",
        description="Eisenstein-series evaluation and weighted zero counting",
    )
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument("--prec", type=float, default=None,
                        help="target absolute accuracy")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker processes for verification matrices")
    parser.add_argument("--json", action="store_true",
                        help="accepted for compatibility; output is JSON already")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a series at a point")
    p.add_argument("--kind", required=True, choices=["E", "G", "GG"])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--tau", required=True, help="a+bi, or inf")
    p.add_argument("--mode", default="auto",
                   choices=["auto", "q_expansion", "lattice"])
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("count", help="weighted zero count in a translate")
    p.add_argument("--kind", required=True, choices=["E", "GG"])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--lambda", dest="lam", required=True,
                   help="p/q, decimal, or inf")
    p.add_argument("--method", default="auto",
                   choices=["auto", "voa", "sign_change"])
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("zeros", help="locate the zeros in a translate")
    p.add_argument("--kind", required=True, choices=["E", "GG"])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--lambda", dest="lam", required=True)
    p.set_defaults(fn=cmd_zeros)

    p = sub.add_parser("verify", help="run a verification matrix")
    p.add_argument("suite", choices=["table1", "thm2", "thm3", "thm4",
                                     "bounds", "valence", "table2", "all"])
    p.add_argument("--k-max", dest="k_max", type=int, default=51)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("figure", help="emit a zero dataset (CSV or SVG)")
    p.add_argument("--kind", required=True, choices=["E", "GG"])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--lambdas", required=True,
                   help="comma-separated lambda list; empty for header only")
    p.add_argument("--out", default="-")
    p.add_argument("--format", default="csv", choices=["csv", "svg"])
    p.add_argument("--strip", type=int, default=0,
                   help="also emit integer translates within this range")
    p.set_defaults(fn=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.prec is not None:
            cfg = replace(cfg, target_abs_err=args.prec)
        if args.workers is not None:
            cfg = replace(cfg, workers=args.workers)
        cfg.validate()
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return args.fn(args, cfg)


if __name__ == "__main__":
    sys.exit(main())
