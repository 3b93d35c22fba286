"""Command-line front end for steering checks, scans and curves.

Subcommands
-----------
basis
    Print a generator basis with its verification diagnostics.
check
    Evaluate the criterion for one state and one or both directions.
scan
    Bisect a one-parameter family for its steerability threshold.
curve
    Tabulate (p, lhs, rhs, violation) along a family.

States are read either from a registered family (--family with --p
where needed) or from a JSON file (--file) in the wire format
{"dA": int, "dB": int, "matrix": [[[re, im], ...], ...]}. Exit codes:
0 when steerability was certified or the command succeeded, 1 when no
steering was detected by check, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .basis import generator_basis, verify_basis
from .bloch import (
    FAMILIES,
    bloch_decompose,
    complex_to_pairs,
    family_state,
    load_state,
)
from .criterion import PairParams, QuadParams, evaluate_bloch
from .optimize import (
    DEFAULT_BISECT_TOL,
    BracketError,
    NonMonotoneError,
    ParamSearchConfig,
    _optimize_bloch,
    detection_curve,
    mixture_family,
    threshold_scan,
)

DIRECTION_SETS = {"ab": ("ab",), "ba": ("ba",), "both": ("ab", "ba")}


@dataclass(frozen=True)
class RunManifest:
    """Record of what a command ran on, embedded in JSON output."""

    command: str
    source: dict
    directions: tuple
    params_mode: dict
    tolerances: dict
    output_format: str
    timestamp: str

    def __post_init__(self):
        if len(self.source) != 1:
            raise ValueError(f"manifest requires exactly one input source, got {self.source!r}")

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "source": self.source,
            "directions": list(self.directions),
            "params": self.params_mode,
            "tolerances": self.tolerances,
            "format": self.output_format,
            "timestamp": self.timestamp,
        }


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _format_float(value: float) -> str:
    if not np.isfinite(value):
        raise ValueError(f"cannot serialize non-finite float {value!r}")
    if value == 0.0:
        return "0"
    return format(value, ".17g")


def dumps(obj) -> str:
    """Serialize a report document to JSON with stable formatting.

    Keys keep insertion order and floats are printed with 17 significant
    digits, so parsing an emitted document and re-serializing it is
    byte-identical.
    """
    pieces = []
    _write_json(obj, pieces)
    return "".join(pieces)


def _write_json(obj, pieces):
    if obj is None:
        pieces.append("null")
    elif obj is True:
        pieces.append("true")
    elif obj is False:
        pieces.append("false")
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, int):
        pieces.append(str(obj))
    elif isinstance(obj, float):
        pieces.append(_format_float(obj))
    elif isinstance(obj, (list, tuple)):
        pieces.append("[")
        for i, item in enumerate(obj):
            if i:
                pieces.append(", ")
            _write_json(item, pieces)
        pieces.append("]")
    elif isinstance(obj, dict):
        pieces.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                pieces.append(", ")
            pieces.append(json.dumps(str(key)))
            pieces.append(": ")
            _write_json(value, pieces)
        pieces.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(text: str, out_path) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _require_format(fmt: str, allowed) -> None:
    if fmt not in allowed:
        raise ValueError(f"format {fmt!r} is not supported here; choose from {', '.join(allowed)}")


def _parse_params(args, allow_auto: bool):
    """Resolve --t1/--t2/--auto into a parameter mode.

    Returns ("fixed", params) or ("auto", None). Exactly one mode must
    be selected.
    """
    chosen = []
    if args.t1 is not None:
        chosen.append("--t1")
    if args.t2 is not None:
        chosen.append("--t2")
    if getattr(args, "auto", False):
        chosen.append("--auto")
    options = "--t1, --t2" + (" or --auto" if allow_auto else "")
    if len(chosen) != 1:
        raise ValueError(f"exactly one of {options} is required")
    if chosen[0] == "--t1":
        return "fixed", PairParams(*args.t1)
    if chosen[0] == "--t2":
        return "fixed", QuadParams(*args.t2)
    return "auto", None


def _params_mode_dict(mode: str, params) -> dict:
    if mode == "auto":
        return {"mode": "auto", "variant": "t1"}
    return {"mode": "fixed", "values": params.to_dict()}


def _resolve_source(args, need_p: bool):
    """Resolve --file/--family into (state or family ctor, source dict).

    Returns (kind, payload, source) where kind is "state" for check and
    "family" for scan/curve commands.
    """
    if (args.file is None) == (args.family is None):
        raise ValueError("exactly one of --file or --family is required")
    if args.family is not None:
        if need_p:
            if args.p is None:
                raise ValueError("--p is required with --family for this command")
            return "state", family_state(args.family, args.p), {"family": args.family}
        return "family", FAMILIES[args.family], {"family": args.family}
    if need_p:
        return "state", load_state(args.file), {"file": args.file}
    rho1 = load_state(args.file)
    rho0 = load_state(args.file0) if getattr(args, "file0", None) else None
    return "family", mixture_family(rho1, rho0), {"file": args.file}


def _search_config(args) -> ParamSearchConfig:
    return ParamSearchConfig(variant="t1", cap=args.cap, grid_points=args.grid)


def cmd_basis(args) -> int:
    _require_format(args.format, ("json", "table"))
    basis = generator_basis(args.dim)
    diag = verify_basis(basis)
    manifest = RunManifest(
        command="basis",
        source={"dim": args.dim},
        directions=(),
        params_mode={"mode": "none"},
        tolerances={},
        output_format=args.format,
        timestamp=_timestamp(),
    )
    if args.format == "json":
        doc = {
            "manifest": manifest.to_dict(),
            "dim": basis.dim,
            "ordering": basis.ordering_tag,
            "count": len(basis),
            "diagnostics": diag.as_dict(),
            "generators": [complex_to_pairs(g) for g in basis.generators],
        }
        _emit(dumps(doc), args.out)
    else:
        lines = [
            f"generator basis  dim={basis.dim}  count={len(basis)}  ordering={basis.ordering_tag}",
            f"  hermiticity deviation    {diag.hermiticity:.3e}",
            f"  trace deviation          {diag.trace:.3e}",
            f"  orthonormality deviation {diag.orthonormality:.3e}",
            f"  sum-square deviation     {diag.sum_square:.3e}",
        ]
        _emit("\n".join(lines), args.out)
    return 0


def cmd_check(args) -> int:
    _require_format(args.format, ("json", "table"))
    _, rho, source = _resolve_source(args, need_p=True)
    directions = DIRECTION_SETS[args.dir]
    mode, params = _parse_params(args, allow_auto=True)
    cfg = _search_config(args)
    b = bloch_decompose(rho)
    reports = []
    for direction in directions:
        if mode == "auto":
            best, _, _ = _optimize_bloch(b, direction, cfg)
            reports.append(evaluate_bloch(b, best, direction, args.tol))
        else:
            reports.append(evaluate_bloch(b, params, direction, args.tol))
    manifest = RunManifest(
        command="check",
        source=source,
        directions=directions,
        params_mode=_params_mode_dict(mode, params),
        tolerances={"tol": args.tol, "cap": args.cap, "grid": args.grid},
        output_format=args.format,
        timestamp=_timestamp(),
    )
    if args.format == "json":
        doc = {"manifest": manifest.to_dict(), "reports": [r.to_dict() for r in reports]}
        _emit(dumps(doc), args.out)
    else:
        lines = [f"{'direction':<10} {'lhs':>16} {'rhs':>16} {'violation':>16}  steerable"]
        for r in reports:
            verdict = "yes" if r.steerable else "no"
            lines.append(f"{r.direction:<10} {r.lhs:>16.8f} {r.rhs:>16.8f} {r.violation:>16.8f}  {verdict}")
        _emit("\n".join(lines), args.out)
    return 0 if any(r.steerable for r in reports) else 1


def cmd_scan(args) -> int:
    _require_format(args.format, ("json", "table"))
    if args.dir == "both":
        raise ValueError("scan requires a single direction (--dir ab or --dir ba)")
    _, family, source = _resolve_source(args, need_p=False)
    mode, params = _parse_params(args, allow_auto=True)
    cfg = _search_config(args)
    try:
        result = threshold_scan(
            family,
            direction=args.dir,
            params="auto" if mode == "auto" else params,
            bisect_tol=args.tol,
            cfg=cfg,
        )
    except (BracketError, NonMonotoneError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    manifest = RunManifest(
        command="scan",
        source=source,
        directions=(args.dir,),
        params_mode=_params_mode_dict(mode, params),
        tolerances={"tol": args.tol, "cap": args.cap, "grid": args.grid},
        output_format=args.format,
        timestamp=_timestamp(),
    )
    if args.format == "json":
        doc = {"manifest": manifest.to_dict(), "result": result.to_dict()}
        _emit(dumps(doc), args.out)
    else:
        lines = [
            f"threshold scan  direction={result.direction}  tol={result.tol:g}",
            f"  p_star  = {result.p_star:.8f}",
            f"  bracket = [{result.bracket[0]:.12f}, {result.bracket[1]:.12f}]",
            f"  params  = {result.params.to_dict()}",
        ]
        _emit("\n".join(lines), args.out)
    return 0


def cmd_curve(args) -> int:
    _require_format(args.format, ("json", "csv", "table"))
    if args.dir == "both":
        raise ValueError("curve requires a single direction (--dir ab or --dir ba)")
    if args.steps < 1:
        raise ValueError(f"--steps must be >= 1, got {args.steps}")
    start, stop = args.p_range
    _, family, source = _resolve_source(args, need_p=False)
    mode, params = _parse_params(args, allow_auto=False)
    p_grid = np.linspace(start, stop, args.steps)
    rows = detection_curve(family, args.dir, params, p_grid)
    manifest = RunManifest(
        command="curve",
        source=source,
        directions=(args.dir,),
        params_mode=_params_mode_dict(mode, params),
        tolerances={"cap": args.cap, "grid": args.grid},
        output_format=args.format,
        timestamp=_timestamp(),
    )
    if args.format == "csv":
        lines = ["p,lhs,rhs,violation"]
        for p, lhs, rhs, violation in rows:
            lines.append(",".join(_format_float(v) for v in (p, lhs, rhs, violation)))
        _emit("\n".join(lines), args.out)
    elif args.format == "json":
        doc = {
            "manifest": manifest.to_dict(),
            "curve": [
                {"p": p, "lhs": lhs, "rhs": rhs, "violation": violation}
                for p, lhs, rhs, violation in rows
            ],
        }
        _emit(dumps(doc), args.out)
    else:
        lines = [f"{'p':>14} {'lhs':>16} {'rhs':>16} {'violation':>16}"]
        for p, lhs, rhs, violation in rows:
            lines.append(f"{p:>14.8f} {lhs:>16.8f} {rhs:>16.8f} {violation:>16.8f}")
        _emit("\n".join(lines), args.out)
    return 0


def _add_common(parser, default_format: str) -> None:
    parser.add_argument("--format", choices=["json", "csv", "table"], default=default_format,
                        help="output format (default: %(default)s)")
    parser.add_argument("--out", default=None, metavar="PATH", help="write output to PATH instead of stdout")


def _add_state_source(parser) -> None:
    parser.add_argument("--file", default=None, metavar="PATH", help="state JSON file")
    parser.add_argument("--family", default=None, choices=sorted(FAMILIES), help="registered state family")


def _add_params(parser, with_auto: bool) -> None:
    parser.add_argument("--t1", nargs=2, type=float, default=None, metavar=("X", "Y"),
                        help="pair criterion parameters")
    parser.add_argument("--t2", nargs=4, type=float, default=None, metavar=("X", "Y", "G", "H"),
                        help="four-parameter criterion")
    if with_auto:
        parser.add_argument("--auto", action="store_true", help="optimize pair parameters per evaluation")
    parser.add_argument("--cap", type=float, default=1e4, help="parameter search range cap (default: %(default)s)")
    parser.add_argument("--grid", type=int, default=25, help="search grid points per scalar (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerscan",
        description="Steering detection via bordered correlation-matrix trace norms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    basis = sub.add_parser("basis", help="print a generator basis with diagnostics")
    basis.add_argument("--dim", type=int, required=True, help="local dimension (>= 2)")
    _add_common(basis, "table")
    basis.set_defaults(func=cmd_basis)

    check = sub.add_parser("check", help="evaluate the criterion for one state")
    _add_state_source(check)
    check.add_argument("--p", type=float, default=None, help="family mixing parameter")
    _add_params(check, with_auto=True)
    check.add_argument("--dir", choices=["ab", "ba", "both"], default="both",
                       help="steering direction(s) (default: %(default)s)")
    check.add_argument("--tol", type=float, default=1e-9,
                       help="certification margin on the violation (default: %(default)s)")
    _add_common(check, "table")
    check.set_defaults(func=cmd_check)

    scan = sub.add_parser("scan", help="bisect a family for its steerability threshold")
    _add_state_source(scan)
    scan.add_argument("--file0", default=None, metavar="PATH",
                      help="second endpoint for --file interpolation (default: maximally mixed)")
    _add_params(scan, with_auto=True)
    scan.add_argument("--dir", choices=["ab", "ba", "both"], default="ab",
                      help="steering direction (default: %(default)s)")
    scan.add_argument("--tol", type=float, default=DEFAULT_BISECT_TOL,
                      help="bisection tolerance (default: %(default)s)")
    _add_common(scan, "table")
    scan.set_defaults(func=cmd_scan)

    curve = sub.add_parser("curve", help="tabulate the criterion along a family")
    _add_state_source(curve)
    curve.add_argument("--file0", default=None, metavar="PATH",
                       help="second endpoint for --file interpolation (default: maximally mixed)")
    _add_params(curve, with_auto=False)
    curve.add_argument("--dir", choices=["ab", "ba", "both"], default="ab",
                       help="steering direction (default: %(default)s)")
    curve.add_argument("--p-range", nargs=2, type=float, default=[0.0, 1.0], metavar=("START", "STOP"),
                       help="mixing parameter range (default: 0 1)")
    curve.add_argument("--steps", type=int, default=41, help="number of grid points (default: %(default)s)")
    _add_common(curve, "csv")
    curve.set_defaults(func=cmd_curve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
