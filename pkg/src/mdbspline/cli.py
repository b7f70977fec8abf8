"""Command-line interface.

Exit codes: 0 success, 2 configuration or argument error, 3 I/O error,
4 mathematical precondition failure (non-nested spaces, rank deficiency, ...).
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import showcase
from .config import load_config
from .core_bspline import OpenKnotVector, eval_bspline_table
from .errors import ConfigError, DimensionMismatch, MDSplineError, OrderTooHigh
from .extraction import ExtractionOperator, extraction_operator
from .md_space import SegmentConfiguration
from .md_spline import MDSpline, convert
from .sparse_linalg import write_matrix_market

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_MATH = 0, 2, 3, 4


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return f"{x:.17g}"


def sample_grid(cfg: SegmentConfiguration, samples: int) -> np.ndarray:
    a, b = cfg.domain.interval
    return np.linspace(a, b, samples)


def basis_csv(op: ExtractionOperator, samples: int, deriv: int = 0) -> str:
    xi = sample_grid(op.space, samples)
    vals = op.evaluate_basis(xi, deriv)
    header = ["xi"] + [f"B{j + 1}" for j in range(op.dimension)]
    lines = [",".join(header)]
    for x, row in zip(xi, vals):
        lines.append(",".join([fmt(x)] + [fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def row_csv(values) -> str:
    return ",".join(fmt(v) for v in values) + "\n"


def read_coeffs(path) -> np.ndarray:
    """Numbers separated by commas and/or whitespace; a non-numeric first line is skipped."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    tokens: list[str] = []
    for k, ln in enumerate(lines):
        parts = [t for t in re.split(r"[,\s]+", ln.strip()) if t]
        try:
            [float(t) for t in parts]
        except ValueError:
            if k == 0:
                continue
            raise ConfigError(f"{path}: line {k + 1}: not a list of numbers") from None
        tokens.extend(parts)
    return np.array([float(t) for t in tokens])


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# commands ---------------------------------------------------------------------


def cmd_dim(args) -> None:
    cfg = load_config(args.config)
    print(f"dimension={cfg.dimension}")
    print("local_dims=" + ",".join(str(n) for n in cfg.local_dims))
    print("breakpoints=" + ",".join(fmt(x) for x in cfg.domain.breakpoints))


def cmd_basis(args) -> None:
    if args.samples < 2:
        raise CommandError("--samples must be at least 2", EXIT_CONFIG)
    cfg = load_config(args.config)
    _emit(basis_csv(extraction_operator(cfg), args.samples, args.deriv), args.out)


def cmd_extract(args) -> None:
    op = extraction_operator(load_config(args.config))
    if args.out is None:
        raise CommandError("extract needs --out", EXIT_CONFIG)
    write_matrix_market(args.out, op.matrix)


def cmd_convert(args) -> None:
    if args.target is None or args.coeffs is None:
        raise CommandError("convert needs --target and --coeffs", EXIT_CONFIG)
    src, dst = load_config(args.config), load_config(args.target)
    coeffs = read_coeffs(args.coeffs)
    sp = MDSpline(extraction_operator(src), coeffs)
    out = convert(sp, extraction_operator(dst), allow_lossy=args.allow_lossy)
    _emit(row_csv(out.coeffs), args.out)


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    print(path)


def run_example(which: int, outdir: Path, samples: int) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    if which == 1:
        for kappa in (0, 1, 2):
            op = extraction_operator(showcase.basis_space(kappa))
            _write(outdir / f"ex1_basis_k{kappa}.csv", basis_csv(op, samples, 0))
            _write(outdir / f"ex1_deriv_k{kappa}.csv", basis_csv(op, samples, 1))
    elif which == 2:
        op = extraction_operator(showcase.periodic_space())
        _write(outdir / "ex2_periodic_basis.csv", basis_csv(op, samples, 0))
        _write(outdir / "ex2_periodic_deriv.csv", basis_csv(op, samples, 1))
    elif which == 3:
        sp = MDSpline.from_config(showcase.conversion_source(), showcase.CONVERSION_COEFFS)
        host = convert(sp, showcase.conversion_target())
        _write(outdir / "ex3_mdb_coeffs.csv", row_csv(sp.coeffs))
        _write(outdir / "ex3_bspline_coeffs.csv", row_csv(host.coeffs))
        # the degree-7 coefficients are checked with a plain B-spline evaluator
        kv = OpenKnotVector(showcase.DEGREE7_HOST_KNOTS, 7)
        xi = sample_grid(sp.space, samples)
        first, ders = eval_bspline_table(kv, xi, 0)
        idx = first[:, None] + np.arange(kv.degree + 1)
        via_bspline = np.sum(ders[0] * host.coeffs[idx], axis=1)
        via_mdb = sp(xi)
        diff = np.abs(via_mdb - via_bspline)
        lines = ["xi,mdb,bspline,absdiff"]
        lines += [",".join(fmt(v) for v in row) for row in zip(xi, via_mdb, via_bspline, diff)]
        _write(outdir / "ex3_function.csv", "\n".join(lines) + "\n")
        if diff.max() > 1e-10:
            raise CommandError(f"representations disagree by {diff.max():.3e}", EXIT_MATH)
    else:
        raise CommandError(f"unknown example {which}", EXIT_CONFIG)


def cmd_examples(args) -> None:
    outdir = Path(args.out) if args.out else Path(".")
    for which in args.which:
        run_example(which, outdir, args.samples)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdbspline", description="Multi-degree B-splines via sparse extraction operators."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="print dimension, local dimensions and breakpoints")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("basis", help="sample the MDB-spline basis to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--deriv", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("extract", help="write the extraction operator in Matrix Market format")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("convert", help="convert MDB-spline coefficients to another space")
    p.add_argument("--config", required=True, help="source space")
    p.add_argument("--target", help="target space")
    p.add_argument("--coeffs", help="file with the source coefficients")
    p.add_argument("--out")
    p.add_argument("--allow-lossy", action="store_true", help="least-squares fit into a non-superspace")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("examples", help="reproduce the demonstration spaces")
    p.add_argument("which", type=int, nargs="+", choices=(1, 2, 3))
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, OrderTooHigh, DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MDSplineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
