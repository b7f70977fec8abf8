"""Rebuild the three demonstration spaces and print a short report.

    python3 scripts/reproduce_examples.py [--out results/]

Writes the sampled bases and coefficient files through the CLI ``examples``
command and prints dimensions plus the degree-7 coefficients.
"""

import argparse
from pathlib import Path

import numpy as np

from mdbspline import showcase
from mdbspline.cli import main as cli_main
from mdbspline.extraction import extraction_operator
from mdbspline.md_spline import MDSpline, convert


def report() -> None:
    for kappa in (0, 1, 2):
        op = extraction_operator(showcase.basis_space(kappa))
        print(f"degrees (3,4,5), kappa={kappa}: {op.dimension} functions, H is {op.matrix.shape}, nnz={op.matrix.nnz}")
    per = extraction_operator(showcase.periodic_space())
    print(f"periodic (3,4,5): {per.dimension} functions")

    sp = MDSpline.from_config(showcase.conversion_source(), showcase.CONVERSION_COEFFS)
    host = convert(sp, showcase.conversion_target())
    print(f"degrees (7,2,3): dimension {sp.operator.dimension} -> degree 7: {host.operator.dimension}")
    print("degree-7 coefficients:", np.array2string(host.coeffs, precision=4, max_line_width=120))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="output directory for the CSV files")
    parser.add_argument("--samples", type=int, default=1000)
    args = parser.parse_args()
    report()
    Path(args.out).mkdir(parents=True, exist_ok=True)
    raise SystemExit(cli_main(["examples", "1", "2", "3", "--out", args.out, "--samples", str(args.samples)]))


if __name__ == "__main__":
    main()
