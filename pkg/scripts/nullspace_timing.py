"""Wall time of the sparse null-space step against the vector length.

    python3 scripts/nullspace_timing.py [--max-q 400000] [--repeats 7]

Prints the best-of-``repeats`` time per length and the ratio to the previous
length; a linear-time kernel shows ratios near 2.
"""

import argparse
import time

import numpy as np

from mdbspline.extraction import nullspace_of_column


def constraint_like(q: int, rng: np.random.Generator) -> np.ndarray:
    # zero-sum column whose partial sums alternate in sign
    partial = rng.uniform(0.1, 3.0, q - 1) * (-1.0) ** np.arange(q - 1)
    return np.diff(np.r_[0.0, partial, 0.0])


def best_time(l: np.ndarray, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        nullspace_of_column(l)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--min-q", type=int, default=12_500)
    parser.add_argument("--max-q", type=int, default=400_000)
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    best_time(constraint_like(1000, rng), 3)
    prev = None
    print(f"{'q':>9}  {'seconds':>10}  ratio")
    q = args.min_q
    while q <= args.max_q:
        t = best_time(constraint_like(q, rng), args.repeats)
        ratio = f"{t / prev:5.2f}" if prev else "    -"
        print(f"{q:>9}  {t:10.5f}  {ratio}")
        prev = t
        q *= 2


if __name__ == "__main__":
    main()
