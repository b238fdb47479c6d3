"""Measure how the deletion tableau scales on the two-support chain family.

The depth-first search keeps only the active branch and its pending
siblings, so the number of simultaneously live branches should stay
polynomial in the chain length even though the family of open branches
it enumerates doubles with every extra link.  This script reports both
growth curves and fits them: a log-log least-squares exponent for the
peak live count (polynomial test) and a semi-log slope for the open
branch count (exponential rate).
"""

import argparse
import math
import sys
import time
from dataclasses import dataclass

sys.path.insert(0, "src")

from vud.deletion import build_tableau, delete_request, deletion_program
from vud.lang import Atom
from vud.randgen import chain_database


@dataclass(frozen=True)
class GrowthConfig:
    min_n: int = 4
    max_n: int = 12


@dataclass(frozen=True)
class Measurement:
    n: int
    peak_live: int
    open_branches: int
    expansions: int
    seconds: float


def measure(n: int) -> Measurement:
    db = chain_database(n)
    start = time.perf_counter()
    tableau = build_tableau(deletion_program(db), delete_request(Atom("p1")))
    elapsed = time.perf_counter() - start
    return Measurement(
        n=n,
        peak_live=tableau.peak_live,
        open_branches=len(tableau.open()),
        expansions=tableau.expansions,
        seconds=elapsed,
    )


def least_squares_slope(xs: list[float], ys: list[float]) -> float:
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    num = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    den = sum((x - mean_x) ** 2 for x in xs)
    return num / den


def polynomial_exponent(rows: list[Measurement]) -> float:
    """Log-log fit of peak live branches against chain length."""
    xs = [math.log(r.n) for r in rows]
    ys = [math.log(r.peak_live) for r in rows]
    return least_squares_slope(xs, ys)


def exponential_rate(rows: list[Measurement]) -> float:
    """Semi-log fit of open branch count: slope near ln 2 means doubling."""
    xs = [float(r.n) for r in rows]
    ys = [math.log(r.open_branches) for r in rows]
    return least_squares_slope(xs, ys)


def run(config: GrowthConfig) -> list[Measurement]:
    return [measure(n) for n in range(config.min_n, config.max_n + 1)]


def report(rows: list[Measurement]) -> str:
    lines = ["%4s %10s %14s %12s %9s" % ("n", "peak_live", "open_branches", "expansions", "seconds")]
    for r in rows:
        lines.append(
            "%4d %10d %14d %12d %9.3f"
            % (r.n, r.peak_live, r.open_branches, r.expansions, r.seconds)
        )
    lines.append("")
    lines.append("peak live branches: log-log fit exponent %.3f" % polynomial_exponent(rows))
    lines.append(
        "open branch family: semi-log slope %.3f (ln 2 = %.3f would be doubling)"
        % (exponential_rate(rows), math.log(2))
    )
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--min-n", type=int, default=GrowthConfig.min_n)
    parser.add_argument("--max-n", type=int, default=GrowthConfig.max_n)
    args = parser.parse_args(argv)
    if args.min_n < 2 or args.max_n < args.min_n:
        parser.error("need 2 <= min-n <= max-n")
    rows = run(GrowthConfig(min_n=args.min_n, max_n=args.max_n))
    print(report(rows))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
