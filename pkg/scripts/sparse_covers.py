"""Sparse random graphs whose covers stay large.

``G(2n, p)`` with ``p = 1/log n`` has edge density tending to 0, so it
converges in cut distance to the zero graphon, whose covers include the
zero function.  Yet these graphs have near-perfect matchings, so every
fractional cover of them has size close to 1/2.  Limits of covers of the
graphs therefore miss most covers of the limit: the inclusion between
cover sets in the limit only goes one way.

    python3 scripts/sparse_covers.py --ns 50,100,200,400 --seed 1
"""

import argparse
import math
from fractions import Fraction

from polyton import StepGraphon, sample_wrandom
from polyton.sampling import fractional_matching


def rows(ns, seed):
    for n in ns:
        p = Fraction(1 / math.log(n)).limit_denominator(10**6)
        G = sample_wrandom(StepGraphon.constant(p), 2 * n, seed)
        gm = fractional_matching(G)
        density = Fraction(2 * G.edge_count, (2 * n) ** 2)
        yield 2 * n, p, density, gm.tau


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", default="50,100,200,400")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    print("vertices,p,edge_density,cover_ratio")
    for v, p, density, tau in rows([int(x) for x in args.ns.split(",")], args.seed):
        print(f"{v},{float(p):.4f},{float(density):.4f},{tau}")


if __name__ == "__main__":
    main()
