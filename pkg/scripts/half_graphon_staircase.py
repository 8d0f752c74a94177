"""Staircase approximations of the half graphon ``W(x, y) = [x + y <= 1]``.

On ``k`` equal blocks keep the value 1 on every block lying entirely below
the anti-diagonal.  The matching ratio climbs to 1/2 as ``k`` grows, but the
optimal matching has to pile its mass onto the thin strip next to the
anti-diagonal, so its largest value grows like ``k/2``.  No sequence of
near-optimal matchings converges, and the limit graphon attains no matching
of size 1/2.

    python3 scripts/half_graphon_staircase.py --max-k 12
"""

import argparse
from fractions import Fraction

from polyton import StepGraphon, matching_ratio


def staircase(k: int) -> StepGraphon:
    one = Fraction(1, k)
    return StepGraphon((one,) * k, tuple(tuple(Fraction(int(i + j + 2 <= k)) for j in range(k)) for i in range(k)))


def rows(max_k: int):
    for k in range(2, max_k + 1):
        nu, witness = matching_ratio(staircase(k))
        yield k, nu, witness.matching.max_value()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-k", type=int, default=12)
    args = ap.parse_args(argv)
    print("k,nu,max_witness_value")
    for k, nu, peak in rows(args.max_k):
        print(f"{k},{nu},{peak}")


if __name__ == "__main__":
    main()
