"""Matchings in step graphons.

A matching in ``W`` is a nonnegative kernel ``m`` supported inside the
support of ``W`` whose degree ``x -> int m(x, .) + int m(., x)`` is at most
1 everywhere.  Its size is ``int int m``.

The matching ratio is computed over step matchings on W's own partition.
That loses nothing: every matching, step or not, has size at most the size
of every cover (integrate ``m(x, y) (c(x) + c(y) - 1) >= 0``), and the step
LP optimum already equals the cover ratio, which :func:`matching_ratio`
checks on every call.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import rational_lp as rlp
from .core import (
    ZERO,
    StepGraphon,
    StepKernel,
    Verdict,
    common_partition,
    kernel_on,
    refine_graphon,
)
from .covers import cover_ratio


@dataclass(frozen=True)
class MatchingWitness:
    matching: StepKernel
    size: Fraction
    degrees: tuple[Fraction, ...]


def matching_size(m: StepKernel) -> Fraction:
    return m.integral()


def _square(m: StepKernel, *partitions):
    """``m`` restated on one partition refining its rows, columns and ``partitions``."""
    ms, maps = common_partition(m.row_measures, m.col_measures, *partitions)
    sq = kernel_on(m, ms, [t[0] for t in maps], [t[1] for t in maps])
    return sq, ms, maps


def degree_profile(m: StepKernel) -> list[tuple[Fraction, Fraction]]:
    """``(int m(x, .), int m(., x))`` per block.

    Blocks are those of the common refinement of the row and column
    partitions, which is just ``m``'s partition when the two agree.
    """
    sq, ms, _ = _square(m)
    k = len(ms)
    rows = [sum((ms[j] * sq.values[i][j] for j in range(k)), ZERO) for i in range(k)]
    cols = [sum((ms[j] * sq.values[j][i] for j in range(k)), ZERO) for i in range(k)]
    return list(zip(rows, cols))


def is_matching(m: StepKernel, W: StepGraphon) -> Verdict:
    """Check nonnegativity, support containment and degree <= 1.

    Reported block indices refer to the common refinement of m's rows,
    m's columns and W.
    """
    sq, ms, maps = _square(m, W.measures)
    rw = refine_graphon(W, ms, [t[2] for t in maps])
    k = len(ms)
    for i in range(k):
        for j in range(k):
            if sq.values[i][j] < 0:
                return Verdict(False, f"negative value {sq.values[i][j]}", (i, j))
    for i in range(k):
        for j in range(k):
            if sq.values[i][j] > 0 and rw.values[i][j] == 0:
                return Verdict(False, "positive outside the support of W", (i, j))
    for i, (out, inc) in enumerate(degree_profile(sq)):
        if out + inc > 1:
            return Verdict(False, f"degree {out + inc} > 1", (i,))
    return Verdict(True)


def matching_lp(W: StepGraphon) -> tuple[rlp.LinearProgram, list[tuple[int, int]]]:
    """Symmetric step matchings: one variable per support pair ``i <= j``.

    A symmetric optimum exists (average any optimum with its transpose), so
    this is lossless and the witness comes out symmetric.
    """
    pairs = W.support_pairs()
    nu = W.measures
    objective = tuple(nu[i] * nu[i] if i == j else 2 * nu[i] * nu[j] for i, j in pairs)
    rows = []
    for b in range(W.k):
        row = []
        for i, j in pairs:
            # degree of block b is 2 * sum_j nu_j m_bj
            if i == b and j == b:
                row.append(2 * nu[b])
            elif i == b:
                row.append(2 * nu[j])
            elif j == b:
                row.append(2 * nu[i])
            else:
                row.append(ZERO)
        rows.append(tuple(row))
    lp = rlp.LinearProgram(
        objective=objective,
        rows=tuple(rows),
        senses=("<=",) * W.k,
        rhs=(Fraction(1),) * W.k,
        maximize=True,
    )
    return lp, pairs


def matching_ratio(W: StepGraphon) -> tuple[Fraction, MatchingWitness]:
    """Exact maximum matching size with an optimal symmetric witness.

    Raises RuntimeError if the optimum differs from the cover ratio.
    """
    lp, pairs = matching_lp(W)
    sol = rlp.solve(lp, lexicographic=True)
    if not sol.optimal:
        raise RuntimeError(f"matching LP reported {sol.status}")
    vals = [[ZERO] * W.k for _ in range(W.k)]
    for (i, j), x in zip(pairs, sol.point):
        vals[i][j] = vals[j][i] = x
    m = StepKernel(W.measures, W.measures, tuple(map(tuple, vals)))
    verdict = is_matching(m, W)
    if not verdict:
        raise RuntimeError(f"LP optimum is not a matching: {verdict.reason}")
    size = matching_size(m)
    if size != sol.value:
        raise RuntimeError("witness size differs from LP value")
    tau, _ = cover_ratio(W)
    if tau != size:
        raise RuntimeError(f"duality violated: matching ratio {size} != cover ratio {tau}")
    degrees = tuple(a + b for a, b in degree_profile(m))
    return size, MatchingWitness(m, size, degrees)
