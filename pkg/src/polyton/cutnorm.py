"""Cut norm and block-permutation cut distance of step kernels.

For a step kernel the supremum over measurable ``S, T`` is attained at
unions of blocks: the rectangle integral is affine in the fraction of each
block that ``S`` (or ``T``) contains, so some optimum takes every fraction
in ``{0, 1}``.  The exact routine enumerates row subsets ``S``; for a fixed
``S`` the best ``T`` takes the columns whose sums share the sign of the
target, which costs one pass over the columns.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import NamedTuple

import numpy as np

from .core import ZERO, CapacityError, StepGraphon, StepKernel, ValidationError, lcm_of_denominators

_CHUNK = 1 << 14
_INT64_SAFE = 1 << 62


class CutResult(NamedTuple):
    value: Fraction
    S: tuple[int, ...]
    T: tuple[int, ...]


def _weighted(F: StepKernel) -> list[list[Fraction]]:
    return [[r * c * v for c, v in zip(F.col_measures, row)] for r, row in zip(F.row_measures, F.values)]


def _bits(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _best_from_sums(sums) -> tuple[int, int]:
    pos = sum(s for s in sums if s > 0)
    neg = -sum(s for s in sums if s < 0)
    return pos, neg


def _twin_groups(rows) -> list[list[int]]:
    groups: dict[tuple, list[int]] = {}
    for i, row in enumerate(rows):
        groups.setdefault(tuple(row), []).append(i)
    return list(groups.values())


def compress(F: StepKernel) -> tuple[StepKernel, list[list[int]], list[list[int]]]:
    """Merge identical rows and identical columns.

    The cut norm is unchanged: the rectangle integral is linear in each
    row's membership and twin rows contribute with the same sign, so some
    optimum takes twins together.  Returns the merged kernel and, for each
    merged row/column, the original indices it covers.
    """
    rg = _twin_groups(F.values)
    cg = _twin_groups(zip(*F.values))
    return (
        StepKernel(
            tuple(sum((F.row_measures[i] for i in g), ZERO) for g in rg),
            tuple(sum((F.col_measures[j] for j in g), ZERO) for g in cg),
            tuple(tuple(F.values[r[0]][c[0]] for c in cg) for r in rg),
        ),
        rg,
        cg,
    )


def cut_norm(F: StepKernel | StepGraphon, cap: int = 20) -> CutResult:
    """Exact ``max |int_{S x T} F|`` over unions of row blocks ``S`` and column blocks ``T``.

    Identical rows and columns are merged first, so ``cap`` bounds the
    number of distinct rows.  Ties go to the smallest ``S`` as a bitmask
    over distinct rows; ``T`` is then the set of columns with strictly
    positive (or strictly negative) sum.
    """
    if isinstance(F, StepGraphon):
        F = F.as_kernel()
    C, rg, cg = compress(F)
    rows, cols = C.shape
    if rows > cap:
        raise CapacityError(f"cut_norm: {rows} distinct row blocks exceeds cap {cap}")
    A = _weighted(C)
    scale = lcm_of_denominators(v for row in A for v in row)
    ints = [[int(v * scale) for v in row] for row in A]
    bound = max((abs(v) for row in ints for v in row), default=0) * rows * cols
    if bound < _INT64_SAFE:
        best, mask, positive = _scan_numpy(np.array(ints, dtype=np.int64))
    else:
        best, mask, positive = _scan_python(ints)
    S = _bits(mask)
    sums = [sum((ints[i][j] for i in S), 0) for j in range(cols)]
    T = tuple(j for j, s in enumerate(sums) if (s > 0 if positive else s < 0))
    return CutResult(
        Fraction(best, scale),
        tuple(sorted(i for s in S for i in rg[s])),
        tuple(sorted(j for t in T for j in cg[t])),
    )


def _scan_numpy(A: np.ndarray) -> tuple[int, int, bool]:
    rows = A.shape[0]
    best, best_mask, best_pos = -1, 0, True
    total = 1 << rows
    weights = 1 << np.arange(rows, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        member = ((masks[:, None] & weights[None, :]) != 0).astype(np.int64)
        sums = member @ A
        pos = np.where(sums > 0, sums, 0).sum(axis=1)
        neg = -np.where(sums < 0, sums, 0).sum(axis=1)
        val = np.maximum(pos, neg)
        i = int(np.argmax(val))
        if int(val[i]) > best:
            best, best_mask, best_pos = int(val[i]), int(masks[i]), bool(pos[i] >= neg[i])
    return best, best_mask, best_pos


def _scan_python(A: list[list[int]]) -> tuple[int, int, bool]:
    rows, cols = len(A), len(A[0])
    best, best_mask, best_pos = -1, 0, True
    for mask in range(1 << rows):
        sums = [0] * cols
        for i in _bits(mask):
            for j in range(cols):
                sums[j] += A[i][j]
        pos, neg = _best_from_sums(sums)
        if max(pos, neg) > best:
            best, best_mask, best_pos = max(pos, neg), mask, pos >= neg
    return best, best_mask, best_pos


def cut_norm_lower_bound(F: StepKernel | StepGraphon, restarts: int = 10, seed: int = 0) -> CutResult:
    """Alternating maximisation from random starts; a lower bound on :func:`cut_norm`.

    From a random ``S`` pick the best ``T`` for the current sign, then the
    best ``S`` for that ``T``, until the value stops improving.  Both signs
    are tried on every restart.  Deterministic for a given seed.
    """
    if isinstance(F, StepGraphon):
        F = F.as_kernel()
    A = _weighted(F)
    rows, cols = F.shape
    rng = random.Random(seed)
    best = CutResult(ZERO, (), ())
    for _ in range(max(1, restarts)):
        start = tuple(i for i in range(rows) if rng.random() < 0.5)
        for sign in (1, -1):
            S, T, val = start, (), None
            while True:
                csum = [sum((A[i][j] for i in S), ZERO) for j in range(cols)]
                T = tuple(j for j in range(cols) if sign * csum[j] > 0)
                rsum = [sum((A[i][j] for j in T), ZERO) for i in range(rows)]
                S = tuple(i for i in range(rows) if sign * rsum[i] > 0)
                new = abs(sum((rsum[i] for i in S), ZERO))
                if val is not None and new <= val:
                    break
                val = new
            if val > best.value:
                best = CutResult(val, S, T)
    return best


@dataclass(frozen=True)
class CutDistance:
    """``value`` is ``cut_norm(W1 - W2 relabelled by permutation)``.

    Only block permutations are searched, so this is an upper bound on the
    cut distance over all measure-preserving relabelings.
    """

    value: Fraction
    permutation: tuple[int, ...]
    upper_bound: bool = True


def cut_distance_blocks(W1: StepGraphon, W2: StepGraphon, cap: int = 9) -> CutDistance:
    """Minimum cut norm of ``W1 - W2`` over block permutations of ``W2`` that preserve measures.

    ``permutation[p]`` is the block of ``W2`` placed at position ``p``.
    """
    if sorted(W1.measures) != sorted(W2.measures):
        raise ValidationError("block measures differ; refine both graphons to equal-measure blocks first", "measures")
    if W1.k > cap:
        raise CapacityError(f"cut_distance_blocks: {W1.k} blocks exceeds cap {cap}")
    best: CutDistance | None = None
    for perm in _measure_preserving(W1.measures, W2.measures):
        diff = W1.as_kernel() - W2.permuted(perm).as_kernel()
        val = cut_norm(diff).value
        if best is None or val < best.value:
            best = CutDistance(val, perm)
            if val == 0:
                break
    assert best is not None
    return best


def _measure_preserving(target, source):
    """Permutations ``perm`` with ``source[perm[p]] == target[p]``, in lexicographic order."""
    groups: dict[Fraction, list[int]] = {}
    for i, m in enumerate(source):
        groups.setdefault(m, []).append(i)
    slots: dict[Fraction, list[int]] = {}
    for p, m in enumerate(target):
        slots.setdefault(m, []).append(p)
    keys = list(groups)
    out = []
    for choice in product(*(permutations(groups[m]) for m in keys)):
        perm = [0] * len(target)
        for m, chosen in zip(keys, choice):
            for p, i in zip(slots[m], chosen):
                perm[p] = i
        out.append(tuple(perm))
    return sorted(out)
