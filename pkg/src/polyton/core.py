"""Exact block-constant objects on the unit interval.

Every object lives on ``[0, 1)`` cut into consecutive intervals ("blocks")
whose lengths are the block measures.  Measures and values are
:class:`fractions.Fraction`, so integrals, comparisons and refinements are
exact.  Two step objects that agree off a null set are equal here, because
blocks have positive measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate, permutations
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence, Union

import numpy as np

Rational = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class PolytonError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(PolytonError, ValueError):
    """An input violates a stated invariant.

    ``field`` names the offending field (``"measures"``, ``"values[0][1]"``...)
    so callers such as the CLI can report it.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class CapacityError(PolytonError, ValueError):
    """An input exceeds a configured size cap."""


def as_rational(x: RationalLike, field: str = "value") -> Fraction:
    if isinstance(x, bool):
        raise ValidationError(f"{field}: booleans are not rationals", field)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"{field}: cannot parse {x!r} as a rational", field) from exc
    raise ValidationError(
        f"{field}: expected an exact rational (Fraction, int or 'p/q'), got {type(x).__name__}",
        field,
    )


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of ``q`` if it is the square of a rational, else None."""
    if q < 0:
        return None
    # Fractions are reduced, so q is a square iff numerator and denominator are.
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def sqrt_bounds(q: Fraction, bits: int = 100) -> tuple[Fraction, Fraction]:
    """Rationals ``lo <= sqrt(q) <= hi`` with ``hi - lo <= 2**-bits``; equal when exact."""
    if q < 0:
        raise ValueError("sqrt of a negative number")
    exact = rational_sqrt(q)
    if exact is not None:
        return exact, exact
    scale = 1 << bits
    # floor(sqrt(q) * scale) = isqrt(floor(q * scale^2))
    lo = math.isqrt(q.numerator * scale * scale // q.denominator)
    return Fraction(lo, scale), Fraction(lo + 1, scale)


def _measures(values: Iterable[RationalLike], field: str) -> tuple[Fraction, ...]:
    ms = tuple(as_rational(v, f"{field}[{i}]") for i, v in enumerate(values))
    if not ms:
        raise ValidationError(f"{field}: at least one block is required", field)
    for i, m in enumerate(ms):
        if m <= 0:
            raise ValidationError(f"{field}[{i}]: block measure must be positive, got {m}", field)
    if sum(ms) != 1:
        raise ValidationError(f"{field}: block measures must sum to 1, got {sum(ms)}", field)
    return ms


def _matrix(rows: Iterable[Iterable[RationalLike]], n_rows: int, n_cols: int) -> tuple[tuple[Fraction, ...], ...]:
    out = []
    for i, row in enumerate(rows):
        row = tuple(as_rational(v, f"values[{i}][{j}]") for j, v in enumerate(row))
        if len(row) != n_cols:
            raise ValidationError(f"values[{i}]: expected {n_cols} entries, got {len(row)}", "values")
        out.append(row)
    if len(out) != n_rows:
        raise ValidationError(f"values: expected {n_rows} rows, got {len(out)}", "values")
    return tuple(out)


@dataclass(frozen=True)
class StepGraphon:
    """Symmetric block-constant kernel with values in ``[0, 1]``."""

    measures: tuple[Fraction, ...]
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        ms = _measures(self.measures, "measures")
        vals = _matrix(self.values, len(ms), len(ms))
        k = len(ms)
        for i in range(k):
            for j in range(k):
                v = vals[i][j]
                if not 0 <= v <= 1:
                    raise ValidationError(f"values[{i}][{j}]: must lie in [0, 1], got {v}", f"values[{i}][{j}]")
                if v != vals[j][i]:
                    raise ValidationError(f"values: not symmetric at ({i},{j})", f"values[{i}][{j}]")
        object.__setattr__(self, "measures", ms)
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.measures)

    @classmethod
    def constant(cls, value: RationalLike, measures: Sequence[RationalLike] = (1,)) -> "StepGraphon":
        v = as_rational(value)
        return cls(tuple(measures), tuple((v,) * len(measures) for _ in measures))

    def as_kernel(self) -> "StepKernel":
        return StepKernel(self.measures, self.measures, self.values)

    def edge_density(self) -> Fraction:
        return self.as_kernel().integral()

    def support_pairs(self) -> list[tuple[int, int]]:
        """Block pairs ``i <= j`` with positive value."""
        return [(i, j) for i in range(self.k) for j in range(i, self.k) if self.values[i][j] > 0]

    def permuted(self, perm: Sequence[int]) -> "StepGraphon":
        """Relabel blocks: block ``p`` of the result is block ``perm[p]`` of self."""
        return StepGraphon(
            tuple(self.measures[i] for i in perm),
            tuple(tuple(self.values[i][j] for j in perm) for i in perm),
        )


@dataclass(frozen=True)
class StepKernel:
    """Block-constant function on the square, any sign, rows and columns partitioned separately."""

    row_measures: tuple[Fraction, ...]
    col_measures: tuple[Fraction, ...]
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rm = _measures(self.row_measures, "row_measures")
        cm = _measures(self.col_measures, "col_measures")
        object.__setattr__(self, "row_measures", rm)
        object.__setattr__(self, "col_measures", cm)
        object.__setattr__(self, "values", _matrix(self.values, len(rm), len(cm)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_measures), len(self.col_measures)

    @classmethod
    def zero(cls, row_measures: Sequence[RationalLike] = (1,), col_measures: Sequence[RationalLike] | None = None) -> "StepKernel":
        if col_measures is None:
            col_measures = row_measures
        return cls(tuple(row_measures), tuple(col_measures), tuple((ZERO,) * len(col_measures) for _ in row_measures))

    def integral(self) -> Fraction:
        return sum(
            (a * b * v for a, row in zip(self.row_measures, self.values) for b, v in zip(self.col_measures, row)),
            ZERO,
        )

    def max_value(self) -> Fraction:
        return max(v for row in self.values for v in row)

    def is_symmetric(self) -> bool:
        return self.row_measures == self.col_measures and all(
            self.values[i][j] == self.values[j][i] for i in range(len(self.values)) for j in range(i)
        )

    def transpose(self) -> "StepKernel":
        return StepKernel(self.col_measures, self.row_measures, tuple(zip(*self.values)))

    def map(self, fn) -> "StepKernel":
        return StepKernel(self.row_measures, self.col_measures, tuple(tuple(fn(v) for v in row) for row in self.values))

    def __neg__(self) -> "StepKernel":
        return self.map(lambda v: -v)

    def __mul__(self, scalar: RationalLike) -> "StepKernel":
        s = as_rational(scalar)
        return self.map(lambda v: s * v)

    __rmul__ = __mul__

    def __add__(self, other: "StepKernel | StepGraphon") -> "StepKernel":
        a, b, _ = common_refinement(self, _kernel(other))
        return StepKernel(
            a.row_measures,
            a.col_measures,
            tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a.values, b.values)),
        )

    def __sub__(self, other: "StepKernel | StepGraphon") -> "StepKernel":
        return self + (-_kernel(other))


@dataclass(frozen=True)
class StepCover:
    """Block-constant function on the interval with values in ``[0, 1]``."""

    measures: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        ms = _measures(self.measures, "measures")
        vals = tuple(as_rational(v, f"values[{i}]") for i, v in enumerate(self.values))
        if len(vals) != len(ms):
            raise ValidationError(f"values: expected {len(ms)} entries, got {len(vals)}", "values")
        for i, v in enumerate(vals):
            if not 0 <= v <= 1:
                raise ValidationError(f"values[{i}]: must lie in [0, 1], got {v}", f"values[{i}]")
        object.__setattr__(self, "measures", ms)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: RationalLike, measures: Sequence[RationalLike] = (1,)) -> "StepCover":
        return cls(tuple(measures), (as_rational(value),) * len(measures))

    def size(self) -> Fraction:
        return sum((m * v for m, v in zip(self.measures, self.values)), ZERO)


@dataclass(frozen=True, eq=False)
class SampledGraph:
    """Finite simple graph; ``adjacency`` is a read-only symmetric 0/1 array."""

    n: int
    adjacency: np.ndarray
    seed: int | None = None
    # latent block of each vertex when drawn from a step graphon
    blocks: tuple[int, ...] | None = None

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=np.uint8)
        if adj.shape != (self.n, self.n):
            raise ValidationError(f"adjacency: expected shape ({self.n},{self.n}), got {adj.shape}", "adjacency")
        if not np.array_equal(adj, adj.T):
            raise ValidationError("adjacency: not symmetric", "adjacency")
        if adj.diagonal().any():
            raise ValidationError("adjacency: diagonal must be zero", "adjacency")
        if adj.max(initial=0) > 1:
            raise ValidationError("adjacency: entries must be 0 or 1", "adjacency")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    def __eq__(self, other):
        return (
            isinstance(other, SampledGraph)
            and self.n == other.n
            and self.seed == other.seed
            and self.blocks == other.blocks
            and np.array_equal(self.adjacency, other.adjacency)
        )

    @property
    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2


@dataclass(frozen=True)
class BlockMap:
    """Origin of each refined block: ``rows[p] == (block in a, block in b)``.

    For graphons and covers the partition is shared, so ``cols is rows``.
    """

    rows: tuple[tuple[int, int], ...]
    cols: tuple[tuple[int, int], ...]


def _kernel(x: "StepKernel | StepGraphon") -> StepKernel:
    if isinstance(x, StepGraphon):
        return x.as_kernel()
    if isinstance(x, StepKernel):
        return x
    raise TypeError(f"expected a StepKernel or StepGraphon, got {type(x).__name__}")


def merge_partitions(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], tuple[tuple[int, int], ...]]:
    """Common refinement of two interval partitions of ``[0, 1)``.

    Returns the refined measures and, for each refined block, the indices of
    the blocks of ``a`` and ``b`` containing it.
    """
    cuts_a = list(accumulate(a))
    cuts_b = list(accumulate(b))
    measures, origin = [], []
    i = j = 0
    left = ZERO
    while i < len(a) and j < len(b):
        right = min(cuts_a[i], cuts_b[j])
        measures.append(right - left)
        origin.append((i, j))
        if cuts_a[i] == right:
            i += 1
        if cuts_b[j] == right:
            j += 1
        left = right
    return tuple(measures), tuple(origin)


def common_partition(*partitions: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], list[tuple[int, ...]]]:
    """Refinement of any number of partitions; ``maps[p]`` gives the source block in each."""
    cuts = sorted(set().union(*(accumulate(p) for p in partitions)))
    measures = tuple(b - a for a, b in zip([ZERO] + cuts[:-1], cuts))
    maps = []
    for p in partitions:
        ends = list(accumulate(p))
        idx, out = 0, []
        for c in cuts:
            out.append(idx)
            if ends[idx] == c:
                idx += 1
        maps.append(out)
    return measures, [tuple(m[p] for m in maps) for p in range(len(measures))]


def refine_graphon(W: StepGraphon, measures: Sequence[Fraction], origin: Sequence[int]) -> StepGraphon:
    return StepGraphon(tuple(measures), tuple(tuple(W.values[a][b] for b in origin) for a in origin))


def refine_kernel(F: StepKernel, row_measures, row_origin, col_measures, col_origin) -> StepKernel:
    return StepKernel(
        tuple(row_measures),
        tuple(col_measures),
        tuple(tuple(F.values[a][b] for b in col_origin) for a in row_origin),
    )


def refine_cover(c: StepCover, measures: Sequence[Fraction], origin: Sequence[int]) -> StepCover:
    return StepCover(tuple(measures), tuple(c.values[a] for a in origin))


def common_refinement(a, b):
    """Put two step objects of the same kind on one partition.

    Returns ``(a', b', BlockMap)``.  Values are unchanged as functions; only
    blocks are split.  Kernels refine rows and columns independently.
    """
    if type(a) is not type(b):
        raise TypeError(f"cannot refine {type(a).__name__} against {type(b).__name__}")
    if isinstance(a, StepKernel):
        rm, rorig = merge_partitions(a.row_measures, b.row_measures)
        cm, corig = merge_partitions(a.col_measures, b.col_measures)
        fa = refine_kernel(a, rm, [o[0] for o in rorig], cm, [o[0] for o in corig])
        fb = refine_kernel(b, rm, [o[1] for o in rorig], cm, [o[1] for o in corig])
        return fa, fb, BlockMap(rorig, corig)
    ms, orig = merge_partitions(a.measures, b.measures)
    ia, ib = [o[0] for o in orig], [o[1] for o in orig]
    if isinstance(a, StepGraphon):
        return refine_graphon(a, ms, ia), refine_graphon(b, ms, ib), BlockMap(orig, orig)
    if isinstance(a, StepCover):
        return refine_cover(a, ms, ia), refine_cover(b, ms, ib), BlockMap(orig, orig)
    raise TypeError(f"not a step object: {type(a).__name__}")


def l1_distance(f: "StepKernel | StepGraphon", g: "StepKernel | StepGraphon") -> Fraction:
    a, b, _ = common_refinement(_kernel(f), _kernel(g))
    return sum(
        (
            rm * cm * abs(x - y)
            for rm, ra, rb in zip(a.row_measures, a.values, b.values)
            for cm, x, y in zip(a.col_measures, ra, rb)
        ),
        ZERO,
    )


def lcm_of_denominators(qs: Iterable[Fraction]) -> int:
    out = 1
    for q in qs:
        out = out * q.denominator // math.gcd(out, q.denominator)
    return out


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome with the first violated condition, if any."""

    ok: bool
    reason: str | None = None
    blocks: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def kernel_on(F: StepKernel, measures: Sequence[Fraction], rows_of: Sequence[int], cols_of: Sequence[int]) -> StepKernel:
    """Restate ``F`` on the square partition ``measures``; ``rows_of[p]``/``cols_of[p]`` locate block ``p``."""
    return refine_kernel(F, measures, rows_of, measures, cols_of)


def merge_twin_blocks(W: StepGraphon) -> StepGraphon:
    """Merge blocks with identical rows (same function of the other coordinate)."""
    groups: list[list[int]] = []
    for i in range(W.k):
        for g in groups:
            if W.values[g[0]] == W.values[i]:
                g.append(i)
                break
        else:
            groups.append([i])
    reps = [g[0] for g in groups]
    return StepGraphon(
        tuple(sum((W.measures[i] for i in g), ZERO) for g in groups),
        tuple(tuple(W.values[a][b] for b in reps) for a in reps),
    )


def are_isomorphic(W1: StepGraphon, W2: StepGraphon, cap: int = 8) -> bool:
    """Equality up to block relabeling after merging twin blocks."""
    a, b = merge_twin_blocks(W1), merge_twin_blocks(W2)
    if a.k != b.k or sorted(a.measures) != sorted(b.measures):
        return False
    if a.k > cap:
        raise CapacityError(f"isomorphism test capped at {cap} merged blocks, got {a.k}")
    for perm in permutations(range(b.k)):
        if all(b.measures[perm[i]] == a.measures[i] for i in range(a.k)) and b.permuted(perm) == a:
            return True
    return False
