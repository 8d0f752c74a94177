"""Fractional vertex covers of step graphons.

A cover is a ``[0, 1]``-valued function ``c`` with ``c(x) + c(y) >= 1``
wherever ``W(x, y) > 0``.  On a step graphon only block values matter, so
the covers of ``W`` on its own partition form a finite polytope, the
"quotient" cover polytope.  This module solves for the cover ratio,
enumerates and classifies the quotient vertices, produces explicit
decompositions showing that non-half-integral covers are not extreme, tests
membership in the hull of integral covers and evaluates the Erdos-Gallai
type lower bound on the cover ratio in terms of edge density.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Literal, Union

from . import rational_lp as rlp
from .core import (
    HALF,
    ONE,
    ZERO,
    CapacityError,
    StepCover,
    StepGraphon,
    ValidationError,
    Verdict,
    are_isomorphic,
    as_rational,
    merge_partitions,
    rational_sqrt,
    refine_cover,
    refine_graphon,
    sqrt_bounds,
)

Number = Union[Fraction, decimal.Decimal]
Classification = Literal["integral", "half-integral", "neither"]

EG_TOLERANCE = decimal.Decimal("1e-9")
_PRECISION = 50
CROSSING_DENSITY = Fraction(16, 25)


def classify(values: Iterable[Fraction]) -> Classification:
    vals = set(values)
    if vals <= {ZERO, ONE}:
        return "integral"
    if vals <= {ZERO, HALF, ONE}:
        return "half-integral"
    return "neither"


@dataclass(frozen=True)
class CoverCertificate:
    cover: StepCover
    size: Fraction
    classification: Classification
    tight_pairs: tuple[tuple[int, int], ...]


def certify(c: StepCover, W: StepGraphon) -> CoverCertificate:
    """Certificate for a cover given on W's partition."""
    if c.measures != W.measures:
        raise ValidationError("cover and graphon must share a partition", "measures")
    tight = tuple((i, j) for i, j in W.support_pairs() if c.values[i] + c.values[j] == 1)
    return CoverCertificate(c, c.size(), classify(c.values), tight)


def _aligned(c: StepCover, W: StepGraphon) -> tuple[StepCover, StepGraphon, list[int]]:
    ms, orig = merge_partitions(c.measures, W.measures)
    w_of = [o[1] for o in orig]
    return refine_cover(c, ms, [o[0] for o in orig]), refine_graphon(W, ms, w_of), w_of


def is_cover(c: StepCover, W: StepGraphon) -> Verdict:
    """Check ``c_i + c_j >= 1`` on every support pair of the common refinement.

    Values in ``[0, 1]`` are guaranteed by :class:`StepCover`.  Reported
    blocks are the W blocks of the first violated pair.
    """
    rc, rw, w_of = _aligned(c, W)
    for i, j in rw.support_pairs():
        total = rc.values[i] + rc.values[j]
        if total < 1:
            return Verdict(False, f"c + c = {total} < 1 on a support pair", (w_of[i], w_of[j]))
    return Verdict(True)


def cover_lp(W: StepGraphon) -> rlp.LinearProgram:
    """min sum nu_i c_i  s.t.  c_i + c_j >= 1 on support pairs, 0 <= c <= 1."""
    k = W.k
    rows = []
    for i, j in W.support_pairs():
        row = [ZERO] * k
        row[i] += 1
        row[j] += 1
        rows.append(tuple(row))
    return rlp.LinearProgram(
        objective=W.measures,
        rows=tuple(rows),
        senses=(">=",) * len(rows),
        rhs=(ONE,) * len(rows),
        bounds=((ZERO, ONE),) * k,
        maximize=False,
    )


def cover_ratio(W: StepGraphon) -> tuple[Fraction, CoverCertificate]:
    """Exact minimum cover size with the lexicographically smallest optimal cover."""
    sol = rlp.solve(cover_lp(W), lexicographic=True)
    if not sol.optimal:
        raise RuntimeError(f"cover LP reported {sol.status}; the all-ones cover is always feasible")
    c = StepCover(W.measures, sol.point)
    if not is_cover(c, W):
        raise RuntimeError("LP optimum is not a cover")
    return sol.value, certify(c, W)


def _grid_vertices(lp: rlp.LinearProgram) -> list[tuple[Fraction, ...]]:
    pts = (tuple(p) for p in product((ZERO, HALF, ONE), repeat=lp.n))
    return [p for p in pts if lp.is_feasible_point(p) and rlp.is_vertex(lp, p)]


def extreme_covers(W: StepGraphon, cap: int = 10, method: Literal["basis", "grid"] = "basis") -> list[CoverCertificate]:
    """Vertices of the quotient cover polytope, in lexicographic order.

    ``method="basis"`` enumerates vertices of the polytope directly.
    ``method="grid"`` scans the candidates ``{0, 1/2, 1}^k`` and keeps those
    with full tight rank; it finds every vertex only because vertices are
    half-integral, which is exactly what the basis method lets one check.
    """
    if W.k > cap:
        raise CapacityError(f"extreme_covers: {W.k} blocks exceeds cap {cap}")
    lp = cover_lp(W)
    if method == "basis":
        verts = rlp.enumerate_vertices(lp, cap=cap)
    elif method == "grid":
        verts = sorted(_grid_vertices(lp))
    else:
        raise ValueError(f"unknown method {method!r}")
    return [certify(StepCover(W.measures, v), W) for v in verts]


# decomposition witnesses


def boundary_gap(x: Fraction) -> Fraction:
    """Distance to the nearer of 0 and 1."""
    return min(x, 1 - x)


def half_gap(x: Fraction) -> Fraction:
    """Distance to the nearest of 0, 1/2 and 1."""
    return min(x, 1 - x, abs(HALF - x))


def decompose_cover(
    c: StepCover,
    W: StepGraphon,
    mode: Literal["half", "bipartite"] = "half",
    side_a: Iterable[int] | None = None,
) -> tuple[StepCover, StepCover]:
    """Split a cover into two covers whose midpoint is ``c``.

    ``half``: blocks with ``c <= 1/2`` move by ``+gap``, the others by
    ``-gap``, where gap is the distance to ``{0, 1/2, 1}``; the pair
    differs from ``c`` unless ``c`` is half-integral.

    ``bipartite``: ``side_a`` lists W blocks of one side, W must vanish on
    same-side pairs.  Side A moves by ``+gap``, side B by ``-gap`` with gap
    the distance to ``{0, 1}``; the pair differs from ``c`` unless ``c`` is
    integral.

    Both outputs live on the common refinement of ``c`` and ``W``.
    """
    verdict = is_cover(c, W)
    if not verdict:
        raise ValidationError(f"input is not a cover of W: {verdict.reason} at blocks {verdict.blocks}", "cover")
    rc, rw, w_of = _aligned(c, W)
    if mode == "half":
        up = [v <= HALF for v in rc.values]
        gaps = [half_gap(v) for v in rc.values]
    elif mode == "bipartite":
        if side_a is None:
            raise ValidationError("bipartite mode needs side_a", "side_a")
        a = set(side_a)
        bad = [b for b in a if not (isinstance(b, int) and 0 <= b < W.k)]
        if bad:
            raise ValidationError(f"side_a: block {bad[0]} out of range", "side_a")
        for i, j in W.support_pairs():
            if (i in a) == (j in a):
                raise ValidationError(f"side_a: W is positive on same-side blocks ({i}, {j})", "side_a")
        up = [w_of[p] in a for p in range(len(w_of))]
        gaps = [boundary_gap(v) for v in rc.values]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    plus = StepCover(rc.measures, tuple(v + g if u else v - g for v, g, u in zip(rc.values, gaps, up)))
    minus = StepCover(rc.measures, tuple(v - g if u else v + g for v, g, u in zip(rc.values, gaps, up)))
    for part in (plus, minus):
        if not is_cover(part, rw):
            raise RuntimeError("decomposition produced a non-cover")
    if any((x + y) / 2 != v for x, y, v in zip(plus.values, minus.values, rc.values)):
        raise RuntimeError("decomposition midpoint differs from input")
    return plus, minus


# hull of integral covers


@dataclass(frozen=True)
class HullResult:
    """Outcome of an integral-hull membership test, on the refined partition.

    When inside, ``combination`` lists ``(cover, weight)`` pairs with positive
    weights summing to 1.  Otherwise ``weights``/``threshold`` describe the
    functional ``f(c) = sum_i weights[i] * c_i`` on block values with
    ``f(cover) >= threshold`` for every integral cover and
    ``f(target) < threshold``.
    """

    inside: bool
    measures: tuple[Fraction, ...]
    target: StepCover
    integral_covers: tuple[StepCover, ...]
    combination: tuple[tuple[StepCover, Fraction], ...] | None = None
    weights: tuple[Fraction, ...] | None = None
    threshold: Fraction | None = None

    def __bool__(self) -> bool:
        return self.inside


def integral_covers(W: StepGraphon, cap: int = 12) -> list[tuple[int, ...]]:
    """0/1 block covers of ``W`` as value tuples, in lexicographic order."""
    if W.k > cap:
        raise CapacityError(f"integral cover enumeration: {W.k} blocks exceeds cap {cap}")
    pairs = W.support_pairs()
    return [
        bits
        for bits in product((0, 1), repeat=W.k)
        if all(bits[i] or bits[j] for i, j in pairs)
    ]


def in_integral_cover_hull(target: StepCover, W: StepGraphon, cap: int = 12) -> HullResult:
    """Decide whether ``target`` is a convex combination of integral block covers."""
    rt, rw, _ = _aligned(target, W)
    if rw.k > cap:
        raise CapacityError(f"in_integral_cover_hull: {rw.k} refined blocks exceeds cap {cap}")
    covers = integral_covers(rw, cap)
    k, n = rw.k, len(covers)
    cover_objs = tuple(StepCover(rw.measures, tuple(Fraction(b) for b in bits)) for bits in covers)

    # lambda_S >= 0, sum lambda = 1, sum_S lambda_S [i in S] = target_i
    rows = [tuple(ONE for _ in covers)] + [tuple(Fraction(bits[i]) for bits in covers) for i in range(k)]
    lp = rlp.LinearProgram(
        objective=(ZERO,) * n,
        rows=tuple(rows),
        senses=("=",) * len(rows),
        rhs=(ONE,) + rt.values,
        maximize=False,
    )
    sol = rlp.solve(lp)
    if sol.optimal:
        combo = tuple((cover_objs[s], lam) for s, lam in enumerate(sol.point) if lam > 0)
        if sum(lam for _, lam in combo) != 1 or any(
            sum(lam * cv.values[i] for cv, lam in combo) != rt.values[i] for i in range(k)
        ):
            raise RuntimeError("hull combination does not reproduce the target")
        return HullResult(True, rw.measures, rt, cover_objs, combination=combo)

    # separation: min f(target) - beta  s.t.  f(c_S) - beta >= 0,  -1 <= w <= 1, beta free
    sep_rows = tuple(tuple(Fraction(b) for b in bits) + (-ONE,) for bits in covers)
    sep = rlp.LinearProgram(
        objective=rt.values + (-ONE,),
        rows=sep_rows,
        senses=(">=",) * n,
        rhs=(ZERO,) * n,
        bounds=((-ONE, ONE),) * k + ((None, None),),
        maximize=False,
    )
    ssol = rlp.solve(sep)
    if not ssol.optimal or ssol.value >= 0:
        raise RuntimeError("target is outside the hull but no separating functional was found")
    w, beta = ssol.point[:k], ssol.point[k]
    return HullResult(False, rw.measures, rt, cover_objs, weights=tuple(w), threshold=beta)


# Erdos-Gallai type bound


def _dec(q: Fraction) -> decimal.Decimal:
    return decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator)


def _sqrt(q: Fraction) -> Number:
    exact = rational_sqrt(q)
    if exact is not None:
        return exact
    return _dec(q).sqrt()


def _as_decimal(x: Number) -> decimal.Decimal:
    return _dec(x) if isinstance(x, Fraction) else x


def eg_branches(e: Fraction) -> tuple[Number, Number]:
    """``(sqrt(e/4), 1 - sqrt(1 - e))``: the clique and bipartite branches of the bound."""
    e = as_rational(e, "e")
    if not 0 <= e <= 1:
        raise ValidationError(f"e: edge density must lie in [0, 1], got {e}", "e")
    with decimal.localcontext() as ctx:
        ctx.prec = _PRECISION
        clique = _sqrt(e / 4)
        root = _sqrt(1 - e)
        bip = 1 - root if isinstance(root, Fraction) else decimal.Decimal(1) - root
        return clique, bip


def eg_lower_bound(e: Fraction) -> Number:
    """``min(sqrt(e/4), 1 - sqrt(1 - e))``.

    A :class:`Fraction` when both roots are rational, else a
    :class:`decimal.Decimal` with 50 significant digits; comparisons against
    it use the tolerance :data:`EG_TOLERANCE` (1e-9).
    """
    clique, bip = eg_branches(e)
    if isinstance(clique, Fraction) and isinstance(bip, Fraction):
        return min(clique, bip)
    with decimal.localcontext() as ctx:
        ctx.prec = _PRECISION
        return min(_as_decimal(clique), _as_decimal(bip))


def _root_or_fail(q: Fraction, exact: bool, what: str) -> Fraction:
    root = rational_sqrt(q)
    if root is not None:
        return root
    if exact:
        raise ValidationError(f"e: {what} is irrational; pass exact=False for a rational approximation", "e")
    return sqrt_bounds(q, bits=64)[0]


def _two_block(first: Fraction, values: tuple[tuple[int, int], tuple[int, int]]) -> StepGraphon:
    second = 1 - first
    if second == 0:
        return StepGraphon((ONE,), ((Fraction(values[0][0]),),))
    return StepGraphon((first, second), values)


def _check_e(e) -> Fraction:
    e = as_rational(e, "e")
    if not 0 < e <= 1:
        raise ValidationError(f"e: need 0 < e <= 1, got {e} (e = 0 gives an empty block)", "e")
    return e


def build_psi(e, exact: bool = True) -> StepGraphon:
    """Bipartite-side extremal graphon: 1 except on the square of a block of measure ``sqrt(1 - e)``.

    At ``e = 1`` the zero block is empty and the result is the single block 1.
    With ``exact=False`` an irrational root is replaced by a lower rational
    approximation (64 bits), so the edge density is within about ``2**-63`` of e.
    """
    e = _check_e(e)
    big = _root_or_fail(1 - e, exact, "sqrt(1 - e)")
    return _two_block(1 - big, ((1, 1), (1, 0)))


def build_phi(e, exact: bool = True) -> StepGraphon:
    """Clique-side extremal graphon: 1 on the square of a block of measure ``sqrt(e)``, 0 elsewhere."""
    e = _check_e(e)
    small = _root_or_fail(e, exact, "sqrt(e)")
    return _two_block(small, ((1, 0), (0, 0)))


def maxg(D) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Maximizers of ``a^2 + 2b - b^2`` over ``a, b >= 0`` with ``a/2 + b = D``.

    Along the constraint the objective is convex in ``b``, so the maximum
    sits at an endpoint: ``(0, D)`` with value ``2D - D^2`` or ``(2D, 0)``
    with value ``4D^2``.  They tie at ``D = 2/5``, where both are returned.
    """
    D = as_rational(D, "D")
    if not 0 <= D <= HALF:
        raise ValidationError(f"D: need 0 <= D <= 1/2, got {D}", "D")
    at_b = (ZERO, D, 2 * D - D * D)
    at_a = (2 * D, ZERO, 4 * D * D)
    if at_b[2] > at_a[2]:
        return [at_b]
    if at_a[2] > at_b[2]:
        return [at_a]
    return [at_b, at_a] if D else [at_b]


@dataclass(frozen=True)
class EgReport:
    """Cover ratio against the edge-density lower bound.

    ``bound_branch`` says which term attains the minimum ("bipartite",
    "clique" or "both").  ``regime`` names the extremal family W matches
    when tight; otherwise it follows the density: below 16/25 the bipartite
    branch is smaller, above it the clique branch, at 16/25 they cross.
    """

    edge_density: Fraction
    bound: Number
    bound_exact: bool
    tau_star: Fraction
    tight: bool
    regime: Literal["clique-side", "bipartite-side", "crossing"]
    bound_branch: Literal["clique", "bipartite", "both"]
    isomorphic_to: Literal["psi", "phi"] | None


def _extremal(e: Fraction) -> dict[str, StepGraphon]:
    out = {}
    if e == 0:
        out["psi"] = StepGraphon.constant(0)
        out["phi"] = StepGraphon.constant(0)
        return out
    for name, build in (("psi", build_psi), ("phi", build_phi)):
        try:
            out[name] = build(e)
        except ValidationError:
            pass
    return out


def eg_check(W: StepGraphon) -> EgReport:
    e = W.edge_density()
    clique, bip = eg_branches(e)
    bound = eg_lower_bound(e)
    tau, _ = cover_ratio(W)
    exact = isinstance(bound, Fraction)
    with decimal.localcontext() as ctx:
        ctx.prec = _PRECISION
        if exact:
            tight = tau == bound
            if tau < bound:
                raise RuntimeError(f"cover ratio {tau} below the edge-density bound {bound}")
        else:
            gap = _dec(tau) - bound
            tight = abs(gap) <= EG_TOLERANCE
            if gap < -EG_TOLERANCE:
                raise RuntimeError(f"cover ratio {tau} below the edge-density bound {bound}")
        if isinstance(clique, Fraction) and isinstance(bip, Fraction):
            diff = clique - bip
        else:
            diff = _as_decimal(clique) - _as_decimal(bip)
    branch = "both" if diff == 0 else ("bipartite" if diff > 0 else "clique")

    iso = None
    if tight:
        # at or above the crossing the clique family is the natural candidate
        order = ("phi", "psi") if e >= CROSSING_DENSITY else ("psi", "phi")
        forms = _extremal(e)
        for name in order:
            if name in forms and are_isomorphic(W, forms[name]):
                iso = name
                break
    if iso == "phi":
        regime = "clique-side"
    elif iso == "psi":
        regime = "bipartite-side"
    elif e == CROSSING_DENSITY:
        regime = "crossing"
    else:
        regime = "bipartite-side" if e < CROSSING_DENSITY else "clique-side"
    return EgReport(e, bound, exact, tau, tight, regime, branch, iso)
