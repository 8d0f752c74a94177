"""Exact linear programming over the rationals.

A two-phase dense-tableau simplex with Bland's rule (so it terminates in
exact arithmetic), dual extraction with a strong-duality self-check, and
vertex enumeration for small bounded polytopes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .core import CapacityError, ValidationError, as_rational, format_rational

Bound = Optional[Fraction]

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"
SENSES = ("<=", ">=", "=")


@dataclass(frozen=True)
class LinearProgram:
    """``max`` or ``min`` of ``objective . x`` subject to ``rows[i] . x  senses[i]  rhs[i]``.

    ``bounds[j] = (lo, hi)`` with ``None`` for an infinite side; the default
    is ``x >= 0``.
    """

    objective: tuple[Fraction, ...]
    rows: tuple[tuple[Fraction, ...], ...] = ()
    senses: tuple[str, ...] = ()
    rhs: tuple[Fraction, ...] = ()
    bounds: tuple[tuple[Bound, Bound], ...] | None = None
    maximize: bool = True

    def __post_init__(self):
        c = tuple(as_rational(v, "objective") for v in self.objective)
        n = len(c)
        rows = tuple(tuple(as_rational(v, "rows") for v in r) for r in self.rows)
        if any(len(r) != n for r in rows):
            raise ValidationError("rows: every row needs one coefficient per variable", "rows")
        if not (len(self.senses) == len(rows) == len(self.rhs)):
            raise ValidationError("senses/rhs: one entry per row required", "senses")
        for s in self.senses:
            if s not in SENSES:
                raise ValidationError(f"senses: unknown sense {s!r}", "senses")
        bounds = self.bounds if self.bounds is not None else ((Fraction(0), None),) * n
        if len(bounds) != n:
            raise ValidationError("bounds: one (lo, hi) pair per variable required", "bounds")
        bounds = tuple(
            (None if lo is None else as_rational(lo, "bounds"), None if hi is None else as_rational(hi, "bounds"))
            for lo, hi in bounds
        )
        for j, (lo, hi) in enumerate(bounds):
            if lo is not None and hi is not None and lo > hi:
                raise ValidationError(f"bounds[{j}]: lower bound exceeds upper bound", "bounds")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "senses", tuple(self.senses))
        object.__setattr__(self, "rhs", tuple(as_rational(v, "rhs") for v in self.rhs))
        object.__setattr__(self, "bounds", bounds)

    @property
    def n(self) -> int:
        return len(self.objective)

    def halfspaces(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """All constraints, bounds included, as ``a . x <= b``."""
        out = []
        for a, s, b in zip(self.rows, self.senses, self.rhs):
            if s in ("<=", "="):
                out.append((a, b))
            if s in (">=", "="):
                out.append((tuple(-v for v in a), -b))
        for j, (lo, hi) in enumerate(self.bounds):
            e = tuple(Fraction(int(i == j)) for i in range(self.n))
            if lo is not None:
                out.append((tuple(-v for v in e), -lo))
            if hi is not None:
                out.append((e, hi))
        return out

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        return all(_dot(a, x) <= b for a, b in self.halfspaces())

    def to_json(self) -> dict:
        fmt = format_rational
        return {
            "direction": "max" if self.maximize else "min",
            "objective": [fmt(v) for v in self.objective],
            "rows": [[fmt(v) for v in r] for r in self.rows],
            "senses": list(self.senses),
            "rhs": [fmt(v) for v in self.rhs],
            "bounds": [[None if lo is None else fmt(lo), None if hi is None else fmt(hi)] for lo, hi in self.bounds],
        }


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None
    # one multiplier per constraint row; sign convention in `solve`
    dual: tuple[Fraction, ...] | None = None
    dual_value: Fraction | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _dot(a, x) -> Fraction:
    return sum((u * v for u, v in zip(a, x) if u), Fraction(0))


class _Tableau:
    """Dense simplex tableau for ``max cost . x, T x = rhs, x >= 0``."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int], ncols: int):
        self.T = [r[:] + [b] for r, b in zip(rows, rhs)]
        self.basis = basis[:]
        self.ncols = ncols
        self.obj: list[Fraction] = []

    def set_cost(self, cost: list[Fraction]):
        obj = cost[:] + [Fraction(0)]
        for i, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                row = self.T[i]
                for j, v in enumerate(row):
                    if v:
                        obj[j] -= cb * v
        # obj[-1] holds minus the current objective value
        self.obj = obj

    def pivot(self, r: int, c: int):
        row = self.T[r]
        p = row[c]
        if p != 1:
            row = [v / p for v in row]
            self.T[r] = row
        nz = [j for j, v in enumerate(row) if v]
        for i, other in enumerate(self.T):
            if i != r:
                f = other[c]
                if f:
                    for j in nz:
                        other[j] -= f * row[j]
        f = self.obj[c]
        if f:
            for j in nz:
                self.obj[j] -= f * row[j]
        self.basis[r] = c

    def run(self, allowed: Sequence[bool]) -> str:
        while True:
            enter = next((j for j in range(self.ncols) if allowed[j] and self.obj[j] > 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter)

    def values(self) -> list[Fraction]:
        x = [Fraction(0)] * self.ncols
        for i, bv in enumerate(self.basis):
            x[bv] = self.T[i][-1]
        return x


def _solve_square(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(M)
    A = [row[:] + [b] for row, b in zip(M, rhs)]
    for col in range(n):
        piv = next(i for i in range(col, n) if A[i][col])
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [v / p for v in A[col]]
        for i in range(n):
            if i != col and A[i][col]:
                f = A[i][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[col])]
    return [A[i][n] for i in range(n)]


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(v) for v in vectors]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        for i in range(r + 1, len(rows)):
            f = rows[i][col]
            if f:
                rows[i] = [a - f * b / p for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def _solve_simplex(lp: LinearProgram) -> LpSolution:
    n = lp.n
    sign = 1 if lp.maximize else -1
    cost_user = [sign * c for c in lp.objective]

    # x_j = offset_j + sum(coef * x'_col)
    terms: list[list[tuple[int, int]]] = []
    offsets: list[Fraction] = []
    ub_rows: list[tuple[int, Fraction]] = []
    ncols = 0
    for lo, hi in lp.bounds:
        if lo is not None:
            terms.append([(ncols, 1)])
            offsets.append(lo)
            if hi is not None:
                ub_rows.append((ncols, hi - lo))
            ncols += 1
        elif hi is not None:
            terms.append([(ncols, -1)])
            offsets.append(hi)
            ncols += 1
        else:
            terms.append([(ncols, 1), (ncols + 1, -1)])
            offsets.append(Fraction(0))
            ncols += 2
    nx = ncols

    std_rows: list[list[Fraction]] = []
    std_rhs: list[Fraction] = []
    std_sense: list[str] = []
    for a, s, b in zip(lp.rows, lp.senses, lp.rhs):
        row = [Fraction(0)] * nx
        for j, coef in enumerate(a):
            if coef:
                for col, sg in terms[j]:
                    row[col] += sg * coef
        std_rows.append(row)
        std_rhs.append(b - _dot(a, offsets))
        std_sense.append(s)
    for col, cap in ub_rows:
        row = [Fraction(0)] * nx
        row[col] = Fraction(1)
        std_rows.append(row)
        std_rhs.append(cap)
        std_sense.append("<=")
    m = len(std_rows)

    negated = [False] * m
    flip = {"<=": ">=", ">=": "<=", "=": "="}
    for i in range(m):
        if std_rhs[i] < 0:
            std_rows[i] = [-v for v in std_rows[i]]
            std_rhs[i] = -std_rhs[i]
            std_sense[i] = flip[std_sense[i]]
            negated[i] = True

    n_slack = sum(1 for s in std_sense if s != "=")
    n_art = sum(1 for s in std_sense if s != "<=")
    total = nx + n_slack + n_art
    full = [r + [Fraction(0)] * (n_slack + n_art) for r in std_rows]
    basis = []
    artificial = [False] * total
    s_col, a_col = nx, nx + n_slack
    for i, s in enumerate(std_sense):
        if s == "<=":
            full[i][s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        else:
            if s == ">=":
                full[i][s_col] = Fraction(-1)
                s_col += 1
            full[i][a_col] = Fraction(1)
            artificial[a_col] = True
            basis.append(a_col)
            a_col += 1
    original = [r[:] for r in full]

    tab = _Tableau(full, std_rhs, basis, total)
    kept = list(range(m))
    if n_art:
        tab.set_cost([Fraction(-1) if artificial[j] else Fraction(0) for j in range(total)])
        tab.run([True] * total)
        if tab.obj[-1] != 0:  # phase-one optimum is -obj[-1] < 0
            return LpSolution(INFEASIBLE)
        drop = []
        for i in range(len(tab.T)):
            if artificial[tab.basis[i]]:
                col = next((j for j in range(total) if not artificial[j] and tab.T[i][j]), None)
                if col is None:
                    drop.append(i)
                else:
                    tab.pivot(i, col)
        for i in reversed(drop):
            del tab.T[i]
            del tab.basis[i]
            del kept[i]

    cost = [Fraction(0)] * total
    for j in range(n):
        for col, sg in terms[j]:
            cost[col] += sg * cost_user[j]
    tab.set_cost(cost)
    if tab.run([not a for a in artificial]) == UNBOUNDED:
        return LpSolution(UNBOUNDED)

    xs = tab.values()
    point = tuple(offsets[j] + sum((sg * xs[col] for col, sg in terms[j]), Fraction(0)) for j in range(n))
    value = _dot(lp.objective, point)

    B = [[original[r][bv] for bv in tab.basis] for r in kept]
    y_std = _solve_square([list(col) for col in zip(*B)], [cost[bv] for bv in tab.basis]) if kept else []
    y_full = [Fraction(0)] * m
    for r, y in zip(kept, y_std):
        y_full[r] = -y if negated[r] else y
    dual = tuple(sign * y for y in y_full[: len(lp.rows)])
    dual_value = _dual_objective(lp, dual)
    if dual_value != value:
        raise RuntimeError(f"strong duality check failed: primal {value} != dual {dual_value}")
    return LpSolution(OPTIMAL, value, point, dual, dual_value)


def _dual_objective(lp: LinearProgram, y: Sequence[Fraction]) -> Fraction | None:
    """Lagrangian bound ``b.y + opt_{box} (c - A^T y).x``; None if infinite or sign-infeasible."""
    for yi, s in zip(y, lp.senses):
        if s == "<=" and (yi < 0 if lp.maximize else yi > 0):
            return None
        if s == ">=" and (yi > 0 if lp.maximize else yi < 0):
            return None
    total = _dot(lp.rhs, y)
    for j in range(lp.n):
        d = lp.objective[j] - sum((yi * row[j] for yi, row in zip(y, lp.rows) if yi), Fraction(0))
        if not d:
            continue
        lo, hi = lp.bounds[j]
        use_hi = (d > 0) == lp.maximize
        bound = hi if use_hi else lo
        if bound is None:
            return None
        total += d * bound
    return total


def solve(lp: LinearProgram, lexicographic: bool = False) -> LpSolution:
    """Exact optimum of ``lp``.

    Infeasibility and unboundedness are reported through ``status``.  The
    dual vector has one entry per row; it is sign-feasible for the
    Lagrangian dual (for ``max``: ``y >= 0`` on ``<=`` rows, ``y <= 0`` on
    ``>=`` rows; mirrored for ``min``) and ``dual_value == value`` is checked
    on every optimal solve.

    With ``lexicographic=True`` the returned point is the lexicographically
    smallest optimal point (one extra LP per coordinate).
    """
    sol = _solve_simplex(lp)
    if not lexicographic or not sol.optimal:
        return sol
    return replace(sol, point=_lexmin_on_face(lp, sol.value, sol.point))


def _lexmin_on_face(lp: LinearProgram, value: Fraction, start: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    base = replace(
        lp,
        rows=lp.rows + (lp.objective,),
        senses=lp.senses + ("=",),
        rhs=lp.rhs + (value,),
    )
    bounds = list(base.bounds)
    point = start
    for j in range(lp.n):
        lo = bounds[j][0]
        # a coordinate already at its lower bound cannot decrease further
        if lo is None or point[j] != lo:
            e = tuple(Fraction(int(i == j)) for i in range(lp.n))
            sub = replace(base, objective=e, bounds=tuple(bounds), maximize=False)
            sol = _solve_simplex(sub)
            if sol.status != OPTIMAL:
                raise RuntimeError(f"lexicographic refinement failed on coordinate {j}: {sol.status}")
            point = sol.point
        bounds[j] = (point[j], point[j])
    return point


# ---------------------------------------------------------------- vertices


def tight_rank(lp: LinearProgram, x: Sequence[Fraction]) -> int:
    return rank([a for a, b in lp.halfspaces() if _dot(a, x) == b])


def is_vertex(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    """Feasible and the tight constraints have full rank."""
    return lp.is_feasible_point(x) and tight_rank(lp, x) == lp.n


def _bounding_box(lp: LinearProgram) -> list[tuple[Fraction, Fraction]] | None:
    box = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is None or hi is None:
            e = tuple(Fraction(int(i == j)) for i in range(lp.n))
            for side in ("lo", "hi"):
                if (lo if side == "lo" else hi) is not None:
                    continue
                sol = _solve_simplex(replace(lp, objective=e, maximize=(side == "hi")))
                if sol.status == INFEASIBLE:
                    return None
                if sol.status == UNBOUNDED:
                    raise ValueError(f"feasible region is unbounded in coordinate {j}")
                if side == "lo":
                    lo = sol.value
                else:
                    hi = sol.value
        box.append((lo, hi))
    return box


def enumerate_vertices(lp: LinearProgram, cap: int = 12) -> list[tuple[Fraction, ...]]:
    """All extreme points of the feasible region, sorted lexicographically.

    Double description by successive cuts: start from the vertices of a
    bounding box and intersect with one halfspace at a time.  A new vertex
    appears on every edge ``[u, w]`` that crosses the cutting hyperplane;
    ``u`` and ``w`` span an edge exactly when the constraints tight at both
    have rank ``n - 1``.
    """
    n = lp.n
    if n > cap:
        raise CapacityError(f"vertex enumeration capped at dimension {cap}, got {n}")
    if n == 0:
        return [()] if all(b >= 0 for _, b in lp.halfspaces()) else []
    box = _bounding_box(lp)
    if box is None:
        return []

    normals: list[tuple[Fraction, ...]] = []
    offsets: list[Fraction] = []

    def unit(j, s):
        return tuple(Fraction(s if i == j else 0) for i in range(n))

    for j, (lo, hi) in enumerate(box):
        normals += [unit(j, -1), unit(j, 1)]
        offsets += [-lo, hi]

    vertices: dict[tuple[Fraction, ...], int] = {}
    for corner in product(*[sorted({lo, hi}) for lo, hi in box]):
        mask = 0
        for j, x in enumerate(corner):
            if x == box[j][0]:
                mask |= 1 << (2 * j)
            if x == box[j][1]:
                mask |= 1 << (2 * j + 1)
        vertices[corner] = mask

    rank_cache: dict[int, int] = {}

    def mask_rank(mask: int) -> int:
        if mask not in rank_cache:
            rank_cache[mask] = rank([normals[i] for i in range(len(normals)) if mask >> i & 1])
        return rank_cache[mask]

    box_halfspaces = set(zip(normals, offsets))
    for a, b in lp.halfspaces():
        if (a, b) in box_halfspaces:
            continue
        idx = len(normals)
        normals.append(a)
        offsets.append(b)
        bit = 1 << idx
        slack = {v: _dot(a, v) - b for v in vertices}
        plus = [v for v, s in slack.items() if s > 0]
        if not plus:
            for v, s in slack.items():
                if s == 0:
                    vertices[v] |= bit
            continue
        minus = [v for v, s in slack.items() if s < 0]
        nxt = {v: m | bit for v, m in vertices.items() if slack[v] == 0}
        nxt.update((v, vertices[v]) for v in minus)
        for u in plus:
            mu = vertices[u]
            for w in minus:
                common = mu & vertices[w]
                if bin(common).count("1") < n - 1 or mask_rank(common) != n - 1:
                    continue
                t = slack[u] / (slack[u] - slack[w])
                p = tuple(ui + t * (wi - ui) for ui, wi in zip(u, w))
                nxt[p] = nxt.get(p, 0) | common | bit
        vertices = nxt
        if not vertices:
            return []
    return sorted(vertices)
