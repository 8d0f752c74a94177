"""Homomorphism densities and bipartite structure of step graphons."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    ONE,
    ZERO,
    CapacityError,
    StepGraphon,
    ValidationError,
    refine_graphon,
)


@dataclass(frozen=True)
class FiniteGraph:
    """Simple graph on vertices ``0 .. v-1``; edges are stored sorted as ``(a, b)`` with ``a < b``."""

    v: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not isinstance(self.v, int) or self.v < 1:
            raise ValidationError(f"v: need a positive vertex count, got {self.v!r}", "v")
        clean = set()
        for a, b in self.edges:
            if not (0 <= a < self.v and 0 <= b < self.v):
                raise ValidationError(f"edges: ({a}, {b}) references a missing vertex", "edges")
            if a == b:
                raise ValidationError(f"edges: loop at {a}", "edges")
            clean.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @classmethod
    def cycle(cls, k: int) -> "FiniteGraph":
        if k < 3:
            raise ValidationError(f"cycle length must be at least 3, got {k}", "k")
        return cls(k, tuple((i, (i + 1) % k) for i in range(k)))

    @classmethod
    def complete(cls, k: int) -> "FiniteGraph":
        return cls(k, tuple((i, j) for i in range(k) for j in range(i + 1, k)))

    @classmethod
    def path(cls, k: int) -> "FiniteGraph":
        return cls(k, tuple((i, i + 1) for i in range(k - 1)))

    @classmethod
    def parse(cls, text: str) -> "FiniteGraph":
        """``C5``, ``K4``, ``P3`` or an edge list such as ``0-1,1-2,2-0``."""
        text = text.strip()
        m = re.fullmatch(r"([CKP])(\d+)", text, flags=re.IGNORECASE)
        if m:
            kind, k = m.group(1).upper(), int(m.group(2))
            return {"C": cls.cycle, "K": cls.complete, "P": cls.path}[kind](k)
        edges = []
        for part in filter(None, re.split(r"[,\s]+", text)):
            e = re.fullmatch(r"(\d+)-(\d+)", part)
            if not e:
                raise ValidationError(f"motif: cannot parse {part!r}; use C5, K4, P3 or edges like 0-1,1-2", "motif")
            edges.append((int(e.group(1)), int(e.group(2))))
        if not edges:
            raise ValidationError("motif: empty edge list", "motif")
        return cls(1 + max(max(e) for e in edges), tuple(edges))


def density(F: FiniteGraph, W: StepGraphon, cap: int = 8) -> Fraction:
    """Homomorphism density of ``F`` in ``W``, by summing over block assignments.

    Branches whose partial product is zero are cut, so sparse supports are
    cheap even when ``k ** v`` is large.
    """
    if F.v > cap:
        raise CapacityError(f"density: motif has {F.v} vertices, cap is {cap}")
    back: list[list[int]] = [[] for _ in range(F.v)]
    for a, b in F.edges:
        back[b].append(a)  # a < b, so a is assigned before b
    nu, V, k = W.measures, W.values, W.k
    phi = [0] * F.v

    def extend(pos: int, acc: Fraction) -> Fraction:
        if pos == F.v:
            return acc
        total = ZERO
        for i in range(k):
            w = acc * nu[i]
            for a in back[pos]:
                w *= V[phi[a]][i]
                if not w:
                    break
            if w:
                phi[pos] = i
                total += extend(pos + 1, w)
        return total

    return extend(0, ONE)


def _matmul(A, B):
    n, m = len(A), len(B[0])
    cols = list(zip(*B))
    return [[sum((a * b for a, b in zip(A[i], cols[j]) if a and b), ZERO) for j in range(m)] for i in range(n)]


def odd_cycle_density(k: int, W: StepGraphon) -> Fraction:
    """Density of the ``k``-cycle as ``trace((diag(nu) V)^k)``."""
    if not isinstance(k, int) or k < 3 or k % 2 == 0:
        raise ValidationError(f"k: need an odd integer >= 3, got {k!r}", "k")
    return cycle_density(k, W)


def cycle_density(k: int, W: StepGraphon) -> Fraction:
    A = [[W.measures[i] * W.values[i][j] for j in range(W.k)] for i in range(W.k)]
    P = A
    e = k - 1
    R = None
    # square-and-multiply on A^(k-1), then one more factor
    while e:
        if e & 1:
            R = P if R is None else _matmul(R, P)
        e >>= 1
        if e:
            P = _matmul(P, P)
    R = _matmul(R, A) if R is not None else A
    return sum((R[i][i] for i in range(W.k)), ZERO)


@dataclass(frozen=True)
class OddCycleWitness:
    """Disjoint blocks of a refined graphon forming an odd cycle of positive values.

    ``blocks`` index ``graphon``; every listed block has measure ``alpha``
    and W is positive on each consecutive pair, including last-to-first.
    ``source_blocks`` are the corresponding blocks of the input graphon.
    """

    k: int
    blocks: tuple[int, ...]
    alpha: Fraction
    graphon: StepGraphon
    source_blocks: tuple[int, ...]

    def check(self) -> bool:
        W = self.graphon
        return (
            self.k % 2 == 1
            and self.k >= 3
            and len(self.blocks) == self.k == len(set(self.blocks))
            and all(W.measures[b] == self.alpha for b in self.blocks)
            and all(W.values[self.blocks[h]][self.blocks[(h + 1) % self.k]] > 0 for h in range(self.k))
        )


@dataclass(frozen=True)
class BipartiteResult:
    """Either a bipartition of ``graphon``'s blocks or an odd-cycle witness.

    ``graphon`` is the input, except for a single-block zero graphon, which
    is split in half so both sides have positive measure.
    """

    bipartite: bool
    graphon: StepGraphon
    side_a: tuple[int, ...] = ()
    side_b: tuple[int, ...] = ()
    witness: OddCycleWitness | None = None

    def __bool__(self) -> bool:
        return self.bipartite


def _adjacency(W: StepGraphon) -> list[list[int]]:
    return [[j for j in range(W.k) if j != i and W.values[i][j] > 0] for i in range(W.k)]


def _split(W: StepGraphon, parts: dict[int, Sequence[Fraction]]) -> tuple[StepGraphon, list[list[int]]]:
    """Split block ``i`` into pieces of the given measures; returns refined W and piece indices."""
    measures, origin, pieces = [], [], []
    for i in range(W.k):
        idx = []
        for m in parts.get(i, (W.measures[i],)):
            idx.append(len(measures))
            measures.append(m)
            origin.append(i)
        pieces.append(idx)
    return refine_graphon(W, measures, origin), pieces


def _shortest_odd_cycle(adj: list[list[int]]) -> list[int]:
    best: list[int] | None = None
    for s in range(len(adj)):
        dist, parent = {s: 0}, {s: -1}
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v], parent[v] = dist[u] + 1, u
                    q.append(v)
                elif dist[v] == dist[u] and (best is None or 2 * dist[u] + 1 < len(best)):
                    walk = _path_to_root(parent, u)[::-1] + _path_to_root(parent, v)[:-1]
                    best = _odd_simple_cycle(walk)
    if best is None:
        raise ValueError("support graph has no odd cycle")
    return best


def _path_to_root(parent: dict[int, int], u: int) -> list[int]:
    out = []
    while u != -1:
        out.append(u)
        u = parent[u]
    return out


def _odd_simple_cycle(walk: list[int]) -> list[int]:
    """Shrink an odd closed walk (given without the repeated endpoint) to a simple odd cycle."""
    while True:
        seen: dict[int, int] = {}
        for pos, x in enumerate(walk):
            if x in seen:
                first = walk[seen[x]:pos]
                second = walk[pos:] + walk[: seen[x]]
                walk = first if len(first) % 2 else second
                break
            seen[x] = pos
        else:
            return walk


def is_bipartite(W: StepGraphon) -> BipartiteResult:
    """2-colour the block support graph, or extract a shortest odd cycle.

    A block with ``W_ii > 0`` is an odd closed walk of length one; it is
    split into three equal pieces to give a triangle witness.
    """
    loops = [i for i in range(W.k) if W.values[i][i] > 0]
    if loops:
        i = loops[0]
        third = W.measures[i] / 3
        R, pieces = _split(W, {i: (third,) * 3})
        return BipartiteResult(False, W, witness=OddCycleWitness(3, tuple(pieces[i]), third, R, (i, i, i)))

    adj = _adjacency(W)
    colour: list[int | None] = [None] * W.k
    for s in range(W.k):
        if colour[s] is not None:
            continue
        colour[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if colour[v] is None:
                    colour[v] = 1 - colour[u]
                    q.append(v)
                elif colour[v] == colour[u]:
                    return _odd_witness(W, adj)
    side_a = tuple(i for i in range(W.k) if colour[i] == 0)
    side_b = tuple(i for i in range(W.k) if colour[i] == 1)
    if not side_b:
        # zero graphon: every split works
        if W.k == 1:
            R, _ = _split(W, {0: (W.measures[0] / 2,) * 2})
            return BipartiteResult(True, R, (0,), (1,))
        return BipartiteResult(True, W, (0,), tuple(range(1, W.k)))
    return BipartiteResult(True, W, side_a, side_b)


def _odd_witness(W: StepGraphon, adj: list[list[int]]) -> BipartiteResult:
    cycle = _shortest_odd_cycle(adj)
    alpha = min(W.measures[b] for b in cycle)
    parts = {b: (alpha, W.measures[b] - alpha) for b in cycle if W.measures[b] > alpha}
    R, pieces = _split(W, parts)
    blocks = tuple(pieces[b][0] for b in cycle)
    return BipartiteResult(False, W, witness=OddCycleWitness(len(cycle), blocks, alpha, R, tuple(cycle)))


@dataclass(frozen=True)
class ColouringResult:
    ok: bool
    colouring: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_k_partite(W: StepGraphon, k: int, cap: int = 12) -> ColouringResult:
    """Proper ``k``-colouring of the block support graph by backtracking.

    Vertices are coloured in order of decreasing degree and a new colour is
    only opened once, which removes colour-permutation symmetry.
    """
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k: need a positive integer, got {k!r}", "k")
    if W.k > cap:
        raise CapacityError(f"is_k_partite: {W.k} blocks exceeds cap {cap}")
    if any(W.values[i][i] > 0 for i in range(W.k)):
        return ColouringResult(False)
    adj = _adjacency(W)
    order = sorted(range(W.k), key=lambda i: (-len(adj[i]), i))
    colour = [-1] * W.k

    def place(pos: int, used: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        taken = {colour[u] for u in adj[v]}
        for c in range(min(used + 1, k)):
            if c not in taken:
                colour[v] = c
                if place(pos + 1, max(used, c + 1)):
                    return True
        colour[v] = -1
        return False

    if place(0, 0):
        return ColouringResult(True, tuple(colour))
    return ColouringResult(False)
