"""W-random graphs and the convergence harness.

Sampling uses numpy's PCG64 generator.  For a given seed the draws are, in
order: one integer in ``[0, L)`` per vertex, where ``L`` is the common
denominator of the block measures (the vertex lands in the block whose
cumulative-measure interval contains it), then one integer in ``[0, Q)`` per
pair ``i < j`` in row-major order, where ``Q`` is the common denominator of
the values; the edge is present when the draw is below ``Q * W``.  Every
probability is therefore exact.

A graph ``G`` on ``n`` vertices is identified with the step graphon on ``n``
blocks of measure ``1/n``.  Its matching ratio is ``nu_f(G) / n`` where
``nu_f`` is the fractional matching number, and ``nu_f(G)`` is half the
maximum matching of the bipartite double cover.  A maximum matching and a
minimum vertex cover of the double cover give a half-integral fractional
matching and cover of ``G`` of equal size, which certifies both values.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .core import (
    HALF,
    ONE,
    ZERO,
    CapacityError,
    SampledGraph,
    StepCover,
    StepGraphon,
    ValidationError,
    lcm_of_denominators,
)
from .covers import is_cover
from .matchings import matching_ratio

MAX_VERTICES = 5000
_INT63 = 1 << 63


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _uniform_below(rng: np.random.Generator, bound: int, size: int) -> list[int] | np.ndarray:
    if bound < _INT63:
        return rng.integers(0, bound, size=size, dtype=np.int64)
    nbytes = (bound.bit_length() + 7) // 8
    out = []
    while len(out) < size:
        x = int.from_bytes(rng.bytes(nbytes), "little")
        if x < bound * (256**nbytes // bound):  # rejection keeps the draw uniform
            out.append(x % bound)
    return out


def sample_wrandom(W: StepGraphon, n: int, seed: int) -> SampledGraph:
    """Draw ``G(n, W)``; deterministic for a given ``(W, n, seed)``."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"n: need a positive integer, got {n!r}", "n")
    if n > MAX_VERTICES:
        raise CapacityError(f"n = {n} exceeds the sampling cap {MAX_VERTICES}")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValidationError(f"seed: need a non-negative integer, got {seed!r}", "seed")
    rng = _generator(seed)
    L = lcm_of_denominators(W.measures)
    ends, acc = [], 0
    for m in W.measures:
        acc += int(m * L)
        ends.append(acc)
    draws = _uniform_below(rng, L, n)
    blocks = [next(b for b, e in enumerate(ends) if int(u) < e) for u in draws]

    Q = lcm_of_denominators(v for row in W.values for v in row)
    thresholds = [[int(v * Q) for v in row] for row in W.values]
    iu, ju = np.triu_indices(n, 1)
    pair_draws = _uniform_below(rng, Q, len(iu))
    bl = np.array(blocks, dtype=np.int64)
    if Q < _INT63:
        thr = np.array(thresholds, dtype=np.int64)
        present = pair_draws < thr[bl[iu], bl[ju]]
    else:
        present = np.array(
            [u < thresholds[blocks[i]][blocks[j]] for u, i, j in zip(pair_draws, iu.tolist(), ju.tolist())], dtype=bool
        )
    adj = np.zeros((n, n), dtype=np.uint8)
    adj[iu[present], ju[present]] = 1
    adj |= adj.T
    return SampledGraph(n, adj, seed, tuple(blocks))


def graph_to_stepgraphon(G: SampledGraph) -> StepGraphon:
    """``n`` blocks of measure ``1/n`` with the adjacency matrix as values."""
    one = Fraction(1, G.n)
    rows = G.adjacency.tolist()
    return StepGraphon((one,) * G.n, tuple(tuple(Fraction(v) for v in row) for row in rows))


@dataclass(frozen=True)
class GraphMatching:
    """Certified fractional matching and cover of a finite graph.

    ``edge_weights`` maps ``(u, v)`` with ``u < v`` to a weight in ``{1/2, 1}``,
    ``cover`` gives a value in ``{0, 1/2, 1}`` per vertex.  ``nu``/``tau``
    are the matching and cover ratios of the associated step graphon.
    """

    number: Fraction
    edge_weights: dict
    cover: tuple[Fraction, ...]
    nu: Fraction
    tau: Fraction


def _koenig_cover(H: nx.Graph, M: dict, left: list) -> set:
    """Minimum vertex cover from a maximum matching of a bipartite graph.

    One breadth-first search from the unmatched left vertices along
    alternating paths marks a set Z; the cover is ``(left - Z) | (right & Z)``.
    """
    Z = {u for u in left if u not in M}
    queue = list(Z)
    while queue:
        u = queue.pop()
        for v in H[u]:
            if v in Z or M.get(u) == v:
                continue
            Z.add(v)
            w = M.get(v)
            if w is not None and w not in Z:
                Z.add(w)
                queue.append(w)
    left_set = set(left)
    return {u for u in left if u not in Z} | {v for v in Z if v not in left_set}


def fractional_matching(G: SampledGraph) -> GraphMatching:
    H = nx.Graph()
    left = [("L", v) for v in range(G.n)]
    H.add_nodes_from(left)
    H.add_nodes_from(("R", v) for v in range(G.n))
    for u, v in G.edges:
        H.add_edge(("L", u), ("R", v))
        H.add_edge(("L", v), ("R", u))
    M = nx.bipartite.hopcroft_karp_matching(H, top_nodes=left)
    K = _koenig_cover(H, M, left)

    weights: dict[tuple[int, int], Fraction] = {}
    for (side, u), (_, v) in M.items():
        if side == "L":
            key = (min(u, v), max(u, v))
            weights[key] = weights.get(key, ZERO) + HALF
    cover = tuple(HALF * ((("L", v) in K) + (("R", v) in K)) for v in range(G.n))

    number = sum(weights.values(), ZERO)
    load = [ZERO] * G.n
    for (u, v), w in weights.items():
        if not G.adjacency[u, v]:
            raise RuntimeError("matching uses a non-edge")
        load[u] += w
        load[v] += w
    if any(x > 1 for x in load):
        raise RuntimeError("fractional matching overloads a vertex")
    for u, v in G.edges:
        if cover[u] + cover[v] < 1:
            raise RuntimeError("vertex cover misses an edge")
    if sum(cover, ZERO) != number:
        raise RuntimeError("matching and cover sizes differ")
    ratio = number / G.n
    return GraphMatching(number, weights, cover, ratio, ratio)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    seed: int
    nu: Fraction
    tau: Fraction
    abs_error: Fraction
    projected_cover: StepCover
    cover_slack: Fraction


@dataclass(frozen=True)
class ConvergenceReport:
    nu_W: Fraction
    rows: tuple[ConvergenceRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "seed", "nu", "tau", "abs_error", "cover_slack"])
        for r in self.rows:
            w.writerow([r.n, r.seed, _fmt(r.nu), _fmt(r.tau), _fmt(r.abs_error), _fmt(r.cover_slack)])
        return buf.getvalue()


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def project_cover(cover: Sequence[Fraction], blocks: Sequence[int], W: StepGraphon) -> tuple[StepCover, Fraction]:
    """Average a vertex cover over each block of ``W`` and round it up to a cover of ``W``.

    Returns the rounded cover and the slack: the largest shortfall
    ``1 - c_a - c_b`` over support pairs of the averaged values.  Adding
    half the slack to every block (capped at 1) restores every constraint.
    Blocks with no sampled vertex get the value 1.
    """
    sums = [ZERO] * W.k
    counts = [0] * W.k
    for c, b in zip(cover, blocks):
        sums[b] += c
        counts[b] += 1
    avg = [s / c if c else ONE for s, c in zip(sums, counts)]
    slack = max([ZERO] + [1 - avg[a] - avg[b] for a, b in W.support_pairs()])
    rounded = StepCover(W.measures, tuple(min(ONE, v + slack / 2) for v in avg))
    return rounded, slack


def _run(job) -> ConvergenceRow:
    W, n, seed, nu_W = job
    G = sample_wrandom(W, n, seed)
    gm = fractional_matching(G)
    projected, slack = project_cover(gm.cover, G.blocks, W)
    if not is_cover(projected, W):
        raise RuntimeError("rounded projected cover is not a cover")
    return ConvergenceRow(n, seed, gm.nu, gm.tau, abs(gm.nu - nu_W), projected, slack)


def convergence_experiment(
    W: StepGraphon, ns: Iterable[int], seeds: Iterable[int], workers: int = 1
) -> ConvergenceReport:
    """Sample ``G(n, W)`` for every ``(n, seed)`` and compare with ``nu(W)``.

    Rows are sorted by ``(n, seed)`` whatever the number of worker processes.
    """
    nu_W, _ = matching_ratio(W)
    jobs = sorted({(n, s) for n in ns for s in seeds})
    for n, _ in jobs:
        if n > MAX_VERTICES:
            raise CapacityError(f"n = {n} exceeds the sampling cap {MAX_VERTICES}")
    payload = [(W, n, s, nu_W) for n, s in jobs]
    if workers > 1 and len(payload) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run, payload))
    else:
        rows = [_run(p) for p in payload]
    return ConvergenceReport(nu_W, tuple(rows))
