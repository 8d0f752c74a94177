from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyton.core import CapacityError, StepGraphon, ValidationError
from polyton.structure import (
    FiniteGraph,
    cycle_density,
    density,
    is_bipartite,
    is_k_partite,
    odd_cycle_density,
)

from .oracles import bipartite_oracle, chromatic_number, density_bruteforce
from .strategies import cycle_graphon, graphons

HALVES = (F(1, 2), F(1, 2))
BIPARTITE = StepGraphon(HALVES, ((0, 1), (1, 0)))
EDGE = FiniteGraph(2, ((0, 1),))


def test_density_examples():
    assert density(EDGE, StepGraphon.constant(1)) == 1
    assert density(FiniteGraph.complete(3), BIPARTITE) == 0
    assert density_bruteforce(FiniteGraph.complete(3).edges, 3, BIPARTITE) == 0
    W = StepGraphon((F(1, 3), F(2, 3)), ((1, F(1, 2)), (F(1, 2), 0)))
    assert density(EDGE, W) == W.edge_density()


def test_density_cap():
    with pytest.raises(CapacityError):
        density(FiniteGraph.path(9), StepGraphon.constant(1))


def test_odd_cycle_examples():
    assert odd_cycle_density(3, StepGraphon.constant(1)) == 1
    assert odd_cycle_density(3, BIPARTITE) == 0
    assert odd_cycle_density(5, BIPARTITE) == 0
    with pytest.raises(ValidationError):
        odd_cycle_density(4, BIPARTITE)


def test_bipartite_examples():
    zero = is_bipartite(StepGraphon.constant(0))
    assert zero and zero.graphon.measures == HALVES
    res = is_bipartite(BIPARTITE)
    assert res and res.side_a == (0,) and res.side_b == (1,)
    tri = is_bipartite(cycle_graphon(3))
    assert not tri and tri.witness.k == 3 and tri.witness.check()


def test_loop_witness():
    W = StepGraphon((F(1, 4), F(3, 4)), ((0, 1), (1, F(1, 2))))
    res = is_bipartite(W)
    assert not res
    w = res.witness
    assert w.check() and w.alpha == F(1, 4) and w.source_blocks == (1, 1, 1)


def test_five_cycle_witness_unequal_measures():
    ms = (F(1, 10), F(1, 5), F(1, 5), F(1, 4), F(1, 4))
    pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]
    vals = [[0] * 5 for _ in range(5)]
    for a, b in pairs:
        vals[a][b] = vals[b][a] = 1
    res = is_bipartite(StepGraphon(ms, vals))
    assert res.witness.k == 5 and res.witness.alpha == F(1, 10) and res.witness.check()


def test_k_partite_examples():
    assert is_k_partite(BIPARTITE, 2)
    five = cycle_graphon(5)
    assert not is_k_partite(five, 2)
    col = is_k_partite(five, 3)
    assert col and len(set(col.colouring)) == 3
    assert not is_k_partite(StepGraphon.constant(1), 12)


def test_parse_motifs():
    assert FiniteGraph.parse("C5") == FiniteGraph.cycle(5)
    assert FiniteGraph.parse("K4").edges == FiniteGraph.complete(4).edges
    assert FiniteGraph.parse("0-1,1-2") == FiniteGraph.path(3)
    with pytest.raises(ValidationError):
        FiniteGraph.parse("Q7")
    with pytest.raises(ValidationError):
        FiniteGraph(2, ((0, 0),))


@given(graphons(max_k=6))
def test_bipartite_iff_odd_cycles_vanish(W):
    vanish = all(odd_cycle_density(j, W) == 0 for j in range(3, 2 * W.k + 2, 2))
    res = is_bipartite(W)
    assert bool(res) == vanish == bipartite_oracle(W)
    if res:
        a, b = set(res.side_a), set(res.side_b)
        G = res.graphon
        assert all((i in a) != (j in a) for i, j in G.support_pairs())
        assert a | b == set(range(G.k)) and not a & b
    else:
        assert res.witness.check()


@given(graphons(max_k=4), st.sampled_from([3, 5]))
def test_trace_equals_assignment_sum(W, k):
    C = FiniteGraph.cycle(k)
    assert odd_cycle_density(k, W) == density(C, W) == density_bruteforce(C.edges, C.v, W)


@given(graphons(max_k=4), st.integers(3, 6))
def test_cycle_density_even_too(W, k):
    C = FiniteGraph.cycle(k)
    assert cycle_density(k, W) == density_bruteforce(C.edges, C.v, W)


@given(graphons(max_k=4), st.sampled_from(["K3", "P4", "0-1,1-2,2-0,2-3"]))
def test_density_matches_bruteforce(W, motif):
    F_ = FiniteGraph.parse(motif)
    assert density(F_, W) == density_bruteforce(F_.edges, F_.v, W)


@given(graphons(max_k=6), st.integers(1, 4))
def test_k_partite_matches_chromatic_number(W, k):
    chi = chromatic_number(W)
    res = is_k_partite(W, k)
    assert bool(res) == (chi is not None and chi <= k)
    if res:
        assert all(res.colouring[i] != res.colouring[j] for i, j in W.support_pairs())
        # zero density of a graph that needs k + 1 colours
        assert density(FiniteGraph.complete(k + 1), W) == 0
        if k == 2:
            assert odd_cycle_density(3, W) == odd_cycle_density(5, W) == 0
