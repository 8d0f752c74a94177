import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyton.core import CapacityError, SampledGraph, StepGraphon, ValidationError
from polyton.covers import is_cover
from polyton.matchings import matching_ratio
from polyton.sampling import (
    MAX_VERTICES,
    convergence_experiment,
    fractional_matching,
    graph_to_stepgraphon,
    project_cover,
    sample_wrandom,
)

from .strategies import graphons

HALVES = (F(1, 2), F(1, 2))
BIPARTITE = StepGraphon(HALVES, ((0, 1), (1, 0)))


def test_extreme_graphons():
    assert sample_wrandom(StepGraphon.constant(0), 30, 1).edge_count == 0
    assert sample_wrandom(StepGraphon.constant(1), 30, 1).edge_count == 30 * 29 // 2


def test_half_density_concentrates():
    # Hoeffding over 499500 pairs: P(|d - 1/2| > 0.05) <= 2 exp(-2 * 499500 * 0.05**2), about 1e-1084
    pairs = 1000 * 999 // 2
    assert 2 * math.exp(-2 * pairs * 0.05**2) < 0.01
    W = StepGraphon.constant(F(1, 2))
    hits = sum(abs(sample_wrandom(W, 1000, s).edge_count / pairs - 0.5) <= 0.05 for s in range(100))
    assert hits >= 99


def test_block_frequencies():
    W = StepGraphon((F(1, 5), F(4, 5)), ((0, 0), (0, 0)))
    G = sample_wrandom(W, 4000, 11)
    share = G.blocks.count(0) / 4000
    # binomial standard deviation is 0.0063; allow five of them
    assert abs(share - 0.2) < 0.032


def test_bipartite_samples_respect_blocks():
    G = sample_wrandom(BIPARTITE, 60, 4)
    for u, v in G.edges:
        assert G.blocks[u] != G.blocks[v]


def test_determinism():
    W = StepGraphon((F(1, 3), F(2, 3)), ((F(1, 2), F(1, 3)), (F(1, 3), F(1, 7))))
    assert sample_wrandom(W, 80, 5) == sample_wrandom(W, 80, 5)
    assert sample_wrandom(W, 80, 5) != sample_wrandom(W, 80, 6)


def test_huge_denominators():
    q = F(1, 2**70 + 1)
    W = StepGraphon((q, 1 - q), ((F(1, 3**45), 0), (0, F(1, 2))))
    G = sample_wrandom(W, 40, 2)
    assert G == sample_wrandom(W, 40, 2)


def test_sample_validation():
    W = StepGraphon.constant(1)
    with pytest.raises(ValidationError):
        sample_wrandom(W, 0, 1)
    with pytest.raises(ValidationError):
        sample_wrandom(W, 5, -1)
    with pytest.raises(CapacityError):
        sample_wrandom(W, MAX_VERTICES + 1, 1)


def test_graph_to_stepgraphon_examples():
    empty = graph_to_stepgraphon(SampledGraph(2, np.zeros((2, 2))))
    assert empty.measures == HALVES and empty.values == ((0, 0), (0, 0))
    edge = graph_to_stepgraphon(SampledGraph(2, np.array([[0, 1], [1, 0]])))
    assert edge.values == ((0, 1), (1, 0))


@given(graphons(max_k=3), st.integers(1, 40), st.integers(0, 1000))
def test_round_trip_density(W, n, seed):
    G = sample_wrandom(W, n, seed)
    assert graph_to_stepgraphon(G).edge_density() == F(2 * G.edge_count, n * n)


@settings(max_examples=25)
@given(graphons(max_k=3), st.integers(1, 12), st.integers(0, 1000))
def test_graph_duality_and_lp_agree(W, n, seed):
    G = sample_wrandom(W, n, seed)
    gm = fractional_matching(G)
    assert gm.nu == gm.tau
    nu_lp, _ = matching_ratio(graph_to_stepgraphon(G))
    assert gm.nu == nu_lp
    assert set(gm.cover) <= {0, F(1, 2), 1}
    assert set(gm.edge_weights.values()) <= {F(1, 2), 1}


def test_projected_cover_is_cover():
    W = StepGraphon((F(1, 3), F(2, 3)), ((F(1, 2), 1), (1, 0)))
    G = sample_wrandom(W, 60, 3)
    gm = fractional_matching(G)
    c, slack = project_cover(gm.cover, G.blocks, W)
    assert is_cover(c, W) and slack >= 0


def test_converge_zero_graphon():
    rep = convergence_experiment(StepGraphon.constant(0), [5, 10], [1, 2])
    assert rep.nu_W == 0 and all(r.nu == 0 == r.abs_error for r in rep.rows)
    assert [(r.n, r.seed) for r in rep.rows] == [(5, 1), (5, 2), (10, 1), (10, 2)]


def test_converge_csv_and_workers():
    serial = convergence_experiment(BIPARTITE, [20, 30], [1, 2, 3])
    parallel = convergence_experiment(BIPARTITE, [30, 20], [3, 2, 1], workers=2)
    assert serial == parallel
    lines = serial.to_csv().splitlines()
    assert lines[0] == "n,seed,nu,tau,abs_error,cover_slack"
    assert len(lines) == 7
    with pytest.raises(CapacityError):
        convergence_experiment(BIPARTITE, [MAX_VERTICES + 1], [1])


def test_bipartite_error_shrinks_on_average():
    rep = convergence_experiment(BIPARTITE, [20, 200], range(1, 11))
    mean = lambda n: sum(r.abs_error for r in rep.rows if r.n == n) / 10
    assert mean(200) <= mean(20)
