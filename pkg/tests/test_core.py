from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyton.core import (
    SampledGraph,
    StepCover,
    StepGraphon,
    StepKernel,
    ValidationError,
    are_isomorphic,
    common_partition,
    common_refinement,
    l1_distance,
    merge_partitions,
    merge_twin_blocks,
    rational_sqrt,
    sqrt_bounds,
)

from .oracles import partition_merge
from .strategies import covers, graphons, kernels, partitions, rationals


def test_refine_constant_against_identity_pattern():
    a = StepGraphon.constant(1)
    b = StepGraphon((F(1, 2), F(1, 2)), ((1, 0), (0, 1)))
    ra, rb, bm = common_refinement(a, b)
    assert ra.measures == rb.measures == (F(1, 2), F(1, 2))
    assert ra.values == ((1, 1), (1, 1))
    assert rb == b
    assert bm.rows == ((0, 0), (0, 1))


def test_refine_self_is_identity():
    W = StepGraphon((F(1, 3), F(2, 3)), ((1, F(1, 2)), (F(1, 2), 0)))
    a, b, bm = common_refinement(W, W)
    assert a == W and b == W
    assert bm.rows == ((0, 0), (1, 1))


def test_refine_thirds_against_halves():
    ms, origin = merge_partitions((F(1, 3), F(2, 3)), (F(1, 2), F(1, 2)))
    assert ms == (F(1, 3), F(1, 6), F(1, 2))
    assert list(ms) == partition_merge((F(1, 3), F(2, 3)), (F(1, 2), F(1, 2)))
    assert origin == ((0, 0), (1, 0), (1, 1))


def test_common_refinement_rejects_mixed_kinds():
    with pytest.raises(TypeError):
        common_refinement(StepGraphon.constant(1), StepCover.constant(1))


def test_l1_examples():
    f = StepKernel((1,), (1,), ((F(3, 10),),))
    g = StepKernel((1,), (1,), ((F(1, 2),),))
    assert l1_distance(f, f) == 0
    assert l1_distance(f, g) == F(1, 5)
    h = StepKernel((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2)), ((1, 0), (0, 1)))
    assert l1_distance(h, StepKernel.zero()) == F(1, 2)


@pytest.mark.parametrize(
    "make",
    [
        lambda: StepGraphon((F(1, 2), F(1, 3)), ((0, 0), (0, 0))),
        lambda: StepGraphon((F(1, 2), F(1, 2)), ((0, 1), (0, 0))),
        lambda: StepGraphon((1,), ((F(3, 2),),)),
        lambda: StepGraphon((0, 1), ((0, 0), (0, 0))),
        lambda: StepGraphon((1,), ((0.5,),)),
        lambda: StepCover((1,), (F(-1, 10),)),
        lambda: StepCover((F(1, 2), F(1, 2)), (1,)),
        lambda: StepKernel((1,), (F(1, 2),), ((1,),)),
        lambda: StepGraphon((), ()),
    ],
    ids=["measures-sum", "asymmetric", "value-range", "zero-measure", "float", "cover-range", "cover-length", "kernel-cols", "empty"],
)
def test_constructors_validate(make):
    with pytest.raises(ValidationError):
        make()


def test_sampled_graph_validation():
    with pytest.raises(ValidationError):
        SampledGraph(2, np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValidationError):
        SampledGraph(2, np.array([[1, 0], [0, 0]]))
    G = SampledGraph(3, np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]))
    assert G.edges == [(0, 1), (1, 2)] and G.edge_count == 2
    assert not G.adjacency.flags.writeable


def test_sqrt_helpers():
    assert rational_sqrt(F(9, 25)) == F(3, 5)
    assert rational_sqrt(F(2)) is None
    lo, hi = sqrt_bounds(F(2), 40)
    assert lo * lo < 2 < hi * hi and hi - lo == F(1, 2**40)


def test_merge_twins_and_isomorphism():
    W = StepGraphon((F(1, 4), F(1, 4), F(1, 2)), ((1, 1, 0), (1, 1, 0), (0, 0, 0)))
    assert merge_twin_blocks(W) == StepGraphon((F(1, 2), F(1, 2)), ((1, 0), (0, 0)))
    assert are_isomorphic(W, StepGraphon((F(1, 2), F(1, 2)), ((0, 0), (0, 1))))
    assert not are_isomorphic(W, StepGraphon.constant(F(1, 4)))


@given(kernels(), kernels())
def test_refinement_preserves_integrals(f, g):
    a, b, _ = common_refinement(f, g)
    assert a.integral() == f.integral()
    assert b.integral() == g.integral()


@given(graphons(), graphons())
def test_graphon_refinement_preserves_values(W1, W2):
    a, _, bm = common_refinement(W1, W2)
    for p, (i, _) in enumerate(bm.rows):
        for q, (j, _) in enumerate(bm.rows):
            assert a.values[p][q] == W1.values[i][j]
    assert a.edge_density() == W1.edge_density()


@given(covers(), covers())
def test_cover_refinement_preserves_size(c1, c2):
    a, b, _ = common_refinement(c1, c2)
    assert a.size() == c1.size() and b.size() == c2.size()


@given(partitions(), partitions(), partitions())
def test_common_partition_matches_pairwise_merge(a, b, c):
    ms, maps = common_partition(a, b, c)
    assert list(ms) == partition_merge(partition_merge(a, b), c)
    assert sum(ms) == 1 and all(m > 0 for m in ms)
    for p, part in enumerate((a, b, c)):
        # every source block is the union of the refined blocks mapped to it
        for i, m in enumerate(part):
            assert sum(ms[q] for q in range(len(ms)) if maps[q][p] == i) == m


@st.composite
def kernel_triples(draw):
    ms = draw(partitions(1, 4))
    make = lambda: StepKernel(ms, ms, tuple(tuple(draw(rationals(-1, 1)) for _ in ms) for _ in ms))
    return make(), make(), make()


@given(kernel_triples())
def test_l1_is_a_metric(triple):
    f, g, h = triple
    assert l1_distance(f, g) == l1_distance(g, f)
    assert l1_distance(f, h) <= l1_distance(f, g) + l1_distance(g, h)
    assert (l1_distance(f, g) == 0) == (f.values == g.values)


@given(kernels(), kernels())
def test_l1_across_partitions_symmetric(f, g):
    assert l1_distance(f, g) == l1_distance(g, f) >= 0


@given(rationals(-5, 5), rationals(-5, 5))
def test_arithmetic_is_exact(a, b):
    assert (a + b) - b == a
    k = StepKernel((1,), (1,), ((a,),))
    assert ((k + StepKernel((1,), (1,), ((b,),))) - StepKernel((1,), (1,), ((b,),))).values[0][0] == a
