import decimal
from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polyton.core import CapacityError, StepCover, StepGraphon, ValidationError
from polyton.covers import (
    CROSSING_DENSITY,
    EG_TOLERANCE,
    build_phi,
    build_psi,
    classify,
    cover_lp,
    cover_ratio,
    decompose_cover,
    eg_branches,
    eg_check,
    eg_lower_bound,
    extreme_covers,
    in_integral_cover_hull,
    integral_covers,
    is_cover,
    maxg,
)
from polyton.rational_lp import enumerate_vertices
from polyton.structure import is_bipartite

from .oracles import bipartite_oracle, cover_ratio_bruteforce, integral_vertex_covers
from .strategies import covers, cycle_graphon, graphons, rationals

HALVES = (F(1, 2), F(1, 2))
EDGE = StepGraphon(HALVES, ((0, 1), (1, 0)))
TRIANGLE = cycle_graphon(3)


def test_is_cover_examples():
    assert is_cover(StepCover.constant(1), StepGraphon.constant(F(1, 7)))
    assert is_cover(StepCover.constant(0), StepGraphon.constant(0))
    v = is_cover(StepCover.constant(F(2, 5)), StepGraphon.constant(1))
    assert not v and "4/5" in v.reason and v.blocks == (0, 0)


def test_is_cover_refines():
    c = StepCover((F(1, 4), F(3, 4)), (1, 0))
    v = is_cover(c, EDGE)
    assert not v and v.blocks == (0, 1)
    assert is_cover(StepCover((F(1, 4), F(1, 4), F(1, 2)), (1, 1, 0)), EDGE)


def test_cover_ratio_examples():
    assert cover_ratio(StepGraphon.constant(0))[0] == 0
    tau, cert = cover_ratio(StepGraphon.constant(1))
    assert tau == F(1, 2) and cert.cover.values == (F(1, 2),)
    assert cert.classification == "half-integral" and cert.tight_pairs == ((0, 0),)
    tau, cert = cover_ratio(build_psi(F(9, 25)))
    assert tau == F(1, 5) and cert.cover.values == (1, 0)


def test_extreme_covers_examples():
    assert [c.cover.values for c in extreme_covers(EDGE)] == [(0, 1), (1, 0), (1, 1)]
    assert all(c.classification == "integral" for c in extreme_covers(EDGE))
    tri = [c.cover.values for c in extreme_covers(TRIANGLE)]
    assert (F(1, 2),) * 3 in tri
    zero = StepGraphon.constant(0, (F(1, 3),) * 3)
    assert len(extreme_covers(zero)) == 8
    with pytest.raises(CapacityError):
        extreme_covers(StepGraphon.constant(0, (F(1, 11),) * 11))


def test_classify():
    assert classify([0, 1]) == "integral"
    assert classify([0, F(1, 2)]) == "half-integral"
    assert classify([F(1, 3)]) == "neither"


def test_decompose_half_example():
    c = StepCover(HALVES, (F(3, 10), F(4, 5)))
    a, b = decompose_cover(c, EDGE, "half")
    assert a.values == (F(1, 2), F(3, 5)) and b.values == (F(1, 10), 1)
    assert sum(a.values) == F(11, 10)


def test_decompose_half_integral_fixed_point():
    c = StepCover((F(1, 3),) * 3, (F(1, 2),) * 3)
    a, b = decompose_cover(c, TRIANGLE, "half")
    assert a == b == c


def test_decompose_bipartite_example():
    c = StepCover(HALVES, (F(3, 10), F(9, 10)))
    a, b = decompose_cover(c, EDGE, "bipartite", side_a=[0])
    assert a.values == (F(3, 5), F(4, 5)) and b.values == (0, 1)
    assert sum(a.values) == 2 * F(3, 10) + 2 * F(9, 10) - 1


def test_decompose_rejects_bad_bipartition():
    with pytest.raises(ValidationError) as err:
        decompose_cover(StepCover.constant(F(1, 2), (F(1, 3),) * 3), TRIANGLE, "bipartite", side_a=[0])
    assert "(1, 2)" in str(err.value)
    with pytest.raises(ValidationError):
        decompose_cover(StepCover.constant(0), StepGraphon.constant(1))


def test_hull_examples():
    assert in_integral_cover_hull(StepCover.constant(1), TRIANGLE)
    res = in_integral_cover_hull(StepCover.constant(F(1, 2), HALVES), EDGE)
    assert res.inside
    assert sorted((c.values, lam) for c, lam in res.combination) == [((0, 1), F(1, 2)), ((1, 0), F(1, 2))]
    five = cycle_graphon(5)
    res = in_integral_cover_hull(StepCover.constant(F(1, 2), five.measures), five)
    assert not res.inside
    # every integral cover of C5 has at least 3 blocks of mass 1/5
    assert min(sum(b) for b in integral_covers(five)) == 3
    w, beta = res.weights, res.threshold
    assert sum(x * y for x, y in zip(w, res.target.values)) < beta
    assert all(sum(x * y for x, y in zip(w, c.values)) >= beta for c in res.integral_covers)


def test_integral_covers_match_oracle():
    for W in (TRIANGLE, EDGE, cycle_graphon(6)):
        assert integral_covers(W) == integral_vertex_covers(W)


def test_eg_bound_examples():
    assert eg_lower_bound(F(16, 25)) == F(2, 5)
    assert eg_lower_bound(F(9, 25)) == F(1, 5)
    assert eg_branches(F(9, 25)) == (F(3, 10), F(1, 5))
    assert eg_lower_bound(F(0)) == 0
    approx = eg_lower_bound(F(1, 2))
    assert isinstance(approx, decimal.Decimal)
    assert abs(float(approx) - min((1 / 8) ** 0.5, 1 - 0.5**0.5)) < 1e-12


def test_crossing_both_branches():
    clique, bip = eg_branches(CROSSING_DENSITY)
    assert clique == bip == F(2, 5)


def test_build_psi_phi():
    psi = build_psi(F(9, 25))
    assert psi.measures == (F(1, 5), F(4, 5)) and psi.edge_density() == F(9, 25)
    assert psi.values == ((1, 1), (1, 0))
    phi = build_phi(F(16, 25))
    assert phi.measures == (F(4, 5), F(1, 5)) and phi.edge_density() == F(16, 25)
    with pytest.raises(ValidationError):
        build_psi(0)
    with pytest.raises(ValidationError):
        build_phi(F(1, 2))
    assert build_phi(1) == StepGraphon.constant(1)
    approx = build_phi(F(1, 2), exact=False)
    assert abs(approx.edge_density() - F(1, 2)) < F(1, 2**60)


def test_maxg_examples():
    assert maxg(F(1, 2)) == [(1, 0, 1)]
    assert maxg(F(1, 5)) == [(0, F(1, 5), F(9, 25))]
    assert maxg(F(2, 5)) == [(0, F(2, 5), F(16, 25)), (F(4, 5), 0, F(16, 25))]
    with pytest.raises(ValidationError):
        maxg(F(3, 5))


def test_eg_check_examples():
    r = eg_check(build_psi(F(9, 25)))
    assert r.tight and r.regime == "bipartite-side" and r.tau_star == F(1, 5) and r.isomorphic_to == "psi"
    r = eg_check(build_phi(F(16, 25)))
    assert r.tight and r.regime == "clique-side" and r.tau_star == F(2, 5) and r.bound_branch == "both"
    r = eg_check(StepGraphon.constant(1))
    assert r.tight and r.tau_star == F(1, 2) and r.isomorphic_to == "phi"
    r = eg_check(StepGraphon.constant(F(1, 2)))
    assert not r.tight and r.tau_star == F(1, 2)


def test_eg_check_permuted_extremal():
    psi = build_psi(F(9, 25))
    assert eg_check(psi.permuted((1, 0))).isomorphic_to == "psi"


@given(graphons(max_k=6))
def test_extreme_covers_half_integral(W):
    certs = extreme_covers(W)
    assert all(c.classification != "neither" for c in certs)
    assert [c.cover.values for c in certs] == enumerate_vertices(cover_lp(W))
    assert [c.cover.values for c in extreme_covers(W, method="grid")] == [c.cover.values for c in certs]


@given(graphons(max_k=5))
def test_integral_iff_bipartite(W):
    integral = all(c.classification == "integral" for c in extreme_covers(W))
    assert integral == bool(is_bipartite(W)) == bipartite_oracle(W)


@given(graphons(max_k=5))
def test_cover_ratio_matches_vertex_minimum(W):
    tau, cert = cover_ratio(W)
    bf, verts = cover_ratio_bruteforce(W)
    assert tau == bf == cert.size
    assert is_cover(cert.cover, W)
    # lexicographically smallest optimal vertex
    assert cert.cover.values == min(v for v in verts if sum(m * x for m, x in zip(W.measures, v)) == tau)


@st.composite
def cover_pairs(draw):
    W = draw(graphons(max_k=5))
    vals = list(draw(st.lists(rationals(), min_size=W.k, max_size=W.k)))
    for i, j in W.support_pairs():
        if vals[i] + vals[j] < 1:
            vals[j] = 1 - vals[i]
    return StepCover(W.measures, tuple(vals)), W


@given(cover_pairs())
def test_half_decomposition(pair):
    c, W = pair
    a, b = decompose_cover(c, W, "half")
    assert is_cover(a, W) and is_cover(b, W)
    assert all((x + y) / 2 == v for x, y, v in zip(a.values, b.values, c.values))
    assert (a != c) == (classify(c.values) == "neither")


@given(cover_pairs())
def test_bipartite_decomposition(pair):
    c, W = pair
    res = is_bipartite(W)
    assume(res.bipartite and res.graphon == W)
    a, b = decompose_cover(c, W, "bipartite", side_a=res.side_a)
    assert is_cover(a, W) and is_cover(b, W)
    assert all((x + y) / 2 == v for x, y, v in zip(a.values, b.values, c.values))
    assert (a != c) == (classify(c.values) != "integral")


@given(graphons(max_k=6))
def test_hull_membership_of_half(W):
    target = StepCover.constant(F(1, 2), W.measures)
    assume(is_cover(target, W))
    res = in_integral_cover_hull(target, W)
    assert res.inside == bipartite_oracle(W)


@given(graphons(max_k=5), covers(max_k=3))
def test_hull_certificates(W, c):
    res = in_integral_cover_hull(c, W)
    if res.inside:
        assert sum(lam for _, lam in res.combination) == 1
        for i, v in enumerate(res.target.values):
            assert sum(lam * cv.values[i] for cv, lam in res.combination) == v
    else:
        f = lambda x: sum(a * b for a, b in zip(res.weights, x.values))
        assert f(res.target) < res.threshold
        assert all(f(cv) >= res.threshold for cv in res.integral_covers)


@given(graphons(max_k=6))
def test_eg_bound_holds(W):
    tau, _ = cover_ratio(W)
    bound = eg_lower_bound(W.edge_density())
    if isinstance(bound, F):
        assert tau >= bound
    else:
        assert decimal.Decimal(tau.numerator) / tau.denominator >= bound - EG_TOLERANCE
    eg_check(W)


@given(st.integers(1, 24).map(lambda a: F(a, 25)))
def test_psi_tight_whenever_root_rational(e):
    try:
        psi = build_psi(e)
    except ValidationError:
        return
    r = eg_check(psi)
    if e <= CROSSING_DENSITY:
        assert r.tight and r.tau_star == eg_lower_bound(e) and r.isomorphic_to == "psi"
