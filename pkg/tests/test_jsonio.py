import json
from fractions import Fraction as F

import pytest
from hypothesis import given

from polyton.core import StepGraphon, ValidationError
from polyton.jsonio import (
    cover_from_json,
    graph_from_json,
    graphon_from_json,
    kernel_from_json,
    loads,
    parse_rational,
    to_json,
)
from polyton.sampling import sample_wrandom

from .strategies import covers, graphons, kernels


def test_parse_rational_forms():
    assert parse_rational("3/4", "x") == F(3, 4)
    assert parse_rational(2, "x") == 2
    assert parse_rational("-1/2", "x") == F(-1, 2)


@pytest.mark.parametrize("bad", ["2/4", "1/0", "abc", 0.5, True, None, "1.5"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValidationError) as err:
        parse_rational(bad, "values[0]")
    assert err.value.field == "values[0]"


def test_graphon_example_parses():
    W = graphon_from_json({"measures": ["1/3", "2/3"], "values": [["1", "1/2"], ["1/2", "0"]]})
    assert W.measures == (F(1, 3), F(2, 3)) and W.values[0][1] == F(1, 2)


def test_invariant_violation_names_field():
    with pytest.raises(ValidationError) as err:
        graphon_from_json({"measures": ["1/3", "2/3"], "values": [["1", "1/2"], ["1/3", "0"]]})
    assert "symmetric" in str(err.value)
    with pytest.raises(ValidationError) as err:
        graphon_from_json({"measures": ["1/3", "1/3"], "values": [["1", "0"], ["0", "0"]]})
    assert err.value.field == "measures"


def test_unknown_and_missing_keys():
    with pytest.raises(ValidationError) as err:
        graphon_from_json({"measures": ["1"], "values": [["1"]], "extra": 1})
    assert err.value.field == "extra"
    with pytest.raises(ValidationError) as err:
        cover_from_json({"measures": ["1"]})
    assert err.value.field == "values"


def test_malformed_json():
    with pytest.raises(ValidationError) as err:
        loads("{", graphon_from_json)
    assert err.value.field == "json"


def test_kernel_shared_measures():
    k = kernel_from_json({"measures": ["1/2", "1/2"], "values": [["1", "-1"], ["-1", "1"]]})
    assert k.row_measures == k.col_measures


@given(graphons())
def test_graphon_round_trip(W):
    assert graphon_from_json(json.loads(json.dumps(to_json(W)))) == W


@given(kernels())
def test_kernel_round_trip(k):
    assert kernel_from_json(to_json(k)) == k


@given(covers())
def test_cover_round_trip(c):
    assert cover_from_json(to_json(c)) == c


def test_graph_round_trip():
    G = sample_wrandom(StepGraphon.constant(F(1, 2)), 12, 3)
    assert graph_from_json(json.loads(json.dumps(to_json(G)))) == G
    with pytest.raises(ValidationError):
        graph_from_json({"n": 2, "edges": [[0, 0]]})
