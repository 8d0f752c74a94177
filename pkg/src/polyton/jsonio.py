"""JSON wire format for step objects.

Rationals travel as ``"p/q"`` strings in lowest terms (bare integers are
also accepted).  Parsing is strict: floats, unreduced fractions and unknown
keys are rejected with a :class:`ValidationError` naming the field.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

import numpy as np

from .core import SampledGraph, StepCover, StepGraphon, StepKernel, ValidationError, format_rational

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(x: Any, field: str) -> Fraction:
    if isinstance(x, bool):
        raise ValidationError(f"{field}: expected a rational, got a boolean", field)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise ValidationError(f"{field}: floats are not accepted, write {x!r} as a 'p/q' string", field)
    if not isinstance(x, str):
        raise ValidationError(f"{field}: expected a 'p/q' string, got {type(x).__name__}", field)
    m = _RATIONAL_RE.match(x)
    if not m:
        raise ValidationError(f"{field}: cannot parse {x!r} as 'p/q'", field)
    p, q = int(m.group(1)), int(m.group(2) or 1)
    if q == 0:
        raise ValidationError(f"{field}: zero denominator in {x!r}", field)
    out = Fraction(p, q)
    if out.denominator != q:
        raise ValidationError(f"{field}: {x!r} is not in lowest terms (expected {format_rational(out)!r})", field)
    return out


def dump_rational(q: Fraction) -> str:
    return format_rational(q)


def _expect_keys(obj: Any, required: set[str], optional: set[str], what: str) -> dict:
    if not isinstance(obj, dict):
        raise ValidationError(f"{what}: expected a JSON object", what)
    missing = required - obj.keys()
    if missing:
        name = sorted(missing)[0]
        raise ValidationError(f"{name}: missing required field", name)
    extra = obj.keys() - required - optional
    if extra:
        name = sorted(extra)[0]
        raise ValidationError(f"{name}: unknown field", name)
    return obj


def _vector(xs: Any, field: str) -> list[Fraction]:
    if not isinstance(xs, list):
        raise ValidationError(f"{field}: expected a list", field)
    return [parse_rational(x, f"{field}[{i}]") for i, x in enumerate(xs)]


def _matrix(rows: Any, field: str) -> list[list[Fraction]]:
    if not isinstance(rows, list):
        raise ValidationError(f"{field}: expected a list of rows", field)
    return [_vector(r, f"{field}[{i}]") for i, r in enumerate(rows)]


def graphon_from_json(obj: Any) -> StepGraphon:
    obj = _expect_keys(obj, {"measures", "values"}, {"kind"}, "graphon")
    return StepGraphon(tuple(_vector(obj["measures"], "measures")), tuple(map(tuple, _matrix(obj["values"], "values"))))


def kernel_from_json(obj: Any) -> StepKernel:
    obj = _expect_keys(obj, {"values"}, {"row_measures", "col_measures", "measures", "kind"}, "kernel")
    if "measures" in obj:
        if "row_measures" in obj or "col_measures" in obj:
            raise ValidationError("measures: give either 'measures' or 'row_measures'/'col_measures'", "measures")
        rows = cols = _vector(obj["measures"], "measures")
    else:
        for key in ("row_measures", "col_measures"):
            if key not in obj:
                raise ValidationError(f"{key}: missing required field", key)
        rows = _vector(obj["row_measures"], "row_measures")
        cols = _vector(obj["col_measures"], "col_measures")
    return StepKernel(tuple(rows), tuple(cols), tuple(map(tuple, _matrix(obj["values"], "values"))))


def cover_from_json(obj: Any) -> StepCover:
    obj = _expect_keys(obj, {"measures", "values"}, {"kind"}, "cover")
    return StepCover(tuple(_vector(obj["measures"], "measures")), tuple(_vector(obj["values"], "values")))


def graph_from_json(obj: Any) -> SampledGraph:
    obj = _expect_keys(obj, {"n", "edges"}, {"seed", "blocks", "kind"}, "graph")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError("n: expected a positive integer", "n")
    adj = np.zeros((n, n), dtype=np.uint8)
    for idx, e in enumerate(obj["edges"]):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) and 0 <= v < n for v in e)):
            raise ValidationError(f"edges[{idx}]: expected a pair of vertex indices in [0, {n})", f"edges[{idx}]")
        i, j = e
        if i == j:
            raise ValidationError(f"edges[{idx}]: loops are not allowed", f"edges[{idx}]")
        adj[i, j] = adj[j, i] = 1
    blocks = obj.get("blocks")
    return SampledGraph(n, adj, obj.get("seed"), tuple(blocks) if blocks is not None else None)


def to_json(x: Any) -> dict:
    """JSON-ready dict for any step object or sampled graph."""
    if isinstance(x, StepGraphon):
        return {
            "kind": "graphon",
            "measures": [dump_rational(m) for m in x.measures],
            "values": [[dump_rational(v) for v in row] for row in x.values],
        }
    if isinstance(x, StepKernel):
        return {
            "kind": "kernel",
            "row_measures": [dump_rational(m) for m in x.row_measures],
            "col_measures": [dump_rational(m) for m in x.col_measures],
            "values": [[dump_rational(v) for v in row] for row in x.values],
        }
    if isinstance(x, StepCover):
        return {
            "kind": "cover",
            "measures": [dump_rational(m) for m in x.measures],
            "values": [dump_rational(v) for v in x.values],
        }
    if isinstance(x, SampledGraph):
        out = {"kind": "graph", "n": x.n, "seed": x.seed, "edges": [list(e) for e in x.edges]}
        if x.blocks is not None:
            out["blocks"] = list(x.blocks)
        return out
    raise TypeError(f"cannot serialize {type(x).__name__}")


def loads(text: str, parser):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", "json") from exc
    return parser(obj)


def load_file(path: str, parser):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), parser)
