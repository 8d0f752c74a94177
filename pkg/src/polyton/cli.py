"""Command-line interface: ``polyton <command> ...``.

Every command reads JSON inputs, calls one library function and prints JSON
(or CSV where asked).  Exact values are ``"p/q"`` strings; irrational ones
get a ``*_approx`` field with 12 decimals.  Exit codes: 0 success, 2 invalid
input (JSON error on stderr), 64 usage error.
"""

from __future__ import annotations

import argparse
import decimal
import json
import os
import sys
from fractions import Fraction
from importlib import metadata

from . import covers, cutnorm, jsonio, matchings, sampling, structure, transfer
from .core import CapacityError, ValidationError, format_rational

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _q(x: Fraction) -> str:
    return format_rational(x)


def _approx(x) -> str:
    return f"{decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator):.12f}" if isinstance(x, Fraction) else f"{x:.12f}"


def _cover_json(cert: covers.CoverCertificate) -> dict:
    return {
        "cover": jsonio.to_json(cert.cover),
        "size": _q(cert.size),
        "classification": cert.classification,
        "tight_pairs": [list(p) for p in cert.tight_pairs],
    }


def _load(path: str, parser, field: str):
    try:
        return jsonio.load_file(path, parser)
    except OSError as exc:
        raise ValidationError(f"{field}: cannot read {path!r}: {exc.strerror}", field) from exc


def _graphon(args, attr="graphon"):
    return _load(getattr(args, attr), jsonio.graphon_from_json, attr)


def _rational_arg(text: str, field: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{field}: cannot parse {text!r} as a rational or decimal", field) from exc


def _int_list(text: str, field: str) -> list[int]:
    out: list[int] = []
    try:
        for part in filter(None, text.split(",")):
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError as exc:
        raise ValidationError(f"{field}: expected integers like 1,2,5 or 1..20, got {text!r}", field) from exc
    if not out:
        raise ValidationError(f"{field}: empty list", field)
    return out


# commands


def cmd_ratio(args) -> dict:
    W = _graphon(args)
    if args.dump_lp:
        lp, _ = matchings.matching_lp(W)
        print(json.dumps({"matching_lp": lp.to_json(), "cover_lp": covers.cover_lp(W).to_json()}), file=sys.stderr)
    nu, witness = matchings.matching_ratio(W)
    tau, cert = covers.cover_ratio(W)
    return {
        "nu": _q(nu),
        "tau": _q(tau),
        "witness": jsonio.to_json(witness.matching),
        "degrees": [_q(d) for d in witness.degrees],
        "cover": _cover_json(cert),
    }


def cmd_cover_vertices(args) -> dict:
    W = _graphon(args)
    verts = covers.extreme_covers(W, cap=args.cap, method=args.method)
    rows = []
    for cert in verts:
        row = {"values": [_q(v) for v in cert.cover.values], "size": _q(cert.size)}
        if args.classify:
            row["classification"] = cert.classification
            row["tight_pairs"] = [list(p) for p in cert.tight_pairs]
        rows.append(row)
    if args.csv:
        header = [f"c{i}" for i in range(W.k)] + ["size"] + (["classification"] if args.classify else [])
        lines = [",".join(header)]
        for r in rows:
            lines.append(",".join(r["values"] + [r["size"]] + ([r["classification"]] if args.classify else [])))
        return {"_csv": "\n".join(lines) + "\n"}
    out = {"measures": [_q(m) for m in W.measures], "vertices": rows}
    if args.classify:
        out["all_half_integral"] = all(c.classification != "neither" for c in verts)
        out["all_integral"] = all(c.classification == "integral" for c in verts)
    return out


def cmd_hull_test(args) -> dict:
    W = _graphon(args)
    c = _load(args.cover, jsonio.cover_from_json, "cover")
    res = covers.in_integral_cover_hull(c, W, cap=args.cap)
    out = {"inside": res.inside, "measures": [_q(m) for m in res.measures]}
    if res.inside:
        out["combination"] = [{"weight": _q(lam), "cover": [_q(v) for v in cv.values]} for cv, lam in res.combination]
    else:
        out["separator"] = {"weights": [_q(w) for w in res.weights], "threshold": _q(res.threshold)}
    return out


def cmd_eg_check(args) -> dict:
    W = _graphon(args)
    rep = covers.eg_check(W)
    out = {
        "edge_density": _q(rep.edge_density),
        "tau_star": _q(rep.tau_star),
        "tight": rep.tight,
        "regime": rep.regime,
        "bound_branch": rep.bound_branch,
        "isomorphic_to": rep.isomorphic_to,
        "bound_exact": rep.bound_exact,
    }
    if rep.bound_exact:
        out["bound"] = _q(rep.bound)
    else:
        out["bound_approx"] = _approx(rep.bound)
        out["tolerance"] = str(covers.EG_TOLERANCE)
    return out


def cmd_bipartite(args) -> dict:
    W = _graphon(args)
    res = structure.is_bipartite(W)
    out = {"bipartite": res.bipartite}
    if res.bipartite:
        out.update(side_a=list(res.side_a), side_b=list(res.side_b))
        if res.graphon != W:
            out["refined_graphon"] = jsonio.to_json(res.graphon)
    else:
        w = res.witness
        out["witness"] = {
            "k": w.k,
            "blocks": list(w.blocks),
            "source_blocks": list(w.source_blocks),
            "alpha": _q(w.alpha),
            "graphon": jsonio.to_json(w.graphon),
        }
    return out


def cmd_kpartite(args) -> dict:
    W = _graphon(args)
    res = structure.is_k_partite(W, args.k, cap=args.cap)
    return {"k": args.k, "k_partite": res.ok, "colouring": list(res.colouring) if res.ok else None}


def cmd_density(args) -> dict:
    W = _graphon(args)
    F = structure.FiniteGraph.parse(args.motif)
    return {"motif": {"v": F.v, "edges": [list(e) for e in F.edges]}, "density": _q(structure.density(F, W, cap=args.cap))}


def cmd_cutnorm(args) -> dict:
    F = _load(args.kernel, jsonio.kernel_from_json, "kernel")
    if args.heuristic:
        res = cutnorm.cut_norm_lower_bound(F, restarts=args.restarts, seed=args.seed)
        kind = "lower_bound"
    else:
        res = cutnorm.cut_norm(F, cap=args.cap)
        kind = "exact"
    return {"kind": kind, "value": _q(res.value), "S": list(res.S), "T": list(res.T)}


def cmd_cutdist(args) -> dict:
    W1 = _graphon(args, "a")
    W2 = _graphon(args, "b")
    res = cutnorm.cut_distance_blocks(W1, W2, cap=args.cap)
    return {"upper_bound": _q(res.value), "permutation": list(res.permutation), "is_upper_bound": res.upper_bound}


def cmd_transfer(args) -> dict:
    W = _graphon(args, "w")
    U = _graphon(args, "u")
    m = _load(args.m, jsonio.kernel_from_json, "m")
    eps = _rational_arg(args.eps, "eps")
    res = transfer.transfer_matching(W, m, U, eps)
    p = res.plan
    plan = {
        "eps": _q(p.eps),
        "M": _q(p.M),
        "eps_tilde": _q(p.eps_tilde),
        "sqrt_eps_tilde_upper": _q(p.sigma),
        "sqrt_eps_tilde_approx": _approx(p.sigma),
        "s": _q(p.s),
        "r": _q(p.r),
        "eta": _q(p.eta),
        "k": p.k,
        "delta": _q(p.delta),
        "delta_approx": f"{float(p.delta):.12e}",
    }
    return {
        "valid": res.valid,
        "m_U": jsonio.to_json(res.m_U),
        "plan": plan,
        "B1": list(res.B1),
        "B2": list(res.B2),
        "trimmed_measure": [_q(x) for x in res.trimmed_measure],
        "bad_pairs": [list(x) for x in res.bad_pairs],
        "input_gap": _q(res.input_gap),
        "claim_gap": _q(res.claim_gap),
        "achieved_cut_error": _q(res.achieved_cut_error),
        "achieved_cut_error_approx": _approx(res.achieved_cut_error),
    }


def cmd_sample(args) -> dict:
    W = _graphon(args)
    G = sampling.sample_wrandom(W, args.n, args.seed)
    out = jsonio.to_json(G)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(out, fh)
        return {"n": G.n, "seed": G.seed, "edges": G.edge_count, "out": args.out}
    return out


def cmd_converge(args) -> dict:
    W = _graphon(args)
    ns = _int_list(args.ns, "ns")
    seeds = _int_list(args.seeds, "seeds")
    rep = sampling.convergence_experiment(W, ns, seeds, workers=args.threads)
    if args.csv:
        text = rep.to_csv()
        if args.csv == "-":
            return {"_csv": text}
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    return {
        "nu_W": _q(rep.nu_W),
        "rows": [
            {
                "n": r.n,
                "seed": r.seed,
                "nu": _q(r.nu),
                "tau": _q(r.tau),
                "abs_error": _q(r.abs_error),
                "cover_slack": _q(r.cover_slack),
                "projected_cover": [_q(v) for v in r.projected_cover.values],
            }
            for r in rep.rows
        ],
    }


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polyton", description="Matchings and fractional vertex covers of step graphons.")
    p.add_argument("--version", action="version", version=f"polyton {_version()}")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: $POLYTON_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("ratio", cmd_ratio, "matching ratio, cover ratio and witnesses")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--dump-lp", action="store_true", help="print both LPs as JSON on stderr")

    sp = add("cover-vertices", cmd_cover_vertices, "vertices of the quotient cover polytope")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--classify", action="store_true")
    sp.add_argument("--method", choices=("basis", "grid"), default="basis")
    sp.add_argument("--cap", type=int, default=10)
    sp.add_argument("--csv", action="store_true", help="flat CSV table instead of JSON")

    sp = add("hull-test", cmd_hull_test, "membership in the hull of integral covers")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--cover", required=True)
    sp.add_argument("--cap", type=int, default=12)

    sp = add("eg-check", cmd_eg_check, "cover ratio against the edge-density bound")
    sp.add_argument("--graphon", required=True)

    sp = add("bipartite", cmd_bipartite, "bipartition or odd-cycle witness")
    sp.add_argument("--graphon", required=True)

    sp = add("kpartite", cmd_kpartite, "proper colouring of the block support graph")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--cap", type=int, default=12)

    sp = add("density", cmd_density, "homomorphism density of a motif")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--motif", required=True, help="C5, K4, P3 or an edge list like 0-1,1-2")
    sp.add_argument("--cap", type=int, default=8)

    sp = add("cutnorm", cmd_cutnorm, "cut norm of a step kernel")
    sp.add_argument("--kernel", required=True)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact enumeration (default)")
    mode.add_argument("--heuristic", action="store_true", help="alternating lower bound")
    sp.add_argument("--restarts", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cap", type=int, default=20)

    sp = add("cutdist", cmd_cutdist, "cut distance over block permutations (upper bound)")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--cap", type=int, default=9)

    sp = add("transfer", cmd_transfer, "move a matching from W to a cut-close U")
    sp.add_argument("--w", required=True)
    sp.add_argument("--m", required=True)
    sp.add_argument("--u", required=True)
    sp.add_argument("--eps", required=True)

    sp = add("sample", cmd_sample, "draw G(n, W)")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out")

    sp = add("converge", cmd_converge, "sampled matching ratios against nu(W)")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--ns", required=True, help="e.g. 50,100,200")
    sp.add_argument("--seeds", required=True, help="e.g. 1..20")
    sp.add_argument("--csv", help="write CSV to this path ('-' for stdout)")
    return p


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        env = os.environ.get("POLYTON_THREADS", "1")
        try:
            n = int(env)
        except ValueError as exc:
            raise ValidationError(f"POLYTON_THREADS: expected an integer, got {env!r}", "POLYTON_THREADS") from exc
    if n < 1:
        raise ValidationError(f"threads: need at least 1, got {n}", "threads")
    return n


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        args.threads = _threads(args)
        out = args.func(args)
    except ValidationError as exc:
        print(json.dumps({"error": str(exc), "field": exc.field}), file=sys.stderr)
        return EXIT_INVALID
    except CapacityError as exc:
        print(json.dumps({"error": str(exc), "field": "cap"}), file=sys.stderr)
        return EXIT_INVALID
    if "_csv" in out:
        sys.stdout.write(out["_csv"])
    else:
        print(json.dumps(out))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
