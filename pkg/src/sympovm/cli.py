"""Command-line interface.

Exit codes: 0 = success / verified, 1 = infeasible or mismatch (a
certificate is printed), 2 = usage error.  Rational values serialise as
"p/q" strings so output is byte-identical across runs for fixed flags
and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import _acceptance
from .discrimination import (
    DiscriminationProblem,
    StateCoeffs,
    global_optimal,
    optimal_local_bayes,
    optimal_local_info,
    outcome_distribution,
)
from .extremal import (
    brute_force_vertices,
    catalog_extrema,
    enumerate_vertices,
)
from .feasible import SymPovm, build_feasible_polytope, convex_decompose, is_feasible
from .nogo import isotropic_sanity_search, naive_transform_search
from .protocols import (
    LocalProtocol,
    bell_protocol,
    build_pure_state_set,
    isotropic_protocol,
    oo_protocol,
    verify_protocol,
    werner_protocol,
)
from .symmetry import CoeffVector, commutant_basis, kind


def _print_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _family_kind(args):
    return kind(args.family, args.dim)


def _csv_rows(rows):
    for row in rows:
        print(",".join(str(x) for x in row))


def cmd_basis(args):
    basis = commutant_basis(_family_kind(args))
    if args.format == "csv":
        _csv_rows([("index", "trace")] +
                  [(i, t) for i, t in enumerate(basis.traces)])
    else:
        _print_json({"family": basis.kind.family.value, "dim": basis.kind.dim,
                     "traces": list(basis.traces),
                     "projectors": [p.to_json() for p in basis.projectors]})
    return 0


def cmd_check(args):
    povm = SymPovm.from_json(_load_json(args.povm))
    report = is_feasible(povm)
    _print_json({"feasible": report.feasible,
                 "violations": [{"label": list(l), "value": str(v)}
                                for l, v in report.violations]})
    return 0 if report.feasible else 1


def _vertex_output(vs, fmt):
    if fmt == "csv":
        header = ["vertex"] + [f"c{i}" for i in range(len(vs.points[0][0]))]
        _csv_rows([tuple(header)] +
                  [(i,) + tuple(str(c) for c in coords)
                   for i, (coords, _) in enumerate(vs.points)])
    else:
        _print_json(vs.to_json())


def cmd_vertices(args):
    poly = build_feasible_polytope(_family_kind(args), args.outcomes)
    vs = brute_force_vertices(poly) if args.method == "brute" else \
        enumerate_vertices(poly)
    _vertex_output(vs, args.format)
    return 0


def cmd_extrema(args):
    vs = catalog_extrema(_family_kind(args), args.outcomes)
    if args.format == "csv":
        rows = [("class", "multiplicity", "elements")]
        for i, (povm, mult, _) in enumerate(vs.canonical_classes()):
            elems = ";".join("|".join(str(c) for c in e.coeffs)
                             for e in povm.elements)
            rows.append((i, mult, elems))
        _csv_rows(rows)
    else:
        _print_json(vs.to_json())
    return 0


def cmd_decompose(args):
    povm = SymPovm.from_json(_load_json(args.povm))
    catalog = catalog_extrema(povm.kind, povm.n_outcomes)
    res = convex_decompose(povm, catalog)
    if res.decomposed:
        _print_json({"decomposed": True,
                     "weights": [{"weight": str(w), "povm": p.to_json()}
                                 for p, w in res.weights]})
        return 0
    _print_json({"decomposed": False,
                 "certificate": [{"label": list(l), "coeff": str(c)}
                                 for l, c in res.certificate]})
    return 1


def cmd_protocol_synth(args):
    k = kind(args.family, args.dim)
    if k.family.value in ("isotropic", "werner"):
        if not args.target:
            raise ValueError("--target is required for isotropic/werner synthesis")
        target = SymPovm.from_json(_load_json(args.target))
        proto = isotropic_protocol(target) if k.family.value == "isotropic" \
            else werner_protocol(target)
    elif k.family.value == "bell":
        if args.extremum_index is None:
            raise ValueError("--extremum-index is required for bell synthesis")
        proto = bell_protocol(args.extremum_index)
    else:
        if not args.extremum:
            raise ValueError("--extremum (A|B|C|D|triple) is required for oo synthesis")
        proto = oo_protocol(args.extremum, args.dim)
    _print_json(proto.to_json())
    return 0


def cmd_protocol_verify(args):
    proto = LocalProtocol.from_json(_load_json(args.protocol))
    target = SymPovm.from_json(_load_json(args.target))
    report = verify_protocol(proto, target, eps=args.eps)
    _print_json(report.to_json())
    return 0 if report.ok else 1


def cmd_state_set(args):
    _print_json(build_pure_state_set(args.dim).to_json())
    return 0


def cmd_nogo(args):
    cert = isotropic_sanity_search(args.dim) if args.family == "isotropic" \
        else naive_transform_search(args.dim)
    if args.json:
        _print_json(cert.to_json())
    else:
        failing = sum(1 for c in cert.cases if not c.feasible)
        print(f"family={cert.family} d={cert.dim} verdict={cert.verdict} "
              f"({failing}/{len(cert.cases)} cases infeasible)")
    if args.family == "isotropic":
        return 0 if cert.verdict == "feasible" else 1
    return 0 if cert.verdict == "infeasible" else 1


def _parse_priors(text, n):
    priors = [Fraction(p) for p in text.split(",")] if text else \
        [Fraction(1, n)] * n
    return priors


def cmd_discriminate(args):
    blob = _load_json(args.states)
    k = kind(blob["family"], int(blob["dim"]))
    states = [StateCoeffs(k, tuple(Fraction(w) for w in row))
              for row in blob["states"]]
    priors = _parse_priors(args.priors, len(states))
    cost = args.cost
    if cost not in ("bayes", "info"):
        cost = [[Fraction(c) for c in row] for row in _load_json(cost)]
    problem = DiscriminationProblem(states, priors, cost)
    if args.mode == "global":
        value = global_optimal(problem)
        # the optimal global measurement resolves the commutant blocks,
        # which is itself an invariant (generally non-PPT) POVM
        n = k.n_coeffs
        blocks = SymPovm(k, tuple(
            CoeffVector(k, tuple(Fraction(int(i == j)) for j in range(n)))
            for i in range(n)))
        _print_json({"mode": "global",
                     "value": float(value) if problem.cost == "info" else str(value),
                     "optimal_povm": blocks.to_json(),
                     "channel": [[str(w) for w in s.weights] for s in states]})
        return 0
    if problem.cost == "info":
        res = optimal_local_info(problem)
        _print_json({"mode": "local", "value": res.bits,
                     "optimal_povm": res.povm.to_json(),
                     "channel": [[str(x) for x in row] for row in res.channel]})
        return 0
    res = optimal_local_bayes(problem)
    channel = [[str(x) for x in outcome_distribution(res.povm, s)]
               for s in problem.states]
    _print_json({"mode": "local", "value": str(res.value),
                 "optimal_povm": res.povm.to_json(), "channel": channel})
    return 0


def cmd_repro(args):
    results = _acceptance.run_all(seed=args.seed)
    for r in results:
        status = "PASS" if r["ok"] else "FAIL"
        print(f"[{status}] {r['criterion']} ({r['seconds']}s): {r['detail']}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
    return 0 if all(r["ok"] for r in results) else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="sympovm",
        description="Exact toolkit for symmetry-invariant bipartite POVMs")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(fn=fn)
        return sp

    shared = dict(family=lambda sp: sp.add_argument(
        "--family", required=True,
        choices=["isotropic", "werner", "bell", "oo"]),
        dim=lambda sp, req=False: sp.add_argument(
            "--dim", type=int, default=2, required=req),
        outcomes=lambda sp: sp.add_argument("--outcomes", type=int, required=True),
        fmt=lambda sp: sp.add_argument("--format", choices=["json", "csv"],
                                       default="json"))

    sp = add("basis", cmd_basis, help="print a commutant projector basis")
    shared["family"](sp); shared["dim"](sp); shared["fmt"](sp)

    sp = add("check", cmd_check, help="feasibility of a POVM file")
    sp.add_argument("--povm", required=True)

    sp = add("vertices", cmd_vertices, help="enumerate feasible-polytope vertices")
    shared["family"](sp); shared["dim"](sp); shared["outcomes"](sp); shared["fmt"](sp)
    sp.add_argument("--method", choices=["dd", "brute"], default="dd")

    sp = add("extrema", cmd_extrema, help="closed-form extremal catalog")
    shared["family"](sp); shared["dim"](sp); shared["outcomes"](sp); shared["fmt"](sp)

    sp = add("decompose", cmd_decompose,
             help="convex decomposition over the extremal catalog")
    sp.add_argument("--povm", required=True)

    sp = add("protocol-synth", cmd_protocol_synth, help="synthesise a local protocol")
    shared["family"](sp); shared["dim"](sp)
    sp.add_argument("--target", help="target POVM JSON (isotropic/werner)")
    sp.add_argument("--extremum", help="oo extremum id: A|B|C|D|triple")
    sp.add_argument("--extremum-index", type=int,
                    help="bell catalog class index")

    sp = add("protocol-verify", cmd_protocol_verify,
             help="verify a protocol against a target POVM")
    sp.add_argument("--protocol", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--eps", type=float, default=1e-9)

    sp = add("state-set", cmd_state_set, help="pure-state set resolving the identity")
    sp.add_argument("--dim", type=int, required=True)

    sp = add("nogo", cmd_nogo, help="impossibility certificate for product-form protocols")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--family", choices=["oo", "isotropic"], default="oo")
    sp.add_argument("--json", action="store_true")

    sp = add("discriminate", cmd_discriminate, help="optimal state discrimination")
    sp.add_argument("--states", required=True)
    sp.add_argument("--priors", default="")
    sp.add_argument("--cost", default="bayes",
                    help="'bayes', 'info', or a cost-matrix JSON path")
    sp.add_argument("--mode", choices=["local", "global"], default="local")

    sp = add("repro", cmd_repro, help="run the full acceptance suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="write the JSON report here")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
