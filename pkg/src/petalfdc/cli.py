"""Command-line interface.

Exit codes: 0 success, 1 a tolerance or verification check failed,
2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import (ORACLE_TOL, SLACKNESS_TOL, audit_closed_forms, build_certificate,
                           optimality_oracle, slackness_check)
from .exceptions import NumericError, SpecError
from .simulate import (FLOOR, asymptotic_rate, crossover_step, default_x0, random_x0,
                       run_consensus, trajectories_csv)
from .spectral import interlacing_violations, quotient_matrices, slem_full, slem_quotient
from .tables import TABLE_TOL, reproduce, rows_to_csv, rows_to_json, rows_to_markdown, table_specs
from .topology import (AsymmetricG, CoreKind, PathBundle, PetalSpec, SymmetricG, build_graph,
                       graph_from_dict)
from .weights import (CUSTOM, WeightAssignment, assemble_matrix, metropolis_hastings_weights,
                      optimal_weights, perturb)

EXIT_OK, EXIT_CHECK, EXIT_SPEC, EXIT_NUMERIC = 0, 1, 2, 3


class CheckFailed(Exception):
    """Raised after output is written when a tolerance check did not pass."""


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise SpecError(f"expected comma-separated integers, got {text!r}") from None


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None


def spec_from_args(args) -> PetalSpec:
    if args.spec_file:
        data = _load_json(args.spec_file)
        return PetalSpec.from_dict(data.get("spec", data))
    if args.core is None or args.n is None:
        raise SpecError("give --core and -n, or --spec-file")
    core = CoreKind.parse(args.core)
    if args.leaf == "path":
        if args.m is None:
            raise SpecError("path leaves need -m")
        leaf = PathBundle(args.m, args.k if args.k is not None else 1)
    elif args.leaf == "g":
        if args.m is None or args.k is None:
            raise SpecError("symmetric G leaves need -m and -k")
        leaf = SymmetricG(args.m, args.k)
    else:
        if not args.expand or not args.contract:
            raise SpecError("asymmetric G leaves need --expand and --contract")
        leaf = AsymmetricG(tuple(_ints(args.expand)), tuple(_ints(args.contract)))
    return PetalSpec(core, args.n, leaf)


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


def _unsupported(args, allowed) -> None:
    if args.format not in allowed:
        raise SpecError(f"{args.command} supports --format {'|'.join(allowed)}, not {args.format}")


def _weights_for(spec: PetalSpec, scheme: str) -> WeightAssignment:
    if scheme == "optimal":
        return optimal_weights(spec)
    return metropolis_hastings_weights(build_graph(spec))


def cmd_build(args) -> int:
    _unsupported(args, ("json", "dot", "csv", "md"))
    graph = build_graph(spec_from_args(args))
    if args.format == "dot":
        text = graph.to_dot()
    elif args.format == "json":
        text = _dump({"schema_version": 1, **graph.to_dict()})
    elif args.format == "csv":
        text = "u,v,class\n" + "".join(f"{u},{v},{c}\n" for (u, v), c in zip(graph.edges, graph.edge_class))
    else:
        deg = graph.degrees()
        lines = ["| stratum | size | core distance | degree |", "|---|---|---|---|"]
        for s in range(graph.stratum_count):
            nodes = [i for i, x in enumerate(graph.stratum_of) if x == s]
            lines.append(f"| {s} | {len(nodes)} | {graph.core_distance[nodes[0]]} | {deg[nodes[0]]} |")
        text = "\n".join(lines)
    _emit(args, text)
    return EXIT_OK


def cmd_weights(args) -> int:
    _unsupported(args, ("json", "csv", "md"))
    spec = spec_from_args(args)
    graph = build_graph(spec)
    assignment = _weights_for(spec, args.scheme)
    data = assignment.to_dict(graph, per_edge=args.per_edge or assignment.class_weights is None)
    if args.format == "json":
        text = _dump(data)
    elif args.format == "csv":
        text = "class,from_stratum,to_stratum,weight_num,weight_den,weight\n" + "".join(
            f"{c['class']},{c['from_stratum']},{c['to_stratum']},{c['weight_num']},"
            f"{c['weight_den']},{c['weight']!r}\n" for c in data["classes"])
    else:
        lines = ["| class | strata | weight |", "|---|---|---|"]
        lines += [f"| {c['class']} | {c['from_stratum']}-{c['to_stratum']} | "
                  f"{c['weight_num']}/{c['weight_den']} |" for c in data["classes"]]
        text = "\n".join(lines)
    _emit(args, text)
    return EXIT_OK


def cmd_slem(args) -> int:
    _unsupported(args, ("json", "csv", "md"))
    if args.graph_file:
        graph, assignment = _load_custom(args)
        report = slem_full(assemble_matrix(graph, assignment), graph.spec)
        _emit(args, _dump(report.to_dict()) if args.format == "json" else
              f"source,slem,convergence_factor\nfull,{report.slem!r},{report.convergence_factor!r}")
        return EXIT_OK
    spec = spec_from_args(args)
    assignment = _weights_for(spec, args.scheme)
    reports = []
    if args.method in ("quotient", "both"):
        reports.append(slem_quotient(quotient_matrices(spec, assignment), spec))
    if args.method in ("full", "both"):
        reports.append(slem_full(assemble_matrix(build_graph(spec), assignment), spec))
    tol = args.tol if args.tol is not None else 1e-9
    agree = len(reports) < 2 or abs(reports[0].slem - reports[1].slem) <= tol
    if args.format == "json":
        payload = reports[0].to_dict() if len(reports) == 1 else {
            "schema_version": 1, "agree": agree, "tol": tol,
            "reports": [r.to_dict() for r in reports]}
        text = _dump(payload)
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["spec", "source", "slem", "convergence_factor"])
        writer.writerows([spec.label(), r.source, repr(r.slem), repr(r.convergence_factor)]
                         for r in reports)
        text = buf.getvalue()
    else:
        lines = ["| spec | source | SLEM | convergence factor |", "|---|---|---|---|"]
        lines += [f"| {spec.label()} | {r.source} | {r.slem:.10f} | {r.convergence_factor:.10f} |"
                  for r in reports]
        text = "\n".join(lines)
    _emit(args, text)
    if not agree:
        raise CheckFailed(f"quotient and full SLEM differ by more than {tol:g}")
    return EXIT_OK


def cmd_tables(args) -> int:
    _unsupported(args, ("json", "csv", "md"))
    tol = args.tol if args.tol is not None else TABLE_TOL
    rows = reproduce(args.core)
    text = {"json": lambda: rows_to_json(rows, tol), "csv": lambda: rows_to_csv(rows),
            "md": lambda: rows_to_markdown(rows, tol)}[args.format]()
    _emit(args, text)
    bad = [r for r in rows if not r.ok(tol)]
    if bad:
        raise CheckFailed(f"{len(bad)} table cells differ by more than {tol:g}")
    return EXIT_OK


def _load_custom(args):
    graph = graph_from_dict(_load_json(args.graph_file))
    if not args.weights_file:
        raise SpecError("--graph-file needs --weights-file")
    data = _load_json(args.weights_file)
    per_edge = None
    if "per_edge" in data:
        per_edge = {tuple(sorted((int(u), int(v)))): float(w) for u, v, w in data["per_edge"]}
    classes = {int(c["class"]): Fraction(c["weight"]) if isinstance(c["weight"], str) else c["weight"]
               for c in data.get("classes", [])}
    return graph, WeightAssignment(CUSTOM, classes or None, per_edge)


def cmd_simulate(args) -> int:
    _unsupported(args, ("csv", "json"))
    if args.graph_file:
        graph, assignment = _load_custom(args)
        runs = [("custom", assignment)]
    else:
        spec = spec_from_args(args)
        graph = build_graph(spec)
        schemes = ["optimal", "metropolis-hastings"] if args.scheme == "both" else [args.scheme]
        runs = [(s, _weights_for(spec, "optimal" if s == "optimal" else "mh")) for s in schemes]
    if args.x0 == "impulse":
        x0, label = default_x0(graph), "impulse"
    else:
        x0, label = random_x0(graph.node_count, args.seed), f"random(seed={args.seed})"
    trajs = [run_consensus(assemble_matrix(graph, a), x0, args.steps, name, label)
             for name, a in runs]
    if args.format == "csv":
        text = trajectories_csv(trajs)
    else:
        window = min(args.window, args.steps)
        summary = []
        for t in trajs:
            try:
                rate = asymptotic_rate(t, window)
            except NumericError:
                rate = None
            summary.append({"scheme": t.scheme, "final_distance": float(t.distances[-1]),
                            "asymptotic_rate": rate, "max_mass_drift": t.max_mass_drift(),
                            "distances": t.distances.tolist()})
        payload = {"schema_version": 1, "x0": label, "steps": args.steps, "window": window,
                   "floor": FLOOR, "runs": summary}
        if len(trajs) == 2:
            payload["crossover_step"] = crossover_step(trajs[0], trajs[1])
        text = _dump(payload)
    _emit(args, text)
    return EXIT_OK


def cmd_audit(args) -> int:
    _unsupported(args, ("json", "md"))
    specs = [spec_from_args(args)] if (args.spec_file or args.core and args.n) else table_specs()
    report = audit_closed_forms(specs, args.tol if args.tol is not None else 1e-6)
    _emit(args, report.to_markdown() if args.format == "md" else _dump(report.to_dict()))
    return EXIT_OK


_PERTURB = re.compile(r"^w(\d+)=([+-]?\d*\.?\d+(?:[eE][+-]?\d+)?)$")


def cmd_verify(args) -> int:
    _unsupported(args, ("json", "md"))
    spec = spec_from_args(args)
    assignment = optimal_weights(spec)
    for item in args.perturb or []:
        match = _PERTURB.match(item.replace(" ", ""))
        if not match:
            raise SpecError(f"--perturb expects wN=+delta, got {item!r}")
        assignment = perturb(assignment, int(match.group(1)), float(match.group(2)))
    tol = args.tol if args.tol is not None else SLACKNESS_TOL
    pair = quotient_matrices(spec, assignment)
    cert = build_certificate(pair, strict=False)
    slack = slackness_check(cert, tol)
    oracle = optimality_oracle(spec, args.budget, weights=assignment,
                               restarts=args.restarts, seed=args.seed)
    oracle_ok = oracle.certifies(args.oracle_tol)
    interlace = interlacing_violations(pair)
    passed = slack.passed and oracle_ok
    if args.format == "json":
        text = _dump({"schema_version": 1, "spec": spec.to_dict(), "passed": passed,
                      "weights": {str(c): w for c, w in assignment.as_floats().items()},
                      "slackness": slack.to_dict(), "oracle": oracle.to_dict(),
                      "oracle_tol": args.oracle_tol, "interlacing_violations": interlace})
    else:
        text = "\n".join([
            f"spec: {spec.label()}",
            f"s: {cert.s:.12f}",
            "| check | value | ok |", "|---|---|---|",
            f"| residual primal | {cert.residual_primal:.2e} | {cert.residual_primal <= tol} |",
            f"| residual dual | {cert.residual_dual:.2e} | {cert.residual_dual <= tol} |",
            f"| duality gap | {cert.gap:.2e} | {cert.gap <= tol} |",
            f"| v.z2 | {cert.orthogonality:.2e} | {cert.orthogonality <= tol} |",
            f"| dual feasibility | {cert.feasibility:.2e} | {cert.feasibility <= tol} |",
            f"| oracle improvement | {oracle.improvement:.2e} | {oracle_ok} |",
            f"verdict: {'pass' if passed else 'FAIL'}"])
    _emit(args, text)
    if not passed:
        raise CheckFailed("optimality verification failed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", default="json", choices=["json", "csv", "md", "dot"])
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=None, help="override the command's tolerance")

    spec = argparse.ArgumentParser(add_help=False)
    spec.add_argument("--core", help="hub | complete")
    spec.add_argument("-n", type=int, help="number of leaves")
    spec.add_argument("-m", type=int, help="path length or tree height")
    spec.add_argument("-k", type=int, help="parallel paths or branching factor")
    spec.add_argument("--leaf", default="path", choices=["path", "g", "asym"])
    spec.add_argument("--expand", help="asymmetric G child counts, e.g. 2,3")
    spec.add_argument("--contract", help="asymmetric G merge counts, e.g. 3,2")
    spec.add_argument("--spec-file", help="JSON spec (required for composite leaves)")

    p = argparse.ArgumentParser(prog="petalfdc", description="Optimal consensus weights on petal networks")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common, spec], help="explicit graph with strata")

    w = sub.add_parser("weights", parents=[common, spec], help="weight assignment")
    w.add_argument("--scheme", default="optimal", choices=["optimal", "mh"])
    w.add_argument("--per-edge", action="store_true")

    s = sub.add_parser("slem", parents=[common, spec], help="SLEM of a petal network")
    s.add_argument("--scheme", default="optimal", choices=["optimal", "mh"])
    s.add_argument("--method", default="quotient", choices=["quotient", "full", "both"])
    s.add_argument("--graph-file", help="exported graph JSON; full spectrum with custom weights")
    s.add_argument("--weights-file", help="weights JSON with classes or per_edge")

    t = sub.add_parser("tables", parents=[common], help="reproduce the published SLEM tables")
    t.add_argument("--core", default=None, help="restrict to hub or complete")

    sim = sub.add_parser("simulate", parents=[common, spec], help="consensus trajectories")
    sim.add_argument("--steps", type=int, default=100)
    sim.add_argument("--x0", default="impulse", choices=["impulse", "random"])
    sim.add_argument("--scheme", default="both", choices=["both", "optimal", "mh"])
    sim.add_argument("--window", type=int, default=50)
    sim.add_argument("--graph-file", help="exported graph JSON (custom weights run)")
    sim.add_argument("--weights-file", help="weights JSON with classes or per_edge")

    sub.add_parser("audit", parents=[common, spec], help="closed-form equations vs numeric SLEM")

    v = sub.add_parser("verify", parents=[common, spec], help="dual certificate and search oracle")
    v.add_argument("--perturb", action="append", help="wN=+delta, repeatable")
    v.add_argument("--budget", type=int, default=400, help="Nelder-Mead iterations per start")
    v.add_argument("--restarts", type=int, default=8)
    v.add_argument("--oracle-tol", type=float, default=ORACLE_TOL)
    return p


COMMANDS = {"build": cmd_build, "weights": cmd_weights, "slem": cmd_slem, "tables": cmd_tables,
            "simulate": cmd_simulate, "audit": cmd_audit, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate" and args.scheme == "mh":
        args.scheme = "metropolis-hastings"
    try:
        return COMMANDS[args.command](args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except SpecError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
