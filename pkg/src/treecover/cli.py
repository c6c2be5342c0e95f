"""Command line front end: generators, mass assignments, pipeline runs and verification.

Exit codes: 0 when every check passes, 1 when a verification fails, 2 when
an input cannot be parsed or a precondition does not hold.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import io
from .covering import (
    CoverWitness,
    run_pipeline,
    verify_cover,
)
from .errors import (
    AnchorConflict,
    ConditionFailure,
    DichotomyViolation,
    InsufficientInvariance,
    TreeCoverError,
)
from .generators import caterpillar_graph, path_graph, random_tree, star_graph
from .graph import Graph, as_rational
from .mass import (
    FiniteAction,
    MassAssignment,
    component_uniform_lambda,
    folner_lambda,
    invariance_defect,
    point_mass_lambda,
    power_words,
    schreier_graph,
    uniform_ball_lambda,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# graphs above this size may be verified on a seeded sample of balls
SAMPLING_THRESHOLD = 50_000


class UsageError(Exception):
    pass


def _frac(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit(obj, out):
    text = io.dumps(obj)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        io.write_text(out, text)


def _load_graph(path) -> Graph:
    return Graph.from_json(io.read_json(path))


def _load_words(path):
    words = io.read_json(path)
    if not isinstance(words, list) or not all(isinstance(w, list) for w in words):
        raise UsageError(f"{path}: expected a list of words (lists of generator indices)")
    return words


def _sampling(args, n):
    """Validate the sampling options against the graph size."""
    if args.sample is None:
        return None, None
    if n <= SAMPLING_THRESHOLD:
        raise UsageError(
            f"sampled verification is only allowed above {SAMPLING_THRESHOLD} vertices"
        )
    if args.seed is None:
        raise UsageError("--sample requires --seed")
    return args.sample, args.seed


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "path":
        g = path_graph(args.n)
    elif kind == "tree":
        g = random_tree(args.n, args.max_degree, args.seed)
    elif kind == "caterpillar":
        g = caterpillar_graph(args.spine, args.legs)
    elif kind == "star":
        g = star_graph(args.leaves)
    else:
        action = FiniteAction.from_json(io.read_json(args.action))
        g = schreier_graph(action, args.gens)
    _emit(g.to_json(), args.out)
    if args.dot:
        io.write_text(args.dot, g.to_dot())
    return EXIT_OK


def cmd_lambda(args) -> int:
    if args.kind == "folner":
        action = FiniteAction.from_json(io.read_json(args.action))
        if args.words:
            words = _load_words(args.words)
        else:
            gen, count = args.window
            words = power_words(gen, count)
        lam = folner_lambda(action, words)
        g = schreier_graph(action)
    else:
        g = _load_graph(args.graph)
        if args.kind == "uniform-ball":
            lam = uniform_ball_lambda(g, args.n)
        elif args.kind == "component":
            lam = component_uniform_lambda(g)
        else:
            lam = point_mass_lambda(g.n)
    _emit(lam.to_json(), args.out)
    if args.defect is not None:
        eps = invariance_defect(g, lam, as_rational(args.defect))
        print(f"defect(r<{args.defect}) = {_frac(eps)}", file=sys.stderr)
    return EXIT_OK


def _lambda_for_run(args, g: Graph):
    if args.uniform_ball is not None:
        return uniform_ball_lambda(g, args.uniform_ball), {"uniform_ball": args.uniform_ball}
    if args.lambda_file is not None:
        return MassAssignment.from_json(io.read_json(args.lambda_file), n=g.n), {
            "file": str(args.lambda_file)}
    action = FiniteAction.from_json(io.read_json(args.action))
    if action.points != g.n:
        raise UsageError("action and graph disagree on the number of points")
    return folner_lambda(action, _load_words(args.folner)), {"folner": str(args.folner)}


def _clause_lines(report: dict):
    rows = []
    for key in ("invariance", "conditions", "deletion", "separation", "inner_cover", "cover"):
        part = report.get(key)
        if part is None:
            continue
        if key == "conditions":
            for c in ("C1", "C2", "C3", "C4", "C5"):
                rows.append((f"condition {c}", part[c]["ok"]))
        elif key == "deletion":
            for c in ("component_bound", "separation", "leaf_distance", "inside_long_components"):
                rows.append((f"deletion {c}", part[c]["ok"]))
        else:
            rows.append((key.replace("_", " "), part["ok"]))
    return rows


def _print_table(report: dict, stream=sys.stdout):
    for name, ok in _clause_lines(report):
        print(f"{name:<36} {'PASS' if ok else 'FAIL'}", file=stream)
    if "cover" in report:
        c = report["cover"]
        print(
            f"{'max classes met':<36} {c['observed_max_classes_met']}"
            f" (bound {c['claimed_max_classes_met']})",
            file=stream,
        )
        print(
            f"{'max class diameter':<36} {c['observed_max_diameter']}"
            f" (bound {c['diameter_bound']})",
            file=stream,
        )
    if "error" in report:
        print(f"{'error':<36} {report['error']['type']}: {report['error']['message']}",
              file=stream)
    print(f"{'overall':<36} {'PASS' if report.get('ok') else 'FAIL'}", file=stream)


def cmd_run(args) -> int:
    g = _load_graph(args.graph)
    r = as_rational(args.r)
    if r <= 0:
        raise UsageError("--r must be positive")
    sample, seed = _sampling(args, g.n)
    out = Path(args.out)
    report = {
        "graph": {"vertices": g.n, "edges": len(g.edges), "components": g.n_components},
        "r": _frac(r),
    }
    try:
        lam, source = _lambda_for_run(args, g)
        report["lambda"] = source
        res = run_pipeline(g, lam, r)
    except InsufficientInvariance as exc:
        report["invariance"] = {
            "ok": False, "measured": _frac(exc.measured), "required_below": _frac(exc.required),
            "strict_radius": exc.radius,
        }
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["ok"] = False
        io.write_json(out / "report.json", report)
        _print_table(report, sys.stderr)
        return EXIT_USAGE
    except (ConditionFailure, DichotomyViolation, AnchorConflict) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConditionFailure):
            report["conditions"] = exc.report
        report["ok"] = False
        io.write_json(out / "report.json", report)
        _print_table(report, sys.stderr)
        return EXIT_FAIL

    g0 = g.without_edges(res.deletion.Q)
    inner = verify_cover(g0, res.inner_cover, max_classes=2)
    cover = verify_cover(g, res.witness, max_classes=4, sample=sample, seed=seed)
    report["invariance"] = {
        "ok": True, "measured": _frac(res.defect), "required_below": "1/12",
        "strict_radius": res.defect_radius,
    }
    report["conditions"] = res.conditions
    report["deletion"] = res.deletion_report
    report["separation"] = res.separation
    report["inner_cover"] = inner
    report["cover"] = cover
    report["ok"] = bool(
        res.conditions["ok"] and res.deletion_report["ok"] and res.separation["ok"]
        and inner["ok"] and cover["ok"]
    )
    io.write_json(out / "theta.json", res.theta.to_json())
    io.write_json(out / "partition.json", res.partition.to_json())
    io.write_text(out / "partition.dot", res.partition.to_dot())
    io.write_json(out / "deletion.json", res.deletion.to_json())
    io.write_json(out / "witness.json", res.witness.to_json())
    io.write_json(out / "report.json", report)
    _print_table(report)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    witness = CoverWitness.from_json(io.read_json(args.witness), g)
    sample, seed = _sampling(args, g.n)
    report = verify_cover(g, witness, max_classes=args.max_classes, sample=sample, seed=seed)
    _emit(report, args.out)
    c = report
    print(
        f"balls checked {c['balls_checked']} ({c['mode']}); "
        f"max classes met {c['observed_max_classes_met']} / claimed {c['claimed_max_classes_met']}; "
        f"max diameter {c['observed_max_diameter']} / bound {c['diameter_bound']}",
        file=sys.stderr,
    )
    for v in report["ball_violations"]:
        print(f"ball violation at vertex {v['vertex']}: {v['classes']} classes", file=sys.stderr)
    for v in report["diameter_violations"]:
        print(f"class {v['block']} (contains {v['first_vertex']}) exceeds the diameter bound",
              file=sys.stderr)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_report(args) -> int:
    path = Path(args.path)
    if path.is_dir():
        path = path / "report.json"
    report = io.read_json(path)
    if not isinstance(report, dict) or "ok" not in report:
        raise UsageError(f"{path} is not a run report")
    if args.json:
        sys.stdout.write(io.dumps(report))
    else:
        _print_table(report)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treecover", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph")
    gsub = gen.add_subparsers(dest="kind", required=True)
    for name in ("path", "tree", "caterpillar", "star", "schreier"):
        sp = gsub.add_parser(name)
        sp.add_argument("-o", "--out", help="graph JSON path (default: stdout)")
        sp.add_argument("--dot", help="also write a DOT file here")
        if name in ("path", "tree"):
            sp.add_argument("--n", type=int, required=True, help="vertex count")
        if name == "tree":
            sp.add_argument("--max-degree", type=int, required=True)
            sp.add_argument("--seed", type=int, required=True)
        if name == "caterpillar":
            sp.add_argument("--spine", type=int, required=True)
            sp.add_argument("--legs", type=int, default=1)
        if name == "star":
            sp.add_argument("--leaves", type=int, required=True)
        if name == "schreier":
            sp.add_argument("--action", required=True, help="action JSON")
            sp.add_argument("--gens", type=int, nargs="+", help="generator indices (default: all)")
    gen.set_defaults(func=cmd_gen)

    lam = sub.add_parser("lambda", help="build a mass assignment")
    lsub = lam.add_subparsers(dest="kind", required=True)
    for name in ("uniform-ball", "component", "point", "folner"):
        sp = lsub.add_parser(name)
        sp.add_argument("-o", "--out", help="lambda JSON path (default: stdout)")
        sp.add_argument("--defect", help="also print the invariance defect below this radius")
        if name == "folner":
            sp.add_argument("--action", required=True)
            src = sp.add_mutually_exclusive_group(required=True)
            src.add_argument("--words", help="JSON list of words; letter ~i inverts generator i")
            src.add_argument("--window", type=int, nargs=2, metavar=("GEN", "COUNT"),
                             help="words g^0 .. g^(COUNT-1) of one generator")
        else:
            sp.add_argument("--graph", required=True)
        if name == "uniform-ball":
            sp.add_argument("--n", type=int, required=True, help="ball radius")
    lam.set_defaults(func=cmd_lambda)

    run = sub.add_parser("run", help="build and verify a cover witness")
    run.add_argument("--graph", required=True)
    run.add_argument("--r", required=True, help="radius, e.g. 2 or 5/2")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--uniform-ball", type=int, metavar="N")
    src.add_argument("--lambda", dest="lambda_file", metavar="FILE")
    src.add_argument("--folner", metavar="WORDS", help="Folner words JSON (needs --action)")
    run.add_argument("--action", help="action JSON for --folner")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--sample", type=int, help="balls to check (large graphs only)")
    run.add_argument("--seed", type=int)
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="re-check a cover witness")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--witness", required=True)
    ver.add_argument("--max-classes", type=int, help="also require at most this many classes per ball")
    ver.add_argument("--sample", type=int)
    ver.add_argument("--seed", type=int)
    ver.add_argument("-o", "--out", help="report JSON path (default: stdout)")
    ver.set_defaults(func=cmd_verify)

    rep = sub.add_parser("report", help="print a run report")
    rep.add_argument("path", help="run directory or report JSON")
    rep.add_argument("--json", action="store_true", help="print the raw JSON")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and args.folner and not args.action:
        parser.error("--folner needs --action")
    try:
        return args.func(args)
    except (UsageError, TreeCoverError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"treecover: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
