"""Command-line front end.

Usage:
    cdbound gen        --family hypercube --size 3 [--measure degree]
    cdbound curvature  --family path --size 3 --n 2
    cdbound resistance --edges g.txt --source a --target b
    cdbound diameter   --family cycle --size 6
    cdbound heat       --family hypercube --size 3 --n inf --times 0:5:0.5
    cdbound verify     --family complete --size 5 --n inf
    cdbound sweep      --family path --size 2 --n 1.5,2,4,inf

Exit status: 0 success, 1 invalid input, 2 solver failure, 3 bound requested
but the computed curvature is nonpositive, 4 a bound check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .bounds import INAPPLICABLE, SOLVER_INCOMPLETE, best_dimension_sweep, verify_graph
from .curvature import CurvatureError, curvature
from .generators import FAMILIES, generate_family
from .graph import GraphError, combinatorial_distances, degree_ratio
from .heat import decay_table, spectral_decompose
from .io import graph_to_document, load_graph, load_measure
from .resistance import DEFAULT_TOL, ResistanceSolverError, resistance_diameter, resistance_distance

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_INAPPLICABLE, EXIT_FAILED = 0, 1, 2, 3, 4
COMMANDS = ("gen", "curvature", "resistance", "diameter", "heat", "verify", "sweep")


class UsageError(Exception):
    pass


def parse_dimension(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    try:
        n = float(text)
    except ValueError:
        raise UsageError(f"invalid dimension {text!r}") from None
    if not n > 0:
        raise UsageError(f"dimension must be positive, got {text!r}")
    return n


def parse_grid(text: str) -> list[float]:
    return [parse_dimension(p) for p in text.split(",") if p.strip()]


def parse_times(text: str) -> list[float]:
    """``a:b:h`` for an inclusive range, otherwise a comma list."""
    if ":" in text:
        try:
            a, b, h = (float(v) for v in text.split(":"))
        except ValueError:
            raise UsageError(f"invalid time range {text!r}") from None
        if h <= 0 or b < a:
            raise UsageError(f"invalid time range {text!r}")
        count = int(round((b - a) / h)) + 1
        return [round(a + i * h, 12) for i in range(count)]
    return sorted(float(v) for v in text.split(",") if v.strip())


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdbound", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--edges", metavar="PATH", help="graph document (.json) or edge-list text")
        src.add_argument("--family", choices=FAMILIES)
        p.add_argument("--size", type=int)
        p.add_argument("--p", type=float, dest="prob", metavar="PROB")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--measure", default=None, help="unit | degree | PATH to JSON {vertex: m}")
        p.add_argument("--n", default="inf", help="dimension: VALUE, inf, or comma grid for sweep")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--solver-tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        p.add_argument("--graph-id", default=None)
        if name == "resistance":
            p.add_argument("--source", required=True)
            p.add_argument("--target", required=True)
        if name == "heat":
            p.add_argument("--times", default="0:10:0.5")
        if name == "verify":
            p.add_argument("--k-override", type=float, default=None)
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("workers", "out")}
    return {k: _jsonable(v) for k, v in sorted(cfg.items())}


def _graph(args):
    measure = args.measure
    if measure not in (None, "unit", "degree"):
        measure = load_measure(measure)
    if args.edges:
        return load_graph(args.edges, measure=measure), args.graph_id or os.path.basename(args.edges)
    if args.size is None:
        raise UsageError("--family needs --size")
    if isinstance(measure, dict):
        G = generate_family(args.family, args.size, "unit", p=args.prob, seed=args.seed)
        G = load_graph(graph_to_document(G), measure=measure)
    else:
        G = generate_family(args.family, args.size, measure or "unit", p=args.prob, seed=args.seed)
    return G, args.graph_id or f"{args.family}-{args.size}"


def _csv_text(rows, config: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# cdbound {__version__}\n# config: {json.dumps(config, sort_keys=True)}\n")
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _run_command(args, G, gid):
    """Returns ``(result dict, csv rows, exit status)``."""
    cmd = args.command
    names = G.vertices

    if cmd == "gen":
        doc = graph_to_document(G)
        rows = [["u", "v", "w"]] + [[u, v, repr(w)] for u, v, w in doc["edges"]]
        return doc, rows, EXIT_OK

    if cmd == "curvature":
        res = curvature(G, parse_dimension(args.n), args.workers)
        rows = [["vertex", "K"]] + [[v, _jsonable(float(k))] for v, k in zip(names, res.per_vertex)]
        return res.to_dict(), rows, EXIT_OK

    if cmd == "resistance":
        sol = resistance_distance(G, args.source, args.target, args.solver_tol)
        d = sol.to_dict(G)
        rows = [["source", "target", "rho", "kkt_residual"], [d["source"], d["target"], repr(sol.rho), repr(sol.kkt_residual)]]
        return d, rows, EXIT_OK

    if cmd == "diameter":
        dist = combinatorial_distances(G)
        rd = resistance_diameter(G, args.solver_tol, args.workers)
        pairs = [
            {"x": names[x], "y": names[y], "d": dist(x, y), "rho": s.rho}
            for (x, y), s in sorted(rd.solutions.items())
        ]
        result = {
            "vertices": list(names),
            "diam_d": dist.diameter,
            "diam_rho": rd.value,
            "rho_witness": [names[rd.pair[0]], names[rd.pair[1]]],
            "heuristic_pairs": rd.heuristic,
            "Deg_max": degree_ratio(G).maximum,
            "pairs": pairs,
        }
        rows = [["x", "y", "d", "rho"]] + [[p["x"], p["y"], p["d"], repr(p["rho"])] for p in pairs]
        return result, rows, EXIT_OK

    if cmd == "heat":
        n = parse_dimension(args.n)
        K = curvature(G, n, args.workers).global_k
        rng = np.random.default_rng(args.seed)
        f = rng.standard_normal(len(G))
        table = decay_table(G, spectral_decompose(G), f, parse_times(args.times), K)
        result = {
            "vertices": list(names),
            "n": _jsonable(n),
            "K": _jsonable(K),
            "field": {v: float(x) for v, x in zip(names, f)},
            "series": [{"t": t, "sup_gamma": s, "bound_e2kt": b} for t, s, b in table],
        }
        rows = [["t", "sup_gamma", "bound_e2kt"]] + [[repr(t), repr(s), repr(b)] for t, s, b in table]
        return result, rows, EXIT_OK

    if cmd == "verify":
        rep = verify_graph(
            G, parse_dimension(args.n), args.tol, args.solver_tol,
            K_override=args.k_override, graph_id=gid, workers=args.workers,
        )
        if rep.status == SOLVER_INCOMPLETE:
            status = EXIT_SOLVER
        elif rep.status == INAPPLICABLE:
            status = EXIT_INAPPLICABLE
        else:
            status = EXIT_OK if rep.passed else EXIT_FAILED
        return rep.to_dict(), rep.csv_rows(), status

    if cmd == "sweep":
        sw = best_dimension_sweep(G, parse_grid(args.n), args.tol, args.solver_tol, gid, args.workers)
        d = sw.to_dict()
        d["vertices"] = list(names)
        rows = [["n", "globalK", "status", "corollary_rhs", "diam_d"]] + [
            [e["n"], e["globalK"], e["status"], e["corollary_rhs"], e["diam_d"]] for e in d["entries"]
        ]
        if not sw.applicable:
            status = EXIT_INAPPLICABLE
        elif all(r.passed for r in sw.applicable):
            status = EXIT_OK
        else:
            status = EXIT_FAILED
        return d, rows, status

    raise UsageError(f"unknown command {cmd!r}")


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config(args)
    try:
        if not args.tol > 0 or not args.solver_tol > 0:
            raise UsageError("tolerances must be positive")
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        G, gid = _graph(args)
        result, rows, status = _run_command(args, G, gid)
    except (GraphError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ResistanceSolverError, CurvatureError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    if args.format == "csv":
        text = _csv_text(rows, config)
    else:
        doc = {
            "tool": "cdbound",
            "version": __version__,
            "command": args.command,
            "config": config,
            "seed": args.seed,
            "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "result": result,
        }
        text = json.dumps(doc, indent=2) + "\n"

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_INAPPLICABLE:
        print("bound inapplicable: computed curvature is nonpositive", file=sys.stderr)
    elif status == EXIT_FAILED:
        print("bound check FAILED", file=sys.stderr)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
