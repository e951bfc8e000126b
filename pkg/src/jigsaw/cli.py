"""Command-line entry point: ``jigsaw <subcommand> [options]``.

Exit codes: 0 success, 2 usage error, 3 input parse error, 4 runtime error.

With ``--out PATH`` results go to PATH and a run manifest to
``PATH.manifest.json``; ``jigsaw --manifest FILE [--out PATH] [--workers W]``
replays a manifest. Manifests leave out the worker count and output path,
which never change the bytes written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .bounds import bounds_table_row
from .exploration import run_three_stage
from .experiments import (BracketError, cluster_stats, cycle_puzzle_threshold,
                          estimate_critical_product, estimate_percolation_prob,
                          scaling_spread, scaling_study)
from .graph import EdgeListError, format_edge_list, read_edge_list
from .random_graphs import ERParams, SeedSpec, gen_double, gen_sprinkles
from .solver import solve_fast, solve_reference

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_RUNTIME = 0, 2, 3, 4
STOCHASTIC = {"sample", "threshold", "scale", "cycle", "explore", "dump-graph"}
UNRECORDED = {"workers", "out", "manifest", "verbose_log", "func"}


class UsageError(Exception):
    pass


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x]


def _float_list(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x]


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _er_params(args) -> ERParams:
    """Resolve --p1/--p2, --q (with optional --p1) or --c into ERParams."""
    n = args.n
    given = [args.q is not None, args.c is not None]
    if sum(given) > 1:
        raise UsageError("give at most one of --q and --c")
    if args.c is not None:
        if n < 3:
            raise UsageError("--c needs n >= 3")
        return ERParams.from_product(n, args.c / (n * math.log(n)), args.p1)
    if args.q is not None:
        return ERParams.from_product(n, args.q, args.p1)
    if args.p1 is None or args.p2 is None:
        raise UsageError("give --p1 and --p2, or --q, or --c")
    return ERParams(n, args.p1, args.p2)


# --- subcommands ----------------------------------------------------------

def cmd_solve(args) -> str:
    try:
        dg = read_edge_list(args.path)
    except OSError as exc:
        raise EdgeListError(str(exc)) from None
    res = solve_reference(dg) if args.reference else solve_fast(dg)
    if args.format == "csv":
        return _csv(["round", "clusters"], [[i, k] for i, k in enumerate(res.cluster_counts)])
    return _json(res.to_json())


def cmd_sample(args) -> str:
    params = _er_params(args)
    seed = SeedSpec(args.seed)
    if args.stats:
        st = cluster_stats(params, args.trials, seed, args.workers)
        if args.format == "csv":
            return st.to_csv()
        return _json({"params": params.to_json(), "seed": seed.to_json(), "trials": st.trials,
                      "largest": {str(k): v for k, v in sorted(st.largest.items())},
                      "rounds": {str(k): v for k, v in sorted(st.rounds.items())},
                      "summary": st.summary()})
    est = estimate_percolation_prob(params, args.trials, seed, args.workers)
    row = {"n": params.n, "p1": params.p1, "p2": params.p2, "q": params.q,
           "seed": args.seed, **est.to_json()}
    if args.format == "csv":
        return _csv(list(row), [list(row.values())])
    return _json(row)


def _threshold_out(est, fmt: str, seed: int) -> str:
    d = est.to_json()
    d["seed"] = seed
    if fmt == "csv":
        keys = ["n", "variable", "policy", "p1", "lo", "hi", "hat", "normalized",
                "trials_per_probe", "target", "seed"]
        return _csv(keys, [[d[k] for k in keys]])
    return _json(d)


def cmd_threshold(args) -> str:
    est = estimate_critical_product(args.n, args.policy, args.trials_per_probe, args.rel_tol,
                                    SeedSpec(args.seed), p1=args.p1, target=args.target,
                                    workers=args.workers)
    return _threshold_out(est, args.format, args.seed)


def cmd_scale(args) -> str:
    rows = scaling_study(args.ns, args.trials_per_probe, args.rel_tol, SeedSpec(args.seed),
                         args.workers, args.policy, args.p1)
    if args.format == "csv":
        return _csv(["n", "q_hat", "normalized", "lo", "hi"],
                    [[r.n, r.q_hat, r.normalized, r.lo, r.hi] for r in rows])
    return _json({"seed": args.seed, "rows": [r.to_json() for r in rows],
                  "spread": scaling_spread(rows)})


def cmd_cycle(args) -> str:
    est = cycle_puzzle_threshold(args.n, args.trials_per_probe, SeedSpec(args.seed),
                                 args.rel_tol, args.target, args.workers)
    return _threshold_out(est, args.format, args.seed)


def cmd_bounds(args) -> str:
    points = []
    for n in args.n:
        if n < 3:
            raise UsageError("bounds need n >= 3")
        if args.c:
            ps = [math.sqrt(c / (n * math.log(n))) for c in args.c]
            points += [(n, p, p) for p in ps]
        else:
            if not args.p1 or not args.p2:
                raise UsageError("give --p1 and --p2 lists, or --c")
            points += [(n, a, b) for a in args.p1 for b in args.p2]
    rows = [bounds_table_row(*pt) for pt in points]
    if args.format == "csv":
        keys = list(rows[0])
        return _csv(keys, [[r[k] for k in keys] for r in rows])
    return _json(rows)


def cmd_explore(args) -> str:
    params = _er_params(args)
    cert = run_three_stage(params, SeedSpec(args.seed))
    d = cert.to_json(verbose=args.trace == "full")
    if args.trace == "summary":
        d["stage1"].pop("rounds")
    if args.format == "csv":
        keys = ["n", "p1", "p2", "c", "success", "failed_stage", "stage1_rounds",
                "stage1_queries", "stage2_size", "union_percolates"]
        row = [params.n, params.p1, params.p2, cert.regime.c if cert.regime else "",
               cert.success, cert.failed_stage, len(cert.stage1.state.rounds),
               cert.stage1.ledger.queries,
               len(cert.stage2.vertices) if cert.stage2 and cert.stage2.success else "",
               cert.union_percolates]
        return _csv(keys, [row])
    return _json(d)


def cmd_dump_graph(args) -> str:
    params = _er_params(args)
    seed = SeedSpec(args.seed)
    if args.sprinkle:
        dg = gen_sprinkles(params, seed).parts[args.sprinkle - 1]
    else:
        dg = gen_double(params, seed)
    return format_edge_list(dg)


# --- parser ---------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, help="master seed (required for stochastic commands)")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", help="output file; a manifest is written next to it")
    p.add_argument("-v", dest="verbose_log", action="store_true", help="log progress")
    return p


def _graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--q", type=float, help="product p1*p2 (symmetric unless --p1)")
    p.add_argument("--c", type=float, help="implied constant: q = c/(n ln n)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="jigsaw", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--manifest", help="replay a run manifest")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("solve", parents=[common], help="solve an edge-list file")
    p.add_argument("path")
    p.add_argument("--reference", action="store_true", help="use the literal reference solver")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sample", parents=[common], help="estimate P(percolates)")
    _graph_args(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--stats", action="store_true", help="histograms of largest cluster and rounds")
    p.set_defaults(func=cmd_sample)

    for name, func, doc in (("threshold", cmd_threshold, "bisect for the critical product"),
                            ("scale", cmd_scale, "critical product across several n")):
        p = sub.add_parser(name, parents=[common], help=doc)
        if name == "threshold":
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--target", type=float, default=0.5)
        else:
            p.add_argument("--ns", type=_int_list, required=True, help="comma-separated n values")
        p.add_argument("--policy", choices=("symmetric", "fixed"), default="symmetric")
        p.add_argument("--p1", type=float, help="fixed p1 for --policy fixed")
        p.add_argument("--trials-per-probe", type=int, default=400)
        p.add_argument("--rel-tol", type=float, default=0.05)
        p.set_defaults(func=func)

    p = sub.add_parser("cycle", parents=[common], help="threshold with the n-cycle as puzzle graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials-per-probe", type=int, default=200)
    p.add_argument("--rel-tol", type=float, default=0.05)
    p.add_argument("--target", type=float, default=0.5)
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("bounds", parents=[common], help="evaluate the analytic bounds on a grid")
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--p1", type=_float_list)
    p.add_argument("--p2", type=_float_list)
    p.add_argument("--c", type=_float_list, help="symmetric points with q = c/(n ln n)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("explore", parents=[common], help="run the three-stage exploration")
    _graph_args(p)
    p.add_argument("--trace", choices=("summary", "rounds", "full"), default="rounds")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("dump-graph", parents=[common], help="write a sampled double graph")
    _graph_args(p)
    p.add_argument("--sprinkle", type=int, choices=(1, 2, 3),
                   help="dump one sprinkle of the three-way split instead")
    p.set_defaults(func=cmd_dump_graph)
    return parser


def manifest_for(args) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in UNRECORDED}
    return {"tool": "jigsaw", "version": __version__, "command": args.command, "config": config}


def _emit(text: str, args, manifest: dict | None) -> None:
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        if manifest is not None:
            Path(str(out) + ".manifest.json").write_text(_json(manifest))
    else:
        sys.stdout.write(text)


def _from_manifest(path: str, args) -> argparse.Namespace:
    try:
        data = json.loads(Path(path).read_text())
        config = data["config"]
        command = data["command"]
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"unreadable manifest {path}: {exc}") from None
    replay = build_parser().parse_args([command] + (["--seed", "0"] if command in STOCHASTIC else [])
                                       + _required_stub(command))
    for k, v in config.items():
        setattr(replay, k, v)
    replay.workers = args.workers
    replay.out = args.out
    replay.verbose_log = args.verbose_log
    return replay


def _required_stub(command: str) -> list[str]:
    """Minimal argv satisfying required options; real values come from the manifest."""
    return {"solve": ["x"], "sample": ["--n", "1", "--trials", "1"], "threshold": ["--n", "1"],
            "scale": ["--ns", "1"], "cycle": ["--n", "1"], "bounds": ["--n", "3"],
            "explore": ["--n", "1"], "dump-graph": ["--n", "1"]}[command]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.manifest:
            args = _from_manifest(args.manifest, args)
        if not args.command:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose_log else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command in STOCHASTIC and args.seed is None:
            raise UsageError(f"'{args.command}' is stochastic and needs --seed")
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        text = args.func(args)
        _emit(text, args, manifest_for(args))
        return EXIT_OK
    except UsageError as exc:
        print(f"jigsaw: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EdgeListError as exc:
        print(f"jigsaw: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (BracketError, ValueError, RuntimeError) as exc:
        print(f"jigsaw: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
