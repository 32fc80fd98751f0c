"""Command-line entry point: ``rcdmap <subcommand> ...``.

Results go to stdout (or the files named by ``--output``-style flags);
failures print ``{"error": ..., "type": ...}`` on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, centrality
from .community import ALGORITHMS, DetectorConfig, detect
from .experiment import read_spec, replay, run_experiment, with_output
from .graph import Graph, format_edge_list, graph_stats, largest_connected_component, read_edge_list, write_edge_list
from .lfr import LfrConfig, generate_lfr
from .perturb import DEFAULT_EPSILON, PerturbConfig, perturb_erp
from .selection import PenaltyConfig, rcd_map
from .sir import DEFAULT_GAMMA, DEFAULT_RUNS, SirConfig, default_beta, simulate_sir
from .stats import blocked_from_long, fisher_lsd, rcbd_anova

log = logging.getLogger("rcdmap")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument errors are reported as JSON like every other failure."""

    def error(self, message):
        sys.stderr.write(json.dumps({"error": message, "type": "UsageError",
                                     "usage": self.format_usage().strip()}) + "\n")
        sys.exit(2)


def _load(path: str, lcc: bool = True) -> Graph:
    g = read_edge_list(path)
    return largest_connected_component(g) if lcc else g


def _label(g: Graph, v: int):
    return int(g.labels[v]) if g.labels is not None else int(v)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(str(x) for x in row) + "\n")
    return buf.getvalue()


def _emit(text: str, path: str | None = None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# subcommands --------------------------------------------------------------

def cmd_stats(args):
    g = _load(args.input)
    _emit(_json(graph_stats(g).to_dict()))


def cmd_rank(args):
    g = _load(args.input)
    sv = centrality.score(args.method, g)
    order = sv.ranking()[: args.top] if args.top else sv.ranking()
    if args.format == "json":
        _emit(_json([{"node": _label(g, v), "score": float(sv.scores[v]), "rank": r + 1}
                     for r, v in enumerate(order)]))
    else:
        _emit(_csv(["node", "score", "rank"],
                   [(_label(g, v), repr(float(sv.scores[v])), r + 1) for r, v in enumerate(order)]))


def cmd_communities(args):
    g = _load(args.input)
    cover = detect(g, DetectorConfig(args.algorithm, seed=args.seed, k=args.k,
                                     num_communities=args.num_communities))
    labels = [_label(g, v) for v in range(g.n)]
    _emit(_json(cover.to_dict(labels)))


def cmd_perturb(args):
    g = _load(args.input, lcc=False)
    h = perturb_erp(g, PerturbConfig(args.epsilon, args.seed))
    if args.output:
        write_edge_list(h, args.output)
    else:
        sys.stdout.write(format_edge_list(h))


def cmd_rcdmap(args):
    g = _load(args.input)
    cfg = PenaltyConfig(
        base_method=args.method,
        detector=DetectorConfig(args.detector, k=args.k),
        alpha=args.alpha,
        M=args.rounds,
        epsilon=args.epsilon,
        seed=args.seed if args.seed is not None else 0,
        aggregate=args.aggregate,
        bind=args.bind,
    )
    res = rcd_map(g, cfg, workers=args.threads)
    order = res.order[: args.top] if args.top else res.order
    rows = [(r + 1, _label(g, v), repr(float(res.final_scores[v]))) for r, v in enumerate(order)]
    if args.format == "json":
        _emit(_json([{"rank": r, "node": n, "avg_score": float(s)} for r, n, s in rows]))
    else:
        _emit(_csv(["rank", "node", "avg_score"], rows))
    if args.sidecar:
        sidecar = {
            "config": {"method": args.method, "detector": args.detector, "epsilon": args.epsilon,
                       "rounds": args.rounds, "seed": cfg.seed, "aggregate": args.aggregate},
            "rounds": [[_label(g, v) for v in r] for r in res.rounds],
        }
        Path(args.sidecar).write_text(_json(sidecar), encoding="utf-8")


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"--seeds expects comma-separated integers, got {text!r}") from exc


def cmd_sir(args):
    g = _load(args.input)
    if g.labels is not None:
        lookup = {int(lab): i for i, lab in enumerate(g.labels)}
        try:
            seeds = [lookup[s] for s in _parse_seeds(args.seeds)]
        except KeyError as exc:
            raise UsageError(f"seed node {exc.args[0]} is not in the graph's largest component") from exc
    else:
        seeds = _parse_seeds(args.seeds)
    beta = args.beta if args.beta is not None else default_beta(g)
    rng_seed = args.rng_seed if args.rng_seed is not None else (args.seed or 0)
    out = simulate_sir(g, SirConfig(seeds, beta, args.gamma, args.runs, rng_seed=rng_seed))
    if args.timeseries:
        Path(args.timeseries).write_text(out.timeseries_csv(), encoding="utf-8")
    if args.format == "csv":
        _emit(out.timeseries_csv())
    else:
        d = out.to_dict()
        d.update(beta=beta, gamma=args.gamma, seeds=[_label(g, v) for v in seeds])
        _emit(_json(d))


def cmd_lfr(args):
    cfg = LfrConfig(n=args.n, tau1=args.tau1, tau2=args.tau2, mu=args.mu, avg_degree=args.avg_degree,
                    max_degree=args.max_degree, min_community=args.min_community,
                    max_community=args.max_community, seed=args.seed)
    g, cover = generate_lfr(cfg)
    write_edge_list(g, args.out_graph, original_labels=False)
    d = cover.to_dict()
    d["mixing"] = cover.info["mixing"]
    Path(args.out_communities).write_text(_json(d), encoding="utf-8")
    _emit(_json({"n": g.n, "m": g.m, "communities": len(cover.communities), "mixing": d["mixing"]}))


def cmd_anova(args):
    with open(args.input, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [r for r in reader if r and not r[0].startswith("#")]
    if rows and rows[0][:3] == ["treatment", "block", "value"]:
        rows = rows[1:]
    if any(len(r) < 3 for r in rows):
        raise UsageError("expected rows of treatment,block,value")
    y, treats, _ = blocked_from_long((r[0], r[1], r[2]) for r in rows)
    table = rcbd_anova(y)
    lsd = fisher_lsd(y.mean(axis=1), table.ms_error, max(table.df_error, 1), y.shape[1],
                     alpha_level=args.alpha, names=treats)
    if args.format == "csv":
        _emit(lsd.display())
        return
    _emit(_json(table.to_dict()))
    _emit(lsd.display())


def cmd_experiment(args):
    if args.manifest:
        manifest = replay(args.manifest, args.output)
    else:
        spec = read_spec(args.config)
        if args.output:
            spec = with_output(spec, args.output)
        if args.threads > 1:
            spec = replace(spec, threads=args.threads)
        if args.seed is not None:
            spec = replace(spec, master_seed=args.seed)
        manifest = run_experiment(spec)
    _emit(_json({"partial": manifest["partial"], "files": manifest["files"], "failures": manifest["failures"]}))
    if manifest["partial"]:
        return 3


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def globals_parser(suppress: bool) -> argparse.ArgumentParser:
        # flags may go before or after the subcommand; the subcommand copy
        # must not reset values given before it
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        gp = argparse.ArgumentParser(add_help=False)
        gp.add_argument("--seed", type=int, default=d(None), help="master random seed")
        gp.add_argument("--threads", type=int, default=d(1), help="worker threads")
        gp.add_argument("--format", choices=("csv", "json"), default=d(None))
        gp.add_argument("-v", "--verbose", action="store_true", default=d(False))
        return gp

    common = globals_parser(True)
    p = _Parser(prog="rcdmap", description=__doc__.splitlines()[0],
                parents=[globals_parser(False)])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stats", parents=[common], help="size, degree and spectral statistics")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_stats, default_format="json")

    s = sub.add_parser("rank", parents=[common], help="score nodes with a base ranker")
    s.add_argument("--method", choices=centrality.METHODS, required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--top", type=int, default=0, help="rows to print (0 = all)")
    s.set_defaults(func=cmd_rank, default_format="csv")

    s = sub.add_parser("communities", parents=[common], help="detect communities")
    s.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--k", type=int, default=3, help="clique size for kclique")
    s.add_argument("--num-communities", type=int, default=None, help="BigCLAM C (default: held-out sweep)")
    s.set_defaults(func=cmd_communities, default_format="json")

    s = sub.add_parser("perturb", parents=[common], help="write one ERP replica")
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--input", required=True)
    s.add_argument("--output", default=None)
    s.set_defaults(func=cmd_perturb, default_format="csv")

    s = sub.add_parser("rcdmap", parents=[common], help="RCD-Map ranking")
    s.add_argument("--method", choices=centrality.METHODS, required=True)
    s.add_argument("--detector", choices=ALGORITHMS, default="infomap")
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--rounds", type=int, default=10)
    s.add_argument("--alpha", type=float, default=None, help="override the per-ranker penalty coefficient")
    s.add_argument("--k", type=int, default=3, help="clique size for kclique")
    s.add_argument("--aggregate", choices=("score", "rank"), default="score")
    s.add_argument("--bind", choices=("penalized", "selected"), default="penalized")
    s.add_argument("--input", required=True)
    s.add_argument("--top", type=int, default=0)
    s.add_argument("--sidecar", default=None, help="JSON file for per-round selections")
    s.set_defaults(func=cmd_rcdmap, default_format="csv")

    s = sub.add_parser("sir", parents=[common], help="SIR Monte Carlo from given seeds")
    s.add_argument("--input", required=True)
    s.add_argument("--seeds", required=True, help="comma-separated node ids")
    s.add_argument("--beta", type=float, default=None, help="default 1/spectral radius")
    s.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    s.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    s.add_argument("--rng-seed", type=int, default=None)
    s.add_argument("--timeseries", default=None, help="also write the t,s,i,r CSV here")
    s.set_defaults(func=cmd_sir, default_format="json")

    d = LfrConfig()
    s = sub.add_parser("lfr", parents=[common], help="generate an LFR benchmark graph")
    s.add_argument("--n", type=int, default=d.n)
    s.add_argument("--tau1", type=float, default=d.tau1)
    s.add_argument("--tau2", type=float, default=d.tau2)
    s.add_argument("--mu", type=float, default=d.mu)
    s.add_argument("--avg-degree", type=float, default=d.avg_degree)
    s.add_argument("--max-degree", type=int, default=d.max_degree)
    s.add_argument("--min-community", type=int, default=d.min_community)
    s.add_argument("--max-community", type=int, default=d.max_community)
    s.add_argument("--out-graph", required=True)
    s.add_argument("--out-communities", required=True)
    s.set_defaults(func=cmd_lfr, default_format="json")

    s = sub.add_parser("anova", parents=[common], help="RCBD ANOVA and Fisher LSD letters")
    s.add_argument("--input", required=True, help="CSV rows treatment,block,value")
    s.add_argument("--alpha", type=float, default=0.05)
    s.set_defaults(func=cmd_anova, default_format="json")

    s = sub.add_parser("experiment", parents=[common], help="run or replay an experiment grid")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--config", help="flat key = value experiment file")
    g.add_argument("--manifest", help="replay a previous run's manifest.json")
    s.add_argument("--output", default=None)
    s.set_defaults(func=cmd_experiment, default_format="json")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        code = args.func(args)
    except (ValueError, OSError, RuntimeError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
        return 2
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
