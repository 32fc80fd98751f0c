"""Grid runs of base rankers and RCD-Map over detectors, scored by SIR.

An experiment is described by a flat ``key = value`` file::

    # karate, all rankers, three detectors
    dataset = karate
    rankers = degree, closeness, betweenness, kshell, pagerank
    detectors = infomap, lpa, gn
    seed_counts = 1-10
    summary_seed_count = 5
    rounds = 10
    epsilon = 0.05
    sir.runs = 1000
    output = results/karate
    master_seed = 0

Keys starting with ``lfr.`` (``lfr.n``, ``lfr.mu`` ...) configure a synthetic
graph when ``dataset = lfr``. ``planted`` is accepted as a detector for
datasets that carry ground truth (karate, lfr).
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import centrality
from .community import ALGORITHMS, DISPLAY_NAMES, Cover, DetectorConfig
from .datasets import karate_planted_cover, load
from .graph import Graph, spectral_radius
from .lfr import LfrConfig, generate_lfr
from .selection import PenaltyConfig, rcd_map
from .sir import DEFAULT_GAMMA, DEFAULT_MAX_STEPS, DEFAULT_RUNS, SirConfig, simulate_sir
from .stats import fisher_lsd, rcbd_anova

log = logging.getLogger(__name__)

BASE = "base"
PLANTED = "planted"

# stage offsets mixed into the master seed
_STAGE_PIPELINE = 1
_STAGE_SIR = 2
_STAGE_LFR = 3


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    dataset: str = "karate"
    rankers: tuple = centrality.METHODS
    detectors: tuple = ("infomap",)
    epsilon: float = 0.05
    rounds: int = 10
    seed_counts: tuple = (5,)
    summary_seed_count: int | None = None
    sir_beta: float | None = None
    sir_gamma: float = DEFAULT_GAMMA
    sir_runs: int = DEFAULT_RUNS
    sir_max_steps: int = DEFAULT_MAX_STEPS
    output: str = "results"
    master_seed: int = 0
    threads: int = 1
    lfr: dict = field(default_factory=dict)

    def __post_init__(self):
        bad = [r for r in self.rankers if r not in centrality.METHODS]
        if bad:
            raise SpecError(f"unknown ranker(s) {bad}; choose from {', '.join(centrality.METHODS)}")
        bad = [d for d in self.detectors if d not in ALGORITHMS + (PLANTED,)]
        if bad:
            raise SpecError(f"unknown detector(s) {bad}; choose from {', '.join(ALGORITHMS + (PLANTED,))}")
        if PLANTED in self.detectors and self.dataset not in ("karate", "lfr"):
            raise SpecError("'planted' needs a dataset with ground truth (karate or lfr)")
        if not self.rankers:
            raise SpecError("at least one ranker is required")
        if not self.seed_counts or min(self.seed_counts) < 1:
            raise SpecError("seed_counts must be positive integers")
        if self.summary_seed_count is not None and self.summary_seed_count not in self.seed_counts:
            raise SpecError("summary_seed_count must be one of seed_counts")
        if self.rounds < 1:
            raise SpecError("rounds must be >= 1")
        if self.threads < 1:
            raise SpecError("threads must be >= 1")
        unknown = set(self.lfr) - {f.name for f in fields(LfrConfig)}
        if unknown:
            raise SpecError(f"unknown lfr keys {sorted(unknown)}")

    @property
    def summary_k(self) -> int:
        return self.summary_seed_count if self.summary_seed_count is not None else self.seed_counts[0]

    def algorithms(self) -> tuple:
        return (BASE,) + tuple(self.detectors)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rankers"] = list(self.rankers)
        d["detectors"] = list(self.detectors)
        d["seed_counts"] = list(self.seed_counts)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        for key in ("rankers", "detectors", "seed_counts"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


# config parsing -----------------------------------------------------------

_INT_KEYS = {"rounds", "summary_seed_count", "master_seed", "threads"}
_FLOAT_KEYS = {"epsilon"}
_SIR_KEYS = {"beta": float, "gamma": float, "runs": int, "max_steps": int}


def _int_list(text: str) -> tuple:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _name_list(text: str) -> tuple:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _lfr_value(key: str, text: str):
    kind = {f.name: f.type for f in fields(LfrConfig)}.get(key)
    if kind is None:
        raise SpecError(f"unknown lfr key {key!r}")
    if text.lower() == "none":
        return None
    return float(text) if str(kind).startswith("float") else int(text)


def parse_spec(text: str) -> ExperimentSpec:
    """Parse the flat ``key = value`` format; ``#`` starts a comment."""
    kw: dict = {}
    lfr: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key in ("dataset", "output"):
                kw[key] = value
            elif key in ("rankers", "detectors"):
                kw[key] = _name_list(value)
            elif key == "seed_counts":
                kw[key] = _int_list(value)
            elif key in _INT_KEYS:
                kw[key] = int(value)
            elif key in _FLOAT_KEYS:
                kw[key] = float(value)
            elif key.startswith("sir.") and key[4:] in _SIR_KEYS:
                kw["sir_" + key[4:]] = _SIR_KEYS[key[4:]](value)
            elif key.startswith("lfr."):
                lfr[key[4:]] = _lfr_value(key[4:], value)
            else:
                raise SpecError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    if lfr:
        kw["lfr"] = lfr
    return ExperimentSpec(**kw)


def read_spec(path) -> ExperimentSpec:
    return parse_spec(Path(path).read_text(encoding="utf-8"))


# seeds --------------------------------------------------------------------

def derive_seed(master: int, *index: int) -> int:
    """Stage seed from the master seed and an index path."""
    ss = np.random.SeedSequence([int(master), *map(int, index)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


# running ------------------------------------------------------------------

def _load_graph(spec: ExperimentSpec) -> tuple[Graph, Cover | None]:
    if spec.dataset == "lfr":
        params = dict(spec.lfr)
        params.setdefault("seed", derive_seed(spec.master_seed, _STAGE_LFR))
        return generate_lfr(LfrConfig(**params))
    if spec.dataset == "karate":
        return load("karate"), karate_planted_cover()
    return load(spec.dataset), None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


@dataclass
class CellResult:
    ranker: str
    algorithm: str
    status: str = "ok"
    error: str | None = None
    pipeline_seed: int | None = None
    ranking: list = field(default_factory=list)
    by_seed_count: dict = field(default_factory=dict)   # k -> {mean, stderr, seeds}
    timeseries: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "ranker": self.ranker,
            "algorithm": self.algorithm,
            "status": self.status,
            "error": self.error,
            "pipeline_seed": self.pipeline_seed,
            "ranking": self.ranking,
            "by_seed_count": {str(k): v for k, v in sorted(self.by_seed_count.items())},
        }


def _run_cell(g, planted, spec, beta, ri, ranker, di, algorithm, sir_seeds) -> CellResult:
    cell = CellResult(ranker, algorithm)
    try:
        if algorithm == BASE:
            order = centrality.score(ranker, g).ranking()
        else:
            cell.pipeline_seed = derive_seed(spec.master_seed, _STAGE_PIPELINE, ri, di)
            detector = DetectorConfig("infomap" if algorithm == PLANTED else algorithm)
            cfg = PenaltyConfig(base_method=ranker, detector=detector, M=spec.rounds,
                                epsilon=spec.epsilon, seed=cell.pipeline_seed)
            order = rcd_map(g, cfg, cover=planted if algorithm == PLANTED else None).order
        order = [int(v) for v in order]
        cell.ranking = order
        for k in spec.seed_counts:
            seeds = order[:min(k, g.n)]
            out = simulate_sir(g, SirConfig(seeds, beta, spec.sir_gamma, spec.sir_runs,
                                            spec.sir_max_steps, sir_seeds[k]))
            cell.by_seed_count[k] = {"mean_final_infected": out.mean_final_infected,
                                     "stderr": out.stderr, "seeds": seeds}
            if k == spec.summary_k:
                cell.timeseries = out.timeseries
    except Exception as exc:  # recorded per cell, the grid keeps going
        log.warning("cell %s/%s failed: %s", ranker, algorithm, exc)
        cell.status, cell.error = "failed", f"{type(exc).__name__}: {exc}"
    return cell


def _fmt(x) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def _algorithm_name(a: str) -> str:
    if a == BASE:
        return "Base"
    if a == PLANTED:
        return "Planted"
    return DISPLAY_NAMES[a]


def _summary_value(cell: CellResult, k: int):
    entry = cell.by_seed_count.get(k)
    return entry["mean_final_infected"] if entry else None


def run_experiment(spec: ExperimentSpec, output: str | Path | None = None) -> dict:
    """Run the full grid and write the result bundle; returns the manifest."""
    out = Path(output if output is not None else spec.output)
    (out / "cells").mkdir(parents=True, exist_ok=True)
    g, planted = _load_graph(spec)
    beta = spec.sir_beta if spec.sir_beta is not None else 1.0 / spectral_radius(g)
    # one SIR stream per seed count, shared by every cell (common random numbers)
    sir_seeds = {k: derive_seed(spec.master_seed, _STAGE_SIR, k) for k in spec.seed_counts}
    grid = [(ri, r, di, a) for ri, r in enumerate(spec.rankers) for di, a in enumerate(spec.algorithms())]

    def job(item):
        ri, r, di, a = item
        return _run_cell(g, planted, spec, beta, ri, r, di, a, sir_seeds)

    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            cells = list(pool.map(job, grid))
    else:
        cells = [job(item) for item in grid]

    files = []

    def write(name: str, text: str):
        (out / name).write_text(text, encoding="utf-8")
        files.append(name)

    for c in cells:
        write(f"cells/{c.ranker}__{c.algorithm}.json", _dump(c.to_dict()))

    k = spec.summary_k
    lines = ["dataset,algorithm,method,seed_count,mean_final_infected,stderr,status"]
    for c in cells:
        entry = c.by_seed_count.get(k, {})
        lines.append(",".join([spec.dataset, _algorithm_name(c.algorithm), centrality.DISPLAY_NAMES[c.ranker],
                               str(k), _fmt(entry.get("mean_final_infected")), _fmt(entry.get("stderr")),
                               c.status]))
    write("summary.csv", "\n".join(lines) + "\n")

    index = {(c.ranker, c.algorithm): c for c in cells}
    header = ["algorithm"] + [centrality.DISPLAY_NAMES[r] for r in spec.rankers]
    lines = [",".join(header)]
    for a in spec.algorithms():
        row = [_algorithm_name(a)] + [_fmt(_summary_value(index[(r, a)], k)) for r in spec.rankers]
        lines.append(",".join(row))
    write("spread_table.csv", "\n".join(lines) + "\n")

    lines = ["algorithm,method,seed_count,mean_final_infected,stderr"]
    for c in cells:
        for kk, entry in sorted(c.by_seed_count.items()):
            lines.append(",".join([_algorithm_name(c.algorithm), centrality.DISPLAY_NAMES[c.ranker], str(kk),
                                   _fmt(entry["mean_final_infected"]), _fmt(entry["stderr"])]))
    write("series.csv", "\n".join(lines) + "\n")

    lines = ["algorithm,method,t,s,i,r"]
    for c in cells:
        if c.timeseries is None:
            continue
        for t, (s, i, r) in enumerate(c.timeseries):
            lines.append(f"{_algorithm_name(c.algorithm)},{centrality.DISPLAY_NAMES[c.ranker]},{t},"
                         f"{s:.6f},{i:.6f},{r:.6f}")
    write("timeseries.csv", "\n".join(lines) + "\n")

    failed = [c for c in cells if c.status != "ok"]
    analysis = None
    if not failed and len(spec.algorithms()) >= 2 and len(spec.rankers) >= 2:
        y = np.array([[_summary_value(index[(r, a)], k) for r in spec.rankers] for a in spec.algorithms()])
        table = rcbd_anova(y)
        names = [_algorithm_name(a) for a in spec.algorithms()]
        lsd = fisher_lsd(y.mean(axis=1), table.ms_error, table.df_error, len(spec.rankers), names=names)
        analysis = {"anova": table.to_dict(), "lsd": lsd.lsd, "letters": lsd.letters,
                    "means": dict(zip(lsd.names, lsd.means)), "display": lsd.display()}
        write("anova.json", _dump(analysis))

    manifest = {
        "spec": spec.to_dict(),
        "graph": {"n": g.n, "m": g.m},
        "beta": beta,
        "sir_seeds": {str(kk): s for kk, s in sorted(sir_seeds.items())},
        "pipeline_seeds": {f"{c.ranker}/{c.algorithm}": c.pipeline_seed for c in cells},
        "cells": {f"{c.ranker}/{c.algorithm}": c.status for c in cells},
        "failures": {f"{c.ranker}/{c.algorithm}": c.error for c in failed},
        "partial": bool(failed),
        "files": sorted(files),
    }
    (out / "manifest.json").write_text(_dump(manifest), encoding="utf-8")
    return manifest


def replay(manifest_path, output=None) -> dict:
    """Re-run the experiment recorded in a manifest."""
    manifest = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    spec = ExperimentSpec.from_dict(manifest["spec"])
    return run_experiment(spec, output if output is not None else spec.output)


def with_output(spec: ExperimentSpec, output) -> ExperimentSpec:
    return replace(spec, output=str(output))
