"""Train-then-evaluate pipeline comparing classic DA, WDA and PDA."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .core import HOSPITALS, RESIDENTS, SIDES, Instance, verify_stability
from .da import run_da
from .generators import MODELS, RatingTable, TierParams, make_sampler
from .plots import line_chart
from .predictions import ROUNDING_CONVENTION, SIGMA_CONVENTION, draw_seed, learn_windows, train
from .truncation import PredictionWindow, run_pda_adaptive, run_wda

log = logging.getLogger(__name__)

ALGOS = ("DA", "WDA", "PDA")
SUMMARY_COLUMNS = ["sweep", "algo", "proposals_mean", "proposals_std", "size_mean", "size_std",
                   "stable_pct", "iters_mean"]
RAW_COLUMNS = ["sweep", "instance", "algo", "proposals", "size", "stable", "perfect", "iters"]

TRAIN_STREAM, EVAL_STREAM = 0, 1

PRESETS = {
    "mallows": {"param": "phi", "values": (0.0, 0.2, 0.4, 0.6, 0.8, 1.0), "n": 500},
    "tiered": {"param": "n", "values": (100, 200, 300, 400, 500)},
    "rating": {"param": "n", "values": (100, 200, 300, 400, 500)},
    "uniform": {"param": "n", "values": (100, 200, 300, 400, 500)},
}


@dataclass
class ExperimentConfig:
    model: str = "mallows"
    sweep: tuple = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
    sweep_param: str = "phi"
    n: int = 500
    phi: float = 0.5
    k_train: int = 50
    k_eval: int = 50
    proposer: str = RESIDENTS
    seed: int = 0
    out: str = "results"
    workers: int = 1
    tiers: TierParams = field(default_factory=TierParams)
    table: Optional[dict] = None
    plots: bool = True

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.sweep_param not in ("phi", "n"):
            raise ValueError("sweep_param must be 'phi' or 'n'")
        if not self.sweep:
            raise ValueError("sweep must be non-empty")
        if self.k_train < 2 or self.k_eval < 1:
            raise ValueError("need k_train >= 2 and k_eval >= 1")
        if self.proposer not in SIDES:
            raise ValueError(f"proposer must be one of {SIDES}")
        if self.sweep_param == "n" and any(int(v) != v or v < 1 for v in self.sweep):
            raise ValueError("market-size sweep values must be positive integers")
        if self.sweep_param == "phi" and any(not 0 <= v <= 1 for v in self.sweep):
            raise ValueError("phi sweep values must lie in [0, 1]")

    @classmethod
    def preset(cls, model: str, **overrides) -> "ExperimentConfig":
        p = PRESETS[model]
        kw = {"model": model, "sweep_param": p["param"], "sweep": p["values"]}
        if "n" in p:
            kw["n"] = p["n"]
        kw.update(overrides)
        return cls(**kw)

    def point(self, value) -> tuple[int, float]:
        if self.sweep_param == "phi":
            return self.n, float(value)
        return int(value), self.phi

    def sampler(self, value):
        n, phi = self.point(value)
        table = RatingTable.from_dict(self.table) if self.table else None
        return make_sampler(self.model, n, phi, self.tiers, table)

    def describe(self) -> dict:
        d = asdict(self)
        d["sweep"] = list(self.sweep)
        return d


@dataclass(frozen=True)
class InstanceResult:
    algo: str
    proposals: int
    size: int
    stable: bool
    perfect: bool
    iters: int


def evaluate_instance(inst: Instance, pred: PredictionWindow, proposer: str = RESIDENTS) -> list[InstanceResult]:
    """Run DA, WDA (full window) and adaptive PDA (upper bounds only) on one market.

    Predictions are for the receiving side. When hospitals propose the market
    is mirrored so the truncated algorithms always see residents proposing.
    """
    work = inst.swapped() if proposer == HOSPITALS else inst
    n = inst.n
    mu, st = run_da(work, RESIDENTS)
    v = verify_stability(work, mu)
    out = [InstanceResult("DA", st.proposals, n * n, v.stable, v.perfect, 1)]
    mu, st, v = run_wda(work, pred, RESIDENTS)
    out.append(InstanceResult("WDA", st.proposals, st.instance_size, v.stable, v.perfect, 1))
    mu, st, rounds = run_pda_adaptive(work, pred.hi)
    v = verify_stability(work, mu)
    out.append(InstanceResult("PDA", st.proposals, st.instance_size, v.stable, v.perfect, rounds))
    return out


def _eval_job(args) -> list[InstanceResult]:
    cfg, s_idx, value, i, pred = args
    inst = cfg.sampler(value)(draw_seed(cfg.seed, s_idx, EVAL_STREAM, i))
    return evaluate_instance(inst, pred, cfg.proposer)


def _summary(value, algo: str, rs: list[InstanceResult]) -> dict:
    props = np.array([r.proposals for r in rs], dtype=float)
    sizes = np.array([r.size for r in rs], dtype=float)
    return {
        "sweep": value,
        "algo": algo,
        "proposals_mean": float(props.mean()),
        "proposals_std": float(props.std()),
        "size_mean": float(sizes.mean()),
        "size_std": float(sizes.std()),
        "stable_pct": 100.0 * sum(r.stable for r in rs) / len(rs),
        "iters_mean": float(np.mean([r.iters for r in rs])),
    }


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run the full sweep and write ``summary.csv``, ``raw.csv``, ``meta.json`` and plots.

    Returns a dict with the summary rows and raw records.
    """
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    summary, raw = [], []
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for s_idx, value in enumerate(cfg.sweep):
            log.info("sweep %s=%s: training on %d draws", cfg.sweep_param, value, cfg.k_train)
            tlog = train(cfg.sampler(value), cfg.k_train, cfg.proposer, cfg.seed, (s_idx, TRAIN_STREAM))
            pred = learn_windows(tlog)
            jobs = [(cfg, s_idx, value, i, pred) for i in range(cfg.k_eval)]
            results = list(pool.map(_eval_job, jobs)) if pool else [_eval_job(j) for j in jobs]
            for i, rs in enumerate(results):
                for r in rs:
                    raw.append({"sweep": value, "instance": i, "algo": r.algo, "proposals": r.proposals,
                                "size": r.size, "stable": int(r.stable), "perfect": int(r.perfect),
                                "iters": r.iters})
            for algo in ALGOS:
                summary.append(_summary(value, algo, [r for rs in results for r in rs if r.algo == algo]))
    finally:
        if pool:
            pool.shutdown()

    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, summary)
    _write_csv(out / "raw.csv", RAW_COLUMNS, raw)
    table = RatingTable.from_dict(cfg.table) if cfg.table else RatingTable.default()
    meta = {
        "version": __version__,
        "config": cfg.describe(),
        "seed": cfg.seed,
        "sigma_convention": SIGMA_CONVENTION,
        "window_rounding": ROUNDING_CONVENTION,
        "pda_extension": "initial max(1, n // 8), doubled each round, unmatched hospitals only",
        "tie_break": {"popularity_weight": table.popularity_weight, "jitter": table.jitter},
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    if cfg.plots:
        plot_summary(summary, cfg, out)
    return {"summary": summary, "raw": raw}


def _write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def plot_summary(summary: list[dict], cfg: ExperimentConfig, out: Path) -> None:
    xs = list(cfg.sweep)
    label = "dispersion phi" if cfg.sweep_param == "phi" else "market size n"

    def series(algos, mean_key, std_key):
        return {a: ([r[mean_key] for r in summary if r["algo"] == a],
                    [r[std_key] for r in summary if r["algo"] == a]) for a in algos}

    wda_pct = [f"{r['stable_pct']:.0f}%" for r in summary if r["algo"] == "WDA"]
    line_chart(out / "proposals.svg", xs, series(ALGOS, "proposals_mean", "proposals_std"),
               f"Proposals ({cfg.model})", label, "proposals", labels={"WDA": wda_pct})
    line_chart(out / "instance_size.svg", xs, series(("WDA", "PDA"), "size_mean", "size_std"),
               f"Instance size ({cfg.model})", label, "total receiving-list length")
