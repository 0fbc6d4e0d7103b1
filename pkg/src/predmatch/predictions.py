"""Learning per-receiver rank windows from historical DA runs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .core import RESIDENTS, Instance, InstanceError
from .da import other_side, run_da
from .truncation import PredictionWindow

SIGMA_CONVENTION = "sample (ddof=1)"
ROUNDING_CONVENTION = "lo=floor(min-3sd), hi=ceil(max+3sd), clamped to [1, n]"
WIDTH_SDS = 3.0


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainingLog:
    """``ranks[a]`` lists receiver ``a``'s match rank in each training run."""

    n: int
    ranks: tuple[tuple[int, ...], ...]
    proposer_side: str = RESIDENTS

    @property
    def k(self) -> int:
        return len(self.ranks[0]) if self.ranks else 0


def receiver_ranks(inst: Instance, proposer_side: str = RESIDENTS) -> list[int]:
    """Rank of each receiver's partner on its own full list after proposer-side DA."""
    mu, _ = run_da(inst, proposer_side)
    side = other_side(proposer_side)
    out = []
    for a in range(inst.n):
        p = mu.partner(side, a)
        if p is None:
            raise TrainingError(f"receiver {a} unmatched in a training run")
        out.append(inst.rank(side, a, p))
    return out


def draw_seed(seed: int, *keys: int) -> np.random.SeedSequence:
    """Seed for one instance draw, independent of evaluation order."""
    return np.random.SeedSequence([seed, *keys])


def train(sampler: Callable[[object], Instance], k: int, proposer_side: str = RESIDENTS,
          seed: int = 0, keys: Sequence[int] = ()) -> TrainingLog:
    """Run DA on ``k`` fresh draws from ``sampler`` and log every receiver's match rank.

    Draw ``i`` is seeded with ``draw_seed(seed, *keys, i)``.
    """
    if k < 2:
        raise ValueError("need at least two training instances")
    cols = []
    n = None
    for i in range(k):
        inst = sampler(draw_seed(seed, *keys, i))
        if n is None:
            n = inst.n
        elif inst.n != n:
            raise TrainingError("sampler changed market size between draws")
        cols.append(receiver_ranks(inst, proposer_side))
    ranks = tuple(tuple(c[a] for c in cols) for a in range(n))
    return TrainingLog(n, ranks, proposer_side)


def window_bounds(ranks, n: int, width: float = WIDTH_SDS) -> tuple[int, int]:
    if len(ranks) == 0:
        raise ValueError("empty rank log")
    arr = np.asarray(ranks, dtype=float)
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    lo = math.floor(arr.min() - width * sd)
    hi = math.ceil(arr.max() + width * sd)
    return min(max(lo, 1), n), min(max(hi, 1), n)


def learn_windows(log: TrainingLog, n: int | None = None) -> PredictionWindow:
    n = log.n if n is None else n
    lo, hi = [], []
    for a, ranks in enumerate(log.ranks):
        if not ranks:
            raise ValueError(f"receiver {a} has an empty rank log")
        a_lo, a_hi = window_bounds(ranks, n)
        lo.append(a_lo)
        hi.append(a_hi)
    return PredictionWindow(tuple(lo), tuple(hi))


def write_predictions(pred: PredictionWindow, path, meta: dict | None = None) -> None:
    doc = {
        "meta": {"sigma": SIGMA_CONVENTION, "rounding": ROUNDING_CONVENTION, **(meta or {})},
        "windows": [{"lo": a, "hi": b} for a, b in zip(pred.lo, pred.hi)],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def read_predictions(path) -> PredictionWindow:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InstanceError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    recs = doc["windows"] if isinstance(doc, dict) else doc
    lo, hi = [], []
    for i, rec in enumerate(recs):
        try:
            lo.append(int(rec["lo"]))
            hi.append(int(rec["hi"]))
        except (KeyError, TypeError, ValueError):
            raise InstanceError(f"{path}: record {i}: expected fields lo, hi") from None
    return PredictionWindow(tuple(lo), tuple(hi))
