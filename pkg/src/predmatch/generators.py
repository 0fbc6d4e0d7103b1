"""Random market models: uniform, Mallows, tiered and rating-table markets."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import Instance, InstanceError, Matching
from .truncation import PredictionWindow


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_uniform(n: int, seed=None) -> Instance:
    rng = _rng(seed)
    rp = np.argsort(rng.random((n, n)), axis=1)
    hp = np.argsort(rng.random((n, n)), axis=1)
    return Instance(rp.tolist(), hp.tolist())


# --- Mallows ---------------------------------------------------------------


@dataclass(frozen=True)
class MallowsParams:
    n: int
    phi: float
    resident_reference: Optional[tuple[int, ...]] = None  # ranking over hospitals
    hospital_reference: Optional[tuple[int, ...]] = None  # ranking over residents

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {self.phi}")
        if self.n < 1:
            raise ValueError("n must be positive")
        for ref in (self.resident_reference, self.hospital_reference):
            if ref is not None and sorted(ref) != list(range(self.n)):
                raise ValueError("reference ranking must be a permutation of range(n)")


def insertion_offsets(k: int, phi: float, rng: np.random.Generator) -> np.ndarray:
    """Offsets from the back for inserting items 0..k-1 of the reference.

    Item ``i`` is inserted into a list of length ``i`` with ``d`` items after it,
    where ``P(d) ∝ phi**d`` for ``d`` in ``0..i``.
    """
    sizes = np.arange(k)
    if phi == 0.0:
        return np.zeros(k, dtype=np.int64)
    if phi == 1.0:
        return np.floor(rng.random(k) * (sizes + 1)).astype(np.int64)
    u = rng.random(k)
    x = 1.0 - u * (1.0 - phi ** (sizes + 1))
    d = np.floor(np.log(x) / math.log(phi)).astype(np.int64)
    return np.minimum(np.maximum(d, 0), sizes)


def mallows_ranking(reference: Sequence[int], phi: float, rng: np.random.Generator) -> list[int]:
    """One draw from Mallows(reference, phi) by repeated insertion."""
    ref = list(reference)
    offsets = insertion_offsets(len(ref), phi, rng)
    out: list[int] = []
    for i, item in enumerate(ref):
        out.insert(i - int(offsets[i]), item)
    return out


def sample_mallows(p: MallowsParams, seed=None) -> Instance:
    rng = _rng(seed)
    n = p.n
    rref = p.resident_reference or tuple(range(n))
    href = p.hospital_reference or tuple(range(n))
    rp = [mallows_ranking(rref, p.phi, rng) for _ in range(n)]
    hp = [mallows_ranking(href, p.phi, rng) for _ in range(n)]
    return Instance(rp, hp)


def kendall_tau(pi: Sequence[int], ref: Sequence[int]) -> int:
    pos = {x: i for i, x in enumerate(ref)}
    seq = [pos[x] for x in pi]
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


# --- tiered ----------------------------------------------------------------


@dataclass(frozen=True)
class TierParams:
    fractions: tuple[float, ...] = (0.1, 0.2, 0.4, 0.2, 0.1)
    weights: tuple[float, ...] = (50, 25, 10, 5, 1)

    def __post_init__(self):
        if len(self.fractions) != len(self.weights) or not self.fractions:
            raise ValueError("fractions and weights must be non-empty and of equal length")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError(f"tier fractions sum to {sum(self.fractions)}, not 1")
        if any(f < 0 for f in self.fractions):
            raise ValueError("tier fractions must be non-negative")
        if any(w <= 0 for w in self.weights):
            raise ValueError("tier weights must be positive")

    def tier_sizes(self, n: int) -> list[int]:
        """floor(fraction * n) per tier; leftover agents join the largest-fraction tier."""
        sizes = [math.floor(f * n + 1e-9) for f in self.fractions]
        big = max(range(len(sizes)), key=lambda i: (self.fractions[i], -i))
        sizes[big] += n - sum(sizes)
        return sizes

    def agent_weights(self, n: int) -> np.ndarray:
        return np.repeat(np.asarray(self.weights, dtype=float), self.tier_sizes(n))

    def agent_tiers(self, n: int) -> np.ndarray:
        return np.repeat(np.arange(len(self.weights)), self.tier_sizes(n))


def plackett_luce_rankings(weights: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` rankings drawn by weighted sampling without replacement.

    Exponential race: sorting ``E / w`` with ``E ~ Exp(1)`` gives the same law
    as repeatedly picking a remaining item with probability proportional to ``w``.
    """
    keys = rng.exponential(size=(count, len(weights))) / weights
    return np.argsort(keys, axis=1, kind="stable")


def sample_tiered(n: int, p: TierParams = TierParams(), seed=None) -> Instance:
    rng = _rng(seed)
    w = p.agent_weights(n)
    rp = plackett_luce_rankings(w, n, rng)
    hp = plackett_luce_rankings(w, n, rng)
    return Instance(rp.tolist(), hp.tolist())


# --- rating-table markets --------------------------------------------------


@dataclass(frozen=True)
class RatingTable:
    """Joint distribution over (rating given by a resident, rating given by a hospital).

    ``table[a][b]`` weights the event that a resident rates a hospital ``a + 1``
    while the hospital rates the resident ``b + 1``; it is normalized to sum to 1.
    """

    table: tuple[tuple[float, ...], ...]
    popularity_weight: float = 0.05
    jitter: float = 0.01

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (10, 10):
            raise InstanceError(f"rating table must be 10x10, got shape {t.shape}")
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            raise InstanceError("rating table entries must be finite and non-negative")
        if t.sum() <= 0:
            raise InstanceError("rating table has no mass")
        if self.popularity_weight < 0 or self.jitter <= 0:
            raise InstanceError("tie-break constants must be non-negative (jitter positive)")
        if self.popularity_weight + self.jitter >= 1:
            raise InstanceError("tie-break constants must sum below one rating level")
        object.__setattr__(self, "table", tuple(tuple(float(x) for x in row) for row in t / t.sum()))

    @classmethod
    def from_dict(cls, data: dict) -> "RatingTable":
        try:
            return cls(
                tuple(tuple(row) for row in data["table"]),
                float(data.get("popularity_weight", 0.05)),
                float(data.get("jitter", 0.01)),
            )
        except (KeyError, TypeError) as e:
            raise InstanceError(f"malformed rating table: {e}") from None

    @classmethod
    def load(cls, path) -> "RatingTable":
        return cls.from_dict(json.loads(Path(path).read_text()))

    @classmethod
    def default(cls) -> "RatingTable":
        text = resources.files("predmatch").joinpath("data/rating_table.json").read_text()
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {"table": [list(r) for r in self.table],
                "popularity_weight": self.popularity_weight, "jitter": self.jitter}


def sample_ratings(n: int, t: RatingTable, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Ratings ``(by_res, by_hosp)``; ``by_res[r, h]`` is r's rating of h, ``by_hosp[h, r]`` h's of r."""
    flat = np.asarray(t.table).ravel()
    cells = rng.choice(100, size=(n, n), p=flat)
    by_res = cells // 10 + 1
    by_hosp = (cells % 10 + 1).T
    return by_res, by_hosp


def _rank_by_score(ratings: np.ndarray, popularity: np.ndarray, t: RatingTable,
                   rng: np.random.Generator) -> np.ndarray:
    span = popularity.max() - popularity.min()
    norm = (popularity - popularity.min()) / span if span > 0 else np.zeros_like(popularity)
    score = ratings + t.popularity_weight * norm[None, :] + t.jitter * rng.random(ratings.shape)
    return np.argsort(-score, axis=1, kind="stable")


def _popularity_order(pop: np.ndarray) -> np.ndarray:
    """Old index of the agent placed at each new index (most popular first)."""
    return np.argsort(-pop, kind="stable")


def sample_rating_market(n: int, t: Optional[RatingTable] = None, seed=None) -> Instance:
    t = t or RatingTable.default()
    rng = _rng(seed)
    by_res, by_hosp = sample_ratings(n, t, rng)
    hosp_pop = by_res.mean(axis=0)  # mean rating each hospital receives
    res_pop = by_hosp.mean(axis=0)
    rp = _rank_by_score(by_res, hosp_pop, t, rng)
    hp = _rank_by_score(by_hosp, res_pop, t, rng)

    r_order, h_order = _popularity_order(res_pop), _popularity_order(hosp_pop)
    r_new = np.empty(n, dtype=np.int64)
    r_new[r_order] = np.arange(n)
    h_new = np.empty(n, dtype=np.int64)
    h_new[h_order] = np.arange(n)
    rp = h_new[rp[r_order]]
    hp = r_new[hp[h_order]]
    return Instance(rp.tolist(), hp.tolist())


# --- fixed counterexample --------------------------------------------------

_FIG1_HOSPITALS = [[2, 3, 1, 4], [3, 2, 1, 4], [4, 1, 3, 2], [3, 2, 4, 1]]
_FIG1_RESIDENTS = [[1, 4, 2, 3], [4, 3, 1, 2], [1, 3, 2, 4], [1, 4, 2, 3]]


def figure1_instance() -> tuple[Instance, Matching, PredictionWindow]:
    """The 4x4 market where hospital-proposing window truncation goes wrong.

    Returns the instance, its unique stable matching, and the window with
    predicted ranks (2, 3, 1, 2) and error bound 1 for every hospital.
    """
    inst = Instance(
        [[h - 1 for h in lst] for lst in _FIG1_RESIDENTS],
        [[r - 1 for r in lst] for lst in _FIG1_HOSPITALS],
    )
    mu = Matching.from_pairs([(0, 1), (1, 3), (2, 0), (3, 2)], 4)
    pred = PredictionWindow.centered((2, 3, 1, 2), (1, 1, 1, 1), 4)
    return inst, mu, pred


MODELS = ("mallows", "tiered", "rating", "uniform")


def make_sampler(model: str, n: int, phi: float = 0.5, tiers: TierParams = TierParams(),
                 table: Optional[RatingTable] = None):
    """A callable ``seed -> Instance`` for the named market model."""
    if model == "mallows":
        params = MallowsParams(n, phi)
        return lambda seed: sample_mallows(params, seed)
    if model == "tiered":
        return lambda seed: sample_tiered(n, tiers, seed)
    if model == "rating":
        table = table or RatingTable.default()
        return lambda seed: sample_rating_market(n, table, seed)
    if model == "uniform":
        return lambda seed: sample_uniform(n, seed)
    raise ValueError(f"unknown market model {model!r}; choose from {MODELS}")
