"""Prediction-based list pruning and the window / prefix truncated DA variants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import HOSPITALS, RESIDENTS, Instance, InstanceError, Matching, Verdict, verify_stability
from .da import RunStats, run_da


@dataclass(frozen=True)
class PredictionWindow:
    """Per-hospital retained rank interval ``[lo, hi]`` (1-based, inclusive)."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise InstanceError("lo and hi must have the same length")
        for i, (a, b) in enumerate(zip(self.lo, self.hi)):
            if a < 1 or b < a:
                raise InstanceError(f"hospital {i}: empty or invalid window [{a}, {b}]")

    @classmethod
    def centered(cls, rho: Sequence[int], eta: Sequence[int], n: int) -> "PredictionWindow":
        """Window ``[rho - eta, rho + eta]`` clamped to ``[1, n]``."""
        if len(rho) != len(eta):
            raise InstanceError("rho and eta must have the same length")
        lo, hi = [], []
        for i, (p, e) in enumerate(zip(rho, eta)):
            if not 1 <= p <= n:
                raise InstanceError(f"hospital {i}: predicted rank {p} outside [1, {n}]")
            if e < 0:
                raise InstanceError(f"hospital {i}: negative error bound {e}")
            lo.append(max(1, p - e))
            hi.append(min(n, p + e))
        return cls(tuple(lo), tuple(hi))

    def __len__(self):
        return len(self.lo)

    def check(self, n: int) -> None:
        if len(self) != n:
            raise InstanceError(f"prediction covers {len(self)} hospitals, instance has {n}")
        if max(self.hi) > n:
            raise InstanceError(f"window upper bound exceeds n={n}")


class PrunedInstance(Instance):
    """A consistently truncated instance with a reference to the original.

    ``intervals[h]`` is the original-rank interval retained on hospital h's list.
    Ranks looked up on a PrunedInstance are ranks within the pruned lists.
    """

    __slots__ = ("base", "intervals")

    def __init__(self, base: Instance, hospital_prefs, intervals):
        resident_prefs = _filter_residents(base, hospital_prefs)
        super().__init__(resident_prefs, hospital_prefs)
        self.base = base
        self.intervals = tuple(intervals)
        if not self.is_consistent():
            raise InstanceError("pruned instance is not mutually consistent")


def _filter_residents(base: Instance, hospital_prefs) -> list[list[int]]:
    n = base.n
    kept = [set() for _ in range(n)]
    for h, lst in enumerate(hospital_prefs):
        for r in lst:
            kept[r].add(h)
    return [[h for h in base.resident_prefs[r] if h in kept[r]] for r in range(n)]


def _prune(inst: Instance, lo: Sequence[int], hi: Sequence[int]) -> PrunedInstance:
    hp = [inst.hospital_prefs[h][a - 1 : b] for h, (a, b) in enumerate(zip(lo, hi))]
    return PrunedInstance(inst, hp, list(zip(lo, hi)))


def prune_window(inst: Instance, pred: PredictionWindow) -> PrunedInstance:
    pred.check(inst.n)
    return _prune(inst, pred.lo, pred.hi)


def prune_prefix(inst: Instance, rho: Sequence[int]) -> PrunedInstance:
    n = inst.n
    if len(rho) != n:
        raise InstanceError(f"got {len(rho)} cutoffs for {n} hospitals")
    for i, p in enumerate(rho):
        if not 1 <= p <= n:
            raise InstanceError(f"hospital {i}: cutoff {p} outside [1, {n}]")
    return _prune(inst, [1] * n, rho)


def run_wda(
    inst: Instance, pred: PredictionWindow, proposer_side: str = RESIDENTS
) -> tuple[Matching, RunStats, Verdict]:
    """DA on the window-pruned instance; stability is judged on ``inst``.

    Only the resident-proposing run carries a correctness guarantee. Unstable
    or imperfect outputs are reported as-is.
    """
    pruned = prune_window(inst, pred)
    mu, stats = run_da(pruned, proposer_side)
    return mu, stats, verify_stability(inst, mu)


def run_pda_once(inst: Instance, rho: Sequence[int]) -> tuple[Matching, RunStats, set[int]]:
    pruned = prune_prefix(inst, rho)
    mu, stats = run_da(pruned, RESIDENTS)
    return mu, stats, mu.unmatched(HOSPITALS)


@dataclass(frozen=True)
class PDARound:
    cutoffs: tuple[int, ...]
    proposals: int
    list_size: int
    unmatched: frozenset


def run_pda_adaptive(
    inst: Instance,
    rho: Sequence[int],
    initial_extension: Optional[int] = None,
    growth: float = 2,
    history: Optional[list] = None,
) -> tuple[Matching, RunStats, int]:
    """Prefix-truncated DA that re-runs with longer lists until perfect.

    After an imperfect round, only the unmatched hospitals' cutoffs grow, by
    the current extension (``max(1, n // 8)`` by default), and the extension
    is multiplied by ``growth`` for the next round. The instance size is the
    sum over rounds of the total hospital list length.
    """
    n = inst.n
    ext = max(1, n // 8) if initial_extension is None else initial_extension
    if ext < 1:
        raise ValueError("initial_extension must be >= 1")
    if growth < 1:
        raise ValueError("growth must be >= 1")
    cutoffs = list(rho)
    total_props = 0
    total_size = 0
    rounds = 0
    while True:
        rounds += 1
        mu, stats, unmatched = run_pda_once(inst, cutoffs)
        size = stats.instance_size
        total_props += stats.proposals
        total_size += size
        if history is not None:
            history.append(PDARound(tuple(cutoffs), stats.proposals, size, frozenset(unmatched)))
        if not unmatched:
            break
        if all(cutoffs[h] == n for h in unmatched):
            # cannot happen on a full balanced instance
            raise RuntimeError("unmatched hospitals already hold full lists")
        for h in unmatched:
            cutoffs[h] = min(n, cutoffs[h] + int(ext))
        ext = ext * growth
    agg = RunStats(total_props, mu.size, RESIDENTS, rounds, total_size)
    return mu, agg, rounds


def pda_proposal_bound(pruned: Instance, mu: Matching, rho: Sequence[int]) -> int:
    """Sum over hospitals of ``rho_i - rank(pruned list, partner) + 1``."""
    total = 0
    for h, r in enumerate(mu.hospital_to_resident):
        if r is None:
            raise InstanceError(f"hospital {h} unmatched; bound needs a perfect matching")
        total += rho[h] - pruned.hospital_rank[h][r] + 1
    return total
