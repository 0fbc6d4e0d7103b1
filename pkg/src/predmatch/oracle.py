"""Brute-force ground truth for small markets.

Enumerates every stable matching by a depth-first scan over resident
assignments, pruning a branch as soon as two already-assigned agents form a
blocking pair. Nothing here calls into the DA engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Instance, Matching, verify_stability

MAX_ORACLE_N = 9


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class StableSet:
    matchings: tuple[Matching, ...]
    resident_optimal: int
    hospital_optimal: int

    def __len__(self):
        return len(self.matchings)

    def __iter__(self):
        return iter(self.matchings)

    def __contains__(self, mu):
        return mu in self.matchings

    @property
    def resident_optimal_matching(self) -> Matching:
        return self.matchings[self.resident_optimal]

    @property
    def hospital_optimal_matching(self) -> Matching:
        return self.matchings[self.hospital_optimal]


def _blocks(inst: Instance, r: int, h_of_r: Optional[int], h: int, r_of_h: Optional[int]) -> bool:
    """Would (r, h) block, given r currently holds h_of_r and h holds r_of_h?"""
    rr, hr = inst.resident_rank[r], inst.hospital_rank[h]
    if rr[h] == 0 or hr[r] == 0 or h_of_r == h:
        return False
    if h_of_r is not None and rr[h_of_r] < rr[h]:
        return False
    if r_of_h is not None and hr[r_of_h] < hr[r]:
        return False
    return True


def _enumerate(inst: Instance) -> list[Matching]:
    n = inst.n
    full = inst.is_full
    assign: list[Optional[int]] = [None] * n
    owner: list[Optional[int]] = [None] * n  # hospital -> resident among assigned
    found: list[Matching] = []

    def consistent(r: int, h: Optional[int]) -> bool:
        for r2 in range(r):
            h2 = assign[r2]
            if h2 is not None and _blocks(inst, r, h, h2, r2):
                return False
            if h is not None and _blocks(inst, r2, h2, h, r):
                return False
        return True

    def rec(r: int) -> None:
        if r == n:
            mu = Matching.from_resident_array(assign, n)
            if verify_stability(inst, mu).stable:
                found.append(mu)
            return
        options: list[Optional[int]] = list(inst.resident_prefs[r])
        if not full:
            options.append(None)
        for h in options:
            if h is not None and owner[h] is not None:
                continue
            if not consistent(r, h):
                continue
            assign[r] = h
            if h is not None:
                owner[h] = r
            rec(r + 1)
            assign[r] = None
            if h is not None:
                owner[h] = None

    rec(0)
    return found


def _dominant(inst: Instance, ms: Sequence[Matching], side: str) -> int:
    """Index of the matching every agent on ``side`` weakly prefers to all others."""
    n = inst.n

    def ranks(mu: Matching) -> list[int]:
        out = []
        for a in range(n):
            p = mu.partner(side, a)
            out.append(n + 1 if p is None else inst.rank(side, a, p))
        return out

    vecs = [ranks(m) for m in ms]
    for i, v in enumerate(vecs):
        if all(all(x <= y for x, y in zip(v, w)) for w in vecs):
            return i
    raise OracleError(f"no {side}-optimal member found; stable set is not a lattice")


def enumerate_stable(inst: Instance) -> StableSet:
    if inst.n > MAX_ORACLE_N:
        raise OracleError(f"n={inst.n} too large for exhaustive enumeration (max {MAX_ORACLE_N})")
    ms = _enumerate(inst)
    if not ms:
        raise OracleError("no stable matching found; instance lists are inconsistent")
    return StableSet(tuple(ms), _dominant(inst, ms, "residents"), _dominant(inst, ms, "hospitals"))


def prediction_distance(pruned: Instance, mu: Matching, rho: Sequence[int]) -> int:
    """Sum over matched hospitals of rho_i minus the partner's rank on the pruned list."""
    total = 0
    for h, r in enumerate(mu.hospital_to_resident):
        if r is not None:
            total += rho[h] - pruned.hospital_rank[h][r]
    return total


def closest_to_prediction(s: StableSet, pruned: Instance, rho: Sequence[int]) -> Matching:
    """Stable matching of the pruned instance closest to the predicted ranks.

    Unmatched hospitals are skipped; by the lone-wolf property they are the
    same in every member, so they cannot change the argmin.
    """
    if len(s) == 0:
        raise OracleError("empty stable set")
    best = min(
        s.matchings,
        key=lambda m: (prediction_distance(pruned, m, rho),
                       tuple(-1 if r is None else r for r in m.hospital_to_resident)),
    )
    return best


def unmatched_sets_agree(s: StableSet) -> bool:
    """Lone-wolf check: every member leaves the same agents unmatched."""
    first = s.matchings[0]
    ur, uh = first.unmatched("residents"), first.unmatched("hospitals")
    return all(m.unmatched("residents") == ur and m.unmatched("hospitals") == uh for m in s)
