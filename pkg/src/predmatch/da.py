"""Deferred acceptance with proposal counting."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import HOSPITALS, RESIDENTS, SIDES, Instance, Matching


@dataclass(frozen=True)
class RunStats:
    proposals: int
    matched_count: int
    proposer_side: str
    iterations: int
    instance_size: int = 0


def run_da(
    inst: Instance,
    proposer_side: str = RESIDENTS,
    order: Optional[Sequence[int]] = None,
    trace: Optional[list] = None,
) -> tuple[Matching, RunStats]:
    """Proposer-optimal stable matching of ``inst`` by deferred acceptance.

    Free proposers are served FIFO; a served proposer keeps offering down its
    list until some receiver holds it or the list runs out. ``order`` fixes the
    initial queue (default ascending index). An iteration is one pass over the
    proposers that were free when the pass began.

    If ``trace`` is given, ``(receiver, proposer)`` is appended every time a
    receiver accepts a new tentative partner.
    """
    if proposer_side not in SIDES:
        raise ValueError(f"proposer_side must be one of {SIDES}, got {proposer_side!r}")
    n = inst.n
    if proposer_side == RESIDENTS:
        plists, recv_rank = inst.resident_prefs, inst.hospital_rank
    else:
        plists, recv_rank = inst.hospital_prefs, inst.resident_rank

    nxt = [0] * n
    held = [-1] * n  # receiver -> proposer
    partner = [-1] * n  # proposer -> receiver
    queue = deque(range(n) if order is None else order)
    if sorted(queue) != list(range(n)):
        raise ValueError("order must be a permutation of the proposers")

    proposals = 0
    iterations = 0
    while queue:
        iterations += 1
        for _ in range(len(queue)):
            p = queue.popleft()
            lst = plists[p]
            i = nxt[p]
            while i < len(lst):
                q = lst[i]
                i += 1
                proposals += 1
                rq = recv_rank[q]
                rank_p = rq[p]
                if rank_p == 0:
                    # inconsistent pruned instance; receiver does not list p
                    continue
                cur = held[q]
                if cur == -1 or rank_p < rq[cur]:
                    held[q] = p
                    partner[p] = q
                    if trace is not None:
                        trace.append((q, p))
                    if cur != -1:
                        partner[cur] = -1
                        queue.append(cur)
                    break
            nxt[p] = i

    part = [None if x == -1 else x for x in partner]
    if proposer_side == RESIDENTS:
        mu = Matching.from_resident_array(part, n)
    else:
        mu = Matching.from_resident_array([None if x == -1 else x for x in held], n)
    matched = sum(x != -1 for x in partner)
    size = sum(len(x) for x in inst.prefs(other_side(proposer_side)))
    return mu, RunStats(proposals, matched, proposer_side, iterations, size)


def other_side(side: str) -> str:
    return HOSPITALS if side == RESIDENTS else RESIDENTS
