"""Set-disjointness gadget: a market whose predicted matching is near-stable
exactly when two sets of ordered pairs are disjoint.

Agent layout (same on both sides, 0-based): the S group occupies ``0..m-1``,
upper padding ``m..m+eta-1``, lower padding ``m+eta..m+2*eta-1`` and the single
backup agent ``m+2*eta``. Set elements ``(i, j)`` are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import HOSPITALS, RESIDENTS, Instance, InstanceError, Matching

S, PAD_UP, PAD_LOW, BACKUP = "S", "Pu", "Pl", "B"


class GadgetError(InstanceError):
    pass


@dataclass(frozen=True)
class DisjointnessInstance:
    m: int
    eta: int
    A: frozenset
    B: frozenset

    def __post_init__(self):
        if self.m < 2:
            raise GadgetError("m must be at least 2 so that the pair universe is non-empty")
        if self.eta < 0:
            raise GadgetError("eta must be non-negative")
        object.__setattr__(self, "A", frozenset((int(i), int(j)) for i, j in self.A))
        object.__setattr__(self, "B", frozenset((int(i), int(j)) for i, j in self.B))
        for name, pairs in (("A", self.A), ("B", self.B)):
            for i, j in pairs:
                if not (1 <= i <= self.m and 1 <= j <= self.m) or i == j:
                    raise GadgetError(f"{name}: pair ({i}, {j}) outside the universe for m={self.m}")
        if len(self.A & self.B) > 1:
            raise GadgetError(f"|A ∩ B| = {len(self.A & self.B)} exceeds the promise of at most 1")

    @property
    def n(self) -> int:
        return self.m + 2 * self.eta + 1

    @property
    def disjoint(self) -> bool:
        return not (self.A & self.B)


@dataclass(frozen=True)
class GadgetInstance:
    d: DisjointnessInstance
    inst: Instance
    groups: tuple[str, ...]  # group label per agent index, identical on both sides
    mu_hat: Matching

    @property
    def eta(self) -> int:
        return self.d.eta

    @property
    def n(self) -> int:
        return self.inst.n


def _layout(m: int, eta: int):
    s = list(range(m))
    up = list(range(m, m + eta))
    low = list(range(m + eta, m + 2 * eta))
    return s, up, low, m + 2 * eta


def build_gadget(d: DisjointnessInstance, seed=None) -> GadgetInstance:
    """Build the gadget market and its predicted matching (identity pairing).

    Segments whose internal order is free are kept ascending unless ``seed`` is
    given, in which case each one is shuffled independently.
    """
    m, eta, n = d.m, d.eta, d.n
    rng = np.random.default_rng(seed) if seed is not None else None

    def seg(items) -> list[int]:
        items = list(items)
        if rng is not None and len(items) > 1:
            items = [items[i] for i in rng.permutation(len(items))]
        return items

    s, up, low, b = _layout(m, eta)

    def s_list(i: int, pairs: frozenset, own_first: bool) -> list[int]:
        # own_first: pairs are (self, other) for hospitals, (other, self) for residents
        liked = [j for j in s if ((i + 1, j + 1) if own_first else (j + 1, i + 1)) in pairs]
        rest = [j for j in s if j != i and j not in liked]
        return seg(liked) + seg(up) + [i, b] + seg(low) + seg(rest)

    def pad_list(a: int) -> list[int]:
        return [a] + seg(x for x in range(n) if x != a)

    hosp, res = [], []
    for a in range(n):
        if a < m:
            hosp.append(s_list(a, d.A, own_first=True))
            res.append(s_list(a, d.B, own_first=False))
        elif a < b:
            hosp.append(pad_list(a))
            res.append(pad_list(a))
        else:
            hosp.append(seg(s) + seg(up) + seg(low) + [b])
            res.append(seg(s) + seg(up) + seg(low) + [b])
    groups = tuple([S] * m + [PAD_UP] * eta + [PAD_LOW] * eta + [BACKUP])
    inst = Instance(res, hosp)
    mu_hat = Matching.from_resident_array(list(range(n)))
    return GadgetInstance(d, inst, groups, mu_hat)


def repair_matching(g: GadgetInstance) -> Matching:
    """Stable matching reached from the prediction by re-matching six agents.

    With ``(i, j)`` the shared element: hospital i takes resident j, resident i
    takes the backup hospital and hospital j takes the backup resident.
    """
    common = g.d.A & g.d.B
    if not common:
        raise GadgetError("A and B are disjoint; the predicted matching needs no repair")
    (i, j), = common
    i, j = i - 1, j - 1
    b = g.n - 1
    r2h = list(range(g.n))
    r2h[j] = i
    r2h[i] = b
    r2h[b] = j
    return Matching.from_resident_array(r2h)


def rank_errors(g: GadgetInstance, mu: Matching) -> list[int]:
    """Per-agent |rank shift| between the prediction and ``mu``; hospitals first."""
    if not mu.is_perfect:
        raise GadgetError("error is only defined for perfect matchings")
    inst, hat = g.inst, g.mu_hat
    out = []
    for side in (HOSPITALS, RESIDENTS):
        for a in range(g.n):
            out.append(abs(inst.rank(side, a, hat.partner(side, a)) - inst.rank(side, a, mu.partner(side, a))))
    return out


def max_error(g: GadgetInstance, mu: Matching) -> int:
    return max(rank_errors(g, mu))


def total_error(g: GadgetInstance, mu: Matching) -> int:
    return sum(rank_errors(g, mu))


def average_error(g: GadgetInstance, mu: Matching) -> float:
    """Total rank shift divided by the market size n."""
    return total_error(g, mu) / g.n


def random_disjointness(m: int, eta: int, rng: np.random.Generator, intersect: bool,
                        density: float = 0.3) -> DisjointnessInstance:
    """Random A, B over the pair universe; exactly one shared pair if ``intersect``."""
    universe = [(i, j) for i in range(1, m + 1) for j in range(1, m + 1) if i != j]
    order = rng.permutation(len(universe))
    shared = universe[order[0]] if intersect else None
    A, B = set(), set()
    for idx in order[1:]:
        u = rng.random()
        if u < density:
            A.add(universe[idx])
        elif u < 2 * density:
            B.add(universe[idx])
    if shared is not None:
        A.add(shared)
        B.add(shared)
    return DisjointnessInstance(m, eta, frozenset(A), frozenset(B))


def read_pairs(path) -> frozenset:
    """Read one ``i j`` pair per line (1-based); blank lines and ``#`` comments ignored."""
    pairs = set()
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if len(parts) != 2:
                raise ValueError
            pairs.add((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GadgetError(f"{path}: line {lineno}: expected two integers 'i j', got {line!r}") from None
    return frozenset(pairs)
