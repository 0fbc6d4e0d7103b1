"""Instances, matchings, rank lookup and stability checks.

Agents are 0-indexed on both sides. Ranks are 1-based (rank 1 is the most
preferred counterpart); a rank of 0 in the lookup tables means "not listed".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple

RESIDENTS = "residents"
HOSPITALS = "hospitals"
SIDES = (RESIDENTS, HOSPITALS)


class InstanceError(ValueError):
    """Raised for malformed preference profiles or matchings."""


def _rank_table(prefs: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    table = []
    for lst in prefs:
        row = [0] * n
        for pos, other in enumerate(lst, start=1):
            row[other] = pos
        table.append(row)
    return table


def _validate_side(prefs, n: int, label: str) -> tuple[tuple[int, ...], ...]:
    if len(prefs) != n:
        raise InstanceError(f"{label}: expected {n} lists, got {len(prefs)}")
    out = []
    for a, lst in enumerate(prefs):
        lst = tuple(int(x) for x in lst)
        seen = set()
        for x in lst:
            if x in seen:
                raise InstanceError(f"{label}[{a}]: duplicate index {x}")
            if not 0 <= x < n:
                raise InstanceError(f"{label}[{a}]: index {x} out of range [0, {n})")
            seen.add(x)
        out.append(lst)
    return tuple(out)


class Instance:
    """A two-sided strict preference profile over ``n`` residents and ``n`` hospitals.

    Lists may be incomplete (pruned instances), but every index must be in
    range and appear at most once per list. Rank tables are built eagerly.
    """

    __slots__ = ("n", "resident_prefs", "hospital_prefs", "resident_rank", "hospital_rank")

    def __init__(self, resident_prefs, hospital_prefs):
        n = len(resident_prefs)
        if n == 0:
            raise InstanceError("market size must be positive")
        if len(hospital_prefs) != n:
            raise InstanceError(
                f"length mismatch: {n} resident lists vs {len(hospital_prefs)} hospital lists"
            )
        self.n = n
        self.resident_prefs = _validate_side(resident_prefs, n, "resident_prefs")
        self.hospital_prefs = _validate_side(hospital_prefs, n, "hospital_prefs")
        self.resident_rank = _rank_table(self.resident_prefs, n)
        self.hospital_rank = _rank_table(self.hospital_prefs, n)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.resident_prefs == other.resident_prefs
            and self.hospital_prefs == other.hospital_prefs
        )

    def __hash__(self):
        return hash((self.resident_prefs, self.hospital_prefs))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"

    @property
    def is_full(self) -> bool:
        n = self.n
        return all(len(lst) == n for lst in self.resident_prefs) and all(
            len(lst) == n for lst in self.hospital_prefs
        )

    def is_consistent(self) -> bool:
        """True iff r lists h exactly when h lists r."""
        hr = self.hospital_rank
        for r, lst in enumerate(self.resident_prefs):
            for h in lst:
                if hr[h][r] == 0:
                    return False
        total_r = sum(len(lst) for lst in self.resident_prefs)
        total_h = sum(len(lst) for lst in self.hospital_prefs)
        return total_r == total_h

    def prefs(self, side: str):
        return self.resident_prefs if side == RESIDENTS else self.hospital_prefs

    def ranks(self, side: str):
        return self.resident_rank if side == RESIDENTS else self.hospital_rank

    def rank(self, side: str, agent: int, other: int) -> Optional[int]:
        """Rank of ``other`` on ``agent``'s list, or None if absent."""
        r = self.ranks(side)[agent][other]
        return r or None

    def hospital_list_size(self) -> int:
        return sum(len(lst) for lst in self.hospital_prefs)

    def swapped(self) -> "Instance":
        """The same market with the roles of the two sides exchanged."""
        return Instance(self.hospital_prefs, self.resident_prefs)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "resident_prefs": [list(x) for x in self.resident_prefs],
            "hospital_prefs": [list(x) for x in self.hospital_prefs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            n = int(data["n"])
            rp, hp = data["resident_prefs"], data["hospital_prefs"]
        except (KeyError, TypeError) as e:
            raise InstanceError(f"instance record missing field: {e}") from None
        inst = cls(rp, hp)
        if inst.n != n:
            raise InstanceError(f"declared n={n} but found {inst.n} resident lists")
        return inst


def build_instance(resident_prefs, hospital_prefs) -> Instance:
    return Instance(resident_prefs, hospital_prefs)


@dataclass(frozen=True)
class Matching:
    """Partial or perfect assignment; the two arrays are mutual inverses."""

    resident_to_hospital: Tuple[Optional[int], ...]
    hospital_to_resident: Tuple[Optional[int], ...]

    def __post_init__(self):
        r2h, h2r = self.resident_to_hospital, self.hospital_to_resident
        if len(r2h) != len(h2r):
            raise InstanceError("matching sides have different sizes")
        for r, h in enumerate(r2h):
            if h is not None and h2r[h] != r:
                raise InstanceError(f"matching not inverse-consistent at resident {r}")
        for h, r in enumerate(h2r):
            if r is not None and r2h[r] != h:
                raise InstanceError(f"matching not inverse-consistent at hospital {h}")

    @classmethod
    def from_resident_array(cls, r2h: Sequence[Optional[int]], n: Optional[int] = None) -> "Matching":
        n = len(r2h) if n is None else n
        if len(r2h) < n:
            raise InstanceError(f"record {len(r2h)} missing: matching has {len(r2h)} entries, expected {n}")
        if len(r2h) > n:
            raise InstanceError(f"record {n} unexpected: matching has {len(r2h)} entries, expected {n}")
        h2r: list[Optional[int]] = [None] * n
        norm: list[Optional[int]] = []
        for r, h in enumerate(r2h):
            if h is None or h == -1:
                norm.append(None)
                continue
            h = int(h)
            if not 0 <= h < n:
                raise InstanceError(f"matching entry {r}: hospital {h} out of range")
            if h2r[h] is not None:
                raise InstanceError(f"matching entry {r}: hospital {h} already matched to {h2r[h]}")
            h2r[h] = r
            norm.append(h)
        return cls(tuple(norm), tuple(h2r))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, int]], n: int) -> "Matching":
        """Build from ``(resident, hospital)`` pairs."""
        r2h: list[Optional[int]] = [None] * n
        for r, h in pairs:
            if r2h[r] is not None:
                raise InstanceError(f"resident {r} matched twice")
            r2h[r] = h
        return cls.from_resident_array(r2h, n)

    @classmethod
    def empty(cls, n: int) -> "Matching":
        return cls((None,) * n, (None,) * n)

    @property
    def n(self) -> int:
        return len(self.resident_to_hospital)

    @property
    def is_perfect(self) -> bool:
        return None not in self.resident_to_hospital

    @property
    def size(self) -> int:
        return sum(h is not None for h in self.resident_to_hospital)

    def pairs(self) -> list[Tuple[int, int]]:
        return [(r, h) for r, h in enumerate(self.resident_to_hospital) if h is not None]

    def partner(self, side: str, agent: int) -> Optional[int]:
        if side == RESIDENTS:
            return self.resident_to_hospital[agent]
        return self.hospital_to_resident[agent]

    def swapped(self) -> "Matching":
        return Matching(self.hospital_to_resident, self.resident_to_hospital)

    def unmatched(self, side: str) -> set[int]:
        arr = self.resident_to_hospital if side == RESIDENTS else self.hospital_to_resident
        return {a for a, p in enumerate(arr) if p is None}

    def to_list(self) -> list[int]:
        return [-1 if h is None else h for h in self.resident_to_hospital]

    def changed_agents(self, other: "Matching") -> int:
        """Number of agents (both sides) whose partner differs between the two matchings."""
        a = sum(x != y for x, y in zip(self.resident_to_hospital, other.resident_to_hospital))
        b = sum(x != y for x, y in zip(self.hospital_to_resident, other.hospital_to_resident))
        return a + b


@dataclass(frozen=True)
class Verdict:
    stable: bool
    witness: Optional[Tuple[int, int]] = None
    perfect: bool = False

    def __bool__(self):
        return self.stable

    def describe(self) -> str:
        if self.stable:
            return "stable"
        r, h = self.witness
        return f"unstable; witness (r{r + 1},h{h + 1})"


def _check_range(n: int, r: int, h: int) -> None:
    if not (0 <= r < n and 0 <= h < n):
        raise IndexError(f"pair ({r}, {h}) out of range for n={n}")


def is_blocking_pair(inst: Instance, mu: Matching, r: int, h: int) -> bool:
    _check_range(inst.n, r, h)
    rr = inst.resident_rank[r]
    hr = inst.hospital_rank[h]
    rank_h, rank_r = rr[h], hr[r]
    if rank_h == 0 or rank_r == 0:
        return False
    cur_h = mu.resident_to_hospital[r]
    if cur_h == h:
        return False
    if cur_h is not None and rr[cur_h] <= rank_h:
        return False
    cur_r = mu.hospital_to_resident[h]
    if cur_r is not None and hr[cur_r] <= rank_r:
        return False
    return True


def verify_stability(inst: Instance, mu: Matching) -> Verdict:
    """Scan for a blocking pair; returns the first witness in resident order."""
    if mu.n != inst.n:
        raise InstanceError(f"matching size {mu.n} does not match instance size {inst.n}")
    hr = inst.hospital_rank
    r2h, h2r = mu.resident_to_hospital, mu.hospital_to_resident
    for r, lst in enumerate(inst.resident_prefs):
        cur = r2h[r]
        for h in lst:
            if h == cur:
                break
            rank_r = hr[h][r]
            if rank_r == 0:
                continue
            other = h2r[h]
            if other is None or hr[h][other] > rank_r:
                return Verdict(False, (r, h), mu.is_perfect)
    return Verdict(True, None, mu.is_perfect)


def rank_of_partner(inst: Instance, mu: Matching, side: str, agent: int) -> Optional[int]:
    p = mu.partner(side, agent)
    if p is None:
        return None
    return inst.rank(side, agent, p)


# --- file formats ---------------------------------------------------------


def _load_json(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def read_instance(path) -> Instance:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InstanceError(f"{path}: expected an object with n, resident_prefs, hospital_prefs")
    try:
        return Instance.from_dict(data)
    except InstanceError as e:
        raise InstanceError(f"{path}: {e}") from None


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict()) + "\n")


def read_matching(path, n: int) -> Matching:
    data = _load_json(path)
    if not isinstance(data, list):
        raise InstanceError(f"{path}: expected an array mapping resident -> hospital")
    for i, x in enumerate(data):
        if not isinstance(x, int) or isinstance(x, bool):
            raise InstanceError(f"{path}: record {i}: expected an integer, got {x!r}")
    try:
        return Matching.from_resident_array(data, n)
    except InstanceError as e:
        raise InstanceError(f"{path}: {e}") from None


def write_matching(mu: Matching, path) -> None:
    Path(path).write_text(json.dumps(mu.to_list()) + "\n")
