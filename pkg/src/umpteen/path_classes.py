"""Flip-generated equivalence classes of walk heads.

A head (x_0, ..., x_{2n}) admits a flip at an odd position j when x_{j-1}
is flexible and j-1 is its first and only visit; the flip replaces x_j by
x_{j-1} - x_j + x_{j+1}, i.e. swaps the two steps around position j. The
class of a head is the breadth-first closure under admissible flips, with
admissibility re-evaluated in every member rather than assumed to commute.

The point of the construction: within one class, at most one member can
have identity transposition product, which is what turns class counting
into an upper bound on the return probability. The single-visit condition
on the flip site is what makes that provable: an identity product forces
the tail product after position j to fix x_{j-1} (possible to guarantee
only if the tail never touches that site again), which pins the exit step
down to a function of the shared prefix. Dropping the condition admits
four-step counterexamples with two identity members in one class. Visits
of the flip site happen at even positions, which flips never move, so
admissibility is stable across a class and closure is a true partition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BudgetExceededError
from .permutations import Site, origin, site_neg, site_sub
from .walks import WalkPath, is_identity_product

DEFAULT_CLASS_BUDGET = 1 << 20

Head = tuple[Site, ...]


def _as_head(path: WalkPath | Sequence[Site], two_n: int | None = None) -> Head:
    sites = path.sites if isinstance(path, WalkPath) else tuple(path)
    if two_n is not None:
        if len(sites) < two_n + 1:
            raise ValueError(f"path of {len(sites) - 1} steps shorter than two_n={two_n}")
        sites = sites[: two_n + 1]
    return sites


def flippable_positions(head: Head) -> list[int]:
    """Odd positions j where the head admits a flip: x_{j-1} is flexible
    and j-1 is its only visit."""
    first_visit: dict[Site, int] = {}
    visits: dict[Site, int] = {}
    for i, y in enumerate(head):
        if y not in first_visit:
            first_visit[y] = i
        visits[y] = visits.get(y, 0) + 1
    out = []
    for j in range(1, len(head) - 1, 2):
        y = head[j - 1]
        if first_visit[y] != j - 1 or visits[y] != 1:
            continue
        s1 = site_sub(head[j], y)
        s2 = site_sub(head[j + 1], head[j])
        if s2 != s1 and s2 != site_neg(s1):
            out.append(j)
    return out


def is_flippable(path: WalkPath | Sequence[Site], j: int) -> bool:
    """True iff position j is odd and x_{j-1} is a flexible single-visit site."""
    head = _as_head(path)
    if not 1 <= j <= len(head) - 2:
        raise IndexError(f"flip position {j} out of range [1, {len(head) - 2}]")
    if j % 2 == 0:
        return False
    return j in flippable_positions(head)


def flip(path: WalkPath | Sequence[Site], j: int) -> Head:
    """Replace x_j by x_{j-1} - x_j + x_{j+1}; an involution on admissible heads."""
    head = _as_head(path)
    if not is_flippable(head, j):
        raise ValueError(f"position {j} is not flippable")
    new_mid = tuple(a - b + c for a, b, c in zip(head[j - 1], head[j], head[j + 1]))
    return head[:j] + (new_mid,) + head[j + 1 :]


@dataclass
class PathClass:
    """A flip-closure class: its members, the generating head, and the
    flip positions that were admissible in that head."""

    members: set[Head]
    base: Head
    flip_positions: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.members)


def equivalence_class(
    path: WalkPath | Sequence[Site],
    two_n: int,
    budget: int = DEFAULT_CLASS_BUDGET,
) -> PathClass:
    """Breadth-first flip closure of the length-two_n head of the path."""
    base = _as_head(path, two_n)
    members: set[Head] = {base}
    queue = [base]
    while queue:
        current = queue.pop()
        for j in flippable_positions(current):
            flipped_mid = tuple(
                a - b + c for a, b, c in zip(current[j - 1], current[j], current[j + 1])
            )
            candidate = current[:j] + (flipped_mid,) + current[j + 1 :]
            if candidate not in members:
                if len(members) >= budget:
                    raise BudgetExceededError(
                        f"flip class exceeded budget of {budget} members",
                        required=len(members) + 1,
                        budget=budget,
                    )
                members.add(candidate)
                queue.append(candidate)
    return PathClass(members, base, frozenset(flippable_positions(base)))


def verify_unique_identity(pc: PathClass) -> int:
    """Number of class members with identity product; the claim is <= 1."""
    return sum(1 for head in pc.members if is_identity_product(head))


def enumerate_heads(d: int, two_n: int) -> Iterator[Head]:
    """All (2d)^two_n walk heads from the origin, in step-code order."""
    moves = []
    for axis in range(d):
        for sign in (1, -1):
            moves.append((axis, sign))
    for codes in itertools.product(range(2 * d), repeat=two_n):
        pos = origin(d)
        head = [pos]
        for s in codes:
            axis, sign = moves[s]
            pos = pos[:axis] + (pos[axis] + sign,) + pos[axis + 1 :]
            head.append(pos)
        yield tuple(head)


@dataclass
class PartitionReport:
    """Full flip-class partition of all heads of one length."""

    d: int
    two_n: int
    total_heads: int
    class_count: int
    classes_with_identity: int
    identity_members_total: int
    max_identity_members: int
    assigned_heads: int

    @property
    def is_partition(self) -> bool:
        return self.assigned_heads == self.total_heads


def partition_all_heads(d: int, two_n: int, budget: int = DEFAULT_CLASS_BUDGET) -> PartitionReport:
    """Partition every length-two_n head into flip classes and tally identity members.

    Each head must land in exactly one class (closure consistency); with
    at-most-one identity member per class, the number of classes holding
    an identity member reproduces the exact return count.
    """
    assigned: set[Head] = set()
    total = 0
    class_count = 0
    classes_with_identity = 0
    identity_total = 0
    max_identity = 0
    for head in enumerate_heads(d, two_n):
        total += 1
        if head in assigned:
            continue
        pc = equivalence_class(head, two_n, budget=budget)
        overlap = assigned & pc.members
        if overlap:
            raise AssertionError(
                f"flip classes overlap: {len(overlap)} heads reached from two bases"
            )
        assigned |= pc.members
        class_count += 1
        ids = verify_unique_identity(pc)
        identity_total += ids
        max_identity = max(max_identity, ids)
        if ids:
            classes_with_identity += 1
    return PartitionReport(
        d=d,
        two_n=two_n,
        total_heads=total,
        class_count=class_count,
        classes_with_identity=classes_with_identity,
        identity_members_total=identity_total,
        max_identity_members=max_identity,
        assigned_heads=len(assigned),
    )
