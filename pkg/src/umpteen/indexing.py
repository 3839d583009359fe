"""Lehmer-code permutation ranking and dense state indexing for finite boxes.

Permutations of m labels are identified with their lexicographic rank in
[0, m!), computed through the factorial number system. The same ranking is
shared by the operator builds on small graphs and by the killed puzzle
chain, whose state (walker position, label permutation) is packed into a
single integer position_index * m! + rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .permutations import Site


def lehmer_rank(perm: tuple[int, ...] | list[int]) -> int:
    """Lexicographic rank of a permutation of 0..m-1."""
    m = len(perm)
    rank = 0
    for i in range(m - 1):
        smaller = sum(1 for j in range(i + 1, m) if perm[j] < perm[i])
        rank += smaller * factorial(m - 1 - i)
    return rank


def lehmer_unrank(rank: int, m: int) -> tuple[int, ...]:
    """Inverse of lehmer_rank."""
    if not 0 <= rank < factorial(m):
        raise ValueError(f"rank {rank} out of range for m={m}")
    available = list(range(m))
    out = []
    for i in range(m):
        f = factorial(m - 1 - i)
        digit, rank = divmod(rank, f)
        out.append(available.pop(digit))
    return tuple(out)


def all_permutations(m: int) -> np.ndarray:
    """All permutations of 0..m-1 in lexicographic (= Lehmer rank) order.

    Shape (m!, m); row r is the permutation of rank r.
    """
    dtype = np.int8 if m <= 127 else np.int16
    return np.array(list(itertools.permutations(range(m))), dtype=dtype)


def lehmer_rank_array(perms: np.ndarray) -> np.ndarray:
    """Vectorised lehmer_rank over the rows of a (k, m) permutation array."""
    _, m = perms.shape
    ranks = np.zeros(perms.shape[0], dtype=np.int64)
    for i in range(m - 1):
        smaller = (perms[:, i + 1 :] < perms[:, i : i + 1]).sum(axis=1)
        ranks += smaller.astype(np.int64) * factorial(m - 1 - i)
    return ranks


def box_sites(d: int, L: int) -> list[Site]:
    """Sites of [-L, L]^d in lexicographic order."""
    return [tuple(p) for p in itertools.product(range(-L, L + 1), repeat=d)]


@dataclass
class BoxIndexer:
    """Dense integer encoding of puzzle states on the box [-L, L]^d.

    A state is (walker position, permutation of the m box sites); it is
    packed as position_index * m! + Lehmer rank of the permutation, a
    bijection onto [0, m * m!).
    """

    d: int
    L: int
    sites: list[Site] = field(init=False)
    site_index: dict[Site, int] = field(init=False)
    m: int = field(init=False)
    perm_count: int = field(init=False)
    state_count: int = field(init=False)

    def __post_init__(self) -> None:
        if self.d < 1 or self.L < 0:
            raise ValueError(f"bad box parameters d={self.d}, L={self.L}")
        self.sites = box_sites(self.d, self.L)
        self.site_index = {s: i for i, s in enumerate(self.sites)}
        self.m = len(self.sites)
        self.perm_count = factorial(self.m)
        self.state_count = self.m * self.perm_count

    @property
    def origin_index(self) -> int:
        return self.site_index[(0,) * self.d]

    def encode(self, position_index: int, perm: tuple[int, ...]) -> int:
        return position_index * self.perm_count + lehmer_rank(perm)

    def decode(self, state: int) -> tuple[int, tuple[int, ...]]:
        if not 0 <= state < self.state_count:
            raise ValueError(f"state {state} out of range [0, {self.state_count})")
        position_index, rank = divmod(state, self.perm_count)
        return position_index, lehmer_unrank(rank, self.m)

    def neighbor_index(self, position_index: int, axis: int, sign: int) -> int | None:
        """Index of the neighbouring box site, or None if it leaves the box."""
        site = self.sites[position_index]
        coord = site[axis] + sign
        if abs(coord) > self.L:
            return None
        return self.site_index[site[:axis] + (coord,) + site[axis + 1 :]]

    def edges(self) -> list[tuple[int, int]]:
        """Ordered-free adjacency pairs (i, j), i < j, of the box graph."""
        pairs = []
        for i, site in enumerate(self.sites):
            for axis in range(self.d):
                j = self.neighbor_index(i, axis, 1)
                if j is not None:
                    pairs.append((min(i, j), max(i, j)))
        return sorted(set(pairs))
