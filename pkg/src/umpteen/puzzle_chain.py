"""Exact iteration of the decorated walk (position, label permutation) on a box.

The state is the sliding puzzle on [-L, L]^d with every site labelled: a
step moves the walker to a uniform neighbour and swaps the labels of the
old and new positions; mass stepping outside the box is killed. Iterating
the kernel from (origin, identity) gives the probability of coming back
to (origin, identity) in exactly n steps while staying inside, which is a
certified lower bound on the infinite-lattice return probability p_n.

States are packed densely as position_index * m! + Lehmer rank (m box
sites), and one kernel step is a handful of vectorised scatter-adds: for
each box edge, the permutation-level effect of the label swap is a fixed
precomputed rearrangement of the m! ranks. The d=2, L=1 reference case has
9 * 9! = 3,265,920 states and runs in seconds; no transition matrix is
ever stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BudgetExceededError
from .indexing import BoxIndexer, all_permutations, lehmer_rank_array

DEFAULT_STATE_BUDGET = 1 << 23

MASS_TOLERANCE = 1e-12


class SparseDistribution:
    """Sub-probability distribution over encoded puzzle states.

    The vector is stored dense (the feasibility guard keeps the state
    space small enough); the mass deficit 1 - sum is what has been killed
    at the boundary so far.
    """

    __slots__ = ("vector",)

    def __init__(self, vector: np.ndarray):
        if np.any(vector < -MASS_TOLERANCE):
            raise ValueError("negative mass in distribution")
        total = float(vector.sum())
        if total > 1.0 + MASS_TOLERANCE:
            raise ValueError(f"total mass {total} exceeds 1")
        self.vector = vector

    @property
    def total_mass(self) -> float:
        return float(self.vector.sum())

    @property
    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.vector))

    @property
    def weights(self) -> dict[int, float]:
        idx = np.nonzero(self.vector)[0]
        return {int(i): float(self.vector[i]) for i in idx}


def initial_distribution(indexer: BoxIndexer) -> SparseDistribution:
    """Point mass at (origin, identity)."""
    vector = np.zeros(indexer.state_count)
    identity_rank = 0
    vector[indexer.origin_index * indexer.perm_count + identity_rank] = 1.0
    return SparseDistribution(vector)


def _check_feasible(indexer: BoxIndexer, budget: int) -> None:
    if indexer.state_count > budget:
        raise BudgetExceededError(
            f"box d={indexer.d}, L={indexer.L} has {indexer.state_count} states, "
            f"exceeding the budget of {budget}",
            required=indexer.state_count,
            budget=budget,
        )


@lru_cache(maxsize=4)
def _kernel_tables(d: int, L: int) -> tuple[BoxIndexer, dict[tuple[int, int], np.ndarray]]:
    """Per-edge rank rearrangements: swapping the labels at box positions
    (i, j) sends the permutation of rank r to rank swap_rank[(i, j)][r]."""
    indexer = BoxIndexer(d, L)
    perms = all_permutations(indexer.m)
    swap_rank: dict[tuple[int, int], np.ndarray] = {}
    for i, j in indexer.edges():
        swapped = perms.copy()
        swapped[:, [i, j]] = perms[:, [j, i]]
        swap_rank[(i, j)] = lehmer_rank_array(swapped)
    return indexer, swap_rank


def evolve(
    dist: SparseDistribution,
    steps: int,
    indexer: BoxIndexer,
    budget: int = DEFAULT_STATE_BUDGET,
) -> SparseDistribution:
    """Apply `steps` single-step kernels (uniform neighbour, swap, kill outside)."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    _check_feasible(indexer, budget)
    if steps == 0:
        return SparseDistribution(dist.vector.copy())
    cached_indexer, swap_rank = _kernel_tables(indexer.d, indexer.L)
    vec = dist.vector.copy()
    for _ in range(steps):
        vec = _step(vec, cached_indexer, swap_rank)
    return SparseDistribution(vec)


def _step(
    vec: np.ndarray, indexer: BoxIndexer, swap_rank: dict[tuple[int, int], np.ndarray]
) -> np.ndarray:
    f = indexer.perm_count
    inv = 1.0 / (2 * indexer.d)
    new = np.zeros_like(vec)
    for ix in range(indexer.m):
        block = vec[ix * f : (ix + 1) * f]
        if not block.any():
            continue
        contrib = block * inv
        for axis in range(indexer.d):
            for sign in (1, -1):
                iy = indexer.neighbor_index(ix, axis, sign)
                if iy is None:
                    continue
                rearrange = swap_rank[(min(ix, iy), max(ix, iy))]
                new[iy * f : (iy + 1) * f][rearrange] += contrib
    return new


@dataclass(frozen=True)
class ChainReturn:
    """Diagonal return quantities of the killed chain after two_n steps."""

    d: int
    L: int
    two_n: int
    chain_return: float
    stay_return: float
    total_mass: float

    @property
    def lower_bound(self) -> float:
        return self.chain_return


def chain_return_profile(
    d: int, L: int, max_two_n: int, budget: int = DEFAULT_STATE_BUDGET
) -> list[ChainReturn]:
    """ChainReturn records at every even time 0, 2, ..., max_two_n (one sweep).

    chain_return is the mass back at (origin, identity); stay_return is
    the total mass at the origin regardless of labels, i.e. the in-box
    return probability of the plain walk.
    """
    if max_two_n < 0 or max_two_n % 2:
        raise ValueError(f"max_two_n must be a non-negative even integer, got {max_two_n}")
    indexer = BoxIndexer(d, L)
    _check_feasible(indexer, budget)
    cached_indexer, swap_rank = _kernel_tables(d, L)
    f = cached_indexer.perm_count
    o = cached_indexer.origin_index
    vec = initial_distribution(cached_indexer).vector
    records = []
    for t in range(0, max_two_n + 1):
        if t % 2 == 0:
            records.append(
                ChainReturn(
                    d=d,
                    L=L,
                    two_n=t,
                    chain_return=float(vec[o * f]),
                    stay_return=float(vec[o * f : (o + 1) * f].sum()),
                    total_mass=float(vec.sum()),
                )
            )
        if t < max_two_n:
            vec = _step(vec, cached_indexer, swap_rank)
    return records


def chain_return(d: int, L: int, two_n: int, budget: int = DEFAULT_STATE_BUDGET) -> ChainReturn:
    """Exact in-box return probability of the decorated chain after two_n steps."""
    return chain_return_profile(d, L, two_n, budget=budget)[-1]


def lower_bound_p2n(d: int, L: int, two_n: int, budget: int = DEFAULT_STATE_BUDGET) -> float:
    """Certified lower bound on p_{2n}(Z^d): staying-in-box trajectories are
    a subset of all trajectories restoring the identity."""
    return chain_return(d, L, two_n, budget=budget).chain_return


def chain_return_exact(d: int, L: int, two_n: int, state_limit: int = 10_000) -> Fraction:
    """Rational-arithmetic replica of chain_return for small boxes.

    Validates floating-point rounding on d=1, L <= 2; refuses anything
    whose state space would not stay tiny.
    """
    if two_n < 0 or two_n % 2:
        raise ValueError(f"two_n must be a non-negative even integer, got {two_n}")
    indexer = BoxIndexer(d, L)
    if indexer.state_count > state_limit:
        raise BudgetExceededError(
            f"exact mode limited to {state_limit} states, box has {indexer.state_count}",
            required=indexer.state_count,
            budget=state_limit,
        )
    identity = tuple(range(indexer.m))
    start = (indexer.origin_index, identity)
    dist: dict[tuple[int, tuple[int, ...]], Fraction] = {start: Fraction(1)}
    step_prob = Fraction(1, 2 * d)
    for _ in range(two_n):
        new: dict[tuple[int, tuple[int, ...]], Fraction] = {}
        for (ix, perm), mass in dist.items():
            share = mass * step_prob
            for axis in range(d):
                for sign in (1, -1):
                    iy = indexer.neighbor_index(ix, axis, sign)
                    if iy is None:
                        continue
                    lst = list(perm)
                    lst[ix], lst[iy] = lst[iy], lst[ix]
                    key = (iy, tuple(lst))
                    new[key] = new.get(key, Fraction(0)) + share
        dist = new
    return dist.get(start, Fraction(0))
