"""Simple random walk on Z^d, its transposition product, and return probabilities.

Each walk step is one of the 2d unit moves. Steps are encoded as integers
s in [0, 2d): axis = s // 2, direction = +1 if s is even else -1. All
sampling goes through counter-based Philox generators keyed by
(seed, block_index), so runs replay bit-for-bit on any platform and the
sample blocks can be distributed over workers without changing results.

The walk of length n drags a transposition along every step; the
accumulated product pi_n = (X0 X1)(X1 X2)...(X_{n-1} X_n) always maps X_n
back to X_0, and the return probability p_{2n} is the chance that pi_{2n}
is the identity. p_{2n} is computed three ways: exhaustive enumeration
(exact), Monte Carlo sampling, and (elsewhere) a killed chain lower bound.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BudgetExceededError
from .permutations import (
    Site,
    SparsePermutation,
    is_identity_product,
    origin,
    product_of_transpositions,
    site_neg,
    site_parity,
    site_sub,
)

MAX_DIMENSION = 4
DEFAULT_ENUMERATION_BUDGET = 1 << 28
MC_BLOCK_SIZE = 1 << 16
FLEX_BLOCK_SIZE = 1 << 12

# 97.5% normal quantile for the 95% Wilson interval.
Z95 = 1.959963984540054


def _check_dimension(d: int) -> None:
    if not 1 <= d <= MAX_DIMENSION:
        raise ValueError(f"dimension d={d} outside supported range [1, {MAX_DIMENSION}]")


def _philox(seed: int, stream: int) -> np.random.Generator:
    """Philox generator keyed by (seed, stream); the key layout is the contract."""
    key = (int(seed) & 0xFFFFFFFFFFFFFFFF) << 64 | (stream & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key))


def _codes_to_sites(codes: Sequence[int], d: int) -> tuple[Site, ...]:
    pos = [0] * d
    sites = [tuple(pos)]
    for s in codes:
        axis = s >> 1
        pos[axis] += 1 - 2 * (s & 1)
        sites.append(tuple(pos))
    return tuple(sites)


@dataclass(frozen=True)
class WalkPath:
    """A nearest-neighbour path X_0, ..., X_n on Z^d starting at the origin."""

    sites: tuple[Site, ...]

    def __post_init__(self) -> None:
        if not self.sites:
            raise ValueError("empty path")
        d = len(self.sites[0])
        _check_dimension(d)
        if self.sites[0] != origin(d):
            raise ValueError("path must start at the origin")
        for a, b in zip(self.sites, self.sites[1:]):
            if sum(abs(u - v) for u, v in zip(a, b)) != 1:
                raise ValueError(f"non-unit step {a} -> {b}")

    @property
    def d(self) -> int:
        return len(self.sites[0])

    @property
    def n_steps(self) -> int:
        return len(self.sites) - 1


@dataclass
class PathStatistics:
    """First-visit times, even-range order, and flexible sites of one path.

    A site is flexible when the two steps right after its first visit are
    neither equal nor opposite. Sites first visited with fewer than two
    steps remaining are undecidable within the path and never counted as
    flexible; `decided_even` lists the even-range sites whose flexibility
    was decided.
    """

    first_visit: dict[Site, int]
    range_even: list[Site]
    flexible: set[Site]
    flexible_even: set[Site]
    n_steps: int

    @property
    def decided_even(self) -> list[Site]:
        cutoff = self.n_steps - 2
        return [y for y in self.range_even if self.first_visit[y] <= cutoff]


class ExactReturnCount(NamedTuple):
    identity_count: int
    total: int

    def probability(self) -> Fraction:
        return Fraction(self.identity_count, self.total)


@dataclass(frozen=True)
class MonteCarloEstimate:
    samples: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int


@dataclass(frozen=True)
class FlexSummary:
    """Aggregate flexible-site statistics over sampled walks.

    `flexible_fraction` pools flexible and decided even-range counts over
    all samples (a per-sample ratio-of-means would be biased by the random
    denominator); `fraction_se` is its linearised standard error.
    """

    d: int
    n_steps: int
    samples: int
    seed: int
    mean_flex_even: float
    quantiles: dict[str, float]
    flexible_total: int
    decided_total: int
    flexible_fraction: float
    fraction_se: float


def wilson_interval(hits: int, samples: int, z: float = Z95) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not 0 <= hits <= samples:
        raise ValueError("hits outside [0, samples]")
    p = hits / samples
    z2 = z * z
    denom = 1.0 + z2 / samples
    center = (p + z2 / (2 * samples)) / denom
    half = z * math.sqrt(p * (1.0 - p) / samples + z2 / (4.0 * samples * samples)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def sample_walk(d: int, n_steps: int, seed: int) -> WalkPath:
    """One walk of n_steps uniform unit moves; deterministic given seed."""
    _check_dimension(d)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    rng = _philox(seed, 0)
    codes = rng.integers(0, 2 * d, size=n_steps, dtype=np.int8)
    return WalkPath(_codes_to_sites(codes.tolist(), d))


def transposition_product(path: WalkPath | Sequence[Site]) -> SparsePermutation:
    """Left-to-right product of the step transpositions of the path."""
    sites = path.sites if isinstance(path, WalkPath) else tuple(path)
    if len(sites) < 1:
        raise ValueError("path must contain at least one site")
    return product_of_transpositions(sites)


def path_statistics(path: WalkPath | Sequence[Site]) -> PathStatistics:
    """All path statistics in one pass over the sites."""
    sites = path.sites if isinstance(path, WalkPath) else tuple(path)
    n = len(sites) - 1
    first_visit: dict[Site, int] = {}
    range_even: list[Site] = []
    flexible: set[Site] = set()
    for j, y in enumerate(sites):
        if y in first_visit:
            continue
        first_visit[y] = j
        if site_parity(y) == 0:
            range_even.append(y)
        if j + 2 <= n:
            s1 = site_sub(sites[j + 1], y)
            s2 = site_sub(sites[j + 2], sites[j + 1])
            if s2 != s1 and s2 != site_neg(s1):
                flexible.add(y)
    flexible_even = {y for y in flexible if site_parity(y) == 0}
    return PathStatistics(first_visit, range_even, flexible, flexible_even, n)


def exact_return_count(
    d: int, two_n: int, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> ExactReturnCount:
    """Exhaustively count length-two_n step sequences with identity product.

    Depth-first enumeration over all (2d)^two_n sequences; branches whose
    l1 distance to the origin already exceeds the remaining steps cannot
    close, hence cannot reach the identity, and are pruned (result-
    invariant). Counts are exact integers.
    """
    _check_dimension(d)
    if two_n < 0 or two_n % 2:
        raise ValueError(f"two_n must be a non-negative even integer, got {two_n}")
    total = (2 * d) ** two_n
    if total > budget:
        raise BudgetExceededError(
            f"enumeration of (2d)^2n = {total} sequences exceeds budget {budget}",
            required=total,
            budget=budget,
        )
    if two_n == 0:
        return ExactReturnCount(1, 1)

    labels: dict[Site, Site] = {}
    mismatches = 0
    identity_count = 0

    def swap(a: Site, b: Site) -> None:
        nonlocal mismatches
        va = labels.get(a, a)
        vb = labels.get(b, b)
        mismatches -= (va != a) + (vb != b)
        labels[a] = vb
        labels[b] = va
        mismatches += (vb != a) + (va != b)

    def recurse(pos: Site, remaining: int, dist: int) -> None:
        nonlocal identity_count
        if remaining == 0:
            if mismatches == 0:
                identity_count += 1
            return
        for axis in range(d):
            c = pos[axis]
            for sign in (1, -1):
                new_dist = dist - abs(c) + abs(c + sign)
                if new_dist > remaining - 1:
                    continue
                nxt = pos[:axis] + (c + sign,) + pos[axis + 1 :]
                swap(pos, nxt)
                recurse(nxt, remaining - 1, new_dist)
                swap(pos, nxt)

    recurse(origin(d), two_n, 0)
    return ExactReturnCount(identity_count, total)


def _mc_block(args: tuple[int, int, int, int, int]) -> int:
    """Hits in one sample block; top-level so process pools can pickle it."""
    d, two_n, seed, block_index, block_samples = args
    rng = _philox(seed, block_index)
    codes = rng.integers(0, 2 * d, size=(block_samples, two_n), dtype=np.int8)
    signs = 1 - 2 * (codes & 1)
    axes = codes >> 1
    closed = np.ones(block_samples, dtype=bool)
    for axis in range(d):
        closed &= ((axes == axis) * signs).sum(axis=1) == 0
    hits = 0
    for row in codes[closed]:
        if is_identity_product(_codes_to_sites(row.tolist(), d)):
            hits += 1
    return hits


def mc_return_probability(
    d: int, two_n: int, samples: int, seed: int, workers: int = 1
) -> MonteCarloEstimate:
    """Monte Carlo estimate of p_{2n}(Z^d) with a 95% Wilson interval.

    Samples are split into fixed-size blocks with per-block Philox streams,
    so the result is identical for any worker count. The identity of the
    product forces a closed walk, so only closed samples are decoded.
    """
    _check_dimension(d)
    if two_n < 0 or two_n % 2:
        raise ValueError(f"two_n must be a non-negative even integer, got {two_n}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if two_n == 0:
        return MonteCarloEstimate(samples, samples, 1.0, *wilson_interval(samples, samples), seed)

    blocks = []
    remaining = samples
    index = 0
    while remaining > 0:
        size = min(MC_BLOCK_SIZE, remaining)
        blocks.append((d, two_n, seed, index, size))
        remaining -= size
        index += 1

    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_mc_block, blocks))
    else:
        hits = sum(_mc_block(b) for b in blocks)

    p_hat = hits / samples
    ci_low, ci_high = wilson_interval(hits, samples)
    return MonteCarloEstimate(samples, hits, p_hat, ci_low, ci_high, seed)


def iter_sampled_heads(d: int, n_steps: int, count: int, seed: int):
    """Site tuples of `count` sampled walks, drawn from per-block streams."""
    _check_dimension(d)
    done = 0
    block_index = 0
    while done < count:
        size = min(FLEX_BLOCK_SIZE, count - done)
        rng = _philox(seed, block_index)
        codes = rng.integers(0, 2 * d, size=(size, n_steps), dtype=np.int8)
        for i in range(size):
            yield _codes_to_sites(codes[i].tolist(), d)
        done += size
        block_index += 1


def flex_statistics(d: int, n_steps: int, samples: int, seed: int) -> FlexSummary:
    """Sample walks and summarise flexible-vertex counts and fractions."""
    _check_dimension(d)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    counts = np.empty(samples, dtype=np.int64)
    flexible_total = 0
    decided_total = 0
    per_sample: list[tuple[int, int]] = []

    for i, head in enumerate(iter_sampled_heads(d, n_steps, samples, seed)):
        stats = path_statistics(head)
        counts[i] = len(stats.flexible_even)
        decided = stats.decided_even
        flex_decided = sum(1 for y in decided if y in stats.flexible_even)
        per_sample.append((flex_decided, len(decided)))
        flexible_total += flex_decided
        decided_total += len(decided)

    if decided_total > 0:
        fraction = flexible_total / decided_total
        resid = sum((f - fraction * m) ** 2 for f, m in per_sample)
        se = math.sqrt(resid) / decided_total
    else:
        fraction = float("nan")
        se = float("nan")
    q10, q50, q90 = np.quantile(counts, [0.1, 0.5, 0.9])
    return FlexSummary(
        d=d,
        n_steps=n_steps,
        samples=samples,
        seed=seed,
        mean_flex_even=float(counts.mean()),
        quantiles={"q10": float(q10), "q50": float(q50), "q90": float(q90)},
        flexible_total=flexible_total,
        decided_total=decided_total,
        flexible_fraction=fraction,
        fraction_se=se,
    )
