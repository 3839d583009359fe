"""Exact spectra of the transposition-block operator on small graphs.

On a finite graph the operator acts on functions from vertices to the
group algebra of all vertex permutations; its (x, y) block for adjacent
x, y is the swap of x and y acting by left multiplication. The full
(regular) build of size v * v! decomposes into one copy per tableau of
the irreducible builds of size v * dim, which is checked here as exact
multiset equality of eigenvalues. Moments of the complete-graph operator
are computed by counting walks whose accumulated swap product is the
identity, never by forming the giant matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .errors import BudgetExceededError
from .ids import ids_one_dim
from .indexing import all_permutations, box_sites, lehmer_rank_array
from .young import IrrepMatrices, YoungDiagram, enumerate_diagrams_dims

REGULAR_SIZE_GUARD = 7 * factorial(7)
DENSE_VERTEX_CUTOFF = 5
KN_MAX_N = 8
KN_MAX_POWER = 8
PAIRING_TOL = 1e-8


@dataclass(frozen=True)
class FiniteGraph:
    """Connected simple graph on an ordered vertex list."""

    name: str
    vertices: tuple
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        v = len(self.vertices)
        for i, j in self.edges:
            if i == j:
                raise ValueError("self-loops not allowed")
            if not (0 <= i < v and 0 <= j < v):
                raise ValueError(f"edge ({i}, {j}) out of range")
        if v > 1 and not self._connected():
            raise ValueError(f"graph {self.name} is not connected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        adj = self.adjacency()
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(self.vertices)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.vertices]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return [sorted(nbrs) for nbrs in adj]

    @property
    def v(self) -> int:
        return len(self.vertices)

    @property
    def max_degree(self) -> int:
        return max(len(nbrs) for nbrs in self.adjacency())

    @classmethod
    def complete(cls, n: int) -> "FiniteGraph":
        edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
        return cls(f"K{n}", tuple(range(n)), edges)

    @classmethod
    def path(cls, n: int) -> "FiniteGraph":
        return cls(f"P{n}", tuple(range(n)), tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "FiniteGraph":
        edges = tuple((i, i + 1) for i in range(n - 1)) + ((0, n - 1),)
        return cls(f"C{n}", tuple(range(n)), edges)

    @classmethod
    def box(cls, d: int, L: int) -> "FiniteGraph":
        sites = box_sites(d, L)
        index = {s: i for i, s in enumerate(sites)}
        edges = []
        for i, site in enumerate(sites):
            for axis in range(d):
                neighbor = site[:axis] + (site[axis] + 1,) + site[axis + 1 :]
                j = index.get(neighbor)
                if j is not None:
                    edges.append((i, j))
        return cls(f"B{L},{d}", tuple(sites), tuple(edges))


@dataclass(frozen=True)
class SpectrumRecord:
    """Sorted eigenvalues with the divisor of the counting function."""

    eigenvalues: np.ndarray
    normalization: int

    def counting(self, lam: float) -> float:
        return float(np.searchsorted(self.eigenvalues, lam, side="right")) / self.normalization


def build_regular(graph: FiniteGraph, guard: int = REGULAR_SIZE_GUARD):
    """Matrix of the full operator on functions vertex -> group algebra.

    Size v * v!; dense below the vertex cutoff, scipy CSR above. Block
    (x, y) for an edge permutes the v! permutations by left-multiplying
    with the swap of x and y.
    """
    v = graph.v
    size = v * factorial(v)
    if size > guard:
        raise BudgetExceededError(
            f"regular build of size {size} exceeds guard {guard}", required=size, budget=guard
        )
    f = factorial(v)
    perms = all_permutations(v)
    cols = np.arange(f)
    row_chunks = []
    col_chunks = []
    for i, j in graph.edges:
        # left multiplication by (i j): swap the *values* i and j
        swapped = perms.copy()
        swapped[perms == i] = -1
        swapped[perms == j] = i
        swapped[swapped == -1] = j
        target = lehmer_rank_array(swapped)
        row_chunks += [i * f + target, j * f + target]
        col_chunks += [j * f + cols, i * f + cols]
    rows = np.concatenate(row_chunks)
    columns = np.concatenate(col_chunks)
    if v <= DENSE_VERTEX_CUTOFF:
        matrix = np.zeros((size, size))
        matrix[rows, columns] = 1.0
        return matrix
    from scipy.sparse import coo_matrix

    return coo_matrix((np.ones(len(rows)), (rows, columns)), shape=(size, size)).tocsr()


def build_irrep(graph: FiniteGraph, diagram: YoungDiagram) -> np.ndarray:
    """Block matrix of the operator in one irreducible representation."""
    if diagram.n_boxes != graph.v:
        raise ValueError("diagram size must match the vertex count")
    rep = IrrepMatrices(diagram)
    dim = rep.dim
    size = graph.v * dim
    matrix = np.zeros((size, size))
    for i, j in graph.edges:
        block = rep.transposition(i + 1, j + 1)
        matrix[i * dim : (i + 1) * dim, j * dim : (j + 1) * dim] = block
        matrix[j * dim : (j + 1) * dim, i * dim : (i + 1) * dim] = block
    return matrix


def regular_spectrum(graph: FiniteGraph) -> SpectrumRecord:
    matrix = build_regular(graph)
    if not isinstance(matrix, np.ndarray):
        matrix = matrix.toarray()
    eigs = np.linalg.eigvalsh(matrix)
    return SpectrumRecord(np.sort(eigs), graph.v * factorial(graph.v))


def irrep_spectrum(graph: FiniteGraph, diagram: YoungDiagram) -> SpectrumRecord:
    eigs = np.linalg.eigvalsh(build_irrep(graph, diagram))
    dim = len(eigs) // graph.v
    return SpectrumRecord(np.sort(eigs), graph.v * dim)


@dataclass(frozen=True)
class DecompositionReport:
    graph: str
    regular_size: int
    assembled_size: int
    max_pairing_deviation: float
    max_counting_deviation: float

    @property
    def count_identity_ok(self) -> bool:
        return self.regular_size == self.assembled_size


def verify_decomposition(graph: FiniteGraph, tol: float = PAIRING_TOL) -> DecompositionReport:
    """Check spectrum(regular) = union over diagrams of dim copies of
    spectrum(irrep), as multisets, and the counting-function identity."""
    reg = regular_spectrum(graph)
    assembled = []
    weighted = []  # (plancherel weight, record) for the counting check
    v = graph.v
    for diagram, dim in enumerate_diagrams_dims(v):
        record = irrep_spectrum(graph, diagram)
        for _ in range(dim):
            assembled.append(record.eigenvalues)
        weighted.append((Fraction(dim * dim, factorial(v)), record))
    pool = np.sort(np.concatenate(assembled))
    if len(pool) != len(reg.eigenvalues):
        return DecompositionReport(graph.name, len(reg.eigenvalues), len(pool), np.inf, np.inf)
    pairing = float(np.max(np.abs(pool - reg.eigenvalues)))

    # Counting functions compared at midpoints between eigenvalue clusters;
    # probing inside a cluster of numerically-tied eigenvalues would compare
    # arbitrary sub-tallies of the tie.
    levels = np.sort(np.concatenate([pool, reg.eigenvalues]))
    gaps = np.nonzero(np.diff(levels) > 10 * tol)[0]
    probes = np.concatenate(
        [[levels[0] - 1.0], (levels[gaps] + levels[gaps + 1]) / 2.0, [levels[-1] + 1.0]]
    )
    counting_dev = 0.0
    for x in probes:
        mixture = sum(float(w) * rec.counting(x) for w, rec in weighted)
        counting_dev = max(counting_dev, abs(reg.counting(x) - mixture))
    return DecompositionReport(graph.name, len(reg.eigenvalues), len(pool), pairing, counting_dev)


def identity_walk_count(graph: FiniteGraph, start: int, n: int) -> int:
    """Closed n-walks from the start vertex whose swap product is the identity.

    Depth-first over the adjacency with swap/unswap of vertex labels; a
    branch whose label mismatch count exceeds twice the remaining steps
    can never recover and is pruned.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    adjacency = graph.adjacency()
    labels = list(range(graph.v))
    count = 0
    mismatches = 0

    def swap(a: int, b: int) -> None:
        nonlocal mismatches
        mismatches -= (labels[a] != a) + (labels[b] != b)
        labels[a], labels[b] = labels[b], labels[a]
        mismatches += (labels[a] != a) + (labels[b] != b)

    def recurse(pos: int, remaining: int) -> None:
        nonlocal count
        if remaining == 0:
            if mismatches == 0:
                count += 1
            return
        if mismatches > 2 * remaining:
            return
        for nxt in adjacency[pos]:
            swap(pos, nxt)
            recurse(nxt, remaining - 1)
            swap(pos, nxt)

    recurse(start, n)
    return count


@dataclass(frozen=True)
class KnMoment:
    """Normalised trace moment of the complete-graph operator."""

    N: int
    power: int
    identity_walks: int
    moment: Fraction  # tr H^n / (N * N!)
    scaled: Fraction  # tr (H / sqrt(N))^n / (N * N!), exact for even n

    def scaled_float(self) -> float:
        return float(self.scaled)


def kn_moment(N: int, power: int) -> KnMoment:
    """Moment of order `power` for the complete graph on N vertices.

    The normalised trace equals the number of identity-product closed
    walks from any fixed vertex, counted by enumeration; odd powers
    vanish since an odd number of swaps is never the identity.
    """
    if not 2 <= N <= KN_MAX_N:
        raise ValueError(f"N={N} outside supported range [2, {KN_MAX_N}]")
    if not 0 <= power <= KN_MAX_POWER:
        raise ValueError(f"power={power} outside supported range [0, {KN_MAX_POWER}]")
    count = identity_walk_count(FiniteGraph.complete(N), 0, power)
    if power % 2:
        assert count == 0
        scaled = Fraction(0)
    else:
        scaled = Fraction(count, N ** (power // 2))
    return KnMoment(N=N, power=power, identity_walks=count, moment=Fraction(count), scaled=scaled)


def catalan(k: int) -> int:
    """Limit of the scaled even moments: the k-th Catalan number."""
    return comb(2 * k, k) // (k + 1)


def tau_moment_regular(graph: FiniteGraph, vertex: int, n: int) -> int:
    """Identity coefficient of the (vertex, vertex) block of the n-th power.

    Computed spectrally-free as e^T H^n e with e the basis vector at
    (vertex, identity permutation); always a non-negative integer.
    """
    matrix = build_regular(graph)
    f = factorial(graph.v)
    e = np.zeros(graph.v * f)
    e[vertex * f] = 1.0  # identity permutation has Lehmer rank 0
    v = e
    for _ in range(n):
        v = matrix @ v
    value = float(e @ v)
    rounded = round(value)
    assert abs(value - rounded) < 1e-6, f"non-integer moment {value}"
    return int(rounded)


@dataclass(frozen=True)
class InteriorTraceCheck:
    vertex_coord: int
    power: int
    count: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.count == self.expected


@dataclass(frozen=True)
class BoxIdsReport:
    L: int
    sup_distance: float
    spectrum_min: float
    spectrum_max: float
    interior_checks: tuple[InteriorTraceCheck, ...]

    @property
    def interior_ok(self) -> bool:
        return all(c.ok for c in self.interior_checks)


def box_ids_check(L: int, grid: np.ndarray | None = None) -> BoxIdsReport:
    """Compare the d=1 box counting function against the explicit limit CDF.

    Reports the sup distance on the grid (no rate is asserted) and checks
    that interior diagonal trace moments, for powers too small for the
    walk to feel the boundary, equal the free d=1 walk counts.
    """
    if L > 2:
        raise BudgetExceededError(
            f"d=1 boxes supported up to L=2 (size 600), got L={L}",
            required=(2 * L + 1) * factorial(2 * L + 1),
            budget=600,
        )
    graph = FiniteGraph.box(1, L)
    record = regular_spectrum(graph)
    if grid is None:
        grid = np.linspace(-2.0, 2.0, 81)
    sup = max(abs(record.counting(x) - ids_one_dim(x)) for x in grid)
    checks = []
    for idx, site in enumerate(graph.vertices):
        coord = site[0]
        max_power = 2 * (L - abs(coord))
        for power in range(2, max_power + 1, 2):
            count = tau_moment_regular(graph, idx, power)
            checks.append(
                InteriorTraceCheck(
                    vertex_coord=coord,
                    power=power,
                    count=count,
                    expected=comb(power, power // 2),
                )
            )
    return BoxIdsReport(
        L=L,
        sup_distance=float(sup),
        spectrum_min=float(record.eigenvalues[0]),
        spectrum_max=float(record.eigenvalues[-1]),
        interior_checks=tuple(checks),
    )
