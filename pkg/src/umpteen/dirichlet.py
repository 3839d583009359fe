"""The walk generator restricted to a finite site set, with killing outside.

For a finite R in Z^d the operator acts on functions supported on R with
matrix entries 1/(2d) across lattice-adjacent pairs inside R and zero
elsewhere. Its norm controls the probability of staying inside R, and on
a box the top eigenpair is an explicit product of cosines: the eigenvalue
is cos(pi / (2(L+1))) with zero boundary one site outside the box. (A
naive reading would put the first node at distance L rather than L+1; the
L+1 value is the one direct diagonalisation confirms.)
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi

import numpy as np

from .indexing import box_sites
from .permutations import Site

DENSE_EIGENSOLVER_CUTOFF = 2000
POWER_ITERATION_TOL = 1e-12


@dataclass(frozen=True)
class FiniteSubset:
    """A finite set of lattice sites with a fixed (lexicographic) indexing."""

    sites: tuple[Site, ...]

    def __post_init__(self) -> None:
        if not self.sites:
            raise ValueError("subset must be nonempty")
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("duplicate sites in subset")
        dims = {len(s) for s in self.sites}
        if len(dims) != 1:
            raise ValueError("sites of mixed dimension")

    @classmethod
    def from_sites(cls, sites) -> "FiniteSubset":
        return cls(tuple(sorted(sites)))

    @classmethod
    def box(cls, d: int, L: int) -> "FiniteSubset":
        return cls(tuple(box_sites(d, L)))

    @property
    def d(self) -> int:
        return len(self.sites[0])

    @property
    def index(self) -> dict[Site, int]:
        return {s: i for i, s in enumerate(self.sites)}

    def sup_diameter(self) -> int:
        """Max coordinate extent over the axes (0 for a single site)."""
        arr = np.array(self.sites)
        return int((arr.max(axis=0) - arr.min(axis=0)).max())

    def bounding_half_side(self) -> int:
        """Smallest L such that some translate of [-L, L]^d contains the set."""
        arr = np.array(self.sites)
        extents = arr.max(axis=0) - arr.min(axis=0)
        return int(-(-extents.max() // 2))


@dataclass(frozen=True)
class DirichletOperator:
    """Symmetric matrix of the killed walk generator on a finite subset."""

    subset: FiniteSubset
    action: np.ndarray

    @classmethod
    def build(cls, subset: FiniteSubset) -> "DirichletOperator":
        d = subset.d
        index = subset.index
        n = len(subset.sites)
        action = np.zeros((n, n))
        w = 1.0 / (2 * d)
        for i, site in enumerate(subset.sites):
            for axis in range(d):
                for sign in (1, -1):
                    neighbor = site[:axis] + (site[axis] + sign,) + site[axis + 1 :]
                    j = index.get(neighbor)
                    if j is not None:
                        action[i, j] = w
        return cls(subset, action)


def operator_norm(subset: FiniteSubset, tol: float = POWER_ITERATION_TOL) -> float:
    """Largest absolute eigenvalue of the killed generator on the subset."""
    matrix = DirichletOperator.build(subset).action
    n = matrix.shape[0]
    if n <= DENSE_EIGENSOLVER_CUTOFF:
        eigs = np.linalg.eigvalsh(matrix)
        return float(max(abs(eigs[0]), abs(eigs[-1])))
    # Power iteration on M^2 (positive semidefinite, so plain ratios converge).
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    value = 0.0
    for _ in range(100_000):
        w = matrix @ (matrix @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        new_value = float(np.sqrt(v @ (matrix @ (matrix @ v))))
        if abs(new_value - value) <= tol:
            return new_value
        value = new_value
    raise RuntimeError("power iteration did not converge")


@dataclass(frozen=True)
class CosineEigenpair:
    """Exact top eigenpair of the killed generator on the box [-L, L]^d."""

    d: int
    L: int
    eigenvalue: float
    vector: np.ndarray
    value_at_origin: float
    origin_constant: float
    residual: float


def cosine_eigenpair(d: int, L: int) -> CosineEigenpair:
    """The product-of-cosines eigenvector on the box, with sanity bounds.

    The normalised vector u(x) = c prod_i cos(pi x_i / (2(L+1))) satisfies
    the eigen-equation exactly (the cosine vanishes one site outside the
    box, where the operator kills); c = (L+1)^{-d/2} in closed form. The
    asserted bounds u(0) >= (2L)^{-d/2} and eigenvalue >= 1 - pi^2/(8 L^2)
    are guaranteed, so a violation means a broken build.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    subset = FiniteSubset.box(d, L)
    arr = np.array(subset.sites)
    components = np.cos(pi * arr / (2.0 * (L + 1)))
    vector = components.prod(axis=1)
    vector /= np.linalg.norm(vector)
    eigenvalue = cos(pi / (2.0 * (L + 1)))
    matrix = DirichletOperator.build(subset).action
    residual = float(np.linalg.norm(matrix @ vector - eigenvalue * vector))
    value_at_origin = float(abs(vector[subset.index[(0,) * d]]))
    origin_constant = value_at_origin * L ** (d / 2.0)
    assert value_at_origin >= (2.0 * L) ** (-d / 2.0) - 1e-12
    assert eigenvalue >= 1.0 - pi * pi / (8.0 * L * L)
    return CosineEigenpair(
        d=d,
        L=L,
        eigenvalue=eigenvalue,
        vector=vector,
        value_at_origin=value_at_origin,
        origin_constant=origin_constant,
        residual=residual,
    )


def box_return_probability(d: int, L: int, n: int) -> float:
    """Probability of staying in the box for n steps and returning to 0.

    Computed as n matrix-vector products of the killed generator applied
    to the origin indicator.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    subset = FiniteSubset.box(d, L)
    matrix = DirichletOperator.build(subset).action
    origin_idx = subset.index[(0,) * d]
    v = np.zeros(len(subset.sites))
    v[origin_idx] = 1.0
    for _ in range(n):
        v = matrix @ v
    return float(v[origin_idx])


def box_norm_bound(subset: FiniteSubset) -> float:
    """cos(pi / (2(L+1))) for the smallest enclosing box of half-side L."""
    L = max(1, subset.bounding_half_side())
    return cos(pi / (2.0 * (L + 1)))


def random_connected_subset(d: int, size: int, rng: np.random.Generator) -> FiniteSubset:
    """Random connected site set grown from the origin (certificate inputs)."""
    if size < 1:
        raise ValueError("size must be >= 1")
    sites = {(0,) * d}
    frontier = [(0,) * d]
    while len(sites) < size:
        base = frontier[rng.integers(0, len(frontier))]
        axis = int(rng.integers(0, d))
        sign = 1 if rng.integers(0, 2) == 0 else -1
        candidate = base[:axis] + (base[axis] + sign,) + base[axis + 1 :]
        if candidate not in sites:
            sites.add(candidate)
            frontier.append(candidate)
    return FiniteSubset.from_sites(sites)
