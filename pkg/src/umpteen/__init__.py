"""Sliding-puzzle random walks on Z^d and the spectral theory they compute.

The package cross-validates one family of objects three ways: the
probability p_{2n} that the infinite-board puzzle returns to its initial
state (exact enumeration, Monte Carlo, and a killed-chain lower bound),
the flip-class mechanism behind its upper bound, the killed walk operator
on finite sets, exact spectra of the permutation-block operator on small
graphs with their representation-theoretic decomposition, and moment-based
two-sided bounds on the integrated density of states near the spectral
edge.
"""

__version__ = "0.1.0"

from .permutations import Site, SparsePermutation
from .walks import (
    ExactReturnCount,
    MonteCarloEstimate,
    WalkPath,
    exact_return_count,
    mc_return_probability,
    path_statistics,
    sample_walk,
    transposition_product,
)

__all__ = [
    "__version__",
    "Site",
    "SparsePermutation",
    "WalkPath",
    "ExactReturnCount",
    "MonteCarloEstimate",
    "sample_walk",
    "transposition_product",
    "path_statistics",
    "exact_return_count",
    "mc_return_probability",
]
