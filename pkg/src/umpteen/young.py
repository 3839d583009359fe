"""Partitions, standard tableaux, Plancherel weights, and orthogonal
transposition matrices.

Irreducible representations of the symmetric group on N letters are
labelled by diagrams with N boxes; the tableau basis realises every
transposition as a real orthogonal involution (Young's orthogonal form),
with adjacent-swap matrix entries read off inverse axial distances and
general transpositions assembled by conjugation. Dimensions are computed
two independent ways (growth recursion and the hook length product) and
cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt

import numpy as np

MAX_N = 10


@dataclass(frozen=True)
class YoungDiagram:
    """A partition drawn as left-aligned rows of boxes."""

    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValueError("empty diagram")
        if any(r < 1 for r in self.rows):
            raise ValueError(f"rows must be positive: {self.rows}")
        if any(a < b for a, b in zip(self.rows, self.rows[1:])):
            raise ValueError(f"rows must be weakly decreasing: {self.rows}")

    @property
    def n_boxes(self) -> int:
        return sum(self.rows)

    def successors(self) -> list["YoungDiagram"]:
        """Diagrams obtained by adding one box, top row first."""
        out = []
        for i in range(len(self.rows)):
            if i == 0 or self.rows[i - 1] > self.rows[i]:
                out.append(YoungDiagram(self.rows[:i] + (self.rows[i] + 1,) + self.rows[i + 1 :]))
        out.append(YoungDiagram(self.rows + (1,)))
        return out

    def predecessors(self) -> list["YoungDiagram"]:
        """Diagrams obtained by removing one corner box."""
        out = []
        for i in range(len(self.rows)):
            if i == len(self.rows) - 1 or self.rows[i] > self.rows[i + 1]:
                if self.rows[i] == 1:
                    if i > 0:
                        out.append(YoungDiagram(self.rows[:i]))
                else:
                    out.append(
                        YoungDiagram(self.rows[:i] + (self.rows[i] - 1,) + self.rows[i + 1 :])
                    )
        return out

    def hook_lengths(self) -> list[int]:
        cols = conjugate(self.rows)
        hooks = []
        for i, row_len in enumerate(self.rows):
            for j in range(row_len):
                hooks.append((row_len - j) + (cols[j] - i) - 1)
        return hooks

    def dim_hook(self) -> int:
        """Tableau count by the hook length product."""
        product = 1
        for h in self.hook_lengths():
            product *= h
        n = self.n_boxes
        assert factorial(n) % product == 0
        return factorial(n) // product


def conjugate(rows: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sum(1 for r in rows if r > j) for j in range(rows[0]))


def partitions(N: int) -> list[YoungDiagram]:
    """All diagrams with N boxes, in descending lexicographic order."""
    if N < 1:
        raise ValueError("N must be >= 1")

    def gen(remaining: int, cap: int) -> list[tuple[int, ...]]:
        if remaining == 0:
            return [()]
        out = []
        for first in range(min(cap, remaining), 0, -1):
            for rest in gen(remaining - first, first):
                out.append((first,) + rest)
        return out

    return [YoungDiagram(rows) for rows in gen(N, N)]


@lru_cache(maxsize=None)
def _dim_growth(rows: tuple[int, ...]) -> int:
    if sum(rows) == 1:
        return 1
    return sum(_dim_growth(mu.rows) for mu in YoungDiagram(rows).predecessors())


def dim_growth(diagram: YoungDiagram) -> int:
    """Tableau count by the growth recursion (independent of hooks)."""
    return _dim_growth(diagram.rows)


def enumerate_diagrams_dims(N: int) -> list[tuple[YoungDiagram, int]]:
    """(diagram, dimension) for all diagrams of N boxes, dims cross-checked."""
    if not 1 <= N <= MAX_N:
        raise ValueError(f"N={N} outside supported range [1, {MAX_N}]")
    out = []
    square_sum = 0
    for diagram in partitions(N):
        dim = dim_growth(diagram)
        assert dim == diagram.dim_hook(), f"dimension mismatch for {diagram.rows}"
        square_sum += dim * dim
        out.append((diagram, dim))
    assert square_sum == factorial(N)
    return out


def plancherel_distribution(N: int) -> dict[YoungDiagram, Fraction]:
    """Probability dim^2 / N! per diagram."""
    dist = {
        diagram: Fraction(dim * dim, factorial(N)) for diagram, dim in enumerate_diagrams_dims(N)
    }
    assert sum(dist.values()) == 1
    return dist


def plancherel_step(diagram: YoungDiagram) -> dict[YoungDiagram, Fraction]:
    """One-box growth probabilities dim(next) / ((N+1) dim(current))."""
    N = diagram.n_boxes
    dim = dim_growth(diagram)
    step = {
        successor: Fraction(dim_growth(successor), (N + 1) * dim)
        for successor in diagram.successors()
    }
    assert sum(step.values()) == 1
    return step


@dataclass(frozen=True)
class StandardTableau:
    """A growth path of diagrams from one box; the spine of the basis vectors."""

    growth: tuple[YoungDiagram, ...]

    def __post_init__(self) -> None:
        if not self.growth or self.growth[0].rows != (1,):
            raise ValueError("growth must start from the single box")
        for a, b in zip(self.growth, self.growth[1:]):
            if b.n_boxes != a.n_boxes + 1:
                raise ValueError("each growth step must add exactly one box")

    @property
    def n_entries(self) -> int:
        return len(self.growth)

    @property
    def row_word(self) -> tuple[int, ...]:
        """Row receiving entry k at growth step k; canonical sort key."""
        word = [0]
        for a, b in zip(self.growth, self.growth[1:]):
            ra, rb = a.rows, b.rows
            if len(rb) > len(ra):
                word.append(len(rb) - 1)
            else:
                word.append(next(i for i in range(len(ra)) if rb[i] != ra[i]))
        return tuple(word)

    def positions(self) -> list[tuple[int, int]]:
        """(row, col) of each entry 1..N, in entry order."""
        counts: dict[int, int] = {}
        out = []
        for row in self.row_word:
            col = counts.get(row, 0)
            out.append((row, col))
            counts[row] = col + 1
        return out


def standard_tableaux(diagram: YoungDiagram) -> list[StandardTableau]:
    """All standard tableaux of the diagram, sorted by row word."""

    @lru_cache(maxsize=None)
    def paths(rows: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
        if sum(rows) == 1:
            return [(rows,)]
        out = []
        for mu in YoungDiagram(rows).predecessors():
            for p in paths(mu.rows):
                out.append(p + (rows,))
        return out

    tableaux = [StandardTableau(tuple(YoungDiagram(r) for r in p)) for p in paths(diagram.rows)]
    tableaux.sort(key=lambda t: t.row_word)
    return tableaux


class IrrepMatrices:
    """Orthogonal matrices of the adjacent transpositions for one diagram.

    Matrices are indexed by the left letter: matrix k represents the swap
    of letters k and k+1, 1 <= k <= N-1. Every matrix is symmetric,
    orthogonal, and an involution; disjoint swaps commute and the braid
    relation holds, all to float tolerance.
    """

    def __init__(self, diagram: YoungDiagram):
        if diagram.n_boxes > MAX_N:
            raise ValueError(f"diagram with {diagram.n_boxes} boxes exceeds cap {MAX_N}")
        self.diagram = diagram
        self.basis = tuple(standard_tableaux(diagram))
        self.dim = len(self.basis)
        self._index = {t.row_word: i for i, t in enumerate(self.basis)}
        self._positions = [t.positions() for t in self.basis]
        self.matrices: dict[int, np.ndarray] = {
            k: self._adjacent_matrix(k) for k in range(1, diagram.n_boxes)
        }

    def _adjacent_matrix(self, k: int) -> np.ndarray:
        matrix = np.zeros((self.dim, self.dim))
        for t, tableau in enumerate(self.basis):
            pos = self._positions[t]
            (r1, c1), (r2, c2) = pos[k - 1], pos[k]
            if r1 == r2:
                matrix[t, t] = 1.0
            elif c1 == c2:
                matrix[t, t] = -1.0
            else:
                # axial distance between letters k and k+1 (content difference)
                r = (c2 - r2) - (c1 - r1)
                word = list(tableau.row_word)
                word[k - 1], word[k] = word[k], word[k - 1]
                partner = self._index[tuple(word)]
                matrix[t, t] = 1.0 / r
                matrix[t, partner] = sqrt(1.0 - 1.0 / (r * r))
        return matrix

    def adjacent(self, k: int) -> np.ndarray:
        if not 1 <= k <= self.diagram.n_boxes - 1:
            raise ValueError(f"adjacent swap index {k} out of range")
        return self.matrices[k]

    def transposition(self, a: int, b: int) -> np.ndarray:
        """Matrix of the swap of letters a and b, via conjugation by adjacents."""
        if a == b:
            raise ValueError(f"invalid transposition ({a} {b})")
        a, b = min(a, b), max(a, b)
        if a < 1 or b > self.diagram.n_boxes:
            raise ValueError(f"letters ({a}, {b}) out of range")
        matrix = self.adjacent(a)
        for k in range(a + 1, b):
            s = self.adjacent(k)
            matrix = s @ matrix @ s
        return matrix


def transposition_matrix(diagram: YoungDiagram, a: int, b: int) -> np.ndarray:
    """Orthogonal matrix of the swap (a b) in the tableau basis of the diagram."""
    return IrrepMatrices(diagram).transposition(a, b)
