"""Finitely supported permutations of lattice sites.

A site is a d-tuple of integer coordinates. A permutation stores only its
non-fixed points, so accumulating the transposition stream of a walk stays
cheap no matter how large the ambient lattice is: the support never exceeds
the set of visited sites.

Composition convention: (p * q)(x) = p(q(x)). The walk product is built by
right-multiplication, one transposition per step.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

Site = tuple[int, ...]


def origin(d: int) -> Site:
    return (0,) * d


def unit_step(d: int, axis: int, sign: int) -> Site:
    step = [0] * d
    step[axis] = sign
    return tuple(step)


def site_add(x: Site, step: Site) -> Site:
    return tuple(a + b for a, b in zip(x, step))


def site_sub(x: Site, y: Site) -> Site:
    return tuple(a - b for a, b in zip(x, y))


def site_neg(x: Site) -> Site:
    return tuple(-a for a in x)


def site_parity(x: Site) -> int:
    """0 for even coordinate sum, 1 for odd."""
    return sum(x) & 1


def l1_norm(x: Site) -> int:
    return sum(abs(a) for a in x)


class SparsePermutation:
    """A bijection of Z^d fixing all but finitely many sites.

    Only non-fixed points are stored; the key set always equals the value
    set and no key maps to itself, so an empty map is the identity.
    """

    __slots__ = ("_moved",)

    def __init__(self, moved: dict[Site, Site] | None = None, *, _trusted: bool = False):
        if moved is None:
            self._moved: dict[Site, Site] = {}
            return
        if _trusted:
            self._moved = moved
            return
        cleaned = {k: v for k, v in moved.items() if k != v}
        if set(cleaned) != set(cleaned.values()):
            raise ValueError("support is not closed: key set != value set")
        self._moved = cleaned

    @classmethod
    def identity(cls) -> "SparsePermutation":
        return cls()

    @classmethod
    def transposition(cls, a: Site, b: Site) -> "SparsePermutation":
        if a == b:
            raise ValueError(f"invalid transposition: {a} = {b}")
        if len(a) != len(b):
            raise ValueError("sites of different dimension")
        return cls({a: b, b: a}, _trusted=True)

    def apply(self, x: Site) -> Site:
        return self._moved.get(x, x)

    def is_identity(self) -> bool:
        return not self._moved

    def support(self) -> tuple[Site, ...]:
        """Non-fixed sites in lexicographic order (deterministic listing)."""
        return tuple(sorted(self._moved))

    def right_multiply_transposition(self, a: Site, b: Site) -> "SparsePermutation":
        """Return self * (a b), i.e. x -> self((a b)(x)). Pruned representation."""
        if a == b:
            raise ValueError(f"invalid transposition: {a} = {b}")
        if len(a) != len(b):
            raise ValueError("sites of different dimension")
        moved = dict(self._moved)
        va = moved.pop(a, a)
        vb = moved.pop(b, b)
        if vb != a:
            moved[a] = vb
        if va != b:
            moved[b] = va
        return SparsePermutation(moved, _trusted=True)

    def inverse(self) -> "SparsePermutation":
        return SparsePermutation({v: k for k, v in self._moved.items()}, _trusted=True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparsePermutation):
            return NotImplemented
        return self._moved == other._moved

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._moved.items())))

    def __len__(self) -> int:
        return len(self._moved)

    def __iter__(self) -> Iterator[tuple[Site, Site]]:
        return iter(sorted(self._moved.items()))

    def __repr__(self) -> str:
        if not self._moved:
            return "SparsePermutation(identity)"
        pairs = ", ".join(f"{k}->{v}" for k, v in self)
        return f"SparsePermutation({pairs})"


def product_of_transpositions(sites: Sequence[Site]) -> SparsePermutation:
    """Left-to-right product (x0 x1)(x1 x2)...(x_{n-1} x_n) for a site sequence.

    Equivalent to repeated right_multiply_transposition but built in place:
    step j swaps the images currently assigned to x_j and x_{j+1}.
    """
    moved: dict[Site, Site] = {}
    for a, b in zip(sites, sites[1:]):
        if a == b:
            raise ValueError(f"invalid transposition: {a} = {b}")
        va = moved.get(a, a)
        vb = moved.get(b, b)
        moved[a] = vb
        moved[b] = va
    pruned = {k: v for k, v in moved.items() if k != v}
    return SparsePermutation(pruned, _trusted=True)


def is_identity_product(sites: Iterable[Site]) -> bool:
    """True iff the transposition stream of the site sequence multiplies to 1.

    Fast path used by the enumeration and sampling loops; avoids building
    a SparsePermutation per query.
    """
    moved: dict[Site, Site] = {}
    mismatches = 0
    prev: Site | None = None
    for cur in sites:
        if prev is not None:
            va = moved.get(prev, prev)
            vb = moved.get(cur, cur)
            mismatches -= (va != prev) + (vb != cur)
            moved[prev] = vb
            moved[cur] = va
            mismatches += (vb != prev) + (va != cur)
        prev = cur
    return mismatches == 0
