"""Finite T0 spaces, their open-set lattices and basis-prefix quotients.

A finite T0 space is determined by the minimal open neighbourhood of each
point.  Internally every subset of points is an ``int`` bitmask over the
point indices; the public functions accept and return ``frozenset`` objects
of point names.

The lattice of opens is enumerated on demand and cached.  Spaces with a few
dozen pairwise incomparable points have astronomically many opens, so
nothing here enumerates the lattice unless asked to.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import (
    DuplicatePoint,
    IndexOutOfRange,
    NoBasis,
    NotOpen,
    NotT0,
    UnknownPoint,
)

__all__ = [
    "FiniteSpace",
    "QuotientMap",
    "space_from_basis",
    "point_closure",
    "minimal_open",
    "quotient_level",
    "enumerate_coverings",
    "bits",
    "popcount",
]


def popcount(m: int) -> int:
    return bin(m).count("1")


def bits(m: int) -> Iterator[int]:
    """Indices of the set bits of ``m`` in increasing order."""
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


class FiniteSpace:
    """A finite T0 topological space.

    Use :func:`space_from_basis` to build one.  ``minimal[i]`` is the bitmask
    of the smallest open set containing point ``i``.
    """

    __slots__ = (
        "points",
        "index",
        "minimal",
        "basis",
        "full",
        "_opens",
        "_open_index",
        "_closure",
        "_topo_order",
        "_below",
    )

    def __init__(
        self,
        points: Sequence[str],
        minimal: Sequence[int],
        basis: Optional[Sequence[int]] = None,
    ):
        self.points: Tuple[str, ...] = tuple(points)
        self.index: Dict[str, int] = {p: i for i, p in enumerate(self.points)}
        self.minimal: Tuple[int, ...] = tuple(minimal)
        self.basis: Optional[Tuple[int, ...]] = None if basis is None else tuple(basis)
        self.full = (1 << len(self.points)) - 1
        self._opens: Optional[Tuple[int, ...]] = None
        self._open_index: Optional[Dict[int, int]] = None
        self._below = tuple(m & ~(1 << i) for i, m in enumerate(self.minimal))
        self._closure = tuple(
            sum(1 << z for z in range(len(self.points)) if self.minimal[z] >> y & 1)
            for y in range(len(self.points))
        )
        self._topo_order = self._linear_extension()

    # -- conversions -------------------------------------------------
    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"FiniteSpace(points={list(self.points)!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        return self.points == other.points and self.minimal == other.minimal

    def __hash__(self) -> int:
        return hash((self.points, self.minimal))

    def mask(self, subset: Iterable[str]) -> int:
        """Bitmask of a collection of point names (an ``int`` passes through)."""
        if isinstance(subset, int):
            if subset & ~self.full:
                raise UnknownPoint(f"mask {subset:#x} has bits outside the space")
            return subset
        if isinstance(subset, str):
            raise TypeError("expected a collection of point names, got a single string")
        m = 0
        for p in subset:
            try:
                m |= 1 << self.index[p]
            except KeyError:
                raise UnknownPoint(p) from None
        return m

    def subset(self, m: int) -> frozenset:
        return frozenset(self.points[i] for i in bits(m))

    def names(self, m: int) -> List[str]:
        """Point names of ``m`` in the space's point order."""
        return [self.points[i] for i in bits(m)]

    def point_index(self, p: str) -> int:
        try:
            return self.index[p]
        except KeyError:
            raise UnknownPoint(p) from None

    # -- topology ----------------------------------------------------
    def is_open_mask(self, m: int) -> bool:
        for i in bits(m):
            if self.minimal[i] & ~m:
                return False
        return True

    def is_open(self, subset) -> bool:
        return self.is_open_mask(self.mask(subset))

    def require_open(self, subset) -> int:
        m = self.mask(subset)
        if not self.is_open_mask(m):
            raise NotOpen(f"{sorted(self.subset(m))} is not open")
        return m

    def interior_mask(self, m: int) -> int:
        return sum(1 << i for i in bits(m) if not self.minimal[i] & ~m)

    def closure_mask(self, m: int) -> int:
        c = 0
        for i in bits(m):
            c |= self._closure[i]
        return c

    def point_closure_mask(self, i: int) -> int:
        return self._closure[i]

    def is_closed_point(self, i: int) -> bool:
        return self._closure[i] == 1 << i

    def is_t1(self) -> bool:
        return all(self._closure[i] == 1 << i for i in range(len(self.points)))

    def _linear_extension(self) -> Tuple[int, ...]:
        # points whose minimal open is smaller come first
        return tuple(sorted(range(len(self.points)), key=lambda i: (popcount(self.minimal[i]), i)))

    def iter_open_masks(self) -> Iterator[int]:
        """Every open set, generated by include/exclude over a linear extension."""
        cur = [0]
        for x in self._topo_order:
            need = self._below[x]
            bit = 1 << x
            cur = cur + [m | bit for m in cur if m & need == need]
        return iter(cur)

    @property
    def open_masks(self) -> Tuple[int, ...]:
        """All opens in canonical order: by size, then by sorted point indices."""
        if self._opens is None:
            ms = list(self.iter_open_masks())
            ms.sort(key=lambda m: (popcount(m), tuple(bits(m))))
            self._opens = tuple(ms)
            self._open_index = {m: k for k, m in enumerate(ms)}
        return self._opens

    @property
    def opens(self) -> List[frozenset]:
        return [self.subset(m) for m in self.open_masks]

    def open_position(self, m: int) -> int:
        self.open_masks
        return self._open_index[m]

    def upper_covers(self, m: int) -> List[int]:
        """Opens covering ``m`` in the lattice; each adds exactly one point."""
        out = []
        for x in range(len(self.points)):
            bit = 1 << x
            if not m & bit and self._below[x] & ~m == 0:
                out.append(m | bit)
        return out

    def lower_covers(self, m: int) -> List[int]:
        out = []
        for x in bits(m):
            rest = m & ~(1 << x)
            if all(not (self.minimal[y] >> x & 1) for y in bits(rest)):
                out.append(rest)
        return out

    def hasse_edges(self) -> Iterator[Tuple[int, int]]:
        for m in self.open_masks:
            for v in self.upper_covers(m):
                yield m, v

    def next_point(self, lo: int, hi: int) -> int:
        """Lowest-index point of ``hi - lo`` that can be added to ``lo`` keeping it open."""
        rest = hi & ~lo
        for x in bits(rest):
            if self._below[x] & ~lo == 0:
                return x
        raise NotOpen("no admissible point: arguments are not nested opens")

    def chain(self, lo: int, hi: int) -> List[int]:
        """Canonical maximal chain of opens from ``lo`` up to ``hi``."""
        out = [lo]
        cur = lo
        while cur != hi:
            cur |= 1 << self.next_point(cur, hi)
            out.append(cur)
        return out

    def describe(self, m: int) -> str:
        return "{" + ",".join(self.names(m)) + "}"


@dataclass(frozen=True)
class QuotientMap:
    """Surjective continuous map of finite spaces given pointwise."""

    source: FiniteSpace
    target: FiniteSpace
    assignment: Tuple[int, ...]  # source index -> target index

    def __call__(self, p: str) -> str:
        return self.target.points[self.assignment[self.source.point_index(p)]]

    def preimage_mask(self, m: int) -> int:
        return sum(1 << i for i, t in enumerate(self.assignment) if m >> t & 1)

    def preimage(self, subset) -> frozenset:
        return self.source.subset(self.preimage_mask(self.target.mask(subset)))

    def image_mask(self, m: int) -> int:
        out = 0
        for i in bits(m):
            out |= 1 << self.assignment[i]
        return out

    def is_continuous(self) -> bool:
        return all(self.source.is_open_mask(self.preimage_mask(m)) for m in self.target.open_masks)

    def is_surjective(self) -> bool:
        return set(self.assignment) == set(range(len(self.target)))

    def then(self, other: "QuotientMap") -> "QuotientMap":
        """``other ∘ self``."""
        return QuotientMap(self.source, other.target, tuple(other.assignment[t] for t in self.assignment))


def space_from_basis(points: Sequence[str], basis: Sequence[Iterable[str]]) -> FiniteSpace:
    """The T0 space on ``points`` whose topology is generated by ``basis``.

    Raises :class:`NotT0` when two points lie in exactly the same members of
    ``basis``.  The basis is kept, in order, for :func:`quotient_level`.
    """
    pts = list(points)
    seen = set()
    for p in pts:
        if not isinstance(p, str):
            raise TypeError(f"point identifiers must be strings, got {p!r}")
        if p in seen:
            raise DuplicatePoint(p)
        seen.add(p)
    index = {p: i for i, p in enumerate(pts)}
    bmasks = []
    for b in basis:
        m = 0
        for p in b:
            if p not in index:
                raise UnknownPoint(p)
            m |= 1 << index[p]
        bmasks.append(m)
    full = (1 << len(pts)) - 1
    minimal = []
    for i in range(len(pts)):
        m = full
        for b in bmasks:
            if b >> i & 1:
                m &= b
        minimal.append(m)
    by_nbhd: Dict[int, str] = {}
    for i, m in enumerate(minimal):
        if m in by_nbhd:
            raise NotT0(f"points {by_nbhd[m]!r} and {pts[i]!r} lie in the same basis members")
        by_nbhd[m] = pts[i]
    return FiniteSpace(pts, minimal, bmasks)


def space_from_minimal_opens(points: Sequence[str], minimal: Sequence[Iterable[str]]) -> FiniteSpace:
    """Space whose basis is the given family of minimal neighbourhoods."""
    space = space_from_basis(points, minimal)
    for i, p in enumerate(points):
        if not space.minimal[i] >> i & 1:
            raise ValueError(f"neighbourhood of {p!r} does not contain it")
    return space


def point_closure(space: FiniteSpace, y: str) -> frozenset:
    """Closure of ``{y}``: the points every neighbourhood of which contains ``y``."""
    return space.subset(space.point_closure_mask(space.point_index(y)))


def minimal_open(space: FiniteSpace, x: str) -> frozenset:
    return space.subset(space.minimal[space.point_index(x)])


def quotient_level(space: FiniteSpace, n: int) -> Tuple[FiniteSpace, QuotientMap]:
    """T0 quotient of ``space`` by the first ``n`` basis members.

    Points are identified when no member of ``basis[:n]`` separates them.
    Each class is named after its lexicographically least member, and the
    classes keep the order of their first member.
    """
    if space.basis is None:
        raise NoBasis("space carries no ordered basis")
    if not 1 <= n <= len(space.basis):
        raise IndexOutOfRange(f"level {n} outside 1..{len(space.basis)}")
    prefix = space.basis[:n]
    classes: Dict[Tuple[bool, ...], List[int]] = {}
    for i in range(len(space)):
        sig = tuple(bool(b >> i & 1) for b in prefix)
        classes.setdefault(sig, []).append(i)
    members = list(classes.values())
    names = [min(space.points[i] for i in cls) for cls in members]
    assignment = [0] * len(space)
    for t, cls in enumerate(members):
        for i in cls:
            assignment[i] = t
    images = []
    for b in prefix:
        images.append([names[t] for t, cls in enumerate(members) if b >> cls[0] & 1])
    target = space_from_basis(names, images)
    return target, QuotientMap(space, target, tuple(assignment))


def enumerate_coverings(space: FiniteSpace, V, irredundant_only: bool = True) -> List[Tuple[frozenset, ...]]:
    """Coverings of the open ``V`` by opens contained in it.

    With ``irredundant_only`` no member lies in the union of the others;
    otherwise every family of opens with union ``V`` is listed, which is
    exponential in the number of opens and only meant for tiny spaces.
    """
    return [tuple(space.subset(m) for m in cov) for cov in covering_masks(space, space.require_open(V), irredundant_only)]


_COVER_CACHE: Dict[Tuple[FiniteSpace, int, bool], Tuple[Tuple[int, ...], ...]] = {}


def covering_masks(space: FiniteSpace, v: int, irredundant_only: bool = True) -> Tuple[Tuple[int, ...], ...]:
    key = (space, v, irredundant_only)
    hit = _COVER_CACHE.get(key)
    if hit is not None:
        return hit
    inside = [m for m in space.open_masks if m & ~v == 0]
    out: List[Tuple[int, ...]] = []
    if irredundant_only:
        candidates = [m for m in inside if m]
        if v == 0:
            out.append(())
        for k in range(1, popcount(v) + 1):
            for combo in combinations(candidates, k):
                union = 0
                for m in combo:
                    union |= m
                if union != v:
                    continue
                if all(_private(combo, j) for j in range(k)):
                    out.append(combo)
    else:
        for k in range(0, len(inside) + 1):
            for combo in combinations(inside, k):
                union = 0
                for m in combo:
                    union |= m
                if union == v:
                    out.append(combo)
    res = tuple(out)
    if len(_COVER_CACHE) > 4096:
        _COVER_CACHE.clear()
    _COVER_CACHE[key] = res
    return res


def _private(combo: Tuple[int, ...], j: int) -> bool:
    others = 0
    for k, m in enumerate(combo):
        if k != j:
            others |= m
    return combo[j] & ~others != 0
