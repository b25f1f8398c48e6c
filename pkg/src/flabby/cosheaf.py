"""Precosheaves of graded rational spaces on finite T0 spaces.

A :class:`Cosheaf` assigns a :class:`~flabby.glinalg.GradedSpace` to every
open set and a :class:`~flabby.glinalg.GradedMap` to every cover relation
``U ⋖ V`` of the open lattice; every other inclusion map is the composite
along the canonical chain from ``U`` to ``V``.  Whether the result is a
functor, a cosheaf, or flabby is decided by :func:`validate`,
:func:`is_cosheaf` and :func:`is_flabby`.

Values may be given as mappings or computed lazily.  The constructors
:func:`skyscraper` and :func:`direct_sum` produce lazy objects whose
inclusion maps are coordinate selections, so spaces with very large open
lattices remain usable as long as nothing iterates over every open.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from flint import fmpq, fmpq_mat

from . import glinalg as gl
from .errors import (
    NotClosed,
    NotClosedPoint,
    NotNested,
    NotOpen,
    NotValidated,
    ShapeMismatch,
    SpaceMismatch,
)
from .finspace import FiniteSpace, bits, covering_masks
from .glinalg import ZERO, GradedMap, GradedSpace, GradedVector

__all__ = [
    "Cosheaf",
    "SkyscraperSpec",
    "SkyscraperSum",
    "PointedCosheaf",
    "Morphism",
    "PointedHom",
    "Violation",
    "validate",
    "is_cosheaf",
    "cosheaf_violations",
    "is_flabby",
    "flabbiness_violations",
    "skyscraper",
    "direct_sum",
    "zero_cosheaf",
    "transport",
    "costalk",
    "closed_sections",
    "locally_closed_sections",
    "parity_vanishes",
    "hom",
    "pointed_hom",
]


class _Missing(KeyError):
    pass


@dataclass(frozen=True)
class Violation:
    """One entry of a validation report."""

    kind: str
    opens: Tuple[frozenset, ...]
    detail: str = ""

    def __str__(self) -> str:
        where = ", ".join("{" + ",".join(sorted(u)) + "}" for u in self.opens)
        return f"{self.kind} at {where}" + (f": {self.detail}" if self.detail else "")


class Cosheaf:
    """A precosheaf on ``space``.

    ``sections`` maps opens (any collection of point names) to graded
    spaces; ``maps`` maps pairs ``(U, V)`` with ``V`` covering ``U`` to graded
    maps.  Alternatively use :meth:`lazy` with callables taking bitmasks.
    """

    _valid_by_construction = False

    def __init__(self, space: FiniteSpace, sections: Mapping, maps: Mapping):
        self.space = space
        self._sec_data: Dict[int, GradedSpace] = {}
        for u, val in sections.items():
            self._sec_data[space.require_open(u)] = val
        self._map_data: Dict[Tuple[int, int], GradedMap] = {}
        for (u, v), f in maps.items():
            self._map_data[(space.require_open(u), space.require_open(v))] = f
        self._sec_fn: Optional[Callable[[int], GradedSpace]] = None
        self._map_fn: Optional[Callable[[int, int], GradedMap]] = None
        self._init_caches()

    def _init_caches(self):
        self._top: Dict[int, GradedMap] = {}
        self._incl: Dict[Tuple[int, int], GradedMap] = {}
        self._report: Optional[List[Violation]] = None

    @classmethod
    def lazy(
        cls,
        space: FiniteSpace,
        section_fn: Callable[[int], GradedSpace],
        map_fn: Callable[[int, int], GradedMap],
    ) -> "Cosheaf":
        """Precosheaf whose values are computed on demand from bitmask callables."""
        self = cls.__new__(cls)
        self.space = space
        self._sec_data = {}
        self._map_data = {}
        self._sec_fn = section_fn
        self._map_fn = map_fn
        self._init_caches()
        return self

    # -- raw access ----------------------------------------------------
    def section_m(self, m: int) -> GradedSpace:
        if self._sec_fn is not None:
            return self._sec_fn(m)
        try:
            return self._sec_data[m]
        except KeyError:
            raise _Missing(f"no section given for {self.space.describe(m)}") from None

    def edge_m(self, u: int, v: int) -> GradedMap:
        if self._map_fn is not None:
            return self._map_fn(u, v)
        try:
            return self._map_data[(u, v)]
        except KeyError:
            raise _Missing(f"no map given for {self.space.describe(u)} -> {self.space.describe(v)}") from None

    def section(self, U) -> GradedSpace:
        return self.section_m(self.space.require_open(U))

    def inclusion_m(self, u: int, v: int) -> GradedMap:
        """``i_U^V`` composed along the canonical chain of cover relations."""
        if u & ~v:
            raise NotNested(f"{self.space.describe(u)} is not contained in {self.space.describe(v)}")
        if v == self.space.full:
            return self.to_top_m(u)
        hit = self._incl.get((u, v))
        if hit is not None:
            return hit
        chain = self.space.chain(u, v)
        f = GradedMap.identity(self.section_m(u))
        for a, b in zip(chain, chain[1:]):
            f = self.edge_m(a, b) @ f
        self._incl[(u, v)] = f
        return f

    def to_top_m(self, u: int) -> GradedMap:
        hit = self._top.get(u)
        if hit is not None:
            return hit
        full = self.space.full
        if u == full:
            f = GradedMap.identity(self.section_m(u))
        else:
            nxt = u | 1 << self.space.next_point(u, full)
            f = self.to_top_m(nxt) @ self.edge_m(u, nxt)
        self._top[u] = f
        return f

    def inclusion(self, U, V) -> GradedMap:
        return self.inclusion_m(self.space.require_open(U), self.space.require_open(V))

    @property
    def total(self) -> GradedSpace:
        return self.section_m(self.space.full)

    def materialize(self) -> "Cosheaf":
        """A copy holding explicit values on every open and cover relation."""
        sp = self.space
        secs = {sp.subset(m): self.section_m(m) for m in sp.open_masks}
        maps = {(sp.subset(u), sp.subset(v)): self.edge_m(u, v) for u, v in sp.hasse_edges()}
        return Cosheaf(sp, secs, maps)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(space={self.space!r}, total={self.total})"


@dataclass(frozen=True)
class SkyscraperSpec:
    """Skyscraper ``i_x(G)``: coefficient ``coeff`` on every open containing ``point``."""

    point: str
    coeff: GradedSpace

    def __post_init__(self):
        if isinstance(self.coeff, tuple):
            object.__setattr__(self, "coeff", GradedSpace(*self.coeff))


class SkyscraperSum(Cosheaf):
    """Direct sum of skyscrapers, summands in the given order.

    In each degree the coordinates of ``M(U)`` are those of the summands
    whose point lies in ``U``, concatenated in summand order; every
    inclusion map is the matching coordinate selection.
    """

    _valid_by_construction = True

    def __init__(self, space: FiniteSpace, specs: Sequence[SkyscraperSpec]):
        self.space = space
        self.specs: Tuple[SkyscraperSpec, ...] = tuple(specs)
        self._pt = tuple(space.point_index(s.point) for s in self.specs)
        self._sec_data = {}
        self._map_data = {}
        self._sec_fn = self._section
        self._map_fn = self._selection
        self._init_caches()
        self._sec_cache: Dict[int, GradedSpace] = {}

    def _section(self, m: int) -> GradedSpace:
        hit = self._sec_cache.get(m)
        if hit is None:
            d0 = d1 = 0
            for s, p in zip(self.specs, self._pt):
                if m >> p & 1:
                    d0 += s.coeff.dim0
                    d1 += s.coeff.dim1
            hit = self._sec_cache[m] = GradedSpace(d0, d1)
        return hit

    def _selection(self, u: int, v: int) -> GradedMap:
        rows0: List[int] = []
        rows1: List[int] = []
        o0 = o1 = 0
        for s, p in zip(self.specs, self._pt):
            if v >> p & 1:
                if u >> p & 1:
                    rows0.extend(range(o0, o0 + s.coeff.dim0))
                    rows1.extend(range(o1, o1 + s.coeff.dim1))
                o0 += s.coeff.dim0
                o1 += s.coeff.dim1
        return gl.selection_map(self._section(u), self._section(v), rows0, rows1)

    def inclusion_m(self, u: int, v: int) -> GradedMap:
        if u & ~v:
            raise NotNested(f"{self.space.describe(u)} is not contained in {self.space.describe(v)}")
        return self._selection(u, v)

    def to_top_m(self, u: int) -> GradedMap:
        hit = self._top.get(u)
        if hit is None:
            hit = self._top[u] = self._selection(u, self.space.full)
        return hit

    def coordinates(self, m: int) -> List[Tuple[int, int, int]]:
        """``(summand, first even row, first odd row)`` for summands present in ``m``."""
        out = []
        o0 = o1 = 0
        for k, (s, p) in enumerate(zip(self.specs, self._pt)):
            if m >> p & 1:
                out.append((k, o0, o1))
                o0 += s.coeff.dim0
                o1 += s.coeff.dim1
        return out


class _DirectSum(Cosheaf):
    _valid_by_construction = False

    def __init__(self, space: FiniteSpace, parts: Sequence[Cosheaf]):
        self.space = space
        self.parts = tuple(parts)
        self._sec_data = {}
        self._map_data = {}
        self._sec_fn = lambda m: sum((p.section_m(m) for p in self.parts), ZERO)
        self._map_fn = lambda u, v: gl.direct_sum_maps([p.edge_m(u, v) for p in self.parts])
        self._init_caches()

    def inclusion_m(self, u, v):
        return gl.direct_sum_maps([p.inclusion_m(u, v) for p in self.parts])

    def to_top_m(self, u):
        hit = self._top.get(u)
        if hit is None:
            hit = self._top[u] = gl.direct_sum_maps([p.to_top_m(u) for p in self.parts])
        return hit


def skyscraper(space: FiniteSpace, spec: SkyscraperSpec) -> SkyscraperSum:
    space.point_index(spec.point)
    return SkyscraperSum(space, [spec])


def zero_cosheaf(space: FiniteSpace) -> SkyscraperSum:
    return SkyscraperSum(space, [])


def direct_sum(Ms: Sequence[Cosheaf], space: Optional[FiniteSpace] = None) -> Cosheaf:
    """Open-wise direct sum with block-diagonal maps, summands in input order."""
    Ms = list(Ms)
    if space is None:
        if not Ms:
            raise SpaceMismatch("the direct sum of no cosheaves needs an explicit space")
        space = Ms[0].space
    for M in Ms:
        if M.space != space:
            raise SpaceMismatch("summands live on different spaces")
    if all(isinstance(M, SkyscraperSum) for M in Ms):
        return SkyscraperSum(space, [s for M in Ms for s in M.specs])
    out = _DirectSum(space, Ms)
    out._valid_by_construction = all(M._valid_by_construction for M in Ms)
    return out


def transport(M: Cosheaf, g: Mapping[int, GradedMap]) -> Tuple[Cosheaf, "Morphism"]:
    """Change basis open-wise by the invertible maps ``g[U]: M(U) -> M'(U)``.

    Returns ``M'`` with edge maps ``g_V ∘ i_U^V ∘ g_U^{-1}`` and the natural
    isomorphism ``g: M -> M'``.
    """
    sp = M.space
    inv = {m: g[m].inverse() for m in sp.open_masks}
    secs = {sp.subset(m): g[m].target for m in sp.open_masks}
    maps = {}
    for u, v in sp.hasse_edges():
        maps[(sp.subset(u), sp.subset(v))] = g[v] @ M.edge_m(u, v) @ inv[u]
    N = Cosheaf(sp, secs, maps)
    return N, Morphism(M, N, dict(g))


# -- validation ----------------------------------------------------------

def validate(M: Cosheaf) -> List[Violation]:
    """Every violated precosheaf law: normalisation, missing data, shapes, path agreement.

    Path independence is checked on every square ``U, U+x, U+y, U+x+y`` of
    the open lattice; two maximal chains between nested opens always differ
    by a sequence of such squares.
    """
    sp = M.space
    sub = sp.subset
    report: List[Violation] = []
    secs: Dict[int, GradedSpace] = {}
    for m in sp.open_masks:
        try:
            s = M.section_m(m)
        except _Missing:
            report.append(Violation("missing-section", (sub(m),)))
            continue
        if not isinstance(s, GradedSpace):
            report.append(Violation("bad-section", (sub(m),), repr(s)))
            continue
        secs[m] = s
    if secs.get(0, ZERO) != ZERO:
        report.append(Violation("empty-section", (frozenset(),), f"M(∅) = {secs[0]}"))
    for (u, v) in M._map_data:
        if v not in sp.upper_covers(u):
            report.append(Violation("not-an-edge", (sub(u), sub(v))))
    edges: Dict[Tuple[int, int], GradedMap] = {}
    for u, v in sp.hasse_edges():
        try:
            f = M.edge_m(u, v)
        except _Missing:
            report.append(Violation("missing-map", (sub(u), sub(v))))
            continue
        if u not in secs or v not in secs:
            continue
        if not isinstance(f, GradedMap) or f.source != secs[u] or f.target != secs[v]:
            what = f"{f.source}->{f.target}" if isinstance(f, GradedMap) else repr(f)
            report.append(Violation("shape-mismatch", (sub(u), sub(v)), f"{what}, expected {secs[u]}->{secs[v]}"))
            continue
        edges[(u, v)] = f
    for u in sp.open_masks:
        ups = sp.upper_covers(u)
        for i, a in enumerate(ups):
            for b in ups[i + 1:]:
                top = a | b
                legs = [(u, a), (a, top), (u, b), (b, top)]
                if not all(e in edges for e in legs):
                    continue
                if edges[(a, top)] @ edges[(u, a)] != edges[(b, top)] @ edges[(u, b)]:
                    report.append(Violation("path-disagreement", (sub(u), sub(a), sub(b), sub(top))))
    return report


def _ensure_valid(M: Cosheaf) -> None:
    if M._valid_by_construction:
        return
    if M._report is None:
        M._report = validate(M)
    if M._report:
        raise NotValidated(f"precosheaf fails validation ({M._report[0]})", M._report)


# -- cosheaf axiom -------------------------------------------------------

def _cover_sequence(M: Cosheaf, v: int, cover: Sequence[int]) -> Tuple[GradedMap, GradedMap]:
    """The maps ``⊕ M(Vj∩Vk) -> ⊕ M(Vi) -> M(V)`` for a covering of ``v``."""
    target = M.section_m(v)
    mids = [M.section_m(c) for c in cover]
    mid = sum(mids, ZERO)
    pairs = [(j, k) for j in range(len(cover)) for k in range(j + 1, len(cover))]
    lows = [M.section_m(cover[j] & cover[k]) for j, k in pairs]
    low = sum(lows, ZERO)
    gm = []
    fm = []
    for i in (0, 1):
        g = gl.hstack([M.inclusion_m(c, v).mat(i) for c in cover], target.dim(i))
        offs = [0]
        for s in mids:
            offs.append(offs[-1] + s.dim(i))
        f = fmpq_mat(mid.dim(i), low.dim(i))
        col = 0
        for (j, k), s in zip(pairs, lows):
            a = M.inclusion_m(cover[j] & cover[k], cover[j]).mat(i)
            b = M.inclusion_m(cover[j] & cover[k], cover[k]).mat(i)
            for r in range(a.nrows()):
                for c in range(a.ncols()):
                    if a[r, c]:
                        f[offs[j] + r, col + c] = a[r, c]
            for r in range(b.nrows()):
                for c in range(b.ncols()):
                    if b[r, c]:
                        f[offs[k] + r, col + c] = -b[r, c]
            col += s.dim(i)
        gm.append(g)
        fm.append(f)
    return GradedMap(low, mid, fm[0], fm[1]), GradedMap(mid, target, gm[0], gm[1])


def _check_cover(M: Cosheaf, v: int, cover: Sequence[int], report: List[Violation]) -> bool:
    f, g = _cover_sequence(M, v, cover)
    sub = M.space.subset
    where = tuple(sub(c) for c in cover)
    if not g.is_surjective():
        report.append(Violation("not-surjective", where, f"covering of {M.space.describe(v)}"))
        return False
    if not gl.check_exact(f, g):
        report.append(Violation("not-exact", where, f"covering of {M.space.describe(v)}"))
        return False
    return True


def cosheaf_violations(M: Cosheaf, mode: str = "binary", first_only: bool = False) -> List[Violation]:
    """Coverings for which the right-exact Mayer–Vietoris sequence fails.

    ``"binary"`` tests every pair of incomparable opens and the covering of
    each open by the minimal neighbourhoods of its points; ``"exhaustive"``
    tests every irredundant covering of every open.
    """
    _ensure_valid(M)
    sp = M.space
    report: List[Violation] = []
    opens = sp.open_masks
    if mode == "binary":
        for i, a in enumerate(opens):
            for b in opens[i + 1:]:
                if a & ~b and b & ~a:
                    ok = _check_cover(M, a | b, (a, b), report)
                    if not ok and first_only:
                        return report
        for v in opens:
            if not v:
                continue
            pts = list(bits(v))
            parts = [M.inclusion_m(sp.minimal[x], v) for x in pts]
            tgt = M.section_m(v)
            src = sum((f.source for f in parts), ZERO)
            g = GradedMap(src, tgt, *(gl.hstack([f.mat(i) for f in parts], tgt.dim(i)) for i in (0, 1)))
            if not g.is_surjective():
                report.append(Violation("not-generated", (sp.subset(v),), "minimal neighbourhoods do not span"))
                if first_only:
                    return report
    elif mode == "exhaustive":
        for v in opens:
            for cover in covering_masks(sp, v, True):
                if len(cover) < 2:
                    continue
                ok = _check_cover(M, v, cover, report)
                if not ok and first_only:
                    return report
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return report


def is_cosheaf(M: Cosheaf, mode: str = "binary") -> bool:
    return not cosheaf_violations(M, mode, first_only=True)


def flabbiness_violations(M: Cosheaf) -> List[Violation]:
    """Opens ``U`` for which ``i_U^X`` fails to be injective."""
    _ensure_valid(M)
    sp = M.space
    out = []
    for u in sp.open_masks:
        f = M.to_top_m(u)
        if not f.is_injective():
            out.append(Violation("not-injective", (sp.subset(u),), f"rank {f.ranks()} on {f.source}"))
    return out


def is_flabby(M: Cosheaf) -> bool:
    return not flabbiness_violations(M)


# -- sections over closed and locally closed sets --------------------------

def _cokernel_dims(f: GradedMap) -> GradedSpace:
    r0, r1 = f.ranks()
    return GradedSpace(f.target.dim0 - r0, f.target.dim1 - r1)


def costalk(M: Cosheaf, x: str, allow_generalized: bool = False) -> GradedSpace:
    """``M(X) / M(X \\ cl{x})``; non-closed points need ``allow_generalized``."""
    sp = M.space
    i = sp.point_index(x)
    if not sp.is_closed_point(i) and not allow_generalized:
        raise NotClosedPoint(f"{x!r} is not a closed point")
    return _cokernel_dims(M.to_top_m(sp.full & ~sp.point_closure_mask(i)))


def closed_sections(M: Cosheaf, Z) -> GradedSpace:
    """``M(X) / M(X \\ Z)`` for a closed set ``Z``."""
    sp = M.space
    z = sp.mask(Z)
    rest = sp.full & ~z
    if not sp.is_open_mask(rest):
        raise NotClosed(f"{sorted(sp.subset(z))} is not closed")
    return _cokernel_dims(M.to_top_m(rest))


def locally_closed_sections(M: Cosheaf, U, W) -> GradedSpace:
    """``M(U) / M(W)`` for opens ``W ⊆ U``, i.e. the value on ``U \\ W``."""
    sp = M.space
    u = sp.require_open(U)
    w = sp.require_open(W)
    if w & ~u:
        raise NotNested(f"{sorted(sp.subset(w))} is not contained in {sorted(sp.subset(u))}")
    return _cokernel_dims(M.inclusion_m(w, u))


def parity_vanishes(M: Cosheaf, i: int, exhaustive: bool = False) -> bool:
    """Whether ``M(U)/M(W)`` has no degree-``i`` part for all opens ``W ⊆ U``.

    The image of ``M(W)`` in ``M(U)`` grows with ``W``, so the quotient is
    largest at ``W = ∅``; the default scan therefore only looks at ``M(U)``.
    ``exhaustive=True`` walks every nested pair instead.
    """
    if i not in (0, 1):
        raise ValueError("degree must be 0 or 1")
    _ensure_valid(M)
    sp = M.space
    if not exhaustive:
        return all(M.section_m(u).dim(i) == 0 for u in sp.open_masks)
    for u in sp.open_masks:
        if M.section_m(u).dim(i) == 0:
            continue
        for w in sp.open_masks:
            if w & ~u == 0 and _cokernel_dims(M.inclusion_m(w, u)).dim(i):
                return False
    return True


# -- morphisms -----------------------------------------------------------

class Morphism:
    """A family ``{φ_U: M(U) -> N(U)}`` indexed by the opens (bitmask keys)."""

    def __init__(self, source: Cosheaf, target: Cosheaf, components):
        if source.space != target.space:
            raise SpaceMismatch("source and target live on different spaces")
        self.source = source
        self.target = target
        self.space = source.space
        if callable(components):
            self._fn = components
            self._data: Dict[int, GradedMap] = {}
        else:
            self._fn = None
            self._data = {self.space.mask(k) if not isinstance(k, int) else k: v for k, v in components.items()}

    def component_m(self, m: int) -> GradedMap:
        hit = self._data.get(m)
        if hit is None:
            if self._fn is None:
                raise KeyError(self.space.describe(m))
            hit = self._data[m] = self._fn(m)
        return hit

    def component(self, U) -> GradedMap:
        return self.component_m(self.space.require_open(U))

    @property
    def top(self) -> GradedMap:
        return self.component_m(self.space.full)

    def materialize(self) -> "Morphism":
        return Morphism(self.source, self.target, {m: self.component_m(m) for m in self.space.open_masks})

    @classmethod
    def identity(cls, M: Cosheaf) -> "Morphism":
        return cls(M, M, lambda m: GradedMap.identity(M.section_m(m)))

    def __matmul__(self, other: "Morphism") -> "Morphism":
        """Composition ``self ∘ other``."""
        if other.target is not self.source and other.target.space != self.source.space:
            raise SpaceMismatch("morphisms do not compose")
        return Morphism(other.source, self.target, lambda m: self.component_m(m) @ other.component_m(m))

    def inverse(self) -> "Morphism":
        return Morphism(self.target, self.source, lambda m: self.component_m(m).inverse())

    def naturality_violations(self) -> List[Violation]:
        sp = self.space
        out = []
        for u, v in sp.hasse_edges():
            lhs = self.component_m(v) @ self.source.edge_m(u, v)
            rhs = self.target.edge_m(u, v) @ self.component_m(u)
            if lhs != rhs:
                out.append(Violation("not-natural", (sp.subset(u), sp.subset(v))))
        return out

    def is_natural(self) -> bool:
        return not self.naturality_violations()

    def is_iso(self) -> bool:
        return all(self.component_m(m).is_invertible() for m in self.space.open_masks)

    def shapes_ok(self) -> bool:
        return all(
            self.component_m(m).source == self.source.section_m(m)
            and self.component_m(m).target == self.target.section_m(m)
            for m in self.space.open_masks
        )

    def vector(self) -> List[fmpq]:
        """Entries of every component, opens in canonical order."""
        out: List[fmpq] = []
        for m in self.space.open_masks:
            out.extend(self.component_m(m).entries())
        return out


def combine(basis: Sequence[Morphism], coeffs: Sequence, source: Cosheaf, target: Cosheaf) -> Morphism:
    """``Σ c_k basis[k]`` as an explicit family."""
    coeffs = [gl.to_q(c) for c in coeffs]
    comps = {}
    for m in source.space.open_masks:
        f = GradedMap.zero(source.section_m(m), target.section_m(m))
        for c, h in zip(coeffs, basis):
            if c:
                f = f + h.component_m(m).scale(c)
        comps[m] = f
    return Morphism(source, target, comps)


HOM_METHODS = ("auto", "dense", "top", "skyscraper")


def hom(M: Cosheaf, N: Cosheaf, method: str = "auto") -> List[Morphism]:
    """Basis of the natural transformations ``M -> N``, even solutions first.

    ``"dense"`` solves ``φ_V ∘ i_U^V = i_U^V ∘ φ_U`` over every cover
    relation.  ``"top"`` needs every ``i_U^X`` of ``N`` injective: then a
    transformation is its top component ``φ_X``, subject to
    ``φ_X(S_M(U)) ⊆ S_N(U)`` for every open.  ``"skyscraper"`` reads the
    answer off two sums of skyscrapers.  ``"auto"`` picks the cheapest
    applicable one.
    """
    if M.space != N.space:
        raise SpaceMismatch("hom between cosheaves on different spaces")
    if method not in HOM_METHODS:
        raise ValueError(f"method must be one of {HOM_METHODS}")
    if method == "auto":
        if isinstance(M, SkyscraperSum) and isinstance(N, SkyscraperSum):
            method = "skyscraper"
        elif all(N.to_top_m(m).is_injective() for m in N.space.open_masks):
            method = "top"
        else:
            method = "dense"
    if method == "skyscraper":
        return _hom_skyscraper(M, N)
    if method == "top":
        return _hom_top(M, N)
    return _hom_dense(M, N)


def skyscraper_hom_labels(M: "SkyscraperSum", N: "SkyscraperSum") -> List[Tuple[int, int, int, int, int]]:
    """Labels ``(deg, k, l, r, c)`` of the elementary basis of ``Hom(M, N)``.

    ``i_x(G) -> i_y(H)`` is ``Hom(G, H)`` when every open containing ``x``
    contains ``y``, else 0; entry ``(r, c)`` of the block for summands
    ``k -> l`` in degree ``deg`` is one basis element.
    """
    sp = M.space
    out = []
    for deg in (0, 1):
        for k, (s, x) in enumerate(zip(M.specs, M._pt)):
            for l, (t, y) in enumerate(zip(N.specs, N._pt)):
                if not sp.minimal[x] >> y & 1:
                    continue
                for r in range(t.coeff.dim(deg)):
                    for c in range(s.coeff.dim(deg)):
                        out.append((deg, k, l, r, c))
    return out


def _hom_skyscraper(M: "SkyscraperSum", N: "SkyscraperSum") -> List[Morphism]:
    return [Morphism(M, N, _elementary(M, N, k, l, deg, r, c)) for deg, k, l, r, c in skyscraper_hom_labels(M, N)]


def _elementary(M, N, k, l, deg, r, c):
    x = M._pt[k]

    def comp(m: int) -> GradedMap:
        f = GradedMap.zero(M.section_m(m), N.section_m(m))
        if m >> x & 1:
            row = next(o for j, *o in N.coordinates(m) if j == l)[deg]
            col = next(o for j, *o in M.coordinates(m) if j == k)[deg]
            f.mat(deg)[row + r, col + c] = 1
        return f

    return comp


def _hom_top(M: Cosheaf, N: Cosheaf) -> List[Morphism]:
    sp = M.space
    dm, dn = M.total, N.total
    out: List[Morphism] = []
    for deg in (0, 1):
        a_, b_ = dn.dim(deg), dm.dim(deg)
        n = a_ * b_
        if n == 0:
            continue
        blocks = []
        for u in sp.open_masks:
            pn = N.to_top_m(u).mat(deg)
            pm = M.to_top_m(u).mat(deg)
            if pm.ncols() == 0 or pn.ncols() == a_:
                continue
            ann = gl.nullspace(pn.transpose()).transpose()  # rows cut out S_N(U)
            if ann.nrows() == 0:
                continue
            A = ann.tolist()
            P = pm.tolist()
            blk = fmpq_mat(len(A) * pm.ncols(), n)
            for i, arow in enumerate(A):
                for j in range(pm.ncols()):
                    rr = i * pm.ncols() + j
                    for r, av in enumerate(arow):
                        if av:
                            for s_ in range(b_):
                                pv = P[s_][j]
                                if pv:
                                    blk[rr, r * b_ + s_] = av * pv
            blocks.append(blk)
        system = gl.vstack(blocks, n) if blocks else fmpq_mat(0, n)
        ns = gl.nullspace(system)
        for j in range(ns.ncols()):
            phi = fmpq_mat(a_, b_, [ns[i, j] for i in range(n)])
            out.append(Morphism(M, N, _from_top(M, N, deg, phi)))
    return out


def _from_top(M, N, deg, phi):
    full = M.space.full

    def comp(m: int) -> GradedMap:
        sm, sn = M.section_m(m), N.section_m(m)
        if m == full:
            block = phi
        else:
            block = gl.solve_matrix(N.to_top_m(m).mat(deg), phi * M.to_top_m(m).mat(deg))
            assert block is not None
        other = gl.zeros(sn.dim(1 - deg), sm.dim(1 - deg))
        mats = (block, other) if deg == 0 else (other, block)
        return GradedMap(sm, sn, mats[0], mats[1])

    return comp


def _hom_dense(M: Cosheaf, N: Cosheaf) -> List[Morphism]:
    sp = M.space
    opens = sp.open_masks
    edges = list(sp.hasse_edges())
    sm = {m: M.section_m(m) for m in opens}
    sn = {m: N.section_m(m) for m in opens}
    out: List[Morphism] = []
    for deg in (0, 1):
        offs: Dict[int, int] = {}
        n = 0
        for m in opens:
            offs[m] = n
            n += sn[m].dim(deg) * sm[m].dim(deg)
        if n == 0:
            continue
        rows: List[Dict[int, fmpq]] = []
        for u, v in edges:
            dmu, dmv = sm[u].dim(deg), sm[v].dim(deg)
            dnu, dnv = sn[u].dim(deg), sn[v].dim(deg)
            if dnv == 0 or dmu == 0:
                continue
            a = M.edge_m(u, v).mat(deg).tolist()  # dmv x dmu
            b = N.edge_m(u, v).mat(deg).tolist()  # dnv x dnu
            for r in range(dnv):
                for c in range(dmu):
                    row: Dict[int, fmpq] = {}
                    for s in range(dmv):
                        x = a[s][c]
                        if x:
                            k = offs[v] + r * dmv + s
                            row[k] = row.get(k, 0) + x
                    for t in range(dnu):
                        x = b[r][t]
                        if x:
                            k = offs[u] + t * dmu + c
                            row[k] = row.get(k, 0) - x
                    if any(row.values()):
                        rows.append(row)
        system = fmpq_mat(len(rows), n)
        for i, row in enumerate(rows):
            for k, x in row.items():
                if x:
                    system[i, k] = x
        ns = gl.nullspace(system)
        for j in range(ns.ncols()):
            col = [ns[i, j] for i in range(n)]
            comps = {}
            for m in opens:
                rr, cc = sn[m].dim(deg), sm[m].dim(deg)
                block = fmpq_mat(rr, cc, col[offs[m]: offs[m] + rr * cc]) if rr * cc else fmpq_mat(rr, cc)
                other = gl.zeros(sn[m].dim(1 - deg), sm[m].dim(1 - deg))
                mats = (block, other) if deg == 0 else (other, block)
                comps[m] = GradedMap(sm[m], sn[m], mats[0], mats[1])
            out.append(Morphism(M, N, comps))
    return out


@dataclass(frozen=True)
class PointedCosheaf:
    """A cosheaf with a distinguished even element of ``M(X)``."""

    cosheaf: Cosheaf
    unit: Tuple[fmpq, ...]

    def __post_init__(self):
        unit = tuple(gl.to_q(u) for u in self.unit)
        object.__setattr__(self, "unit", unit)
        if len(unit) != self.cosheaf.total.dim0:
            raise ShapeMismatch(f"unit has {len(unit)} entries, M(X) has even dimension {self.cosheaf.total.dim0}")

    @property
    def space(self) -> FiniteSpace:
        return self.cosheaf.space

    def unit_vector(self) -> GradedVector:
        return GradedVector(self.unit, (0,) * self.cosheaf.total.dim1)


@dataclass
class PointedHom:
    """Affine set ``particular + span(directions)`` of unit-preserving morphisms."""

    particular: Morphism
    directions: List[Morphism] = field(default_factory=list)


def pointed_hom(Mp: PointedCosheaf, Np: PointedCosheaf) -> Optional[PointedHom]:
    """Morphisms ``φ`` with ``φ_X(unit_M) = unit_N``, or ``None`` when there are none."""
    M, N = Mp.cosheaf, Np.cosheaf
    if M.space != N.space:
        raise SpaceMismatch("pointed cosheaves on different spaces")
    basis = hom(M, N)
    u = fmpq_mat(len(Mp.unit), 1, list(Mp.unit))
    target = fmpq_mat(len(Np.unit), 1, list(Np.unit))
    cols = [h.top.mat0 * u for h in basis]
    C = gl.hstack(cols, len(Np.unit)) if cols else fmpq_mat(len(Np.unit), 0)
    c = gl.solve_matrix(C, target)
    if c is None:
        return None
    particular = combine(basis, [c[k, 0] for k in range(len(basis))], M, N)
    ns = gl.nullspace(C)
    directions = [combine(basis, [ns[k, j] for k in range(len(basis))], M, N) for j in range(ns.ncols())]
    return PointedHom(particular, directions)
