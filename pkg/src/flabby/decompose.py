"""Skyscraper decomposition of flabby cosheaves and isomorphism decisions.

For a flabby cosheaf every ``M(U)`` embeds into ``M(X)``, so the whole
object is a monotone family of subspaces ``S(U) = i_U^X M(U)``.  The
decomposition peels off one point at a time: it picks a point ``y`` whose
closure removes part of ``M(X)`` while no other point of that closure does,
splits ``M(X)`` along ``S(X \\ cl y)`` with a complement taken inside
``S(U_y)``, and continues on what is left.  The result is a basis of
``M(X)`` grouped by points, from which the witness isomorphism is solved
open by open.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from flint import fmpq, fmpq_mat

from . import glinalg as gl
from .cosheaf import (
    Cosheaf,
    Morphism,
    PointedCosheaf,
    SkyscraperSpec,
    SkyscraperSum,
    Violation,
    combine,
    cosheaf_violations,
    pointed_hom,
    validate,
)
from .errors import NoProperPoint, NotCosheaf, NotFlabby, NotValidated, SpaceMismatch
from .finspace import bits
from .glinalg import GradedMap, GradedSpace, GradedVector

__all__ = [
    "Decomposition",
    "IsoResult",
    "skyscraper_decomposition",
    "is_isomorphic",
    "is_pointed_isomorphic",
]

CERTIFY_LEVELS = ("none", "opens", "full")


@dataclass
class Decomposition:
    """``M ≅ ⊕ i_y(G_y)`` with the isomorphism ``witness: ⊕ i_y(G_y) -> M``.

    There is at most one summand per point; summands follow the point order
    of the space.  ``basis`` holds, per degree, the columns of ``M(X)``
    spanning the summands in that order.
    """

    cosheaf: Cosheaf
    summands: Tuple[SkyscraperSpec, ...]
    witness: Morphism
    basis: Tuple[fmpq_mat, fmpq_mat]

    @property
    def source(self) -> SkyscraperSum:
        return self.witness.source

    def multiset(self) -> List[Tuple[str, int, int]]:
        return [(s.point, s.coeff.dim0, s.coeff.dim1) for s in self.summands]

    def as_dict(self) -> Dict[str, GradedSpace]:
        return {s.point: s.coeff for s in self.summands}

    def coordinates(self, v: GradedVector) -> GradedVector:
        """Coordinates of an element of ``M(X)`` in the summand basis."""
        x = gl.solve(self.witness.top, v)
        assert x is not None, "witness is invertible at X"
        return x

    def verify(self, edges: bool = True) -> List[Violation]:
        """Exact check of the witness: shapes and invertibility everywhere, naturality on every cover relation."""
        w = self.witness
        sp = self.cosheaf.space
        out = []
        for m in sp.open_masks:
            f = w.component_m(m)
            if f.source != w.source.section_m(m) or f.target != self.cosheaf.section_m(m):
                out.append(Violation("shape-mismatch", (sp.subset(m),)))
            elif not f.is_invertible():
                out.append(Violation("not-invertible", (sp.subset(m),)))
        if edges and not out:
            out.extend(w.naturality_violations())
        return out


@dataclass
class IsoResult:
    """Outcome of an isomorphism test: ``True``, ``False`` or ``None`` for undecided."""

    isomorphic: Optional[bool]
    witness: Optional[Morphism] = None
    reason: str = ""


class _Images:
    """Cached ``i_U^X`` matrices, checked for injectivity on first use."""

    def __init__(self, M: Cosheaf):
        self.M = M
        self.sp = M.space
        self.cache: Dict[int, GradedMap] = {}

    def __call__(self, m: int) -> GradedMap:
        f = self.cache.get(m)
        if f is None:
            f = self.M.to_top_m(m)
            # coordinate selections are injective
            if not isinstance(self.M, SkyscraperSum) and not f.is_injective():
                v = Violation("not-injective", (self.sp.subset(m),), f"rank {f.ranks()} on {f.source}")
                raise NotFlabby(f"inclusion of {self.sp.describe(m)} into X is not injective", [v])
            self.cache[m] = f
        return f

    def dims(self, m: int) -> Tuple[int, int]:
        s = self(m).source
        return s.dim0, s.dim1


def _diagnose(M: Cosheaf, what: str):
    """Raise the most specific error explaining why the construction failed."""
    if not M._valid_by_construction:
        report = validate(M)
        if report:
            raise NotValidated(f"{what}; precosheaf fails validation ({report[0]})", report)
    report = cosheaf_violations(M, "binary", first_only=True)
    if report:
        raise NotCosheaf(f"{what}; not a cosheaf ({report[0]})", report)
    raise NoProperPoint(f"{what} although the input is a flabby cosheaf")


def skyscraper_decomposition(
    M: Cosheaf,
    certify: str = "full",
    point_order: Optional[Sequence[str]] = None,
) -> Decomposition:
    """Split a flabby cosheaf into skyscrapers.

    ``certify`` controls how much of the witness is checked before
    returning: ``"full"`` checks every open and every cover relation,
    ``"opens"`` skips naturality (automatic for functorial input), ``"none"``
    leaves the witness lazy.  ``point_order`` changes the scan order.

    Raises :class:`NotFlabby` or :class:`NotCosheaf` when the input is not a
    flabby cosheaf and this is detected.
    """
    if certify not in CERTIFY_LEVELS:
        raise ValueError(f"certify must be one of {CERTIFY_LEVELS}")
    sp = M.space
    full = sp.full
    img = _Images(M)
    if certify != "none" and not isinstance(M, SkyscraperSum):
        bad = []
        for m in sp.open_masks:
            try:
                img(m)
            except NotFlabby as e:
                bad.extend(e.report)
        if bad:
            raise NotFlabby(f"{len(bad)} open(s) do not inject into X", bad)

    order = [sp.point_index(p) for p in point_order] if point_order is not None else list(range(len(sp)))
    if sorted(order) != list(range(len(sp))):
        raise ValueError("point_order must list every point exactly once")

    removed = 0
    current = img.dims(full)
    found: Dict[int, Tuple[fmpq_mat, fmpq_mat]] = {}
    while current != (0, 0):
        proper = set()
        for y in order:
            if removed >> y & 1:
                continue
            if img.dims(full & ~(removed | sp.point_closure_mask(y))) != current:
                proper.add(y)
        choice = None
        for y in order:
            if y in proper and not any(z in proper for z in bits(sp.point_closure_mask(y) & ~(1 << y))):
                choice = y
                break
        if choice is None:
            _diagnose(M, "no point splits off a summand")
        y = choice
        rest = full & ~(removed | sp.point_closure_mask(y))
        local = sp.minimal[y] & ~removed
        comp = []
        for i in (0, 1):
            a = img(local).mat(i)
            b = img(rest).mat(i)
            c = gl.extend_basis(gl.intersect_spaces(a, b), a)
            if c.ncols() != current[i] - b.ncols():
                _diagnose(M, f"the summand at {sp.points[y]!r} does not split")
            comp.append(c)
        found[y] = (comp[0], comp[1])
        removed |= sp.point_closure_mask(y)
        current = img.dims(rest)

    ys = sorted(found)
    summands = tuple(SkyscraperSpec(sp.points[y], GradedSpace(found[y][0].ncols(), found[y][1].ncols())) for y in ys)
    X = M.total
    basis = (
        gl.hstack([found[y][0] for y in ys], X.dim0),
        gl.hstack([found[y][1] for y in ys], X.dim1),
    )
    D = SkyscraperSum(sp, summands)
    blocks = []
    for i in (0, 1):
        offs, o = [], 0
        for s in summands:
            offs.append(o)
            o += s.coeff.dim(i)
        blocks.append(offs)

    if isinstance(M, SkyscraperSum):
        perm = _point_permutation(M, summands, basis)
        if perm is not None:
            # a relabelling of coordinates that respects points is natural and invertible as it stands
            witness = Morphism(D, M, _relabel(D, M, perm))
            return Decomposition(M, summands, witness, basis)

    pts_idx = [sp.point_index(s.point) for s in summands]

    def component(m: int) -> GradedMap:
        f = img(m)
        mats = []
        for i in (0, 1):
            idx = []
            for k, s in enumerate(summands):
                if m >> pts_idx[k] & 1:
                    idx.extend(range(blocks[i][k], blocks[i][k] + s.coeff.dim(i)))
            target_cols = gl.columns(basis[i], idx)
            if len(idx) != f.source.dim(i):
                _diagnose(M, f"dimension of M({sp.describe(m)}) differs from its summands")
            x = gl.solve_matrix(f.mat(i), target_cols)
            if x is None:
                _diagnose(M, f"summands present in {sp.describe(m)} do not lie in its image")
            mats.append(x)
        return GradedMap(D.section_m(m), f.source, mats[0], mats[1])

    witness = Morphism(D, M, component)
    dec = Decomposition(M, summands, witness, basis)
    if certify != "none":
        report = dec.verify(edges=certify == "full")
        if report:
            _diagnose(M, f"witness check failed ({report[0]})")
    return dec


def _coordinate_points(specs, space, i: int) -> List[int]:
    out = []
    for s in specs:
        out.extend([space.point_index(s.point)] * s.coeff.dim(i))
    return out


def _point_permutation(M: SkyscraperSum, summands, basis) -> Optional[Tuple[List[int], List[int]]]:
    """Per degree, the row of ``M(X)`` hit by each summand coordinate, if ``basis`` is such a permutation."""
    sp = M.space
    out = []
    for i in (0, 1):
        rows_pt = _coordinate_points(M.specs, sp, i)
        cols_pt = _coordinate_points(summands, sp, i)
        b = basis[i].tolist()
        target = [None] * len(cols_pt)
        for r, row in enumerate(b):
            for c, x in enumerate(row):
                if x:
                    if x != 1 or target[c] is not None or rows_pt[r] != cols_pt[c]:
                        return None
                    target[c] = r
        if None in target or len(set(target)) != len(rows_pt):
            return None
        out.append(target)
    return out[0], out[1]


def _relabel(D: SkyscraperSum, M: SkyscraperSum, perm):
    def comp(m: int) -> GradedMap:
        rows = []
        for i in (0, 1):
            present = [r for r, p in enumerate(_coordinate_points(M.specs, M.space, i)) if m >> p & 1]
            local = {r: k for k, r in enumerate(present)}
            cols = [c for c, p in enumerate(_coordinate_points(D.specs, D.space, i)) if m >> p & 1]
            rows.append([local[perm[i][c]] for c in cols])
        return gl.selection_map(D.section_m(m), M.section_m(m), rows[0], rows[1])

    return comp


def _decomposition(M: Cosheaf, certify: str) -> Decomposition:
    return skyscraper_decomposition(M, certify=certify)


def is_isomorphic(M: Cosheaf, N: Cosheaf, certify: str = "full") -> IsoResult:
    """Decide ``M ≅ N`` for flabby cosheaves by comparing skyscraper data."""
    if M.space != N.space:
        raise SpaceMismatch("cosheaves on different spaces")
    dM = _decomposition(M, certify)
    dN = _decomposition(N, certify)
    if dM.summands != dN.summands:
        return IsoResult(False, None, "skyscraper data differ")
    wM, wN = dM.witness, dN.witness
    w = Morphism(M, N, lambda m: wN.component_m(m) @ wM.component_m(m).inverse())
    return IsoResult(True, w, "skyscraper data agree")


def _carry(a: List[fmpq], b: List[fmpq]) -> fmpq_mat:
    """An invertible matrix sending the nonzero column ``a`` to ``b``."""
    n = len(a)
    ident = gl.identity(n)

    def frame(v):
        col = fmpq_mat(n, 1, v)
        return gl.hstack([col, gl.extend_basis(col, ident)], n)

    return frame(b) * frame(a).inv()


def is_pointed_isomorphic(
    Mp: PointedCosheaf,
    Np: PointedCosheaf,
    certify: str = "full",
    tries: int = 64,
    seed: int = 0,
    grid: int = 4096,
) -> IsoResult:
    """Decide whether a unit-preserving isomorphism ``Mp -> Np`` exists.

    On spaces where every point is closed the answer follows from the
    skyscraper data and the zero pattern of the unit's summand components.
    Elsewhere the unit-preserving morphisms are sampled for an invertible
    one.  When that fails and the family is small enough (at most ``grid``
    points to test) an exhaustive grid settles the question exactly;
    otherwise the result is undecided (``isomorphic is None``).
    """
    M, N = Mp.cosheaf, Np.cosheaf
    if M.space != N.space:
        raise SpaceMismatch("pointed cosheaves on different spaces")
    sp = M.space
    dM = _decomposition(M, certify)
    dN = _decomposition(N, certify)
    if dM.summands != dN.summands:
        return IsoResult(False, None, "underlying cosheaves are not isomorphic")
    if sp.is_t1():
        a = dM.coordinates(Mp.unit_vector()).even
        b = dN.coordinates(Np.unit_vector()).even
        blocks = []
        o = 0
        for s in dM.summands:
            blocks.append((o, o + s.coeff.dim0))
            o += s.coeff.dim0
        mats = []
        for s, (lo, hi) in zip(dM.summands, blocks):
            za = all(v == 0 for v in a[lo:hi])
            zb = all(v == 0 for v in b[lo:hi])
            if za != zb:
                return IsoResult(False, None, f"unit support differs at {s.point!r}")
            mats.append(gl.identity(hi - lo) if za else _carry(list(a[lo:hi]), list(b[lo:hi])))
        D = dM.source
        coords = {s.point: k for k, s in enumerate(dM.summands)}

        def auto(m: int) -> GradedMap:
            present = [coords[p] for p in sp.names(m) if p in coords]
            sec = D.section_m(m)
            return GradedMap(sec, sec, gl.block_diag([mats[k] for k in present]), gl.identity(sec.dim1))

        g = Morphism(D, D, auto)
        wM, wN = dM.witness, dN.witness
        w = Morphism(M, N, lambda m: wN.component_m(m) @ g.component_m(m) @ wM.component_m(m).inverse())
        return IsoResult(True, w, "unit supports agree")

    ph = pointed_hom(Mp, Np)
    if ph is None:
        return IsoResult(False, None, "no unit-preserving morphism exists")
    family = [ph.particular] + ph.directions
    rng = random.Random(seed)
    k = len(ph.directions)
    trials = [[0] * k] + [[rng.randint(-3, 3) for _ in range(k)] for _ in range(tries if k else 0)]
    for coeffs in trials:
        cand = combine(family, [1] + coeffs, M, N)
        if cand.is_iso():
            return IsoResult(True, cand, "invertible unit-preserving morphism found")
    # Both sides are flabby, so a morphism is invertible once its top
    # component is.  det φ_X is a polynomial of degree dim M(X) in the k
    # coefficients; it vanishes identically iff it vanishes on {0..dim}^k.
    d = M.total.dim0 + M.total.dim1
    if (d + 1) ** k <= grid:
        tops = [h.top for h in family]
        for coeffs in itertools.product(range(d + 1), repeat=k):
            f = tops[0]
            for c, t in zip(coeffs, tops[1:]):
                if c:
                    f = f + t.scale(c)
            if f.is_invertible():
                cand = combine(family, [1, *coeffs], M, N)
                if cand.is_iso():
                    return IsoResult(True, cand, "invertible unit-preserving morphism found")
        return IsoResult(False, None, "no unit-preserving morphism is invertible at X")
    return IsoResult(None, None, f"no invertible member among {len(trials)} sampled unit-preserving morphisms")
