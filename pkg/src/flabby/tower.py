"""Finite approximations ``X_n`` of a space, pushforwards, and inverse systems of Hom spaces.

``X_n`` is the T0 quotient seen by the first ``n`` basis opens.  Opens of
``X_n`` pull back to opens of the base, so a cosheaf pushes forward by
evaluating on preimages.  Hom spaces of the pushforwards form an inverse
system whose limit and Mittag-Leffler behaviour are computed here on a
finite window of levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from flint import fmpq_mat

from . import glinalg as gl
from .cosheaf import Cosheaf, Morphism, SkyscraperSpec, SkyscraperSum, hom, skyscraper_hom_labels
from .errors import EmptySystem, IndexOutOfRange, NoBasis, ShapeMismatch, SpaceMismatch
from .finspace import FiniteSpace, QuotientMap, quotient_level
from .glinalg import GradedMap, GradedSpace

__all__ = [
    "Tower",
    "build_tower",
    "pushforward",
    "InverseSystem",
    "hom_system",
    "LimitReport",
    "MittagLefflerReport",
    "limit",
    "lim1_vanishes",
]


@dataclass
class Tower:
    base: FiniteSpace
    levels: List[Tuple[FiniteSpace, QuotientMap]]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> Tuple[FiniteSpace, QuotientMap]:
        """Level ``n``, counted from 1."""
        if not 1 <= n <= self.depth:
            raise IndexOutOfRange(f"level {n} outside 1..{self.depth}")
        return self.levels[n - 1]

    def connecting(self, n: int, m: int) -> QuotientMap:
        """The quotient ``X_n -> X_m`` for ``m <= n``."""
        if m > n:
            raise IndexOutOfRange("connecting maps go from deeper to shallower levels")
        src, qn = self.level(n)
        tgt, qm = self.level(m)
        assignment = [0] * len(src)
        for i, t in enumerate(qn.assignment):
            assignment[t] = qm.assignment[i]
        return QuotientMap(src, tgt, tuple(assignment))

    def is_exhaustive(self) -> bool:
        """Whether the deepest level already separates every point of the base."""
        sp, q = self.levels[-1]
        return len(sp) == len(self.base)


def build_tower(space: FiniteSpace, depth: Optional[int] = None) -> Tower:
    """Levels ``1..depth`` of the basis filtration (all basis members by default)."""
    if space.basis is None:
        raise NoBasis("space carries no ordered basis")
    if depth is None:
        depth = len(space.basis)
    if not 1 <= depth <= len(space.basis):
        raise IndexOutOfRange(f"depth {depth} outside 1..{len(space.basis)}")
    return Tower(space, [quotient_level(space, n) for n in range(1, depth + 1)])


def pushforward(M: Cosheaf, level: Tuple[FiniteSpace, QuotientMap]) -> Cosheaf:
    """``q_* M``: sections over ``V`` are ``M(q^{-1} V)``."""
    sp, q = level
    if q.source != M.space:
        raise SpaceMismatch("the quotient does not start at the cosheaf's space")
    if isinstance(M, SkyscraperSum):
        return SkyscraperSum(sp, [SkyscraperSpec(q(s.point), s.coeff) for s in M.specs])
    pre = {}

    def lift(m: int) -> int:
        hit = pre.get(m)
        if hit is None:
            hit = pre[m] = q.preimage_mask(m)
        return hit

    out = Cosheaf.lazy(sp, lambda m: M.section_m(lift(m)), lambda u, v: M.inclusion_m(lift(u), lift(v)))
    out._valid_by_construction = M._valid_by_construction
    return out


class _Selections(Sequence):
    """Restriction maps given as injective column-to-row assignments, materialised on access."""

    def __init__(self, levels: List[GradedSpace], selections: List[List[int]]):
        self.levels = levels
        self.selections = selections
        self._cache: Dict[int, GradedMap] = {}

    def __len__(self) -> int:
        return len(self.selections)

    def __getitem__(self, n):
        if isinstance(n, slice):
            return [self[i] for i in range(*n.indices(len(self)))]
        if n < 0:
            n += len(self)
        hit = self._cache.get(n)
        if hit is None:
            hit = self._cache[n] = gl.selection_map(self.levels[n + 1], self.levels[n], self.selections[n], [])
        return hit


@dataclass
class InverseSystem:
    """``levels[0] <- levels[1] <- ...`` with ``restrictions[n]: levels[n+1] -> levels[n]``.

    ``terminal`` records that the system is constant beyond its last level,
    as happens when the deepest quotient is the base itself.  Systems whose
    restrictions send basis vectors to distinct basis vectors can be given
    by ``selections`` instead: ``selections[n][j]`` is the basis vector of
    level ``n`` hit by basis vector ``j`` of level ``n+1``.
    """

    levels: List[GradedSpace]
    restrictions: Sequence[GradedMap] = ()
    terminal: bool = False
    selections: Optional[List[List[int]]] = None

    def __post_init__(self):
        if self.selections is not None:
            for n, sel in enumerate(self.selections):
                src, tgt = self.levels[n + 1], self.levels[n]
                if src.dim1 or tgt.dim1 or len(sel) != src.dim0 or len(set(sel)) != len(sel) or not all(0 <= r < tgt.dim0 for r in sel):
                    raise ShapeMismatch(f"selection {n + 2} -> {n + 1} is not an injective map {src} -> {tgt}")
            self.restrictions = _Selections(self.levels, self.selections)
            maps = len(self.selections)
        else:
            self.restrictions = list(self.restrictions)
            maps = len(self.restrictions)
            for n, r in enumerate(self.restrictions):
                if r.source != self.levels[n + 1] or r.target != self.levels[n]:
                    raise ShapeMismatch(f"restriction {n + 2} -> {n + 1} has shape {r.source} -> {r.target}")
        if self.levels and maps != len(self.levels) - 1:
            raise ShapeMismatch(f"{len(self.levels)} levels need {len(self.levels) - 1} restrictions")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def composite(self, m: int, l: int) -> GradedMap:
        """Restriction from level ``m`` to level ``l`` (0-based, ``l <= m``)."""
        if self.selections is not None:
            sel = list(range(self.levels[m].dim0))
            for k in range(m - 1, l - 1, -1):
                sel = [self.selections[k][j] for j in sel]
            return gl.selection_map(self.levels[m], self.levels[l], sel, [])
        f = GradedMap.identity(self.levels[m])
        for k in range(m - 1, l - 1, -1):
            f = self.restrictions[k] @ f
        return f

    def dims(self) -> List[Tuple[int, int]]:
        return [(s.dim0, s.dim1) for s in self.levels]

    def restriction_ranks(self) -> List[Tuple[int, int]]:
        if self.selections is not None:
            return [(len(sel), 0) for sel in self.selections]
        return [r.ranks() for r in self.restrictions]


def _level_vector(h: Morphism, opens: Sequence[int], deg: int) -> List:
    out = []
    for m in opens:
        out.extend(h.component_m(m).mat(deg).entries())
    return out


def hom_system(M: Cosheaf, N: Cosheaf, tower: Tower) -> InverseSystem:
    """Hom spaces of the pushforwards to every level, with restriction maps.

    A transformation at level ``n+1`` restricts to level ``n`` by keeping its
    components on the opens that come from level ``n``; the result is
    written in the basis computed at level ``n``.
    """
    if M.space != tower.base or N.space != tower.base:
        raise SpaceMismatch("cosheaves do not live on the tower base")
    if tower.depth == 0:
        raise EmptySystem("tower has no levels")
    if isinstance(M, SkyscraperSum) and isinstance(N, SkyscraperSum):
        return _skyscraper_system(M, N, tower)
    bases = [hom(pushforward(M, lvl), pushforward(N, lvl)) for lvl in tower.levels]
    levels = [GradedSpace(len(b), 0) for b in bases]
    flabby_target = all(N.to_top_m(m).is_injective() for m in _opens_for_check(N))
    restrictions = []
    for n in range(tower.depth - 1):
        sp_n, q_n = tower.levels[n]
        sp_1, q_1 = tower.levels[n + 1]
        if flabby_target:
            # the top component determines a transformation into a flabby target
            opens_n = [sp_n.full]
        else:
            opens_n = list(sp_n.open_masks)
        opens_1 = [q_1.image_mask(q_n.preimage_mask(m)) for m in opens_n]
        if not bases[n] or not bases[n + 1]:
            coords = gl.zeros(len(bases[n]), len(bases[n + 1]))
        else:
            coords = gl.solve_matrix(_stack(bases[n], opens_n), _stack(bases[n + 1], opens_1))
            if coords is None:
                raise ArithmeticError("restricted transformation is outside the level hom space")
        restrictions.append(GradedMap(levels[n + 1], levels[n], coords, gl.zeros(0, 0)))
    return InverseSystem(levels, restrictions, terminal=tower.is_exhaustive())


def _skyscraper_system(M: SkyscraperSum, N: SkyscraperSum, tower: Tower) -> InverseSystem:
    # pushforwards keep the summand order, so the elementary basis elements
    # carry the same label at every level and restriction keeps the label
    labels = [skyscraper_hom_labels(pushforward(M, lvl), pushforward(N, lvl)) for lvl in tower.levels]
    levels = [GradedSpace(len(b), 0) for b in labels]
    selections = []
    for n in range(tower.depth - 1):
        where = {lab: j for j, lab in enumerate(labels[n])}
        try:
            selections.append([where[lab] for lab in labels[n + 1]])
        except KeyError:
            raise ArithmeticError("restricted transformation is outside the level hom space") from None
    return InverseSystem(levels, terminal=tower.is_exhaustive(), selections=selections)


def _opens_for_check(N: Cosheaf):
    if isinstance(N, SkyscraperSum):
        return [N.space.full]
    return N.space.open_masks


def _stack(basis: List[Morphism], opens: Sequence[int]) -> fmpq_mat:
    vecs = [_level_vector(h, opens, 0) + _level_vector(h, opens, 1) for h in basis]
    return fmpq_mat(len(vecs), len(vecs[0]), [x for v in vecs for x in v]).transpose()


@dataclass
class LimitReport:
    space: GradedSpace
    stabilized: bool
    index: Optional[int]  # least n0 (1-based) from which deeper images are stable
    lag: Optional[int]
    depth: int
    image_depths: List[int] = field(default_factory=list)  # per level, first level whose image is final

    @property
    def status(self) -> str:
        return "stabilized" if self.stabilized else f"unstabilized at depth {self.depth}"


@dataclass
class MittagLefflerReport:
    holds: Optional[bool]  # True, or None when the window is too short to tell
    depth: Optional[int]
    window: int
    image_depths: List[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.holds)


def _image_profile(S: InverseSystem):
    """Per level ``l``: least ``k >= l`` whose image in ``l`` equals the deepest one."""
    N = S.depth
    ks = []
    for l in range(N):
        if S.selections is not None:
            # injective restrictions: images are nested and sized by the source
            final = S.levels[N - 1].dim0
            k = next(k for k in range(l, N) if S.levels[k].dim0 == final)
        else:
            final = S.composite(N - 1, l).ranks()
            k = l
            while S.composite(k, l).ranks() != final:
                k += 1
        ks.append(k)
    lag = max(k - l for l, k in enumerate(ks))
    stabilized = S.terminal or lag <= N - 2
    return ks, lag, stabilized


def limit(S: InverseSystem) -> LimitReport:
    """Compatible families over the observed levels.

    When the images stabilise (Mittag-Leffler with uniform lag ``L`` seen
    inside the window) the limit is computed on the stable images of the
    levels ``1..N-L``; otherwise it is the space of compatible families over
    all levels and the report says the window was too short.
    """
    if S.depth == 0:
        raise EmptySystem("inverse system has no levels")
    N = S.depth
    ks, lag, stabilized = _image_profile(S)
    if S.selections is not None:
        # a compatible family is fixed by its deepest member
        return LimitReport(S.levels[-1], stabilized, lag + 1 if stabilized else None, lag, N, [k + 1 for k in ks])
    if stabilized:
        K = N if S.terminal else N - lag
        spans = [[gl.column_space(S.composite(N - 1, l).mat(i)) for l in range(K)] for i in (0, 1)]
    else:
        K = N
        spans = [[gl.identity(S.levels[l].dim(i)) for l in range(K)] for i in (0, 1)]
    dims = []
    for i in (0, 1):
        B = spans[i]
        widths = [b.ncols() for b in B]
        offs = [sum(widths[:l]) for l in range(K)]
        total = sum(widths)
        rows = [S.levels[l].dim(i) for l in range(K - 1)]
        D = fmpq_mat(sum(rows), total)
        r0 = 0
        for l in range(K - 1):
            lower = B[l]
            upper = S.restrictions[l].mat(i) * B[l + 1]
            for r in range(rows[l]):
                for c in range(lower.ncols()):
                    if lower[r, c]:
                        D[r0 + r, offs[l] + c] = lower[r, c]
                for c in range(upper.ncols()):
                    if upper[r, c]:
                        D[r0 + r, offs[l + 1] + c] = -upper[r, c]
            r0 += rows[l]
        dims.append(total - gl.rank(D))
    return LimitReport(
        GradedSpace(dims[0], dims[1]),
        stabilized,
        lag + 1 if stabilized else None,
        lag,
        N,
        [k + 1 for k in ks],
    )


def lim1_vanishes(S: InverseSystem) -> MittagLefflerReport:
    """Mittag-Leffler verdict on the observed window.

    Finite-dimensional image chains always stabilise, so the verdict is
    ``True`` once stabilisation is visible and ``None`` (undecided) when the
    window is too short to see it.  It is never ``False``.
    """
    if S.depth == 0:
        raise EmptySystem("inverse system has no levels")
    ks, lag, stabilized = _image_profile(S)
    return MittagLefflerReport(True if stabilized else None, lag + 1 if stabilized else None, S.depth, [k + 1 for k in ks])
