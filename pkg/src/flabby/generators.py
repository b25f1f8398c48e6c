"""Random and exhaustive test objects: spaces, precosheaves, skyscraper data, changes of basis."""

from __future__ import annotations

import itertools
import random
from typing import Iterator, List, Optional, Sequence

from flint import fmpq_mat

from . import glinalg as gl
from .cosheaf import Cosheaf, Morphism, SkyscraperSpec, SkyscraperSum, transport
from .finspace import FiniteSpace, bits, space_from_minimal_opens
from .glinalg import GradedMap, GradedSpace

__all__ = [
    "point_names",
    "space_from_order",
    "random_space",
    "all_t0_spaces",
    "chains_space",
    "random_specs",
    "random_skyscraper_sum",
    "random_invertible",
    "random_transport",
    "random_precosheaf",
]


def point_names(n: int) -> List[str]:
    return [f"x{i:02d}" if n > 10 else f"x{i}" for i in range(n)]


def space_from_order(names: Sequence[str], below: Sequence[int]) -> FiniteSpace:
    """Space whose minimal opens are the down-sets ``below[i]`` (bitmasks, reflexive, transitive)."""
    return space_from_minimal_opens(names, [[names[j] for j in bits(b)] for b in below])


def _closure(n: int, below: List[int]) -> List[int]:
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = below[i]
            for j in bits(below[i]):
                acc |= below[j]
            if acc != below[i]:
                below[i] = acc
                changed = True
    return below


def random_space(
    rng: random.Random,
    n: int,
    p: float = 0.3,
    max_opens: Optional[int] = None,
    names: Optional[Sequence[str]] = None,
) -> FiniteSpace:
    """Random T0 space on ``n`` points from a random partial order.

    Each pair is related with probability ``p`` along a random linear
    order, then closed transitively.  With ``max_opens`` the draw is
    repeated until the space has at most that many opens (counted lazily).
    """
    names = list(names) if names is not None else point_names(n)
    while True:
        perm = list(range(n))
        rng.shuffle(perm)
        below = [1 << i for i in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < p:
                    below[perm[b]] |= 1 << perm[a]
        sp = space_from_order(names, _closure(n, below))
        if max_opens is None or _count_at_most(sp, max_opens):
            return sp


def _count_at_most(sp: FiniteSpace, cap: int) -> bool:
    for k, _ in enumerate(sp.iter_open_masks()):
        if k >= cap:
            return False
    return True


def all_t0_spaces(n: int) -> Iterator[FiniteSpace]:
    """Every T0 topology on the labelled points ``x0..x{n-1}``, once each."""
    names = point_names(n)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for choice in itertools.product((0, 1), repeat=len(pairs)):
        below = [1 << i for i in range(n)]
        for (i, j), c in zip(pairs, choice):
            if c:
                below[j] |= 1 << i  # i <= j
        ok = True
        for j in range(n):
            for i in bits(below[j]):
                if i != j and below[i] >> j & 1:
                    ok = False  # antisymmetry
                if below[i] & ~below[j]:
                    ok = False  # transitivity
        if ok:
            yield space_from_order(names, below)


def chains_space(lengths: Sequence[int]) -> FiniteSpace:
    """Disjoint union of chains; chain ``c`` has points ``c{c}_{k}`` with ``k=0`` open."""
    names, below = [], []
    for c, ln in enumerate(lengths):
        start = len(names)
        for k in range(ln):
            names.append(f"c{c}_{k}")
            below.append(sum(1 << (start + t) for t in range(k + 1)))
    return space_from_order(names, below)


def random_specs(
    rng: random.Random,
    space: FiniteSpace,
    max_summands: int = 8,
    max_dim: int = 2,
    distinct: bool = False,
) -> List[SkyscraperSpec]:
    """Random skyscraper data with nonzero coefficients."""
    k = rng.randint(0, max_summands)
    pts = list(space.points)
    if distinct:
        chosen = rng.sample(pts, min(k, len(pts)))
    else:
        chosen = [rng.choice(pts) for _ in range(k)]
    out = []
    for p in chosen:
        while True:
            d = (rng.randint(0, max_dim), rng.randint(0, max_dim))
            if d != (0, 0):
                break
        out.append(SkyscraperSpec(p, GradedSpace(*d)))
    return out


def random_skyscraper_sum(rng: random.Random, space: FiniteSpace, **kw) -> SkyscraperSum:
    return SkyscraperSum(space, random_specs(rng, space, **kw))


def random_invertible(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> fmpq_mat:
    while True:
        m = fmpq_mat(n, n, [rng.randint(lo, hi) for _ in range(n * n)])
        if n == 0 or m.rank() == n:
            return m


def random_transport(rng: random.Random, M: Cosheaf, lo: int = -3, hi: int = 3):
    """``(M', g)`` with ``g: M -> M'`` a random open-wise change of basis."""
    g = {}
    for m in M.space.open_masks:
        s = M.section_m(m)
        g[m] = GradedMap(s, s, random_invertible(rng, s.dim0, lo, hi), random_invertible(rng, s.dim1, lo, hi))
    return transport(M, g)


def random_precosheaf(
    rng: random.Random,
    space: FiniteSpace,
    max_gens: int = 2,
    relation_prob: float = 0.5,
) -> Cosheaf:
    """A quotient of a sum of representables, materialised.

    Per degree: up to ``max_gens`` representables ``h_W`` (``h_W(U) = Q``
    when ``W ⊆ U``, else 0) for random nonempty opens ``W``, and with
    probability ``relation_prob`` one relation: a random integer vector at a
    random open, killed there and everywhere above.  Section dimensions stay
    at most ``max_gens``.  Some draws are cosheaves and many are not.
    """
    opens = [m for m in space.open_masks if m]
    if not opens:
        return SkyscraperSum(space, [])
    per_deg = []
    for _ in (0, 1):
        gens = [rng.choice(opens) for _ in range(rng.randint(0, max_gens))]
        rel = None
        if gens and rng.random() < relation_prob:
            at = rng.choice(opens)
            present = [j for j, w in enumerate(gens) if not w & ~at]
            if present:
                rel = (at, {j: rng.randint(-2, 2) for j in present})
        per_deg.append((gens, rel))

    def free_rows(deg: int, m: int) -> List[int]:
        gens = per_deg[deg][0]
        return [j for j, w in enumerate(gens) if not w & ~m]

    def quotient_data(deg: int, m: int):
        """(projection F(U) -> M(U), lift M(U) -> F(U))."""
        rows = free_rows(deg, m)
        gens, rel = per_deg[deg]
        k = len(rows)
        if rel is not None and not rel[0] & ~m and any(rel[1].values()):
            w = fmpq_mat(k, 1, [rel[1].get(j, 0) for j in rows])
            proj = gl.quotient_matrix(w)
        else:
            proj = gl.identity(k)
        # lift: the free coordinates of the projection's rref
        r, piv = gl.rref(proj)
        lift = fmpq_mat(k, proj.nrows())
        for i, pcol in enumerate(piv):
            lift[pcol, i] = 1
        lift = lift * (proj * lift).inv() if proj.nrows() else lift
        return rows, proj, lift

    cache = {}

    def data(deg, m):
        key = (deg, m)
        if key not in cache:
            cache[key] = quotient_data(deg, m)
        return cache[key]

    secs, maps = {}, {}
    for m in space.open_masks:
        secs[space.subset(m)] = GradedSpace(data(0, m)[1].nrows(), data(1, m)[1].nrows())
    for u, v in space.hasse_edges():
        mats = []
        for deg in (0, 1):
            ru, _, lu = data(deg, u)
            rv, pv, _ = data(deg, v)
            sel = fmpq_mat(len(rv), len(ru))
            for c, j in enumerate(ru):
                sel[rv.index(j), c] = 1
            mats.append(pv * sel * lu)
        maps[(space.subset(u), space.subset(v))] = GradedMap.from_mats(mats[0], mats[1])
    return Cosheaf(space, secs, maps)
