import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import Q, ZERO
from flabby import (
    EmptySystem,
    GradedMap,
    GradedSpace,
    IndexOutOfRange,
    NoBasis,
    ShapeMismatch,
    SkyscraperSpec,
    SpaceMismatch,
    hom,
    is_cosheaf,
    is_flabby,
    skyscraper,
    skyscraper_decomposition,
    space_from_basis,
    validate,
    zero_cosheaf,
)
from flabby.generators import random_skyscraper_sum, random_space, random_transport
from flabby.glinalg import qmat
from flabby.ingest import example_cantor, example_singular
from flabby.tower import InverseSystem, Tower, build_tower, hom_system, lim1_vanishes, limit, pushforward

# p and q are told apart by the second basis member only
SPLIT = space_from_basis(["p", "q", "r"], [["p", "q"], ["p"], ["p", "q", "r"]])


def line(n, scalar):
    return GradedMap(GradedSpace(n, 0), GradedSpace(n, 0), qmat([[scalar]] if n else [], n, n), None)


def test_build_tower_errors():
    with pytest.raises(IndexOutOfRange):
        build_tower(SPLIT, 4)
    with pytest.raises(IndexOutOfRange):
        build_tower(SPLIT).level(0)
    with pytest.raises(IndexOutOfRange):
        build_tower(SPLIT).connecting(1, 2)
    bare = random_space(random.Random(0), 3)
    bare.basis = None
    with pytest.raises(NoBasis):
        build_tower(bare)


def test_connecting_maps_commute():
    rng = random.Random(4)
    for _ in range(10):
        sp = random_space(rng, 6, p=0.3)
        t = build_tower(sp)
        for n in range(1, t.depth + 1):
            for m in range(1, n + 1):
                c = t.connecting(n, m)
                qn, qm = t.level(n)[1], t.level(m)[1]
                assert c.is_continuous()
                assert all(c(qn(x)) == qm(x) for x in sp.points)


def test_pushforward_examples():
    t = build_tower(SPLIT)
    M = example_singular(SPLIT, [("p", 1, 0), ("q", 0, 1)])
    top = t.level(t.depth)
    assert t.is_exhaustive()
    P = pushforward(M, top)
    sp, q = top
    for u in SPLIT.open_masks:
        assert P.section_m(q.image_mask(u)) == M.section_m(u)
    first = t.level(1)
    merged = pushforward(M, first)
    dec = skyscraper_decomposition(merged)
    assert dec.multiset() == [(first[1]("p"), 1, 1)]
    ix = pushforward(skyscraper(SPLIT, SkyscraperSpec("r", Q)), first)
    assert ix.specs == (SkyscraperSpec(first[1]("r"), Q),)
    with pytest.raises(SpaceMismatch):
        pushforward(M, build_tower(random_space(random.Random(1), 3)).level(1))


def test_pushforward_of_general_cosheaf_preserves_properties():
    rng = random.Random(9)
    for _ in range(8):
        sp = random_space(rng, 5, p=0.3)
        M, _ = random_transport(rng, random_skyscraper_sum(rng, sp, max_summands=4))
        for lvl in build_tower(sp).levels:
            P = pushforward(M, lvl).materialize()
            assert validate(P) == []
            assert is_cosheaf(P) and is_flabby(P)


def test_hom_system_constant():
    M = skyscraper(SPLIT, SkyscraperSpec("p", Q))
    for N in (M, random_transport(random.Random(0), M)[0]):
        S = hom_system(N, N, build_tower(SPLIT))
        assert S.dims() == [(1, 0)] * 3
        assert all(r == line(1, 1) for r in S.restrictions)
        L = limit(S)
        assert L.space == Q and L.stabilized and L.index == 1


def test_hom_system_zero():
    Z = zero_cosheaf(SPLIT)
    S = hom_system(Z, Z, build_tower(SPLIT))
    assert S.dims() == [(0, 0)] * 3
    assert limit(S).space == ZERO and lim1_vanishes(S).holds is True


def test_hom_system_separation_level():
    M = example_singular(SPLIT, [("p", 1, 0), ("q", 1, 0)])
    for N in (M, random_transport(random.Random(3), M)[0]):
        S = hom_system(N, N, build_tower(SPLIT))
        # one point carrying Q^2, then p and q apart with one cross map q -> p
        assert S.dims() == [(4, 0), (3, 0), (3, 0)]
        assert [r.ranks() for r in S.restrictions] == [(3, 0), (3, 0)]
        assert S.restriction_ranks() == [(3, 0), (3, 0)]
        L = limit(S)
        assert L.space == GradedSpace(3, 0) and L.stabilized and L.index == 2


def test_fast_and_general_paths_agree():
    rng = random.Random(21)
    for _ in range(15):
        sp = random_space(rng, rng.randint(2, 6), p=0.3)
        M = random_skyscraper_sum(rng, sp, max_summands=3, max_dim=1)
        N = random_skyscraper_sum(rng, sp, max_summands=3, max_dim=1)
        t = build_tower(sp)
        fast = hom_system(M, N, t)
        slow = hom_system(random_transport(rng, M)[0], random_transport(rng, N)[0], t)
        assert fast.dims() == slow.dims()
        assert fast.restriction_ranks() == slow.restriction_ranks()
        assert limit(fast).space == limit(slow).space == GradedSpace(len(hom(M, N)), 0)


def test_restrictions_compose_coherently():
    rng = random.Random(8)
    for _ in range(10):
        sp = random_space(rng, 5, p=0.3)
        M, _ = random_transport(rng, random_skyscraper_sum(rng, sp, max_summands=3))
        t = build_tower(sp)
        S = hom_system(M, M, t)
        for n in range(2, t.depth):
            skip = hom_system(M, M, Tower(sp, [t.levels[n - 2], t.levels[n]]))
            assert skip.restrictions[0] == S.composite(n, n - 2)


def test_limit_examples():
    S = InverseSystem([Q] * 4, [line(1, 1)] * 3)
    L = limit(S)
    assert L.space == Q and L.stabilized and L.index == 1
    zero = InverseSystem([Q] * 4, [line(1, 0)] * 3)
    L = limit(zero)
    assert L.space == ZERO and L.stabilized
    assert lim1_vanishes(zero).holds is True
    with pytest.raises(EmptySystem):
        limit(InverseSystem([], []))
    with pytest.raises(EmptySystem):
        lim1_vanishes(InverseSystem([], []))
    with pytest.raises(ShapeMismatch):
        InverseSystem([Q, Q], [])


def test_unstabilized_window():
    # inclusions Q^3 <- Q^2 <- Q^1: every image keeps shrinking
    levels = [GradedSpace(n, 0) for n in (3, 2, 1)]
    incl = [GradedMap(levels[k + 1], levels[k], qmat([[1 if i == j else 0 for j in range(levels[k + 1].dim0)] for i in range(levels[k].dim0)]), None) for k in range(2)]
    S = InverseSystem(levels, incl)
    L = limit(S)
    assert not L.stabilized and L.index is None and L.status == "unstabilized at depth 3"
    assert L.space == GradedSpace(1, 0)
    ml = lim1_vanishes(S)
    assert ml.holds is None and not ml
    sel = InverseSystem(levels, selections=[[0, 1], [0]])
    assert limit(sel).space == L.space and not limit(sel).stabilized
    assert sel.composite(2, 0) == incl[0] @ incl[1]
    assert InverseSystem(levels, incl, terminal=True) and limit(InverseSystem(levels, incl, terminal=True)).stabilized
    with pytest.raises(ShapeMismatch):
        InverseSystem(levels, selections=[[0, 0], [0]])


def test_cantor_depth_six():
    sp, M, Y = example_cantor(6)
    t = build_tower(sp)
    S = hom_system(M, M, t)
    L = limit(S)
    assert L.stabilized and L.space == GradedSpace(64, 0)
    assert len(hom(M, M)) == 64
    assert lim1_vanishes(S).holds is True


@given(st.integers(0, 10**6))
def test_limit_matches_base_hom(seed):
    rng = random.Random(seed)
    sp = random_space(rng, rng.randint(1, 6), p=rng.uniform(0.1, 0.5))
    M, _ = random_transport(rng, random_skyscraper_sum(rng, sp, max_summands=3, max_dim=1))
    N, _ = random_transport(rng, random_skyscraper_sum(rng, sp, max_summands=3, max_dim=1))
    S = hom_system(M, N, build_tower(sp))
    L = limit(S)
    assert L.stabilized
    assert L.space == GradedSpace(len(hom(M, N)), 0)
    assert lim1_vanishes(S).holds is True
