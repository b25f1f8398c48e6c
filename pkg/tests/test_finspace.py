import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flabby import (
    DuplicatePoint,
    IndexOutOfRange,
    NoBasis,
    NotOpen,
    NotT0,
    UnknownPoint,
    enumerate_coverings,
    minimal_open,
    point_closure,
    quotient_level,
    space_from_basis,
)
from flabby.finspace import FiniteSpace, bits
from flabby.generators import all_t0_spaces, chains_space, random_space

from conftest import discrete


def brute_opens(space):
    """All unions of finite intersections of basis members, plus the empty set and the whole space."""
    n = len(space)
    full = (1 << n) - 1
    basis = list(space.basis)
    inters = {full}
    for k in range(1, len(basis) + 1):
        for combo in itertools.combinations(basis, k):
            m = full
            for b in combo:
                m &= b
            inters.add(m)
    opens = {0, full}
    inters = list(inters)
    for k in range(1, len(inters) + 1):
        for combo in itertools.combinations(inters, k):
            u = 0
            for b in combo:
                u |= b
            opens.add(u)
    return opens


def test_sierpinski_opens(sierpinski):
    assert sierpinski.opens == [frozenset(), frozenset("a"), frozenset("ab")]


def test_one_point_space_is_fine():
    sp = space_from_basis(["a"], [])
    assert sp.opens == [frozenset(), frozenset("a")]


def test_discrete_four_points_has_sixteen_opens():
    sp = discrete("p1", "p2", "p3", "p4")
    assert len(sp.opens) == 16
    assert set(sp.open_masks) == brute_opens(sp)


def test_empty_space():
    sp = space_from_basis([], [])
    assert sp.opens == [frozenset()]
    assert sp.is_t1()


def test_construction_errors():
    with pytest.raises(NotT0):
        space_from_basis(["a", "b"], [])
    with pytest.raises(NotT0):
        space_from_basis(["a", "b", "c"], [["a", "b"]])
    with pytest.raises(DuplicatePoint):
        space_from_basis(["a", "a"], [["a"]])
    with pytest.raises(UnknownPoint):
        space_from_basis(["a"], [["z"]])


def test_closures_and_minimal_opens(sierpinski):
    assert point_closure(sierpinski, "b") == {"b"}
    assert point_closure(sierpinski, "a") == {"a", "b"}
    assert minimal_open(sierpinski, "a") == {"a"}
    assert minimal_open(sierpinski, "b") == {"a", "b"}
    d = discrete("p", "q", "r", "s")
    for p in d.points:
        assert point_closure(d, p) == {p}
        assert minimal_open(d, p) == {p}
    with pytest.raises(UnknownPoint):
        point_closure(sierpinski, "zz")
    with pytest.raises(UnknownPoint):
        minimal_open(sierpinski, "zz")


def test_not_open_is_rejected(sierpinski):
    with pytest.raises(NotOpen):
        sierpinski.require_open(["b"])
    with pytest.raises(NotOpen):
        enumerate_coverings(sierpinski, ["b"])


def test_quotient_levels():
    d = discrete("w", "x", "y", "z")
    sp, q = quotient_level(d, 2)
    assert sp.points == ("w", "x", "y")
    assert [q(p) for p in "wxyz"] == ["w", "x", "y", "y"]
    assert sp.opens == [frozenset(), frozenset("w"), frozenset("x"), frozenset("wx"), frozenset("wxy")]
    full, q4 = quotient_level(d, 4)
    assert full.points == d.points and full.opens == d.opens
    assert q4.assignment == (0, 1, 2, 3)


def test_quotient_of_sierpinski_is_itself(sierpinski):
    sp, q = quotient_level(sierpinski, 1)
    assert sp.opens == sierpinski.opens
    assert q.is_continuous() and q.is_surjective()


def test_quotient_errors(sierpinski):
    with pytest.raises(IndexOutOfRange):
        quotient_level(sierpinski, 0)
    with pytest.raises(IndexOutOfRange):
        quotient_level(sierpinski, 2)
    bare = FiniteSpace(["a"], [1])
    with pytest.raises(NoBasis):
        quotient_level(bare, 1)


def test_coverings_examples(sierpinski, discrete2):
    assert enumerate_coverings(sierpinski, ["a", "b"]) == [(frozenset("ab"),)]
    assert enumerate_coverings(sierpinski, []) == [()]
    covers = set(map(frozenset, enumerate_coverings(discrete2, ["p", "q"])))
    assert covers == {frozenset([frozenset("pq")]), frozenset([frozenset("p"), frozenset("q")])}


def brute_coverings(space, v, irredundant):
    subs = [u for u in space.open_masks if not u & ~v]
    out = set()
    for k in range(0, len(subs) + 1):
        for combo in itertools.combinations(subs, k):
            u = 0
            for c in combo:
                u |= c
            if u != v:
                continue
            if irredundant:
                ok = True
                for j in range(len(combo)):
                    rest = 0
                    for i, c in enumerate(combo):
                        if i != j:
                            rest |= c
                    if not combo[j] & ~rest:
                        ok = False
                if not ok:
                    continue
            out.add(frozenset(space.subset(c) for c in combo))
    return out


@pytest.mark.parametrize("n", [1, 2, 3])
def test_coverings_match_brute_force(n):
    for sp in all_t0_spaces(n):
        for v in sp.open_masks:
            for irr in (True, False):
                got = enumerate_coverings(sp, sp.subset(v), irredundant_only=irr)
                assert len(got) == len(set(map(frozenset, got)))
                assert set(map(frozenset, got)) == brute_coverings(sp, v, irr)


def test_coverings_match_brute_force_on_four_points():
    rng = random.Random(4)
    spaces = list(all_t0_spaces(4))
    for sp in rng.sample(spaces, 25):
        v = sp.full
        for irr in (True, False):
            got = enumerate_coverings(sp, sp.subset(v), irredundant_only=irr)
            assert set(map(frozenset, got)) == brute_coverings(sp, v, irr)


def test_t0_topology_counts():
    # labelled T0 topologies on n points: 1, 1, 3, 19, 219
    assert [sum(1 for _ in all_t0_spaces(n)) for n in range(5)] == [1, 1, 3, 19, 219]


def test_hasse_edges_add_one_point():
    sp = chains_space([2, 3])
    for u, v in sp.hasse_edges():
        assert bin(v & ~u).count("1") == 1 and not u & ~v
        assert sp.is_open_mask(u) and sp.is_open_mask(v)
    assert len(sp.opens) == 3 * 4


spaces = st.builds(
    lambda seed, n, p: random_space(random.Random(seed), n, p=p),
    st.integers(0, 10**6),
    st.integers(1, 7),
    st.floats(0.0, 0.8),
)


@given(spaces)
def test_topology_invariants(sp):
    opens = set(sp.open_masks)
    assert 0 in opens and sp.full in opens
    for a in opens:
        for b in opens:
            assert a | b in opens and a & b in opens
    assert opens == brute_opens(sp)
    for x in range(len(sp)):
        mx = sp.minimal[x]
        assert mx >> x & 1
        assert all(not mx & ~u for u in opens if u >> x & 1)
    for y in sp.points:
        assert point_closure(sp, y) == {z for z in sp.points if y in minimal_open(sp, z)}
    # T0
    assert len({sp.minimal[x] for x in range(len(sp))}) == len(sp)


@given(spaces, st.data())
def test_quotient_tower_commutes(sp, data):
    n = data.draw(st.integers(1, len(sp.basis))) if sp.basis else None
    if n is None:
        return
    for m in range(1, n + 1):
        xn, qn = quotient_level(sp, n)
        xm, qm = quotient_level(sp, m)
        assert qn.is_continuous() and qn.is_surjective()
        # preimage embeds the lattice of X_n into that of X
        pre = [qn.preimage_mask(u) for u in xn.open_masks]
        assert len(set(pre)) == len(pre) and all(sp.is_open_mask(p) for p in pre)
        for a, b in itertools.product(xn.open_masks, repeat=2):
            assert qn.preimage_mask(a | b) == qn.preimage_mask(a) | qn.preimage_mask(b)
            assert qn.preimage_mask(a & b) == qn.preimage_mask(a) & qn.preimage_mask(b)
        # X -> X_n -> X_m agrees with X -> X_m
        for i in range(len(sp)):
            j = qn.assignment[i]
            rep = next(k for k in range(len(sp)) if qn.assignment[k] == j)
            assert qm.assignment[rep] == qm.assignment[i]
