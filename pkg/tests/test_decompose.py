import itertools
import random

import pytest
from flint import fmpq
from hypothesis import given
from hypothesis import strategies as st

from conftest import discrete, explicit
from flabby import (
    GradedSpace,
    GradedVector,
    NotCosheaf,
    NotFlabby,
    NotValidated,
    PointedCosheaf,
    SkyscraperSpec,
    SkyscraperSum,
    costalk,
    hom,
    direct_sum,
    is_isomorphic,
    is_pointed_isomorphic,
    skyscraper,
    skyscraper_decomposition,
    zero_cosheaf,
)
from flabby.cosheaf import combine
from flabby.generators import all_t0_spaces, random_skyscraper_sum, random_space, random_specs, random_transport
from flabby.ingest import SingularityData, example_cantor, example_singular, example_singular_pointed


def sky(space, point, d0=1, d1=0):
    return skyscraper(space, SkyscraperSpec(point, GradedSpace(d0, d1)))


def merged(space, specs):
    acc = {}
    for s in specs:
        a = acc.get(s.point, (0, 0))
        acc[s.point] = (a[0] + s.coeff.dim0, a[1] + s.coeff.dim1)
    return [(p, *acc[p]) for p in space.points if p in acc and acc[p] != (0, 0)]


def test_sierpinski_two(sierpinski_two):
    dec = skyscraper_decomposition(sierpinski_two)
    assert sorted(dec.multiset()) == [("a", 1, 0), ("b", 1, 0)]
    assert dec.verify() == []


def test_zero_cosheaf(sierpinski):
    dec = skyscraper_decomposition(zero_cosheaf(sierpinski))
    assert dec.multiset() == [] and dec.verify() == []


def test_singular_data_recovered():
    sp = random_space(random.Random(2), 5, p=0.3)
    data = SingularityData((("x0", 1, 0), ("x3", 0, 2), ("x4", 2, 1)))
    dec = skyscraper_decomposition(example_singular(sp, data))
    assert dec.multiset() == data.multiset(sp)


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_cantor(depth):
    sp, M, Y = example_cantor(depth)
    Mt, _ = random_transport(random.Random(depth), M.materialize())
    for N in (M, Mt):
        dec = skyscraper_decomposition(N)
        assert dec.multiset() == [(y, 1, 0) for y in sp.points if y in Y]


def test_non_flabby_and_non_cosheaf(sierpinski_nonflabby, discrete_identity):
    with pytest.raises(NotFlabby):
        skyscraper_decomposition(sierpinski_nonflabby)
    with pytest.raises(NotCosheaf):
        skyscraper_decomposition(discrete_identity)


def test_invalid_precosheaf_is_reported(sierpinski):
    M = explicit(sierpinski, {"": (1, 0), "a": (1, 0), "ab": (1, 0)},
                 {("", "a"): ([[1]], []), ("a", "ab"): ([[1]], [])})
    with pytest.raises((NotValidated, NotCosheaf)):
        skyscraper_decomposition(M)


def test_certify_levels(sierpinski_two):
    for level in ("none", "opens", "full"):
        dec = skyscraper_decomposition(sierpinski_two, certify=level)
        assert dec.verify() == []
    with pytest.raises(ValueError):
        skyscraper_decomposition(sierpinski_two, certify="some")
    with pytest.raises(ValueError):
        skyscraper_decomposition(sierpinski_two, point_order=["a"])


def test_coordinates(sierpinski_two):
    dec = skyscraper_decomposition(sierpinski_two)
    x = GradedVector((fmpq(2), fmpq(-1)), ())
    assert dec.witness.top(dec.coordinates(x)) == x


def test_round_trip_random():
    rng = random.Random(7)
    for _ in range(60):
        sp = random_space(rng, rng.randint(1, 8), p=rng.uniform(0.1, 0.6), max_opens=128)
        M = random_skyscraper_sum(rng, sp, max_summands=6, max_dim=2)
        N, _ = random_transport(rng, M)
        dec = skyscraper_decomposition(N)
        assert dec.multiset() == merged(sp, M.specs)
        assert dec.verify() == []
        assert skyscraper_decomposition(M).multiset() == dec.multiset()


def test_scan_order_independence_small_spaces():
    rng = random.Random(13)
    for n in range(1, 5):
        for sp in all_t0_spaces(n):
            M = random_skyscraper_sum(rng, sp, max_summands=3, max_dim=2)
            N, _ = random_transport(rng, M)
            a = skyscraper_decomposition(N)
            b = skyscraper_decomposition(N, point_order=list(reversed(sp.points)))
            assert a.multiset() == b.multiset()
            assert b.verify() == []
            for x in sp.points:
                i = sp.point_index(x)
                if sp.is_closed_point(i):
                    d = a.as_dict().get(x, GradedSpace(0, 0))
                    assert costalk(N, x) == d


def test_is_isomorphic_examples(sierpinski):
    M = direct_sum([sky(sierpinski, "a"), sky(sierpinski, "b")])
    res = is_isomorphic(M, M)
    assert res.isomorphic and res.witness.is_natural() and res.witness.is_iso()
    assert not is_isomorphic(M, sky(sierpinski, "b", 2, 0)).isomorphic


def test_shuffles_are_isomorphic():
    rng = random.Random(17)
    for _ in range(20):
        sp = random_space(rng, rng.randint(1, 6))
        specs = random_specs(rng, sp, max_summands=5)
        shuffled = specs[:]
        rng.shuffle(shuffled)
        A, _ = random_transport(rng, SkyscraperSum(sp, specs))
        B, _ = random_transport(rng, SkyscraperSum(sp, shuffled))
        res = is_isomorphic(A, B)
        assert res.isomorphic
        assert res.witness.is_natural() and res.witness.is_iso()


@given(st.integers(0, 10**6))
def test_isomorphism_is_an_equivalence(seed):
    rng = random.Random(seed)
    sp = random_space(rng, rng.randint(1, 4))
    pool = [random_skyscraper_sum(rng, sp, max_summands=2, max_dim=1) for _ in range(3)]
    objs = [random_transport(rng, M)[0] for M in pool]
    objs.append(random_transport(rng, pool[0])[0])
    rel = {(i, j): bool(is_isomorphic(objs[i], objs[j]).isomorphic) for i in range(4) for j in range(4)}
    for i in range(4):
        assert rel[i, i]
        for j in range(4):
            assert rel[i, j] == rel[j, i]
            for k in range(4):
                if rel[i, j] and rel[j, k]:
                    assert rel[i, k]
    assert rel[0, 3]


def test_pointed_examples():
    sp = discrete("p", "q")
    data = [("p", 1, 0), ("q", 1, 0)]
    M = example_singular(sp, data)
    assert is_pointed_isomorphic(PointedCosheaf(M, (0, 0)), PointedCosheaf(M, (1, 0))).isomorphic is False
    a = example_singular_pointed(sp, data, {"p": [1], "q": [0]})
    b = example_singular_pointed(sp, data, {"p": [0], "q": [1]})
    assert is_pointed_isomorphic(a, b).isomorphic is False
    c = example_singular_pointed(sp, data)
    d = example_singular_pointed(sp, data, {"p": [2], "q": [3]})
    res = is_pointed_isomorphic(c, d)
    assert res.isomorphic is True
    w = res.witness
    assert w.is_natural() and w.is_iso()
    assert w.top(c.unit_vector()) == d.unit_vector()


def test_pointed_underlying_mismatch():
    sp = discrete("p", "q")
    a = example_singular_pointed(sp, [("p", 1, 0)])
    b = example_singular_pointed(sp, [("q", 1, 0)])
    assert is_pointed_isomorphic(a, b).isomorphic is False


def test_pointed_general_space(sierpinski):
    # automorphisms of i_a ⊕ i_b act on M(X) by upper triangular matrices
    M = direct_sum([sky(sierpinski, "a"), sky(sierpinski, "b")])
    P = lambda *u: PointedCosheaf(M, u)
    res = is_pointed_isomorphic(P(0, 1), P(1, 1))
    assert res.isomorphic is True
    assert res.witness.is_iso() and res.witness.top(P(0, 1).unit_vector()) == P(1, 1).unit_vector()
    assert is_pointed_isomorphic(P(1, 0), P(1, 1)).isomorphic is False
    # pointed morphisms exist but none is invertible
    assert is_pointed_isomorphic(P(1, 1), P(1, 0)).isomorphic is False
    undecided = is_pointed_isomorphic(P(1, 1), P(1, 0), grid=0)
    assert undecided.isomorphic is None and undecided.witness is None


def _brute_pointed(a, b, bound=2):
    M, N = a.cosheaf, b.cosheaf
    basis = hom(M, N)
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(basis)):
        f = combine(basis, coeffs, M, N)
        if f.top(a.unit_vector()) == b.unit_vector() and f.is_iso():
            return True
    return False


def test_pointed_general_spaces_against_search():
    rng = random.Random(23)
    seen = {True: 0, False: 0}
    for _ in range(40):
        sp = random_space(rng, rng.randint(2, 3), p=0.7)
        if sp.is_t1():
            continue
        M = random_skyscraper_sum(rng, sp, max_summands=2, max_dim=1)
        if M.total.dim0 == 0:
            continue
        a = PointedCosheaf(M, tuple(rng.choice([0, 1]) for _ in range(M.total.dim0)))
        b = PointedCosheaf(M, tuple(rng.choice([0, 1, 2]) for _ in range(M.total.dim0)))
        res = is_pointed_isomorphic(a, b)
        assert res.isomorphic is not None
        if len(hom(M, M)) <= 5:
            assert res.isomorphic == _brute_pointed(a, b)
        if res.isomorphic:
            assert res.witness.is_natural() and res.witness.is_iso()
            assert res.witness.top(a.unit_vector()) == b.unit_vector()
        seen[res.isomorphic] += 1
    assert seen[True] and seen[False]
