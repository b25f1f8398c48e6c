import random
from fractions import Fraction

import pytest
import sympy
from flint import fmpq, fmpq_mat
from hypothesis import given
from hypothesis import strategies as st

from flabby import GradedMap, GradedSpace, GradedVector, ShapeMismatch, check_exact, kernel_basis, quotient, solve
from flabby.glinalg import (
    extend_basis,
    format_q,
    intersect_spaces,
    nullspace,
    qmat,
    rank,
    solve_matrix,
    to_q,
)

Q1 = GradedSpace(1, 0)


def gmap(src, tgt, m0, m1=None):
    src, tgt = GradedSpace(*src), GradedSpace(*tgt)
    return GradedMap(src, tgt, qmat(m0, tgt.dim0, src.dim0), qmat(m1 or [[0] * src.dim1 for _ in range(tgt.dim1)], tgt.dim1, src.dim1))


def test_rationals_round_trip():
    assert format_q(0) == "0"
    assert format_q(fmpq(3, 2)) == "3/2"
    assert format_q(fmpq(-4, 6)) == "-2/3"
    assert format_q(5) == "5/1"
    assert to_q("3") == 3 and to_q("-6/4") == fmpq(-3, 2) and to_q(Fraction(1, 3)) == fmpq(1, 3)
    with pytest.raises(ZeroDivisionError):
        to_q("1/0")
    with pytest.raises(TypeError):
        to_q(1.5)


def test_solve_examples():
    ident = GradedMap.identity(Q1)
    assert solve(ident, GradedVector((fmpq(3, 2),), ())).even == (fmpq(3, 2),)
    assert solve(GradedMap.zero(Q1, Q1), GradedVector((1,), ())) is None
    f = gmap((2, 0), (1, 0), [[1, 1]])
    assert solve(f, GradedVector((2,), ())).even == (2, 0)
    with pytest.raises(ShapeMismatch):
        solve(f, GradedVector((1, 1), ()))


def test_kernel_examples():
    assert len(kernel_basis(GradedMap.zero(GradedSpace(2, 0), Q1))) == 2
    assert kernel_basis(GradedMap.identity(GradedSpace(2, 1))) == []
    (v,) = kernel_basis(gmap((2, 0), (1, 0), [[1, 1]]))
    assert v.even == (1, -1) and v.odd == ()
    (w,) = kernel_basis(gmap((0, 2), (0, 1), [], [[2, 1]]))
    assert w.even == () and w.odd == (fmpq(1, 2), -1)


def test_quotient_examples():
    V = GradedSpace(2, 0)
    Qs, p = quotient(V, [GradedVector((1, 0), ())])
    assert Qs == GradedSpace(1, 0)
    Qs, p = quotient(V, [])
    assert Qs == V and p == GradedMap.identity(V)
    Qs, p = quotient(GradedSpace(2, 1), [GradedVector((1, 1), (0,))])
    assert Qs == GradedSpace(1, 1)
    with pytest.raises(ShapeMismatch):
        quotient(V, [GradedVector((1,), ())])


def test_check_exact_examples():
    V = Q1
    f = GradedMap.zero(GradedSpace(0, 0), V)
    # im 0 = 0 = ker id
    assert check_exact(f, GradedMap.identity(V)) is True
    assert check_exact(GradedMap.identity(V), GradedMap.identity(V)) is False
    assert check_exact(GradedMap.zero(GradedSpace(0, 0), GradedSpace(0, 0)), GradedMap.identity(GradedSpace(0, 0)))
    assert check_exact(GradedMap.identity(V), GradedMap.zero(V, GradedSpace(0, 0)))
    f = gmap((1, 0), (2, 0), [[1], [1]])
    g = gmap((2, 0), (1, 0), [[1, -1]])
    assert check_exact(f, g)
    with pytest.raises(ShapeMismatch):
        check_exact(f, GradedMap.identity(GradedSpace(3, 0)))


def test_shape_mismatch_on_construction():
    with pytest.raises(ShapeMismatch):
        GradedMap(Q1, Q1, qmat([[1, 2]]), None)


def test_graded_map_algebra():
    f = gmap((2, 1), (2, 1), [[1, 2], [0, 1]], [[3]])
    assert f @ f.inverse() == GradedMap.identity(f.source)
    assert (f - f).is_zero()
    assert f.scale(2) == f + f
    assert f.ranks() == (2, 1) and f.is_invertible()


def to_sympy(m: fmpq_mat):
    return sympy.Matrix(m.nrows(), m.ncols(), lambda i, j: sympy.Rational(int(m[i, j].p), int(m[i, j].q)))


def small_matrix(draw, r, c):
    return fmpq_mat(r, c, [draw(st.integers(-2, 2)) for _ in range(r * c)])


@st.composite
def composable(draw):
    a, b, c = (draw(st.integers(0, 3)) for _ in range(3))
    f = small_matrix(draw, b, a)
    g = small_matrix(draw, c, b)
    if draw(st.booleans()) and b:
        # bias towards g f = 0
        k = nullspace(f.transpose()).transpose()
        rows = k.nrows()
        if rows:
            mix = small_matrix(draw, c, rows)
            g = mix * k
    return f, g


def oracle_exact(f: fmpq_mat, g: fmpq_mat) -> bool:
    F, G = to_sympy(f), to_sympy(g)
    if F.cols and G.rows and not (G * F).is_zero_matrix:
        return False
    # im f inside ker g, then every kernel vector must lie in the span of f's columns
    if F.cols and G.rows and not (G * F).is_zero_matrix:
        return False
    kernel = G.nullspace() if G.rows else [sympy.eye(F.rows)[:, i] for i in range(F.rows)]
    for v in kernel:
        if F.cols == 0:
            if any(v):
                return False
            continue
        if F.row_join(v).rank() != F.rank():
            return False
    return True


@given(composable())
def test_check_exact_matches_span_oracle(fg):
    f, g = fg
    a, b, c = f.ncols(), f.nrows(), g.nrows()
    F = GradedMap(GradedSpace(a, 0), GradedSpace(b, 0), f, None)
    G = GradedMap(GradedSpace(b, 0), GradedSpace(c, 0), g, None)
    assert check_exact(F, G) == oracle_exact(f, g)
    # odd part behaves identically
    Fo = GradedMap(GradedSpace(0, a), GradedSpace(0, b), None, f)
    Go = GradedMap(GradedSpace(0, b), GradedSpace(0, c), None, g)
    assert check_exact(Fo, Go) == oracle_exact(f, g)


@st.composite
def matrices(draw, max_dim=4):
    r, c = draw(st.integers(0, max_dim)), draw(st.integers(0, max_dim))
    return small_matrix(draw, r, c)


@given(matrices())
def test_rank_nullity_and_kernel(m):
    k = nullspace(m)
    assert k.ncols() + rank(m) == m.ncols()
    assert rank(m) == to_sympy(m).rank()
    if k.ncols() and m.nrows():
        assert m * k == fmpq_mat(m.nrows(), k.ncols())


@given(matrices(), st.data())
def test_solve_substitutes_exactly(m, data):
    x = fmpq_mat(m.ncols(), 1, [data.draw(st.integers(-3, 3)) for _ in range(m.ncols())])
    b = m * x if m.ncols() else fmpq_mat(m.nrows(), 1)
    y = solve_matrix(m, b)
    assert y is not None
    assert (m * y if m.ncols() else fmpq_mat(m.nrows(), 1)) == b


@given(matrices(max_dim=3), st.data())
def test_quotient_kills_subspace(w, data):
    n = w.nrows()
    V = GradedSpace(n, 0)
    W = [GradedVector(tuple(w[i, j] for i in range(n)), ()) for j in range(w.ncols())]
    Qs, p = quotient(V, W)
    assert Qs.dim0 == n - rank(w)
    for v in W:
        assert p(v).is_zero()
    assert p.is_surjective()


@given(matrices(max_dim=3), matrices(max_dim=3))
def test_intersection_and_extension(a, b):
    if a.nrows() != b.nrows():
        b = fmpq_mat(a.nrows(), b.ncols())
    i = intersect_spaces(a, b)
    n = a.nrows()
    ra, rb = rank(a), rank(b)
    both = rank(fmpq_mat(n, a.ncols() + b.ncols(), [x for r in range(n) for x in list(a.table()[r]) + list(b.table()[r])])) if n else 0
    assert i.ncols() == ra + rb - both
    e = extend_basis(i, a)
    assert i.ncols() + e.ncols() == ra


def test_random_maps_are_exact_with_their_kernels():
    rng = random.Random(0)
    for _ in range(50):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        g = fmpq_mat(r, c, [rng.randint(-2, 2) for _ in range(r * c)])
        k = nullspace(g)
        F = GradedMap(GradedSpace(k.ncols(), 0), GradedSpace(c, 0), k, None)
        G = GradedMap(GradedSpace(c, 0), GradedSpace(r, 0), g, None)
        assert check_exact(F, G)
