"""Exact Z/2-graded linear algebra over the rationals.

Matrices are :class:`flint.fmpq_mat` instances.  A graded space is just a
pair of dimensions; a graded map carries one matrix per degree and is always
grade preserving.  Pivoting is deterministic everywhere: reduced row echelon
form with the leftmost nonzero column as pivot, rows in order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from flint import fmpq, fmpq_mat

from .errors import ShapeMismatch

__all__ = [
    "GradedSpace",
    "GradedVector",
    "GradedMap",
    "ZERO",
    "solve",
    "kernel_basis",
    "quotient",
    "check_exact",
    "to_q",
    "format_q",
    "qmat",
    "rref",
    "rank",
    "nullspace",
    "solve_matrix",
]


# -- scalars -------------------------------------------------------------

def to_q(x) -> fmpq:
    """Coerce ``int``, :class:`Fraction`, ``fmpq`` or a ``"p/q"`` string to ``fmpq``."""
    if isinstance(x, fmpq):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return fmpq(x)
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            p, q = s.split("/", 1)
            p, q = int(p), int(q)
            if q == 0:
                raise ZeroDivisionError(f"zero denominator in {x!r}")
            return fmpq(p, q)
        return fmpq(int(s))
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return fmpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot read {x!r} as a rational")


def format_q(x) -> str:
    """Canonical string ``"p/q"`` with ``q > 0``; zero is ``"0"``."""
    x = to_q(x)
    if x == 0:
        return "0"
    return f"{int(x.p)}/{int(x.q)}"


# -- matrices ------------------------------------------------------------

def qmat(rows, nrows: Optional[int] = None, ncols: Optional[int] = None) -> fmpq_mat:
    """Build an ``fmpq_mat`` from nested rows; shapes with a zero side need explicit sizes."""
    if isinstance(rows, fmpq_mat):
        m = rows
    else:
        rows = [list(r) for r in rows]
        r = len(rows) if nrows is None else nrows
        if ncols is None:
            if not rows:
                raise ShapeMismatch("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        if len(rows) != r or any(len(row) != ncols for row in rows):
            raise ShapeMismatch(f"rows do not form a {r}x{ncols} matrix")
        m = fmpq_mat(r, ncols, [to_q(v) for row in rows for v in row])
    if nrows is not None and m.nrows() != nrows or ncols is not None and m.ncols() != ncols:
        raise ShapeMismatch(f"expected {nrows}x{ncols}, got {m.nrows()}x{m.ncols()}")
    return m


def zeros(r: int, c: int) -> fmpq_mat:
    return fmpq_mat(r, c)


def identity(n: int) -> fmpq_mat:
    m = fmpq_mat(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def shape(m: fmpq_mat) -> Tuple[int, int]:
    return m.nrows(), m.ncols()


def is_zero_mat(m: fmpq_mat) -> bool:
    return m == fmpq_mat(m.nrows(), m.ncols())


def hstack(mats: Sequence[fmpq_mat], nrows: int) -> fmpq_mat:
    ncols = sum(m.ncols() for m in mats)
    out = fmpq_mat(nrows, ncols)
    c0 = 0
    for m in mats:
        if m.nrows() != nrows:
            raise ShapeMismatch("hstack row counts differ")
        for i, row in enumerate(m.tolist()):
            for j, v in enumerate(row):
                if v:
                    out[i, c0 + j] = v
        c0 += m.ncols()
    return out


def vstack(mats: Sequence[fmpq_mat], ncols: int) -> fmpq_mat:
    return hstack([m.transpose() for m in mats], ncols).transpose()


def block_diag(mats: Sequence[fmpq_mat]) -> fmpq_mat:
    r = sum(m.nrows() for m in mats)
    c = sum(m.ncols() for m in mats)
    out = fmpq_mat(r, c)
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.tolist()):
            for j, v in enumerate(row):
                if v:
                    out[r0 + i, c0 + j] = v
        r0 += m.nrows()
        c0 += m.ncols()
    return out


def columns(m: fmpq_mat, idx: Sequence[int]) -> fmpq_mat:
    out = fmpq_mat(m.nrows(), len(idx))
    for i in range(m.nrows()):
        for k, j in enumerate(idx):
            v = m[i, j]
            if v:
                out[i, k] = v
    return out


def rows_of(m: fmpq_mat, idx: Sequence[int]) -> fmpq_mat:
    return columns(m.transpose(), idx).transpose()


def rref(m: fmpq_mat) -> Tuple[fmpq_mat, List[int]]:
    """Reduced row echelon form and pivot columns (leftmost-pivot rule)."""
    if m.nrows() == 0 or m.ncols() == 0:
        return fmpq_mat(m.nrows(), m.ncols()), []
    r, rk = m.rref()
    pivots = []
    for i in range(rk):
        for j in range(r.ncols()):
            if r[i, j] != 0:
                pivots.append(j)
                break
    return r, pivots


def rank(m: fmpq_mat) -> int:
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return m.rank()


def nullspace(m: fmpq_mat) -> fmpq_mat:
    """Columns form a basis of ``{x : m x = 0}``, one per free column, in column order."""
    n = m.ncols()
    r, piv = rref(m)
    pset = set(piv)
    free = [j for j in range(n) if j not in pset]
    out = fmpq_mat(n, len(free))
    for k, f in enumerate(free):
        out[f, k] = 1
        for i, p in enumerate(piv):
            v = r[i, f]
            if v:
                out[p, k] = -v
    return out


def solve_matrix(a: fmpq_mat, b: fmpq_mat) -> Optional[fmpq_mat]:
    """A solution ``x`` of ``a x = b`` with free variables set to zero, or ``None``."""
    if a.nrows() != b.nrows():
        raise ShapeMismatch(f"{a.nrows()} equations but right-hand side has {b.nrows()} rows")
    n = a.ncols()
    k = b.ncols()
    aug = hstack([a, b], a.nrows())
    r, piv = rref(aug)
    if any(p >= n for p in piv):
        return None
    x = fmpq_mat(n, k)
    for i, p in enumerate(piv):
        for j in range(k):
            v = r[i, n + j]
            if v:
                x[p, j] = v
    return x


def column_space(m: fmpq_mat) -> fmpq_mat:
    """Canonical basis (transposed rref rows) of the column space of ``m``."""
    r, piv = rref(m.transpose())
    return rows_of(r, range(len(piv))).transpose()


def independent_columns(m: fmpq_mat) -> List[int]:
    return rref(m)[1]


def intersect_spaces(a: fmpq_mat, b: fmpq_mat) -> fmpq_mat:
    """Basis (columns) of ``col(a) ∩ col(b)``."""
    n = a.nrows()
    if a.ncols() == 0 or b.ncols() == 0:
        return fmpq_mat(n, 0)
    ns = nullspace(hstack([a, -b], n))
    top = rows_of(ns, range(a.ncols()))
    return column_space(a * top)


def extend_basis(base: fmpq_mat, ambient: fmpq_mat) -> fmpq_mat:
    """Columns of ``ambient`` that extend ``base`` to a basis of ``col(base) + col(ambient)``.

    Candidates are scanned left to right and kept when they raise the rank.
    """
    n = base.nrows()
    aug = hstack([base, ambient], n)
    piv = rref(aug)[1]
    keep = [p - base.ncols() for p in piv if p >= base.ncols()]
    return columns(ambient, keep)


# -- graded objects ------------------------------------------------------

@dataclass(frozen=True)
class GradedSpace:
    """A Z/2-graded rational vector space, up to isomorphism: ``(dim0 | dim1)``."""

    dim0: int = 0
    dim1: int = 0

    def __post_init__(self):
        if not (isinstance(self.dim0, int) and isinstance(self.dim1, int)) or self.dim0 < 0 or self.dim1 < 0:
            raise ValueError(f"dimensions must be nonnegative integers, got ({self.dim0}|{self.dim1})")

    def dim(self, i: int) -> int:
        return self.dim1 if i else self.dim0

    @property
    def total(self) -> int:
        return self.dim0 + self.dim1

    def is_zero(self) -> bool:
        return self.dim0 == 0 and self.dim1 == 0

    def __add__(self, other: "GradedSpace") -> "GradedSpace":
        return GradedSpace(self.dim0 + other.dim0, self.dim1 + other.dim1)

    def __str__(self) -> str:
        return f"({self.dim0}|{self.dim1})"


ZERO = GradedSpace(0, 0)


@dataclass(frozen=True)
class GradedVector:
    """Element of a graded space: coordinates of the even and odd parts."""

    even: Tuple[fmpq, ...] = ()
    odd: Tuple[fmpq, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "even", tuple(to_q(v) for v in self.even))
        object.__setattr__(self, "odd", tuple(to_q(v) for v in self.odd))

    @property
    def space(self) -> GradedSpace:
        return GradedSpace(len(self.even), len(self.odd))

    def part(self, i: int) -> Tuple[fmpq, ...]:
        return self.odd if i else self.even

    def column(self, i: int) -> fmpq_mat:
        p = self.part(i)
        return fmpq_mat(len(p), 1, list(p))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.even + self.odd)

    @classmethod
    def from_columns(cls, c0: fmpq_mat, c1: fmpq_mat) -> "GradedVector":
        return cls(tuple(c0[i, 0] for i in range(c0.nrows())), tuple(c1[i, 0] for i in range(c1.nrows())))

    def __str__(self) -> str:
        e = ",".join(str(v) for v in self.even)
        o = ",".join(str(v) for v in self.odd)
        return f"({e}|{o})"


class GradedMap:
    """Grade-preserving linear map ``source -> target``.

    ``mat0`` is ``target.dim0 x source.dim0`` and ``mat1`` is
    ``target.dim1 x source.dim1``.
    """

    __slots__ = ("source", "target", "mat0", "mat1")

    def __init__(self, source: GradedSpace, target: GradedSpace, mat0=None, mat1=None):
        self.source = source
        self.target = target
        self.mat0 = zeros(target.dim0, source.dim0) if mat0 is None else qmat(mat0, target.dim0, source.dim0)
        self.mat1 = zeros(target.dim1, source.dim1) if mat1 is None else qmat(mat1, target.dim1, source.dim1)

    @classmethod
    def from_mats(cls, mat0: fmpq_mat, mat1: fmpq_mat) -> "GradedMap":
        return cls(GradedSpace(mat0.ncols(), mat1.ncols()), GradedSpace(mat0.nrows(), mat1.nrows()), mat0, mat1)

    @classmethod
    def identity(cls, space: GradedSpace) -> "GradedMap":
        return cls(space, space, identity(space.dim0), identity(space.dim1))

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace) -> "GradedMap":
        return cls(source, target)

    def mat(self, i: int) -> fmpq_mat:
        return self.mat1 if i else self.mat0

    def __repr__(self) -> str:
        return f"GradedMap({self.source}->{self.target}, mat0={self.mat0.tolist()}, mat1={self.mat1.tolist()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.mat0 == other.mat0
            and self.mat1 == other.mat1
        )

    __hash__ = None

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        """Composition ``self ∘ other``."""
        if other.target != self.source:
            raise ShapeMismatch(f"cannot compose {self.source}<-{other.target}")
        return GradedMap(other.source, self.target, self.mat0 * other.mat0, self.mat1 * other.mat1)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._same_shape(other)
        return GradedMap(self.source, self.target, self.mat0 + other.mat0, self.mat1 + other.mat1)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        self._same_shape(other)
        return GradedMap(self.source, self.target, self.mat0 - other.mat0, self.mat1 - other.mat1)

    def __neg__(self) -> "GradedMap":
        return GradedMap(self.source, self.target, -self.mat0, -self.mat1)

    def scale(self, c) -> "GradedMap":
        c = to_q(c)
        return GradedMap(self.source, self.target, self.mat0 * c, self.mat1 * c)

    def _same_shape(self, other):
        if self.source != other.source or self.target != other.target:
            raise ShapeMismatch("graded maps have different source or target")

    def __call__(self, v: GradedVector) -> GradedVector:
        if v.space != self.source:
            raise ShapeMismatch(f"vector in {v.space} applied to map from {self.source}")
        return GradedVector.from_columns(self.mat0 * v.column(0), self.mat1 * v.column(1))

    def ranks(self) -> Tuple[int, int]:
        return rank(self.mat0), rank(self.mat1)

    def is_zero(self) -> bool:
        return is_zero_mat(self.mat0) and is_zero_mat(self.mat1)

    def is_injective(self) -> bool:
        r0, r1 = self.ranks()
        return r0 == self.source.dim0 and r1 == self.source.dim1

    def is_surjective(self) -> bool:
        r0, r1 = self.ranks()
        return r0 == self.target.dim0 and r1 == self.target.dim1

    def is_invertible(self) -> bool:
        return self.source == self.target and self.is_injective()

    def inverse(self) -> "GradedMap":
        if not self.is_invertible():
            raise ValueError("graded map is not invertible")
        inv = [m.inv() if m.nrows() else m for m in (self.mat0, self.mat1)]
        return GradedMap(self.target, self.source, inv[0], inv[1])

    def entries(self) -> List[fmpq]:
        """Row-major entries of ``mat0`` followed by those of ``mat1``."""
        return list(self.mat0.entries()) + list(self.mat1.entries())


def direct_sum_maps(maps: Sequence[GradedMap]) -> GradedMap:
    src = sum((f.source for f in maps), ZERO)
    tgt = sum((f.target for f in maps), ZERO)
    return GradedMap(src, tgt, block_diag([f.mat0 for f in maps]), block_diag([f.mat1 for f in maps]))


def selection_map(source: GradedSpace, target: GradedSpace, rows0: Sequence[int], rows1: Sequence[int]) -> GradedMap:
    """Map sending basis vector ``j`` of each degree to basis vector ``rows[j]`` of the target."""
    m0 = fmpq_mat(target.dim0, source.dim0)
    for j, r in enumerate(rows0):
        m0[r, j] = 1
    m1 = fmpq_mat(target.dim1, source.dim1)
    for j, r in enumerate(rows1):
        m1[r, j] = 1
    f = GradedMap.__new__(GradedMap)
    f.source, f.target, f.mat0, f.mat1 = source, target, m0, m1
    return f


# -- the four operations -------------------------------------------------

def solve(f: GradedMap, b: GradedVector) -> Optional[GradedVector]:
    """Some ``x`` with ``f(x) = b``, or ``None`` when ``b`` is not in the image."""
    if b.space != f.target:
        raise ShapeMismatch(f"right-hand side in {b.space}, map lands in {f.target}")
    x0 = solve_matrix(f.mat0, b.column(0))
    x1 = solve_matrix(f.mat1, b.column(1))
    if x0 is None or x1 is None:
        return None
    return GradedVector.from_columns(x0, x1)


def kernel_basis(f: GradedMap) -> List[GradedVector]:
    """Homogeneous basis of ``ker f``: the even vectors first, then the odd ones.

    One vector per free column of the echelon form, scaled so that its
    first nonzero entry is positive.
    """
    out = []
    for i in (0, 1):
        k = nullspace(f.mat(i))
        for j in range(k.ncols()):
            col = [k[r, j] for r in range(k.nrows())]
            if next(x for x in col if x) < 0:
                col = [-x for x in col]
            zero = (0,) * f.source.dim(1 - i)
            out.append(GradedVector(tuple(col), zero) if i == 0 else GradedVector(zero, tuple(col)))
    return out


def _span_matrix(space: GradedSpace, vectors: Iterable[GradedVector], i: int) -> fmpq_mat:
    vs = list(vectors)
    for v in vs:
        if v.space != space:
            raise ShapeMismatch(f"vector in {v.space} is not in {space}")
    n = space.dim(i)
    m = fmpq_mat(n, len(vs))
    for j, v in enumerate(vs):
        for r, x in enumerate(v.part(i)):
            if x:
                m[r, j] = x
    return m


def quotient_matrix(w: fmpq_mat) -> fmpq_mat:
    """Projection ``Q^n -> Q^n / col(w)`` in the coordinates of the non-pivot columns."""
    n = w.nrows()
    r, piv = rref(w.transpose())
    pset = set(piv)
    free = [j for j in range(n) if j not in pset]
    p = fmpq_mat(len(free), n)
    for k, f in enumerate(free):
        p[k, f] = 1
        for i, pc in enumerate(piv):
            v = r[i, f]
            if v:
                p[k, pc] = -v
    return p


def quotient(V: GradedSpace, W: Iterable[GradedVector]) -> Tuple[GradedSpace, GradedMap]:
    """``V / span(W)`` together with the projection."""
    W = list(W)
    p0 = quotient_matrix(_span_matrix(V, W, 0))
    p1 = quotient_matrix(_span_matrix(V, W, 1))
    Q = GradedSpace(p0.nrows(), p1.nrows())
    return Q, GradedMap(V, Q, p0, p1)


def check_exact(f: GradedMap, g: GradedMap) -> bool:
    """Whether ``image(f) = kernel(g)`` in every degree."""
    if f.target != g.source:
        raise ShapeMismatch(f"f lands in {f.target} but g starts at {g.source}")
    if not (g @ f).is_zero():
        return False
    rf = f.ranks()
    rg = g.ranks()
    return all(rf[i] == g.source.dim(i) - rg[i] for i in (0, 1))
