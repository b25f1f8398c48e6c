import os

import pytest
from hypothesis import HealthCheck, settings

from flabby import GradedMap, GradedSpace, space_from_basis
from flabby.cosheaf import Cosheaf
from flabby.glinalg import qmat

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

Q = GradedSpace(1, 0)
ZERO = GradedSpace(0, 0)


@pytest.fixture
def sierpinski():
    return space_from_basis(["a", "b"], [["a"]])


def discrete(*names):
    return space_from_basis(list(names), [[p] for p in names])


@pytest.fixture
def discrete2():
    return discrete("p", "q")


def explicit(space, sections, maps):
    """Cosheaf from {open-string: (d0, d1)} and {(U, V): (mat0 rows, mat1 rows)}."""
    secs = {frozenset(k): GradedSpace(*v) for k, v in sections.items()}
    out = {}
    for (u, v), (m0, m1) in maps.items():
        su, sv = secs[frozenset(u)], secs[frozenset(v)]
        out[(frozenset(u), frozenset(v))] = GradedMap(su, sv, qmat(m0, sv.dim0, su.dim0), qmat(m1, sv.dim1, su.dim1))
    return Cosheaf(space, secs, out)


@pytest.fixture
def sierpinski_nonflabby(sierpinski):
    # M({a}) = Q maps to M(X) = 0
    return explicit(sierpinski, {"": (0, 0), "a": (1, 0), "ab": (0, 0)},
                    {("", "a"): ([[]], []), ("a", "ab"): ([], [])})


@pytest.fixture
def discrete_identity(discrete2):
    # Q on every nonempty open, identities: fails middle exactness for {p},{q}
    return explicit(discrete2, {"": (0, 0), "p": (1, 0), "q": (1, 0), "pq": (1, 0)},
                    {("", "p"): ([[]], []), ("", "q"): ([[]], []),
                     ("p", "pq"): ([[1]], []), ("q", "pq"): ([[1]], [])})


@pytest.fixture
def sierpinski_two(sierpinski):
    # M({a}) = Q -> M(X) = Q^2, first coordinate
    return explicit(sierpinski, {"": (0, 0), "a": (1, 0), "ab": (2, 0)},
                    {("", "a"): ([[]], []), ("a", "ab"): ([[1], [0]], [])})
