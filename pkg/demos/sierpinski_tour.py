"""A first look: the two-point space {a, b} with open sets {}, {a}, {a, b}.

Run with ``python demos/sierpinski_tour.py``.
"""
from flabby import (
    GradedMap,
    GradedSpace,
    costalk,
    flabbiness_violations,
    hom,
    is_cosheaf,
    is_flabby,
    skyscraper_decomposition,
    space_from_basis,
)
from flabby.cosheaf import Cosheaf
from flabby.glinalg import qmat
from flabby.ingest import example_singular

X = space_from_basis(["a", "b"], [["a"]])
print("opens:", [sorted(u) for u in X.opens])

Q, Q2, Z = GradedSpace(1, 0), GradedSpace(2, 0), GradedSpace(0, 0)

# M({a}) = Q sits inside M(X) = Q^2 as the first coordinate
M = Cosheaf(
    X,
    {(): Z, ("a",): Q, ("a", "b"): Q2},
    {((), ("a",)): GradedMap.zero(Z, Q),
     (("a",), ("a", "b")): GradedMap(Q, Q2, qmat([[1], [0]]), None)},
)
print("cosheaf:", is_cosheaf(M), " flabby:", is_flabby(M))

dec = skyscraper_decomposition(M)
for p, d0, d1 in dec.multiset():
    print(f"  summand at {p}: ({d0}|{d1})")
print("witness at X:", dec.witness.top)

# b is closed, a is not
print("costalk at b:", costalk(M, "b"))
print("generalized costalk at a:", costalk(M, "a", allow_generalized=True))

# cross maps only go one way on a non-T1 space
ia = example_singular(X, [("a", 1, 0)])
ib = example_singular(X, [("b", 1, 0)])
print("dim Hom(i_a, i_b) =", len(hom(ia, ib)), " dim Hom(i_b, i_a) =", len(hom(ib, ia)))

# a precosheaf that kills M({a}) in M(X) is still a cosheaf but not flabby
N = Cosheaf(
    X,
    {(): Z, ("a",): Q, ("a", "b"): Z},
    {((), ("a",)): GradedMap.zero(Z, Q), (("a",), ("a", "b")): GradedMap.zero(Q, Z)},
)
print("killed:", is_cosheaf(N), is_flabby(N), [str(v) for v in flabbiness_violations(N)])
