"""Units decide more than the cosheaf: pointed isomorphism on a discrete and a non-T1 space."""
from flabby import PointedCosheaf, is_pointed_isomorphic, space_from_basis
from flabby.ingest import example_singular, example_singular_pointed


def show(label, a, b):
    res = is_pointed_isomorphic(a, b)
    verdict = {True: "isomorphic", False: "not isomorphic", None: "undecided"}[res.isomorphic]
    print(f"{label:28s} {verdict:15s} {res.reason}")


D = space_from_basis(["p", "q"], [["p"], ["q"]])
data = [("p", 1, 0), ("q", 1, 0)]
show("units (1,1) vs (2,3)", example_singular_pointed(D, data), example_singular_pointed(D, data, {"p": [2], "q": [3]}))
show("units (1,0) vs (0,1)", example_singular_pointed(D, data, {"q": [0]}), example_singular_pointed(D, data, {"p": [0]}))

# on {a, b} with {a} open there is a map i_b -> i_a, so automorphisms are triangular
S = space_from_basis(["a", "b"], [["a"]])
M = example_singular(S, [("a", 1, 0), ("b", 1, 0)])
for u, v in (((0, 1), (1, 1)), ((1, 0), (1, 1)), ((1, 1), (1, 0))):
    show(f"Sierpinski {u} vs {v}", PointedCosheaf(M, u), PointedCosheaf(M, v))
