"""The Cantor-set model: singular points Y, gap points in between.

Builds the depth-d model, checks the invariants of its cosheaf and then
walks the tower of basis quotients, watching Hom spaces shrink until they
settle on the answer over the full space.
"""
import sys
import time

from flabby import costalk, hom, locally_closed_sections, parity_vanishes, skyscraper_decomposition
from flabby.ingest import example_cantor
from flabby.tower import build_tower, hom_system, lim1_vanishes, limit

depth = int(sys.argv[1]) if len(sys.argv) > 1 else 3
X, M, Y = example_cantor(depth)
print(f"depth {depth}: {len(X)} points, {len(Y)} singular, M(X) = {M.total}")
print("odd part vanishes on every locally closed set:", parity_vanishes(M, 1))

gaps = [x for x in X.points if x not in Y]
print("costalk at", sorted(Y)[0], "=", costalk(M, sorted(Y)[0], allow_generalized=True))
print("costalk at", gaps[0], "=", costalk(M, gaps[0], allow_generalized=True))
U = X.points
W = [y for y in Y if y.endswith("0")]
print("M(X)/M(W) for W = the words ending in 0:", locally_closed_sections(M, U, W))

t0 = time.perf_counter()
dec = skyscraper_decomposition(M)
print(f"decomposition: {len(dec.summands)} unit skyscrapers ({time.perf_counter() - t0:.3f} s)")

tower = build_tower(X)
S = hom_system(M, M, tower)
dims = [d for d, _ in S.dims()]
print("Hom dims along the tower:", dims[:6], "...", dims[-3:])
L = limit(S)
print("limit:", L.space, L.status, " n0 =", L.index)
print("Mittag-Leffler:", lim1_vanishes(S).holds, " dim Hom over X:", len(hom(M, M)))
