"""Command line interface: ``flabby <command> ...`` or ``python -m flabby``.

Exit codes: 0 success (or "yes"), 1 a negative answer, 2 undecided,
3 unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import glinalg as gl
from .cosheaf import (
    PointedCosheaf,
    closed_sections,
    cosheaf_violations,
    costalk,
    flabbiness_violations,
    hom,
    locally_closed_sections,
    validate,
)
from .decompose import is_isomorphic, is_pointed_isomorphic, skyscraper_decomposition
from .errors import FlabbyError, ParseError, SchemaError, ValidationError
from .finspace import space_from_basis
from .glinalg import GradedSpace
from .ingest import (
    SingularityData,
    bundle_to_json,
    example_cantor,
    example_singular,
    example_singular_pointed,
    load_tower_spec,
    morphism_to_json,
    parse_bundle,
)
from .tower import build_tower, hom_system, lim1_vanishes, limit

EXIT_OK, EXIT_NO, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3


def _dims(g: GradedSpace) -> dict:
    return {"dim0": g.dim0, "dim1": g.dim1}


def _emit(args, payload: dict, lines: List[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _load(path, pointed: Optional[bool] = None):
    space, obj = parse_bundle(path)
    if pointed and not isinstance(obj, PointedCosheaf):
        raise SchemaError(f"{path}: a pointed bundle needs a 'unit'", "/unit")
    if pointed is False and isinstance(obj, PointedCosheaf):
        obj = obj.cosheaf
    return obj


def _cosheaf(path):
    obj = _load(path)
    return obj.cosheaf if isinstance(obj, PointedCosheaf) else obj


def _names(text: str) -> List[str]:
    return [p for p in text.split(",") if p] if text else []


def cmd_check(args) -> int:
    M = _cosheaf(args.file)
    val = validate(M)
    cos = [] if val else cosheaf_violations(M, args.mode)
    fl = [] if val else flabbiness_violations(M)
    ok = not (val or cos or fl)
    payload = {
        "validate": [str(v) for v in val],
        "cosheaf": [str(v) for v in cos],
        "flabby": [str(v) for v in fl],
        "mode": args.mode,
        "ok": ok,
    }
    lines = []
    for name, rep in (("validate", val), (f"cosheaf ({args.mode})", cos), ("flabby", fl)):
        lines.append(f"{name}: " + ("ok" if not rep else f"{len(rep)} violation(s)"))
        lines.extend(f"  {v}" for v in rep)
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_NO


def cmd_decompose(args) -> int:
    M = _cosheaf(args.file)
    d = skyscraper_decomposition(M, certify=args.certify)
    items = sorted(({"point": p, "dim0": a, "dim1": b} for p, a, b in d.multiset()), key=lambda r: r["point"])
    if args.witness:
        with open(args.witness, "w") as fh:
            json.dump(morphism_to_json(d.witness), fh, indent=1, sort_keys=True)
            fh.write("\n")
    lines = [f"{r['point']}: ({r['dim0']}|{r['dim1']})" for r in items] or ["(zero cosheaf)"]
    _emit(args, {"summands": items}, lines)
    return EXIT_OK


def cmd_iso(args) -> int:
    if args.pointed:
        A, B = _load(args.file_a, True), _load(args.file_b, True)
        res = is_pointed_isomorphic(A, B, certify=args.certify, grid=args.grid)
    else:
        res = is_isomorphic(_cosheaf(args.file_a), _cosheaf(args.file_b), certify=args.certify)
    verdict = {True: "isomorphic", False: "not isomorphic", None: "Undecided"}[res.isomorphic]
    if args.witness and res.witness is not None:
        with open(args.witness, "w") as fh:
            json.dump(morphism_to_json(res.witness), fh, indent=1, sort_keys=True)
            fh.write("\n")
    _emit(args, {"isomorphic": res.isomorphic, "verdict": verdict, "reason": res.reason}, [f"{verdict} ({res.reason})"])
    return {True: EXIT_OK, False: EXIT_NO, None: EXIT_UNDECIDED}[res.isomorphic]


def cmd_hom(args) -> int:
    M, N = _cosheaf(args.file_a), _cosheaf(args.file_b)
    basis = hom(M, N)
    payload = {"dimension": len(basis), "basis": [morphism_to_json(h) for h in basis]}
    lines = [f"dim Hom = {len(basis)}"]
    for k, h in enumerate(basis):
        f = h.top
        lines.append(f"  [{k}] at X: even {_mat_text(f.mat0)} odd {_mat_text(f.mat1)}")
    _emit(args, payload, lines)
    return EXIT_OK


def _mat_text(m) -> str:
    return "[" + "; ".join(" ".join(gl.format_q(x) for x in row) for row in m.tolist()) + "]"


def cmd_stalks(args) -> int:
    M = _cosheaf(args.file)
    sp = M.space
    out: dict = {}
    for i, p in enumerate(sp.points):
        if args.generalized or sp.is_closed_point(i):
            out[p] = costalk(M, p, allow_generalized=args.generalized)
    payload = {"generalized": args.generalized, "costalks": {p: _dims(g) for p, g in out.items()}}
    _emit(args, payload, [f"{p}: {g}" for p, g in out.items()])
    return EXIT_OK


def cmd_sections(args) -> int:
    M = _cosheaf(args.file)
    if args.closed is not None:
        Z = _names(args.closed)
        g = closed_sections(M, Z)
        payload = {"closed": sorted(Z), **_dims(g)}
        line = f"closed {{{','.join(sorted(Z))}}}: {g}"
    else:
        U, W = (_names(t) for t in args.locally_closed)
        g = locally_closed_sections(M, U, W)
        payload = {"open": sorted(U), "removed": sorted(W), **_dims(g)}
        line = f"{{{','.join(sorted(U))}}} minus {{{','.join(sorted(W))}}}: {g}"
    _emit(args, payload, [line])
    return EXIT_OK


def cmd_tower(args) -> int:
    M, N = _cosheaf(args.file_a), _cosheaf(args.file_b)
    depth = args.depth if args.depth is not None else load_tower_spec(args.spec)
    T = build_tower(M.space, depth)
    S = hom_system(M, N, T)
    L = limit(S)
    ml = lim1_vanishes(S)
    ranks = [r[0] for r in S.restriction_ranks()]
    payload = {
        "depth": T.depth,
        "levels": [s.dim0 for s in S.levels],
        "restriction_ranks": ranks,
        "terminal": S.terminal,
        "limit": _dims(L.space),
        "stabilized": L.stabilized,
        "stabilization_index": L.index,
        "mittag_leffler": ml.holds,
    }
    ml_text = "holds" if ml.holds else "Unstabilized at depth %d" % S.depth
    lines = [
        f"levels: {' '.join(str(s.dim0) for s in S.levels)}",
        f"restriction ranks: {' '.join(map(str, ranks)) or '-'}",
        f"limit: {L.space} ({L.status}" + (f", n0 = {L.index})" if L.stabilized else ")"),
        f"Mittag-Leffler: {ml_text}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def _parse_triples(items: List[str]) -> SingularityData:
    triples = []
    for it in items:
        parts = it.split(":")
        if len(parts) != 3:
            raise ParseError(f"singularity {it!r} must look like point:dim0:dim1")
        try:
            triples.append((parts[0], int(parts[1]), int(parts[2])))
        except ValueError as e:
            raise ParseError(f"bad dimension in {it!r}") from e
    return SingularityData(tuple(triples))


def _load_space(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"cannot read space from {path}: {e}") from e
    data = data.get("space", data)
    try:
        return space_from_basis(data["points"], data["basis"])
    except (KeyError, TypeError) as e:
        raise SchemaError(f"{path}: expected an object with 'points' and 'basis'", "/space") from e


def cmd_example(args) -> int:
    if args.kind == "cantor":
        _, M, _ = example_cantor(args.depth)
        obj = M
    else:
        data = _parse_triples(args.data)
        if args.space:
            space = _load_space(args.space)
        else:
            pts = [p for p, _, _ in data]
            space = space_from_basis(pts, [[p] for p in pts])
        if args.pointed or args.unit:
            units = {}
            for u in args.unit or []:
                p, _, vals = u.partition("=")
                units[p] = [gl.to_q(x) for x in _names(vals)]
            obj = example_singular_pointed(space, data, units)
        else:
            obj = example_singular(space, data)
    text = json.dumps(bundle_to_json(obj), indent=1, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flabby", description="Flabby cosheaves on finite spaces, exactly.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run the precosheaf checks and report violations")
    c.add_argument("file")
    c.add_argument("--mode", choices=["binary", "exhaustive"], default="binary")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("decompose", help="skyscraper decomposition")
    c.add_argument("file")
    c.add_argument("--witness", metavar="OUT", help="write the witness isomorphism as JSON")
    c.add_argument("--certify", choices=["full", "opens", "none"], default="full")
    c.set_defaults(func=cmd_decompose)

    c = sub.add_parser("iso", help="isomorphism test (exit 0 yes, 1 no, 2 undecided)")
    c.add_argument("file_a")
    c.add_argument("file_b")
    c.add_argument("--pointed", action="store_true")
    c.add_argument("--witness", metavar="OUT")
    c.add_argument("--certify", choices=["full", "opens", "none"], default="full")
    c.add_argument("--grid", type=int, default=4096, help="largest exhaustive search on non-T1 spaces (0 disables)")
    c.set_defaults(func=cmd_iso)

    c = sub.add_parser("hom", help="dimension and basis of natural transformations")
    c.add_argument("file_a")
    c.add_argument("file_b")
    c.set_defaults(func=cmd_hom)

    c = sub.add_parser("stalks", help="costalks at closed points")
    c.add_argument("file")
    c.add_argument("--generalized", action="store_true", help="all points, using closures")
    c.set_defaults(func=cmd_stalks)

    c = sub.add_parser("sections", help="sections over closed or locally closed sets")
    c.add_argument("file")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--closed", metavar="P1,P2")
    g.add_argument("--locally-closed", nargs=2, metavar=("U", "W"), help="opens W ⊆ U as comma lists")
    c.set_defaults(func=cmd_sections)

    c = sub.add_parser("tower", help="inverse system of Hom spaces over the basis filtration")
    c.add_argument("file_a")
    c.add_argument("file_b")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--depth", type=int, help="number of basis members to use")
    g.add_argument("--spec", metavar="FILE", help='tower spec JSON {"basis_prefix": N}')
    c.set_defaults(func=cmd_tower)

    c = sub.add_parser("example", help="emit an example bundle")
    c.add_argument("kind", choices=["singular", "cantor"])
    c.add_argument("--depth", type=int, default=2, help="cantor depth (1..6)")
    c.add_argument("--data", nargs="*", default=[], metavar="P:D0:D1", help="singularities")
    c.add_argument("--space", metavar="FILE", help="space JSON (default: discrete on the data points)")
    c.add_argument("--pointed", action="store_true", help="add the all-ones unit")
    c.add_argument("--unit", action="append", metavar="P=V1,V2", help="unit components at one point")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_example)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SchemaError, ValidationError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except FlabbyError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NO


if __name__ == "__main__":
    sys.exit(main())
