"""Example constructions and the JSON bundle format.

A bundle is one JSON object::

    {
      "space": {"points": ["a", "b"], "basis": [["a"]]},
      "sections": {"": {"dim0": 0, "dim1": 0}, "a": {"dim0": 1, "dim1": 0},
                   "a,b": {"dim0": 2, "dim1": 0}},
      "maps": {"|a": {"mat0": [], "mat1": []},
               "a|a,b": {"mat0": [["1/1"], ["0"]], "mat1": []}},
      "unit": ["1/1", "0"]
    }

Open sets are keyed by their sorted point names joined with ``,`` (the
empty open is ``""``); a cover relation ``U ⊂ V`` is keyed ``"U|V"``.
Matrices are lists of rows; rationals are written ``"p/q"`` in lowest
terms with ``"0"`` for zero, and integers are accepted on input.  Instead
of ``sections``/``maps`` a sum of skyscrapers may be given as
``"skyscrapers": [{"point": p, "dim0": n, "dim1": m}, ...]``.  ``unit`` is
optional and makes the bundle pointed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import jsonschema
from flint import fmpq, fmpq_mat

from . import glinalg as gl
from .cosheaf import Cosheaf, Morphism, PointedCosheaf, SkyscraperSpec, SkyscraperSum, validate
from .errors import (
    DepthOutOfRange,
    DuplicateSingularity,
    FlabbyError,
    ParseError,
    SchemaError,
    UnknownPoint,
    ValidationError,
)
from .finspace import FiniteSpace, space_from_basis
from .glinalg import GradedMap, GradedSpace

__all__ = [
    "SingularityData",
    "example_singular",
    "example_singular_pointed",
    "example_cantor",
    "MAX_CANTOR_DEPTH",
    "BUNDLE_SCHEMA",
    "SPACE_SCHEMA",
    "TOWER_SCHEMA",
    "load_tower_spec",
    "open_key",
    "edge_key",
    "space_to_json",
    "cosheaf_to_json",
    "morphism_to_json",
    "bundle_to_json",
    "load_bundle",
    "parse_bundle",
    "write_bundle",
]

MAX_CANTOR_DEPTH = 6


# -- examples ------------------------------------------------------------

@dataclass(frozen=True)
class SingularityData:
    """Distinct points ``x_i`` with graded dimensions ``(dim0, dim1)``."""

    triples: Tuple[Tuple[str, int, int], ...] = ()

    def __post_init__(self):
        triples = tuple((str(p), int(a), int(b)) for p, a, b in self.triples)
        object.__setattr__(self, "triples", triples)
        seen = set()
        for p, a, b in triples:
            if p in seen:
                raise DuplicateSingularity(f"point {p!r} listed twice")
            if a < 0 or b < 0:
                raise ValueError(f"negative dimension at {p!r}")
            seen.add(p)

    def __iter__(self):
        return iter(self.triples)

    def __len__(self) -> int:
        return len(self.triples)

    def specs(self) -> List[SkyscraperSpec]:
        return [SkyscraperSpec(p, GradedSpace(a, b)) for p, a, b in self.triples]

    def multiset(self, space: FiniteSpace) -> List[Tuple[str, int, int]]:
        """The expected decomposition data: nonzero entries in point order."""
        return sorted(((p, a, b) for p, a, b in self.triples if a or b), key=lambda t: space.point_index(t[0]))


def example_singular(space: FiniteSpace, data: Union[SingularityData, Iterable]) -> SkyscraperSum:
    """``⊕ i_{x_i}((dim0|dim1))``."""
    if not isinstance(data, SingularityData):
        data = SingularityData(tuple(data))
    for p, _, _ in data:
        if p not in space.index:
            raise UnknownPoint(p)
    return SkyscraperSum(space, data.specs())


def example_singular_pointed(
    space: FiniteSpace,
    data: Union[SingularityData, Iterable],
    units: Optional[Dict[str, Sequence]] = None,
) -> PointedCosheaf:
    """:func:`example_singular` with unit ``Σ u_i``.

    ``u_i`` defaults to the all-ones vector of summand ``i``; ``units`` overrides
    it per point (zeros allowed).
    """
    M = example_singular(space, data)
    units = units or {}
    vec: List = []
    for s in M.specs:
        u = units.get(s.point)
        if u is None:
            u = [1] * s.coeff.dim0
        if len(u) != s.coeff.dim0:
            raise ValueError(f"unit at {s.point!r} has {len(u)} entries, expected {s.coeff.dim0}")
        vec.extend(u)
    return PointedCosheaf(M, tuple(vec))


def cantor_space(depth: int) -> Tuple[FiniteSpace, frozenset]:
    """Finite model with ``2^d`` singular points and ``2^d - 1`` gap points.

    Singular points ``y<w>`` (``w`` a binary word of length ``d``) are open
    singletons.  Gap points ``g<w>`` (``|w| < d``) are ordered by length then
    word; the neighbourhood of the ``k``-th gap is ``Y`` together with the
    gaps from ``k`` on, so the first gap only has ``X`` as neighbourhood.
    """
    if not isinstance(depth, int) or not 1 <= depth <= MAX_CANTOR_DEPTH:
        raise DepthOutOfRange(f"depth must be an integer in 1..{MAX_CANTOR_DEPTH}, got {depth!r}")
    ys = ["y" + w for w in _words(depth)]
    gaps = ["g" + w for n in range(depth) for w in _words(n)]
    basis = [[y] for y in ys]
    for k in range(1, len(gaps)):
        basis.append(ys + gaps[k:])
    return space_from_basis(ys + gaps, basis), frozenset(ys)


def _words(n: int) -> List[str]:
    out = [""]
    for _ in range(n):
        out = [w + c for w in out for c in "01"]
    return out


def example_cantor(depth: int) -> Tuple[FiniteSpace, SkyscraperSum, frozenset]:
    """``(X, M, Y)`` with ``M(U) = Q^{|U ∩ Y|}`` in even degree."""
    space, Y = cantor_space(depth)
    M = SkyscraperSum(space, [SkyscraperSpec(y, GradedSpace(1, 0)) for y in space.points if y in Y])
    return space, M, Y


# -- JSON ----------------------------------------------------------------

_RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"},
    ]
}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _RATIONAL}}
_NAME = {"type": "string", "minLength": 1, "pattern": r"^[^,|]+$"}
_DIM = {"type": "integer", "minimum": 0}
_DIMS = {
    "type": "object",
    "required": ["dim0", "dim1"],
    "additionalProperties": False,
    "properties": {"dim0": _DIM, "dim1": _DIM},
}
_GRADED_MAP = {
    "type": "object",
    "required": ["mat0", "mat1"],
    "additionalProperties": False,
    "properties": {"mat0": _MATRIX, "mat1": _MATRIX},
}

SPACE_SCHEMA = {
    "type": "object",
    "required": ["points", "basis"],
    "additionalProperties": False,
    "properties": {
        "points": {"type": "array", "items": _NAME, "uniqueItems": True},
        "basis": {"type": "array", "items": {"type": "array", "items": _NAME}},
    },
}

BUNDLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["space"],
    "additionalProperties": False,
    "properties": {
        "space": SPACE_SCHEMA,
        "sections": {"type": "object", "additionalProperties": _DIMS},
        "maps": {"type": "object", "additionalProperties": _GRADED_MAP},
        "skyscrapers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["point", "dim0", "dim1"],
                "additionalProperties": False,
                "properties": {"point": _NAME, "dim0": _DIM, "dim1": _DIM},
            },
        },
        "unit": {"type": "array", "items": _RATIONAL},
    },
    "oneOf": [
        {"required": ["sections", "maps"], "not": {"required": ["skyscrapers"]}},
        {"required": ["skyscrapers"], "not": {"anyOf": [{"required": ["sections"]}, {"required": ["maps"]}]}},
    ],
}

TOWER_SCHEMA = {
    "type": "object",
    "required": ["basis_prefix"],
    "additionalProperties": False,
    "properties": {"basis_prefix": {"type": "integer", "minimum": 1}},
}

_VALIDATOR = jsonschema.Draft202012Validator(BUNDLE_SCHEMA)


def _pointer(parts: Iterable) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def open_key(space: FiniteSpace, m: int) -> str:
    return ",".join(sorted(space.names(m)))


def edge_key(space: FiniteSpace, u: int, v: int) -> str:
    return open_key(space, u) + "|" + open_key(space, v)


def _matrix_json(m: fmpq_mat) -> List[List[str]]:
    return [[gl.format_q(x) for x in row] for row in m.tolist()]


def _graded_map_json(f: GradedMap) -> Dict:
    return {"mat0": _matrix_json(f.mat0), "mat1": _matrix_json(f.mat1)}


def space_to_json(space: FiniteSpace) -> Dict:
    basis = space.basis if space.basis is not None else space.minimal
    return {"points": list(space.points), "basis": [space.names(b) for b in basis]}


def cosheaf_to_json(M: Cosheaf) -> Dict:
    sp = M.space
    if isinstance(M, SkyscraperSum):
        return {"skyscrapers": [{"point": s.point, "dim0": s.coeff.dim0, "dim1": s.coeff.dim1} for s in M.specs]}
    sections = {}
    for m in sp.open_masks:
        s = M.section_m(m)
        sections[open_key(sp, m)] = {"dim0": s.dim0, "dim1": s.dim1}
    maps = {edge_key(sp, u, v): _graded_map_json(M.edge_m(u, v)) for u, v in sp.hasse_edges()}
    return {"sections": sections, "maps": maps}


def morphism_to_json(phi: Morphism) -> Dict:
    sp = phi.space
    return {"components": {open_key(sp, m): _graded_map_json(phi.component_m(m)) for m in sp.open_masks}}


def bundle_to_json(obj: Union[Cosheaf, PointedCosheaf]) -> Dict:
    if isinstance(obj, PointedCosheaf):
        out = bundle_to_json(obj.cosheaf)
        out["unit"] = [gl.format_q(x) for x in obj.unit]
        return out
    return {"space": space_to_json(obj.space), **cosheaf_to_json(obj)}


def write_bundle(path, obj: Union[Cosheaf, PointedCosheaf]) -> None:
    with open(path, "w") as fh:
        json.dump(bundle_to_json(obj), fh, indent=1, sort_keys=True)
        fh.write("\n")


def _parse_q(x, where: str) -> fmpq:
    try:
        return gl.to_q(x)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise SchemaError(f"bad rational {x!r}", where) from e


def _parse_matrix(rows, nrows: int, ncols: int, where: str) -> fmpq_mat:
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        got = f"{len(rows)}x{len(rows[0]) if rows else 0}"
        raise SchemaError(f"matrix should be {nrows}x{ncols}, got {got}", where)
    flat = [_parse_q(x, where) for r in rows for x in r]
    return fmpq_mat(nrows, ncols, flat) if nrows * ncols else fmpq_mat(nrows, ncols)


def _parse_open(space: FiniteSpace, key: str, where: str) -> int:
    names = [p for p in key.split(",")] if key else []
    for p in names:
        if p not in space.index:
            raise SchemaError(f"unknown point {p!r} in key {key!r}", where)
    m = space.mask(names)
    if not space.is_open_mask(m):
        raise SchemaError(f"{key!r} is not open", where)
    if open_key(space, m) != key:
        raise SchemaError(f"key {key!r} is not in canonical form {open_key(space, m)!r}", where)
    return m


def load_bundle(data) -> Tuple[FiniteSpace, Union[Cosheaf, PointedCosheaf]]:
    """Objects from an already decoded bundle; raises SchemaError or ValidationError."""
    e = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(data))
    if e is not None:
        raise SchemaError(e.message, _pointer(e.absolute_path))
    try:
        space = space_from_basis(data["space"]["points"], data["space"]["basis"])
    except FlabbyError as e:
        raise SchemaError(f"bad space: {e}", "/space") from e
    if "skyscrapers" in data:
        specs = []
        for k, s in enumerate(data["skyscrapers"]):
            if s["point"] not in space.index:
                raise SchemaError(f"unknown point {s['point']!r}", f"/skyscrapers/{k}/point")
            specs.append(SkyscraperSpec(s["point"], GradedSpace(s["dim0"], s["dim1"])))
        M: Cosheaf = SkyscraperSum(space, specs)
    else:
        secs: Dict[int, GradedSpace] = {}
        for key, dims in data["sections"].items():
            m = _parse_open(space, key, _pointer(["sections", key]))
            secs[m] = GradedSpace(dims["dim0"], dims["dim1"])
        maps: Dict[Tuple[int, int], GradedMap] = {}
        for key, f in data["maps"].items():
            where = _pointer(["maps", key])
            if key.count("|") != 1:
                raise SchemaError(f"edge key {key!r} must have the form 'U|V'", where)
            a, b = key.split("|")
            u = _parse_open(space, a, where)
            v = _parse_open(space, b, where)
            if u not in secs or v not in secs:
                raise SchemaError(f"edge {key!r} refers to an open without sections", where)
            su, sv = secs[u], secs[v]
            m0 = _parse_matrix(f["mat0"], sv.dim0, su.dim0, where + "/mat0")
            m1 = _parse_matrix(f["mat1"], sv.dim1, su.dim1, where + "/mat1")
            maps[(u, v)] = GradedMap(su, sv, m0, m1)
        M = Cosheaf(space, {space.subset(m): s for m, s in secs.items()},
                    {(space.subset(u), space.subset(v)): f for (u, v), f in maps.items()})
    report = validate(M)
    if report:
        raise ValidationError(f"{len(report)} violation(s), first: {report[0]}", report)
    if "unit" in data:
        unit = [_parse_q(x, f"/unit/{k}") for k, x in enumerate(data["unit"])]
        if len(unit) != M.total.dim0:
            raise SchemaError(f"unit has {len(unit)} entries, M(X) has even dimension {M.total.dim0}", "/unit")
        return space, PointedCosheaf(M, tuple(unit))
    return space, M


def parse_bundle(path) -> Tuple[FiniteSpace, Union[Cosheaf, PointedCosheaf]]:
    """Read and fully validate a bundle file."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    return load_bundle(data)


def load_tower_spec(path) -> int:
    """The ``basis_prefix`` of a tower spec file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    e = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(TOWER_SCHEMA).iter_errors(data))
    if e is not None:
        raise SchemaError(e.message, _pointer(e.absolute_path))
    return data["basis_prefix"]
