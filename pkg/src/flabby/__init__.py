"""Flabby cosheaves of graded rational vector spaces on finite T0 spaces.

Exact arithmetic throughout; see the README for a tour.
"""

from .errors import *  # noqa: F401,F403
from .finspace import (
    FiniteSpace,
    QuotientMap,
    enumerate_coverings,
    minimal_open,
    point_closure,
    quotient_level,
    space_from_basis,
    space_from_minimal_opens,
)
from .glinalg import (
    GradedMap,
    GradedSpace,
    GradedVector,
    check_exact,
    kernel_basis,
    quotient,
    solve,
)
from .cosheaf import (
    Cosheaf,
    Morphism,
    PointedCosheaf,
    PointedHom,
    SkyscraperSpec,
    SkyscraperSum,
    Violation,
    closed_sections,
    cosheaf_violations,
    costalk,
    direct_sum,
    flabbiness_violations,
    hom,
    is_cosheaf,
    is_flabby,
    locally_closed_sections,
    parity_vanishes,
    pointed_hom,
    skyscraper,
    transport,
    validate,
    zero_cosheaf,
)
from .decompose import (
    Decomposition,
    IsoResult,
    is_isomorphic,
    is_pointed_isomorphic,
    skyscraper_decomposition,
)
from .tower import (
    InverseSystem,
    LimitReport,
    MittagLefflerReport,
    Tower,
    build_tower,
    hom_system,
    lim1_vanishes,
    limit,
    pushforward,
)
from .ingest import (
    SingularityData,
    bundle_to_json,
    example_cantor,
    example_singular,
    example_singular_pointed,
    load_bundle,
    parse_bundle,
    write_bundle,
)

__version__ = "0.1.0"
