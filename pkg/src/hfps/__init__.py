"""Exact-arithmetic Sullivan models for homotopy fixed point sets.

The pipeline: construct a relative model of a Borel fibration (catalog), form
the free model of its section space (sections), restrict to a component at a
retraction, minimize (minimal), and compare rational homotopy fingerprints
against the classification shapes.  The fixed_locus module carries the
circle-action machinery around the inclusion of the honest fixed set.
"""

from .graded import Algebra, BasisOverflow, Generator, GeneratorMismatch, Polynomial, Q
from .cdga import (
    BettiTable,
    Cdga,
    CdgaMorphism,
    InvalidCdga,
    compose,
    identity_morphism,
    quasi_iso_check,
    tensor,
)
from .catalog import (
    FibrationModel,
    cp_s3,
    default_cutoff,
    eilenberg_product_s1,
    is_trivial,
    sphere_4k2_s3,
    sphere_4k_s3,
    sphere_odd_s3,
    validate_fibration,
)
from .sections import (
    ComponentModel,
    DualBasis,
    Retraction,
    SectionSpaceModel,
    UnsupportedRetractionSystem,
    build_section_model,
    component_model,
    enumerate_components,
)
from .minimal import (
    EllipticVerdict,
    Fingerprint,
    MinimizeResult,
    NotMinimal,
    PiTable,
    elliptic_verdict,
    fingerprint,
    fingerprint_match,
    is_minimal,
    linear_part,
    minimize,
    pi_table,
    shape_model,
)
from .fixed_locus import (
    CpInfinityVerdict,
    EquivariantPair,
    UnsupportedDecomposition,
    WKSDecomposition,
    cp_infinity_criterion,
    decompose_V,
    k_inclusion_model,
    k_iso_on_indecomposables,
    localization_check,
    make_pair,
    make_product,
    trivial_pair,
)
from .configio import (
    ConfigError,
    catalog_match,
    dumps_fibration,
    load_equivariant_pair,
    load_fibration,
    loads_fibration,
    parse_poly,
    serialize_fibration,
)
from .report import VERSION, ReportDocument

__version__ = VERSION
