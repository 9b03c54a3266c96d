"""Exact cohomology of toric polyhedra and their twisted sheaves.

Everything is computed over explicit weight boxes with integer linear
algebra; no floating point enters any verdict.
"""

from .errors import (
    ToricError,
    RankMismatchError,
    NotConeError,
    NotSmoothError,
    FanAxiomError,
    StarClosureError,
    CartierError,
    UnboundedError,
    ChartError,
    NotFaceError,
    SmoothCoverError,
    FieldSpecError,
    StabilizationError,
    MorphismError,
    SceneError,
    MissingIngredientError,
)
from .fields import Rationals, PrimeField, QQ, parse_field, field_name
from .lattice import LatticeContext, Sublattice, primitive
from .fan import (
    Cone,
    Fan,
    build_fan,
    validate_fan,
    StarSet,
    validate_star_set,
    skeleton_star_set,
    star_closure,
    whole_fan_star,
    BoundaryData,
    CartierData,
    cartier_validate,
    cartier_from_divisor,
)
from .forms import (
    StructureSheaf,
    IdealSheaf,
    DifferentialForms,
    LogForms,
    Twist,
    chart_component,
    restriction_matrix,
)
from .cohomology import (
    BoxPolicy,
    ChainComplex,
    cech_complex,
    sheaf_cohomology,
    euler_crosscheck,
    hypercohomology,
    extension_rank,
)
from .multmap import (
    MultiplicationContext,
    verify_split,
    verify_complex_morphism_char_p,
    frobenius_dim_chain,
)
from .dirimage import (
    FanMorphism,
    validate_fan_morphism,
    identity_morphism,
    relative_cohomology,
    induced_matrix,
    pullback_bundle,
    twisted_direct_image_cohomology,
)
from .cli import Scene, load_scene, load_scene_dict, run_suite, emit_report, main

__version__ = "0.1.0"

__all__ = [
    "ToricError",
    "RankMismatchError",
    "NotConeError",
    "NotSmoothError",
    "FanAxiomError",
    "StarClosureError",
    "CartierError",
    "UnboundedError",
    "ChartError",
    "NotFaceError",
    "SmoothCoverError",
    "FieldSpecError",
    "StabilizationError",
    "MorphismError",
    "SceneError",
    "MissingIngredientError",
    "Rationals",
    "PrimeField",
    "QQ",
    "parse_field",
    "field_name",
    "LatticeContext",
    "Sublattice",
    "primitive",
    "Cone",
    "Fan",
    "build_fan",
    "validate_fan",
    "StarSet",
    "validate_star_set",
    "skeleton_star_set",
    "star_closure",
    "whole_fan_star",
    "BoundaryData",
    "CartierData",
    "cartier_validate",
    "cartier_from_divisor",
    "StructureSheaf",
    "IdealSheaf",
    "DifferentialForms",
    "LogForms",
    "Twist",
    "chart_component",
    "restriction_matrix",
    "BoxPolicy",
    "ChainComplex",
    "cech_complex",
    "sheaf_cohomology",
    "euler_crosscheck",
    "hypercohomology",
    "extension_rank",
    "MultiplicationContext",
    "verify_split",
    "verify_complex_morphism_char_p",
    "frobenius_dim_chain",
    "FanMorphism",
    "validate_fan_morphism",
    "identity_morphism",
    "relative_cohomology",
    "induced_matrix",
    "pullback_bundle",
    "twisted_direct_image_cohomology",
    "Scene",
    "load_scene",
    "load_scene_dict",
    "run_suite",
    "emit_report",
    "main",
]
