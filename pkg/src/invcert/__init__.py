"""Certify global invertibility of piecewise tensor-product Bezier maps.

The certifier encloses every Jacobian column of a map in the cone hull of
finitely many generator vectors (for Bezier maps: the derivative control
points), then checks one small linear program per column sign pattern to
find a direction with a strictly positive margin against all signed
generators. A map whose 2^(n-1) signed column cones all admit such a
certificate is globally injective on its convex domain. The same test
applies to raw matrix families supplied as per-column generator sets.
"""

from .bernstein import (
    ConstantAxis,
    ControlNet,
    PatchGrid,
    column_generators,
    derivative_net,
    eval_bb,
    eval_bb_many,
    eval_many,
    eval_map,
    locate_patch,
)
from .certify import (
    DEFAULT_THRESHOLD,
    CertificateReport,
    PatternResult,
    Witness,
    certificate_lp,
    certify_map,
    certify_matrix_family,
    grid_column_generators,
    patch_column_generators,
)
from .cones import (
    DEFAULT_DELTA,
    Certificate,
    DegenerateColumn,
    GeneratorSet,
    SignPattern,
    apply_sign_pattern,
    enumerate_sign_patterns,
    normalize_generators,
    verify_certificate,
)
from .lpsolve import LinearProgram, LpSolution, solve
from .oracle import (
    CollisionReport,
    acute_2d,
    fd_jacobian,
    hull_membership,
    sampled_injectivity,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CertificateReport",
    "CollisionReport",
    "ConstantAxis",
    "ControlNet",
    "DEFAULT_DELTA",
    "DEFAULT_THRESHOLD",
    "DegenerateColumn",
    "GeneratorSet",
    "LinearProgram",
    "LpSolution",
    "PatchGrid",
    "PatternResult",
    "SignPattern",
    "Witness",
    "acute_2d",
    "apply_sign_pattern",
    "certificate_lp",
    "certify_map",
    "certify_matrix_family",
    "column_generators",
    "derivative_net",
    "enumerate_sign_patterns",
    "eval_bb",
    "eval_bb_many",
    "eval_many",
    "eval_map",
    "fd_jacobian",
    "grid_column_generators",
    "hull_membership",
    "locate_patch",
    "normalize_generators",
    "patch_column_generators",
    "sampled_injectivity",
    "solve",
    "verify_certificate",
]
