"""Toric Kähler potentials on polyhedral moment images.

Build a :class:`ToricSpec` from primitive normals and offsets, validate it,
enumerate its faces and evaluate the explicit dual and Kähler potentials of
the flat, projective and face-stratum quotients.
"""

from .convex import DomainError, ImageViolation, NonConvergence, h_transform, solve_legendre
from .polytope import (
    Face,
    PointKind,
    ToricSpec,
    ValidationReport,
    classify_point,
    enumerate_faces,
    iota_lambda,
    validate,
)
from .potentials import (
    MetricReport,
    ProjectiveParams,
    dual_potential_flat,
    dual_potential_projective,
    face_dual_potential,
    face_h,
    guillemin_h,
    metric_hessian_face,
    metric_hessian_flat,
    metric_hessian_projective,
    min_R,
    projective_h,
)
from .quotient import Verdict, build_quotient, classify_face, stratum_report, verify_level_set

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "ImageViolation",
    "NonConvergence",
    "h_transform",
    "solve_legendre",
    "Face",
    "PointKind",
    "ToricSpec",
    "ValidationReport",
    "classify_point",
    "enumerate_faces",
    "iota_lambda",
    "validate",
    "MetricReport",
    "ProjectiveParams",
    "dual_potential_flat",
    "dual_potential_projective",
    "face_dual_potential",
    "face_h",
    "guillemin_h",
    "metric_hessian_face",
    "metric_hessian_flat",
    "metric_hessian_projective",
    "min_R",
    "projective_h",
    "Verdict",
    "build_quotient",
    "classify_face",
    "stratum_report",
    "verify_level_set",
]
