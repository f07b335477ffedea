"""Explicit dual potentials and Kähler potentials on polyhedral moment images.

Everything is written in momentum coordinates ``eta`` on P, with the slacks
``l_j = <eta, u_j> - lambda_j``:

* flat reduction of C^N: dual ``sum l_j log l_j`` and potential
  ``h = sum lambda_j log l_j + <eta, u_j>``;
* reduction of ``(CP^N, R omega_FS)``: an extra deficit term in
  ``D = R - sum l_j``;
* faces: the same sums over inactive indices, pulled back along the chart
  ``w -> eta_0 + lin_basis @ w`` of the face.

The metric in momentum coordinates is the Hessian of the dual potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .convex import XLOGX, DomainError, SeparableDual, xlogx
from .lp import linprog
from .polytope import (
    ACTIVE_TOL,
    Face,
    PointKind,
    ToricSpec,
    classify_point,
    face_restriction_data,
    iota_lambda,
    recession_direction,
)

__all__ = [
    "LOG_TOL",
    "MetricReport",
    "ProjectiveParams",
    "flat_dual",
    "dual_potential_flat",
    "guillemin_h",
    "metric_hessian_flat",
    "min_R",
    "projective_dual",
    "dual_potential_projective",
    "projective_h",
    "metric_hessian_projective",
    "face_dual",
    "face_dual_potential",
    "face_h",
    "face_h_origin",
    "metric_hessian_face",
]

# closer than this to a log singularity is a domain error, never +-inf
LOG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MetricReport:
    eta: np.ndarray
    dual_value: float
    h_value: float
    gradient: np.ndarray
    hessian: np.ndarray
    min_eigenvalue: float
    condition_number: float

    @property
    def positive(self) -> bool:
        return self.min_eigenvalue > 0

    def to_dict(self) -> dict:
        empty = self.hessian.size == 0
        return {
            "point": self.eta.tolist(),
            "dual": self.dual_value,
            "h": self.h_value,
            "gradient": self.gradient.tolist(),
            "hessian": self.hessian.tolist(),
            "min_eig": None if empty else self.min_eigenvalue,
            "condition_number": None if empty else self.condition_number,
        }


def _report(eta, dual, h, grad, hess) -> MetricReport:
    hess = 0.5 * (hess + hess.T)
    if hess.size:
        eig = np.linalg.eigvalsh(hess)
        lo, hi = float(eig[0]), float(eig[-1])
        cond = hi / lo if lo > 0 else math.inf
    else:
        lo = cond = math.nan
    return MetricReport(np.asarray(eta, float), dual, h, grad, hess, lo, cond)


def _slacks(spec: ToricSpec, eta, *, strict: bool) -> np.ndarray:
    ell = iota_lambda(spec, eta)
    for j, lj in enumerate(ell):
        if lj < -LOG_TOL or (strict and lj <= LOG_TOL):
            where = "outside P" if lj < -LOG_TOL else "on the boundary of P"
            raise DomainError(f"point is {where} (slack {float(lj)!r})", index=j)
    return np.maximum(ell, 0.0)


# -- flat quotient --------------------------------------------------------------


def flat_dual(spec: ToricSpec) -> SeparableDual:
    """``sum_j f(l_j)`` with ``f = x log x``: the entropy pulled back along iota."""
    return SeparableDual((XLOGX,) * spec.N, spec.U, spec.lam)


def dual_potential_flat(spec: ToricSpec, eta) -> float:
    ell = _slacks(spec, eta, strict=False)
    return float(sum(xlogx(lj) for lj in ell))


def guillemin_h(spec: ToricSpec, eta) -> float:
    """``sum_j lambda_j log l_j + <eta, u_j>`` on the interior of P."""
    eta = np.asarray(eta, float).reshape(-1)
    ell = _slacks(spec, eta, strict=True)
    return float(spec.lam @ np.log(ell) + np.sum(spec.U @ eta))


def metric_hessian_flat(spec: ToricSpec, eta) -> MetricReport:
    eta = np.asarray(eta, float).reshape(-1)
    ell = _slacks(spec, eta, strict=True)
    U = spec.U
    grad = U.T @ (np.log(ell) + 1.0)
    hess = (U.T / ell) @ U
    return _report(eta, dual_potential_flat(spec, eta), guillemin_h(spec, eta), grad, hess)


# -- projective quotient ------------------------------------------------------------


def min_R(spec: ToricSpec) -> float:
    """Smallest R with iota(P) inside Delta_R: ``max_P sum_j l_j``."""
    if recession_direction(spec) is not None:
        raise ValueError("P is unbounded; it lies in no simplex Delta_R")
    U, lam = spec.U, spec.lam
    res = linprog(U.sum(axis=0), -U, -lam, maximize=True)
    if not res.optimal:
        raise ValueError(f"LP for min_R ended {res.status}")
    return float(res.fun - lam.sum())


@dataclass(frozen=True)
class ProjectiveParams:
    """Scale R of the simplex Delta_R containing iota(P)."""

    R: float

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError(f"R must be a positive real, got {self.R!r}")

    @classmethod
    def for_spec(cls, spec: ToricSpec, R: float | None = None) -> "ProjectiveParams":
        """``min_R(spec)`` by default; rejects R below it."""
        lower = min_R(spec)
        if R is None:
            return cls(lower)
        if R < lower - ACTIVE_TOL * max(1.0, lower):
            raise ValueError(f"R = {R} < min_R = {lower}: iota(P) is not contained in Delta_R")
        return cls(float(R))


def _deficit_terms(spec: ToricSpec, R: float) -> tuple[np.ndarray, float]:
    """``D(eta) = R - sum l_j = <eta, s> + c`` with ``s = -sum u_j``."""
    return -spec.U.sum(axis=0), R + float(spec.lam.sum())


def projective_dual(spec: ToricSpec, params: ProjectiveParams) -> SeparableDual:
    """Flat dual plus ``f(D)``; D is written as one more slack ``<s, eta> + c``."""
    s, c = _deficit_terms(spec, params.R)
    return SeparableDual(
        (XLOGX,) * (spec.N + 1), np.vstack([spec.U, s]), np.concatenate([spec.lam, [-c]])
    )


def _deficit(spec: ToricSpec, params: ProjectiveParams, eta, *, strict: bool) -> float:
    s, c = _deficit_terms(spec, params.R)
    D = float(s @ np.asarray(eta, float).reshape(-1) + c)
    constant = not np.any(s)
    if D < -LOG_TOL or (strict and not constant and D <= LOG_TOL):
        raise DomainError(
            f"deficit R - sum(l) = {D!r}: {'outside' if D < -LOG_TOL else 'on the boundary of'} Delta_R",
            index=spec.N,
        )
    return max(D, 0.0)


def dual_potential_projective(spec: ToricSpec, params: ProjectiveParams, eta) -> float:
    ell = _slacks(spec, eta, strict=False)
    D = _deficit(spec, params, eta, strict=False)
    return float(sum(xlogx(lj) for lj in ell) + xlogx(D))


def projective_h(spec: ToricSpec, params: ProjectiveParams, eta) -> float:
    """``sum_j lambda_j log l_j - (R + sum lambda_j) log(R - sum l_j)``.

    When ``R + sum lambda_j = 0`` the last term is zero even if the deficit
    vanishes identically (interval-type P with R = min_R).
    """
    eta = np.asarray(eta, float).reshape(-1)
    ell = _slacks(spec, eta, strict=True)
    coeff = params.R + float(spec.lam.sum())
    D = _deficit(spec, params, eta, strict=False)
    if abs(coeff) <= LOG_TOL:
        tail = 0.0
    elif D <= LOG_TOL:
        raise DomainError(f"deficit {D!r} at a log singularity", index=spec.N)
    else:
        tail = coeff * math.log(D)
    return float(spec.lam @ np.log(ell) - tail)


def metric_hessian_projective(spec: ToricSpec, params: ProjectiveParams, eta) -> MetricReport:
    eta = np.asarray(eta, float).reshape(-1)
    ell = _slacks(spec, eta, strict=True)
    D = _deficit(spec, params, eta, strict=True)
    U = spec.U
    sigma = U.sum(axis=0)
    grad = U.T @ (np.log(ell) + 1.0)
    hess = (U.T / ell) @ U
    if np.any(sigma):
        grad = grad - (math.log(D) + 1.0) * sigma
        hess = hess + np.outer(sigma, sigma) / D
    return _report(
        eta,
        dual_potential_projective(spec, params, eta),
        projective_h(spec, params, eta),
        grad,
        hess,
    )


# -- faces ----------------------------------------------------------------------


def face_dual(spec: ToricSpec, face: Face) -> SeparableDual:
    """Dual potential of the stratum over ``face`` in chart coordinates ``w``.

    Term j (inactive) is ``f(a_j . w + c_j)`` with ``a_j = lin_basis^T u_j``
    and ``c_j = u_j(eta_0) - lambda_j``.
    """
    chart = face_restriction_data(spec, face)
    return SeparableDual((XLOGX,) * len(chart.indices), chart.linear.reshape(len(chart.indices), face.dim),
                         -chart.constants)


def _face_slacks(spec: ToricSpec, face: Face, w, *, strict: bool) -> tuple[np.ndarray, np.ndarray]:
    chart = face_restriction_data(spec, face)
    v = chart.slacks(w)
    for k, vk in enumerate(v):
        if vk < -LOG_TOL or (strict and vk <= LOG_TOL):
            raise DomainError(f"point leaves the open face (slack {float(vk)!r})", index=chart.indices[k])
    return np.maximum(v, 0.0), chart.constants


def face_dual_potential(spec: ToricSpec, face: Face, w) -> float:
    v, _ = _face_slacks(spec, face, w, strict=False)
    return float(sum(xlogx(vk) for vk in v))


def face_h(spec: ToricSpec, face: Face, w) -> float:
    """``sum_{j not in I} (lambda_j - u_j(eta_0)) log v_j(w) + <u_j, lin_basis w>``."""
    w = np.asarray(w, float).reshape(-1)
    v, consts = _face_slacks(spec, face, w, strict=True)
    chart = face_restriction_data(spec, face)
    return float(-consts @ np.log(v) + np.sum(chart.linear @ w))


def face_h_origin(spec: ToricSpec, face: Face, w) -> float:
    """The chart based at the origin, valid when 0 lies in the open face.

    Then every restricted ``u_j`` is linear and the potential reads
    ``sum_{j not in I} lambda_j log(v_j - lambda_j) + v_j``.
    """
    origin = np.zeros(spec.n)
    pc = classify_point(spec, origin)
    if pc.kind is not PointKind.BOUNDARY or pc.active != tuple(face.active_set):
        raise DomainError("the origin is not in the open face")
    return face_h(spec, replace(face, witness=origin), w)


def metric_hessian_face(spec: ToricSpec, face: Face, w) -> MetricReport:
    w = np.asarray(w, float).reshape(-1)
    d = face_dual(spec, face)
    _face_slacks(spec, face, w, strict=True)
    return _report(w, face_dual_potential(spec, face, w), face_h(spec, face, w), d.gradient(w), d.hessian(w))
