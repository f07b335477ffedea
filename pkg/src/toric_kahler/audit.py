"""Property suites run by ``toric-kahler check``.

Each suite returns its worst residual and the tolerance it is judged
against. Randomness is drawn from a single seeded generator, in a fixed
order, so summaries are reproducible.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import convex, fd
from .polytope import (
    ToricSpec,
    default_box,
    enumerate_faces,
    recession_direction,
    sample_face,
    sample_interior,
)
from .potentials import (
    ProjectiveParams,
    face_dual,
    face_h,
    flat_dual,
    guillemin_h,
    metric_hessian_flat,
    metric_hessian_projective,
    projective_dual,
    projective_h,
)
from .quotient import build_quotient, verify_level_set

log = logging.getLogger(__name__)

DEFAULT_SEED = 7

TOL_DUALITY = 1e-8
TOL_ROUND_TRIP = 1e-8
TOL_H = 1e-10
TOL_LEVEL_SET = 1e-12
TOL_FD = 1e-6
TOL_FS = 1e-9
MAX_NEWTON_ITER = 30


@dataclass
class SuiteResult:
    name: str
    residual: float
    tolerance: float
    comparison: str = "<="
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.residual):
            return False
        if self.comparison == ">":
            return self.residual > self.tolerance
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        return {"residual": self.residual, "tolerance": self.tolerance, "comparison": self.comparison,
                "passed": self.passed, **self.extra}


def _duality_and_round_trip(spec: ToricSpec, etas, rng, eta0) -> tuple[SuiteResult, SuiteResult]:
    # flat potential sum(exp(x)) on R^N, then the reduced pair on P itself
    f = convex.exp_sum(spec.N)
    dual_res = trip_res = 0.0
    worst_iter = 0
    for x in rng.uniform(-2.0, 2.0, size=(len(etas), spec.N)):
        eta = convex.legendre_map(f, x)
        sol = convex.solve_legendre(f, eta, np.zeros(spec.N))
        worst_iter = max(worst_iter, sol.iterations)
        fx = f.value(x)
        fstar = float(eta @ sol.x - f.value(sol.x))
        dual_res = max(dual_res, abs(fx + fstar - eta @ x) / (1.0 + abs(fx)))
        trip_res = max(trip_res, float(np.linalg.norm(sol.x - x)))

    phi_star = flat_dual(spec).potential("flat_dual")
    for eta in etas:
        x = convex.legendre_map(phi_star, eta)
        sol = convex.solve_legendre(phi_star, x, eta0)
        worst_iter = max(worst_iter, sol.iterations)
        trip_res = max(trip_res, float(np.linalg.norm(sol.x - eta)))
        # the conjugate of phi* at x = grad phi*(eta) is the Kähler potential h(eta)
        conj = float(x @ sol.x - phi_star.value(sol.x))
        h = guillemin_h(spec, eta)
        dual_res = max(dual_res, abs(conj - h) / (1.0 + abs(h)))
    extra = {"max_newton_iterations": worst_iter}
    return (SuiteResult("duality", dual_res, TOL_DUALITY, extra=extra),
            SuiteResult("round_trip", trip_res, TOL_ROUND_TRIP, extra=extra))


def _h_consistency(spec, etas, params, faces, rng, samples) -> SuiteResult:
    res = 0.0
    phi_star = flat_dual(spec).potential()
    for eta in etas:
        res = max(res, abs(guillemin_h(spec, eta) - convex.h_transform(phi_star, eta)))
    if params is not None:
        proj = projective_dual(spec, params).potential()
        for eta in etas:
            res = max(res, abs(projective_h(spec, params, eta) - convex.h_transform(proj, eta)))
    per_face = max(1, samples // max(1, len(faces)))
    for face in faces:
        if face.is_interior:
            continue
        dual = face_dual(spec, face).potential()
        for w in sample_face(spec, face, per_face, rng):
            res = max(res, abs(face_h(spec, face, w) - convex.h_transform(dual, w)))
    return SuiteResult("h_consistency", res, TOL_H)


def _positivity(spec, etas, params) -> SuiteResult:
    worst = math.inf
    for eta in etas:
        worst = min(worst, metric_hessian_flat(spec, eta).min_eigenvalue)
        if params is not None:
            worst = min(worst, metric_hessian_projective(spec, params, eta).min_eigenvalue)
    return SuiteResult("positivity", worst, 0.0, comparison=">")


def _finite_differences(spec, etas, params) -> SuiteResult:
    duals = [flat_dual(spec).potential()]
    if params is not None:
        duals.append(projective_dual(spec, params).potential())
    res = 0.0
    for pot in duals:
        for eta in etas:
            res = max(res, fd.relative_error(fd.central_gradient(pot.value, eta), pot.gradient(eta)))
            res = max(res, fd.relative_error(fd.central_jacobian(pot.gradient, eta), pot.hessian(eta)))
    return SuiteResult("finite_difference", res, TOL_FD)


def is_interval(spec: ToricSpec) -> bool:
    return spec.n == 1 and sorted(u[0] for u in spec.normals) == [-1, 1]


def _fubini_study(spec: ToricSpec) -> SuiteResult:
    """Interval [a, b]: h(eta(z)) = L log(1+|z|^2) + a log|z|^2 + const.

    ``eta(z) = a + L |z|^2 / (1 + |z|^2)`` is the moment map of CP^1 with L
    times the Fubini–Study form; ``a log|z|^2`` is pluriharmonic.
    """
    plus = spec.normals.index((1,))
    a = spec.offsets[plus]
    b = -spec.offsets[1 - plus]
    L = b - a
    params = ProjectiveParams.for_spec(spec)
    mods = np.linspace(0.1, 10.0, 50)
    diffs = []
    agree = 0.0
    for r in mods:
        s = r * r
        eta = a + L * s / (1.0 + s)
        h = projective_h(spec, params, [eta])
        agree = max(agree, abs(h - guillemin_h(spec, [eta])))
        diffs.append(h - (L * math.log1p(s) + a * math.log(s)))
    diffs = np.array(diffs)
    res = max(float(np.max(np.abs(diffs - diffs[0]))), agree)
    return SuiteResult("fubini_study", res, TOL_FS, extra={"constant": float(diffs[0])})


def run_checks(spec: ToricSpec, samples: int = 200, seed: int = DEFAULT_SEED, R: float | None = None,
               box=None) -> dict:
    rng = np.random.default_rng(seed)
    bounded = recession_direction(spec) is None
    if box is None and not bounded:
        box = default_box(spec)
    params = ProjectiveParams.for_spec(spec, R) if bounded else None
    etas = sample_interior(spec, samples, rng, box=box)
    faces = enumerate_faces(spec)
    eta0 = faces[0].witness
    log.info("running suites on %s: %d samples, seed %d", spec.name or "spec", samples, seed)

    suites = list(_duality_and_round_trip(spec, etas, rng, eta0))
    suites[0].extra["newton_limit"] = MAX_NEWTON_ITER
    suites.append(_h_consistency(spec, etas, params, faces, rng, samples))
    data = build_quotient(spec)
    lvl = verify_level_set(spec, data, samples, rng, box=box)
    suites.append(SuiteResult("level_set", lvl.max_residual, TOL_LEVEL_SET,
                              extra={"converse_samples": lvl.converse_samples}))
    suites.append(_positivity(spec, etas, params))
    suites.append(_finite_differences(spec, etas, params))
    if is_interval(spec):
        suites.append(_fubini_study(spec))
    newton_ok = suites[0].extra["max_newton_iterations"] <= MAX_NEWTON_ITER
    out = {
        "spec": spec.name,
        "seed": seed,
        "samples": samples,
        "projective_R": None if params is None else params.R,
        "suites": {s.name: s.to_dict() for s in suites},
        "newton_within_limit": newton_ok,
    }
    failed = [s.name for s in suites if not s.passed]
    if not newton_ok:
        failed.append("newton_iterations")
    out["failed"] = failed
    out["passed"] = not failed
    return out
