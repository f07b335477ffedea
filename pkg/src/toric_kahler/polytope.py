"""Polyhedral sets ``P = {eta : <eta, u_j> - lambda_j >= 0}`` and their faces.

Facet indices are 0-based throughout the Python API.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import lattice
from .lp import linprog

__all__ = [
    "ACTIVE_TOL",
    "ToricSpec",
    "Face",
    "FaceChart",
    "PointKind",
    "PointClass",
    "ValidationReport",
    "validate",
    "iota_lambda",
    "classify_point",
    "enumerate_faces",
    "face_restriction_data",
    "recession_direction",
    "bounding_box",
    "sample_interior",
    "sample_face",
    "default_box",
    "SamplingError",
]

ACTIVE_TOL = 1e-9


class SamplingError(RuntimeError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ToricSpec:
    """Normals ``u_j`` (primitive integer vectors) and offsets ``lambda_j``."""

    normals: tuple[tuple[int, ...], ...]
    offsets: tuple[float, ...]
    name: str = ""

    def __post_init__(self):
        normals = lattice.as_int_matrix(self.normals)
        if normals.shape[0] == 0:
            raise ValueError("at least one facet is required")
        offsets = tuple(float(Fraction(x)) if isinstance(x, str) else float(x) for x in self.offsets)
        if len(offsets) != normals.shape[0]:
            raise ValueError(f"{normals.shape[0]} normals but {len(offsets)} offsets")
        if not all(np.isfinite(offsets)):
            raise ValueError("offsets must be finite")
        object.__setattr__(self, "normals", tuple(tuple(row) for row in normals.tolist()))
        object.__setattr__(self, "offsets", offsets)

    @property
    def n(self) -> int:
        return len(self.normals[0])

    @property
    def N(self) -> int:
        return len(self.normals)

    @property
    def U(self) -> np.ndarray:
        """N×n float matrix whose rows are the normals."""
        return np.array(self.normals, dtype=float)

    @property
    def lam(self) -> np.ndarray:
        return np.array(self.offsets, dtype=float)

    @property
    def A(self) -> np.ndarray:
        """Exact n×N integer matrix with columns ``u_j``."""
        return lattice.as_int_matrix(self.normals).T.copy()

    def with_facet(self, normal, offset) -> "ToricSpec":
        return ToricSpec(self.normals + (tuple(normal),), self.offsets + (offset,), self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.n,
            "facets": [{"normal": list(u), "offset": lam} for u, lam in zip(self.normals, self.offsets)],
        }


def iota_lambda(spec: ToricSpec, eta) -> np.ndarray:
    """Affine embedding into (R^N)^*: ``l_j = <eta, u_j> - lambda_j``."""
    eta = np.asarray(eta, dtype=float).reshape(-1)
    if eta.size != spec.n:
        raise ValueError(f"point has dimension {eta.size}, expected {spec.n}")
    return spec.U @ eta - spec.lam


class PointKind(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class PointClass:
    kind: PointKind
    active: tuple[int, ...] = ()


def classify_point(spec: ToricSpec, eta, tol: float = ACTIVE_TOL) -> PointClass:
    if tol <= 0:
        raise ValueError("tol must be positive")
    ell = iota_lambda(spec, eta)
    if np.all(ell > tol):
        return PointClass(PointKind.INTERIOR)
    if np.all(ell >= -tol):
        return PointClass(PointKind.BOUNDARY, tuple(int(j) for j in np.flatnonzero(np.abs(ell) <= tol)))
    return PointClass(PointKind.OUTSIDE)


# -- LP helpers ---------------------------------------------------------------


def _max_min_slack(spec: ToricSpec, active, cap: float | None = None):
    """max t s.t. l_i(eta) = 0 (i active), l_j(eta) >= t (j inactive).

    Returns ``(t, eta)`` or ``None`` when the equalities miss P entirely.
    Without a cap the LP is tried unbounded first, then capped at t <= 1.
    """
    U, lam = spec.U, spec.lam
    n = spec.n
    active = sorted(active)
    inactive = [j for j in range(spec.N) if j not in set(active)]
    c = np.zeros(n + 1)
    c[-1] = 1.0
    A_ub = np.hstack([-U[inactive], np.ones((len(inactive), 1))]) if inactive else None
    b_ub = -lam[inactive] if inactive else None
    A_eq = np.hstack([U[active], np.zeros((len(active), 1))]) if active else None
    b_eq = lam[active] if active else None
    if cap is None and not inactive:
        cap = 1.0
    bounds = [(None, None)] * n + [(None, cap)]
    res = linprog(c, A_ub, b_ub, A_eq, b_eq, bounds, maximize=True)
    if res.status == "unbounded":
        return _max_min_slack(spec, active, cap=1.0)
    if res.status == "infeasible":
        return None
    return float(res.x[-1]), res.x[:n]


def _implicit_closure(spec: ToricSpec, active) -> tuple[int, ...] | None:
    """Smallest active set of a face containing ``P ∩ {l_i = 0, i in active}``.

    Repeatedly maximises the sum of capped slacks of the undecided indices;
    any index with positive slack at the optimum is certified inactive, and an
    optimum of zero certifies every remaining index as an implicit equality.
    """
    U, lam = spec.U, spec.lam
    n = spec.n
    active = set(active)
    undecided = [j for j in range(spec.N) if j not in active]
    others = list(undecided)
    while undecided:
        k = len(undecided)
        c = np.concatenate([np.zeros(n), np.ones(k)])
        # s_j - l_j(eta) <= 0 for undecided; l_j(eta) >= 0 for all non-active
        A1 = np.hstack([-U[undecided], np.eye(k)])
        b1 = -lam[undecided]
        A2 = np.hstack([-U[others], np.zeros((len(others), k))])
        b2 = -lam[others]
        A_ub = np.vstack([A1, A2])
        b_ub = np.concatenate([b1, b2])
        act = sorted(active)
        A_eq = np.hstack([U[act], np.zeros((len(act), k))]) if act else None
        b_eq = lam[act] if act else None
        bounds = [(None, None)] * n + [(0.0, 1.0)] * k
        res = linprog(c, A_ub, b_ub, A_eq, b_eq, bounds, maximize=True)
        if res.status == "infeasible":
            return None
        s = res.x[n:]
        positive = [j for j, sj in zip(undecided, s) if sj > ACTIVE_TOL]
        if not positive:
            active.update(undecided)
            break
        undecided = [j for j in undecided if j not in positive]
    return tuple(sorted(active))


# -- validation ---------------------------------------------------------------


def recession_direction(spec: ToricSpec) -> np.ndarray | None:
    """A nonzero ``d`` with ``<d, u_j> >= 0`` for all j, or None if P is bounded."""
    U = spec.U
    if lattice.int_rank(spec.A) < spec.n:
        d = lattice.kernel_basis(spec.A.T)[:, 0]
        return np.array(d, dtype=float)
    c = U.sum(axis=0)
    # Ud in [0, 1] keeps the LP bounded; the optimum is positive iff the
    # recession cone is nontrivial (U has full column rank).
    A_ub = np.vstack([-U, U])
    b_ub = np.concatenate([np.zeros(spec.N), np.ones(spec.N)])
    res = linprog(c, A_ub, b_ub, maximize=True)
    if res.optimal and res.fun > ACTIVE_TOL:
        return res.x
    return None


@dataclass(frozen=True, eq=False)
class ValidationReport:
    interior_ok: bool
    interior_witness: np.ndarray | None
    interior_margin: float | None
    minimal_ok: bool
    redundant: tuple[int, ...]
    facet_minima: tuple[float | None, ...]  # min of l_j without constraint j; None = -inf
    primitive_ok: bool
    nonprimitive: tuple[int, ...]
    span_ok: bool
    rank: int
    bounded: bool
    recession: np.ndarray | None

    @property
    def ok(self) -> bool:
        return self.interior_ok and self.minimal_ok and self.primitive_ok and self.span_ok

    def to_dict(self, one_based: bool = False) -> dict:
        off = 1 if one_based else 0
        return {
            "ok": self.ok,
            "interior_ok": self.interior_ok,
            "interior_witness": None if self.interior_witness is None else self.interior_witness.tolist(),
            "interior_margin": self.interior_margin,
            "minimal_ok": self.minimal_ok,
            "redundant": [j + off for j in self.redundant],
            "facet_minima": list(self.facet_minima),
            "primitive_ok": self.primitive_ok,
            "nonprimitive": [j + off for j in self.nonprimitive],
            "span_ok": self.span_ok,
            "rank": self.rank,
            "bounded": self.bounded,
            "recession_direction": None if self.recession is None else self.recession.tolist(),
        }


def validate(spec: ToricSpec) -> ValidationReport:
    nonprimitive = tuple(j for j, u in enumerate(spec.normals) if not any(u) or not lattice.is_primitive(u))
    rank = lattice.int_rank(spec.A)

    center = _max_min_slack(spec, ())
    if center is None:
        interior_ok, witness, margin = False, None, None
    else:
        margin, witness = center
        interior_ok = margin > ACTIVE_TOL

    U, lam = spec.U, spec.lam
    minima: list[float | None] = []
    redundant = []
    for j in range(spec.N):
        rest = [k for k in range(spec.N) if k != j]
        res = linprog(U[j], -U[rest] if rest else None, -lam[rest] if rest else None)
        if res.status == "unbounded":
            minima.append(None)
            continue
        if res.status == "infeasible":
            minima.append(float("inf"))
            redundant.append(j)
            continue
        value = res.fun - lam[j]
        minima.append(value)
        if value >= -ACTIVE_TOL:
            redundant.append(j)

    recession = recession_direction(spec)
    return ValidationReport(
        interior_ok=interior_ok,
        interior_witness=witness,
        interior_margin=margin,
        minimal_ok=not redundant,
        redundant=tuple(redundant),
        facet_minima=tuple(minima),
        primitive_ok=not nonprimitive,
        nonprimitive=nonprimitive,
        span_ok=rank == spec.n,
        rank=rank,
        bounded=recession is None,
        recession=recession,
    )


# -- faces --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Face:
    """Open face: exactly the constraints in ``active_set`` are tight.

    ``witness`` is the max-min-slack point of the face (deterministic), and the
    columns of ``lin_basis`` are a lattice basis of the annihilator of the
    active normals, i.e. of the linear space parallel to the face.
    """

    active_set: tuple[int, ...]
    dim: int
    witness: np.ndarray = field(repr=False)
    lin_basis: np.ndarray = field(repr=False)
    margin: float = field(default=float("nan"), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "witness", _frozen(np.asarray(self.witness, dtype=float)))
        object.__setattr__(self, "lin_basis", _frozen(np.asarray(self.lin_basis, dtype=float)))

    @property
    def is_interior(self) -> bool:
        return not self.active_set

    def point(self, w) -> np.ndarray:
        """The affine chart ``w -> witness + lin_basis @ w``."""
        w = np.asarray(w, dtype=float).reshape(-1)
        if w.size != self.dim:
            raise ValueError(f"face coordinates have dimension {w.size}, expected {self.dim}")
        return self.witness + self.lin_basis @ w


def _make_face(spec: ToricSpec, active: tuple[int, ...], margin: float, witness: np.ndarray) -> Face:
    U_I = lattice.as_int_matrix([spec.normals[i] for i in active], cols=spec.n)
    basis = lattice.kernel_basis(U_I, cols=spec.n)
    return Face(active, basis.shape[1], witness, np.array(basis, dtype=float), margin)


def enumerate_faces(spec: ToricSpec) -> list[Face]:
    """All nonempty open faces, interior first, then by decreasing dimension.

    Breadth-first from the interior: each face spawns the candidates obtained
    by adding one more tight constraint, closed under implied equalities. Every
    facet of a face is reached this way. Exponential in N in the worst case;
    intended for N <= 16.
    """
    faces: dict[tuple[int, ...], Face] = {}
    seen: set[tuple[int, ...]] = set()
    queue: list[tuple[int, ...]] = [()]
    while queue:
        cand = queue.pop(0)
        if cand in seen:
            continue
        seen.add(cand)
        closed = _implicit_closure(spec, cand)
        if closed is None or closed in faces:
            continue
        center = _max_min_slack(spec, closed)
        if center is None:
            continue
        margin, witness = center
        if len(closed) < spec.N and margin <= ACTIVE_TOL:
            continue
        faces[closed] = _make_face(spec, closed, margin, witness)
        for j in range(spec.N):
            if j not in closed:
                nxt = tuple(sorted(closed + (j,)))
                if nxt not in seen:
                    queue.append(nxt)
    return sorted(faces.values(), key=lambda f: (-f.dim, len(f.active_set), f.active_set))


@dataclass(frozen=True, eq=False)
class FaceChart:
    """Restriction of the inactive affine functions to a face.

    For each inactive index ``j`` (in ``indices``),
    ``l_j(witness + lin_basis @ w) = linear[k] @ w + constants[k]``.
    """

    face: Face
    indices: tuple[int, ...]
    linear: np.ndarray
    constants: np.ndarray

    def slacks(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float).reshape(-1)
        return self.linear @ w + self.constants


def face_restriction_data(spec: ToricSpec, face: Face) -> FaceChart:
    if face.is_interior:
        raise ValueError("the interior is not a proper face")
    indices = tuple(j for j in range(spec.N) if j not in face.active_set)
    U = spec.U[list(indices)]
    linear = U @ face.lin_basis
    constants = U @ face.witness - spec.lam[list(indices)]
    return FaceChart(face, indices, _frozen(linear), _frozen(constants))


# -- sampling -----------------------------------------------------------------


def bounding_box(spec: ToricSpec) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate-wise extent of P by 2n LPs; infinite where unbounded."""
    U, lam = spec.U, spec.lam
    lo = np.full(spec.n, -np.inf)
    hi = np.full(spec.n, np.inf)
    for i in range(spec.n):
        e = np.zeros(spec.n)
        e[i] = 1.0
        r = linprog(e, -U, -lam)
        if r.optimal:
            lo[i] = r.fun
        r = linprog(e, -U, -lam, maximize=True)
        if r.optimal:
            hi[i] = r.fun
    return lo, hi


def sample_interior(spec: ToricSpec, count: int, rng: np.random.Generator, box=None,
                    shrink: float = 0.9, max_tries: int = 200) -> np.ndarray:
    """Uniform rejection samples of the interior, contracted toward the center.

    ``shrink`` < 1 pulls each sample toward the max-min-slack center so all
    slacks stay bounded away from zero. ``box`` is ``(lo, hi)``; it is
    required when P is unbounded.
    """
    if box is None:
        lo, hi = bounding_box(spec)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise SamplingError("P is unbounded; supply a sampling box")
    else:
        lo, hi = (np.asarray(b, dtype=float).reshape(spec.n) for b in box)
    center = _max_min_slack(spec, ())
    if center is None or center[0] <= ACTIVE_TOL:
        raise SamplingError("P has empty interior")
    eta0 = center[1]
    out = []
    for _ in range(max_tries):
        pts = rng.uniform(lo, hi, size=(max(count, 16), spec.n))
        ell = pts @ spec.U.T - spec.lam
        pts = pts[np.all(ell > 0, axis=1)]
        out.extend(eta0 + shrink * (pts - eta0))
        if len(out) >= count:
            return np.array(out[:count])
    raise SamplingError(f"only {len(out)} of {count} samples landed in P within the box")


def sample_face(spec: ToricSpec, face: Face, count: int, rng: np.random.Generator,
                shrink: float = 0.9, reach: float = 3.0) -> np.ndarray:
    """Chart coordinates ``w`` of points in the open face.

    Each sample walks from the witness along a random direction a uniform
    fraction (at most ``shrink``) of the way to the relative boundary; rays
    that never leave the face are cut at length ``reach``.
    """
    if face.dim == 0:
        return np.zeros((count, 0))
    chart = face_restriction_data(spec, face)
    out = np.empty((count, face.dim))
    for k in range(count):
        d = rng.normal(size=face.dim)
        d /= np.linalg.norm(d)
        rate = chart.linear @ d
        shrinking = rate < 0
        t_max = np.min(chart.constants[shrinking] / -rate[shrinking]) if np.any(shrinking) else reach
        out[k] = rng.uniform(0.0, shrink) * min(t_max, reach) * d
    return out


def default_box(spec: ToricSpec, reach: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
    """LP bounding box, with unbounded sides cut ``reach`` past the center."""
    lo, hi = bounding_box(spec)
    center = _max_min_slack(spec, ())
    eta0 = np.zeros(spec.n) if center is None else center[1]
    lo = np.where(np.isfinite(lo), lo, eta0 - reach)
    hi = np.where(np.isfinite(hi), hi, eta0 + reach)
    return lo, hi
