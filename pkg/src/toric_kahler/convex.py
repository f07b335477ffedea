"""Strictly convex potentials and their Legendre–Fenchel machinery.

A :class:`ConvexPotential` is a smooth strictly convex function on an open
convex domain, given by value/gradient/Hessian callables. The gradient is the
Legendre map. In log coordinates ``x_j = log|z_j|^2`` the flat potential
``|z|^2`` is ``sum(exp(x))`` and its Legendre map ``exp(x)`` is the standard
moment map ``|z_j|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "NonConvergence",
    "ImageViolation",
    "ConvexPotential",
    "ScalarConvex",
    "XLOGX",
    "SeparableDual",
    "LegendreSolution",
    "exp_sum",
    "quadratic",
    "entropy",
    "xlogx",
    "legendre_map",
    "solve_legendre",
    "inverse_legendre",
    "fenchel_value",
    "h_transform",
    "separable_h",
    "legendre_affine_pullback",
]

ARMIJO = 1e-4
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100


class DomainError(ValueError):
    """A point lies outside the domain of a formula.

    ``index`` names the offending constraint/term when there is one.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ImageViolation(DomainError):
    pass


class NonConvergence(RuntimeError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


def _vec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)


def _always(_x) -> bool:
    return True


@dataclass(frozen=True, eq=False)
class ConvexPotential:
    dim: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    in_domain: Callable[[np.ndarray], bool] = _always
    name: str = ""

    def check(self, x) -> np.ndarray:
        x = _vec(x)
        if x.size != self.dim:
            raise ValueError(f"{self.name or 'potential'}: expected dimension {self.dim}, got {x.size}")
        if not self.in_domain(x):
            raise DomainError(f"{self.name or 'potential'}: point {x.tolist()} outside the domain")
        return x


def exp_sum(dim: int) -> ConvexPotential:
    """``sum(exp(x_j))``: the flat Kähler potential of C^N in log coordinates."""
    return ConvexPotential(
        dim,
        value=lambda x: float(np.sum(np.exp(x))),
        gradient=lambda x: np.exp(x),
        hessian=lambda x: np.diag(np.exp(x)),
        name="exp_sum",
    )


def quadratic(dim: int) -> ConvexPotential:
    return ConvexPotential(
        dim,
        value=lambda x: 0.5 * float(x @ x),
        gradient=lambda x: np.array(x, dtype=float),
        hessian=lambda x: np.eye(dim),
        name="quadratic",
    )


def xlogx(x: float) -> float:
    """``x log x`` extended by continuity to 0 at the origin."""
    if x == 0.0:
        return 0.0
    return x * math.log(x)


@dataclass(frozen=True, eq=False)
class ScalarConvex:
    """A strictly convex function of one variable on the open interval (lo, hi).

    ``lo_closed`` means the value (not the derivatives) extends continuously
    to ``lo``.
    """

    value: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Callable[[float], float]
    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    name: str = ""

    def interior(self, x: float) -> bool:
        return self.lo < x < self.hi

    def closure(self, x: float) -> bool:
        return (self.lo <= x if self.lo_closed else self.lo < x) and x < self.hi


XLOGX = ScalarConvex(
    value=xlogx,
    d1=lambda x: math.log(x) + 1.0,
    d2=lambda x: 1.0 / x,
    lo=0.0,
    lo_closed=True,
    name="xlogx",
)


@dataclass(frozen=True, eq=False)
class SeparableDual:
    """``phi*(eta) = sum_i f_i(<u_i, eta> - lambda_i)``.

    ``normals`` is an M×n array of the functionals ``u_i``; a zero row gives a
    constant term.
    """

    functions: tuple[ScalarConvex, ...]
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
        offsets = _vec(self.offsets)
        if not (len(self.functions) == normals.shape[0] == offsets.size):
            raise ValueError("functions, normals and offsets must have equal length")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "functions", tuple(self.functions))

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def arguments(self, eta) -> np.ndarray:
        return self.normals @ _vec(eta) - self.offsets

    def _constant(self, i: int) -> bool:
        return not np.any(self.normals[i])

    def _check(self, args: np.ndarray, closed: bool) -> None:
        for i, (f, a) in enumerate(zip(self.functions, args)):
            ok = f.closure(a) if (closed or self._constant(i)) else f.interior(a)
            if not ok:
                raise DomainError(f"term {i}: argument {float(a)!r} outside the domain of {f.name or 'f'}", index=i)

    def in_domain(self, eta) -> bool:
        try:
            self._check(self.arguments(eta), closed=False)
        except DomainError:
            return False
        return True

    def value(self, eta, closed: bool = False) -> float:
        args = self.arguments(eta)
        self._check(args, closed)
        return float(sum(f.value(a) for f, a in zip(self.functions, args)))

    def gradient(self, eta) -> np.ndarray:
        args = self.arguments(eta)
        self._check(args, closed=False)
        g = np.zeros(self.dim)
        for i, (f, a) in enumerate(zip(self.functions, args)):
            if not self._constant(i):
                g += f.d1(a) * self.normals[i]
        return g

    def hessian(self, eta) -> np.ndarray:
        args = self.arguments(eta)
        self._check(args, closed=False)
        H = np.zeros((self.dim, self.dim))
        for i, (f, a) in enumerate(zip(self.functions, args)):
            if not self._constant(i):
                u = self.normals[i]
                H += f.d2(a) * np.outer(u, u)
        return H

    def potential(self, name: str = "separable") -> ConvexPotential:
        return ConvexPotential(self.dim, self.value, self.gradient, self.hessian, self.in_domain, name)


def entropy(dim: int) -> ConvexPotential:
    """``sum(e_j log e_j)`` on the open orthant: dual of :func:`exp_sum`."""
    return SeparableDual((XLOGX,) * dim, np.eye(dim), np.zeros(dim)).potential("entropy")


# -- Legendre transform ---------------------------------------------------------


@dataclass(frozen=True)
class LegendreSolution:
    x: np.ndarray
    residual: float
    iterations: int


def legendre_map(f: ConvexPotential, x) -> np.ndarray:
    return f.gradient(f.check(x))


def solve_legendre(f: ConvexPotential, eta, x0, *, tol: float = NEWTON_TOL,
                   max_iter: int = NEWTON_MAX_ITER) -> LegendreSolution:
    """Damped Newton for ``grad f(x) = eta``, i.e. ``min f(x) - <eta, x>``.

    Backtracking halves the step until it stays in the domain and satisfies
    the Armijo condition. Converged when
    ``|grad f(x) - eta| <= tol * (1 + |eta|)``.
    """
    eta = _vec(eta)
    x = f.check(x0).copy()
    scale = tol * (1.0 + np.linalg.norm(eta))
    bound = 1e8 * (1.0 + np.linalg.norm(x))
    res = math.inf
    for it in range(max_iter + 1):
        g = f.gradient(x) - eta
        res = float(np.linalg.norm(g))
        if res <= scale:
            return LegendreSolution(*_polish(f, eta, x, g, res), it)
        if it == max_iter:
            break
        H = f.hessian(x)
        try:
            L = np.linalg.cholesky(H)
        except np.linalg.LinAlgError:
            if it == 0:
                raise NonConvergence("Hessian not positive definite at x0", res, it) from None
            # iterates ran off to where the Hessian underflows: no minimiser
            raise ImageViolation(f"Newton iterates diverge; {eta.tolist()} is outside the image") from None
        p = -np.linalg.solve(L.T, np.linalg.solve(L, g))
        if not np.all(np.isfinite(p)):
            raise ImageViolation(f"Newton step overflowed; {eta.tolist()} is outside the image")
        obj = f.value(x) - eta @ x
        slope = float(g @ p)
        slack = 1e-15 * (1.0 + abs(obj))  # absorb rounding once near the optimum
        # when the predicted decrease drowns in rounding, judge steps by the residual
        noisy = -slope <= 1e-10 * (1.0 + abs(obj))
        step = 1.0
        while True:
            xn = x + step * p
            if f.in_domain(xn):
                with np.errstate(over="ignore"):  # an overflowing trial is simply rejected
                    if noisy:
                        if np.linalg.norm(f.gradient(xn) - eta) < res:
                            break
                    elif f.value(xn) - eta @ xn <= obj + ARMIJO * step * slope + slack:
                        break
            step *= 0.5
            if step < 1e-30:
                raise NonConvergence("line search failed", res, it)
        x = xn
        if np.linalg.norm(x) > bound:
            raise ImageViolation(f"Newton iterates diverge; {eta.tolist()} is outside the image")
    raise NonConvergence("Newton did not converge", res, max_iter)


def _polish(f: ConvexPotential, eta, x, g, res):
    """One undamped Newton step past convergence, kept only if it helps."""
    try:
        xn = x - np.linalg.solve(f.hessian(x), g)
    except np.linalg.LinAlgError:
        return x, res
    if f.in_domain(xn):
        rn = float(np.linalg.norm(f.gradient(xn) - eta))
        if rn < res:
            return xn, rn
    return x, res


def inverse_legendre(f: ConvexPotential, eta, x0, **kw) -> np.ndarray:
    return solve_legendre(f, eta, x0, **kw).x


def fenchel_value(f: ConvexPotential, eta, x0=None, **kw) -> float:
    """``f*(eta) = <eta, x> - f(x)`` at the solution of ``grad f(x) = eta``."""
    eta = _vec(eta)
    x = inverse_legendre(f, eta, np.zeros(f.dim) if x0 is None else x0, **kw)
    return float(eta @ x - f.value(x))


def h_transform(dual: ConvexPotential, eta) -> float:
    """``h(eta) = <eta, grad phi*(eta)> - phi*(eta)``; pulls back to phi."""
    eta = dual.check(eta)
    return float(eta @ dual.gradient(eta) - dual.value(eta))


def separable_h(d: SeparableDual, eta) -> float:
    """Closed form of the h-transform of a separable dual potential.

    ``sum_i f_i'(l_i) <u_i, eta> - f_i(l_i)`` with ``l_i = <u_i, eta> - lambda_i``;
    constant terms (``u_i = 0``) contribute only ``-f_i``.
    """
    eta = _vec(eta)
    args = d.arguments(eta)
    d._check(args, closed=False)
    total = 0.0
    for i, (f, a) in enumerate(zip(d.functions, args)):
        u_eta = float(d.normals[i] @ eta)
        deriv = 0.0 if d._constant(i) else f.d1(a) * u_eta
        total += deriv - f.value(a)
    return total


def legendre_affine_pullback(f: ConvexPotential, A, x=None, name: str = "") -> ConvexPotential:
    """Restrict ``f`` along ``j(w) = A w + x`` for injective ``A``.

    The Legendre map of the composite is ``A^T (grad f)(j(w))``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != f.dim:
        raise ValueError(f"affine map lands in dimension {A.shape[0]}, potential has {f.dim}")
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise ValueError("affine map is not injective")
    x = np.zeros(f.dim) if x is None else _vec(x)

    def j(w: Sequence[float]) -> np.ndarray:
        return A @ _vec(w) + x

    return ConvexPotential(
        A.shape[1],
        value=lambda w: f.value(j(w)),
        gradient=lambda w: A.T @ f.gradient(j(w)),
        hessian=lambda w: A.T @ f.hessian(j(w)) @ A,
        in_domain=lambda w: f.in_domain(j(w)),
        name=name or f"{f.name}_pullback",
    )
