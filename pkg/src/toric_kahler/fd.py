"""Central finite differences for auditing analytic gradients and Hessians."""

from __future__ import annotations

import numpy as np

FD_STEP = 1e-5


def central_gradient(f, x, h: float = FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def central_jacobian(grad, x, h: float = FD_STEP) -> np.ndarray:
    """Columns are central differences of ``grad``; symmetrised on return."""
    x = np.asarray(x, dtype=float)
    J = np.empty((x.size, x.size))
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        J[:, i] = (np.asarray(grad(x + e)) - np.asarray(grad(x - e))) / (2 * h)
    return 0.5 * (J + J.T)


def relative_error(approx, exact) -> float:
    """Max-norm error relative to ``max(1, |exact|_max)``."""
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if exact.size == 0:
        return 0.0
    return float(np.max(np.abs(approx - exact)) / max(1.0, float(np.max(np.abs(exact)))))
