"""Small dense two-phase simplex method with Bland's anti-cycling rule.

Sized for the handful of variables and constraints that arise from facet
systems with N <= ~16. Deterministic: identical inputs give identical pivots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "linprog", "PIVOT_TOL"]

PIVOT_TOL = 1e-10
_FEAS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None
    fun: float | None
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[1:, :n] = A
        self.T[1:, n] = b
        self.basis = list(basis)
        self.iterations = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def set_cost(self, c: np.ndarray) -> None:
        n = self.T.shape[1] - 1
        row = np.zeros(n + 1)
        row[: len(c)] = c
        for r, j in enumerate(self.basis, start=1):
            if row[j] != 0.0:
                row -= row[j] * self.T[r]
        self.T[0] = row

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        for i in range(T.shape[0]):
            if i != r and T[i, j] != 0.0:
                T[i] -= T[i, j] * T[r]
        self.basis[r - 1] = j
        self.iterations += 1

    def run(self, allowed: int, max_iter: int) -> str:
        """Minimise the cost row over columns ``< allowed``."""
        T = self.T
        while True:
            if self.iterations >= max_iter:
                raise RuntimeError("simplex iteration limit reached")
            enter = next((j for j in range(allowed) if T[0, j] < -PIVOT_TOL), None)
            if enter is None:
                return "optimal"
            leave = None
            best = np.inf
            for r in range(1, T.shape[0]):
                a = T[r, enter]
                if a > PIVOT_TOL:
                    ratio = T[r, -1] / a
                    if ratio < best - 1e-12 or (
                        abs(ratio - best) <= 1e-12 and self.basis[r - 1] < self.basis[leave - 1]
                    ):
                        best, leave = ratio, r
            if leave is None:
                return "unbounded"
            self.pivot(leave, enter)


def _standard_form(c, A_ub, b_ub, A_eq, b_eq, bounds):
    """Rewrite as min c'y s.t. M y = rhs, y >= 0; also return the back-map."""
    nvar = len(c)
    cols: list[tuple[int, float]] = []  # (original var, sign) per y column
    shift = np.zeros(nvar)
    extra_ub: list[tuple[int, float]] = []  # (y column, upper bound)
    for i, (lo, hi) in enumerate(bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if np.isfinite(lo):
            shift[i] = lo
            cols.append((i, 1.0))
            if np.isfinite(hi):
                extra_ub.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            shift[i] = hi
            cols.append((i, -1.0))
        else:
            cols.append((i, 1.0))
            cols.append((i, -1.0))
    ny = len(cols)
    E = np.zeros((nvar, ny))  # x = shift + E y
    for k, (i, s) in enumerate(cols):
        E[i, k] = s

    rows_ub = []
    rhs_ub = []
    if A_ub is not None and len(A_ub):
        A_ub = np.asarray(A_ub, float)
        rows_ub.append(A_ub @ E)
        rhs_ub.append(np.asarray(b_ub, float) - A_ub @ shift)
    for k, ub in extra_ub:
        row = np.zeros(ny)
        row[k] = 1.0
        rows_ub.append(row[None, :])
        rhs_ub.append(np.array([ub]))
    Aub = np.vstack(rows_ub) if rows_ub else np.zeros((0, ny))
    bub = np.concatenate(rhs_ub) if rhs_ub else np.zeros(0)
    if A_eq is not None and len(A_eq):
        A_eq = np.asarray(A_eq, float)
        Aeq = A_eq @ E
        beq = np.asarray(b_eq, float) - A_eq @ shift
    else:
        Aeq, beq = np.zeros((0, ny)), np.zeros(0)

    mu, me = Aub.shape[0], Aeq.shape[0]
    M = np.zeros((mu + me, ny + mu))
    M[:mu, :ny] = Aub
    M[:mu, ny:] = np.eye(mu)
    M[mu:, :ny] = Aeq
    rhs = np.concatenate([bub, beq])
    cost = np.concatenate([np.asarray(c, float) @ E, np.zeros(mu)])
    return M, rhs, cost, E, shift


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None, *,
            maximize: bool = False, max_iter: int = 5000) -> LPResult:
    """Solve ``min/max c@x`` s.t. ``A_ub@x <= b_ub``, ``A_eq@x == b_eq``.

    ``bounds`` is a list of ``(lo, hi)`` per variable with ``None`` meaning
    unbounded on that side. Unlike scipy, the default is a *free* variable.
    """
    c = np.asarray(c, float)
    nvar = c.size
    if bounds is None:
        bounds = [(None, None)] * nvar
    sign = -1.0 if maximize else 1.0
    M, rhs, cost, E, shift = _standard_form(sign * c, A_ub, b_ub, A_eq, b_eq, bounds)
    m, ny = M.shape

    neg = rhs < 0
    M[neg] *= -1.0
    rhs[neg] *= -1.0

    # phase 1: one artificial per row
    A1 = np.hstack([M, np.eye(m)])
    tab = _Tableau(A1, rhs, basis=list(range(ny, ny + m)))
    c1 = np.concatenate([np.zeros(ny), np.ones(m)])
    tab.set_cost(c1)
    tab.run(ny + m, max_iter)
    infeas = -tab.T[0, -1]
    if infeas > _FEAS_TOL * (1.0 + np.abs(rhs).max(initial=0.0)):
        return LPResult("infeasible", None, None, tab.iterations)

    # drive artificials out; drop rows that are linearly dependent
    r = 1
    while r <= tab.m:
        if tab.basis[r - 1] >= ny:
            j = next((j for j in range(ny) if abs(tab.T[r, j]) > PIVOT_TOL), None)
            if j is None:
                tab.T = np.delete(tab.T, r, axis=0)
                del tab.basis[r - 1]
                continue
            tab.pivot(r, j)
        r += 1
    tab.T = np.delete(tab.T, np.s_[ny:ny + m], axis=1)

    tab.set_cost(cost)
    status = tab.run(ny, max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, None, tab.iterations)
    y = np.zeros(ny)
    for row, j in enumerate(tab.basis, start=1):
        y[j] = tab.T[row, -1]
    x = shift + E @ y[: E.shape[1]]
    fun = float(c @ x)
    return LPResult("optimal", x, fun, tab.iterations)
