"""Exact integer linear algebra: Smith/Hermite normal forms, kernels, indices.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so every
operation is exact regardless of entry size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SmithDecomposition",
    "as_int_matrix",
    "smith_normal_form",
    "hermite_normal_form",
    "kernel_basis",
    "is_primitive",
    "component_count_K",
    "lattice_index",
    "int_rank",
]


def as_int_matrix(a, cols: int | None = None) -> np.ndarray:
    """Coerce ``a`` to a 2-d object array of Python ints.

    ``cols`` fixes the column count for empty input (a 0-row matrix still has
    a well-defined number of columns).
    """
    arr = np.asarray(a, dtype=object)
    if arr.size == 0:
        if arr.ndim == 2:
            return np.empty(arr.shape, dtype=object)
        return np.empty((0, cols or 0), dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {arr.shape}")
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        iv = int(v)
        if iv != v:
            raise ValueError(f"non-integer entry {v!r} at {idx}")
        out[idx] = iv
    return out


def _identity(n: int) -> np.ndarray:
    eye = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            eye[i, j] = 1 if i == j else 0
    return eye


@dataclass(frozen=True, eq=False)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    rank: int

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(self.rank))


def smith_normal_form(a) -> SmithDecomposition:
    D = as_int_matrix(a).copy()
    m, n = D.shape
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        D[[i, j], :] = D[[j, i], :]
        U[[i, j], :] = U[[j, i], :]

    def swap_cols(i, j):
        D[:, [i, j]] = D[:, [j, i]]
        V[:, [i, j]] = V[:, [j, i]]

    rank = 0
    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = D[i, j]
                    if v != 0 and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                return SmithDecomposition(U, D, V, rank)
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = D[t, t]
            clean = True
            for i in range(t + 1, m):
                q = D[i, t] // p
                if q:
                    D[i, :] = D[i, :] - q * D[t, :]
                    U[i, :] = U[i, :] - q * U[t, :]
                if D[i, t] != 0:
                    clean = False
            for j in range(t + 1, n):
                q = D[t, j] // p
                if q:
                    D[:, j] = D[:, j] - q * D[:, t]
                    V[:, j] = V[:, j] - q * V[:, t]
                if D[t, j] != 0:
                    clean = False
            if not clean:
                continue
            # divisibility chain: fold an offending row into row t and redo
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i, j] % p != 0),
                None,
            )
            if bad is None:
                break
            D[t, :] = D[t, :] + D[bad, :]
            U[t, :] = U[t, :] + U[bad, :]
        if D[t, t] < 0:
            D[t, :] = -D[t, :]
            U[t, :] = -U[t, :]
        rank += 1
    return SmithDecomposition(U, D, V, rank)


def int_rank(a) -> int:
    return smith_normal_form(a).rank


def hermite_normal_form(a) -> np.ndarray:
    """Row-style HNF of an integer matrix, with zero rows removed.

    Pivots are positive and strictly increase in column; entries above a
    pivot lie in ``[0, pivot)``. The row lattice is preserved.
    """
    H = as_int_matrix(a).copy()
    m, n = H.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        # Euclid down the column until a single nonzero remains at row r
        while True:
            nz = [i for i in range(r, m) if H[i, c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i, c]))
            if piv != r:
                H[[r, piv], :] = H[[piv, r], :]
            done = True
            for i in range(r + 1, m):
                if H[i, c] != 0:
                    q = H[i, c] // H[r, c]
                    H[i, :] = H[i, :] - q * H[r, :]
                    if H[i, c] != 0:
                        done = False
            if done:
                break
        if r < m and H[r, c] != 0:
            if H[r, c] < 0:
                H[r, :] = -H[r, :]
            for i in range(r):
                q = H[i, c] // H[r, c]
                if q:
                    H[i, :] = H[i, :] - q * H[r, :]
            r += 1
    return H[:r, :]


def kernel_basis(a, cols: int | None = None) -> np.ndarray:
    """Saturated basis of ``ker(A) ∩ Z^N`` as the columns of an N×k matrix.

    The basis is canonical: its transpose is in row Hermite normal form.
    """
    A = as_int_matrix(a, cols)
    n = A.shape[1]
    if A.shape[0] == 0:
        return _identity(n)
    snf = smith_normal_form(A)
    K = snf.V[:, snf.rank:]
    if K.shape[1] == 0:
        return np.empty((n, 0), dtype=object)
    return hermite_normal_form(K.T).T.copy()


def is_primitive(u) -> bool:
    entries = [int(x) for x in np.asarray(u, dtype=object).ravel()]
    if all(x == 0 for x in entries):
        raise ValueError("zero vector is not a facet normal")
    return math.gcd(*entries) == 1


def lattice_index(a) -> int:
    """Product of the invariant factors (|torsion of the cokernel| on the image)."""
    return math.prod(smith_normal_form(a).invariant_factors)


def component_count_K(a) -> int:
    """Order of coker(A: Z^N -> Z^n); the subgroup K is connected iff this is 1."""
    A = as_int_matrix(a)
    snf = smith_normal_form(A)
    if snf.rank != A.shape[0]:
        raise ValueError(f"A has rank {snf.rank} < {A.shape[0]}; normals do not span")
    return math.prod(snf.invariant_factors)
