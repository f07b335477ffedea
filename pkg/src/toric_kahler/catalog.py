"""Standard polyhedral examples used by the tests, docs and bundled spec files."""

from __future__ import annotations

from .polytope import ToricSpec


def unit_simplex() -> ToricSpec:
    """The triangle eta_1, eta_2 >= 0, eta_1 + eta_2 <= 1 (moment image of CP^2)."""
    return ToricSpec(((1, 0), (0, 1), (-1, -1)), (0, 0, -1), name="simplex")


def simplex_plus_redundant() -> ToricSpec:
    return ToricSpec(((1, 0), (0, 1), (-1, -1), (1, 1)), (0, 0, -1, -5), name="simplex-plus-redundant")


def half_line() -> ToricSpec:
    """P = [0, inf) in R; the quotient is C itself."""
    return ToricSpec(((1,),), (0,), name="halfspace")


def interval(a: float = 0.0, b: float = 1.0) -> ToricSpec:
    return ToricSpec(((1,), (-1,)), (a, -b), name="interval01" if (a, b) == (0.0, 1.0) else "interval")


def unit_square() -> ToricSpec:
    return ToricSpec(((1, 0), (0, 1), (-1, 0), (0, -1)), (0, 0, -1, -1), name="square")


def weighted_projective_112() -> ToricSpec:
    """Moment triangle of CP(1,1,2); the vertex (0, 1/2) is a Z/2 orbifold point."""
    return ToricSpec(((1, 0), (0, 1), (-1, -2)), (0, 0, -1), name="wps112")


def cone_over_square() -> ToricSpec:
    """Cone on a square with apex 0; the apex is a non-simple singular point."""
    return ToricSpec(((1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)), (0, 0, 0, 0), name="cone-square")


def orthant(n: int) -> ToricSpec:
    """The positive orthant: the quotient is C^n with its flat metric."""
    normals = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    return ToricSpec(normals, (0,) * n, name=f"orthant{n}")


def standard_simplex(n: int, R: float = 1.0) -> ToricSpec:
    """Delta_R = {eta >= 0, sum eta <= R} in R^n."""
    normals = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    normals.append(tuple(-1 for _ in range(n)))
    return ToricSpec(tuple(normals), (0,) * n + (-R,), name=f"delta{n}")


EXAMPLES = {
    "simplex": unit_simplex,
    "simplex-plus-redundant": simplex_plus_redundant,
    "halfspace": half_line,
    "interval01": interval,
    "square": unit_square,
    "wps112": weighted_projective_112,
    "cone-square": cone_over_square,
}
