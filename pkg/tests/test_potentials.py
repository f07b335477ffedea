import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_kahler import catalog, convex, fd
from toric_kahler.convex import DomainError
from toric_kahler.polytope import ToricSpec, enumerate_faces, recession_direction, sample_face, sample_interior
from toric_kahler.potentials import (
    ProjectiveParams,
    dual_potential_flat,
    dual_potential_projective,
    face_dual,
    face_dual_potential,
    face_h,
    face_h_origin,
    flat_dual,
    guillemin_h,
    metric_hessian_face,
    metric_hessian_flat,
    metric_hessian_projective,
    min_R,
    projective_dual,
    projective_h,
)

simplex_points = st.tuples(st.floats(0.01, 0.98), st.floats(0.01, 0.98)).filter(lambda p: p[0] + p[1] < 0.99)


def edge(spec, active):
    return next(f for f in enumerate_faces(spec) if f.active_set == active)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_orthant_potential_is_linear(n, rng):
    spec = catalog.orthant(n)
    for eta in rng.uniform(0.1, 10, size=(100, n)):
        assert abs(guillemin_h(spec, eta) - eta.sum()) <= 1e-12


def test_simplex_center_values():
    spec = catalog.unit_simplex()
    rep = metric_hessian_flat(spec, [1 / 3, 1 / 3])
    assert rep.dual_value == pytest.approx(-math.log(3), abs=1e-14)
    assert rep.h_value == pytest.approx(math.log(3), abs=1e-14)
    np.testing.assert_allclose(rep.hessian, [[6, 3], [3, 6]], atol=1e-10)
    assert rep.min_eigenvalue == pytest.approx(3.0, abs=1e-10)
    np.testing.assert_allclose(rep.gradient, 0.0, atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(simplex_points)
def test_main_formula_on_simplex(p):
    spec = catalog.unit_simplex()
    eta = np.array(p)
    assert guillemin_h(spec, eta) == pytest.approx(convex.h_transform(flat_dual(spec).potential(), eta), abs=1e-10)
    # closed form on the simplex: h = -log(1 - eta1 - eta2)
    assert guillemin_h(spec, eta) == pytest.approx(-math.log(1 - eta.sum()), abs=1e-12)


def test_dual_extends_to_the_boundary():
    spec = catalog.unit_simplex()
    assert dual_potential_flat(spec, [0.0, 0.0]) == pytest.approx(0.0)
    assert dual_potential_flat(spec, [0.5, 0.0]) == pytest.approx(-math.log(2))
    with pytest.raises(DomainError) as info:
        guillemin_h(spec, [0.5, 0.0])
    assert info.value.index == 1
    with pytest.raises(DomainError) as info:
        dual_potential_flat(spec, [0.7, 0.7])
    assert info.value.index == 2


def test_min_R():
    assert min_R(catalog.unit_simplex()) == pytest.approx(1.0)
    assert min_R(catalog.interval()) == pytest.approx(1.0)
    assert min_R(catalog.unit_square()) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        min_R(catalog.half_line())
    with pytest.raises(ValueError):
        ProjectiveParams.for_spec(catalog.unit_square(), 1.5)
    with pytest.raises(ValueError):
        ProjectiveParams(-1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.001, 0.999))
def test_interval_projective_is_fubini_study(eta):
    spec = catalog.interval()
    params = ProjectiveParams.for_spec(spec, 1.0)
    assert projective_h(spec, params, [eta]) == pytest.approx(-math.log1p(-eta), abs=1e-12)
    assert projective_h(spec, params, [eta]) == pytest.approx(guillemin_h(spec, [eta]), abs=1e-10)


def test_interval_projective_values():
    spec = catalog.interval()
    rep = metric_hessian_projective(spec, ProjectiveParams(1.0), [0.5])
    assert rep.h_value == pytest.approx(math.log(2))
    assert rep.dual_value == pytest.approx(-math.log(2))
    rep = metric_hessian_projective(spec, ProjectiveParams(2.0), [0.5])
    assert rep.hessian[0, 0] == pytest.approx(4.0)


def test_simplex_projective_with_larger_R():
    spec = catalog.unit_simplex()
    params = ProjectiveParams(2.0)
    assert projective_h(spec, params, [1 / 3, 1 / 3]) == pytest.approx(math.log(3))
    assert projective_h(spec, params, [0.5, 0.25]) == pytest.approx(math.log(4))


@pytest.mark.parametrize("name", ["simplex", "interval01", "square", "wps112"])
def test_projective_h_consistency_and_derivatives(name, rng):
    spec = catalog.EXAMPLES[name]()
    for R in (None, 3.0):
        params = ProjectiveParams.for_spec(spec, R)
        pot = projective_dual(spec, params).potential()
        for eta in sample_interior(spec, 50, rng):
            assert abs(projective_h(spec, params, eta) - convex.h_transform(pot, eta)) <= 1e-10
            assert dual_potential_projective(spec, params, eta) == pytest.approx(pot.value(eta), abs=1e-13)
            rep = metric_hessian_projective(spec, params, eta)
            assert rep.min_eigenvalue > 0
            np.testing.assert_allclose(rep.gradient, pot.gradient(eta), atol=1e-12)
            assert fd.relative_error(fd.central_gradient(pot.value, eta), rep.gradient) <= 1e-6
            assert fd.relative_error(fd.central_jacobian(pot.gradient, eta), rep.hessian) <= 1e-6


def test_projective_deficit_is_checked():
    # R below min_R (allowed only by building the params directly) leaves Delta_R
    spec = catalog.weighted_projective_112()
    with pytest.raises(DomainError) as info:
        dual_potential_projective(spec, ProjectiveParams(0.5), [0.1, 0.1])
    assert info.value.index == spec.N


GL2 = [np.array([[1, 1], [0, 1]]), np.array([[2, 1], [1, 1]]), np.array([[0, -1], [1, 0]])]


@pytest.mark.parametrize("k", range(len(GL2)))
def test_metric_is_covariant_under_lattice_automorphisms(k, rng):
    # eta = g eta' and u' = g^T u give H'(eta') = g^T H(eta) g and equal dual values
    g = GL2[k]
    spec = catalog.weighted_projective_112()
    moved = ToricSpec(tuple(tuple(int(x) for x in g.T @ np.array(u)) for u in spec.normals), spec.offsets)
    ginv = np.linalg.inv(g)
    for eta in sample_interior(spec, 30, rng):
        a = metric_hessian_flat(spec, eta)
        b = metric_hessian_flat(moved, ginv @ eta)
        assert b.dual_value == pytest.approx(a.dual_value, abs=1e-12)
        np.testing.assert_allclose(b.hessian, g.T @ a.hessian @ g, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("name", ["simplex", "wps112", "square"])
def test_metric_is_translation_equivariant(name, rng):
    spec = catalog.EXAMPLES[name]()
    for eta, t in zip(sample_interior(spec, 200, rng), rng.uniform(-5, 5, size=(200, spec.n))):
        shifted = ToricSpec(spec.normals, tuple(lam + float(np.dot(u, t)) for u, lam in zip(spec.normals, spec.offsets)))
        a = metric_hessian_flat(spec, eta)
        b = metric_hessian_flat(shifted, eta + t)
        assert np.max(np.abs(b.hessian - a.hessian)) <= 1e-12 * np.max(np.abs(a.hessian))
        assert b.dual_value == pytest.approx(a.dual_value, abs=1e-12)


def test_positivity_on_all_examples(example, rng):
    box = None if recession_direction(example) is None else (np.full(example.n, -3.0), np.full(example.n, 3.0))
    for eta in sample_interior(example, 100, rng, box=box):
        assert metric_hessian_flat(example, eta).min_eigenvalue > 0


@pytest.mark.parametrize("k", [10, 20, 50, 100, 1000, 10**6])
def test_dual_potential_tends_to_face_value(k):
    spec = catalog.unit_simplex()
    face = edge(spec, (1,))
    gap = abs(dual_potential_flat(spec, [0.5, 1 / k]) - face_dual_potential(spec, face, [0.0]))
    assert gap <= 2 * (1 / k) * abs(math.log(1 / k))


def test_face_values_on_simplex_edge():
    spec = catalog.unit_simplex()
    face = edge(spec, (1,))
    assert face_dual_potential(spec, face, [0.0]) == pytest.approx(-math.log(2))
    # chart based at (1/2, 0): slacks 1/2 + w and 1/2 - w
    assert face_h(spec, face, [0.1]) == pytest.approx(-0.5 * math.log(0.6) - 0.5 * math.log(0.4) + 0.1 - 0.1)
    with pytest.raises(DomainError) as info:
        face_h(spec, face, [0.6])
    assert info.value.index == 2


def test_face_h_is_the_transform_of_the_face_dual(example, rng):
    for face in enumerate_faces(example)[1:]:
        pot = face_dual(example, face).potential()
        for w in sample_face(example, face, 20, rng):
            assert abs(face_h(example, face, w) - convex.h_transform(pot, w)) <= 1e-10
            rep = metric_hessian_face(example, face, w)
            if face.dim:
                assert rep.min_eigenvalue > 0
                assert fd.relative_error(fd.central_gradient(pot.value, w), rep.gradient) <= 1e-6


def test_face_chart_at_the_origin(rng):
    # strip [-1, 1] x [0, inf): the origin sits in the open bottom edge
    spec = ToricSpec(((0, 1), (1, 0), (-1, 0)), (0, -1, -1))
    face = edge(spec, (0,))
    at_origin = replace(face, witness=np.zeros(2))
    pot = face_dual(spec, at_origin).potential()
    for w in rng.uniform(-0.9, 0.9, size=(20, 1)):
        assert face_h_origin(spec, face, w) == pytest.approx(convex.h_transform(pot, w), abs=1e-12)
        # slacks 1 + t and 1 - t with lambda = -1: h = -log(1+t) - log(1-t)
        t = float(w[0])
        assert face_h_origin(spec, face, w) == pytest.approx(-math.log(1 + t) - math.log(1 - t), abs=1e-12)
    with pytest.raises(DomainError):
        face_h_origin(catalog.unit_simplex(), edge(catalog.unit_simplex(), (1,)), [0.0])


def test_zero_dimensional_face_report():
    spec = catalog.cone_over_square()
    apex = edge(spec, (0, 1, 2, 3))
    d = metric_hessian_face(spec, apex, []).to_dict()
    assert d["dual"] == 0.0 and d["h"] == 0.0 and d["min_eig"] is None


def test_two_face_charts_differ_by_a_linear_term_in_log_coordinates(rng):
    # witness chart eta = eta0 + L w, origin chart eta = L w'; with eta0 = L c, w' = w + c and
    # h_origin(w + c) - h(w) = <c, grad phi*(w)>: linear in log coordinates, no constant
    spec = ToricSpec(((0, 1), (1, 0), (-1, 0)), (0, -1, -1))
    face = edge(spec, (0,))
    c = np.linalg.lstsq(face.lin_basis, face.witness, rcond=None)[0]
    assert np.allclose(face.lin_basis @ c, face.witness)
    pot = face_dual(spec, face).potential()
    for w in sample_face(spec, face, 50, rng):
        x = pot.gradient(w)
        gap = face_h_origin(spec, face, w + c) - face_h(spec, face, w)
        assert gap == pytest.approx(float(c @ x), abs=1e-12)
        np.testing.assert_allclose(metric_hessian_face(spec, face, w).hessian,
                                   face_dual(spec, replace(face, witness=np.zeros(2))).hessian(w + c), rtol=1e-12)
