import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bsmu.almostproduct.core.errors import DegreeMismatch, NotTorsionLike, NotW3
from bsmu.almostproduct.geometry import tensor
from bsmu.almostproduct.geometry.tensor import Tensor, rearranged
from bsmu.almostproduct.structure import natural
from bsmu.almostproduct.structure.classification import compute_F, levi_civita_of


SPLIT_P = np.diag([1., 1., -1., -1.])
finite = st.floats(min_value=-10., max_value=10., allow_nan=False, allow_infinity=False)
raw_cubes = arrays(np.float64, (4, 4, 4), elements=finite)


def sparse_tensor(values: dict) -> np.ndarray:
    components = np.zeros((4, 4, 4))
    for index, value in values.items():
        components[index] = value
    return components


W3X_PHI = sparse_tensor({(1, 2, 0): -1., (2, 1, 0): -1., (0, 2, 1): 1., (2, 0, 1): 1.})
W3X_Q = sparse_tensor({
    (0, 1, 2): -0.5, (0, 2, 1): 0.5, (1, 0, 2): 0.5, (1, 2, 0): -0.5, (2, 0, 1): 0.5, (2, 1, 0): -0.5})
W3X_T = sparse_tensor({(0, 1, 2): -1., (1, 0, 2): 1.})


def torsion_like(components: np.ndarray) -> Tensor:
    return Tensor((components - components.transpose(1, 0, 2)) / 2)


def test_phi_routes_agree(w3x):
    F = compute_F(w3x)
    phi = natural.phi_direct(w3x)
    assert np.allclose(phi.components, W3X_PHI)
    assert np.allclose(natural.phi_from_F(F, w3x.P).components, W3X_PHI)
    assert np.allclose(natural.phi_from_F_w3(F, w3x.P).components, W3X_PHI)
    assert np.allclose(natural.phi_from_F_w3_short(F, w3x.P).components, W3X_PHI)
    assert np.allclose(natural.f_from_phi(phi, w3x.P).components, F.components)


@pytest.mark.parametrize('fixture_name', ['w3t', 'mixed'])
def test_fundamental_tensor_and_phi_determine_each_other(fixture_name, request):
    manifold = request.getfixturevalue(fixture_name)
    F = compute_F(manifold)
    phi = natural.phi_direct(manifold)
    assert np.allclose(natural.phi_from_F(F, manifold.P).components, phi.components)
    assert np.allclose(natural.f_from_phi(phi, manifold.P).components, F.components)


def test_canonical_connection_of_w3x(w3x):
    pair = natural.canonical_connection(w3x)
    assert np.allclose(pair.Q.components, W3X_Q)
    assert np.allclose(pair.T.components, W3X_T)
    assert pair.route_difference == pytest.approx(0., abs=1e-15)
    assert tensor.norm_sq(pair.Q, w3x.g_inv) == pytest.approx(1.5)


def test_canonical_connection_is_natural(w3t):
    pair = natural.canonical_connection(w3t)
    defects = natural.is_natural(pair.nabla_prime, w3t)
    assert defects.is_natural
    assert defects.q_conditions_hold
    assert defects.criteria_agree
    assert defects.nabla_associated_metric < 1e-12


def test_levi_civita_is_not_natural(w3x):
    defects = natural.is_natural(levi_civita_of(w3x), w3x)
    assert defects.nabla_g < 1e-15
    assert defects.nabla_P == pytest.approx(1.)
    assert not defects.is_natural
    assert not defects.q_conditions_hold
    assert defects.criteria_agree


def test_canonical_torsion_lies_in_third_component(w3x):
    pair = natural.canonical_connection(w3x)
    decomposition = natural.project_torsion(pair.T, w3x.P)
    assert np.allclose(decomposition.p3.components, pair.T.components)
    assert max(decomposition.p1.max_abs(), decomposition.p2.max_abs(), decomposition.p4.max_abs()) < 1e-15
    assert decomposition.residual < 1e-15

    defects = natural.is_canonical(pair.T, w3x.P)
    assert defects.is_canonical
    assert defects.projections_vanish
    assert defects.criteria_agree


def test_canonical_torsion_outside_w3(mixed):
    pair = natural.canonical_connection(mixed)
    assert pair.route_difference is None
    assert np.allclose(natural.torsion_from_phi(natural.phi_direct(mixed), mixed.P).components, pair.T.components)


def test_fundamental_tensor_routes(w3x):
    F = compute_F(w3x)
    P = w3x.P
    assert np.allclose(natural.q_from_F(F, P).components, W3X_Q)
    assert np.allclose(natural.torsion_from_F(F, P).components, W3X_T)
    assert np.allclose(natural.f_from_torsion(Tensor(W3X_T), P).components, F.components)
    assert np.allclose(natural.canonical_q_from_phi(Tensor(W3X_PHI), P).components, W3X_Q)


def test_fundamental_tensor_routes_need_w3(mixed):
    F = compute_F(mixed)
    with pytest.raises(NotW3):
        natural.q_from_F(F, mixed.P)
    with pytest.raises(NotW3):
        natural.torsion_from_F(F, mixed.P)


def test_hayden_deformation_from_torsion(w3x, w3t):
    assert np.allclose(natural.hayden_q_from_T(Tensor(W3X_T)).components, W3X_Q)
    pair = natural.canonical_connection(w3t)
    assert np.allclose(natural.hayden_q_from_T(pair.T).components, pair.Q.components)


def test_torsion_like_is_required():
    with pytest.raises(NotTorsionLike):
        natural.project_torsion(Tensor(np.ones((4, 4, 4))), SPLIT_P)
    with pytest.raises(NotTorsionLike):
        natural.hayden_q_from_T(Tensor(np.ones((4, 4, 4))))
    with pytest.raises(DegreeMismatch):
        natural.require_torsion_like(Tensor(np.zeros((4, 4))))


@settings(max_examples=30)
@given(components=raw_cubes)
def test_projections_split_torsion_orthogonally(components):
    T = torsion_like(components)
    decomposition = natural.project_torsion(T, SPLIT_P)
    scale = max(1., T.max_abs())
    assert decomposition.residual < 1e-12 * scale
    for first, second in itertools.combinations(decomposition.components, 2):
        assert abs(tensor.inner(first, second, np.eye(4))) < 1e-10 * scale ** 2
    for part in decomposition.components:
        natural.require_torsion_like(part, 1e-12 * scale)


@settings(max_examples=30)
@given(components=raw_cubes)
def test_projections_are_idempotent(components):
    decomposition = natural.project_torsion(torsion_like(components), SPLIT_P)
    scale = max(1., decomposition.p1.max_abs(), decomposition.p2.max_abs(),
                decomposition.p3.max_abs(), decomposition.p4.max_abs())
    for index, part in enumerate(decomposition.components):
        again = natural.project_torsion(part, SPLIT_P).components[index]
        assert (again - part).max_abs() < 1e-12 * scale


@settings(max_examples=30)
@given(components=raw_cubes)
def test_natural_perturbation_keeps_naturality(w3x, components):
    pair = natural.canonical_connection(w3x)
    delta = natural.natural_perturbation(Tensor(components), w3x.P)
    assert (delta + rearranged(delta, 'x,z,y')).max_abs() < 1e-12
    connection = natural.natural_connection_from_Q(w3x, pair.Q + delta)
    assert natural.is_natural(connection, w3x, tol=1e-9).is_natural
