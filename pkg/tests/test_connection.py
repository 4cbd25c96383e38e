import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bsmu.almostproduct.core.errors import DimensionMismatch
from bsmu.almostproduct.geometry.connection import (
    Connection, covariant_derivative, curvature, derivative_of_endomorphism, injected, levi_civita, nabla_P)
from bsmu.almostproduct.geometry.frame import MetricPair, StructureConstants, validate
from bsmu.almostproduct.geometry.tensor import Tensor


SPLIT_P = np.diag([1., 1., -1., -1.])
positive_diagonals = st.lists(st.floats(min_value=0.1, max_value=10.), min_size=4, max_size=4)


def test_levi_civita_coefficients(w3x):
    gamma = levi_civita(w3x.structure_constants, w3x.metric).gamma
    expected = np.zeros((4, 4, 4))
    expected[0, 1, 2] = expected[1, 2, 0] = expected[2, 1, 0] = 0.5
    expected[1, 0, 2] = expected[0, 2, 1] = expected[2, 0, 1] = -0.5
    assert np.allclose(gamma, expected)


def test_levi_civita_is_torsion_free_and_metric(w3t):
    connection = levi_civita(w3t.structure_constants, w3t.metric)
    assert connection.torsion(w3t.structure_constants, w3t.g).max_abs() < 1e-14
    assert covariant_derivative(connection, Tensor(w3t.g)).max_abs() < 1e-14


@settings(max_examples=30)
@given(diagonal=positive_diagonals)
def test_levi_civita_of_diagonal_metric(diagonal):
    manifold = validate(4, [[0, 1, 2, 1.], [0, 2, 3, 1.], [0, 3, 2, -1.]], np.diag(diagonal), SPLIT_P)
    connection = levi_civita(manifold.structure_constants, manifold.metric)
    scale = max(1., max(diagonal))
    assert connection.torsion(manifold.structure_constants, manifold.g).max_abs() < 1e-12 * scale
    assert covariant_derivative(connection, Tensor(manifold.g)).max_abs() < 1e-12 * scale


def test_nabla_P_components(w3x):
    F = nabla_P(w3x, levi_civita(w3x.structure_constants, w3x.metric))
    expected = np.zeros((4, 4, 4))
    expected[0, 1, 2] = expected[0, 2, 1] = 1.
    expected[1, 0, 2] = expected[1, 2, 0] = -1.
    assert np.allclose(F.components, expected)


def test_endomorphism_derivative_matches_lowered_derivative(w3t):
    connection = levi_civita(w3t.structure_constants, w3t.metric)
    assert np.allclose(derivative_of_endomorphism(connection, w3t.P, w3t.g).components,
                       nabla_P(w3t, connection).components)


def test_heisenberg_sectional_curvature(w3x):
    R = curvature(levi_civita(w3x.structure_constants, w3x.metric), w3x.structure_constants, w3x.g)
    assert R.components[0, 1, 1, 0] == pytest.approx(-0.75)
    assert R.components[0, 1, 0, 1] == pytest.approx(0.75)


def test_rotation_algebra_levi_civita():
    epsilon = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        epsilon[i, j, k] = 1.
        epsilon[j, i, k] = -1.
    structure = StructureConstants(epsilon)
    connection = levi_civita(structure, MetricPair.from_matrix(np.eye(3)))
    assert np.allclose(connection.gamma, epsilon / 2)
    # bi-invariant metric: K(x, y) = |[x, y]|^2 / 4
    assert curvature(connection, structure, np.eye(3)).components[0, 1, 1, 0] == pytest.approx(0.25)


def test_abelian_frame_is_flat(e0):
    connection = levi_civita(e0.structure_constants, e0.metric)
    assert connection.gamma.max(initial=0.) == 0.
    assert curvature(connection, e0.structure_constants, e0.g).max_abs() == 0.
    assert nabla_P(e0, connection).max_abs() == 0.


def test_deformation_round_trip(w3x):
    connection = levi_civita(w3x.structure_constants, w3x.metric)
    Q = Tensor(np.arange(64.).reshape(4, 4, 4))
    deformed = connection.deformed(Q, w3x.g_inv)
    assert np.allclose(deformed.difference(connection, w3x.g).components, Q.components)


def test_injected_connection_checks_dimension(w3x):
    assert injected(w3x, np.zeros((4, 4, 4))).name == 'injected'
    with pytest.raises(DimensionMismatch):
        injected(w3x, np.zeros((3, 3, 3)))
    with pytest.raises(DimensionMismatch):
        Connection(np.zeros((4, 4, 3)))
    with pytest.raises(DimensionMismatch):
        covariant_derivative(Connection(np.zeros((3, 3, 3))), Tensor(np.eye(4)))
