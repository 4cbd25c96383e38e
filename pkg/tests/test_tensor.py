import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bsmu.almostproduct.core.errors import DegreeMismatch, NonFiniteComponents, SlotOutOfRange
from bsmu.almostproduct.geometry import tensor
from bsmu.almostproduct.geometry.tensor import Tensor, compose_P, contract, rearranged

DIM = 3
finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
cubes = arrays(np.float64, (DIM,) * 3, elements=finite)
sign_diagonals = st.lists(st.sampled_from([1., -1.]), min_size=DIM, max_size=DIM).map(np.diag)


def test_components_are_copied_and_read_only():
    source = np.ones((2, 2))
    t = Tensor(source)
    source[0, 0] = 5.
    assert t.components[0, 0] == 1.
    with pytest.raises(ValueError):
        t.components[0, 0] = 2.


def test_scalar_needs_dimension():
    with pytest.raises(DegreeMismatch):
        Tensor(np.array(1.))
    assert Tensor(np.array(2.5), dim=4).scalar() == 2.5


def test_rejects_unequal_axes_and_non_finite_components():
    with pytest.raises(DegreeMismatch):
        Tensor(np.ones((2, 3)))
    with pytest.raises(NonFiniteComponents):
        Tensor(np.array([[0., np.nan], [0., 0.]]))


def test_arithmetic_keeps_degree():
    t = Tensor(np.arange(4.).reshape(2, 2))
    assert np.array_equal((t + t).components, 2 * t.components)
    assert np.array_equal((t - t).components, np.zeros((2, 2)))
    assert np.array_equal((-t).components, -t.components)
    assert np.array_equal((0.5 * t).components, (t / 2).components)
    with pytest.raises(DegreeMismatch):
        t + Tensor(np.zeros((2, 2, 2)))


def test_rearranged_permutes_arguments():
    t = Tensor(np.arange(27.).reshape(3, 3, 3))
    swapped = rearranged(t, 'y,x,z')
    assert swapped.components[0, 1, 2] == t.components[1, 0, 2]
    cycled = rearranged(t, 'z,x,y')
    assert cycled.components[0, 1, 2] == t.components[2, 0, 1]


def test_rearranged_substitutes_P():
    P = np.array([[0., 1.], [1., 0.]])
    t = Tensor(np.array([[1., 2.], [3., 4.]]))
    # t(Pe_0, e_1) = t(e_1, e_1)
    assert rearranged(t, 'Px,y', P).components[0, 1] == 4.
    assert np.array_equal(rearranged(t, 'Px,y', P).components, compose_P(t, P, 0).components)


@pytest.mark.parametrize('signature', ['x,x,z', 'x,y', 'x,y,q'])
def test_rearranged_rejects_malformed_signatures(signature):
    with pytest.raises(DegreeMismatch):
        rearranged(Tensor(np.zeros((2, 2, 2))), signature)


def test_rearranged_needs_P_for_substitution():
    with pytest.raises(DegreeMismatch):
        rearranged(Tensor(np.zeros((2, 2))), 'Px,y')


def test_contract_metric_gives_dimension():
    g = np.diag([1., 2., 4., 8.])
    assert contract(Tensor(g), np.linalg.inv(g), 0, 1).scalar() == pytest.approx(4.)


def test_contract_rejects_bad_slots():
    t = Tensor(np.zeros((2, 2, 2)))
    with pytest.raises(SlotOutOfRange):
        contract(t, np.eye(2), 1, 1)
    with pytest.raises(SlotOutOfRange):
        contract(t, np.eye(2), 0, 3)


def test_cyclic_sums_check_degree():
    with pytest.raises(DegreeMismatch):
        tensor.cyclic_sum3(Tensor(np.zeros((2, 2))))
    with pytest.raises(DegreeMismatch):
        tensor.cyclic_sum_first3(Tensor(np.zeros((2, 2, 2))))


def test_zeros_and_stack_max_abs():
    assert tensor.zeros(3, 2).shape == (3, 3)
    assert tensor.stack_max_abs([Tensor(np.array([[1., -3.], [0., 0.]])), tensor.zeros(2, 2)]) == 3.
    assert tensor.stack_max_abs([]) == 0.


@settings(max_examples=50)
@given(components=cubes, P=sign_diagonals)
def test_double_P_substitution_is_identity(components, P):
    t = Tensor(components)
    twice = rearranged(rearranged(t, 'Px,Py,Pz', P), 'Px,Py,Pz', P)
    assert np.allclose(twice.components, t.components)


@settings(max_examples=50)
@given(components=cubes)
def test_cyclic_sum_is_cyclically_invariant(components):
    s = tensor.cyclic_sum3(Tensor(components))
    assert np.allclose(rearranged(s, 'y,z,x').components, s.components, atol=1e-9)


@settings(max_examples=50)
@given(components=cubes)
def test_identity_metric_norm_is_sum_of_squares(components):
    t = Tensor(components)
    assert tensor.norm_sq(t, np.eye(DIM)) == pytest.approx(float(np.sum(components ** 2)), rel=1e-12, abs=1e-9)
    assert tensor.norm(t, np.eye(DIM)) >= 0.


@settings(max_examples=50)
@given(components=cubes)
def test_raise_then_lower_restores_components(components):
    g = np.diag([1., 2., 3.])
    t = Tensor(components)
    restored = tensor.lower_slot(tensor.raise_slot(t, np.linalg.inv(g), 1), g, 1)
    assert np.allclose(restored.components, t.components, atol=1e-9)


@settings(max_examples=50)
@given(components=cubes)
def test_cyclic_sum_applied_twice_triples(components):
    s = tensor.cyclic_sum3(Tensor(components))
    assert np.allclose(tensor.cyclic_sum3(s).components, 3 * s.components, atol=1e-9)
