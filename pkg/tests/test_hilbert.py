import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qcheshire import hilbert as hb

finite = st.floats(-10, 10, allow_nan=False)


def random_matrix(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def test_tensor_left_factor_most_significant():
    up, down = hb.basis(2, 0), hb.basis(2, 1)
    v = hb.tensor(hb.basis(3, 1), down, up)
    assert v.size == 12
    assert np.flatnonzero(v).tolist() == [1 * 4 + 1 * 2 + 0]


def test_tensor_of_operators_matches_kron():
    rng = np.random.default_rng(0)
    a, b = random_matrix(rng, 3), random_matrix(rng, 2)
    assert np.array_equal(hb.tensor(a, b), np.kron(a, b))


def test_tensor_dimension_cap():
    with pytest.raises(hb.DimensionError):
        hb.tensor(*[np.eye(2)] * 13)
    with pytest.raises(hb.DimensionError):
        hb.tensor(np.eye(2), np.ones(2))


def test_cmat_rejects_non_square_and_nan():
    with pytest.raises(hb.DimensionError):
        hb.cmat(np.ones((2, 3)))
    with pytest.raises(ValueError):
        hb.cmat([[1, np.nan], [0, 1]])


def test_inner_shape_mismatch():
    with pytest.raises(hb.DimensionError):
        hb.inner(np.ones(2), np.ones(3))


@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=3),
       st.lists(st.tuples(finite, finite), min_size=3, max_size=3))
def test_inner_conjugate_symmetry(a, b):
    u = hb.cvec([complex(*x) for x in a])
    v = hb.cvec([complex(*x) for x in b])
    assert hb.inner(u, v) == pytest.approx(np.conj(hb.inner(v, u)), abs=1e-9)


@given(st.lists(finite, min_size=2, max_size=2), st.lists(finite, min_size=3, max_size=3))
def test_norm_of_tensor_is_product(a, b):
    u, v = hb.cvec(a), hb.cvec(b)
    assert hb.norm(hb.tensor(u, v)) == pytest.approx(hb.norm(u) * hb.norm(v), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n,scale", [(2, 0.1), (4, 1.0), (6, 3.0), (12, 5.0)])
def test_expm_matches_scipy(n, scale):
    rng = np.random.default_rng(n)
    a = random_matrix(rng, n, scale)
    ref = scipy.linalg.expm(a)
    assert np.max(np.abs(hb.expm(a) - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


@settings(max_examples=50)
@given(st.floats(-20, 20, allow_nan=False))
def test_expm_pauli_euler_form(theta):
    got = hb.expm(-1j * theta / 2 * hb.PAULI_X)
    want = math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * hb.PAULI_X
    assert np.max(np.abs(got - want)) <= 1e-12


def test_expm_of_zero_is_identity():
    assert np.array_equal(hb.expm(np.zeros((3, 3))), np.eye(3))


def test_expm_tolerance_validation_and_cap():
    with pytest.raises(ValueError):
        hb.expm(np.eye(2), tol=1e-3)
    with pytest.raises(hb.ConvergenceError):
        hb.expm(np.ones((2, 2)), max_terms=2)


def test_anti_hermitian_exponential_is_unitary():
    rng = np.random.default_rng(5)
    h = random_matrix(rng, 6)
    h = h + hb.dagger(h)
    assert hb.is_unitary(hb.expm(-1j * h))
    assert not hb.is_unitary(2 * np.eye(3))


def test_projector_idempotent():
    v = hb.cvec([1, 1j, 0]) / math.sqrt(2)
    p = hb.projector(v)
    assert np.allclose(p @ p, p, atol=1e-15)
    assert hb.expectation(p, v) == pytest.approx(1.0)
