import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_unitary
from rfiteleport.linalg import (
    as_matrix,
    bell_state,
    check_density_matrix,
    fidelity,
    hs_inner,
    inverse_sqrt_psd,
    is_unitary,
    partial_trace,
    projector,
    purity,
    tensor,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def complex_matrices(d):
    return st.tuples(arrays(float, (d, d), elements=finite), arrays(float, (d, d), elements=finite)).map(
        lambda p: p[0] + 1j * p[1]
    )


def test_unitarity_examples():
    assert is_unitary(np.eye(3)) == (True, 0.0)
    assert is_unitary([[0, 1], [1, 0]])[0]
    ok, defect = is_unitary(np.diag([1, 2]))
    assert not ok and defect == pytest.approx(3.0)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_matrix([1, 2, 3])
    with pytest.raises(ValueError):
        as_matrix(np.ones((2, 3)), square=True)
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])


def test_hs_inner_examples():
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1, -1])
    assert hs_inner(np.eye(2), np.eye(2)) == 2
    assert hs_inner(X, Z) == 0
    assert hs_inner(1j * np.eye(2), np.eye(2)) == -2j
    with pytest.raises(ValueError):
        hs_inner(np.eye(2), np.eye(3))


def test_tensor_index_convention():
    a, b = np.array([1, 2]), np.array([3, 5, 7])
    v = tensor(a, b)
    assert v[1 * 3 + 2] == 2 * 7
    assert tensor(np.eye(2), np.eye(3)).shape == (6, 6)


def test_transpose_trick():
    # (A⊗1)|η⟩ = (1⊗Aᵀ)|η⟩
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    eta = bell_state(3)
    assert np.allclose(tensor(A, np.eye(3)) @ eta, tensor(np.eye(3), A.T) @ eta, atol=1e-12)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_bell_state(d):
    eta = bell_state(d)
    assert np.linalg.norm(eta) == pytest.approx(1.0)
    rho = projector(eta)
    assert np.allclose(partial_trace(rho, (d, d), "second"), np.eye(d) / d)
    assert np.allclose(partial_trace(rho, (d, d), "first"), np.eye(d) / d)


def test_bell_state_rejects_zero():
    with pytest.raises(ValueError):
        bell_state(0)


def test_partial_trace_of_product():
    rng = np.random.default_rng(1)
    a = random_unitary(2, rng)[:, 0]
    b = random_unitary(3, rng)[:, 0]
    rho = projector(tensor(a, b))
    assert np.allclose(partial_trace(rho, (2, 3), "second"), projector(a))
    assert np.allclose(partial_trace(rho, (2, 3), "first"), projector(b))
    with pytest.raises(ValueError):
        partial_trace(rho, (2, 2))
    with pytest.raises(ValueError):
        partial_trace(rho, (2, 3), "middle")


def test_fidelity_and_purity():
    psi = np.array([1, 1j]) / math.sqrt(2)
    assert fidelity(psi, projector(psi)) == pytest.approx(1.0)
    assert fidelity(psi, np.eye(2) / 2) == pytest.approx(0.5)
    assert purity(np.eye(2) / 2) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        fidelity(psi, np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        fidelity(np.ones(3), np.eye(2))


def test_check_density_matrix():
    check_density_matrix(np.eye(2) / 2)
    for bad in (np.eye(2), np.diag([1.5, -0.5]), np.array([[0.5, 1], [0, 0.5]])):
        with pytest.raises(ValueError):
            check_density_matrix(bad)


def test_inverse_sqrt_psd():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    S = inverse_sqrt_psd(M)
    assert np.allclose(S @ M @ S, np.eye(2))


@given(complex_matrices(3), complex_matrices(3))
def test_hs_conjugate_symmetry(A, B):
    assert hs_inner(A, B) == pytest.approx(np.conj(hs_inner(B, A)), abs=1e-9)


@given(complex_matrices(3))
def test_hs_positive(A):
    v = hs_inner(A, A)
    assert abs(v.imag) < 1e-12 and v.real >= 0
    assert v.real == pytest.approx(float(np.sum(np.abs(A) ** 2)))


@given(complex_matrices(2), complex_matrices(2), complex_matrices(2))
def test_tensor_associative(A, B, C):
    assert np.allclose(tensor(tensor(A, B), C), tensor(A, tensor(B, C)))
    assert np.allclose(tensor(A, B, C), tensor(A, tensor(B, C)))


@settings(max_examples=50)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_unitarity_preserved_by_conjugation(d, seed):
    rng = np.random.default_rng(seed)
    U, V = random_unitary(d, rng), random_unitary(d, rng)
    assert is_unitary(V @ U @ V.conj().T, tol=10 * np.finfo(float).eps * d)[0]


@given(complex_matrices(4), complex_matrices(4), st.complex_numbers(max_magnitude=3))
def test_partial_trace_linear_and_trace_preserving(A, B, c):
    for which in ("first", "second"):
        lhs = partial_trace(A + c * B, (2, 2), which)
        rhs = partial_trace(A, (2, 2), which) + c * partial_trace(B, (2, 2), which)
        assert np.allclose(lhs, rhs, atol=1e-9)
        assert np.trace(partial_trace(A, (2, 2), which)) == pytest.approx(np.trace(A), abs=1e-9)
