"""
Tests for index maps, tensor products and Hermitian eigensystems.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robustkit.errors import ValidationError
from robustkit.matrix_core import (
    antisym_pairs,
    as_matrix,
    basis_vector,
    hermitian_eigen,
    index_c,
    index_c_inverse,
    index_f,
    index_f_inverse,
    is_psd,
    local_dimension,
    pair_count,
    symmetrize,
    tensor,
)


def test_index_c_examples():
    assert index_c(1, 1, 2) == 1
    assert index_c(2, 1, 2) == 3
    assert index_c(2, 3, 3) == 6
    assert index_c(3, 2, 3) == 8
    assert index_c_inverse(6, 3) == (2, 3)


def test_index_f_examples():
    assert index_f(1, 2, 2) == 1
    assert [index_f(i, j, 3) for i, j in [(1, 2), (1, 3), (2, 3)]] == [1, 2, 3]
    assert index_f(3, 4, 4) == 6
    assert index_f(1, 4, 4) == 3


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_index_f_enumerates_pairs_in_order(n):
    positions = [index_f(i, j, n) for i, j in antisym_pairs(n)]
    assert positions == list(range(1, pair_count(n) + 1))
    for m in positions:
        assert index_f(*index_f_inverse(m, n), n) == m


def _random_matrix(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_tensor_is_associative_and_bilinear(seed):
    rng = np.random.default_rng(seed)
    a, a2 = _random_matrix(rng, 2, 3), _random_matrix(rng, 2, 3)
    b, c = _random_matrix(rng, 3, 2), _random_matrix(rng, 2, 2)
    alpha = complex(rng.standard_normal(), rng.standard_normal())
    assert np.allclose(tensor(a, tensor(b, c)), tensor(tensor(a, b), c), atol=1e-12)
    assert np.allclose(tensor(alpha * a + a2, b), alpha * tensor(a, b) + tensor(a2, b), atol=1e-12)
    assert np.allclose(tensor(b, alpha * a + a2), alpha * tensor(b, a) + tensor(b, a2), atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_index_c_is_bijective(n):
    seen = {index_c(i, j, n) for i in range(1, n + 1) for j in range(1, n + 1)}
    assert seen == set(range(1, n * n + 1))


def test_index_maps_reject_bad_input():
    with pytest.raises(ValidationError):
        index_c(0, 1, 2)
    with pytest.raises(ValidationError):
        index_f(2, 2, 3)
    with pytest.raises(ValidationError):
        index_f(3, 1, 3)
    with pytest.raises(ValidationError):
        index_f_inverse(4, 3)


def test_tensor_of_basis_kets_lands_on_index_c():
    for i in range(1, 4):
        for j in range(1, 4):
            vec = tensor(basis_vector(i, 3), basis_vector(j, 3))
            assert vec.shape == (9, 1)
            assert vec[index_c(i, j, 3) - 1, 0] == 1
            assert np.sum(np.abs(vec)) == 1


def test_tensor_block_structure():
    a = np.array([[1, 2], [3, 4]])
    b = np.array([[0, 1], [1, 0]])
    out = tensor(a, b)
    assert np.allclose(out[:2, 2:], 2 * b)
    assert np.allclose(out[2:, :2], 3 * b)


def test_tensor_refuses_oversized_products():
    with pytest.raises(ValidationError):
        tensor(np.eye(40), np.eye(40), max_entries=4096)


def test_as_matrix_rejects_nan_and_empty():
    with pytest.raises(ValidationError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ValidationError):
        as_matrix([])
    with pytest.raises(ValidationError):
        as_matrix(np.zeros((2, 2, 2)))


def test_local_dimension():
    assert local_dimension(np.eye(9)) == 3
    with pytest.raises(ValidationError):
        local_dimension(np.eye(5))


def test_symmetrize_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        symmetrize(np.array([[0, 1], [0, 0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=9))
def test_hermitian_eigen_reconstructs(seed, size):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    herm = g + g.conj().T

    eig = hermitian_eigen(herm)
    assert np.all(np.diff(eig.eigenvalues) >= -1e-12)
    assert np.allclose(eig.reconstruct(), herm, atol=1e-10)
    assert np.allclose(eig.eigenvectors.conj().T @ eig.eigenvectors, np.eye(size), atol=1e-10)


def test_eigen_system_is_read_only():
    eig = hermitian_eigen(np.diag([1.0, 2.0]))
    with pytest.raises(ValueError):
        eig.eigenvalues[0] = 5.0
    assert eig.min_eigenvalue == 1.0
    assert len(eig.pairs()) == 2


def test_is_psd():
    assert is_psd(np.diag([0.0, 1.0]))
    assert not is_psd(np.diag([-1e-6, 1.0]))
    assert is_psd(np.diag([-1e-6, 1.0]), tol=1e-5)
