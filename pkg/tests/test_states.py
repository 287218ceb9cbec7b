"""
Tests for state validation, Schmidt decomposition and random ensembles.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robustkit.errors import UnsupportedInputError, ValidationError
from robustkit.states import (
    apply_local_unitary,
    canonical_ket,
    canonical_local_unitaries,
    canonicalize,
    density_to_ket,
    ket_to_density,
    local_unitary,
    maximally_mixed,
    purity,
    random_density,
    random_local_unitary,
    random_pure,
    schmidt,
    validate_density,
    validate_ket,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_validate_ket_infers_dimension():
    psi = validate_ket([1, 0, 0, 0])
    assert psi.n == 2
    assert psi.amplitudes.dtype == np.complex128


def test_validate_ket_rejects_bad_input():
    with pytest.raises(ValidationError):
        validate_ket([1, 1, 0, 0])
    with pytest.raises(ValidationError):
        validate_ket([1, 0, 0])
    with pytest.raises(ValidationError):
        validate_ket(np.ones(81) / 9)  # n = 9 exceeds max_local_dim
    with pytest.raises(ValidationError, match='perfect square'):
        validate_ket(np.ones(5) / np.sqrt(5))


def test_single_level_systems_are_rejected():
    with pytest.raises(ValidationError, match='at least 2'):
        validate_ket([1.0])
    with pytest.raises(ValidationError, match='at least 2'):
        validate_density(np.eye(1), 1)


def test_validate_density_checks():
    with pytest.raises(ValidationError):
        validate_density(np.eye(4), 2)
    with pytest.raises(ValidationError):
        validate_density(np.diag([1.5, -0.5, 0, 0]), 2)
    not_hermitian = np.eye(4) / 4
    not_hermitian[0, 1] = 0.1
    with pytest.raises(ValidationError):
        validate_density(not_hermitian, 2)
    rho = validate_density(np.eye(4) / 4, 2)
    assert rho.n == 2


def test_bell_schmidt(bell_schmidt):
    assert np.allclose(bell_schmidt.coeffs, [1 / np.sqrt(2)] * 2, atol=1e-15)
    assert bell_schmidt.rank == 2
    assert bell_schmidt.is_canonical()
    assert np.allclose(bell_schmidt.basis_a, np.eye(2))


def test_product_state_has_rank_one(product):
    sd = schmidt(product)
    assert sd.rank == 1
    assert np.allclose(sd.coeffs, [1, 0])


def test_schmidt_of_product_in_rotated_basis():
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    sd = schmidt(validate_ket(np.kron(plus, minus)))
    assert sd.rank == 1
    assert abs(sd.coeffs[0] - 1) < 1e-12


def test_schmidt_coeffs_sorted_and_clamped():
    sd = schmidt(canonical_ket([0.6, 0.8]))
    assert np.allclose(sd.coeffs, [0.8, 0.6])
    tiny = np.sqrt(1 - 1e-26)
    sd = schmidt(canonical_ket([tiny, 1e-13]))
    assert sd.coeffs[1] == 0.0
    assert sd.rank == 1


def test_equal_coefficients_tie_break_is_deterministic(qutrit_uniform):
    first = schmidt(qutrit_uniform)
    second = schmidt(validate_ket(np.array(qutrit_uniform.amplitudes)))
    assert np.array_equal(first.basis_a, second.basis_a)
    assert np.allclose(first.basis_a, np.eye(3))


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=4))
def test_schmidt_reconstructs_state(seed, n):
    psi = random_pure(n, seed)
    sd = schmidt(psi)
    assert np.allclose(sd.reconstruct(), psi.amplitudes, atol=1e-12)
    assert np.all(np.diff(sd.coeffs) <= 1e-15)
    assert abs(np.sum(sd.coeffs ** 2) - 1) < 1e-12
    assert np.allclose(sd.basis_a.conj().T @ sd.basis_a, np.eye(n), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=4))
def test_canonical_local_unitaries_reach_canonical_form(seed, n):
    psi = random_pure(n, seed)
    sd = schmidt(psi)
    u1, u2 = canonical_local_unitaries(sd)
    moved = apply_local_unitary(psi, u1, u2)
    assert np.allclose(moved.amplitudes, canonicalize(psi).amplitudes, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=3))
def test_schmidt_coefficients_invariant_under_local_unitaries(seed, n):
    rng = np.random.default_rng(seed)
    psi = random_pure(n, rng)
    moved = apply_local_unitary(psi, random_local_unitary(n, rng), random_local_unitary(n, rng))
    assert np.allclose(schmidt(moved).coeffs, schmidt(psi).coeffs, atol=1e-9)


def test_local_unitary_matches_ket_transport():
    rng = np.random.default_rng(11)
    psi = random_pure(2, rng)
    u1, u2 = random_local_unitary(2, rng), random_local_unitary(2, rng)
    by_density = local_unitary(ket_to_density(psi).mat, u1, u2)
    by_ket = ket_to_density(apply_local_unitary(psi, u1, u2)).mat
    assert np.allclose(by_density, by_ket, atol=1e-12)


def test_density_to_ket_round_trip(skewed):
    psi = density_to_ket(ket_to_density(skewed))
    assert np.allclose(psi.amplitudes, skewed.amplitudes, atol=1e-12)
    with pytest.raises(UnsupportedInputError):
        density_to_ket(maximally_mixed(2))


def test_random_pure_is_deterministic_per_seed():
    assert np.array_equal(random_pure(3, 42).amplitudes, random_pure(3, 42).amplitudes)
    assert not np.array_equal(random_pure(3, 42).amplitudes, random_pure(3, 43).amplitudes)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=3))
def test_random_density_is_valid(seed, n):
    rho = random_density(n, seed)
    validate_density(rho.mat, n)
    assert abs(np.trace(rho.mat) - 1) < 1e-12


def test_random_density_rank():
    rho = random_density(2, 5, rank=1)
    assert abs(purity(rho) - 1) < 1e-10
    with pytest.raises(ValidationError):
        random_density(2, 5, rank=5)


def test_ginibre_mean_purity():
    """E tr ρ² = 2N / (N² + 1) for the square Ginibre ensemble; 8/17 at N = 4."""
    rng = np.random.default_rng(2024)
    mean = np.mean([purity(random_density(2, rng)) for _ in range(2000)])
    assert abs(mean - 8 / 17) < 0.02


def test_haar_mean_overlap():
    """E |<0|psi>|² = 1/N for Haar-random kets."""
    rng = np.random.default_rng(7)
    mean = np.mean([abs(random_pure(2, rng).amplitudes[0]) ** 2 for _ in range(4000)])
    assert abs(mean - 0.25) < 0.02


def test_maximally_mixed():
    rho = maximally_mixed(3)
    assert np.allclose(rho.mat, np.eye(9) / 9)
    assert abs(purity(rho) - 1 / 9) < 1e-15
