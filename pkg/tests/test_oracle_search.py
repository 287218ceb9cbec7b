"""
Tests for the numeric oracle: the PPT weight window, the hill climber and the
main-theorem verification.
"""

import numpy as np
import pytest

from robustkit.errors import UnsupportedInputError, ValidationError
from robustkit.oracle_search import (
    SearchConfig,
    estimate_O_g,
    max_a_for_mixer,
    verify_main_theorem,
)
from robustkit.ppt import min_pt_eigenvalue
from robustkit.robustness import gershgorin_mixer
from robustkit.states import (
    DensityMatrix,
    canonical_ket,
    ket_to_density,
    maximally_mixed,
    random_density,
    random_pure,
    schmidt,
)


def test_search_config_validation():
    with pytest.raises(ValidationError):
        SearchConfig(iterations=0)
    with pytest.raises(ValidationError):
        SearchConfig(a_resolution=0.01)
    with pytest.raises(ValidationError):
        SearchConfig(step_scale=0.0)


def test_werner_window(bell_rho, mixed2):
    window = max_a_for_mixer(bell_rho, mixed2)
    assert window.a == pytest.approx(1 / 3, abs=1e-6)
    assert window.lower == 0.0
    assert window.mixer_is_ppt


def test_separable_state_window_is_full(mixed2):
    rho = DensityMatrix(2, np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex))
    window = max_a_for_mixer(rho, mixed2)
    assert window.a == 1.0


def test_gershgorin_window_excludes_zero(bell_schmidt, bell_rho):
    mixer = gershgorin_mixer(bell_schmidt).mixer
    window = max_a_for_mixer(bell_rho, mixer)
    assert window.feasible
    assert not window.mixer_is_ppt
    assert window.a == pytest.approx(0.5, abs=1e-6)
    assert window.lower == pytest.approx(0.5, abs=1e-6)


def test_window_infeasible_when_nothing_is_ppt(bell_rho):
    window = max_a_for_mixer(bell_rho, bell_rho)
    assert not window.feasible
    assert window.a == 0.0


def test_window_rejects_mismatched_dimensions(bell_rho):
    with pytest.raises(ValidationError):
        max_a_for_mixer(bell_rho, maximally_mixed(3))


def test_bell_with_gershgorin_seed(bell_rho):
    result = estimate_O_g(bell_rho, SearchConfig(iterations=50))
    assert result.best_a == pytest.approx(0.5, abs=1e-6)
    assert not result.ppt_relaxation


def test_bell_without_seed_stays_below_optimum(bell_rho):
    result = estimate_O_g(bell_rho, SearchConfig(iterations=2000, include_gershgorin_seed=False))
    assert 0.48 <= result.best_a <= 0.5 + 1e-6


def test_product_state_reaches_one(product):
    result = estimate_O_g(ket_to_density(product), SearchConfig(iterations=10))
    assert result.best_a == 1.0


def test_search_trace_is_monotone_and_feasible(skewed):
    rho = ket_to_density(skewed)
    result = estimate_O_g(rho, SearchConfig(iterations=300, seed=3, include_gershgorin_seed=False))
    values = [a for _, a in result.trace]
    assert values == sorted(values)
    assert values[-1] == result.best_a
    mixture = result.best_a * rho.mat + (1 - result.best_a) * result.best_mixer.mat
    assert min_pt_eigenvalue(mixture, 2) >= -1e-9
    assert result.best_a <= 5 / 9 + 1e-6


def test_search_is_deterministic_per_seed():
    rho = ket_to_density(random_pure(2, 12))
    config = SearchConfig(iterations=150, seed=99, include_gershgorin_seed=False)
    first = estimate_O_g(rho, config)
    second = estimate_O_g(rho, config)
    assert first.best_a == second.best_a
    assert first.trace == second.trace
    assert np.array_equal(first.best_mixer.mat, second.best_mixer.mat)


def test_extra_seeds_are_used(bell_rho):
    separable_optimum = DensityMatrix(2, np.diag([0, 0.5, 0.5, 0]).astype(complex))
    config = SearchConfig(iterations=5, include_gershgorin_seed=False)
    result = estimate_O_g(bell_rho, config, seeds=[separable_optimum])
    assert result.best_a == pytest.approx(0.5, abs=1e-6)


def test_qutrit_search_is_flagged(qutrit_uniform):
    result = estimate_O_g(ket_to_density(qutrit_uniform), SearchConfig(iterations=20))
    assert result.ppt_relaxation
    assert result.best_a == pytest.approx(1 / 3, abs=1e-6)


def test_large_dimension_rejected():
    with pytest.raises(UnsupportedInputError):
        estimate_O_g(random_density(4, 0), SearchConfig(iterations=1))


def test_main_theorem_on_random_states(skewed, bell):
    report = verify_main_theorem(n=2, trials=50, seed=1, config=SearchConfig(iterations=100),
                                 extra_states=[skewed, bell])
    assert report.failures == 0
    assert report.passes == 52
    assert [trial.index for trial in report.trials] == list(range(52))
    assert report.trials[50].seeded_a == pytest.approx(5 / 9, abs=1e-6)
    assert report.trials[51].seeded_a == pytest.approx(0.5, abs=1e-6)


def test_main_theorem_is_independent_of_worker_count():
    config = SearchConfig(iterations=50)
    serial = verify_main_theorem(trials=4, seed=5, config=config, workers=1)
    parallel = verify_main_theorem(trials=4, seed=5, config=config, workers=4)
    assert serial == parallel


def test_main_theorem_needs_two_qubits():
    with pytest.raises(UnsupportedInputError):
        verify_main_theorem(n=3, trials=1)


def test_upper_bound_safety_on_canonical_states():
    rng = np.random.default_rng(21)
    for _ in range(10):
        sd = schmidt(canonical_ket(schmidt(random_pure(2, rng)).coeffs))
        rho = ket_to_density(canonical_ket(sd.coeffs))
        optimum = 1 / (1 + (np.sum(sd.coeffs) ** 2 - 1))
        for _ in range(5):
            window = max_a_for_mixer(rho, random_density(2, rng))
            assert window.a <= optimum + 1e-6
