"""
Numeric oracle for the optimal mixing weight.

For a candidate mixer ρ_M the PPT weights {a : aρ + (1-a)ρ_M is PPT} form an
interval, because a -> λ_min(PT(aρ + (1-a)ρ_M)) is concave. A hill climber
over mixers then maximizes the upper end of that interval. For two qubits PPT
is exactly separability; for n = 3 results carry a PPT-relaxation flag.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import UnsupportedInputError, ValidationError
from .matrix_core import ComplexMatrix
from .ppt import partial_transpose
from .robustness import gershgorin_mixer, robustness_pure
from .states import (
    DensityMatrix,
    Ket,
    density_to_ket,
    ket_to_density,
    maximally_mixed,
    random_density,
    random_pure,
    schmidt,
)

logger = logging.getLogger(__name__)

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
# interior-point search width; must sit well below ppt_tol
PEAK_WIDTH = 1e-12
THEOREM_TOL = 1e-6


@dataclass(frozen=True)
class SearchConfig:
    iterations: int = 2000
    seed: int = 0
    step_scale: float = 0.1
    a_resolution: float = 1e-6
    include_gershgorin_seed: bool = True
    # consecutive rejections before the step is halved
    patience: int = 60
    min_step: float = 1e-4

    def __post_init__(self):
        if self.iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 < self.a_resolution <= 1e-3:
            raise ValidationError(f"a_resolution must be in (0, 1e-3], got {self.a_resolution}")
        if not 0 < self.step_scale <= 1:
            raise ValidationError(f"step_scale must be in (0, 1], got {self.step_scale}")
        if self.patience < 1 or not 0 < self.min_step <= self.step_scale:
            raise ValidationError("patience must be >= 1 and min_step in (0, step_scale]")


@dataclass(frozen=True)
class SearchResult:
    best_a: float
    best_mixer: DensityMatrix
    trace: List[Tuple[int, float]] = field(default_factory=list)
    ppt_relaxation: bool = False
    evaluations: int = 0


@dataclass(frozen=True)
class WeightWindow:
    """PPT weights of aρ + (1-a)ρ_M lie in [lower, a]; feasible=False means none do."""

    a: float
    lower: float
    feasible: bool
    mixer_is_ppt: bool


class _MixtureSpectrum:
    """a -> λ_min(PT(aρ + (1-a)ρ_M)), using linearity of the partial transpose."""

    def __init__(self, rho: ComplexMatrix, rho_m: ComplexMatrix, n: int):
        self.pt_rho = partial_transpose(rho, n)
        self.pt_mixer = partial_transpose(rho_m, n)
        self.calls = 0

    def __call__(self, a: float) -> float:
        self.calls += 1
        mat = a * self.pt_rho + (1 - a) * self.pt_mixer
        return float(scipy.linalg.eigvalsh((mat + mat.conj().T) / 2)[0])


def _golden_peak(phi: Callable[[float], float], lo: float, hi: float, width: float) -> float:
    """Maximizer of a concave function on [lo, hi]."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = phi(x1), phi(x2)
    while hi - lo > width:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = phi(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = phi(x1)
    return (lo + hi) / 2


def _bisect_edge(phi: Callable[[float], float], inside: float, outside: float, tol: float,
                 resolution: float) -> float:
    """Last feasible point between a feasible and an infeasible weight."""
    while abs(outside - inside) > resolution:
        mid = (inside + outside) / 2
        if phi(mid) >= -tol:
            inside = mid
        else:
            outside = mid
    return inside


def _window(phi: _MixtureSpectrum, resolution: float, tol: float) -> WeightWindow:
    mixer_ppt = phi(0.0) >= -tol
    if mixer_ppt:
        start = 0.0
    else:
        start = _golden_peak(phi, 0.0, 1.0, PEAK_WIDTH)
        if phi(start) < -tol:
            return WeightWindow(0.0, 0.0, False, False)

    upper = 1.0 if phi(1.0) >= -tol else _bisect_edge(phi, start, 1.0, tol, resolution)
    lower = 0.0 if mixer_ppt else _bisect_edge(phi, start, 0.0, tol, resolution)
    return WeightWindow(upper, lower, True, mixer_ppt)


def max_a_for_mixer(rho: DensityMatrix, rho_m: DensityMatrix, resolution: float = 1e-6,
                    tol: float = DEFAULT_TOLERANCES.ppt_tol) -> WeightWindow:
    """
    Largest a with aρ + (1-a)ρ_M PPT, bisected to resolution.

    A non-PPT mixer may still have a window away from 0; its interior is found
    first by golden-section search on the concave minimum eigenvalue.
    """
    if rho.n != rho_m.n:
        raise ValidationError(f"state acts on n={rho.n}, mixer on n={rho_m.n}")
    window = _window(_MixtureSpectrum(rho.mat, rho_m.mat, rho.n), resolution, tol)
    if not window.feasible:
        logger.debug("no mixing weight makes the mixture PPT")
    return window


def _gershgorin_seed(rho: DensityMatrix, tolerances: Tolerances) -> Optional[DensityMatrix]:
    try:
        sd = schmidt(density_to_ket(rho, tolerances), tolerances)
    except UnsupportedInputError:
        return None
    try:
        return gershgorin_mixer(sd, tolerances).mixer
    except UnsupportedInputError as e:
        logger.info(f"no Gershgorin seed: {e}")
        return None


class MixerSearch:
    """Hill climbing over mixers for one state."""

    def __init__(self, rho: DensityMatrix, config: SearchConfig, tolerances: Tolerances = DEFAULT_TOLERANCES):
        if rho.n > 3:
            raise UnsupportedInputError(f"oracle search supports n <= 3, got n={rho.n}")
        self.rho = rho
        self.config = config
        self.tolerances = tolerances
        self.ppt_relaxation = rho.n == 3
        self.rng = np.random.default_rng(config.seed)
        self.evaluations = 0
        if self.ppt_relaxation:
            logger.warning("n = 3: PPT is only necessary for separability; results are a PPT relaxation")

    def _spectrum(self, mixer: ComplexMatrix) -> _MixtureSpectrum:
        return _MixtureSpectrum(self.rho.mat, mixer, self.rho.n)

    def evaluate(self, mixer: ComplexMatrix) -> float:
        phi = self._spectrum(mixer)
        window = _window(phi, self.config.a_resolution, self.tolerances.ppt_tol)
        self.evaluations += phi.calls
        return window.a if window.feasible else 0.0

    def _can_improve(self, mixer: ComplexMatrix, best_a: float) -> bool:
        """Cheap screen: can the window of mixer reach beyond best_a + resolution?"""
        target = best_a + self.config.a_resolution
        if target > 1.0:
            return False
        phi = self._spectrum(mixer)
        tol = self.tolerances.ppt_tol
        here = phi(target)
        if here >= -tol:
            self.evaluations += phi.calls
            return True
        # concave: decreasing at target means nothing to the right is feasible
        ahead = phi(min(1.0, target + self.config.a_resolution))
        self.evaluations += phi.calls
        return ahead > here

    def _propose(self, current: ComplexMatrix, step: float) -> List[ComplexMatrix]:
        size = current.shape[0]
        rank = int(self.rng.integers(1, size + 1))
        target = random_density(self.rho.n, self.rng, rank, self.tolerances).mat
        proposals = [(1 - step) * current + step * target]
        mirrored = (1 + step) * current - step * target
        if scipy.linalg.eigvalsh((mirrored + mirrored.conj().T) / 2)[0] >= 0.0:
            proposals.append(mirrored)
        return proposals

    def run(self, seeds: Sequence[DensityMatrix] = ()) -> SearchResult:
        cfg = self.config
        starts = [maximally_mixed(self.rho.n).mat]
        if cfg.include_gershgorin_seed:
            seed_mixer = _gershgorin_seed(self.rho, self.tolerances)
            if seed_mixer is not None:
                starts.append(seed_mixer.mat)
        starts.extend(np.asarray(s.mat) for s in seeds)

        scores = [self.evaluate(start) for start in starts]
        best_index = int(np.argmax(scores))
        current, best_a = np.array(starts[best_index]), scores[best_index]
        trace = [(0, best_a)]

        step, failures = cfg.step_scale, 0
        for iteration in range(1, cfg.iterations + 1):
            if best_a >= 1.0:
                break

            improved = False
            for proposal in self._propose(current, step):
                if not self._can_improve(proposal, best_a):
                    continue
                value = self.evaluate(proposal)
                if value > best_a:
                    current, best_a, improved = proposal, value, True
                    trace.append((iteration, best_a))
                    logger.debug(f"iteration {iteration}: a = {best_a:.9f} (step {step:.4g})")
                    break

            if improved:
                failures = 0
            else:
                failures += 1
                if failures >= cfg.patience:
                    step, failures = max(step / 2, cfg.min_step), 0

        mixer = DensityMatrix(self.rho.n, (current + current.conj().T) / 2)
        return SearchResult(best_a, mixer, trace, self.ppt_relaxation, self.evaluations)


def estimate_O_g(rho: DensityMatrix, config: Optional[SearchConfig] = None,
                 seeds: Sequence[DensityMatrix] = (),
                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> SearchResult:
    """
    Lower-bound the optimal mixing weight of rho by searching over mixers.

    Starts from the maximally mixed state, the Gershgorin mixer when rho is an
    entangled pure state and the flag is set, and any extra seeds.
    """
    config = config or SearchConfig()
    return MixerSearch(rho, config, tolerances).run(seeds)


@dataclass(frozen=True)
class TheoremTrial:
    index: int
    coeffs: List[float]
    expected: float
    seeded_a: float
    unseeded_a: Optional[float]

    @property
    def passed(self) -> bool:
        if abs(self.seeded_a - self.expected) > THEOREM_TOL:
            return False
        ceiling = self.expected + THEOREM_TOL
        return self.seeded_a <= ceiling and (self.unseeded_a is None or self.unseeded_a <= ceiling)


@dataclass(frozen=True)
class TheoremReport:
    n: int
    trials: List[TheoremTrial]

    @property
    def passes(self) -> int:
        return sum(1 for trial in self.trials if trial.passed)

    @property
    def failures(self) -> int:
        return len(self.trials) - self.passes


def _trial_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _run_trial(index: int, psi: Ket, config: SearchConfig, run_unseeded: bool,
               tolerances: Tolerances) -> TheoremTrial:
    sd = schmidt(psi, tolerances)
    expected = robustness_pure(sd.coeffs, tolerances).O_g
    rho = ket_to_density(psi)

    seeded = estimate_O_g(rho, replace(config, include_gershgorin_seed=True), tolerances=tolerances)
    unseeded = None
    if run_unseeded:
        unseeded = estimate_O_g(rho, replace(config, include_gershgorin_seed=False), tolerances=tolerances).best_a

    trial = TheoremTrial(index, [float(c) for c in sd.coeffs], expected, seeded.best_a, unseeded)
    if not trial.passed:
        logger.error(f"trial {index}: expected {expected:.9f}, seeded {seeded.best_a:.9f}, unseeded {unseeded}")
    return trial


def verify_main_theorem(n: int = 2, trials: int = 50, seed: int = 0, config: Optional[SearchConfig] = None,
                        extra_states: Sequence[Ket] = (), run_unseeded: bool = True,
                        workers: Optional[int] = None,
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> TheoremReport:
    """
    Compare the oracle against O_g = 1/(1 + R_s) on random pure states.

    Each trial draws its state and search seed from (seed, trial index), so
    results do not depend on scheduling. Extra states run after the random ones.
    """
    if n != 2:
        raise UnsupportedInputError("main-theorem verification is exact only for two qubits (n = 2)")
    if trials < 0:
        raise ValidationError(f"trials must be >= 0, got {trials}")
    config = config or SearchConfig()

    jobs = []
    for index in range(trials):
        trial_seed = _trial_seed(seed, index)
        psi = random_pure(n, np.random.default_rng(trial_seed), tolerances)
        jobs.append((index, psi, replace(config, seed=trial_seed)))
    for offset, psi in enumerate(extra_states):
        index = trials + offset
        if psi.n != n:
            raise ValidationError(f"extra state {offset} acts on n={psi.n}, expected {n}")
        jobs.append((index, psi, replace(config, seed=_trial_seed(seed, index))))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_trial, index, psi, cfg, run_unseeded, tolerances) for index, psi, cfg in jobs]
        results = sorted((f.result() for f in futures), key=lambda trial: trial.index)

    report = TheoremReport(n, results)
    logger.info(f"main theorem: {report.passes}/{len(results)} trials passed")
    return report
