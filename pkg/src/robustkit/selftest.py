"""
Invariant suite behind `robustkit selftest`.

Each check draws seeded random states, compares a closed form against an
independent numeric computation, and records a CheckResult. Any failing check
makes the report fail.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import RobustkitError, ValidationError
from .matrix_core import antisym_pairs, index_f, pair_count
from .oracle_search import SearchConfig, max_a_for_mixer, verify_main_theorem
from .ppt import partial_transpose as default_partial_transpose
from .ppt import antisym_vector, pure_pt_eigenpairs
from .robustness import (
    evaluate_T_candidate,
    g_coefficients,
    g_matrix,
    gershgorin_mixer,
    optimal_pseudo_mixture,
    robustness_pure,
    witness_bound_a,
)
from .states import (
    canonical_ket,
    ket_to_density,
    maximally_mixed,
    random_density,
    random_pure,
    schmidt,
)

logger = logging.getLogger(__name__)

PartialTranspose = Callable[[np.ndarray, int], np.ndarray]


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    cases: int = 0
    worst: float = 0.0
    failures: List[str] = field(default_factory=list)

    def record(self, deviation: float, limit: float, label: str):
        self.cases += 1
        self.worst = max(self.worst, float(deviation))
        if not deviation <= limit:
            self.passed = False
            self.failures.append(f"{label}: deviation {deviation:.3e} > {limit:.1e}")

    def fail(self, label: str, reason: str):
        self.cases += 1
        self.passed = False
        self.failures.append(f"{label}: {reason}")

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'cases': self.cases,
            'worst_deviation': self.worst,
            'failures': self.failures[:10],
        }


@dataclass
class SelfTestReport:
    n: int
    trials: int
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> Dict:
        return {
            'n': self.n,
            'trials': self.trials,
            'seed': self.seed,
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
        }


class SelfTest:
    def __init__(self, n: int = 2, trials: int = 10, seed: int = 0,
                 config: Optional[SearchConfig] = None,
                 tolerances: Tolerances = DEFAULT_TOLERANCES,
                 partial_transpose: PartialTranspose = default_partial_transpose):
        if trials < 0:
            raise ValidationError(f"trials must be >= 0, got {trials}")
        self.n = n
        self.trials = trials
        self.seed = seed
        self.config = config or SearchConfig(iterations=300)
        self.tolerances = tolerances
        # test hook: lets the negative control swap in a corrupted transpose
        self.partial_transpose = partial_transpose
        self.rng = np.random.default_rng(seed)

    def _entangled_state(self):
        while True:
            sd = schmidt(random_pure(self.n, self.rng, self.tolerances), self.tolerances)
            if sd.rank >= 2:
                return sd

    def check_pt_spectrum(self) -> CheckResult:
        """Negative PT eigenpairs of canonical states against -ã_r ã_s and the antisymmetric vectors."""
        result = CheckResult('pt_spectrum')
        for trial in range(self.trials):
            psi = canonical_ket(self._entangled_state().coeffs)
            sd = schmidt(psi, self.tolerances)
            pt = self.partial_transpose(ket_to_density(psi).mat, self.n)
            values = scipy.linalg.eigvalsh((pt + pt.conj().T) / 2)
            found = np.sort(values[values < -self.tolerances.ppt_tol])
            predicted = pure_pt_eigenpairs(sd, self.tolerances)
            expected = np.sort([value for value, _ in predicted])

            if len(found) > pair_count(self.n) or len(found) != len(expected):
                result.fail(f"trial {trial}", f"{len(found)} negative eigenvalues, expected {len(expected)}")
                continue
            deviation = float(np.max(np.abs(found - expected))) if len(found) else 0.0
            for value, vec in predicted:
                deviation = max(deviation, float(np.linalg.norm(pt @ vec.vec - value * vec.vec)))
            result.record(deviation, 1e-9, f"trial {trial}")
        return result

    def check_g_sum(self) -> CheckResult:
        result = CheckResult('g_sum_identity')
        size = self.n * self.n
        for trial in range(self.trials):
            e = self.rng.standard_normal(size) + 1j * self.rng.standard_normal(size)
            e /= np.linalg.norm(e)
            result.record(g_coefficients(e, self.n).identity_residual, 1e-12, f"trial {trial}")
        return result

    def check_cross_and_T(self) -> List[CheckResult]:
        cross = CheckResult('quadratic_form_cross_check')
        t_bound = CheckResult('T_bound')
        for trial in range(self.trials):
            sd = self._entangled_state()
            rho_m = random_density(self.n, self.rng, tolerances=self.tolerances)
            pt = self.partial_transpose(rho_m.mat, self.n)
            try:
                eigenvalues, g = g_matrix(rho_m, self.tolerances)
            except RobustkitError as e:
                cross.fail(f"trial {trial}", str(e))
                continue
            for j, k in antisym_pairs(self.n):
                vec = antisym_vector(j, k, self.n).vec
                direct = float(np.real(np.vdot(vec, pt @ vec)))
                spectral = 0.5 * float(eigenvalues @ g[index_f(j, k, self.n) - 1])
                cross.record(abs(direct - spectral), 1e-10, f"trial {trial} pair ({j}, {k})")

            try:
                t_value = evaluate_T_candidate(sd, rho_m, self.tolerances)
            except RobustkitError as e:
                t_bound.fail(f"trial {trial}", str(e))
                continue
            ceiling = 1.0 / robustness_pure(sd.coeffs, self.tolerances).R_s
            t_bound.record(max(0.0, t_value - ceiling), 1e-9, f"trial {trial}")
        return [cross, t_bound]

    def check_gershgorin(self) -> List[CheckResult]:
        construction = CheckResult('gershgorin_mixer')
        decomposition = CheckResult('pseudo_mixture')
        for trial in range(self.trials):
            sd = self._entangled_state()
            psi = canonical_ket(sd.coeffs)
            try:
                report = gershgorin_mixer(sd, self.tolerances)
                pseudo = optimal_pseudo_mixture(psi, self.tolerances)
            except RobustkitError as e:
                construction.fail(f"trial {trial}", str(e))
                continue
            optimum = robustness_pure(sd.coeffs, self.tolerances)
            equality = abs(evaluate_T_candidate(sd, report.mixer, self.tolerances) - 1.0 / optimum.R_s)
            construction.record(max(equality, abs(report.bound_a - optimum.O_g)), 1e-10, f"trial {trial}")
            decomposition.record(pseudo.residual(), 1e-10, f"trial {trial}")
        return [construction, decomposition]

    def check_werner(self) -> CheckResult:
        """Bell state with the maximally mixed mixer: witness bound and PPT window both give 1/3."""
        result = CheckResult('werner_threshold')
        bell = schmidt(canonical_ket([1 / np.sqrt(2), 1 / np.sqrt(2)]), self.tolerances)
        mixer = maximally_mixed(2)
        witness = witness_bound_a(bell, mixer, self.tolerances)
        window = max_a_for_mixer(ket_to_density(canonical_ket(bell.coeffs)), mixer,
                                 tol=self.tolerances.ppt_tol)
        result.record(max(abs(witness - 1 / 3), abs(window.a - 1 / 3)), 1e-6, "bell")
        return result

    def check_main_theorem(self) -> CheckResult:
        result = CheckResult('main_theorem')
        if self.n != 2:
            logger.warning(f"main theorem check skipped: exact only for n = 2, got n = {self.n}")
            return result
        report = verify_main_theorem(2, self.trials, self.seed, self.config, tolerances=self.tolerances)
        for trial in report.trials:
            if trial.passed:
                result.record(abs(trial.seeded_a - trial.expected), 1e-6, f"trial {trial.index}")
            else:
                result.fail(f"trial {trial.index}",
                            f"expected {trial.expected:.9f}, seeded {trial.seeded_a:.9f}, "
                            f"unseeded {trial.unseeded_a}")
        return result

    def run(self) -> SelfTestReport:
        report = SelfTestReport(self.n, self.trials, self.seed)
        if self.trials == 0:
            logger.info("selftest: no trials requested")
            return report

        logger.info(f"selftest: n={self.n}, trials={self.trials}, seed={self.seed}")
        report.checks.append(self.check_pt_spectrum())
        report.checks.append(self.check_g_sum())
        report.checks.extend(self.check_cross_and_T())
        report.checks.extend(self.check_gershgorin())
        report.checks.append(self.check_werner())
        report.checks.append(self.check_main_theorem())

        for check in report.checks:
            if check.passed:
                logger.info(f"✅ {check.name}: {check.cases} cases, worst {check.worst:.3e}")
            else:
                logger.error(f"❌ {check.name}: {len(check.failures)} failure(s), first: {check.failures[0]}")
        return report
