"""
Robustness of entanglement for pure bipartite states.

Covers the closed form R = (Σ ã_i)² - 1, the antisymmetric-witness bound on the
mixing weight, the g-coefficients behind it, the max-min quantity T and its
bound 1/R_s, the diagonal-dominance (Gershgorin) optimal mixer, and the
pseudo-mixture decompositions ρ = (1+R)ρ_s - Rρ_M.

Witness computations run in the canonical frame Σ ã_i |i>|i>. A state given in
another Schmidt basis has its candidate mixer rotated there by the local
unitary basis_a ⊗ basis_b, which leaves separability untouched.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import MixerError, NumericalError, UnsupportedInputError, ValidationError
from .matrix_core import (
    ComplexMatrix,
    antisym_pairs,
    dagger,
    hermitian_eigen,
    index_c,
    index_f,
    pair_count,
)
from .ppt import Verdict, antisym_vector, is_ppt, partial_transpose, separability_verdict
from .states import (
    DensityMatrix,
    Ket,
    SchmidtDecomposition,
    ket_to_density,
    local_unitary,
    maximally_mixed,
    schmidt,
    validate_density,
)

logger = logging.getLogger(__name__)

# agreement required between a constructed optimal mixer and the closed-form optimum
OPTIMUM_TOL = 1e-10


@dataclass(frozen=True)
class RobustnessReport:
    R_s: float
    R_g: float
    O_s: float
    O_g: float
    schmidt_coeffs: npt.NDArray[np.float64]


@dataclass(frozen=True)
class GCoefficients:
    """g_f(j,k) for one unit vector e; values[f-1] pairs with f(j, k)."""

    values: npt.NDArray[np.float64]
    diag_sum: complex

    @property
    def identity_residual(self) -> float:
        """|Σ_k g_k - (1 - |Σ_j e_c(j,j)|²)|; zero up to rounding."""
        return abs(float(np.sum(self.values)) - (1.0 - abs(self.diag_sum) ** 2))


@dataclass(frozen=True)
class WitnessMatrix:
    """Rows follow the active pairs; A[row, i] = λ_i g^(i)_f(j,k) / (2 ã_j ã_k)."""

    pairs: List[Tuple[int, int]]
    matrix: npt.NDArray[np.float64]

    @property
    def T(self) -> float:
        return float(np.min(self.matrix.sum(axis=1)))


@dataclass(frozen=True)
class MixerReport:
    state: DensityMatrix
    schmidt: SchmidtDecomposition
    mixer: DensityMatrix
    bound_a: float
    mixture: DensityMatrix
    mixer_is_ppt: bool
    mixture_is_ppt: bool

    @property
    def mixture_verdict(self) -> Verdict:
        return separability_verdict(self.mixture)


@dataclass(frozen=True)
class PseudoMixture:
    """ρ = (1 + R) ρ_s - R ρ_M with ρ_s PPT."""

    rho: DensityMatrix
    rho_s: DensityMatrix
    rho_m: DensityMatrix
    robustness: float

    def reconstruct(self) -> ComplexMatrix:
        r = self.robustness
        return (1 + r) * self.rho_s.mat - r * self.rho_m.mat

    def residual(self) -> float:
        return float(np.max(np.abs(self.reconstruct() - self.rho.mat)))


def robustness_pure(coeffs: Sequence[float], tolerances: Tolerances = DEFAULT_TOLERANCES) -> RobustnessReport:
    """
    Robustness of a pure state from its Schmidt coefficients.

    R_s = R_g = (Σ ã_i)² - 1 and O_s = O_g = 1 / (1 + R_s).
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ValidationError("Schmidt coefficients must be a non-empty vector")
    if np.any(coeffs < 0):
        raise ValidationError("Schmidt coefficients must be nonnegative")
    norm_sq = float(np.sum(coeffs ** 2))
    if abs(norm_sq - 1.0) > tolerances.norm_tol:
        raise ValidationError(f"Schmidt coefficients are not normalized (Σ ã² = {norm_sq:.12f})")

    r = float(np.sum(coeffs)) ** 2 - 1.0
    r = max(r, 0.0)
    o = 1.0 / (1.0 + r)
    return RobustnessReport(R_s=r, R_g=r, O_s=o, O_g=o, schmidt_coeffs=coeffs.copy())


def robustness_of(psi: Ket, tolerances: Tolerances = DEFAULT_TOLERANCES) -> RobustnessReport:
    return robustness_pure(schmidt(psi, tolerances).coeffs, tolerances)


def g_coefficients(e, n: int) -> GCoefficients:
    """
    g_f(j,k) = |e_c(j,k)|² + |e_c(k,j)|² - 2 Re(e_c(j,j) e_c(k,k)*) for j < k.
    """
    e = np.asarray(e, dtype=np.complex128).reshape(-1)
    if e.shape[0] != n * n:
        raise ValidationError(f"vector for n={n} needs {n * n} entries, got {e.shape[0]}")

    def at(i, j):
        return e[index_c(i, j, n) - 1]

    values = np.zeros(pair_count(n), dtype=np.float64)
    for j, k in antisym_pairs(n):
        values[index_f(j, k, n) - 1] = (
            abs(at(j, k)) ** 2 + abs(at(k, j)) ** 2 - 2 * np.real(at(j, j) * np.conj(at(k, k)))
        )
    diag_sum = complex(sum(at(j, j) for j in range(1, n + 1)))
    return GCoefficients(values, diag_sum)


def g_matrix(rho_m: DensityMatrix,
             tolerances: Tolerances = DEFAULT_TOLERANCES) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Eigenvalues λ_i of ρ_M and the matrix whose column i is g^(i)."""
    eig = hermitian_eigen(rho_m.mat, tolerances.hermit_tol)
    columns = [g_coefficients(eig.eigenvectors[:, i], rho_m.n).values for i in range(len(eig.eigenvalues))]
    return np.asarray(eig.eigenvalues), np.column_stack(columns)


def _canonical_frame(sd: SchmidtDecomposition, mat: ComplexMatrix) -> ComplexMatrix:
    if sd.is_canonical():
        return np.asarray(mat)
    u_l = sd.local_frame()
    return dagger(u_l) @ np.asarray(mat) @ u_l


def _pair_forms(n: int, mixer_mat: ComplexMatrix, pairs: Sequence[Tuple[int, int]],
                tolerances: Tolerances) -> List[float]:
    """<ẽ_f(j,k)| ρ_M^pt |ẽ_f(j,k)> per pair, checked against ½ Σ λ_i g^(i)_f(j,k)."""
    mixer = DensityMatrix(n, np.array(mixer_mat, dtype=np.complex128))
    pt = partial_transpose(mixer.mat, n)
    eigenvalues, g = g_matrix(mixer, tolerances)

    forms = []
    for j, k in pairs:
        vec = antisym_vector(j, k, n).vec
        direct = float(np.real(np.vdot(vec, pt @ vec)))
        spectral = 0.5 * float(eigenvalues @ g[index_f(j, k, n) - 1])
        gap = abs(direct - spectral)
        if gap > tolerances.cross_check_tol:
            raise NumericalError(
                f"quadratic form mismatch for pair ({j}, {k}): direct {direct:.12e}, spectral {spectral:.12e}")
        if gap > 1e-10:
            logger.warning(f"quadratic form cross-check for ({j}, {k}) differs by {gap:.3e}")
        forms.append(direct)
    return forms


def quadratic_form_pt(rho_m: DensityMatrix, j: int, k: int,
                      tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    <ẽ_f(j,k)| ρ_M^pt |ẽ_f(j,k)>, computed directly and from the spectral sum.

    Raises NumericalError when the two disagree beyond cross_check_tol.
    """
    index_f(j, k, rho_m.n)
    return _pair_forms(rho_m.n, rho_m.mat, [(j, k)], tolerances)[0]


def _active_pairs(sd: SchmidtDecomposition, tolerances: Tolerances) -> List[Tuple[Tuple[int, int], float]]:
    coeffs = sd.coeffs
    return [((j, k), float(coeffs[j - 1] * coeffs[k - 1]))
            for j, k in antisym_pairs(sd.n)
            if coeffs[j - 1] * coeffs[k - 1] > tolerances.pair_tol]


def _check_same_n(sd: SchmidtDecomposition, rho_m: DensityMatrix):
    if rho_m.n != sd.n:
        raise ValidationError(f"mixer acts on n={rho_m.n}, state on n={sd.n}")


def witness_bound_a(sd: SchmidtDecomposition, rho_m: DensityMatrix,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    Largest weight a not excluded by the antisymmetric witnesses ẽ_f(j,k).

    Per pair, q = <ẽ|ρ_M^pt|ẽ> gives the bound q / (q + ã_j ã_k), or 0 when
    q <= 0. The result is the minimum over pairs, 1 for a product state.
    """
    _check_same_n(sd, rho_m)
    active = _active_pairs(sd, tolerances)
    if not active:
        return 1.0

    forms = _pair_forms(sd.n, _canonical_frame(sd, rho_m.mat), [pair for pair, _ in active], tolerances)
    bounds = [q / (q + w) if q > 0 else 0.0 for (_, w), q in zip(active, forms)]
    return float(min(bounds))


def _require_entangled(sd: SchmidtDecomposition, what: str,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[Tuple[Tuple[int, int], float]]:
    if sd.rank < 2:
        raise UnsupportedInputError(f"{what} needs Schmidt rank >= 2 (product state given)")
    active = _active_pairs(sd, tolerances)
    if not active:
        raise UnsupportedInputError(
            f"{what} needs a pair with ã_j ã_k > pair_tol = {tolerances.pair_tol:g}; coefficients {sd.coeffs}")
    return active


def evaluate_T_candidate(sd: SchmidtDecomposition, rho_m: DensityMatrix,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """min over pairs of α_j,k / (2 ã_j ã_k), with α_j,k = Σ_i λ_i g^(i)_f(j,k)."""
    _check_same_n(sd, rho_m)
    active = _require_entangled(sd, "T", tolerances)
    forms = _pair_forms(sd.n, _canonical_frame(sd, rho_m.mat), [pair for pair, _ in active], tolerances)
    return float(min(q / w for (_, w), q in zip(active, forms)))


def T_bound_check(sd: SchmidtDecomposition, rho_m: DensityMatrix,
                  tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """T <= 1/R_s (plus 1e-9)."""
    t_value = evaluate_T_candidate(sd, rho_m, tolerances)
    r_s = robustness_pure(sd.coeffs, tolerances).R_s
    holds = t_value <= 1.0 / r_s + 1e-9
    if not holds:
        logger.error(f"T = {t_value:.12f} exceeds 1/R_s = {1.0 / r_s:.12f}")
    return holds


def witness_matrix_A(sd: SchmidtDecomposition, rho_m: DensityMatrix,
                     tolerances: Tolerances = DEFAULT_TOLERANCES) -> WitnessMatrix:
    """Matrix A of the max-min problem; its smallest row sum equals T."""
    _check_same_n(sd, rho_m)
    active = _require_entangled(sd, "the witness matrix", tolerances)
    canonical = DensityMatrix(sd.n, np.array(_canonical_frame(sd, rho_m.mat), dtype=np.complex128))
    eigenvalues, g = g_matrix(canonical, tolerances)

    rows = [eigenvalues * g[index_f(j, k, sd.n) - 1] / (2 * w) for (j, k), w in active]
    return WitnessMatrix([pair for pair, _ in active], np.vstack(rows))


def _state_of(sd: SchmidtDecomposition) -> DensityMatrix:
    return ket_to_density(Ket(sd.n, sd.reconstruct()))


def build_mixer_report(sd: SchmidtDecomposition, rho_m: DensityMatrix,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> MixerReport:
    """Evaluate an arbitrary candidate mixer at its witness-bound weight."""
    _check_same_n(sd, rho_m)
    rho = _state_of(sd)
    a = witness_bound_a(sd, rho_m, tolerances)
    mixture = DensityMatrix(sd.n, a * rho.mat + (1 - a) * rho_m.mat)
    return MixerReport(
        state=rho,
        schmidt=sd,
        mixer=rho_m,
        bound_a=a,
        mixture=mixture,
        mixer_is_ppt=is_ppt(rho_m, tolerances.ppt_tol),
        mixture_is_ppt=is_ppt(mixture, tolerances.ppt_tol),
    )


def gershgorin_mixer(sd: SchmidtDecomposition, tolerances: Tolerances = DEFAULT_TOLERANCES) -> MixerReport:
    """
    Optimal mixer built from diagonal dominance.

    With a = O_g and G = -aρ/(1-a) = -ρ/R_s in the canonical frame, G2 is G
    with its diagonal replaced by minus the off-diagonal row sums. R_s is evaluated
    as 2 Σ_{j<k} ã_j ã_k. G2 is positive semidefinite with unit trace, and
    aρ + (1-a)G2 is diagonal, hence separable.
    """
    _require_entangled(sd, "the Gershgorin mixer", tolerances)
    n = sd.n
    optimum = robustness_pure(sd.coeffs, tolerances).O_g
    r_s = 2.0 * float(np.sum(np.triu(np.outer(sd.coeffs, sd.coeffs), 1)))
    a = 1.0 / (1.0 + r_s)
    if abs(a - optimum) > OPTIMUM_TOL + 4 * tolerances.norm_tol:
        raise NumericalError(f"pair sum gives a = {a:.12f}, closed form gives {optimum:.12f}")

    rho_c = sd.canonical_density().mat
    g = -rho_c / r_s
    g2 = g - np.diag(np.diag(g))
    np.fill_diagonal(g2, -g2.sum(axis=1))

    mixture_c = a * rho_c + (r_s / (1.0 + r_s)) * g2
    off_diag = float(np.max(np.abs(mixture_c - np.diag(np.diag(mixture_c)))))
    if off_diag > 1e-12:
        raise NumericalError(f"Gershgorin mixture is not diagonal (off-diagonal {off_diag:.3e})")
    diag = np.real(np.diag(mixture_c))
    if abs(diag.sum() - 1.0) > tolerances.trace_tol or diag.min() < -tolerances.psd_tol:
        raise NumericalError(f"Gershgorin mixture diagonal {diag} is not a probability vector")

    mixer_mat = g2 if sd.is_canonical() else local_unitary(g2, sd.basis_a, sd.basis_b)
    try:
        mixer = validate_density(mixer_mat, n, tolerances)
    except ValidationError as e:
        raise NumericalError(f"Gershgorin mixer is not a density matrix: {e}")

    report = build_mixer_report(sd, mixer, tolerances)
    if abs(report.bound_a - a) > OPTIMUM_TOL:
        raise NumericalError(f"Gershgorin mixer reaches a = {report.bound_a:.12f}, optimum is {a:.12f}")
    if not report.mixture_is_ppt:
        raise NumericalError("Gershgorin mixture is not PPT")

    logger.debug(f"Gershgorin mixer for coefficients {sd.coeffs}: a = {a:.12f}, mixer PPT = {report.mixer_is_ppt}")
    return report


def _same_state(first: DensityMatrix, second: DensityMatrix) -> bool:
    return first.n == second.n and float(np.max(np.abs(first.mat - second.mat))) <= OPTIMUM_TOL


def pseudo_mixture(sd: SchmidtDecomposition, mixer: MixerReport,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> PseudoMixture:
    """
    Decompose ρ = (1 + R) ρ_s - R ρ_M from an optimal mixer.

    ρ_s is the mixer report's mixture and R = 1/bound_a - 1.
    """
    rho = _state_of(sd)
    if not _same_state(rho, mixer.state):
        raise MixerError("mixer report belongs to a different state")

    optimum = robustness_pure(sd.coeffs, tolerances).O_g
    if abs(mixer.bound_a - optimum) > OPTIMUM_TOL + 4 * tolerances.norm_tol:
        raise MixerError(f"mixer is suboptimal: bound_a {mixer.bound_a:.12f} < O_g {optimum:.12f}")

    decomposition = PseudoMixture(rho, mixer.mixture, mixer.mixer, 1.0 / mixer.bound_a - 1.0)
    residual = decomposition.residual()
    if residual > OPTIMUM_TOL:
        raise NumericalError(f"pseudo-mixture does not reproduce the state (residual {residual:.3e})")
    if not is_ppt(decomposition.rho_s, tolerances.ppt_tol):
        raise NumericalError("separable part of the pseudo-mixture is not PPT")
    return decomposition


def optimal_pseudo_mixture(psi: Ket, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PseudoMixture:
    """Pseudo-mixture with the Gershgorin mixer; a product state gets R = 0."""
    sd = schmidt(psi, tolerances)
    if sd.rank < 2:
        report = build_mixer_report(sd, maximally_mixed(sd.n), tolerances)
    else:
        report = gershgorin_mixer(sd, tolerances)
    return pseudo_mixture(sd, report, tolerances)


def convex_pseudo_mixture(first: PseudoMixture, second: PseudoMixture, p: float) -> PseudoMixture:
    """
    Decomposition of pρ1 + (1-p)ρ2 with R = pR1 + (1-p)R2.

    This is the certificate that robustness is convex: the combined ρ_s is a
    mixture of PPT states and the combined mixer is
    (pR1 ρ_M1 + (1-p)R2 ρ_M2) / R.
    """
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"mixing probability must be in [0, 1], got {p}")
    if first.rho.n != second.rho.n:
        raise ValidationError("pseudo-mixtures act on different local dimensions")

    n = first.rho.n
    r1, r2 = first.robustness, second.robustness
    t = p * r1 + (1 - p) * r2

    rho = p * first.rho.mat + (1 - p) * second.rho.mat
    rho_s = (p * (1 + r1) * first.rho_s.mat + (1 - p) * (1 + r2) * second.rho_s.mat) / (1 + t)
    if t > 0:
        rho_m = (p * r1 * first.rho_m.mat + (1 - p) * r2 * second.rho_m.mat) / t
    else:
        rho_m = first.rho_m.mat
    return PseudoMixture(DensityMatrix(n, rho), DensityMatrix(n, rho_s), DensityMatrix(n, np.array(rho_m)), t)


def transport_pseudo_mixture(decomposition: PseudoMixture, u1, u2) -> PseudoMixture:
    """Move a decomposition through U_L = U1 ⊗ U2; R is unchanged."""
    n = decomposition.rho.n

    def move(state: DensityMatrix) -> DensityMatrix:
        return DensityMatrix(n, local_unitary(state.mat, u1, u2))

    return PseudoMixture(move(decomposition.rho), move(decomposition.rho_s), move(decomposition.rho_m),
                         decomposition.robustness)


def combine_mixers(m1: MixerReport, m2: MixerReport, t: float,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> MixerReport:
    """Convex combination t·m1 + (1-t)·m2 of two optimal mixers of the same state."""
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"combination weight must be in [0, 1], got {t}")
    if not _same_state(m1.state, m2.state):
        raise MixerError("mixers belong to different states")
    if abs(m1.bound_a - m2.bound_a) > OPTIMUM_TOL:
        raise MixerError(f"mixers are not equally optimal: {m1.bound_a:.12f} vs {m2.bound_a:.12f}")

    mixer = DensityMatrix(m1.mixer.n, t * m1.mixer.mat + (1 - t) * m2.mixer.mat)
    report = build_mixer_report(m1.schmidt, mixer, tolerances)
    if abs(report.bound_a - m1.bound_a) > 1e-9:
        raise NumericalError(f"combined mixer reaches {report.bound_a:.12f}, expected {m1.bound_a:.12f}")
    if not report.mixture_is_ppt:
        raise MixerError("combined mixture is not PPT")
    return report


@dataclass(frozen=True)
class ConvexityResult:
    estimate: float
    bound: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.estimate <= self.bound + self.slack


def convexity_estimate(psi1: Ket, psi2: Ket, p: float, config=None, slack: float = 0.02,
                       tolerances: Tolerances = DEFAULT_TOLERANCES, seeded: bool = True) -> ConvexityResult:
    """
    Search-based estimate of R_g(pρ1 + (1-p)ρ2) against pR_g(ρ1) + (1-p)R_g(ρ2).

    Two qubits only, where PPT is exact. With seeded=True the search also starts
    from the mixer of the convex pseudo-mixture; otherwise it starts from I/4 only.
    """
    from .oracle_search import estimate_O_g

    if psi1.n != 2 or psi2.n != 2:
        raise UnsupportedInputError("convexity check runs on two qubits only")
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"mixing probability must be in [0, 1], got {p}")

    first = optimal_pseudo_mixture(psi1, tolerances)
    second = optimal_pseudo_mixture(psi2, tolerances)
    combined = convex_pseudo_mixture(first, second, p)

    seeds = [combined.rho_m] if seeded else []
    result = estimate_O_g(combined.rho, config, seeds=seeds, tolerances=tolerances)
    estimate = 1.0 / result.best_a - 1.0 if result.best_a > 0 else float('inf')
    bound = p * first.robustness + (1 - p) * second.robustness
    logger.debug(f"convexity p={p:.4f}: estimate {estimate:.6f}, bound {bound:.6f}")
    return ConvexityResult(estimate, bound, slack)


def convexity_check(psi1: Ket, psi2: Ket, p: float, config=None, slack: float = 0.02,
                    tolerances: Tolerances = DEFAULT_TOLERANCES, seeded: bool = True) -> bool:
    return convexity_estimate(psi1, psi2, p, config, slack, tolerances, seeded).passed
