"""
Validated bipartite states on C^n ⊗ C^n, Schmidt decomposition and seeded
random ensembles.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.stats import unitary_group

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NumericalError, UnsupportedInputError, ValidationError
from .matrix_core import (
    ComplexMatrix,
    as_matrix,
    dagger,
    hermitian_deviation,
    hermitian_eigen,
    index_c,
    local_dimension,
)

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator]


@dataclass(frozen=True)
class Ket:
    n: int
    amplitudes: npt.NDArray[np.complex128]

    def __post_init__(self):
        if self.amplitudes.shape != (self.n * self.n,):
            raise ValidationError(f"ket for n={self.n} needs {self.n * self.n} amplitudes, got {self.amplitudes.shape}")
        self.amplitudes.setflags(write=False)


@dataclass(frozen=True)
class DensityMatrix:
    n: int
    mat: ComplexMatrix

    def __post_init__(self):
        size = self.n * self.n
        if self.mat.shape != (size, size):
            raise ValidationError(f"density matrix for n={self.n} must be {size}x{size}, got {self.mat.shape}")
        self.mat.setflags(write=False)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """psi = Σ coeffs[k] · basis_a[:, k] ⊗ basis_b[:, k], coeffs descending."""

    coeffs: npt.NDArray[np.float64]
    basis_a: ComplexMatrix
    basis_b: ComplexMatrix
    rank: int

    def __post_init__(self):
        for arr in (self.coeffs, self.basis_a, self.basis_b):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def reconstruct(self) -> npt.NDArray[np.complex128]:
        psi = np.zeros(self.n * self.n, dtype=np.complex128)
        for k, coeff in enumerate(self.coeffs):
            psi += coeff * np.kron(self.basis_a[:, k], self.basis_b[:, k])
        return psi

    def local_frame(self) -> ComplexMatrix:
        """U_L = basis_a ⊗ basis_b; maps the canonical form onto psi."""
        return np.kron(self.basis_a, self.basis_b)

    def is_canonical(self, tol: float = 1e-9) -> bool:
        """True when psi is already Σ ã_i |i>|i> in the natural basis."""
        n = self.n
        for k, coeff in enumerate(self.coeffs):
            if coeff == 0.0:
                continue
            target = np.zeros(n * n)
            target[index_c(k + 1, k + 1, n) - 1] = 1.0
            if np.max(np.abs(np.kron(self.basis_a[:, k], self.basis_b[:, k]) - target)) > tol:
                return False
        return True

    def canonical_density(self) -> DensityMatrix:
        return ket_to_density(canonical_ket(self.coeffs))


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_local_dim(n: int, tolerances: Tolerances):
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValidationError(f"local dimension must be an integer of at least 2, got {n!r}")
    if n > tolerances.max_local_dim:
        raise ValidationError(f"local dimension {n} exceeds the supported maximum {tolerances.max_local_dim}")


def validate_ket(amplitudes, n: Optional[int] = None, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Ket:
    vec = as_matrix(amplitudes, tolerances.max_entries)
    if vec.shape[1] != 1:
        raise ValidationError(f"ket must be a vector, got shape {vec.shape}")
    vec = vec[:, 0]

    if n is None:
        n = local_dimension(vec)
    _check_local_dim(n, tolerances)
    if vec.shape[0] != n * n:
        raise ValidationError(f"ket for n={n} needs {n * n} amplitudes, got {vec.shape[0]}")

    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > tolerances.norm_tol:
        raise ValidationError(f"ket is not normalized (norm {norm:.12f})")
    return Ket(int(n), vec.copy())


def validate_density(mat, n: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
    """
    Check that mat is a density matrix on C^n ⊗ C^n.

    Args:
        mat: Candidate matrix of size n² x n².
        n: Local dimension.
        tolerances: Hermiticity, trace and positivity tolerances.

    Returns:
        DensityMatrix holding the symmetrized matrix.
    """
    _check_local_dim(n, tolerances)
    mat = as_matrix(mat, tolerances.max_entries)
    size = n * n
    if mat.shape != (size, size):
        raise ValidationError(f"density matrix for n={n} must be {size}x{size}, got {mat.shape}")

    deviation = hermitian_deviation(mat)
    if deviation > tolerances.hermit_tol:
        raise ValidationError(f"density matrix is not Hermitian (max |M - M†| = {deviation:.3e})")
    herm = (mat + dagger(mat)) / 2

    trace = np.trace(herm).real
    if abs(trace - 1.0) > tolerances.trace_tol:
        raise ValidationError(f"density matrix trace is {trace:.12f}, expected 1")

    min_eig = hermitian_eigen(herm, tolerances.hermit_tol).min_eigenvalue
    if min_eig < -tolerances.psd_tol:
        raise ValidationError(f"density matrix has negative eigenvalue {min_eig:.3e}")
    return DensityMatrix(n, herm)


def ket_to_density(psi: Ket) -> DensityMatrix:
    vec = np.asarray(psi.amplitudes)
    return DensityMatrix(psi.n, np.outer(vec, vec.conj()))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.mat @ rho.mat)))


def density_to_ket(rho: DensityMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Ket:
    """Recover psi from a rank-1 density matrix; mixed states are unsupported."""
    eig = hermitian_eigen(rho.mat, tolerances.hermit_tol)
    if abs(purity(rho) - 1.0) > 1e3 * tolerances.trace_tol or eig.eigenvalues[-2] > tolerances.psd_tol:
        raise UnsupportedInputError("state is mixed (rank > 1)")

    vec = eig.eigenvectors[:, -1].copy()
    pivot = vec[np.argmax(np.abs(vec))]
    vec *= np.conj(pivot) / abs(pivot)
    return Ket(rho.n, vec / np.linalg.norm(vec))


def canonical_ket(coeffs: Sequence[float]) -> Ket:
    """Σ ã_i |i>⊗|i> in the natural basis."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    n = len(coeffs)
    amps = np.zeros(n * n, dtype=np.complex128)
    for i, coeff in enumerate(coeffs, start=1):
        amps[index_c(i, i, n) - 1] = coeff
    return Ket(n, amps)


def _lex_key(column: npt.NDArray[np.complex128]) -> Tuple[float, ...]:
    return tuple(np.round(np.abs(column), 12))


def _order_columns(values: npt.NDArray[np.float64], basis_a: ComplexMatrix, tie_tol: float) -> list:
    """Descending by value; runs of equal values ordered by |basis_a column|, lexicographically descending."""
    order = sorted(range(len(values)), key=lambda k: -values[k])
    result = []
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and values[order[start]] - values[order[stop]] <= tie_tol:
            stop += 1
        run = sorted(order[start:stop], key=lambda k: _lex_key(basis_a[:, k]), reverse=True)
        result.extend(run)
        start = stop
    return result


def schmidt(psi: Ket, tolerances: Tolerances = DEFAULT_TOLERANCES) -> SchmidtDecomposition:
    """
    Schmidt decomposition from the SVD of the coefficient matrix C[i, j] = psi[c(i, j)].

    Coefficients below schmidt_zero are clamped to 0 and excluded from the rank.
    """
    n = psi.n
    coeff_mat = np.asarray(psi.amplitudes).reshape(n, n)
    off_diag = coeff_mat - np.diag(np.diag(coeff_mat))

    if np.max(np.abs(off_diag)) <= tolerances.schmidt_zero:
        # already diagonal: read coefficients and phases directly
        diag = np.diag(coeff_mat)
        values = np.abs(diag)
        phases = np.where(values > 0, diag / np.where(values > 0, values, 1.0), 1.0)
        basis_a = np.diag(phases).astype(np.complex128)
        basis_b = np.eye(n, dtype=np.complex128)
    else:
        try:
            u, values, vh = scipy.linalg.svd(coeff_mat)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            raise NumericalError(f"SVD did not converge: {e}")
        basis_a = u
        basis_b = vh.T

    order = _order_columns(values, basis_a, tolerances.schmidt_zero)
    coeffs = np.array(values[order], dtype=np.float64)
    basis_a = np.array(basis_a[:, order], dtype=np.complex128)
    basis_b = np.array(basis_b[:, order], dtype=np.complex128)

    coeffs[coeffs < tolerances.schmidt_zero] = 0.0
    rank = int(np.count_nonzero(coeffs))
    logger.debug(f"Schmidt coefficients {coeffs} (rank {rank})")
    return SchmidtDecomposition(coeffs, basis_a, basis_b, rank)


def canonicalize(psi: Ket, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Ket:
    """Natural-basis form Σ ã_i |i>|i> with the same Schmidt coefficients."""
    return canonical_ket(schmidt(psi, tolerances).coeffs)


def canonical_local_unitaries(sd: SchmidtDecomposition) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """(U1, U2) with (U1 ⊗ U2) psi equal to the canonical form."""
    return dagger(sd.basis_a), dagger(sd.basis_b)


def local_unitary(mat, u1, u2) -> ComplexMatrix:
    """U_L M U_L† with U_L = U1 ⊗ U2."""
    u_l = np.kron(np.asarray(u1, dtype=np.complex128), np.asarray(u2, dtype=np.complex128))
    return u_l @ np.asarray(mat, dtype=np.complex128) @ dagger(u_l)


def apply_local_unitary(psi: Ket, u1, u2) -> Ket:
    u_l = np.kron(np.asarray(u1, dtype=np.complex128), np.asarray(u2, dtype=np.complex128))
    return Ket(psi.n, u_l @ np.asarray(psi.amplitudes))


def random_pure(n: int, seed: Seed, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Ket:
    """Haar-random ket: a normalized complex Gaussian vector."""
    _check_local_dim(n, tolerances)
    rng = _rng(seed)
    vec = rng.standard_normal(n * n) + 1j * rng.standard_normal(n * n)
    return Ket(n, vec / np.linalg.norm(vec))


def random_density(n: int, seed: Seed, rank: Optional[int] = None,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> DensityMatrix:
    """
    Ginibre-ensemble density matrix G G† / tr(G G†).

    G is N x rank complex Gaussian (N = n²); rank defaults to N, the square
    Ginibre ensemble. Smaller ranks give the induced measure.
    """
    _check_local_dim(n, tolerances)
    size = n * n
    rank = size if rank is None else rank
    if not 1 <= rank <= size:
        raise ValidationError(f"rank must be in 1..{size}, got {rank}")

    rng = _rng(seed)
    g = rng.standard_normal((size, rank)) + 1j * rng.standard_normal((size, rank))
    mat = g @ dagger(g)
    mat = mat / np.trace(mat).real
    return DensityMatrix(n, (mat + dagger(mat)) / 2)


def random_local_unitary(n: int, seed: Seed) -> ComplexMatrix:
    """Haar-random n x n unitary."""
    return np.asarray(unitary_group.rvs(n, random_state=_rng(seed)), dtype=np.complex128).reshape(n, n)


def maximally_mixed(n: int) -> DensityMatrix:
    size = n * n
    return DensityMatrix(n, np.eye(size, dtype=np.complex128) / size)
