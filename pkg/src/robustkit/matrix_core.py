"""
Dense complex matrix helpers for bipartite n x n systems.

The public index maps are 1-based so that c(i, j) = n(i-1) + j and
f(i, j) = (j-i) + n(i-1) - i(i-1)/2 keep their usual mathematical form. Storage
is ordinary 0-based numpy.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .config import DEFAULT_TOLERANCES
from .errors import NumericalError, ValidationError

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]


def as_matrix(data, max_entries: int = DEFAULT_TOLERANCES.max_entries) -> ComplexMatrix:
    """Coerce to a finite 2-D complex128 array. 1-D input becomes a column."""
    try:
        mat = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"not a numeric matrix: {e}")

    if mat.ndim == 1:
        mat = mat.reshape(-1, 1)
    if mat.ndim != 2 or mat.size == 0:
        raise ValidationError(f"expected a non-empty 2-D matrix, got shape {mat.shape}")
    if mat.size > max_entries:
        raise ValidationError(f"matrix has {mat.size} entries, limit is {max_entries}")
    if not np.all(np.isfinite(mat)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return mat


def dagger(mat: ComplexMatrix) -> ComplexMatrix:
    return mat.conj().T


def is_square(mat: ComplexMatrix) -> bool:
    return mat.ndim == 2 and mat.shape[0] == mat.shape[1]


def hermitian_deviation(mat: ComplexMatrix) -> float:
    return float(np.max(np.abs(mat - dagger(mat))))


def tensor(a, b, max_entries: int = DEFAULT_TOLERANCES.max_entries) -> ComplexMatrix:
    """
    Kronecker product A ⊗ B; block (i, j) of the result is A[i, j] * B.

    Vectors are treated as columns, so the product of two kets is a column.
    """
    a = as_matrix(a, max_entries)
    b = as_matrix(b, max_entries)

    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > max_entries:
        raise ValidationError(f"tensor product would have {rows}x{cols} entries, limit is {max_entries}")
    return np.kron(a, b)


def basis_vector(i: int, n: int) -> ComplexMatrix:
    """Natural basis ket |i> of C^n as a column, 1-based."""
    if not 1 <= i <= n:
        raise ValidationError(f"basis index {i} out of range 1..{n}")
    vec = np.zeros((n, 1), dtype=np.complex128)
    vec[i - 1, 0] = 1.0
    return vec


def index_c(i: int, j: int, n: int) -> int:
    """Position of |i>⊗|j> in the product basis: n(i-1) + j."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValidationError(f"index pair ({i}, {j}) out of range for n={n}")
    return n * (i - 1) + j


def index_c_inverse(m: int, n: int) -> Tuple[int, int]:
    if not 1 <= m <= n * n:
        raise ValidationError(f"linear index {m} out of range 1..{n * n}")
    i, j = divmod(m - 1, n)
    return i + 1, j + 1


def index_f(i: int, j: int, n: int) -> int:
    """Position of the pair (i, j), i < j, in the antisymmetric-pair enumeration."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValidationError(f"index pair ({i}, {j}) out of range for n={n}")
    if i >= j:
        raise ValidationError(f"index_f needs i < j, got ({i}, {j})")
    return (j - i) + n * (i - 1) - i * (i - 1) // 2


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def antisym_pairs(n: int) -> Iterator[Tuple[int, int]]:
    """All pairs (i, j), i < j, in increasing f(i, j) order."""
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            yield i, j


def index_f_inverse(m: int, n: int) -> Tuple[int, int]:
    if not 1 <= m <= pair_count(n):
        raise ValidationError(f"pair index {m} out of range 1..{pair_count(n)}")
    for offset, pair in enumerate(antisym_pairs(n), start=1):
        if offset == m:
            return pair
    raise AssertionError("unreachable")


def local_dimension(mat: ComplexMatrix) -> int:
    """n such that the matrix acts on C^n ⊗ C^n."""
    size = mat.shape[0]
    n = int(round(np.sqrt(size)))
    if n * n != size:
        raise ValidationError(f"dimension {size} is not a perfect square")
    return n


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues ascending; column i of eigenvectors pairs with eigenvalue i."""

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: ComplexMatrix

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def pairs(self) -> List[Tuple[float, ComplexMatrix]]:
        return [(float(val), self.eigenvectors[:, i]) for i, val in enumerate(self.eigenvalues)]

    def reconstruct(self) -> ComplexMatrix:
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ dagger(vecs)


def symmetrize(mat, hermit_tol: float = DEFAULT_TOLERANCES.hermit_tol) -> ComplexMatrix:
    """Return (M + M†)/2, refusing input further than hermit_tol from Hermitian."""
    mat = as_matrix(mat)
    if not is_square(mat):
        raise ValidationError(f"expected a square matrix, got shape {mat.shape}")

    deviation = hermitian_deviation(mat)
    if deviation > hermit_tol:
        raise ValidationError(f"matrix is not Hermitian (max |M - M†| = {deviation:.3e})")
    return (mat + dagger(mat)) / 2


def hermitian_eigen(mat, hermit_tol: float = DEFAULT_TOLERANCES.hermit_tol) -> EigenSystem:
    """Full orthonormal eigensystem of a Hermitian matrix, eigenvalues ascending."""
    herm = symmetrize(mat, hermit_tol)
    try:
        values, vectors = scipy.linalg.eigh(herm)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise NumericalError(f"Hermitian eigensolver did not converge: {e}")
    return EigenSystem(np.asarray(values, dtype=np.float64), np.asarray(vectors, dtype=np.complex128))


def hermitian_eigenvalues(mat, hermit_tol: float = DEFAULT_TOLERANCES.hermit_tol) -> npt.NDArray[np.float64]:
    herm = symmetrize(mat, hermit_tol)
    try:
        return scipy.linalg.eigvalsh(herm)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise NumericalError(f"Hermitian eigensolver did not converge: {e}")


def is_psd(mat, tol: float = 0.0, hermit_tol: float = DEFAULT_TOLERANCES.hermit_tol) -> bool:
    """True iff the smallest eigenvalue is at least -tol."""
    if tol < 0:
        raise ValidationError("tol must be non-negative")
    return bool(hermitian_eigenvalues(mat, hermit_tol)[0] >= -tol)
