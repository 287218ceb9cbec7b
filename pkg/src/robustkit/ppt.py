"""
Partial transpose on the second subsystem, the PPT test, and the closed-form
negative eigenpairs of the partial transpose of a pure state.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import UnsupportedInputError, ValidationError
from .matrix_core import (
    ComplexMatrix,
    EigenSystem,
    antisym_pairs,
    as_matrix,
    hermitian_eigen,
    hermitian_eigenvalues,
    index_c,
)
from .states import DensityMatrix, SchmidtDecomposition, density_to_ket, schmidt

logger = logging.getLogger(__name__)


class Verdict(Enum):
    SEPARABLE = "separable"
    PPT = "ppt"
    ENTANGLED = "entangled"


@dataclass(frozen=True)
class AntisymVector:
    """(|r>|s> - |s>|r>)/√2 for 1-based r < s."""

    r: int
    s: int
    vec: npt.NDArray[np.complex128]


@dataclass(frozen=True)
class NegativeEigenvalue:
    value: float
    pair: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class PTSpectrum:
    full: EigenSystem
    negatives: List[NegativeEigenvalue] = field(default_factory=list)


def partial_transpose(mat, n: int) -> ComplexMatrix:
    """
    Transpose the second factor: |r><t| ⊗ |s><u|  ->  |r><t| ⊗ |u><s|.

    Entry [c(r,u), c(t,s)] of the result is entry [c(r,s), c(t,u)] of mat.
    """
    mat = as_matrix(mat)
    size = n * n
    if mat.shape != (size, size):
        raise ValidationError(f"partial transpose for n={n} needs a {size}x{size} matrix, got {mat.shape}")
    return mat.reshape(n, n, n, n).transpose(0, 3, 2, 1).reshape(size, size)


def antisym_vector(r: int, s: int, n: int) -> AntisymVector:
    if not r < s:
        raise ValidationError(f"antisymmetric vector needs r < s, got ({r}, {s})")
    vec = np.zeros(n * n, dtype=np.complex128)
    vec[index_c(r, s, n) - 1] = 1 / np.sqrt(2)
    vec[index_c(s, r, n) - 1] = -1 / np.sqrt(2)
    return AntisymVector(r, s, vec)


def min_pt_eigenvalue(mat, n: int, hermit_tol: float = DEFAULT_TOLERANCES.hermit_tol) -> float:
    return float(hermitian_eigenvalues(partial_transpose(mat, n), hermit_tol)[0])


def is_ppt(rho: DensityMatrix, tol: float = DEFAULT_TOLERANCES.ppt_tol) -> bool:
    """True iff the partial transpose has no eigenvalue below -tol."""
    return min_pt_eigenvalue(rho.mat, rho.n) >= -tol


def separability_verdict(rho: DensityMatrix, tol: float = DEFAULT_TOLERANCES.ppt_tol) -> Verdict:
    """PPT means separable only for two qubits; for n >= 3 it stays a PPT verdict."""
    if not is_ppt(rho, tol):
        return Verdict.ENTANGLED
    return Verdict.SEPARABLE if rho.n == 2 else Verdict.PPT


def negativity(rho: DensityMatrix) -> float:
    """Sum of |λ| over the negative eigenvalues of the partial transpose."""
    values = hermitian_eigenvalues(partial_transpose(rho.mat, rho.n))
    return float(np.sum(np.maximum(0.0, -values)))


def pure_pt_eigenpairs(sd: SchmidtDecomposition,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[Tuple[float, AntisymVector]]:
    """
    Negative eigenpairs of the partial transpose of a canonical pure state.

    Returns (-ã_r ã_s, ẽ_f(r,s)) for every r < s with ã_r ã_s above pair_tol,
    in increasing f(r, s) order.
    """
    if not sd.is_canonical():
        raise ValidationError("pure_pt_eigenpairs needs a state in canonical (natural-basis) Schmidt form")

    coeffs = sd.coeffs
    pairs = []
    for r, s in antisym_pairs(sd.n):
        weight = coeffs[r - 1] * coeffs[s - 1]
        if weight > tolerances.pair_tol:
            pairs.append((-float(weight), antisym_vector(r, s, sd.n)))
    return pairs


def _pure_canonical_schmidt(rho: DensityMatrix, tolerances: Tolerances) -> Optional[SchmidtDecomposition]:
    try:
        sd = schmidt(density_to_ket(rho, tolerances), tolerances)
    except UnsupportedInputError:
        return None
    return sd if sd.is_canonical() else None


def pt_spectrum(rho: DensityMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PTSpectrum:
    """Spectrum of rho^pt with the negative part isolated.

    For canonical pure states each negative eigenvalue is labelled with its
    (r, s) pair by matching against the closed-form values.
    """
    full = hermitian_eigen(partial_transpose(rho.mat, rho.n), tolerances.hermit_tol)
    values = [float(v) for v in full.eigenvalues if v < -tolerances.ppt_tol]

    labels: List[Optional[Tuple[int, int]]] = [None] * len(values)
    sd = _pure_canonical_schmidt(rho, tolerances)
    if sd is not None:
        predicted = sorted(pure_pt_eigenpairs(sd, tolerances), key=lambda item: item[0])
        if len(predicted) == len(values):
            labels = [(vec.r, vec.s) for _, vec in predicted]
        else:
            logger.warning(f"found {len(values)} negative PT eigenvalues, closed form predicts {len(predicted)}")

    return PTSpectrum(full, [NegativeEigenvalue(v, pair) for v, pair in zip(values, labels)])
