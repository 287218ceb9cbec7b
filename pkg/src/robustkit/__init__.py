"""Robustness of entanglement for bipartite pure states."""

from .errors import (
    MixerError,
    NumericalError,
    RobustkitError,
    StateFileError,
    UnsupportedInputError,
    ValidationError,
)
from .config import DEFAULT_TOLERANCES, Tolerances, load_tolerances
from .states import (
    DensityMatrix,
    Ket,
    SchmidtDecomposition,
    canonical_ket,
    random_density,
    random_pure,
    schmidt,
    validate_density,
    validate_ket,
)
from .ppt import Verdict, is_ppt, negativity, partial_transpose
from .robustness import gershgorin_mixer, robustness_of, robustness_pure, witness_bound_a
from .oracle_search import SearchConfig, estimate_O_g, max_a_for_mixer, verify_main_theorem

__version__ = '0.1.0'
