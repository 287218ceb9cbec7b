"""
JSON state files and deterministic report serialization.

A state file is {"kind": "ket" | "density", "n": n, "data": ...} where every
complex number is a [re, im] pair. Reports are written with sorted keys and
floats at 17 significant digits, so identical inputs give identical bytes.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import StateFileError, ValidationError
from .states import DensityMatrix, Ket, validate_density, validate_ket

logger = logging.getLogger(__name__)

KINDS = ('ket', 'density')

State = Union[Ket, DensityMatrix]


@dataclass(frozen=True)
class StateFile:
    kind: str
    n: int
    state: State


def complex_pairs(values) -> Any:
    """Nested [re, im] lists for a complex scalar, vector or matrix."""
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_pairs(item) for item in arr]


def _from_pairs(data, depth: int, source: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError):
        raise StateFileError(f"{source}: 'data' must hold numeric [re, im] pairs")
    if arr.ndim != depth + 1 or arr.shape[-1] != 2:
        raise StateFileError(f"{source}: 'data' has shape {arr.shape}, expected {depth}-D array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(state: State) -> dict:
    if isinstance(state, Ket):
        return {'kind': 'ket', 'n': state.n, 'data': complex_pairs(state.amplitudes)}
    return {'kind': 'density', 'n': state.n, 'data': complex_pairs(state.mat)}


def state_from_dict(raw: Any, source: str = '<memory>',
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> StateFile:
    if not isinstance(raw, dict):
        raise StateFileError(f"{source}: state file must be a JSON object")
    missing = [key for key in ('kind', 'n', 'data') if key not in raw]
    if missing:
        raise StateFileError(f"{source}: missing field(s) {', '.join(missing)}")

    kind, n = raw['kind'], raw['n']
    if kind not in KINDS:
        raise StateFileError(f"{source}: kind must be one of {KINDS}, got {kind!r}")
    if isinstance(n, bool) or not isinstance(n, int):
        raise StateFileError(f"{source}: n must be an integer, got {n!r}")

    try:
        if kind == 'ket':
            state = validate_ket(_from_pairs(raw['data'], 1, source), n, tolerances)
        else:
            state = validate_density(_from_pairs(raw['data'], 2, source), n, tolerances)
    except StateFileError:
        raise
    except ValidationError as e:
        raise StateFileError(f"{source}: {e}")
    return StateFile(kind, n, state)


def read_state(path: Union[str, Path], tolerances: Tolerances = DEFAULT_TOLERANCES) -> StateFile:
    path = Path(path)
    try:
        with open(path, 'r') as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise StateFileError(f"state file not found: {path}")
    except OSError as e:
        raise StateFileError(f"cannot read state file {path}: {e}")
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise StateFileError(f"{path}: invalid JSON ({e})")

    state_file = state_from_dict(raw, str(path), tolerances)
    logger.debug(f"Read {state_file.kind} state (n={state_file.n}) from {path}")
    return state_file


def write_state(path: Union[str, Path], state: State) -> Path:
    path = Path(path)
    text = canonical_json(state_to_dict(state)) + '\n'
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as f:
            f.write(text)
    except OSError as e:
        raise StateFileError(f"cannot write state file {path}: {e}")
    logger.info(f"Wrote {path}")
    return path


def _encode(value: Any) -> str:
    if isinstance(value, dict):
        items = sorted((str(key), item) for key, item in value.items())
        return '{' + ', '.join(f"{json.dumps(key)}: {_encode(item)}" for key, item in items) + '}'
    if isinstance(value, (list, tuple)):
        return '[' + ', '.join(_encode(item) for item in value) + ']'
    if isinstance(value, np.ndarray):
        return _encode(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if value is None:
        return 'null'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ValidationError(f"cannot serialize non-finite value {value}")
        text = format(value, '.17g')
        if '.' not in text and 'e' not in text:
            text += '.0'
        return text
    if isinstance(value, str):
        return json.dumps(value)
    raise ValidationError(f"cannot serialize {type(value).__name__}")


def canonical_json(value: Any) -> str:
    """JSON with sorted keys and 17-significant-digit floats."""
    return _encode(value)


def file_digest(path: Union[str, Path]) -> str:
    """sha256 of the raw file bytes."""
    with open(path, 'rb') as f:
        return hashlib.sha256(f.read()).hexdigest()
