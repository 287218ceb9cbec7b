"""
Tolerance configuration.

Defaults can be overridden by the ROBUSTKIT_TOL environment variable (read
after loading a .env file) and by an explicit --tol-file. Both hold a JSON
object whose keys are field names of Tolerances.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from .errors import ValidationError

logger = logging.getLogger(__name__)

TOL_ENV_VAR = 'ROBUSTKIT_TOL'


@dataclass(frozen=True)
class Tolerances:
    hermit_tol: float = 1e-10
    trace_tol: float = 1e-10
    norm_tol: float = 1e-10
    psd_tol: float = 1e-9
    ppt_tol: float = 1e-9
    schmidt_zero: float = 1e-12
    pair_tol: float = 1e-9
    cross_check_tol: float = 1e-8
    max_local_dim: int = 8
    max_entries: int = 4096

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()

_INT_FIELDS = {'max_local_dim', 'max_entries'}


def _parse_overrides(raw: Any, source: str) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        raise ValidationError(f"{source}: tolerance overrides must be a JSON object")

    known = {f.name for f in fields(Tolerances)}
    overrides = {}
    for key, value in raw.items():
        if key not in known:
            raise ValidationError(f"{source}: unknown tolerance '{key}'")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ValidationError(f"{source}: '{key}' must be a positive number")
        if key in _INT_FIELDS:
            if int(value) != value:
                raise ValidationError(f"{source}: '{key}' must be an integer")
            value = int(value)
        else:
            value = float(value)
        overrides[key] = value
    return overrides


def _read_json_file(path: Path, source: str) -> Any:
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"{source}: file not found: {path}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"{source}: invalid JSON ({e})")


def _env_overrides() -> Dict[str, Any]:
    value = os.getenv(TOL_ENV_VAR)
    if not value:
        return {}

    candidate = Path(value)
    if candidate.is_file():
        raw = _read_json_file(candidate, TOL_ENV_VAR)
    else:
        try:
            raw = json.loads(value)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{TOL_ENV_VAR}: neither a file nor valid JSON ({e})")
    return _parse_overrides(raw, TOL_ENV_VAR)


def load_tolerances(tol_file: Optional[str] = None) -> Tolerances:
    """
    Build the effective tolerances.

    Args:
        tol_file: Optional path to a JSON object of overrides; applied last.

    Returns:
        A Tolerances instance.
    """
    load_dotenv()

    tolerances = replace(DEFAULT_TOLERANCES, **_env_overrides())
    if tol_file:
        raw = _read_json_file(Path(tol_file), '--tol-file')
        tolerances = replace(tolerances, **_parse_overrides(raw, '--tol-file'))

    if tolerances != DEFAULT_TOLERANCES:
        logger.info(f"Using non-default tolerances: {tolerances.to_dict()}")
    return tolerances
