"""
Tests for tolerance configuration from the environment and --tol-file.
"""

import json

import pytest

from robustkit.config import DEFAULT_TOLERANCES, TOL_ENV_VAR, load_tolerances
from robustkit.errors import ValidationError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    monkeypatch.delenv(TOL_ENV_VAR, raising=False)
    monkeypatch.chdir(tmp_path)


def test_defaults():
    assert load_tolerances() == DEFAULT_TOLERANCES
    assert DEFAULT_TOLERANCES.ppt_tol == 1e-9
    assert DEFAULT_TOLERANCES.max_local_dim == 8


def test_inline_json_from_environment(monkeypatch):
    monkeypatch.setenv(TOL_ENV_VAR, '{"ppt_tol": 1e-7}')
    assert load_tolerances().ppt_tol == 1e-7


def test_file_from_environment(monkeypatch, tmp_path):
    path = tmp_path / 'tol.json'
    path.write_text(json.dumps({'psd_tol': 1e-6}))
    monkeypatch.setenv(TOL_ENV_VAR, str(path))
    assert load_tolerances().psd_tol == 1e-6


def test_tol_file_overrides_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(TOL_ENV_VAR, '{"ppt_tol": 1e-7, "hermit_tol": 1e-8}')
    path = tmp_path / 'tol.json'
    path.write_text(json.dumps({'ppt_tol': 1e-5}))
    tolerances = load_tolerances(str(path))
    assert tolerances.ppt_tol == 1e-5
    assert tolerances.hermit_tol == 1e-8


@pytest.mark.parametrize("payload", [
    '{"no_such_tol": 1e-3}',
    '{"ppt_tol": -1}',
    '{"ppt_tol": true}',
    '{"max_local_dim": 2.5}',
    '[1, 2]',
    'not json',
])
def test_invalid_overrides(monkeypatch, payload):
    monkeypatch.setenv(TOL_ENV_VAR, payload)
    with pytest.raises(ValidationError):
        load_tolerances()


def test_missing_tol_file():
    with pytest.raises(ValidationError):
        load_tolerances('does-not-exist.json')


def test_integer_fields_stay_integers(tmp_path):
    path = tmp_path / 'tol.json'
    path.write_text('{"max_local_dim": 4}')
    tolerances = load_tolerances(str(path))
    assert tolerances.max_local_dim == 4
    assert isinstance(tolerances.max_local_dim, int)
