"""Shared fixtures for prime-bag tests.

Fixtures isolate PRIME_BAG_* environment variables so every test sees the
default settings unless it asks otherwise. Brute-force oracles are in
tests/helpers.py.
"""

import os

import pytest

from settings import ENV_PREFIX, reset_settings


# ---------------------------------------------------------------------------
# Environment variable fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(autouse=True)
def clean_settings(monkeypatch: pytest.MonkeyPatch):
    """Drop PRIME_BAG_* variables and forget memoized settings around each test."""
    for name in list(os.environ):
        if name.startswith(ENV_PREFIX):
            monkeypatch.delenv(name)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture()
def set_env(monkeypatch: pytest.MonkeyPatch):
    """Set PRIME_BAG_<NAME> variables and re-read the settings."""

    def _set(**values: object) -> None:
        for name, value in values.items():
            monkeypatch.setenv(ENV_PREFIX + name.upper(), str(value))
        reset_settings()

    return _set
