from __future__ import annotations

from pathlib import Path
from typing import Iterator

import pytest

from config import load_settings
from oracles import SuiteParams
from profinite_space import InverseSystem, make_space
from semiring import FiniteSemiring, builtin

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

_ENV_KEYS = ("DEPTH", "MAX_DEPTH", "CASES", "SEED", "BUDGET", "LOG_LEVEL", "DATA_DIR")


@pytest.fixture(scope="session", autouse=True)
def _clean_settings() -> Iterator[None]:
    with pytest.MonkeyPatch.context() as mp:
        for key in _ENV_KEYS:
            mp.delenv(f"PROFSEM_{key}", raising=False)
        mp.setenv("PROFSEM_DATA_DIR", str(DATA_DIR))
        load_settings.cache_clear()
        yield
    load_settings.cache_clear()


@pytest.fixture
def env(monkeypatch: pytest.MonkeyPatch) -> Iterator[pytest.MonkeyPatch]:
    """monkeypatch with the settings cache dropped before and after."""
    load_settings.cache_clear()
    yield monkeypatch
    monkeypatch.undo()
    load_settings.cache_clear()


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def cantor() -> InverseSystem:
    return make_space("cantor")


@pytest.fixture
def nat_infty() -> InverseSystem:
    return make_space("nat_infty")


@pytest.fixture
def bool2() -> FiniteSemiring:
    return builtin("bool2")


@pytest.fixture
def trop2() -> FiniteSemiring:
    return builtin("trop_trunc", 2)


@pytest.fixture
def zmod3() -> FiniteSemiring:
    return builtin("zmod", 3)


@pytest.fixture
def small_params() -> SuiteParams:
    return SuiteParams(depth=3, cases=12, seed=7, budget=200_000, exhaustive=False)
