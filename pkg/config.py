"""
Runtime settings read from the environment.

환경변수:
  PROFSEM_DEPTH       default check depth (default: 5)
  PROFSEM_MAX_DEPTH   certified depth of builtin spaces and points (default: 12)
  PROFSEM_CASES       seeded case count (default: 1000)
  PROFSEM_SEED        default seed (default: 7)
  PROFSEM_BUDGET      enumeration cap (default: 200000)
  PROFSEM_LOG_LEVEL   logging level name (default: WARNING)
  PROFSEM_DATA_DIR    descriptor directory (default: "data")

A `.env` file in the working directory is read first (PROFSEM_* keys only); real environment
variables always win.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict


_PREFIX = "PROFSEM_"


def _read_env_file(path: str) -> Dict[str, str]:
    """PROFSEM_* 항목만 읽는다. `KEY=VAL`, `export KEY=VAL`, 따옴표로 감싼 값 허용."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError:
        return {}
    found: Dict[str, str] = {}
    for raw in lines:
        line = raw.strip()
        if line.startswith("export "):
            line = line[len("export ") :].lstrip()
        key, sep, value = line.partition("=")
        key = key.strip()
        if sep and key.startswith(_PREFIX):
            found[key] = value.strip().strip("\"'")
    return found


def _load_env_file(path: str = ".env") -> None:
    for key, value in _read_env_file(path).items():
        os.environ.setdefault(key, value)


def _env_int(key: str, default: int) -> int:
    raw = os.getenv(key)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.strip())
    except ValueError:
        return default


@dataclass(frozen=True)
class Settings:
    depth: int = 5
    max_depth: int = 12
    cases: int = 1000
    seed: int = 7
    budget: int = 200_000
    log_level: str = "WARNING"
    data_dir: str = "data"


@lru_cache(maxsize=1)
def load_settings() -> Settings:
    _load_env_file()
    return Settings(
        depth=_env_int("PROFSEM_DEPTH", 5),
        max_depth=max(1, _env_int("PROFSEM_MAX_DEPTH", 12)),
        cases=_env_int("PROFSEM_CASES", 1000),
        seed=_env_int("PROFSEM_SEED", 7),
        budget=_env_int("PROFSEM_BUDGET", 200_000),
        log_level=(os.getenv("PROFSEM_LOG_LEVEL") or "WARNING").strip().upper(),
        data_dir=os.getenv("PROFSEM_DATA_DIR", "data"),
    )
