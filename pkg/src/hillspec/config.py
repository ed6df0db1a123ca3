"""Configuration utilities: environment overrides and the numeric defaults table."""
from __future__ import annotations

import math
import os
from typing import Dict, Optional, Union

from dotenv import load_dotenv


# Load environment variables from a local .env if present.
load_dotenv()


Number = Union[int, float]

# Every numeric default used by the library and the CLI lives here.
DEFAULTS: Dict[str, Number] = {
    "nmax": 10,
    "tgrid": 256,
    "tol": 1e-10,
    "eps_sing": 1e-3,
    "Q": 10_000,
    "rho": 1.0 / (16.0 * math.pi),
    "newton_tol": 1e-8,
    "newton_maxiter": 50,
    "membership_tol": 1e-6,
    "mult_tol": 1e-6,
    "deg_tol": 1e-7,
    "galerkin_k": 32,
    "xgrid": 256,
    "ratio_cap": 10.0,
    "fail_tol": 1e-9,
    "cross_tol": 1e-3,
}


def get_env(key: str, default: Optional[str] = None) -> Optional[str]:
    """Read ``key`` from the environment at call time, falling back to ``default``."""

    return os.getenv(key, default)


def get_bool_env(key: str, default: bool = False) -> bool:
    """True for 1, true, yes or on (any case); unset means ``default``."""

    raw_value = os.getenv(key)
    if raw_value is None:
        return default
    return raw_value.strip().lower() in {"1", "true", "yes", "on"}


def get_float_env(key: str, default: float) -> float:
    """Parse ``key`` as a float; unset means ``default``, garbage raises ValueError."""

    raw_value = os.getenv(key)
    if raw_value is None:
        return default

    try:
        return float(raw_value)
    except ValueError as exc:
        raise ValueError(
            f"Environment variable '{key}' must be a valid float, got: {raw_value!r}."
        ) from exc


def get_int_env(key: str, default: int) -> int:
    """Parse ``key`` as an int; unset means ``default``, garbage raises ValueError."""

    raw_value = os.getenv(key)
    if raw_value is None:
        return default

    try:
        return int(raw_value.strip())
    except ValueError as exc:
        raise ValueError(
            f"Environment variable '{key}' must be a valid integer, got: {raw_value!r}."
        ) from exc


def default_workers() -> int:
    """Worker-pool size: ``HILLSPEC_WORKERS`` or the machine parallelism."""

    workers = get_int_env("HILLSPEC_WORKERS", os.cpu_count() or 1)
    return max(1, workers)


def setting(name: str) -> Number:
    """Default for ``name``, overridable by ``HILLSPEC_<NAME>`` in the environment.

    Integer entries of ``DEFAULTS`` are parsed as integers, all others as floats.
    """

    default = DEFAULTS[name]
    key = f"HILLSPEC_{name.upper()}"
    if isinstance(default, int):
        return get_int_env(key, default)
    return get_float_env(key, float(default))
