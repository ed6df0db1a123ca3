"""Shared fixtures and assertion helpers for the hillspec test suite."""
from __future__ import annotations

import cmath
import json
import math
from pathlib import Path
from typing import Any, Callable, Dict

import numpy as np
import pytest

from hillspec.config import get_bool_env
from hillspec.diagnostics import DiagnosticsConfig
from hillspec.floquet import FloquetConfig
from hillspec.potential import FourierPotential, PotentialDocument, mathieu
from hillspec.spectrum import TrackingConfig

COMPLEX_A = 0.4 * cmath.exp(1j * math.pi / 8)


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    """Skip ``slow`` acceptance runs unless HILLSPEC_RUN_SLOW is truthy."""

    if get_bool_env("HILLSPEC_RUN_SLOW"):
        return
    skip = pytest.mark.skip(reason="set HILLSPEC_RUN_SLOW=1 to run full-size acceptance tests")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture()
def tracking() -> TrackingConfig:
    """Small, single-threaded tracking parameters."""

    return TrackingConfig(nmax=3, tgrid=32, workers=1)


@pytest.fixture()
def floquet_cfg(tracking: TrackingConfig) -> FloquetConfig:
    return FloquetConfig(tracking=tracking, xgrid=128)


@pytest.fixture()
def diagnostics_cfg(floquet_cfg: FloquetConfig) -> DiagnosticsConfig:
    return DiagnosticsConfig(floquet=floquet_cfg)


@pytest.fixture()
def real_mathieu() -> FourierPotential:
    return mathieu(0.3)


@pytest.fixture()
def complex_mathieu() -> FourierPotential:
    return mathieu(COMPLEX_A)


@pytest.fixture()
def write_json(tmp_path: Path) -> Callable[[str, Any], Path]:
    """Write a JSON payload into the temporary directory and return its path."""

    def write(name: str, payload: Any) -> Path:
        path = tmp_path / name
        text = payload if isinstance(payload, str) else json.dumps(payload)
        path.write_text(text, encoding="utf-8")
        return path

    return write


@pytest.fixture()
def potential_file(write_json: Callable[[str, Any], Path]) -> Callable[[FourierPotential], Path]:
    """Persist a potential in the canonical document format."""

    def write(p: FourierPotential) -> Path:
        return write_json("potential.json", PotentialDocument.from_potential(p).model_dump())

    return write


def assert_close(actual: complex, expected: complex, rel: float, *, floor: float = 1.0) -> None:
    """|actual - expected| <= rel * max(floor, |expected|)."""

    scale = max(floor, abs(expected))
    assert abs(actual - expected) <= rel * scale, f"{actual!r} != {expected!r} (rel {rel})"


def assert_unit_phase_equal(left: np.ndarray, right: np.ndarray, tol: float) -> None:
    """Arrays agree up to a unimodular factor (taken from the largest entry)."""

    pivot = int(np.argmax(np.abs(right)))
    factor = left[pivot] / right[pivot]
    assert abs(abs(factor) - 1.0) < tol
    assert float(np.max(np.abs(left - factor * right))) < tol


def sorted_by_real(values: np.ndarray) -> np.ndarray:
    return values[np.lexsort((values.imag, values.real))]


def band_map(curves: Any) -> Dict[int, Any]:
    return {curve.n: curve for curve in curves}
