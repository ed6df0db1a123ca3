"""Spectral singularities, multiplicities and the finite-range spectrality diagnostic."""
from __future__ import annotations

import cmath
import math

import pytest

from hillspec.diagnostics import (
    CONSISTENT,
    INCONCLUSIVE,
    INCONSISTENT,
    INTERIOR,
    JORDAN,
    DiagnosticsConfig,
    SingularityCandidate,
    SingularityReport,
    check_condition2,
    find_singularities,
    galerkin_unresolved,
    multiplicity_at,
    separated_components,
    spectral_operator_verdict,
    spectrality_diagnostic,
)
from hillspec.errors import NotAnEigenvalue
from hillspec.floquet import FloquetConfig
from hillspec.odecore import fundamental_at_one
from hillspec.potential import FourierPotential, from_fourier, mathieu, two_term, zero_potential
from hillspec.spectrum import SpectralCurve, TrackingConfig, track_bands

FREE_DOUBLE = 4.0 * math.pi**2


def _small_config(nmax: int = 2, tgrid: int = 24) -> DiagnosticsConfig:
    tracking = TrackingConfig(nmax=nmax, tgrid=tgrid, workers=1)
    return DiagnosticsConfig(floquet=FloquetConfig(tracking=tracking, xgrid=64))


def gasymov() -> FourierPotential:
    """q = exp(i 2 pi x) / 2: same discriminant as q = 0, Jordan blocks at every (pi k)^2."""

    return from_fourier({1: 0.5})


@pytest.fixture(scope="module")
def gasymov_run() -> tuple[list[SpectralCurve], SingularityReport]:
    cfg = _small_config()
    curves = track_bands(gasymov(), cfg.tracking)
    return curves, find_singularities(gasymov(), cfg, curves)


@pytest.fixture(scope="module")
def mathieu_run() -> tuple[list[SpectralCurve], SingularityReport]:
    cfg = _small_config()
    curves = track_bands(mathieu(0.3), cfg.tracking)
    return curves, find_singularities(mathieu(0.3), cfg, curves)


def test_real_mathieu_has_no_singularities() -> None:
    report = find_singularities(mathieu(0.2), _small_config(nmax=3, tgrid=32))
    assert report.S == []
    assert report.s == 0 and report.m == 0


def test_gasymov_potential_has_endpoint_jordan_blocks(
    gasymov_run: tuple[list[SpectralCurve], SingularityReport]
) -> None:
    _, report = gasymov_run
    singular = [c for c in report.candidates if c.singular]
    assert singular and report.S
    assert all(c.kind == JORDAN for c in singular)
    assert report.m == 0 and report.interior_points == []
    assert report.jordan_at_pi
    for c in singular:
        k = round(math.sqrt(c.lam.real) / math.pi)
        assert abs(c.lam - (math.pi * k) ** 2) <= 1e-6 * (1.0 + abs(c.lam))
        assert c.F_residual < 1e-6


def test_multiplicities() -> None:
    """Free double point: semisimple; Gasymov double point: a Jordan block."""

    cfg = _small_config()
    assert multiplicity_at(zero_potential(), FREE_DOUBLE, 0.0, cfg) == (2, 2)
    assert multiplicity_at(gasymov(), FREE_DOUBLE, 0.0, cfg) == (2, 1)
    t = math.acos(0.5 * fundamental_at_one(mathieu(0.3), 1.0).F.real)
    assert multiplicity_at(mathieu(0.3), 1.0 + 0j, t, cfg) == (1, 1)
    with pytest.raises(NotAnEigenvalue):
        multiplicity_at(zero_potential(), 5.0, 0.0, cfg)


def test_galerkin_oracle_separation() -> None:
    assert galerkin_unresolved(zero_potential(), FREE_DOUBLE, 0.0, 32)
    assert galerkin_unresolved(gasymov(), FREE_DOUBLE, 0.0, 32)
    assert not galerkin_unresolved(mathieu(0.3), FREE_DOUBLE, 0.0, 32)


def test_diagnostic_consistent_for_real_mathieu(
    mathieu_run: tuple[list[SpectralCurve], SingularityReport]
) -> None:
    curves, report = mathieu_run
    cfg = _small_config()
    diagnostic = spectrality_diagnostic(mathieu(0.3), cfg, curves, report, n_threshold=1)
    assert diagnostic.overall == CONSISTENT
    assert diagnostic.item_iv.detail["sup"] == pytest.approx(1.0, abs=1e-6)
    verdict = spectral_operator_verdict(mathieu(0.3), report, diagnostic, curves, cfg)
    assert verdict["verdict"] == "consistent-with-spectral"
    assert verdict["mathieu"]["two_q_alpha"]["verdict"] == "holds"


def test_diagnostic_inconsistent_for_gasymov(
    gasymov_run: tuple[list[SpectralCurve], SingularityReport]
) -> None:
    curves, report = gasymov_run
    cfg = _small_config()
    diagnostic = spectrality_diagnostic(gasymov(), cfg, curves, report, n_threshold=0)
    assert diagnostic.overall == INCONSISTENT
    assert diagnostic.item_i.ok is False and diagnostic.item_iii.ok is False
    verdict = spectral_operator_verdict(gasymov(), report, diagnostic, curves, cfg)
    assert verdict["verdict"] == "not-spectral"
    assert "mathieu" not in verdict


def test_empty_range_is_inconclusive(
    mathieu_run: tuple[list[SpectralCurve], SingularityReport]
) -> None:
    curves, report = mathieu_run
    diagnostic = spectrality_diagnostic(mathieu(0.3), _small_config(), curves, report, n_threshold=2)
    assert diagnostic.overall == "inconclusive"
    assert diagnostic.as_dict()["item_i"]["ok"] is None


def test_separated_components() -> None:
    curves = [
        SpectralCurve(n=-1, joins=[(0.0, 1)]),
        SpectralCurve(n=0),
        SpectralCurve(n=1, joins=[(0.0, -1)]),
    ]
    report = SingularityReport(
        candidates=[
            SingularityCandidate(lam=1.0 + 0j, t=1.0, kind=INTERIOR, F_residual=0.0, Fprime_residual=0.0, bands=(0, 1))
        ]
    )
    assert separated_components(curves) == {
        -1: {"separated": False, "partners": [1]},
        0: {"separated": True, "partners": []},
        1: {"separated": False, "partners": [-1]},
    }
    merged = separated_components(curves, report)
    assert merged[0] == {"separated": False, "partners": [1]}
    assert merged[1]["partners"] == [-1, 0]
    assert report.interior_points == [1.0] and report.m == 1


@pytest.mark.slow
def test_gasymov_at_default_resolution() -> None:
    report = find_singularities(gasymov(), DiagnosticsConfig())
    assert report.S and report.m == 0
    assert all(c.kind == JORDAN for c in report.candidates if c.singular)


@pytest.fixture(scope="module")
def quarter_turn_run() -> tuple[list[SpectralCurve], SingularityReport]:
    """a = b = exp(i pi / 4): ab = i, the angle test fails at q = 2."""

    p = two_term(cmath.exp(1j * math.pi / 4), cmath.exp(1j * math.pi / 4))
    cfg = _small_config()
    curves = track_bands(p, cfg.tracking)
    return curves, find_singularities(p, cfg, curves)


def test_quarter_turn_two_term_has_interior_multiple_points(
    quarter_turn_run: tuple[list[SpectralCurve], SingularityReport]
) -> None:
    """Bands -1 and 1 meet just inside (0, pi), near t = 1 / (16 pi^3)."""

    curves, report = quarter_turn_run
    assert report.S == [-1, 1]
    assert report.m >= 1
    interior = [c for c in report.candidates if c.kind == INTERIOR]
    assert all(set(c.bands) <= {-1, 1} for c in interior)
    assert min(c.t for c in interior) == pytest.approx(1.0 / (16.0 * math.pi**3), rel=0.05)


def test_quarter_turn_two_term_is_not_spectral(
    quarter_turn_run: tuple[list[SpectralCurve], SingularityReport]
) -> None:
    curves, report = quarter_turn_run
    p = two_term(cmath.exp(1j * math.pi / 4), cmath.exp(1j * math.pi / 4))
    cfg = _small_config()
    diagnostic = spectrality_diagnostic(p, cfg, curves, report)
    assert diagnostic.overall in {INCONSISTENT, INCONCLUSIVE}
    assert check_condition2(p.coefficient(-1), p.coefficient(1)).verdict == "fails"
    verdict = spectral_operator_verdict(p, report, diagnostic, curves, cfg)
    assert verdict["verdict"] == "not-spectral"


def test_negative_product_two_term_singularities() -> None:
    """ab = -1 < 0: bands -1 and 0 meet near t = pi and the angle test fails at q = 1."""

    p = two_term(1.0, -1.0)
    report = find_singularities(p, _small_config())
    assert report.S == [-1, 0]
    interior = [c for c in report.candidates if c.kind == INTERIOR]
    assert interior and all(set(c.bands) <= {-1, 0} for c in interior)
    assert any(abs(c.t - 2.98) < 0.02 for c in interior)
    condition = check_condition2(1.0, -1.0)
    assert condition.verdict == "fails" and condition.linear.witness_q == 1
