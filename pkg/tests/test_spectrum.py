"""Eigenvalues lambda_n(t), band continuation, band documents and spectrum membership."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hillspec.errors import NewtonDivergence
from hillspec.oracle import galerkin_eigenvalues
from hillspec.potential import FourierPotential, mathieu, zero_potential
from hillspec.spectrum import (
    BlochEigenvalue,
    Membership,
    SpectralCurve,
    TrackingConfig,
    assign,
    band_order,
    bands_document,
    bands_from_document,
    bands_to_csv,
    classify_discriminant,
    curve_by_index,
    decay_witness,
    eigenvalues_at,
    newton_root,
    record_joins,
    separation_check,
    spectrum_membership,
    target,
    track_bands,
)

from .conftest import COMPLEX_A, band_map


def test_band_order_follows_unperturbed_values() -> None:
    assert band_order(2, 0.5) == [0, -1, 1, -2, 2]
    assert band_order(1, 0.0) == [0, -1, 1]


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 2.0, 3.0])
def test_free_eigenvalues(t: float) -> None:
    """For q = 0, lambda_n(t) = (2 pi n + t)^2 and every root is simple."""

    eigs = eigenvalues_at(zero_potential(), t, TrackingConfig(nmax=8, workers=1))
    assert sorted(e.n for e in eigs) == list(range(-8, 9))
    for e in eigs:
        exact = (2.0 * math.pi * e.n + t) ** 2
        assert abs(e.lam - exact) <= 1e-8 * exact
        assert e.multiplicity == 1


@pytest.mark.parametrize("a", [0.3, 0.5j, COMPLEX_A])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.5])
def test_agreement_with_galerkin(a: complex, t: float) -> None:
    """The eleven central Newton roots agree with the Galerkin eigenvalues (K = 32)."""

    p = mathieu(a)
    oracle = galerkin_eigenvalues(p, t, 32)
    eigs = eigenvalues_at(p, t, TrackingConfig(nmax=5, workers=1))
    assert len(eigs) == 11
    for e in eigs:
        nearest = oracle[int(np.argmin(np.abs(oracle - e.lam)))]
        assert abs(nearest - e.lam) <= 1e-6 * max(1.0, abs(e.lam))
        assert e.residual < 1e-8


def test_double_root_of_free_operator_at_zero() -> None:
    """At t = 0 the free eigenvalue (2 pi)^2 is double and reported for both bands."""

    eigs = {e.n: e for e in eigenvalues_at(zero_potential(), 0.0, TrackingConfig(nmax=1, workers=1))}
    assert eigs[0].lam == pytest.approx(0.0, abs=1e-8)
    assert eigs[-1].lam == pytest.approx(4.0 * math.pi**2, rel=1e-6)
    assert eigs[1].lam == pytest.approx(4.0 * math.pi**2, rel=1e-6)
    assert eigs[-1].multiplicity == eigs[1].multiplicity == 2


@pytest.mark.parametrize("t", [0.0, math.pi])
def test_double_roots_of_free_operator_are_refined(t: float) -> None:
    """Double eigenvalues at t = 0 and t = pi are accurate, not just sqrt(newton_tol) close."""

    eigs = eigenvalues_at(zero_potential(), t, TrackingConfig(nmax=3, workers=1))
    assert sorted(e.n for e in eigs) == list(range(-3, 4))
    for e in eigs:
        exact = (2.0 * math.pi * e.n + t) ** 2
        assert abs(e.lam - exact) < 1e-9 * (1.0 + exact)
        if exact > 0:
            assert e.multiplicity == 2
            assert e.residual < 1e-8


def test_single_t_labels_are_regrouped_by_tracking() -> None:
    """Tracking only relabels: at each t its samples are the roots from eigenvalues_at."""

    p = mathieu(COMPLEX_A)
    cfg = TrackingConfig(nmax=2, tgrid=16, workers=1)
    curves = track_bands(p, cfg)
    for j in (0, 5, 15):
        t = curves[0].samples[j].t
        tracked = sorted((c.samples[j].lam for c in curves), key=lambda z: (z.real, z.imag))
        direct = sorted((e.lam for e in eigenvalues_at(p, t, cfg)), key=lambda z: (z.real, z.imag))
        assert tracked == direct


@settings(max_examples=5, deadline=None)
@given(t=st.floats(min_value=0.1, max_value=3.0))
def test_symmetric_in_quasimomentum(t: float) -> None:
    """lambda_n(-t) = lambda_n(t)."""

    p = mathieu(COMPLEX_A)
    cfg = TrackingConfig(nmax=2, workers=1)
    plus = {e.n: e.lam for e in eigenvalues_at(p, t, cfg)}
    minus = {e.n: e.lam for e in eigenvalues_at(p, -t, cfg)}
    assert plus == minus


def test_newton_root_and_divergence(real_mathieu: FourierPotential) -> None:
    """Newton from the unperturbed seed finds the Galerkin eigenvalue; zero iterations diverge."""

    t = 1.0
    md = newton_root(real_mathieu, (2.0 * math.pi + t) ** 2, 2.0 * math.cos(t))
    oracle = galerkin_eigenvalues(real_mathieu, t, 32)
    assert np.min(np.abs(oracle - md.lam)) <= 1e-6 * abs(md.lam)
    with pytest.raises(NewtonDivergence):
        newton_root(real_mathieu, 3.0, 2.0 * math.cos(t), TrackingConfig(newton_maxiter=0))


def test_membership() -> None:
    assert classify_discriminant(1.0 + 0j, 1e-6) is Membership.IN
    assert classify_discriminant(3.0 + 0j, 1e-6) is Membership.OUT
    assert classify_discriminant(1.0 + 1e-3j, 1e-6) is Membership.OUT
    assert classify_discriminant(2.0 + 0j, 1e-6) is Membership.UNCERTAIN
    assert spectrum_membership(zero_potential(), 4.0) is Membership.IN
    assert spectrum_membership(zero_potential(), -1.0) is Membership.OUT


def test_config_validation() -> None:
    with pytest.raises(ValueError):
        TrackingConfig(nmax=0)
    with pytest.raises(ValueError):
        TrackingConfig(tgrid=8)
    with pytest.raises(ValueError):
        TrackingConfig(rho=1.0)


def test_assignment_clear_winner_and_ties() -> None:
    """Close runner-ups are ambiguous; exactly coinciding candidates are a join."""

    assignment, clear = assign(np.array([0.0 + 0j]), np.array([1.0 + 0j, -1.05 + 0j]))
    assert assignment.tolist() == [0] and not clear[0]
    assignment, clear = assign(np.array([0.0 + 0j]), np.array([1.0 + 0j, 10.0 + 0j]))
    assert assignment.tolist() == [0] and clear[0]
    _, clear = assign(np.array([0.0 + 0j]), np.array([1.0 + 0j, 1.0 + 0j]))
    assert clear[0]


def test_assignment_out_of_a_join() -> None:
    """Rows leaving one double point are clear and keep their order."""

    reference = np.array([40.0 + 0j, 40.0 + 0j])
    candidates = np.array([43.0 + 0j, 37.0 + 0j])
    assignment, clear = assign(reference, candidates)
    assert clear.all()
    assert assignment.tolist() == [1, 0]


@pytest.fixture(scope="module")
def mathieu_bands() -> list[SpectralCurve]:
    """Bands |n| <= 2 of the real Mathieu potential a = 0.3."""

    return track_bands(mathieu(0.3), TrackingConfig(nmax=2, tgrid=24, workers=1))


def test_tracked_curves_are_closed_and_match_oracle(mathieu_bands: list[SpectralCurve]) -> None:
    """Every curve spans [0, pi]; end values are periodic or antiperiodic Galerkin eigenvalues."""

    p = mathieu(0.3)
    assert [c.n for c in mathieu_bands] == [-2, -1, 0, 1, 2]
    for t in (0.0, math.pi):
        oracle = galerkin_eigenvalues(p, t, 32)
        for curve in mathieu_bands:
            assert curve.closed and not curve.suspect
            assert len(curve.samples) == 24
            sample = curve.samples[0] if t == 0.0 else curve.samples[-1]
            assert np.min(np.abs(oracle - sample.lam)) <= 1e-6 * max(1.0, abs(sample.lam))


def test_real_potential_bands_are_real_and_ordered(mathieu_bands: list[SpectralCurve]) -> None:
    """Self-adjoint case: real eigenvalues, band 0 lowest at every t."""

    bands = band_map(mathieu_bands)
    for curve in mathieu_bands:
        assert float(np.max(np.abs(curve.values.imag))) < 1e-8
    assert np.all(bands[0].values.real < bands[-1].values.real + 1e-9)


def test_free_bands_are_monotone_real_segments() -> None:
    """For q = 0 and n >= 0, Gamma_n runs once over [(2 pi n)^2, (2 pi n + pi)^2] as t increases."""

    curves = band_map(track_bands(zero_potential(), TrackingConfig(nmax=2, tgrid=16, workers=1)))
    for n in (0, 1, 2):
        values = curves[n].values
        ts = np.array([s.t for s in curves[n].samples])
        assert float(np.max(np.abs(values.imag))) < 1e-10
        assert np.all(np.diff(values.real) > 0)
        assert np.allclose(values.real, (2.0 * math.pi * n + ts) ** 2, rtol=1e-8, atol=1e-8)


def test_tracking_independent_of_pool_size() -> None:
    p = mathieu(COMPLEX_A)
    one = track_bands(p, TrackingConfig(nmax=1, tgrid=16, workers=1))
    four = track_bands(p, TrackingConfig(nmax=1, tgrid=16, workers=4))
    for left, right in zip(one, four):
        assert np.array_equal(left.values, right.values)


def test_band_document_round_trip(mathieu_bands: list[SpectralCurve]) -> None:
    document = bands_document(mathieu_bands, meta={"nmax": 2})
    curves, meta = bands_from_document(document)
    assert meta == {"nmax": 2}
    for original, back in zip(mathieu_bands, curves):
        assert back.n == original.n
        assert np.array_equal(back.values, original.values)
    csv_text = bands_to_csv(mathieu_bands)
    lines = csv_text.splitlines()
    assert lines[0] == "t,n,re,im"
    assert len(lines) == 1 + 5 * 24
    assert curve_by_index(curves, 1).n == 1
    with pytest.raises(KeyError):
        curve_by_index(curves, 7)


def test_record_joins() -> None:
    """Coinciding samples are recorded on both curves."""

    shared = BlochEigenvalue(n=1, t=0.0, lam=4.0 * math.pi**2)
    curves = {
        -1: SpectralCurve(n=-1, samples=[BlochEigenvalue(n=-1, t=0.0, lam=4.0 * math.pi**2)]),
        1: SpectralCurve(n=1, samples=[shared]),
        0: SpectralCurve(n=0, samples=[BlochEigenvalue(n=0, t=0.0, lam=0.0)]),
    }
    record_joins(curves)
    assert curves[-1].joins == [(0.0, 1)]
    assert curves[1].joins == [(0.0, -1)]
    assert curves[0].joins == []


@pytest.mark.parametrize("a", [0.3, COMPLEX_A])
def test_separation_bound_on_computed_range(a: complex) -> None:
    """High eigenvalues keep |n - k| |n + k| away from the other unperturbed values."""

    result = separation_check(mathieu(a), TrackingConfig(nmax=8, workers=1), np.linspace(0.0, math.pi, 5))
    assert result.ok
    # n = 5..8 of both signs, 5 t values, 2 signs, 77 admissible k each.
    assert result.pairs == 8 * 5 * 2 * 77
    assert result.min_margin >= 1.0
    assert result.as_dict()["violations"] == []


def test_separation_violation_is_reported(monkeypatch: pytest.MonkeyPatch) -> None:
    """A root sitting on a foreign unperturbed value is flagged with its k."""

    def misplaced(p: FourierPotential, t: float, cfg: TrackingConfig) -> list[BlochEigenvalue]:
        return [BlochEigenvalue(n=5, t=t, lam=complex(target(7, t)), dF=1.0)]

    monkeypatch.setattr("hillspec.spectrum.asymptotics.eigenvalues_at", misplaced)
    result = separation_check(zero_potential(), TrackingConfig(nmax=5, workers=1), [1.0])
    assert not result.ok
    assert result.min_margin == 0.0
    assert (5, 7, 1) in {(v.n, v.k, v.sign) for v in result.violations}


@pytest.mark.parametrize("a", [0.0, 0.3, COMPLEX_A])
def test_decay_witness_on_computed_range(a: complex) -> None:
    """r_n stays within ten times its maximum over n = 5..10."""

    p = mathieu(a) if a else zero_potential()
    result = decay_witness(p, TrackingConfig(nmax=12, workers=1), [0.5, 1.5, 2.5, 3.14])
    assert result.ok, result.violations
    # t = 3.14 lies outside [rho, pi - rho].
    assert result.ts == [0.5, 1.5, 2.5]
    assert all(sorted(r) == list(range(5, 13)) for r in result.ratios)
    if a:
        assert all(ref > 0 for ref in result.reference)


def test_decay_witness_flags_growth(monkeypatch: pytest.MonkeyPatch) -> None:
    def growing(p: FourierPotential, t: float, cfg: TrackingConfig) -> list[BlochEigenvalue]:
        return [
            BlochEigenvalue(n=n, t=t, lam=complex(target(n, t) + (1.0 if n == 12 else 1e-3)), dF=1.0)
            for n in range(5, 13)
        ]

    monkeypatch.setattr("hillspec.spectrum.asymptotics.eigenvalues_at", growing)
    result = decay_witness(zero_potential(), TrackingConfig(nmax=12, workers=1), [1.0])
    assert result.violations == [(12, 1.0)]
    with pytest.raises(ValueError, match="nmax"):
        decay_witness(zero_potential(), TrackingConfig(nmax=4, workers=1))
