"""Floquet solutions, eigenfunction pairs, alpha_n(t) and projection norms."""
from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from hillspec.errors import IrregularArc, MultipleEigenvalue
from hillspec.floquet import (
    AlphaSample,
    FloquetConfig,
    FloquetRecord,
    alpha_profile_csv,
    biorthogonality_matrix,
    eigenfunction_pair,
    floquet_derivative_identity_check,
    floquet_records,
    floquet_solutions,
    fourier_tail_profile,
    partial_sum_ratio,
    projection_norm_arc,
    records_for,
    x_grid,
)
from hillspec.floquet import quadrature
from hillspec.oracle import galerkin_eigen, nearest_pair, synthesize
from hillspec.potential import FourierPotential, mathieu, zero_potential
from hillspec.spectrum import BlochEigenvalue, TrackingConfig

from .conftest import COMPLEX_A, assert_unit_phase_equal


def _records(p: FourierPotential, t: float, cfg: FloquetConfig) -> list[FloquetRecord]:
    found = floquet_records(p, t, None, cfg)
    return [found[n] for n in sorted(found) if isinstance(found[n], FloquetRecord)]


def test_self_adjoint_alpha_is_unimodular(floquet_cfg: FloquetConfig) -> None:
    """Real q: psi_star coincides with psi, so |alpha| = 1 and the projection norm is 1."""

    records = _records(mathieu(0.2), 1.0, floquet_cfg)
    assert len(records) == 7
    for rec in records:
        assert abs(abs(rec.alpha) - 1.0) < 1e-6
        assert rec.proj_norm == pytest.approx(1.0, abs=1e-6)
        assert rec.route == "monodromy"


@pytest.mark.parametrize("a", [0.3, COMPLEX_A])
def test_derivative_identity(a: complex, floquet_cfg: FloquetConfig) -> None:
    """F'(lambda) = -phi(1) times the bilinear pairing of the two Floquet solutions."""

    check = floquet_derivative_identity_check(mathieu(a), 1, 0.8, floquet_cfg)
    assert check.error < 1e-6


def test_monodromy_eigenfunction_matches_galerkin(floquet_cfg: FloquetConfig) -> None:
    p = mathieu(0.3)
    t = 1.0
    rec = eigenfunction_pair(p, 2, t, floquet_cfg)
    grid = floquet_cfg.grid
    _, pair = nearest_pair(galerkin_eigen(p, t, 32), rec.lam)
    values = synthesize(pair.eigenvector, t, 32, grid)
    values = quadrature.fix_phase(values / quadrature.norm(values, grid), grid, t)
    assert float(np.max(np.abs(values - rec.psi))) < 1e-5


def test_adjoint_eigenfunction_is_conjugate_problem(floquet_cfg: FloquetConfig) -> None:
    """psi_star at (q, lambda) is the eigenfunction of L_t(conj q) at conj(lambda)."""

    p = mathieu(COMPLEX_A)
    rec = eigenfunction_pair(p, 1, 1.2, floquet_cfg)
    mirrored = records_for(
        p.conjugate(), [BlochEigenvalue(n=1, t=1.2, lam=rec.lam.conjugate())], floquet_cfg
    )[1]
    assert isinstance(mirrored, FloquetRecord)
    assert_unit_phase_equal(mirrored.psi, rec.psi_star, 1e-6)


def test_floquet_solutions_are_quasi_periodic(floquet_cfg: FloquetConfig) -> None:
    p = mathieu(COMPLEX_A)
    t = 0.7
    rec = eigenfunction_pair(p, 0, t, floquet_cfg)
    grid = np.linspace(0.0, 2.0, 129)
    plus, minus = floquet_solutions(p, rec.lam, t, grid, floquet_cfg)
    scale = float(np.max(np.abs(plus)))
    assert float(np.max(np.abs(plus[64:] - cmath.exp(1j * t) * plus[:65]))) < 1e-7 * scale
    scale = float(np.max(np.abs(minus)))
    assert float(np.max(np.abs(minus[64:] - cmath.exp(-1j * t) * minus[:65]))) < 1e-7 * scale


def test_biorthogonality(floquet_cfg: FloquetConfig) -> None:
    records = _records(mathieu(COMPLEX_A), 1.0, floquet_cfg)
    matrix = biorthogonality_matrix(records)
    assert float(np.max(np.abs(matrix - np.eye(len(records))))) < 1e-6


def test_multiple_eigenvalue_has_no_alpha(floquet_cfg: FloquetConfig) -> None:
    """The free double eigenvalue (2 pi)^2 at t = 0 yields the error instead of a record."""

    found = records_for(
        zero_potential(), [BlochEigenvalue(n=1, t=0.0, lam=4.0 * math.pi**2)], floquet_cfg
    )
    assert isinstance(found[1], MultipleEigenvalue)
    with pytest.raises(MultipleEigenvalue):
        eigenfunction_pair(zero_potential(), 1, 0.0, floquet_cfg)


def test_alpha_profile_csv_marks_multiple_points() -> None:
    profile = [AlphaSample(t=0.0, alpha=None), AlphaSample(t=0.5, alpha=0.5 + 0j)]
    assert profile[0].multiple and profile[1].proj_norm == 2.0
    lines = alpha_profile_csv(1, profile).splitlines()
    assert lines == ["n,t,abs_alpha,proj_norm", "1,0.0,,", "1,0.5,0.5,2.0"]


def test_projection_norm_of_self_adjoint_arc(floquet_cfg: FloquetConfig) -> None:
    value = projection_norm_arc(mathieu(0.2), 1, (0.5, 2.5), floquet_cfg, samples=9)
    assert value == pytest.approx(1.0, abs=1e-6)


def test_arc_through_multiple_point_is_irregular(floquet_cfg: FloquetConfig) -> None:
    with pytest.raises(IrregularArc):
        projection_norm_arc(zero_potential(), 1, (0.0, 0.5), floquet_cfg, samples=5)


def test_partial_sums_of_free_operator_are_contractions(floquet_cfg: FloquetConfig) -> None:
    assert partial_sum_ratio(zero_potential(), 1.0, floquet_cfg, trials=20) <= 1.0 + 1e-9


def test_fourier_tail_of_free_eigenfunction(floquet_cfg: FloquetConfig) -> None:
    """For q = 0 psi_n is the single plane wave of index n."""

    rec = eigenfunction_pair(zero_potential(), 2, 1.0, floquet_cfg)
    heads, remainder = fourier_tail_profile(rec)
    assert set(heads) == {2, -2, 3, -3}
    assert abs(heads[2]) == pytest.approx(1.0, abs=1e-8)
    assert remainder < 1e-8


def test_fourier_tail_shrinks_with_the_band_index() -> None:
    """Real Mathieu a = 0.3 at t = 1.5: the mass outside the four head modes drops from n = 6 to n = 12."""

    cfg = FloquetConfig(tracking=TrackingConfig(nmax=12, workers=1), xgrid=256)
    tails = {}
    for n in (6, 12):
        heads, tails[n] = fourier_tail_profile(eigenfunction_pair(mathieu(0.3), n, 1.5, cfg))
        assert all(abs(u) <= 1.0 + 1e-9 for u in heads.values())
    assert tails[12] < tails[6] < 1e-4


def test_complex_alpha_is_below_one(floquet_cfg: FloquetConfig) -> None:
    """Non-real q: psi_star is not parallel to psi, so |alpha| < 1 and the projection norm exceeds 1."""

    rec = eigenfunction_pair(mathieu(COMPLEX_A), 1, 0.3, floquet_cfg)
    assert abs(rec.alpha) < 1.0 - 1e-6
    assert rec.proj_norm > 1.0


def test_x_grid_validation() -> None:
    assert x_grid(8).size == 9
    with pytest.raises(ValueError):
        x_grid(4)
