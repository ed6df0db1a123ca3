"""Floquet solutions, normalised eigenfunctions of L_t and its adjoint, alpha_n(t)."""
from __future__ import annotations

import cmath
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from ..config import DEFAULTS, setting
from ..errors import DirichletDegeneracy, MultipleEigenvalue, NotAnEigenvalue
from ..odecore import MonodromyData, SolutionTrace, fundamental_at_one, traces_batch
from ..oracle import galerkin_eigen, nearest_pair, synthesize
from ..potential import FourierPotential
from ..spectrum import BlochEigenvalue, TrackingConfig, eigenvalues_at, mult_threshold
from . import quadrature

logger = logging.getLogger(__name__)


@dataclass
class FloquetConfig:
    tracking: TrackingConfig = field(default_factory=TrackingConfig)
    xgrid: int = int(DEFAULTS["xgrid"])
    deg_tol: float = field(default_factory=lambda: setting("deg_tol"))

    @property
    def grid(self) -> np.ndarray:
        return quadrature.x_grid(self.xgrid)


@dataclass(frozen=True)
class FloquetRecord:
    """Normalised eigenfunction pair for band n at quasimomentum t.

    ``psi`` has multiplier exp(i t); ``psi_star`` is the eigenfunction of the
    adjoint L_t(conj q) at conj(lambda). ``alpha`` = (psi, psi_star).
    """

    n: int
    t: float
    lam: complex
    grid: np.ndarray
    psi: np.ndarray
    psi_star: np.ndarray
    alpha: complex
    route: str = "monodromy"

    @property
    def proj_norm(self) -> float:
        return 1.0 / abs(self.alpha)

    @property
    def chi(self) -> np.ndarray:
        """Biorthogonal partner psi_star / conj(alpha)."""

        return self.psi_star / np.conj(self.alpha)

    def psi_at(self, shift: int) -> np.ndarray:
        """psi on the cell [shift, shift + 1] by quasi-periodicity."""

        return self.psi * cmath.exp(1j * shift * self.t)


def _check_root(md: MonodromyData, t: float, tol: float) -> None:
    residual = abs(md.F - 2.0 * math.cos(t))
    if residual > tol:
        raise NotAnEigenvalue(
            f"lambda={md.lam!r} is not an eigenvalue of L_t at t={t}: |F - 2cos t| = {residual:.3g}."
        )


def floquet_solutions(
    p: FourierPotential,
    lam: complex,
    t: float,
    grid: Sequence[float] | np.ndarray,
    cfg: FloquetConfig | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Phi_plus and Phi_minus from the closed formula theta + (mu - theta(1)) phi / phi(1).

    Raises:
        DirichletDegeneracy: When the scaled phi(1, lambda) is below ``deg_tol``.
        NotAnEigenvalue: When F(lambda) misses 2 cos t.
    """

    cfg = cfg or FloquetConfig()
    traces, data = traces_batch(p, [lam], np.asarray(grid, dtype=float), cfg.tracking.tol)
    trace, md = traces[0], data[0]
    _check_root(md, t, cfg.tracking.membership_tol)
    if md.scaled_phi1 <= cfg.deg_tol:
        raise DirichletDegeneracy(
            f"phi(1, lambda) = {md.phi1!r} is too small for the closed Floquet formula.", lam=md.lam
        )
    plus = trace.theta + (cmath.exp(1j * t) - md.theta1) / md.phi1 * trace.phi
    minus = trace.theta + (cmath.exp(-1j * t) - md.theta1) / md.phi1 * trace.phi
    return plus, minus


def floquet_coefficients(md: MonodromyData, mu: complex) -> tuple[complex, complex] | None:
    """(c_theta, c_phi) with c_theta theta + c_phi phi having multiplier ``mu``.

    Uses the better-conditioned row of the monodromy eigenvector equation;
    ``None`` when both rows vanish (every solution is a Floquet solution).
    """

    kappa = md.kappa
    first = (md.phi1, mu - md.theta1)
    second = (mu - md.dphi1, md.dtheta1)
    first_size = abs(first[0]) * kappa + abs(first[1])
    second_size = abs(second[0]) + abs(second[1]) / kappa
    if max(first_size, second_size) < 1e-12:
        return None
    return first if first_size >= second_size else second


def _combine(trace: SolutionTrace, coefficients: tuple[complex, complex]) -> np.ndarray:
    return coefficients[0] * trace.theta + coefficients[1] * trace.phi


def _normalise(values: np.ndarray, grid: np.ndarray, t: float) -> np.ndarray:
    scaled = values / quadrature.norm(values, grid)
    return quadrature.fix_phase(scaled, grid, t)


def _record(
    n: int,
    t: float,
    grid: np.ndarray,
    psi_raw: np.ndarray,
    star_raw: np.ndarray,
    lam: complex,
    route: str,
) -> FloquetRecord:
    psi = _normalise(psi_raw, grid, t)
    psi_star = _normalise(star_raw, grid, t)
    alpha = quadrature.inner(psi, psi_star, grid)
    return FloquetRecord(
        n=n, t=float(t), lam=lam, grid=grid, psi=psi, psi_star=psi_star, alpha=alpha, route=route
    )


def _galerkin_record(p: FourierPotential, e: BlochEigenvalue, grid: np.ndarray, K: int) -> FloquetRecord:
    logger.info("Building band n=%d at t=%.6g from Galerkin eigenvectors", e.n, e.t)
    K = max(K, p.order, 2 * abs(e.n) + 8)
    _, direct = nearest_pair(galerkin_eigen(p, e.t, K), e.lam)
    _, adjoint = nearest_pair(galerkin_eigen(p.conjugate(), e.t, K), e.lam.conjugate())
    psi = synthesize(direct.eigenvector, e.t, K, grid)
    star = synthesize(adjoint.eigenvector, e.t, K, grid)
    return _record(e.n, e.t, grid, psi, star, e.lam, "galerkin")


def records_for(
    p: FourierPotential,
    eigs: Sequence[BlochEigenvalue],
    cfg: FloquetConfig | None = None,
) -> Dict[int, FloquetRecord | MultipleEigenvalue]:
    """Floquet records for given eigenvalues at one t; multiple ones map to the error."""

    cfg = cfg or FloquetConfig()
    if not eigs:
        return {}
    traces, data = traces_batch(p, [e.lam for e in eigs], cfg.grid, cfg.tracking.tol, order=1)
    return records_from_traces(p, eigs, traces, data, cfg)


def records_from_traces(
    p: FourierPotential,
    eigs: Sequence[BlochEigenvalue],
    traces: Sequence[SolutionTrace],
    data: Sequence[MonodromyData],
    cfg: FloquetConfig,
) -> Dict[int, FloquetRecord | MultipleEigenvalue]:
    """Records from already integrated traces (with dF) on ``cfg.grid``."""

    grid = cfg.grid
    out: Dict[int, FloquetRecord | MultipleEigenvalue] = {}
    for e, trace, md in zip(eigs, traces, data):
        if abs(md.dF) < mult_threshold(md.lam, cfg.tracking.mult_tol):
            out[e.n] = MultipleEigenvalue(
                f"lambda_{e.n}({e.t:.6g}) = {e.lam!r} is a multiple eigenvalue.", n=e.n, t=e.t
            )
            continue
        mu = cmath.exp(1j * e.t)
        plus = floquet_coefficients(md, mu)
        minus = floquet_coefficients(md, 1.0 / mu)
        if plus is None or minus is None:
            out[e.n] = _galerkin_record(p, e, grid, cfg.tracking.galerkin_k)
            continue
        # conj(Phi_minus(x, lambda; q)) = Phi_plus(x, conj lambda; conj q): the adjoint eigenfunction.
        out[e.n] = _record(
            e.n, e.t, grid, _combine(trace, plus), np.conj(_combine(trace, minus)), e.lam, "monodromy"
        )
    return out


def floquet_records(
    p: FourierPotential,
    t: float,
    ns: Sequence[int] | None = None,
    cfg: FloquetConfig | None = None,
) -> Dict[int, FloquetRecord | MultipleEigenvalue]:
    """Records for the bands ``ns`` (default: all tracked) at quasimomentum ``t``.

    Negative ``t`` selects the L_{-t} eigenfunctions at lambda_n(|t|).
    """

    cfg = cfg or FloquetConfig()
    eigs = eigenvalues_at(p, t, cfg.tracking)
    wanted = set(ns) if ns is not None else None
    chosen = [e for e in eigs if wanted is None or e.n in wanted]
    return records_for(p, chosen, cfg)


def eigenfunction_pair(
    p: FourierPotential, n: int, t: float, cfg: FloquetConfig | None = None
) -> FloquetRecord:
    """Normalised eigenfunctions of L_t and L_t^* for band n and alpha_n(t).

    Raises:
        MultipleEigenvalue: When lambda_n(t) is multiple (alpha is undefined).
        KeyError: When band n was not resolved at t.
    """

    cfg = cfg or FloquetConfig()
    if abs(n) > cfg.tracking.nmax:
        cfg = FloquetConfig(
            tracking=_with_nmax(cfg.tracking, abs(n)), xgrid=cfg.xgrid, deg_tol=cfg.deg_tol
        )
    result = floquet_records(p, t, [n], cfg).get(n)
    if result is None:
        raise KeyError(f"Band {n} is not available at t={t}.")
    if isinstance(result, MultipleEigenvalue):
        raise result
    return result


def _with_nmax(tracking: TrackingConfig, nmax: int) -> TrackingConfig:
    return dataclasses.replace(tracking, nmax=nmax)


@dataclass(frozen=True)
class IdentityCheck:
    """F'(lambda) against -phi(1) times the pairing of Phi_plus and Phi_minus."""

    dF: complex
    bilinear: complex
    sesquilinear: complex

    @property
    def error(self) -> float:
        return abs(self.dF - self.bilinear) / abs(self.dF)

    @property
    def sesquilinear_error(self) -> float:
        return abs(self.dF - self.sesquilinear) / abs(self.dF)


def floquet_derivative_identity_check(
    p: FourierPotential, n: int, t: float, cfg: FloquetConfig | None = None
) -> IdentityCheck:
    """Compare the variational F' with the Floquet-solution formula.

    The formula holds with the bilinear pairing, -phi(1) * integral of
    Phi_plus Phi_minus; the conjugate-linear reading is reported alongside.
    """

    cfg = cfg or FloquetConfig()
    if abs(n) > cfg.tracking.nmax:
        cfg = FloquetConfig(tracking=_with_nmax(cfg.tracking, abs(n)), xgrid=cfg.xgrid, deg_tol=cfg.deg_tol)
    eig = next((e for e in eigenvalues_at(p, t, cfg.tracking) if e.n == n), None)
    if eig is None:
        raise KeyError(f"Band {n} is not available at t={t}.")
    grid = cfg.grid
    plus, minus = floquet_solutions(p, eig.lam, t, grid, cfg)
    md = fundamental_at_one(p, eig.lam, cfg.tracking.tol)
    return IdentityCheck(
        dF=md.dF,
        bilinear=-md.phi1 * quadrature.bilinear(plus, minus, grid),
        sesquilinear=-md.phi1 * quadrature.inner(plus, minus, grid),
    )


def biorthogonality_matrix(records: Sequence[FloquetRecord]) -> np.ndarray:
    """Matrix of (psi_n, chi_m) over the given records at one t."""

    size = len(records)
    matrix = np.empty((size, size), dtype=complex)
    for i, left in enumerate(records):
        for j, right in enumerate(records):
            matrix[i, j] = quadrature.inner(left.psi, right.chi, left.grid)
    return matrix


def fourier_tail_profile(rec: FloquetRecord) -> tuple[Dict[int, complex], float]:
    """Head coefficients u_{n,k}, k in {n, -n, n+1, -(n+1)}, and the remaining L2 mass."""

    heads: Dict[int, complex] = {}
    for k in (rec.n, -rec.n, rec.n + 1, -(rec.n + 1)):
        if k not in heads:
            heads[k] = quadrature.inner(rec.psi, quadrature.plane_wave(k, rec.t, rec.grid), rec.grid)
    remainder = rec.psi - sum(u * quadrature.plane_wave(k, rec.t, rec.grid) for k, u in heads.items())
    return heads, quadrature.norm(remainder, rec.grid) ** 2

