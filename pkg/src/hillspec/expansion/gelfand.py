"""Gelfand transform, the Parseval check and expansion coefficients at one t."""
from __future__ import annotations

import dataclasses
import logging
import math
from typing import Dict, List

import numpy as np
from scipy import integrate

from ..diagnostics import DiagnosticsConfig, SingularityReport, find_singularities
from ..errors import ExclusionPoint, MultipleEigenvalue
from ..floquet import FloquetRecord, quadrature, records_for
from ..potential import FourierPotential
from ..spectrum import eigenvalues_at
from .functions import TestFunction
from .settings import ExpansionConfig

logger = logging.getLogger(__name__)


def _shifts(f: TestFunction) -> range:
    return range(math.floor(f.a) - 1, math.ceil(f.b) + 1)


def gelfand_transform(f: TestFunction, t: float, grid: np.ndarray) -> np.ndarray:
    """f_t(x) = sum over k of f(x + k) exp(i k t) on ``grid``; f_t(x + 1) = exp(-i t) f_t(x)."""

    grid = np.asarray(grid, dtype=float)
    values = np.zeros(grid.shape, dtype=complex)
    for k in _shifts(f):
        values += f(grid + k) * np.exp(1j * k * t)
    return values


def fiber(f: TestFunction, t: float, grid: np.ndarray) -> np.ndarray:
    """The component of f with multiplier exp(i t), i.e. the transform at -t."""

    return gelfand_transform(f, -t, grid)


def parseval_check(f: TestFunction, cfg: ExpansionConfig | None = None) -> float:
    """(2 pi)^-1 times the double integral of |f_t|^2 over [0, 1] x [-pi, pi), divided by the L2 norm of f squared."""

    cfg = cfg or ExpansionConfig()
    grid = cfg.grid
    shifts = np.array(list(_shifts(f)))
    samples = np.array([f(grid + k) for k in shifts])
    ts = -math.pi + 2.0 * math.pi * np.arange(cfg.tgrid) / cfg.tgrid
    fibers = np.exp(1j * np.multiply.outer(ts, shifts)) @ samples
    per_t = integrate.trapezoid(np.abs(fibers) ** 2, grid, axis=1)
    return float(np.mean(per_t)) / f.norm_squared()


def exclusion_points(report: SingularityReport) -> List[float]:
    """0, the interior multiple points and pi when a Jordan block sits there."""

    points = [0.0, *report.interior_points]
    if report.jordan_at_pi:
        points.append(math.pi)
    return sorted(set(points))


def check_not_excluded(t: float, report: SingularityReport, radius: float) -> None:
    t_abs = abs(float(t))
    for point in exclusion_points(report):
        if abs(t_abs - point) <= radius:
            raise ExclusionPoint(f"t={t} lies within {radius} of the exclusion point {point}.")


def singularity_report(p: FourierPotential, cfg: ExpansionConfig, report: SingularityReport | None) -> SingularityReport:
    if report is not None:
        return report
    return find_singularities(p, DiagnosticsConfig(floquet=cfg.floquet))


def _records(p: FourierPotential, t: float, cfg: ExpansionConfig) -> Dict[int, FloquetRecord]:
    eigs = [dataclasses.replace(e, t=float(t)) for e in eigenvalues_at(p, abs(t), cfg.tracking)]
    records: Dict[int, FloquetRecord] = {}
    for n, record in records_for(p, eigs, cfg.floquet).items():
        if isinstance(record, MultipleEigenvalue):
            raise record
        records[n] = record
    return records


def coefficients(
    p: FourierPotential,
    f: TestFunction,
    t: float,
    cfg: ExpansionConfig | None = None,
    *,
    nmax: int | None = None,
    report: SingularityReport | None = None,
) -> Dict[int, complex]:
    """a_k(t) = (f_t, psi*_k,t) / alpha_k(t) for |k| <= nmax.

    Raises:
        ExclusionPoint: When |t| is within ``eps_sing`` of an exclusion point.
        MultipleEigenvalue: When some lambda_k(t) is multiple.
    """

    cfg = cfg or ExpansionConfig()
    if nmax is not None:
        cfg = cfg.with_nmax(nmax)
    check_not_excluded(t, singularity_report(p, cfg, report), cfg.eps_sing)
    grid = cfg.grid
    values = fiber(f, t, grid)
    return {
        n: quadrature.inner(values, record.psi_star, grid) / record.alpha
        for n, record in sorted(_records(p, t, cfg).items())
    }


def fiber_residual(
    p: FourierPotential,
    f: TestFunction,
    t: float,
    cfg: ExpansionConfig | None = None,
    *,
    report: SingularityReport | None = None,
) -> float:
    """||f_t - sum of a_k psi_k,t|| / ||f_t|| on [0, 1] for the computed bands."""

    cfg = cfg or ExpansionConfig()
    check_not_excluded(t, singularity_report(p, cfg, report), cfg.eps_sing)
    grid = cfg.grid
    values = fiber(f, t, grid)
    partial = np.zeros(grid.shape, dtype=complex)
    for record in _records(p, t, cfg).values():
        partial += quadrature.inner(values, record.psi_star, grid) / record.alpha * record.psi
    scale = quadrature.norm(values, grid)
    return quadrature.norm(values - partial, grid) / scale if scale else 0.0
