"""Spectral singularities: multiple eigenvalues of L_t found as roots of F' inside the spectrum."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..config import setting
from ..errors import NotAnEigenvalue
from ..floquet import FloquetConfig
from ..odecore import MonodromyData, fundamental_at_one, monodromy_batch
from ..oracle import galerkin_eigen
from ..potential import FourierPotential
from ..services.workers import ordered_map
from ..spectrum import (
    Membership,
    SpectralCurve,
    TrackingConfig,
    classify_discriminant,
    eigenvalues_at,
    mult_threshold,
    track_bands,
)

logger = logging.getLogger(__name__)

INTERIOR = "interior-multiple"
JORDAN = "endpoint-jordan"
SEMISIMPLE = "endpoint-semisimple"
SINGULAR_KINDS = (INTERIOR, JORDAN)

# Galerkin pair closer than SPLIT_TOL (1 + |lambda|)^(1/2), or with parallel eigenvectors, is unresolved.
SPLIT_TOL = 1e-7
PARALLEL_COSINE = 0.99


@dataclass
class DiagnosticsConfig:
    floquet: FloquetConfig = field(default_factory=FloquetConfig)
    Q: int = field(default_factory=lambda: int(setting("Q")))
    fail_tol: float = field(default_factory=lambda: setting("fail_tol"))
    ratio_cap: float = field(default_factory=lambda: setting("ratio_cap"))
    # Bound d on the projection norms along the computed range.
    alpha_bound: float = 10.0
    profile_points: int = 16

    @property
    def tracking(self) -> TrackingConfig:
        return self.floquet.tracking


@dataclass(frozen=True)
class SingularityCandidate:
    lam: complex
    t: float
    kind: str
    F_residual: float
    Fprime_residual: float
    bands: Tuple[int, ...] = ()

    @property
    def singular(self) -> bool:
        return self.kind in SINGULAR_KINDS


@dataclass
class SingularityReport:
    candidates: List[SingularityCandidate] = field(default_factory=list)
    verdicts: Dict[str, Any] = field(default_factory=dict)

    @property
    def S(self) -> List[int]:
        return sorted({n for c in self.candidates if c.singular for n in c.bands})

    @property
    def s(self) -> int:
        return sum(1 for c in self.candidates if c.singular)

    @property
    def m(self) -> int:
        return sum(1 for c in self.candidates if c.kind == INTERIOR)

    @property
    def interior_points(self) -> List[float]:
        return sorted({c.t for c in self.candidates if c.kind == INTERIOR})

    @property
    def jordan_at_pi(self) -> bool:
        return any(c.kind == JORDAN and c.t > 0.5 * math.pi for c in self.candidates)


def _level_t(F: complex) -> float:
    return math.acos(min(1.0, max(-1.0, F.real / 2.0)))


def _curve_derivatives(p: FourierPotential, curve: SpectralCurve, tol: float) -> List[MonodromyData]:
    return monodromy_batch(p, [s.lam for s in curve.samples], tol, order=1)


def _seeds_for_curve(curve: SpectralCurve, data: Sequence[MonodromyData]) -> List[complex]:
    """Local minima of |F'| and sign changes of Re F' or Im F' along the samples."""

    if not data:
        return []
    values = np.array([s.lam for s in curve.samples])
    dF = np.array([md.dF for md in data])
    size = np.abs(dF)
    seeds: List[complex] = []
    for j in range(dF.size):
        left = size[j - 1] if j > 0 else np.inf
        right = size[j + 1] if j + 1 < dF.size else np.inf
        if size[j] <= left and size[j] <= right:
            seeds.append(complex(values[j]))
    for part in (dF.real, dF.imag):
        changes = np.flatnonzero(part[:-1] * part[1:] < 0)
        seeds.extend(complex(0.5 * (values[j] + values[j + 1])) for j in changes)
    return seeds


def _newton_critical(p: FourierPotential, seeds: np.ndarray, cfg: TrackingConfig) -> List[MonodromyData]:
    """Batched Newton on F'(lambda) = 0 with F'' from the second variational system."""

    roots = np.array(seeds, dtype=complex)
    done = np.zeros(roots.size, dtype=bool)
    final: List[MonodromyData | None] = [None] * roots.size
    for _ in range(cfg.newton_maxiter):
        active = np.flatnonzero(~done)
        if active.size == 0:
            break
        for j, md in zip(active, monodromy_batch(p, roots[active], cfg.tol, order=2)):
            final[j] = md
            if abs(md.dF) < 1e-2 * mult_threshold(md.lam, cfg.mult_tol) or not md.d2F:
                done[j] = True
                continue
            step = md.dF / md.d2F
            roots[j] = roots[j] - step
            if abs(step) < 1e-12 * (1.0 + abs(roots[j])):
                done[j] = True
    converged: List[MonodromyData] = []
    for seed, ok, md in zip(seeds, done, final):
        if ok and md is not None:
            converged.append(md)
        else:
            logger.warning("Newton on F' from seed %s did not converge", seed)
    return converged


def _unique(roots: Sequence[MonodromyData]) -> List[MonodromyData]:
    kept: List[MonodromyData] = []
    for md in sorted(roots, key=lambda r: (r.lam.real, r.lam.imag)):
        if all(abs(md.lam - other.lam) >= 1e-7 * (1.0 + abs(md.lam)) for other in kept):
            kept.append(md)
    return kept


def galerkin_unresolved(p: FourierPotential, lam: complex, t: float, K: int) -> bool:
    """True when the Galerkin eigenvalues of L_t nearest lambda do not separate."""

    K = max(K, p.order, int(math.sqrt(abs(lam)) / (2.0 * math.pi)) + 16)
    pairs = galerkin_eigen(p, t, K)
    order = np.argsort([abs(pair.eigenvalue - lam) for pair in pairs])
    first, second = pairs[int(order[0])], pairs[int(order[1])]
    split = abs(first.eigenvalue - second.eigenvalue)
    cosine = abs(np.vdot(first.eigenvector, second.eigenvector))
    return split < SPLIT_TOL * math.sqrt(1.0 + abs(lam)) or cosine > PARALLEL_COSINE


def _bands_at(p: FourierPotential, lam: complex, t: float, cfg: TrackingConfig) -> Tuple[int, ...]:
    eigs = eigenvalues_at(p, t, cfg)
    nearest = sorted(eigs, key=lambda e: (abs(e.lam - lam), e.n))[:2]
    return tuple(sorted(e.n for e in nearest))


def _classify(
    p: FourierPotential, md: MonodromyData, cfg: DiagnosticsConfig
) -> SingularityCandidate | None:
    tracking = cfg.tracking
    tol = tracking.membership_tol
    if classify_discriminant(md.F, tol) is Membership.OUT:
        return None
    endpoint_zero = abs(md.F.real - 2.0) <= tol
    endpoint_pi = abs(md.F.real + 2.0) <= tol
    t_star = 0.0 if endpoint_zero else math.pi if endpoint_pi else _level_t(md.F)
    if not galerkin_unresolved(p, md.lam, t_star, tracking.galerkin_k):
        logger.debug("Critical point %s separates under Galerkin; not multiple", md.lam)
        return None
    if endpoint_zero or endpoint_pi:
        kind = SEMISIMPLE if md.is_scalar_monodromy(cfg.floquet.deg_tol) else JORDAN
    else:
        kind = INTERIOR
    return SingularityCandidate(
        lam=md.lam,
        t=t_star,
        kind=kind,
        F_residual=abs(md.F - 2.0 * math.cos(t_star)),
        Fprime_residual=abs(md.dF),
        bands=_bands_at(p, md.lam, t_star, tracking),
    )


def find_singularities(
    p: FourierPotential,
    cfg: DiagnosticsConfig | None = None,
    curves: Sequence[SpectralCurve] | None = None,
) -> SingularityReport:
    """Multiple eigenvalues of L_t over the tracked bands, classified by kind.

    Roots of F' seeded along the band samples are kept when they are not
    outside the spectrum and the Galerkin oracle confirms the multiple
    eigenvalue. Interior points and endpoint Jordan blocks are spectral
    singularities; semisimple endpoint doubles are not.
    """

    cfg = cfg or DiagnosticsConfig()
    tracking = cfg.tracking
    if curves is None:
        curves = track_bands(p, tracking)
    derivatives = ordered_map(lambda c: _curve_derivatives(p, c, tracking.tol), list(curves), tracking.workers)
    seeds: List[complex] = []
    for curve, data in zip(curves, derivatives):
        seeds.extend(_seeds_for_curve(curve, data))
    if not seeds:
        return SingularityReport()
    roots = _unique(_newton_critical(p, np.array(seeds), tracking))
    classified = ordered_map(lambda md: _classify(p, md, cfg), roots, tracking.workers)
    report = SingularityReport(candidates=[c for c in classified if c is not None])
    for c in report.candidates:
        if c.singular:
            logger.info("Spectral singularity %s at t=%.6g (%s), bands %s", c.lam, c.t, c.kind, c.bands)
    return report


def multiplicity_at(
    p: FourierPotential, lam: complex, t: float, cfg: DiagnosticsConfig | None = None
) -> Tuple[int, int]:
    """(algebraic, geometric) multiplicity of lambda as an eigenvalue of L_t.

    Raises:
        NotAnEigenvalue: If |F(lambda) - 2 cos t| exceeds the membership tolerance.
    """

    cfg = cfg or DiagnosticsConfig()
    tracking = cfg.tracking
    md = fundamental_at_one(p, lam, tracking.tol, order=2)
    if abs(md.F - 2.0 * math.cos(t)) > tracking.membership_tol:
        raise NotAnEigenvalue(f"lambda={lam!r} does not solve F(lambda) = 2 cos({t}).")
    threshold = mult_threshold(md.lam, tracking.mult_tol)
    algebraic = 1
    if abs(md.dF) < threshold:
        algebraic = 2
        if md.d2F is not None and abs(md.d2F) < threshold:
            logger.warning("Root at %s has order above 2; reported as 2 (high-order, unresolved)", lam)
    at_edge = abs(t) < 1e-12 or abs(abs(t) - math.pi) < 1e-12
    geometric = 1
    if at_edge and md.is_scalar_monodromy(cfg.floquet.deg_tol):
        geometric = 2
    return algebraic, geometric
