"""Finite-range witnesses for the large-|n| behaviour of lambda_n(t).

Both checks run on the computed indices only; a pass means the computed
eigenvalues are consistent with the asymptotics, not that they hold.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from ..potential import FourierPotential
from ..services.workers import ordered_map
from .bands import t_grid
from .eigenvalues import BlochEigenvalue, TrackingConfig, eigenvalues_at, target

logger = logging.getLogger(__name__)

N_MIN = 5
K_BOUND = 40
SEPARATION_TGRID = 64
# r_n may grow by this factor over its value on the reference indices 5..10.
DECAY_FACTOR = 10.0
DECAY_REFERENCE_MAX = 10


@dataclass(frozen=True)
class SeparationViolation:
    n: int
    t: float
    k: int
    sign: int
    distance: float
    bound: float


@dataclass
class SeparationResult:
    pairs: int = 0
    min_margin: float = math.inf
    violations: List[SeparationViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "pairs": self.pairs,
            "min_margin": self.min_margin if math.isfinite(self.min_margin) else None,
            "violations": [vars(v) for v in self.violations],
        }


def _excluded(n: int) -> set[int]:
    return {n, -n, n + 1, -(n + 1)}


def separation_check(
    p: FourierPotential,
    cfg: TrackingConfig | None = None,
    ts: Sequence[float] | None = None,
    *,
    n_min: int = N_MIN,
    k_bound: int = K_BOUND,
) -> SeparationResult:
    """|lambda_n(t) - (2 pi k +- t)^2| >= |n - k| |n + k| for n_min <= |n| <= nmax.

    Every k with |k| <= k_bound outside {n, -n, n + 1, -(n + 1)} is compared.
    The margin is the smallest ratio of distance to bound over all pairs.
    """

    cfg = cfg or TrackingConfig()
    ts = t_grid(SEPARATION_TGRID) if ts is None else np.asarray(ts, dtype=float)
    per_t: List[List[BlochEigenvalue]] = ordered_map(
        lambda t: eigenvalues_at(p, float(t), cfg), ts, cfg.workers
    )
    result = SeparationResult()
    for eigs in per_t:
        for e in eigs:
            if abs(e.n) < n_min:
                continue
            skip = _excluded(e.n)
            for k in range(-k_bound, k_bound + 1):
                if k in skip:
                    continue
                bound = float(abs(e.n - k) * abs(e.n + k))
                for sign in (1, -1):
                    distance = abs(e.lam - (2.0 * math.pi * k + sign * e.t) ** 2)
                    result.pairs += 1
                    result.min_margin = min(result.min_margin, distance / bound)
                    if distance < bound:
                        result.violations.append(SeparationViolation(e.n, e.t, k, sign, distance, bound))
    if result.violations:
        logger.warning("Separation bound fails for %d (n, t, k) triples", len(result.violations))
    return result


@dataclass
class DecayResult:
    """Per t: the sequence r_n, its reference maximum and the allowed bound per n."""

    ts: List[float] = field(default_factory=list)
    ratios: List[Dict[int, float]] = field(default_factory=list)
    reference: List[float] = field(default_factory=list)
    bounds: List[Dict[int, float]] = field(default_factory=list)

    @property
    def violations(self) -> List[tuple[int, float]]:
        return [
            (n, t)
            for t, r, b in zip(self.ts, self.ratios, self.bounds)
            for n in sorted(r)
            if r[n] > b[n]
        ]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def worst(self) -> float:
        """Largest r_n / bound_n over all samples."""

        return max(
            (r[n] / b[n] for r, b in zip(self.ratios, self.bounds) for n in r if b[n] > 0),
            default=0.0,
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "worst": self.worst,
            "samples": [
                {
                    "t": t,
                    "reference": ref,
                    "r": {str(n): v for n, v in sorted(r.items())},
                }
                for t, r, ref in zip(self.ts, self.ratios, self.reference)
            ],
            "violations": [list(v) for v in self.violations],
        }


def decay_witness(
    p: FourierPotential,
    cfg: TrackingConfig | None = None,
    ts: Sequence[float] | None = None,
) -> DecayResult:
    """r_n(t) = |lambda_n(t) - (2 pi n + t)^2| n / ln n for 5 <= n <= nmax.

    Each r_n must stay below ``DECAY_FACTOR`` times max(r_5, ..., r_10) plus
    the Newton uncertainty newton_tol / |F'(lambda_n)| on the same scale.
    Samples outside [rho, pi - rho] are dropped.

    Raises:
        ValueError: If nmax < 5.
    """

    cfg = cfg or TrackingConfig()
    if cfg.nmax < N_MIN:
        raise ValueError(f"decay witness needs nmax >= {N_MIN}, got {cfg.nmax}.")
    grid = np.linspace(cfg.rho, math.pi - cfg.rho, 16) if ts is None else np.asarray(ts, dtype=float)
    grid = grid[(grid >= cfg.rho) & (grid <= math.pi - cfg.rho)]
    per_t: List[List[BlochEigenvalue]] = ordered_map(
        lambda t: eigenvalues_at(p, float(t), cfg), grid, cfg.workers
    )
    result = DecayResult()
    top = min(DECAY_REFERENCE_MAX, cfg.nmax)
    for t, eigs in zip(grid, per_t):
        scale = {e.n: e.n / math.log(e.n) for e in eigs if e.n >= N_MIN}
        ratios = {e.n: abs(e.lam - target(e.n, float(t))) * scale[e.n] for e in eigs if e.n in scale}
        reference = max((ratios[n] for n in range(N_MIN, top + 1) if n in ratios), default=0.0)
        bounds = {}
        for e in eigs:
            if e.n not in ratios:
                continue
            uncertainty = cfg.newton_tol / abs(e.dF) if e.dF else math.inf
            bounds[e.n] = DECAY_FACTOR * reference + uncertainty * scale[e.n]
        result.ts.append(float(t))
        result.ratios.append(ratios)
        result.reference.append(reference)
        result.bounds.append(bounds)
    if not result.ok:
        logger.warning("Decay witness exceeded at %d (n, t) samples", len(result.violations))
    return result
