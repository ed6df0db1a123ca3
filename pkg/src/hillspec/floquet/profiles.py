"""alpha_n(t) along a band, projection norms of arcs and partial-sum ratios."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import IrregularArc, MultipleEigenvalue
from ..potential import FourierPotential
from ..services.workers import ordered_map
from . import quadrature
from .eigenfunctions import FloquetConfig, FloquetRecord, eigenfunction_pair, floquet_records

logger = logging.getLogger(__name__)

REFINEMENT_LEVELS = 3


@dataclass(frozen=True)
class AlphaSample:
    t: float
    alpha: complex | None

    @property
    def multiple(self) -> bool:
        return self.alpha is None

    @property
    def proj_norm(self) -> float | None:
        return None if self.alpha is None else 1.0 / abs(self.alpha)


def _alpha_or_marker(p: FourierPotential, n: int, t: float, cfg: FloquetConfig) -> AlphaSample:
    try:
        return AlphaSample(t=float(t), alpha=eigenfunction_pair(p, n, t, cfg).alpha)
    except MultipleEigenvalue:
        logger.info("Band n=%d has a multiple eigenvalue at t=%.6g", n, t)
        return AlphaSample(t=float(t), alpha=None)


def alpha_profile(
    p: FourierPotential,
    n: int,
    ts: Sequence[float] | np.ndarray,
    cfg: FloquetConfig | None = None,
) -> List[AlphaSample]:
    """alpha_n(t) on the given t values; multiple eigenvalues become markers."""

    cfg = cfg or FloquetConfig()
    return ordered_map(lambda t: _alpha_or_marker(p, n, float(t), cfg), list(ts), cfg.tracking.workers)


def alpha_profile_csv(n: int, profile: Sequence[AlphaSample]) -> str:
    """Rows (n, t, |alpha|, ||P||); multiple eigenvalues leave the columns empty."""

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "t", "abs_alpha", "proj_norm"])
    for sample in profile:
        if sample.alpha is None:
            writer.writerow([n, repr(sample.t), "", ""])
        else:
            writer.writerow([n, repr(sample.t), repr(abs(sample.alpha)), repr(sample.proj_norm)])
    return buffer.getvalue()


def projection_norm_arc(
    p: FourierPotential,
    n: int,
    t_interval: Tuple[float, float],
    cfg: FloquetConfig | None = None,
    samples: int = 33,
) -> float:
    """sup over the arc of |alpha_n(t)|^-1, refined three times around the maximiser.

    Raises:
        IrregularArc: If a sample lies on a multiple eigenvalue.
    """

    cfg = cfg or FloquetConfig()
    lo, hi = sorted(float(v) for v in t_interval)
    ts = np.linspace(lo, hi, samples)
    best_t, best = _sup(p, n, ts, cfg)
    step = (hi - lo) / (samples - 1) if samples > 1 else 0.0
    for _ in range(REFINEMENT_LEVELS):
        if step == 0.0:
            break
        local = np.linspace(max(lo, best_t - step), min(hi, best_t + step), 9)
        local_t, local_best = _sup(p, n, local, cfg)
        if local_best > best:
            best_t, best = local_t, local_best
        step /= 4.0
    return best


def _sup(p: FourierPotential, n: int, ts: np.ndarray, cfg: FloquetConfig) -> Tuple[float, float]:
    profile = alpha_profile(p, n, ts, cfg)
    for sample in profile:
        if sample.alpha is None:
            raise IrregularArc(f"Band n={n} has a multiple eigenvalue at t={sample.t:.6g}.")
    norms = [sample.proj_norm for sample in profile]
    index = int(np.argmax(norms))
    return profile[index].t, float(norms[index])


def partial_sum_ratio(
    p: FourierPotential,
    t: float,
    cfg: FloquetConfig | None = None,
    trials: int = 100,
    seed: int = 0,
) -> float:
    """Largest ||sum_{n in J} (f, chi_n) psi_n|| / ||f|| over random index sets J.

    ``f`` is a seeded random quasi-periodic function in the span of the
    plane waves of the computed bands. The ratio is 1 at most when q = 0.
    """

    cfg = cfg or FloquetConfig()
    grid = cfg.grid
    rng = np.random.default_rng(seed)
    records: List[FloquetRecord] = [
        r for r in floquet_records(p, t, None, cfg).values() if isinstance(r, FloquetRecord)
    ]
    if not records:
        return 0.0
    modes = np.arange(-cfg.tracking.nmax, cfg.tracking.nmax + 1)
    weights = rng.standard_normal(modes.size) + 1j * rng.standard_normal(modes.size)
    f = sum(w * quadrature.plane_wave(int(k), t, grid) for k, w in zip(modes, weights))
    size = quadrature.norm(f, grid)
    terms = np.array([quadrature.inner(f, r.chi, grid) * r.psi for r in records])
    worst = 0.0
    for _ in range(trials):
        mask = rng.random(len(records)) < 0.5
        if not mask.any():
            continue
        partial = terms[mask].sum(axis=0)
        worst = max(worst, quadrature.norm(partial, grid) / size)
    return worst
