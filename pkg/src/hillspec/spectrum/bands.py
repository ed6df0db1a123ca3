"""Band curves Gamma_n assembled by continuation in the quasimomentum."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import MatchingAmbiguity
from ..potential import FourierPotential
from ..services.workers import ordered_map
from .eigenvalues import DUPLICATE_TOL, BlochEigenvalue, TrackingConfig, eigenvalues_at, target

logger = logging.getLogger(__name__)

# A match is accepted when the best distance is below this share of the runner-up.
CLEAR_WINNER = 0.5
MAX_BISECTIONS = 6
TIE_TOL = 1e-9


@dataclass
class SpectralCurve:
    n: int
    samples: List[BlochEigenvalue] = field(default_factory=list)
    closed: bool = False
    suspect: bool = False
    joins: List[Tuple[float, int]] = field(default_factory=list)

    @property
    def ts(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.lam for s in self.samples])

    def max_jump(self) -> float:
        values = self.values
        return float(np.max(np.abs(np.diff(values)))) if values.size > 1 else 0.0

    def length(self) -> float:
        """Polygonal length of the sampled curve."""

        values = self.values
        return float(np.sum(np.abs(np.diff(values)))) if values.size > 1 else 0.0


def t_grid(tgrid: int) -> np.ndarray:
    return np.linspace(0.0, math.pi, tgrid)


def in_anchor_zone(t: float, rho: float) -> bool:
    return t <= rho or t >= math.pi - rho


def _anchored(eigs: Sequence[BlochEigenvalue], rho: float) -> bool:
    """Labels from the unperturbed order are trusted inside the small disks around t = 0, pi."""

    for e in eigs:
        radius = 15.0 * math.pi * max(abs(e.n), 1) * rho
        if abs(e.lam - target(e.n, e.t)) > radius:
            return False
    return True


class _Matcher:
    """Nearest-neighbour assignment with a clear-winner test and t-bisection."""

    def __init__(self, p: FourierPotential, cfg: TrackingConfig) -> None:
        self.p = p
        self.cfg = cfg
        self.ambiguous: List[Tuple[float, int]] = []

    def match(
        self,
        previous: np.ndarray,
        candidates: np.ndarray,
        t_prev: float,
        t_next: float,
        level: int = 0,
        predicted: np.ndarray | None = None,
    ) -> np.ndarray:
        """Index into ``candidates`` for every entry of ``previous`` (-1 when unmatched)."""

        reference = previous if predicted is None else predicted
        assignment, clear = assign(reference, candidates)
        if clear.all() or level >= MAX_BISECTIONS:
            if not clear.all():
                self.ambiguous.extend((t_next, int(i)) for i in np.flatnonzero(~clear))
            return assignment
        t_mid = 0.5 * (t_prev + t_next)
        logger.info("Bisecting t-step [%.6g, %.6g] at level %d", t_prev, t_next, level + 1)
        middle = np.array([e.lam for e in eigenvalues_at(self.p, t_mid, self.cfg)])
        first = self.match(previous, middle, t_prev, t_mid, level + 1)
        bridged = np.array(
            [middle[j] if j >= 0 else previous[i] for i, j in enumerate(first)], dtype=complex
        )
        return self.match(bridged, candidates, t_mid, t_next, level + 1)


def assign(reference: np.ndarray, candidates: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Optimal assignment plus a per-row flag telling whether the winner is clear.

    Candidates tied within ``TIE_TOL`` are a band join and count as clear.
    """

    rows = reference.size
    assignment = np.full(rows, -1, dtype=int)
    clear = np.ones(rows, dtype=bool)
    if rows == 0 or candidates.size == 0:
        return assignment, clear
    cost = np.abs(np.subtract.outer(reference, candidates))
    row_index, col_index = linear_sum_assignment(cost)
    assignment[row_index] = col_index
    for i, j in zip(row_index, col_index):
        best = cost[i, j]
        others = np.delete(cost[i], j)
        others_values = np.delete(candidates, j)
        if others.size == 0:
            continue
        k = int(np.argmin(others))
        tie = abs(others_values[k] - candidates[j]) <= TIE_TOL * (1.0 + abs(candidates[j]))
        if not tie and best >= CLEAR_WINNER * others[k]:
            clear[i] = False
    _settle_joined_rows(reference, candidates, cost, assignment, clear)
    return assignment, clear


def _order_key(value: complex) -> Tuple[float, float]:
    return (value.real, value.imag)


def _settle_joined_rows(
    reference: np.ndarray, candidates: np.ndarray, cost: np.ndarray, assignment: np.ndarray, clear: np.ndarray
) -> None:
    """Two ambiguous rows leaving (nearly) one reference point trade only with each other.

    Either pairing gives continuous curves through the join, so the pair is
    clear and the candidates go out in the order of the reference values.
    """

    rows = [int(i) for i in np.flatnonzero(~clear) if assignment[i] >= 0]
    for i in rows:
        for r in rows:
            if r <= i or clear[i] or clear[r]:
                continue
            ci, cr = int(assignment[i]), int(assignment[r])
            runner_up = int(np.argsort(cost[i])[1])
            spread = min(cost[i, ci], cost[r, cr])
            if runner_up != cr or abs(reference[i] - reference[r]) >= CLEAR_WINNER * spread:
                continue
            low, high = sorted((i, r), key=lambda row: _order_key(reference[row]))
            first, second = sorted((ci, cr), key=lambda col: _order_key(candidates[col]))
            assignment[low], assignment[high] = first, second
            clear[i] = clear[r] = True


def track_bands(
    p: FourierPotential, cfg: TrackingConfig | None = None
) -> List[SpectralCurve]:
    """Curves Gamma_n for |n| <= nmax on the uniform grid of [0, pi].

    Eigenvalues are computed independently on every grid point (in parallel);
    continuation only decides labels, so the union of samples at each t is
    exactly the output of ``eigenvalues_at``.
    """

    cfg = cfg or TrackingConfig()
    ts = t_grid(cfg.tgrid)
    per_t: List[List[BlochEigenvalue]] = ordered_map(
        lambda t: eigenvalues_at(p, float(t), cfg), ts, cfg.workers
    )
    ns = list(range(-cfg.nmax, cfg.nmax + 1))
    curves: Dict[int, SpectralCurve] = {n: SpectralCurve(n=n) for n in ns}
    matcher = _Matcher(p, cfg)

    current: Dict[int, BlochEigenvalue] = {e.n: e for e in per_t[0]}
    history: Dict[int, List[complex]] = {n: [] for n in ns}
    for j, t in enumerate(ts):
        eigs = per_t[j]
        if j == 0 or (in_anchor_zone(float(t), cfg.rho) and _anchored(eigs, cfg.rho)):
            current = {e.n: e for e in eigs}
        else:
            labels = [n for n in ns if history[n]]
            previous = np.array([history[n][-1] for n in labels], dtype=complex)
            predicted = np.array(
                [2 * history[n][-1] - history[n][-2] if len(history[n]) > 1 else history[n][-1] for n in labels],
                dtype=complex,
            )
            candidates = np.array([e.lam for e in eigs], dtype=complex)
            matcher.ambiguous.clear()
            assignment = matcher.match(previous, candidates, float(ts[j - 1]), float(t), predicted=predicted)
            current = {}
            for n, k in zip(labels, assignment):
                if k >= 0:
                    e = eigs[k]
                    current[n] = BlochEigenvalue(
                        n=n, t=e.t, lam=e.lam, multiplicity=e.multiplicity, dF=e.dF, residual=e.residual
                    )
            for _, row in matcher.ambiguous:
                n = labels[row]
                curves[n].suspect = True
                message = f"Ambiguous continuation of band n={n} at t={float(t):.6g}"
                if cfg.strict:
                    raise MatchingAmbiguity(message)
                logger.warning("%s; curve marked suspect", message)
        for n in ns:
            e = current.get(n)
            if e is None:
                curves[n].suspect = True
                continue
            curves[n].samples.append(e)
            history[n].append(e.lam)

    for curve in curves.values():
        ts_curve = curve.ts
        curve.closed = bool(ts_curve.size and ts_curve[0] == 0.0 and ts_curve[-1] == ts[-1])
    record_joins(curves)
    return [curves[n] for n in ns]


def record_joins(curves: Dict[int, SpectralCurve]) -> None:
    """Append (t, partner) to both curves wherever two samples coincide."""

    by_t: Dict[float, List[Tuple[int, complex]]] = {}
    for n, curve in curves.items():
        for s in curve.samples:
            by_t.setdefault(s.t, []).append((n, s.lam))
    for t in sorted(by_t):
        entries = by_t[t]
        for i, (n, lam) in enumerate(entries):
            for m, other in entries[i + 1 :]:
                if abs(lam - other) < DUPLICATE_TOL * (1.0 + abs(lam)):
                    curves[n].joins.append((t, m))
                    curves[m].joins.append((t, n))


def curve_by_index(curves: Sequence[SpectralCurve], n: int) -> SpectralCurve:
    for curve in curves:
        if curve.n == n:
            return curve
    raise KeyError(f"Band {n} was not tracked.")
