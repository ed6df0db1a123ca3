"""Finite-range spectrality diagnostics over the computed bands."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..floquet import FloquetRecord, records_for
from ..potential import FourierPotential
from ..services.workers import ordered_map
from ..spectrum import BlochEigenvalue, SpectralCurve, seed_threshold, track_bands
from .conditions import Condition2Result, check_condition2
from .singularities import JORDAN, DiagnosticsConfig, SingularityReport, find_singularities

logger = logging.getLogger(__name__)

CONSISTENT = "consistent-with-asymptotically-spectral"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"
# Relative rise that counts as growth of the projection norms toward nmax.
GROWTH_TOL = 1e-6


@dataclass
class ItemVerdict:
    ok: bool | None
    detail: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, **self.detail}


@dataclass
class SpectralityDiagnostic:
    N_used: int
    nmax: int
    item_i: ItemVerdict
    item_ii: ItemVerdict
    item_iii: ItemVerdict
    item_iv: ItemVerdict
    overall: str
    notes: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "N_used": self.N_used,
            "nmax": self.nmax,
            "item_i": self.item_i.as_dict(),
            "item_ii": self.item_ii.as_dict(),
            "item_iii": self.item_iii.as_dict(),
            "item_iv": self.item_iv.as_dict(),
            "overall": self.overall,
            "notes": list(self.notes),
        }


def _profile_ts(curves: Sequence[SpectralCurve], points: int) -> List[float]:
    ts = sorted({s.t for curve in curves for s in curve.samples if 0.0 < s.t < math.pi})
    if len(ts) <= points:
        return ts
    index = np.unique(np.linspace(0, len(ts) - 1, points).round().astype(int))
    return [ts[i] for i in index]


def _band_sups(
    p: FourierPotential, curves: Sequence[SpectralCurve], ts: Sequence[float], cfg: DiagnosticsConfig
) -> Tuple[Dict[int, float], List[Tuple[int, float]]]:
    """sup over ts of |alpha_n(t)|^-1 per band, plus the (n, t) points that were multiple."""

    def at(t: float) -> Dict[int, Any]:
        eigs: List[BlochEigenvalue] = [s for curve in curves for s in curve.samples if s.t == t]
        return records_for(p, eigs, cfg.floquet)

    sups: Dict[int, float] = {curve.n: 0.0 for curve in curves}
    multiple: List[Tuple[int, float]] = []
    for t, records in zip(ts, ordered_map(at, ts, cfg.tracking.workers)):
        for n, record in sorted(records.items()):
            if isinstance(record, FloquetRecord):
                sups[n] = max(sups[n], record.proj_norm)
            else:
                multiple.append((n, t))
    return sups, multiple


def _grows_toward_edge(sups: Dict[int, float], lo: int, hi: int) -> bool:
    levels = [max(sups.get(n, 0.0), sups.get(-n, 0.0)) for n in range(lo, hi + 1)]
    if len(levels) < 3:
        return False
    tail = levels[-3:]
    rising = all(b > a * (1.0 + GROWTH_TOL) for a, b in zip(tail, tail[1:]))
    return rising and tail[-1] >= max(levels)


def spectrality_diagnostic(
    p: FourierPotential,
    cfg: DiagnosticsConfig | None = None,
    curves: Sequence[SpectralCurve] | None = None,
    report: SingularityReport | None = None,
    n_threshold: int | None = None,
) -> SpectralityDiagnostic:
    """Evaluate the four asymptotic items on N < |n| <= nmax.

    A failing item at a computed point makes the verdict inconsistent; passing
    items only show consistency on the computed range.
    """

    cfg = cfg or DiagnosticsConfig()
    tracking = cfg.tracking
    if curves is None:
        curves = track_bands(p, tracking)
    if report is None:
        report = find_singularities(p, cfg, curves)
    N = seed_threshold(p) if n_threshold is None else int(n_threshold)
    nmax = tracking.nmax
    in_range = [curve for curve in curves if N < abs(curve.n) <= nmax]
    notes: List[str] = []
    if not in_range:
        empty = ItemVerdict(ok=None, detail={"reason": "empty range"})
        return SpectralityDiagnostic(N, nmax, empty, empty, empty, empty, INCONCLUSIVE, ["N >= nmax"])
    bands = {curve.n for curve in in_range}

    singular = sorted(set(report.S) & bands)
    item_i = ItemVerdict(ok=not singular, detail={"singular_bands": singular})

    interior_multiple = sorted(
        {(curve.n, s.t) for curve in in_range for s in curve.samples if 0.0 < s.t < math.pi and s.multiplicity > 1}
    )
    item_ii = ItemVerdict(ok=not interior_multiple, detail={"multiple_points": [list(x) for x in interior_multiple]})

    jordan = sorted(
        {n for c in report.candidates if c.kind == JORDAN for n in c.bands if n in bands}
    )
    item_iii = ItemVerdict(ok=not jordan, detail={"jordan_bands": jordan})

    ts = _profile_ts(in_range, cfg.profile_points)
    sups, multiple = _band_sups(p, in_range, ts, cfg)
    measured = max(sups.values(), default=0.0)
    growth = _grows_toward_edge(sups, N + 1, nmax)
    item_iv = ItemVerdict(
        ok=measured < cfg.alpha_bound and not growth,
        detail={
            "sup": measured,
            "bound": cfg.alpha_bound,
            "growth_toward_nmax": growth,
            "per_band": {str(n): v for n, v in sorted(sups.items())},
            "multiple_points": [list(x) for x in multiple],
        },
    )
    if multiple:
        item_ii.ok = False

    items = (item_i, item_ii, item_iii, item_iv)
    overall = INCONSISTENT if any(item.ok is False for item in items) else CONSISTENT

    if p.is_two_term and overall == CONSISTENT:
        a, b = p.coefficient(-1), p.coefficient(1)
        if a != 0 and b != 0:
            condition = check_condition2(a, b, cfg.Q, cfg.fail_tol)
            if condition.equal_moduli and condition.verdict == "fails":
                overall = INCONCLUSIVE
                notes.append("two-term angle test fails; finite range cannot confirm spectrality")
    return SpectralityDiagnostic(N, nmax, item_i, item_ii, item_iii, item_iv, overall, notes)


def separated_components(
    curves: Sequence[SpectralCurve], report: SingularityReport | None = None
) -> Dict[int, Dict[str, Any]]:
    """Per band: whether Gamma_n meets no other computed curve, with the partners met."""

    partners: Dict[int, set[int]] = {curve.n: set() for curve in curves}
    for curve in curves:
        for _, other in curve.joins:
            partners[curve.n].add(other)
    if report is not None:
        for c in report.candidates:
            for n in c.bands:
                if n in partners:
                    partners[n].update(m for m in c.bands if m != n)
    return {
        n: {"separated": not met, "partners": sorted(met)} for n, met in sorted(partners.items())
    }


def _is_mathieu(p: FourierPotential) -> bool:
    return p.is_two_term and p.coefficient(-1) == p.coefficient(1) != 0


def spectral_operator_verdict(
    p: FourierPotential,
    report: SingularityReport,
    diagnostic: SpectralityDiagnostic,
    curves: Sequence[SpectralCurve] = (),
    cfg: DiagnosticsConfig | None = None,
) -> Dict[str, Any]:
    """Whole-line verdict: spectral iff no singularities in the spectrum and none at infinity."""

    cfg = cfg or DiagnosticsConfig()
    if report.S:
        verdict = "not-spectral"
    elif diagnostic.overall == CONSISTENT:
        verdict = "consistent-with-spectral"
    elif diagnostic.overall == INCONSISTENT:
        verdict = INCONSISTENT
    else:
        verdict = INCONCLUSIVE
    result: Dict[str, Any] = {
        "singular_bands": report.S,
        "asymptotic": diagnostic.overall,
        "verdict": verdict,
    }
    if _is_mathieu(p):
        a = p.coefficient(1)
        condition: Condition2Result = check_condition2(a, a, cfg.Q, cfg.fail_tol)
        all_simple = all(s.multiplicity == 1 for curve in curves for s in curve.samples)
        result["mathieu"] = {
            "two_q_alpha": condition.doubled.as_dict(),
            "all_simple": all_simple,
        }
    return result
