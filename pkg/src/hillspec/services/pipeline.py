"""Orchestration between the numerical modules and the command-line payloads."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from ..diagnostics import (
    DiagnosticsConfig,
    SingularityCandidate,
    SingularityReport,
    check_condition1,
    check_condition2,
    check_condition2_alpha,
    find_singularities,
    separated_components,
    spectral_operator_verdict,
    spectrality_diagnostic,
)
from ..expansion import (
    ExpansionConfig,
    ExpansionEngine,
    TestFunction,
    reconstruct_bloch,
    reconstruct_direct,
    reconstruction_csv,
    report_document,
)
from ..odecore import fundamental_at_one
from ..potential import FourierPotential, PotentialDocument
from ..spectrum import (
    SpectralCurve,
    TrackingConfig,
    bands_document,
    bands_from_document,
    bands_to_csv,
    classify_discriminant,
    record_joins,
    track_bands,
)

logger = logging.getLogger(__name__)

BandTracker = Callable[..., List[SpectralCurve]]
SingularityFinder = Callable[..., SingularityReport]


@dataclass
class PipelineResult:
    """Structured output of one pipeline run."""

    document: Dict[str, Any]
    csv: Optional[str] = None
    summary: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)


def candidate_document(c: SingularityCandidate) -> Dict[str, Any]:
    return {
        "lambda": c.lam,
        "t": c.t,
        "kind": c.kind,
        "F_residual": c.F_residual,
        "Fprime_residual": c.Fprime_residual,
        "bands": list(c.bands),
        "singular": c.singular,
    }


def singularity_document(report: SingularityReport) -> Dict[str, Any]:
    return {
        "candidates": [candidate_document(c) for c in report.candidates],
        "S": report.S,
        "s": report.s,
        "m": report.m,
        "interior_points": report.interior_points,
        "jordan_at_pi": report.jordan_at_pi,
    }


def curves_from_document(document: Dict[str, Any]) -> List[SpectralCurve]:
    """Band curves re-ingested from a saved band document, joins included."""

    curves, _ = bands_from_document(document)
    record_joins({curve.n: curve for curve in curves})
    return curves


class SpectralPipeline:
    """Glue code that runs tracking, diagnostics and expansion for one potential."""

    def __init__(
        self,
        diagnostics: Optional[DiagnosticsConfig] = None,
        expansion: Optional[ExpansionConfig] = None,
        band_tracker: Optional[BandTracker] = None,
        singularity_finder: Optional[SingularityFinder] = None,
    ) -> None:
        self.diagnostics = diagnostics or DiagnosticsConfig()
        self.expansion = expansion or ExpansionConfig(floquet=self.diagnostics.floquet)
        self.band_tracker = band_tracker or track_bands
        self.singularity_finder = singularity_finder or find_singularities

    @property
    def tracking(self) -> TrackingConfig:
        return self.diagnostics.tracking

    def _meta(self, p: FourierPotential) -> Dict[str, Any]:
        return {
            "potential": PotentialDocument.from_potential(p).model_dump(),
            "nmax": self.tracking.nmax,
            "tgrid": self.tracking.tgrid,
            "tol": self.tracking.tol,
        }

    def run_discriminant(self, p: FourierPotential, lam: complex) -> PipelineResult:
        md = fundamental_at_one(p, lam, self.tracking.tol)
        membership = classify_discriminant(md.F, self.tracking.membership_tol)
        document = {"lambda": md.lam, "F": md.F, "dF": md.dF, "membership": membership.value}
        summary = f"F={md.F!r} dF={md.dF!r} membership={membership.value}"
        return PipelineResult(document=document, summary=summary)

    def run_bands(self, p: FourierPotential) -> PipelineResult:
        curves = self.band_tracker(p, self.tracking)
        document = bands_document(curves, meta=self._meta(p))
        suspect = [curve.n for curve in curves if curve.suspect]
        if suspect:
            logger.warning("Suspect band continuation for n in %s", suspect)
        return PipelineResult(
            document=document,
            csv=bands_to_csv(curves),
            summary=f"{len(curves)} bands, {sum(len(c.samples) for c in curves)} samples",
            metadata={"suspect": suspect},
        )

    def run_singularities(
        self, p: FourierPotential, curves: Optional[Sequence[SpectralCurve]] = None
    ) -> PipelineResult:
        if curves is None:
            curves = self.band_tracker(p, self.tracking)
        report = self.singularity_finder(p, self.diagnostics, curves)
        diagnostic = spectrality_diagnostic(p, self.diagnostics, curves, report)
        verdict = spectral_operator_verdict(p, report, diagnostic, curves, self.diagnostics)
        document = {
            "report": singularity_document(report),
            "spectrality": diagnostic.as_dict(),
            "operator": verdict,
            "components": {str(n): entry for n, entry in separated_components(curves, report).items()},
        }
        return PipelineResult(
            document=document,
            summary=f"S={report.S} s={report.s} m={report.m} verdict={verdict['verdict']}",
        )

    def run_check_two_term(self, a: complex, b: complex, Q: int) -> PipelineResult:
        result = check_condition2(a, b, Q, self.diagnostics.fail_tol)
        return PipelineResult(
            document=result.as_dict(), summary=f"{result.verdict}, min={result.linear.min_distance!r}"
        )

    def run_check_alpha(self, alpha: float, Q: int) -> PipelineResult:
        result = check_condition2_alpha(alpha, Q, self.diagnostics.fail_tol)
        return PipelineResult(
            document=result.as_dict(), summary=f"{result.verdict}, min={result.linear.min_distance!r}"
        )

    def run_check_condition1(
        self, p: FourierPotential, s: float, c: float, eps: float, nrange: Iterable[int]
    ) -> PipelineResult:
        result = check_condition1(p, s, c, eps, nrange, self.diagnostics.ratio_cap)
        violation = result.first_violation
        summary = result.verdict if violation is None else f"{result.verdict}, first violation n={violation}"
        return PipelineResult(document=result.as_dict(), summary=summary)

    def run_expand(
        self,
        p: FourierPotential,
        f: TestFunction,
        report: Optional[SingularityReport] = None,
    ) -> PipelineResult:
        engine = ExpansionEngine(p, f, self.expansion, report)
        bloch = reconstruct_bloch(p, f, engine=engine)
        direct = reconstruct_direct(p, f, engine=engine)
        document = {
            "bloch": report_document(bloch),
            "direct": report_document(direct),
            "test_function": {"label": f.label, "support": [f.a, f.b], "meta": dict(f.meta)},
            "singularities": singularity_document(engine.report),
        }
        return PipelineResult(
            document=document,
            csv=reconstruction_csv(bloch),
            summary=(
                f"rel_error={bloch.rel_error:.3e} agreement={direct.agreement:.3e} "
                f"parseval={bloch.parseval:.12f}"
            ),
        )
