"""Reconstruction of f from its spectral expansion, in the Bloch form and the direct lambda form.

Both forms integrate over t in (0, pi) using lambda_k(-t) = lambda_k(t): the
Bloch term of band k at t is a_k(t) psi_k,t + a_k(-t) psi_k,-t, the direct
term is 2 Phi(x, lambda) / F'(lambda) with Phi built from theta, phi and the
moments h = (phi, f), g = (theta, f) over the support of f. Bands in S are
summed before integration. Exclusion points get windows of radius
10 eps_sing; two strips closer in are added separately and the result is
extrapolated linearly in the window radius.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from ..diagnostics import SingularityReport
from ..errors import BranchInconsistency, IrregularArc, MultipleEigenvalue, QuadratureNonconvergence
from ..floquet import FloquetRecord, quadrature, records_for, records_from_traces
from ..odecore import MonodromyData, SolutionTrace, extend_fundamental, traces_batch
from ..potential import FourierPotential
from ..services.workers import ordered_map
from ..spectrum import eigenvalues_at
from .functions import TestFunction
from .gelfand import exclusion_points, fiber, parseval_check, singularity_report
from .settings import ExpansionConfig, Lattice

logger = logging.getLogger(__name__)

Group = Union[int, str]
S_GROUP = "S"
BLOCH = "bloch"
DIRECT = "direct"
MAIN, NEAR, INNER = "main", "near", "inner"
# Inner strip carrying more than this share of the near strip means the integrand is not integrable.
STRIP_RATIO_LIMIT = 0.5
NODE_CHUNK = 32


def _group_key(group: Group) -> Tuple[int, int]:
    return (0, 0) if group == S_GROUP else (1, int(group))


def gauss_panels(lo: float, hi: float, order: int, panels: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""

    x, w = leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class Segment:
    kind: str
    point: float | None
    nodes: np.ndarray
    weights: np.ndarray


def _radii(eps_sing: float) -> Tuple[float, float, float]:
    return 10.0 * eps_sing, eps_sing, 0.1 * eps_sing


def quadrature_plan(points: Sequence[float], cfg: ExpansionConfig) -> List[Segment]:
    """Main panels outside the exclusion windows plus two strips per window side."""

    outer, middle, inner = _radii(cfg.eps_sing)
    kept: List[float] = []
    for point in sorted(points):
        if kept and point - kept[-1] < 2.0 * outer:
            logger.warning("Exclusion point t=%.6g overlaps the window at t=%.6g; merged", point, kept[-1])
            continue
        kept.append(point)

    pieces: List[Tuple[float, float]] = []
    start = 0.0
    for point in kept:
        left, right = max(0.0, point - outer), min(math.pi, point + outer)
        if left > start:
            pieces.append((start, left))
        start = max(start, right)
    if start < math.pi:
        pieces.append((start, math.pi))

    main_nodes, main_weights = [], []
    for lo, hi in pieces:
        panels = max(1, math.ceil((hi - lo) / math.pi * cfg.tgrid / cfg.order))
        nodes, weights = gauss_panels(lo, hi, cfg.order, panels)
        main_nodes.append(nodes)
        main_weights.append(weights)
    segments = [Segment(MAIN, None, np.concatenate(main_nodes), np.concatenate(main_weights))]

    strip_order = max(cfg.order // 2, 4)
    for point in kept:
        sides = [side for side, ok in ((1.0, point < math.pi), (-1.0, point > 0.0)) if ok]
        for kind, near_r, far_r in ((NEAR, middle, outer), (INNER, inner, middle)):
            nodes, weights = [], []
            for side in sides:
                a, b = sorted((point + side * near_r, point + side * far_r))
                n_, w_ = gauss_panels(a, b, strip_order)
                nodes.append(n_)
                weights.append(w_)
            segments.append(Segment(kind, point, np.concatenate(nodes), np.concatenate(weights)))
    return segments


@dataclass
class _NodeTerms:
    t: float
    coefficients: Dict[int, Tuple[complex, complex]] = field(default_factory=dict)
    terms: Dict[str, Dict[Group, np.ndarray]] = field(default_factory=lambda: {BLOCH: {}, DIRECT: {}})
    omitted: List[int] = field(default_factory=list)


@dataclass
class ExpansionIntegrals:
    """Weighted sums per form, segment and group, before the 1 / (2 pi) factor."""

    segments: List[Segment]
    sums: Dict[str, List[Dict[Group, np.ndarray]]]
    coefficient_table: Dict[float, Dict[int, complex]]
    omitted: List[Tuple[int, float]]


@dataclass
class ReconstructionReport:
    method: str
    x: np.ndarray
    f: np.ndarray
    f_hat: np.ndarray
    abs_error: float
    rel_error: float
    parseval: float
    band_norms: Dict[str, float]
    coefficient_ts: np.ndarray
    coefficients: Dict[int, np.ndarray]
    extrapolation: Dict[str, Any]
    exclusion_points: List[float]
    singular_bands: List[int]
    sign_flips: List[str] = field(default_factory=list)
    agreement: float | None = None
    omitted: List[Tuple[int, float]] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)


class ExpansionEngine:
    """Evaluates every quadrature node once and serves both reconstructions."""

    def __init__(
        self,
        p: FourierPotential,
        f: TestFunction,
        cfg: ExpansionConfig | None = None,
        report: SingularityReport | None = None,
    ) -> None:
        self.p = p
        self.f = f
        self.cfg = cfg or ExpansionConfig()
        self.report = singularity_report(p, self.cfg, report)
        self.grid = self.cfg.grid
        self.lattice: Lattice = self.cfg.lattice
        self.points = exclusion_points(self.report)
        self.S = {n for n in self.report.S if abs(n) <= self.cfg.nmax}
        self.f_lattice = f(self.lattice.x)
        self.f_norm = f.norm()
        self._f_cells = {k: f(self.grid + k) for k in f.cells}
        self._cells = sorted(set(f.cells) | set(self.lattice.cells))

    def _group(self, n: int) -> Group:
        return S_GROUP if n in self.S else n

    def _kernel(self, trace: SolutionTrace, md: MonodromyData) -> np.ndarray:
        """Phi(x, lambda) on the lattice: A theta + B phi with A, B from h = (phi, f) and g = (theta, f)."""

        extended = {k: extend_fundamental(trace, md, k) for k in self._cells}
        h = sum(quadrature.bilinear(extended[k][1], values, self.grid) for k, values in self._f_cells.items())
        g = sum(quadrature.bilinear(extended[k][0], values, self.grid) for k, values in self._f_cells.items())
        half = 0.5 * (md.theta1 - md.dphi1)
        A = half * h - md.phi1 * g
        B = md.dtheta1 * h + half * g
        return self.lattice.assemble(lambda k: A * extended[k][0] + B * extended[k][1])

    def _evaluate(self, t: float) -> _NodeTerms:
        cfg = self.cfg
        node = _NodeTerms(t=float(t))
        eigs = eigenvalues_at(self.p, t, cfg.tracking)
        if not eigs:
            return node
        traces, data = traces_batch(self.p, [e.lam for e in eigs], self.grid, cfg.tracking.tol, order=1)
        plus = records_from_traces(self.p, eigs, traces, data, cfg.floquet)
        mirrored = [dataclasses.replace(e, t=-float(t)) for e in eigs]
        minus = records_from_traces(self.p, mirrored, traces, data, cfg.floquet)
        fiber_plus = fiber(self.f, t, self.grid)
        fiber_minus = fiber(self.f, -t, self.grid)
        for e, trace, md in zip(eigs, traces, data):
            rp, rm = plus.get(e.n), minus.get(e.n)
            if not (isinstance(rp, FloquetRecord) and isinstance(rm, FloquetRecord)):
                logger.warning("Band n=%d is multiple at t=%.6g; omitted from the expansion", e.n, t)
                node.omitted.append(e.n)
                continue
            a_plus = quadrature.inner(fiber_plus, rp.psi_star, self.grid) / rp.alpha
            a_minus = quadrature.inner(fiber_minus, rm.psi_star, self.grid) / rm.alpha
            node.coefficients[e.n] = (a_plus, a_minus)
            bloch = a_plus * self.lattice.quasi_periodic(rp.psi, t) + a_minus * self.lattice.quasi_periodic(rm.psi, -t)
            direct = 2.0 * self._kernel(trace, md) / md.dF
            group = self._group(e.n)
            for form, values in ((BLOCH, bloch), (DIRECT, direct)):
                terms = node.terms[form]
                terms[group] = terms[group] + values if group in terms else values
        return node

    @cached_property
    def integrals(self) -> ExpansionIntegrals:
        segments = quadrature_plan(self.points, self.cfg)
        jobs = [(i, float(t), float(w)) for i, seg in enumerate(segments) for t, w in zip(seg.nodes, seg.weights)]
        logger.info("Evaluating %d quadrature nodes for %d bands", len(jobs), 2 * self.cfg.nmax + 1)
        sums: Dict[str, List[Dict[Group, np.ndarray]]] = {
            form: [dict() for _ in segments] for form in (BLOCH, DIRECT)
        }
        table: Dict[float, Dict[int, complex]] = {}
        omitted: List[Tuple[int, float]] = []
        workers = self.cfg.tracking.workers
        for start in range(0, len(jobs), NODE_CHUNK):
            chunk = jobs[start : start + NODE_CHUNK]
            nodes = ordered_map(lambda job: self._evaluate(job[1]), chunk, workers)
            for (index, t, weight), node in zip(chunk, nodes):
                for form, terms in node.terms.items():
                    bucket = sums[form][index]
                    for group in sorted(terms, key=_group_key):
                        weighted = weight * terms[group]
                        bucket[group] = bucket[group] + weighted if group in bucket else weighted
                table[t] = {n: a for n, (a, _) in node.coefficients.items()}
                table[-t] = {n: a for n, (_, a) in node.coefficients.items()}
                omitted.extend((n, t) for n in node.omitted)
        return ExpansionIntegrals(segments, sums, table, omitted)

    def _totals(self, form: str) -> Dict[str, Dict[Group, np.ndarray]]:
        integrals = self.integrals
        totals: Dict[str, Dict[Group, np.ndarray]] = {MAIN: {}, NEAR: {}, INNER: {}}
        for segment, bucket in zip(integrals.segments, integrals.sums[form]):
            target = totals[segment.kind]
            for group in sorted(bucket, key=_group_key):
                target[group] = target[group] + bucket[group] if group in target else bucket[group]
        return totals

    def group_values(self, form: str) -> Dict[Group, np.ndarray]:
        """Per-group contributions I3 + (I3 - I2) / 9, scaled by 1 / (2 pi)."""

        totals = self._totals(form)
        zero = np.zeros(self.lattice.x.shape, dtype=complex)
        groups = sorted(set().union(*totals.values()), key=_group_key)
        out: Dict[Group, np.ndarray] = {}
        for group in groups:
            main = totals[MAIN].get(group, zero)
            near = totals[NEAR].get(group, zero)
            inner = totals[INNER].get(group, zero)
            out[group] = (main + near + inner + inner / 9.0) / (2.0 * math.pi)
        return out

    def sequence(self, form: str) -> List[np.ndarray]:
        """Totals with windows 10 eps, eps and eps / 10, then the extrapolated value."""

        totals = self._totals(form)
        zero = np.zeros(self.lattice.x.shape, dtype=complex)

        def total(kind: str) -> np.ndarray:
            return sum((totals[kind][g] for g in sorted(totals[kind], key=_group_key)), zero)

        main, near, inner = total(MAIN), total(NEAR), total(INNER)
        scale = 1.0 / (2.0 * math.pi)
        return [scale * main, scale * (main + near), scale * (main + near + inner), scale * (main + near + inner + inner / 9.0)]

    def strip_ratios(self, form: str) -> Dict[float, float]:
        integrals = self.integrals
        near: Dict[float, np.ndarray] = {}
        inner: Dict[float, np.ndarray] = {}
        for segment, bucket in zip(integrals.segments, integrals.sums[form]):
            if segment.kind == MAIN or not bucket:
                continue
            target = near if segment.kind == NEAR else inner
            value = sum(bucket[g] for g in sorted(bucket, key=_group_key))
            target[segment.point] = value
        ratios: Dict[float, float] = {}
        floor = 1e-12 * max(self.f_norm, 1.0)
        for point, value in near.items():
            size = self.lattice.norm(value)
            if size > floor and point in inner:
                ratios[point] = self.lattice.norm(inner[point]) / size
        return ratios

    def check_convergence(self, form: str) -> Dict[float, float]:
        """Raises QuadratureNonconvergence when an inner strip does not shrink."""

        ratios = self.strip_ratios(form)
        for point, ratio in sorted(ratios.items()):
            if ratio > STRIP_RATIO_LIMIT:
                raise QuadratureNonconvergence(
                    f"{form} integral does not settle near t*={point:.6g} (strip ratio {ratio:.3g}).",
                    t_star=point,
                )
        return ratios

    def coefficient_lattice(self) -> Tuple[np.ndarray, Dict[int, np.ndarray]]:
        table = self.integrals.coefficient_table
        ts = np.array(sorted(table))
        bands = sorted({n for row in table.values() for n in row})
        values = {
            n: np.array([table[t].get(n, complex(np.nan, np.nan)) for t in ts], dtype=complex) for n in bands
        }
        return ts, values

    def build_report(
        self,
        method: str,
        groups: Dict[Group, np.ndarray],
        ratios: Dict[float, float],
        *,
        sign_flips: Sequence[str] = (),
        agreement: float | None = None,
    ) -> ReconstructionReport:
        lattice = self.lattice
        zero = np.zeros(lattice.x.shape, dtype=complex)
        f_hat = sum((groups[g] for g in sorted(groups, key=_group_key)), zero)
        abs_error = lattice.norm(f_hat - self.f_lattice)
        reference = lattice.norm(self.f_lattice)
        rel_error = abs_error / reference if reference else abs_error
        sequence_errors = [lattice.norm(v - self.f_lattice) / (reference or 1.0) for v in self.sequence(method)]
        ts, table = self.coefficient_lattice()
        outer, middle, inner = _radii(self.cfg.eps_sing)
        return ReconstructionReport(
            method=method,
            x=lattice.x,
            f=self.f_lattice,
            f_hat=f_hat,
            abs_error=abs_error,
            rel_error=rel_error,
            parseval=parseval_check(self.f, self.cfg),
            band_norms={str(g): lattice.norm(v) for g, v in sorted(groups.items(), key=lambda kv: _group_key(kv[0]))},
            coefficient_ts=ts,
            coefficients=table,
            extrapolation={
                "eps": [outer, middle, inner],
                "rel_error": sequence_errors,
                "strip_ratios": {repr(float(point)): ratio for point, ratio in sorted(ratios.items())},
            },
            exclusion_points=list(self.points),
            singular_bands=sorted(self.S),
            sign_flips=list(sign_flips),
            agreement=agreement,
            omitted=sorted(set(self.integrals.omitted)),
            meta={
                "nmax": self.cfg.nmax,
                "tgrid": self.cfg.tgrid,
                "eps_sing": self.cfg.eps_sing,
                "interval": list(self.cfg.interval),
                "xgrid": self.cfg.floquet.xgrid,
                "f_norm": self.f_norm,
            },
        )


def reconstruct_bloch(
    p: FourierPotential,
    f: TestFunction,
    cfg: ExpansionConfig | None = None,
    *,
    report: SingularityReport | None = None,
    engine: ExpansionEngine | None = None,
) -> ReconstructionReport:
    """f-hat from the Bloch expansion, bands in S integrated jointly.

    Raises:
        QuadratureNonconvergence: When the integral does not settle near an exclusion point.
    """

    engine = engine or ExpansionEngine(p, f, cfg, report)
    ratios = engine.check_convergence(BLOCH)
    return engine.build_report(BLOCH, engine.group_values(BLOCH), ratios)


def reconstruct_direct(
    p: FourierPotential,
    f: TestFunction,
    cfg: ExpansionConfig | None = None,
    *,
    report: SingularityReport | None = None,
    engine: ExpansionEngine | None = None,
) -> ReconstructionReport:
    """f-hat from the lambda form, each band traversed from lambda_k(pi) to lambda_k(0).

    Every group is compared with its Bloch counterpart; a group that matches
    only after a sign change is flipped and logged.

    Raises:
        BranchInconsistency: When some arc disagrees with the Bloch form beyond
            ``cross_tol`` times the norm of f under either sign.
        QuadratureNonconvergence: As for ``reconstruct_bloch``.
    """

    engine = engine or ExpansionEngine(p, f, cfg, report)
    ratios = engine.check_convergence(DIRECT)
    bloch = engine.group_values(BLOCH)
    direct = engine.group_values(DIRECT)
    lattice = engine.lattice
    scale = engine.cfg.cross_tol * engine.f_norm
    zero = np.zeros(lattice.x.shape, dtype=complex)

    flips: List[str] = []
    bad: List[Group] = []
    for group in sorted(direct, key=_group_key):
        reference = bloch.get(group, zero)
        if lattice.norm(direct[group] - reference) <= scale:
            continue
        if lattice.norm(direct[group] + reference) <= scale:
            logger.info("Flipping the orientation of arc %s", group)
            direct[group] = -direct[group]
            flips.append(str(group))
        else:
            bad.append(group)

    f_bloch = sum((bloch[g] for g in sorted(bloch, key=_group_key)), zero)
    f_direct = sum((direct[g] for g in sorted(direct, key=_group_key)), zero)
    agreement = lattice.norm(f_direct - f_bloch)
    if bad or agreement > scale:
        arcs = sorted({n for g in bad for n in (sorted(engine.S) if g == S_GROUP else [int(g)])})
        raise BranchInconsistency(
            f"Direct and Bloch reconstructions differ by {agreement:.3g} (tolerance {scale:.3g}); arcs {arcs}.",
            arcs=arcs,
        )
    return engine.build_report(DIRECT, direct, ratios, sign_flips=flips, agreement=agreement)


@dataclass(frozen=True)
class ArcProjection:
    n: int
    t_interval: Tuple[float, float]
    x: np.ndarray
    values: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(max(integrate.trapezoid(np.abs(self.values) ** 2, self.x), 0.0)))


def project_arc(
    p: FourierPotential,
    f: TestFunction,
    n: int,
    t_interval: Tuple[float, float],
    cfg: ExpansionConfig | None = None,
) -> ArcProjection:
    """(2 pi)^-1 times the integral over the t-interval of (f, chi_n,t) psi_n,t, on the lattice.

    Raises:
        IrregularArc: When lambda_n(t) is multiple at a quadrature node.
        KeyError: When band n is not resolved at some node.
    """

    cfg = cfg or ExpansionConfig()
    lo, hi = (float(v) for v in t_interval)
    if not -math.pi <= lo < hi <= math.pi:
        raise ValueError(f"t-interval must satisfy -pi <= t0 < t1 <= pi, got {t_interval}.")
    if abs(n) > cfg.nmax:
        cfg = cfg.with_nmax(abs(n))
    grid, lattice = cfg.grid, cfg.lattice
    panels = max(1, math.ceil((hi - lo) / math.pi * cfg.tgrid / cfg.order))
    nodes, weights = gauss_panels(lo, hi, cfg.order, panels)

    def term(t: float) -> np.ndarray:
        eig = next((e for e in eigenvalues_at(p, abs(t), cfg.tracking) if e.n == n), None)
        if eig is None:
            raise KeyError(f"Band {n} is not available at t={t}.")
        record = records_for(p, [dataclasses.replace(eig, t=t)], cfg.floquet)[n]
        if isinstance(record, MultipleEigenvalue):
            raise IrregularArc(f"lambda_{n}({t:.6g}) is multiple; the arc is not regular.") from record
        a = quadrature.inner(fiber(f, t, grid), record.psi_star, grid) / record.alpha
        return a * lattice.quasi_periodic(record.psi, t)

    terms = ordered_map(term, [float(t) for t in nodes], cfg.tracking.workers)
    values = np.zeros(lattice.x.shape, dtype=complex)
    for weight, value in zip(weights, terms):
        values += weight * value
    return ArcProjection(n=n, t_interval=(lo, hi), x=lattice.x, values=values / (2.0 * math.pi))


def _pairs(values: np.ndarray) -> Dict[str, List[float | None]]:
    def clean(v: float) -> float | None:
        return None if math.isnan(v) else float(v)

    return {"re": [clean(v) for v in values.real], "im": [clean(v) for v in values.imag]}


def report_document(report: ReconstructionReport) -> Dict[str, Any]:
    """JSON-ready view of a report: metrics, extrapolation sequence and the coefficient lattice."""

    return {
        "method": report.method,
        "abs_error": report.abs_error,
        "rel_error": report.rel_error,
        "parseval": report.parseval,
        "agreement": report.agreement,
        "band_norms": dict(report.band_norms),
        "extrapolation": report.extrapolation,
        "exclusion_points": list(report.exclusion_points),
        "singular_bands": list(report.singular_bands),
        "sign_flips": list(report.sign_flips),
        "omitted": [[n, t] for n, t in report.omitted],
        "coefficients": {
            "t": [float(t) for t in report.coefficient_ts],
            "bands": {str(n): _pairs(values) for n, values in sorted(report.coefficients.items())},
        },
        "meta": dict(report.meta),
    }


def reconstruction_csv(report: ReconstructionReport) -> str:
    """Rows (x, Re f, Im f, Re f-hat, Im f-hat)."""

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["x", "re_f", "im_f", "re_fhat", "im_fhat"])
    for x, f, g in zip(report.x, report.f, report.f_hat):
        writer.writerow([repr(float(v)) for v in (x, f.real, f.imag, g.real, g.imag)])
    return buffer.getvalue()
