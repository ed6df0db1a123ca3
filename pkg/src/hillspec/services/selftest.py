"""Invariant suite run by ``hillspec selftest``: small, fast instances of the library's guarantees."""
from __future__ import annotations

import cmath
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from ..diagnostics import (
    DiagnosticsConfig,
    SingularityReport,
    check_condition2,
    check_condition2_alpha,
    find_singularities,
)
from ..expansion import (
    ExpansionConfig,
    ExpansionEngine,
    bump,
    parseval_check,
    reconstruct_bloch,
    reconstruct_direct,
    shifted,
)
from ..floquet import FloquetConfig, eigenfunction_pair, floquet_derivative_identity_check
from ..odecore import discriminant_derivative_fd, fundamental_at_one, fundamental_on_grid
from ..oracle import galerkin_eigenvalues
from ..potential import mathieu, zero_potential
from ..spectrum import TrackingConfig, decay_witness, eigenvalues_at, separation_check

logger = logging.getLogger(__name__)


@dataclass
class CheckOutcome:
    name: str
    ok: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "ok": self.ok, **self.detail}


def _free_eigenvalues(cfg: TrackingConfig) -> CheckOutcome:
    worst = 0.0
    for t in (0.1, 0.5, 1.0, 2.0, 3.0):
        for e in eigenvalues_at(zero_potential(), t, cfg):
            exact = (2.0 * math.pi * e.n + t) ** 2
            worst = max(worst, abs(e.lam - exact) / exact)
    return CheckOutcome("free-eigenvalues", worst < 1e-8, {"max_rel_error": worst})


def _free_discriminant(cfg: TrackingConfig) -> CheckOutcome:
    rng = np.random.default_rng(0)
    worst = 0.0
    for lam in rng.uniform(-50.0, 2000.0, 20) + 1j * rng.uniform(-20.0, 20.0, 20):
        exact = 2.0 * cmath.cos(cmath.sqrt(lam))
        worst = max(worst, abs(fundamental_at_one(zero_potential(), complex(lam), cfg.tol).F - exact))
    return CheckOutcome("free-discriminant", worst < 1e-8, {"max_abs_error": worst})


def _wronskian_and_derivative(cfg: TrackingConfig) -> CheckOutcome:
    p = mathieu(0.4 * cmath.exp(1j * math.pi / 8))
    grid = np.linspace(0.0, 1.0, 65)
    defect, derivative = 0.0, 0.0
    for lam in (3.0 + 1.0j, 40.0 - 2.0j, 250.0 + 0.5j):
        trace = fundamental_on_grid(p, lam, grid, cfg.tol)
        defect = max(defect, float(np.max(trace.wronskian_defect())))
        exact = fundamental_at_one(p, lam, cfg.tol).dF
        derivative = max(derivative, abs(exact - discriminant_derivative_fd(p, lam, cfg.tol)) / abs(exact))
    ok = defect < 1e-8 and derivative < 1e-6
    return CheckOutcome("wronskian-and-derivative", ok, {"wronskian": defect, "dF_rel_error": derivative})


def _galerkin_agreement(cfg: TrackingConfig) -> CheckOutcome:
    worst = 0.0
    for a in (0.3, 0.5j, 0.4 * cmath.exp(1j * math.pi / 8)):
        p = mathieu(a)
        for t in (0.5, 1.0, 2.5):
            oracle = galerkin_eigenvalues(p, t, 32)
            for e in eigenvalues_at(p, t, cfg):
                if abs(e.n) <= 5:
                    nearest = oracle[int(np.argmin(np.abs(oracle - e.lam)))]
                    worst = max(worst, abs(nearest - e.lam) / max(1.0, abs(e.lam)))
    return CheckOutcome("galerkin-agreement", worst < 1e-6, {"max_rel_error": worst})


def _floquet_identity(cfg: TrackingConfig) -> CheckOutcome:
    floquet = FloquetConfig(tracking=cfg)
    p = mathieu(0.4 * cmath.exp(1j * math.pi / 8))
    worst = max(floquet_derivative_identity_check(p, n, t, floquet).error for n, t in ((0, 0.7), (2, 1.9), (-3, 2.4)))
    return CheckOutcome("floquet-derivative-identity", worst < 1e-6, {"max_rel_error": worst})


def _self_adjoint_collapse(cfg: TrackingConfig) -> CheckOutcome:
    floquet = FloquetConfig(tracking=cfg)
    p = mathieu(0.2)
    deviation = max(
        abs(abs(eigenfunction_pair(p, n, t, floquet).alpha) - 1.0)
        for n in (-2, 0, 1, 3)
        for t in (0.4, 1.5, 2.8)
    )
    report = find_singularities(p, DiagnosticsConfig(floquet=floquet))
    ok = deviation < 1e-6 and not report.S
    return CheckOutcome("self-adjoint-collapse", ok, {"max_alpha_deviation": deviation, "S": report.S})


def _asymptotics(cfg: TrackingConfig) -> CheckOutcome:
    wide = dataclasses.replace(cfg, nmax=max(cfg.nmax, 12))
    p = mathieu(0.3)
    separation = separation_check(p, wide, np.linspace(0.0, math.pi, 8))
    decay = decay_witness(p, wide, np.linspace(0.5, 2.6, 4))
    return CheckOutcome(
        "asymptotics",
        separation.ok and decay.ok,
        {"separation_margin": separation.min_margin, "decay_worst": decay.worst},
    )


def _angle_test() -> CheckOutcome:
    cases: List[Tuple[str, float, bool]] = []
    zero = check_condition2(1.0, 1.0, 10_000)
    cases.append(("alpha=0", zero.linear.min_distance, zero.verdict == "holds" and zero.linear.min_distance == 1.0))
    one = check_condition2_alpha(1.0, 10_000)
    cases.append(("alpha=1", one.linear.min_distance, one.verdict == "fails" and one.linear.witness_q == 1))
    half = check_condition2_alpha(0.5, 10_000)
    cases.append(("alpha=1/2", half.linear.min_distance, half.verdict == "fails" and half.linear.witness_q == 2))
    return CheckOutcome(
        "angle-test",
        all(ok for *_, ok in cases),
        {"cases": {name: minimum for name, minimum, _ in cases}},
    )


def _parseval() -> CheckOutcome:
    cfg = ExpansionConfig()
    functions = [bump(0.5, 0.5), shifted(bump(0.5, 0.5), 5), bump(0.3, 1.7)]
    ratios = [parseval_check(f, cfg) for f in functions]
    worst = max(abs(r - 1.0) for r in ratios)
    return CheckOutcome("parseval", worst < 1e-6, {"ratios": ratios})


def _free_reconstruction(cfg: TrackingConfig) -> CheckOutcome:
    expansion = ExpansionConfig(floquet=FloquetConfig(tracking=cfg, xgrid=128), tgrid=64, interval=(-1, 2))
    f = bump(0.5, 0.8)
    engine = ExpansionEngine(zero_potential(), f, expansion, SingularityReport())
    bloch = reconstruct_bloch(zero_potential(), f, engine=engine)
    direct = reconstruct_direct(zero_potential(), f, engine=engine)
    ok = bloch.rel_error < 5e-2 and (direct.agreement or 0.0) < 1e-6 * engine.f_norm
    return CheckOutcome("free-reconstruction", ok, {"rel_error": bloch.rel_error, "agreement": direct.agreement})


def run_selftest(cfg: TrackingConfig | None = None) -> List[CheckOutcome]:
    """Run every check; a raised library error is recorded as a failed check."""

    cfg = cfg or TrackingConfig(nmax=6, tgrid=32)
    checks: List[Tuple[str, Callable[[], CheckOutcome]]] = [
        ("free-eigenvalues", lambda: _free_eigenvalues(cfg)),
        ("free-discriminant", lambda: _free_discriminant(cfg)),
        ("wronskian-and-derivative", lambda: _wronskian_and_derivative(cfg)),
        ("galerkin-agreement", lambda: _galerkin_agreement(cfg)),
        ("floquet-derivative-identity", lambda: _floquet_identity(cfg)),
        ("self-adjoint-collapse", lambda: _self_adjoint_collapse(cfg)),
        ("asymptotics", lambda: _asymptotics(cfg)),
        ("angle-test", _angle_test),
        ("parseval", _parseval),
        ("free-reconstruction", lambda: _free_reconstruction(cfg)),
    ]
    outcomes: List[CheckOutcome] = []
    for name, check in checks:
        logger.info("Running self-test check %s", name)
        try:
            outcome = check()
        except Exception as exc:  # noqa: BLE001
            logger.exception("Self-test check %s raised", name)
            outcome = CheckOutcome(name, False, {"error": f"{type(exc).__name__}: {exc}"})
        outcomes.append(outcome)
    return outcomes
