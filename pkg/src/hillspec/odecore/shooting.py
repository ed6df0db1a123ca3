"""Fundamental solutions, monodromy data and the Hill discriminant.

Both initial-value columns (theta, phi) and, on request, their first and
second lambda-derivatives are integrated as one first-order complex system:

    y'' = (q(x) - lambda) y
    y_l'' = (q - lambda) y_l - y            (zero initial data)
    y_ll'' = (q - lambda) y_ll - 2 y_l      (zero initial data)

Many spectral parameters are integrated jointly by stacking their states.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np
from scipy import integrate

from ..config import DEFAULTS
from ..errors import IntegratorFailure, NonFiniteInput
from ..potential import FourierPotential

logger = logging.getLogger(__name__)

ODE_METHOD = "DOP853"
# Rows of one block: theta, theta', phi, phi'.
_ROWS = 4


@dataclass(frozen=True)
class MonodromyData:
    """Values at x = 1 of the fundamental solutions for one lambda."""

    lam: complex
    theta1: complex
    phi1: complex
    dtheta1: complex
    dphi1: complex
    F: complex
    dF: complex
    d2F: complex | None = None

    @property
    def wronskian_defect(self) -> float:
        return abs(self.theta1 * self.dphi1 - self.dtheta1 * self.phi1 - 1.0)

    @property
    def kappa(self) -> float:
        """Scale max(1, |sqrt(lambda)|) balancing phi(1) against theta'(1)."""

        return max(1.0, math.sqrt(abs(self.lam)))

    @property
    def scaled_phi1(self) -> float:
        return abs(self.kappa * self.phi1)

    @property
    def scaled_dtheta1(self) -> float:
        return abs(self.dtheta1 / self.kappa)

    def is_scalar_monodromy(self, deg_tol: float) -> bool:
        """Both theta and phi are Floquet solutions (two eigenfunctions at t = 0 or pi)."""

        return self.scaled_phi1 < deg_tol and self.scaled_dtheta1 < deg_tol

    @property
    def matrix(self) -> np.ndarray:
        """Monodromy matrix acting on row vectors (theta(x), phi(x))."""

        return np.array(
            [[self.theta1, self.phi1], [self.dtheta1, self.dphi1]], dtype=complex
        )


@dataclass(frozen=True)
class SolutionTrace:
    """Fundamental solutions sampled along a grid."""

    lam: complex
    grid: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    dtheta: np.ndarray
    dphi: np.ndarray

    def wronskian_defect(self) -> np.ndarray:
        return np.abs(self.theta * self.dphi - self.dtheta * self.phi - 1.0)


def _check_lambdas(lams: np.ndarray) -> None:
    if not np.all(np.isfinite(lams)):
        raise NonFiniteInput(f"Spectral parameter must be finite, got {lams!r}.")


def _initial_state(size: int, order: int) -> np.ndarray:
    state = np.zeros((order + 1, _ROWS, size), dtype=complex)
    state[0, 0, :] = 1.0
    state[0, 3, :] = 1.0
    return state.ravel()


def _make_rhs(
    p: FourierPotential, lams: np.ndarray, order: int
) -> Callable[[float, np.ndarray], np.ndarray]:
    ns, qs = p.arrays()
    wave_numbers = 2.0 * np.pi * ns
    blocks = order + 1
    size = lams.size

    def rhs(x: float, y: np.ndarray) -> np.ndarray:
        state = y.reshape(blocks, _ROWS, size)
        qx = qs @ np.exp(1j * wave_numbers * x) if qs.size else 0.0
        w = qx - lams
        out = np.empty_like(state)
        out[:, 0] = state[:, 1]
        out[:, 1] = w * state[:, 0]
        out[:, 2] = state[:, 3]
        out[:, 3] = w * state[:, 2]
        for b in range(1, blocks):
            out[b, 1] -= b * state[b - 1, 0]
            out[b, 3] -= b * state[b - 1, 2]
        return out.ravel()

    return rhs


def _solve(
    p: FourierPotential,
    lams: np.ndarray,
    *,
    tol: float,
    order: int,
    x_eval: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate to max(1, x_eval[-1]); returns (state at 1, states at x_eval)."""

    if tol <= 0:
        raise ValueError(f"Integration tolerance must be positive, got {tol}.")
    _check_lambdas(lams)
    x_end = 1.0 if x_eval is None else max(1.0, float(x_eval[-1]))
    points = np.array([1.0]) if x_eval is None else np.union1d(x_eval, [1.0])
    sol = integrate.solve_ivp(
        _make_rhs(p, lams, order),
        (0.0, x_end),
        _initial_state(lams.size, order),
        method=ODE_METHOD,
        t_eval=points,
        rtol=tol,
        atol=tol,
    )
    if not sol.success:
        raise IntegratorFailure(
            f"{ODE_METHOD} failed for lambda in {lams[:3]!r}...: {sol.message}"
        )
    states = sol.y.reshape(order + 1, _ROWS, lams.size, points.size)
    at_one = states[..., int(np.searchsorted(points, 1.0))]
    if x_eval is None:
        return at_one, states
    index = np.searchsorted(points, x_eval)
    return at_one, states[..., index]


def _monodromy_from_state(lam: complex, at_one: np.ndarray, j: int, order: int) -> MonodromyData:
    theta1, dtheta1, phi1, dphi1 = (complex(at_one[0, r, j]) for r in range(_ROWS))
    dF = complex(at_one[1, 0, j] + at_one[1, 3, j]) if order >= 1 else complex("nan")
    d2F = complex(at_one[2, 0, j] + at_one[2, 3, j]) if order >= 2 else None
    return MonodromyData(
        lam=complex(lam),
        theta1=theta1,
        phi1=phi1,
        dtheta1=dtheta1,
        dphi1=dphi1,
        F=dphi1 + theta1,
        dF=dF,
        d2F=d2F,
    )


def monodromy_batch(
    p: FourierPotential,
    lams: Sequence[complex],
    tol: float = DEFAULTS["tol"],
    *,
    order: int = 1,
) -> List[MonodromyData]:
    """Monodromy data for many spectral parameters in one vectorised solve."""

    values = np.asarray(lams, dtype=complex).ravel()
    if values.size == 0:
        return []
    at_one, _ = _solve(p, values, tol=tol, order=order)
    return [_monodromy_from_state(lam, at_one, j, order) for j, lam in enumerate(values)]


def fundamental_at_one(
    p: FourierPotential,
    lam: complex,
    tol: float = DEFAULTS["tol"],
    *,
    order: int = 1,
) -> MonodromyData:
    """theta, phi and derivatives at x = 1, F(lambda) and dF/dlambda.

    Args:
        p: The potential.
        lam: Complex spectral parameter.
        tol: Absolute and relative tolerance of the adaptive integrator.
        order: Number of lambda-derivatives to integrate (1 or 2).

    Raises:
        NonFiniteInput: If ``lam`` is not finite.
        IntegratorFailure: If the integrator stops early.
    """

    return monodromy_batch(p, [lam], tol, order=order)[0]


def traces_batch(
    p: FourierPotential,
    lams: Sequence[complex],
    grid: np.ndarray,
    tol: float = DEFAULTS["tol"],
    *,
    order: int = 0,
) -> tuple[List[SolutionTrace], List[MonodromyData]]:
    """Sampled fundamental solutions plus monodromy data for many lambdas."""

    values = np.asarray(lams, dtype=complex).ravel()
    xs = _validate_grid(grid)
    if values.size == 0:
        return [], []
    at_one, states = _solve(p, values, tol=tol, order=order, x_eval=xs)
    traces = [
        SolutionTrace(
            lam=complex(lam),
            grid=xs,
            theta=states[0, 0, j].copy(),
            dtheta=states[0, 1, j].copy(),
            phi=states[0, 2, j].copy(),
            dphi=states[0, 3, j].copy(),
        )
        for j, lam in enumerate(values)
    ]
    data = [_monodromy_from_state(lam, at_one, j, order) for j, lam in enumerate(values)]
    return traces, data


def _validate_grid(grid: Sequence[float] | np.ndarray) -> np.ndarray:
    xs = np.asarray(grid, dtype=float).ravel()
    if xs.size == 0 or xs[0] < 0 or np.any(np.diff(xs) <= 0):
        raise ValueError("Grid must be non-empty, start at x >= 0 and increase strictly.")
    return xs


def fundamental_on_grid(
    p: FourierPotential,
    lam: complex,
    grid: Sequence[float] | np.ndarray,
    tol: float = DEFAULTS["tol"],
) -> SolutionTrace:
    """Dense samples of theta, phi and their x-derivatives on ``grid``."""

    traces, _ = traces_batch(p, [lam], np.asarray(grid, dtype=float), tol)
    return traces[0]


def discriminant(p: FourierPotential, lam: complex, tol: float = DEFAULTS["tol"]) -> complex:
    return fundamental_at_one(p, lam, tol).F


def discriminant_derivative(
    p: FourierPotential, lam: complex, tol: float = DEFAULTS["tol"]
) -> complex:
    return fundamental_at_one(p, lam, tol).dF


def discriminant_derivative_fd(
    p: FourierPotential,
    lam: complex,
    tol: float = DEFAULTS["tol"],
    step: float | None = None,
) -> complex:
    """Central difference of F with h = 1e-5 (1 + |lambda|); test reference only."""

    h = step if step is not None else 1e-5 * (1.0 + abs(lam))
    upper, lower = monodromy_batch(p, [lam + h, lam - h], tol, order=0)
    return (upper.F - lower.F) / (2.0 * h)


def fundamental_at_one_fixed_step(
    p: FourierPotential, lam: complex, steps: int | None = None
) -> MonodromyData:
    """Classical fourth-order Runge-Kutta with a fixed step (cross-check path)."""

    lams = np.array([lam], dtype=complex)
    _check_lambdas(lams)
    if steps is None:
        steps = max(4096, 64 * int(math.ceil(math.sqrt(abs(lam)) + 1.0)))
    rhs = _make_rhs(p, lams, 1)
    y = _initial_state(1, 1)
    h = 1.0 / steps
    for i in range(steps):
        x = i * h
        k1 = rhs(x, y)
        k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(x + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _monodromy_from_state(lam, y.reshape(2, _ROWS, 1), 0, 1)


def monodromy_power(md: MonodromyData, shift: int) -> np.ndarray:
    """Matrix P with (theta, phi)(x + shift) = (theta, phi)(x) @ P."""

    base = md.matrix
    if shift < 0:
        det = md.theta1 * md.dphi1 - md.dtheta1 * md.phi1
        base = np.array([[md.dphi1, -md.phi1], [-md.dtheta1, md.theta1]]) / det
    return np.linalg.matrix_power(base, abs(shift))


def extend_fundamental(
    trace: SolutionTrace, md: MonodromyData, shift: int
) -> tuple[np.ndarray, np.ndarray]:
    """theta(x + shift), phi(x + shift) for x on the trace grid."""

    power = monodromy_power(md, shift)
    theta = trace.theta * power[0, 0] + trace.phi * power[1, 0]
    phi = trace.theta * power[0, 1] + trace.phi * power[1, 1]
    return theta, phi
