"""Expansion parameters and the reconstruction lattice on [a, b]."""
from __future__ import annotations

import cmath
import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np
from scipy import integrate

from ..config import DEFAULTS, setting
from ..floquet import FloquetConfig
from ..spectrum import TrackingConfig

# Gauss-Legendre nodes per panel on the open part of (0, pi); strips use half as many.
PANEL_ORDER = 16
MAX_EPS_SING = 1e-2


@dataclass
class ExpansionConfig:
    """Reconstruction parameters; ``HILLSPEC_EPS_SING`` and ``HILLSPEC_CROSS_TOL`` override the defaults."""

    floquet: FloquetConfig = field(default_factory=FloquetConfig)
    tgrid: int = int(DEFAULTS["tgrid"])
    eps_sing: float = field(default_factory=lambda: setting("eps_sing"))
    interval: Tuple[int, int] = (-2, 2)
    order: int = PANEL_ORDER
    cross_tol: float = field(default_factory=lambda: setting("cross_tol"))

    def __post_init__(self) -> None:
        if self.tgrid < 64:
            raise ValueError(f"tgrid must be at least 64, got {self.tgrid}.")
        if not 0 < self.eps_sing <= MAX_EPS_SING:
            raise ValueError(f"eps_sing must lie in (0, {MAX_EPS_SING}], got {self.eps_sing}.")
        a, b = self.interval
        if int(a) != a or int(b) != b or a >= b:
            raise ValueError(f"interval must be integers a < b, got {self.interval}.")
        self.interval = (int(a), int(b))
        if self.order < 4:
            raise ValueError(f"order must be at least 4, got {self.order}.")
        if self.cross_tol <= 0:
            raise ValueError("cross_tol must be positive.")

    @classmethod
    def create(
        cls,
        *,
        nmax: int = int(DEFAULTS["nmax"]),
        tgrid: int = int(DEFAULTS["tgrid"]),
        eps_sing: float | None = None,
        interval: Tuple[int, int] = (-2, 2),
        xgrid: int = int(DEFAULTS["xgrid"]),
        cross_tol: float | None = None,
        workers: int | None = None,
        tracking: TrackingConfig | None = None,
    ) -> "ExpansionConfig":
        base = tracking or TrackingConfig()
        tracking = dataclasses.replace(base, nmax=nmax, workers=workers if workers is not None else base.workers)
        return cls(
            floquet=FloquetConfig(tracking=tracking, xgrid=xgrid),
            tgrid=tgrid,
            eps_sing=setting("eps_sing") if eps_sing is None else eps_sing,
            interval=interval,
            cross_tol=setting("cross_tol") if cross_tol is None else cross_tol,
        )

    @property
    def tracking(self) -> TrackingConfig:
        return self.floquet.tracking

    @property
    def nmax(self) -> int:
        return self.tracking.nmax

    @property
    def grid(self) -> np.ndarray:
        return self.floquet.grid

    @property
    def lattice(self) -> "Lattice":
        a, b = self.interval
        return Lattice(a, b, self.floquet.xgrid)

    def with_nmax(self, nmax: int) -> "ExpansionConfig":
        floquet = dataclasses.replace(self.floquet, tracking=dataclasses.replace(self.tracking, nmax=nmax))
        return dataclasses.replace(self, floquet=floquet)

    def with_tgrid(self, tgrid: int) -> "ExpansionConfig":
        return dataclasses.replace(self, tgrid=tgrid)


@dataclass(frozen=True)
class Lattice:
    """Points a + j/m, j = 0..(b - a) m; cell k holds the grid shifted by k."""

    a: int
    b: int
    m: int

    @property
    def x(self) -> np.ndarray:
        return self.a + np.arange((self.b - self.a) * self.m + 1) / self.m

    @property
    def cells(self) -> range:
        return range(self.a, self.b)

    def assemble(self, block: Callable[[int], np.ndarray]) -> np.ndarray:
        """Concatenate per-cell samples on the (m + 1)-point grid into lattice values."""

        pieces = [np.asarray(block(k))[: self.m] for k in self.cells]
        pieces.append(np.asarray(block(self.b - 1))[self.m :])
        return np.concatenate(pieces)

    def quasi_periodic(self, values: np.ndarray, t: float) -> np.ndarray:
        """Extend samples with multiplier exp(i t) from [0, 1] to the lattice."""

        return self.assemble(lambda k: values * cmath.exp(1j * k * t))

    def norm(self, values: np.ndarray) -> float:
        return float(np.sqrt(max(integrate.trapezoid(np.abs(values) ** 2, self.x), 0.0)))
