"""Indexed eigenvalues of L_t as Newton-refined roots of F(lambda) = 2 cos t."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from ..config import DEFAULTS, get_bool_env, setting
from ..errors import NewtonDivergence, SeedCollision
from ..odecore import MonodromyData, fundamental_at_one, monodromy_batch
from ..oracle import galerkin_eigenvalues
from ..potential import FourierPotential

logger = logging.getLogger(__name__)

# Two roots closer than this (relative to 1 + |lambda|) are the same root.
DUPLICATE_TOL = 1e-8
# Deflation leaves the partner of a double root about sqrt(newton_tol) away.
CLUSTER_TOL = 1e-6
_EDGE = 1e-9


def mult_threshold(lam: complex, base: float = DEFAULTS["mult_tol"]) -> float:
    """|F'| below this marks a root of F - 2 cos t as (at least) double."""

    return base / math.sqrt(1.0 + abs(lam))


@dataclass
class TrackingConfig:
    """Parameters of the eigenvalue solver and of band continuation.

    Tolerances default to ``DEFAULTS`` unless ``HILLSPEC_TOL``,
    ``HILLSPEC_NEWTON_TOL``, ``HILLSPEC_MEMBERSHIP_TOL`` or
    ``HILLSPEC_MULT_TOL`` is set.
    """

    nmax: int = int(DEFAULTS["nmax"])
    tgrid: int = int(DEFAULTS["tgrid"])
    rho: float = DEFAULTS["rho"]
    newton_tol: float = field(default_factory=lambda: setting("newton_tol"))
    newton_maxiter: int = int(DEFAULTS["newton_maxiter"])
    tol: float = field(default_factory=lambda: setting("tol"))
    membership_tol: float = field(default_factory=lambda: setting("membership_tol"))
    mult_tol: float = field(default_factory=lambda: setting("mult_tol"))
    galerkin_k: int = int(DEFAULTS["galerkin_k"])
    workers: int | None = None
    strict: bool = field(default_factory=lambda: get_bool_env("HILLSPEC_STRICT_MATCHING"))

    def __post_init__(self) -> None:
        if self.nmax < 1:
            raise ValueError(f"nmax must be at least 1, got {self.nmax}.")
        if self.tgrid < 16:
            raise ValueError(f"tgrid must be at least 16, got {self.tgrid}.")
        if not 0 < 15.0 * math.pi * self.rho < 1.0:
            raise ValueError(f"rho must satisfy 0 < 15 pi rho < 1, got {self.rho}.")
        for name in ("newton_tol", "tol", "membership_tol", "mult_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive.")


@dataclass(frozen=True)
class BlochEigenvalue:
    n: int
    t: float
    lam: complex
    multiplicity: int = 1
    dF: complex = 0j
    residual: float = 0.0


def seed_threshold(p: FourierPotential) -> int:
    """Bands |n| <= N are seeded from the Galerkin oracle."""

    return max(2 * p.order, 4)


def target(n: int, t: float) -> float:
    """Unperturbed eigenvalue (2 pi n + t)^2."""

    return (2.0 * math.pi * n + t) ** 2


def _ordering_key(n: int, t: float) -> float:
    # Clipping keeps the order 0, -1, 1, -2, 2, ... at t = 0 and t = pi.
    clipped = min(max(abs(t), _EDGE), math.pi - _EDGE)
    return target(n, clipped)


def band_order(nmax: int, t: float = 0.0) -> List[int]:
    return sorted(range(-nmax, nmax + 1), key=lambda n: _ordering_key(n, t))


@dataclass
class _NewtonResult:
    roots: np.ndarray
    converged: np.ndarray
    data: List[MonodromyData | None]


def _newton_batch(
    p: FourierPotential,
    seeds: np.ndarray,
    level: complex,
    cfg: TrackingConfig,
    deflate: np.ndarray | None = None,
) -> _NewtonResult:
    """Batched Newton on F(lambda) - level, optionally deflated by known roots."""

    roots = np.array(seeds, dtype=complex)
    converged = np.zeros(roots.size, dtype=bool)
    data: List[MonodromyData | None] = [None] * roots.size
    for _ in range(cfg.newton_maxiter + 1):
        active = np.flatnonzero(~converged)
        if active.size == 0:
            break
        batch = monodromy_batch(p, roots[active], cfg.tol, order=1)
        for j, md in zip(active, batch):
            data[j] = md
            residual = md.F - level
            if abs(residual) < cfg.newton_tol:
                converged[j] = True
                continue
            if md.dF == 0:
                continue
            ratio = md.dF / residual
            if deflate is not None and np.isfinite(deflate[j]):
                offset = roots[j] - deflate[j]
                if abs(offset) < DUPLICATE_TOL * (1.0 + abs(deflate[j])):
                    continue
                ratio -= 1.0 / offset
            if ratio == 0:
                continue
            step = 1.0 / ratio
            roots[j] = roots[j] - step
            if not np.isfinite(roots[j]):
                roots[j] = seeds[j]
    return _NewtonResult(roots=roots, converged=converged, data=data)


def newton_root(
    p: FourierPotential,
    seed: complex,
    level: complex,
    cfg: TrackingConfig | None = None,
    known: Sequence[complex] = (),
) -> MonodromyData:
    """Refine one root of F(lambda) = level, deflating against ``known`` roots.

    Raises:
        NewtonDivergence: If the residual stays above ``cfg.newton_tol``.
    """

    cfg = cfg or TrackingConfig()
    deflate = np.array([known[0]], dtype=complex) if known else None
    result = _newton_batch(p, np.array([seed], dtype=complex), level, cfg, deflate)
    if not result.converged[0]:
        raise NewtonDivergence(
            f"Newton from seed {seed!r} did not reach |F - {level!r}| < {cfg.newton_tol}.",
            index=seed,
        )
    return result.data[0]


def _seeds(p: FourierPotential, t: float, ns: Sequence[int], cfg: TrackingConfig) -> Dict[int, complex]:
    threshold = seed_threshold(p)
    seeds = {n: complex(target(n, t)) for n in ns}
    small = [n for n in ns if abs(n) <= threshold]
    if not small or p.order == 0:
        return seeds
    K = max(cfg.galerkin_k, 2 * threshold)
    values = galerkin_eigenvalues(p, t, K)
    ordered = band_order(threshold, t)
    # The 2N + 1 lowest Galerkin eigenvalues cover exactly the bands |n| <= N.
    for n, value in zip(ordered, values[: len(ordered)]):
        if n in seeds:
            seeds[n] = complex(value)
    return seeds


def eigenvalues_at(
    p: FourierPotential, t: float, cfg: TrackingConfig | None = None
) -> List[BlochEigenvalue]:
    """Eigenvalues lambda_n(t) for |n| <= nmax, ordered by band index order.

    Indices whose Newton iteration fails are logged and omitted. Roots closer
    than ``DUPLICATE_TOL`` are reported once per index with multiplicity 2,
    and such double roots are refined as zeros of F'.

    Labels at a single t are provisional: roots are assigned to indices by
    real part, which can swap two bands of a complex potential whose real
    parts cross. ``track_bands`` fixes the labels by continuation in t.

    Raises:
        SeedCollision: Two seeds converged to one simple root and deflation
            found no second root.
    """

    cfg = cfg or TrackingConfig()
    t_abs = abs(float(t))
    level = 2.0 * math.cos(t_abs)
    ns = band_order(cfg.nmax, t_abs)
    seeds = _seeds(p, t_abs, ns, cfg)
    result = _newton_batch(p, np.array([seeds[n] for n in ns]), level, cfg)

    found: Dict[int, MonodromyData] = {}
    for n, ok, md in zip(ns, result.converged, result.data):
        if ok and md is not None:
            found[n] = md
        else:
            logger.warning("Newton diverged for band n=%d at t=%.6g; index omitted", n, t)

    doubles = _resolve_duplicates(p, t_abs, level, found, cfg)
    polished = _polish_doubles(p, level, found, doubles, cfg)

    # Partner roots are labelled by real part, matching the unperturbed order.
    labels = [n for n in ns if n in found]
    roots = sorted(found.values(), key=lambda md: (md.lam.real, md.lam.imag))
    eigenvalues: List[BlochEigenvalue] = []
    for n, md in zip(labels, roots):
        multiplicity = 2 if id(md) in polished else 1
        md = polished.get(id(md), md)
        eigenvalues.append(
            BlochEigenvalue(
                n=n,
                t=float(t),
                lam=md.lam,
                multiplicity=multiplicity,
                dF=md.dF,
                residual=abs(md.F - level),
            )
        )
    return eigenvalues


def _resolve_duplicates(
    p: FourierPotential,
    t: float,
    level: float,
    found: Dict[int, MonodromyData],
    cfg: TrackingConfig,
) -> set[int]:
    """Replace duplicate roots via deflation; returns ids of merged double roots."""

    doubles: set[int] = set()
    labels = list(found)
    clashes: List[tuple[int, MonodromyData]] = []
    for i, n in enumerate(labels):
        for m in labels[:i]:
            first, second = found[m], found[n]
            if abs(first.lam - second.lam) < DUPLICATE_TOL * (1.0 + abs(first.lam)):
                clashes.append((n, first))
                break
    if not clashes:
        return doubles

    offsets = np.array([1e-3 * math.sqrt(1.0 + abs(md.lam)) for _, md in clashes])
    starts = np.array([md.lam for _, md in clashes]) + offsets
    known = np.array([md.lam for _, md in clashes])
    deflated = _newton_batch(p, starts, level, cfg, deflate=known)
    for (n, partner), ok, md in zip(clashes, deflated.converged, deflated.data):
        distinct = (
            ok
            and md is not None
            and abs(md.lam - partner.lam) >= DUPLICATE_TOL * (1.0 + abs(partner.lam))
        )
        if distinct:
            logger.info("Deflation separated band n=%d from a duplicate root at t=%.6g", n, t)
            found[n] = md
            continue
        if abs(partner.dF) < mult_threshold(partner.lam, cfg.mult_tol):
            found[n] = partner
            doubles.add(id(partner))
            continue
        raise SeedCollision(
            f"Seeds for two bands converged to the simple root {partner.lam!r} at t={t}."
        )
    return doubles


def _polish_doubles(
    p: FourierPotential,
    level: float,
    found: Dict[int, MonodromyData],
    doubles: set[int],
    cfg: TrackingConfig,
) -> Dict[int, MonodromyData]:
    """Double roots refined by Newton on F', keyed by the id of the unrefined data.

    Newton on F converges only linearly at a double root and stops about
    sqrt(newton_tol) away from it; F' has a simple zero there.
    """

    unique = list({id(md): md for md in found.values()}.values())
    polished: Dict[int, MonodromyData] = {}
    for md in unique:
        key = id(md)
        clustered = any(
            other is not md and abs(other.lam - md.lam) < CLUSTER_TOL * (1.0 + abs(md.lam)) for other in unique
        )
        if key in doubles or clustered or abs(md.dF) < mult_threshold(md.lam, cfg.mult_tol):
            refined = _critical_point(p, md, level, cfg)
            if key in doubles or abs(refined.dF) < mult_threshold(refined.lam, cfg.mult_tol):
                polished[key] = refined
    return polished


def _critical_point(
    p: FourierPotential, md: MonodromyData, level: float, cfg: TrackingConfig
) -> MonodromyData:
    best = md
    lam = md.lam
    for _ in range(cfg.newton_maxiter):
        current = monodromy_batch(p, [lam], cfg.tol, order=2)[0]
        if abs(current.dF) <= abs(best.dF) and abs(current.F - level) < cfg.newton_tol:
            best = current
        if not current.d2F:
            break
        step = current.dF / current.d2F
        lam = lam - step
        if abs(step) < 1e-14 * (1.0 + abs(lam)) or not np.isfinite(lam):
            break
    return best


class Membership(str, enum.Enum):
    IN = "in"
    OUT = "out"
    UNCERTAIN = "uncertain"


def spectrum_membership(
    p: FourierPotential, lam: complex, cfg: TrackingConfig | None = None
) -> Membership:
    """Decide lambda in sigma(L) through "F(lambda) real with |F| <= 2"."""

    cfg = cfg or TrackingConfig()
    F = fundamental_at_one(p, lam, cfg.tol).F
    return classify_discriminant(F, cfg.membership_tol)


def classify_discriminant(F: complex, tol: float) -> Membership:
    if abs(F.imag) > tol or abs(F.real) > 2.0 + tol:
        return Membership.OUT
    if abs(F.imag) < tol and abs(F.real) <= 2.0 - tol:
        return Membership.IN
    return Membership.UNCERTAIN
