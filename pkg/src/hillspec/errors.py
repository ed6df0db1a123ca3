"""Exception hierarchy shared by every hillspec module.

``InputError`` subclasses describe bad user input (CLI exit code 1);
``NumericalFailure`` subclasses describe computations that could not be
completed to the requested accuracy (CLI exit code 2).
"""
from __future__ import annotations

from typing import Any, Sequence


class HillSpecError(RuntimeError):
    """Base class for all library errors."""


class InputError(HillSpecError):
    """Invalid input supplied by the caller."""


class NumericalFailure(HillSpecError):
    """A numerical procedure failed or could not be certified."""


# -- input errors -----------------------------------------------------------


class NonzeroMean(InputError):
    """The potential has a nonzero mean coefficient q0."""


class TooFewSamples(InputError):
    """Fewer than four samples were supplied for a potential."""


class NonFiniteInput(InputError):
    """A spectral parameter or coefficient is NaN or infinite."""


class ZeroProduct(InputError):
    """The two-term criterion needs ab != 0."""


class ZeroCoefficient(InputError):
    """A Fourier coefficient required by the coefficient criterion vanishes."""

    def __init__(self, message: str, *, n: int) -> None:
        super().__init__(message)
        self.n = n


class NotAnEigenvalue(InputError):
    """The supplied lambda does not solve F(lambda) = 2 cos t."""


class ExclusionPoint(InputError):
    """The quasimomentum is an exclusion point of the expansion."""


class ParseError(InputError):
    """A JSON or command-line value could not be parsed."""


class UsageError(InputError):
    """Invalid command-line usage."""


# -- numerical failures -----------------------------------------------------


class IntegratorFailure(NumericalFailure):
    """The ODE integrator did not reach the end of the interval."""


class EigensolverFailure(NumericalFailure):
    """The dense eigensolver did not converge."""


class NewtonDivergence(NumericalFailure):
    """Newton refinement of a discriminant root did not converge."""

    def __init__(self, message: str, *, index: Any = None) -> None:
        super().__init__(message)
        self.index = index


class SeedCollision(NumericalFailure):
    """Two seeds converged to one root without evidence of a multiple root."""


class MatchingAmbiguity(NumericalFailure):
    """Band continuation could not decide between two candidate eigenvalues."""


class DirichletDegeneracy(NumericalFailure):
    """phi(1, lambda) is too small for the closed Floquet formula."""

    def __init__(self, message: str, *, lam: complex) -> None:
        super().__init__(message)
        self.lam = lam


class MultipleEigenvalue(NumericalFailure):
    """The eigenvalue is multiple, so alpha is not defined."""

    def __init__(self, message: str, *, n: int | None = None, t: float | None = None) -> None:
        super().__init__(message)
        self.n = n
        self.t = t


class IrregularArc(NumericalFailure):
    """A sampled point of a spectral arc violates regularity."""


class QuadratureNonconvergence(NumericalFailure):
    """The t-integral does not settle as the exclusion radius shrinks."""

    def __init__(self, message: str, *, t_star: float) -> None:
        super().__init__(message)
        self.t_star = t_star


class BranchInconsistency(NumericalFailure):
    """The two reconstructions disagree beyond the cross tolerance."""

    def __init__(self, message: str, *, arcs: Sequence[int] = ()) -> None:
        super().__init__(message)
        self.arcs = list(arcs)
