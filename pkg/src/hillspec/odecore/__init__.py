"""Shooting core: fundamental solutions, monodromy data and the discriminant."""

from .shooting import (  # noqa: F401
    MonodromyData,
    SolutionTrace,
    discriminant,
    discriminant_derivative,
    discriminant_derivative_fd,
    extend_fundamental,
    fundamental_at_one,
    fundamental_at_one_fixed_step,
    fundamental_on_grid,
    monodromy_batch,
    monodromy_power,
    traces_batch,
)
