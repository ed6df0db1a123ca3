"""Complex periodic potentials: construction, evaluation, presets and file format."""

from .fourier import (  # noqa: F401
    FourierPotential,
    evaluate,
    from_fourier,
    from_samples,
    mathieu,
    two_term,
    zero_potential,
)
from .schema import (  # noqa: F401
    PotentialDocument,
    dump_potential,
    load_potential,
    parse_potential,
)
