"""Top-level package for spectral analysis of Hill operators with complex periodic potentials."""

__version__ = "0.1.0"

from .potential import FourierPotential, from_fourier, from_samples, load_potential, mathieu, two_term  # noqa: F401
from .services.pipeline import PipelineResult, SpectralPipeline  # noqa: F401
from .spectrum import TrackingConfig  # noqa: F401
