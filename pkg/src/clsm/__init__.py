"""Context-conditional latent space model for monophonic music infilling."""

__version__ = "0.1.0"

from .alphabet import TokenAlphabet
from .corpus import TargetSpan

__all__ = ["TokenAlphabet", "TargetSpan", "__version__"]
