"""Online coreset selection for set-membership identification."""
import logging

from .kernels import BACKEND

__all__ = ["BACKEND", "__version__"]
__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
