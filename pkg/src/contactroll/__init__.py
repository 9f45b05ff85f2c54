"""Numerical checks for surface rolling and for leaves of contact distributions."""

from .errors import ConfigError, ContactRollError
from .jets import Jet, JetSpec
from .report import ResidualRecord, ResidualReport

__version__ = "0.1.0"

__all__ = ["ConfigError", "ContactRollError", "Jet", "JetSpec", "ResidualRecord", "ResidualReport", "__version__"]
