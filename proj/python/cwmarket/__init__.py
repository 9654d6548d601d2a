"""Curie-Weiss space-time market model: exact laws, mean-field analysis,
sampling and trader-independence testing."""

from ._cwmarket import *  # noqa: F401,F403
from ._cwmarket import (
    CapacityError,
    DegenerateClassError,
    DomainError,
    Error,
    FormatError,
    SaddlePointInvalid,
    SingularityError,
)

__version__ = "0.1.0"
