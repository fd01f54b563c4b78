"""Shortest reset words, gadget reductions from CSPs, and expander walks."""

from .automaton import Dfa, StateSet, apply, cerny, image, is_synchronizing, validate
from .errors import (CapacityError, LimitReached, NotSynchronizingError, ParseError,
                     PropertyViolation, SynlabError, ValidationError)

__version__ = "0.1.0"

__all__ = [
    "Dfa", "StateSet", "apply", "cerny", "image", "is_synchronizing", "validate",
    "CapacityError", "LimitReached", "NotSynchronizingError", "ParseError",
    "PropertyViolation", "SynlabError", "ValidationError",
]
