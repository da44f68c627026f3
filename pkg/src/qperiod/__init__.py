"""Quantum periods of toric orbifolds and toric complete intersections.

The pipeline runs from a stacky fan (or GIT weight data) through an extended
I-function to the regularised quantum period, and compares the result with
the classical period of a mirror Laurent polynomial.
"""

from .giventaleng import (
    AsymptoticShapeError,
    EngineError,
    LimitError,
    QuantumPeriod,
    TwistSpec,
    asymptotics,
    quantum_period,
    regularize,
)
from .inputdoc import InputDocument, InputError
from .lperiod import LaurentPoly, classical_period, match
from .series import Series
from .stackyfan import ExtendedStackyFan, StackyFan, enumerate_classes, extend

__version__ = "0.1.0"

__all__ = [
    "AsymptoticShapeError",
    "EngineError",
    "ExtendedStackyFan",
    "InputDocument",
    "InputError",
    "LaurentPoly",
    "LimitError",
    "QuantumPeriod",
    "Series",
    "StackyFan",
    "TwistSpec",
    "asymptotics",
    "classical_period",
    "enumerate_classes",
    "extend",
    "match",
    "quantum_period",
    "regularize",
]
