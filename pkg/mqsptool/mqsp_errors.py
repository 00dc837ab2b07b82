"""Typed errors raised by the mqsptool library modules"""

from typing import Optional


class MqspError(Exception):
    """Base class for every error raised by mqsptool"""


class BackendMismatchError(MqspError):
    """Operands carry different coefficient backends (float vs. exact)"""


class VariableCountError(MqspError):
    """Operands are polynomials in a different number of variables"""


class NotOnTorusError(MqspError):
    """An evaluation point has a coordinate off the unit circle"""


class ShapeMismatchError(MqspError):
    """A matrix or operator tuple has the wrong shape"""


class CapacityError(MqspError):
    """Dense storage would exceed the configured word capacity"""


class NotUnitaryError(MqspError):
    """A sequence entry is not special-unitary"""

    def __init__(self, index: int, residual: float) -> None:
        super().__init__(f"matrix {index} is not special-unitary (residual {residual:.3e})")
        self.index = index
        self.residual = residual


class DecompositionError(MqspError):
    """A recursive decomposition could not continue"""

    def __init__(self, message: str, step: Optional[int] = None) -> None:
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class ProjectorIdentityError(DecompositionError):
    """A polynomial expected to be a rank-one projector is not one"""


class IdentityCheckError(MqspError):
    """An exact identity of the counterexample failed"""

    def __init__(self, identity: str, detail: str = "") -> None:
        message = f"identity '{identity}' failed"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.identity = identity


class PolynomialFormatError(MqspError):
    """A JSON polynomial document is malformed"""

    def __init__(self, reason: str, record: Optional[int] = None) -> None:
        if record is not None:
            reason = f"coefficient record {record}: {reason}"
        super().__init__(reason)
        self.record = record


class DegreeLimitError(DecompositionError):
    """Float decomposition refused above the supported degree"""
