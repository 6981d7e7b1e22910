"""Exceptions raised by the numerical core"""

from typing import Optional


class CsdpError(Exception):
    """Base class for all errors raised by the centered semi-direct product core"""


class DimensionMismatchError(CsdpError, ValueError):
    """Operands do not share the same dimension n or the expected shape"""


class SingularMatrixError(CsdpError):
    """A matrix used as a group element is numerically singular"""

    def __init__(self, determinant: float, threshold: float, step: Optional[int] = None):
        self.determinant = determinant
        self.threshold = threshold
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"Singular matrix{where}: |det| = {abs(determinant):.3e} <= {threshold:.3e}"
        )

    def at_step(self, step: int) -> "SingularMatrixError":
        """Return a copy tagged with the integration step that produced it"""
        return SingularMatrixError(self.determinant, self.threshold, step)
