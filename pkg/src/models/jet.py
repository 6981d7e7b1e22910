"""2-jet and quadratic polynomial map models"""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .lie import frozen_array
from .schemas import JetDocument

SYMMETRY_TOL = 1e-10


def _core():
    # src.lie imports this module, so its helpers are looked up on use
    from src.lie import algebra_core

    return algebra_core


def _check_linear_and_quadratic(linear: np.ndarray, quadratic: np.ndarray) -> None:
    if linear.ndim != 2 or linear.shape[0] != linear.shape[1] or linear.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {linear.shape}")
    n = linear.shape[0]
    if quadratic.shape != (n, n, n):
        raise ValueError(f"second-order part must have shape ({n}, {n}, {n}), got {quadratic.shape}")
    asymmetry = _core().asymmetry(quadratic)
    if asymmetry > SYMMETRY_TOL:
        raise ValueError(f"second-order part is not symmetric in its lower slots (asymmetry {asymmetry:.2e})")


class Jet2(BaseModel):
    """
    2-jet at a fixed point:
    - A1: first derivative matrix (T_xφ), A1[k, l] = ∂φ^k/∂x_l
    - A2: raw second partials, A2[k, i, j] = ∂²φ^k/∂x_i∂x_j, symmetric in (i, j)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    A1: np.ndarray
    A2: np.ndarray

    @field_validator("A1", "A2", mode="before")
    @classmethod
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    @model_validator(mode="after")
    def _shapes(self) -> "Jet2":
        _check_linear_and_quadratic(self.A1, self.A2)
        # jets of local diffeomorphisms only
        _core().check_invertible(self.A1)
        return self

    @property
    def n(self) -> int:
        return self.A1.shape[0]

    @classmethod
    def from_document(cls, document: JetDocument) -> "Jet2":
        core = _core()
        A1 = core.decode_array(document.A1, rank=2)
        return cls(A1=A1, A2=core.decode_array(document.A2, rank=3, n=A1.shape[0]))

    def to_document(self) -> JetDocument:
        core = _core()
        return JetDocument(A1=core.encode_array(self.A1), A2=core.encode_array(self.A2))

    def distance(self, other: "Jet2") -> float:
        return float(max(np.max(np.abs(self.A1 - other.A1)), np.max(np.abs(self.A2 - other.A2))))


class PolyMap2(BaseModel):
    """Origin-fixing quadratic map φ(x) = linear·x + ½·quadratic(x, x)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    linear: np.ndarray
    quadratic: np.ndarray

    @field_validator("linear", "quadratic", mode="before")
    @classmethod
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    @model_validator(mode="after")
    def _shapes(self) -> "PolyMap2":
        _check_linear_and_quadratic(self.linear, self.quadratic)
        return self

    @property
    def n(self) -> int:
        return self.linear.shape[0]
