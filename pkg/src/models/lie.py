"""Group, algebra and coalgebra elements of a centered semi-direct product"""

from typing import Any, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


def frozen_array(value: Any) -> np.ndarray:
    """Copy `value` into a read-only float64 array with finite entries"""
    array = np.array(value, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        raise ValueError("entries must be finite")
    array.setflags(write=False)
    return array


class _Pair(BaseModel):
    """A (matrix, V-value) pair; V is Mat(n) (n x n) or a 3-index tensor space (n x n x n)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def n(self) -> int:
        return self.parts()[0].shape[0]

    def parts(self) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    @model_validator(mode="after")
    def _shapes(self):
        first, second = self.parts()
        if first.ndim != 2 or first.shape[0] != first.shape[1] or first.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {first.shape}")
        n = first.shape[0]
        if second.shape not in ((n, n), (n, n, n)):
            raise ValueError(f"V-value shape {second.shape} incompatible with n={n}")
        return self

    def stacked(self) -> np.ndarray:
        """Both components concatenated into one flat vector (row-major)"""
        first, second = self.parts()
        return np.concatenate([first.ravel(), second.ravel()])

    def distance(self, other: "_Pair") -> float:
        """Max-abs difference over both components"""
        return float(np.max(np.abs(self.stacked() - other.stacked())))


class GroupElement(_Pair):
    """(g, v) in G ⋈ V with g an invertible matrix"""
    g: np.ndarray
    v: np.ndarray

    @field_validator("g", "v", mode="before")
    @classmethod
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    @model_validator(mode="after")
    def _invertible(self) -> "GroupElement":
        # src.lie imports this module, so the guard is looked up on use
        from src.lie.algebra_core import check_invertible

        check_invertible(self.g)
        return self

    def parts(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.g, self.v


class AlgebraElement(_Pair):
    """(ξ_g, ξ_v) in g ⋈ V"""
    xi_g: np.ndarray
    xi_v: np.ndarray

    @field_validator("xi_g", "xi_v", mode="before")
    @classmethod
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    def parts(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.xi_g, self.xi_v

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(xi_g=self.xi_g + other.xi_g, xi_v=self.xi_v + other.xi_v)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(xi_g=self.xi_g - other.xi_g, xi_v=self.xi_v - other.xi_v)

    def scaled(self, factor: float) -> "AlgebraElement":
        return AlgebraElement(xi_g=factor * self.xi_g, xi_v=factor * self.xi_v)


class CoalgebraElement(_Pair):
    """(μ, γ) dual to g ⋈ V under the trace and full-contraction pairings"""
    mu: np.ndarray
    gamma: np.ndarray

    @field_validator("mu", "gamma", mode="before")
    @classmethod
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    def parts(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.mu, self.gamma

    def pair(self, xi: AlgebraElement) -> float:
        """⟨μ, ξ_g⟩ + ⟨γ, ξ_v⟩"""
        return float(np.vdot(self.mu, xi.xi_g) + np.vdot(self.gamma, xi.xi_v))

    def __add__(self, other: "CoalgebraElement") -> "CoalgebraElement":
        return CoalgebraElement(mu=self.mu + other.mu, gamma=self.gamma + other.gamma)

    def __neg__(self) -> "CoalgebraElement":
        return CoalgebraElement(mu=-self.mu, gamma=-self.gamma)


class TangentVector(_Pair):
    """(ġ, v̇), a tangent vector at some (g, v)"""
    g_dot: np.ndarray
    v_dot: np.ndarray

    @field_validator("g_dot", "v_dot", mode="before")
    @classmethod
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    def parts(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.g_dot, self.v_dot
