"""Euler-Poincaré states, trajectories and variation curves"""

import csv
from typing import Any, List, TextIO

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .lie import AlgebraElement, CoalgebraElement, GroupElement, frozen_array
from .schemas import Orientation

STEP_UNIFORMITY_TOL = 1e-9


def _format(value: float) -> str:
    return format(float(value), ".17g")


def _index_label(index: tuple, n: int) -> str:
    separator = "_" if n > 10 else ""
    return separator.join(str(i) for i in index)


class EPState(BaseModel):
    """Group position, trivialized velocity and time; in advected runs group.v is the advected parameter"""
    model_config = ConfigDict(frozen=True)

    group: GroupElement
    algebra: AlgebraElement
    time: float


class TrajectorySample(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float
    state: EPState
    momenta: CoalgebraElement
    energy: float
    noether_residual: float


class Trajectory(BaseModel):
    """Uniformly sampled solution of an Euler-Poincaré flow"""
    instance: str
    orientation: Orientation
    h: float = Field(..., gt=0)
    samples: List[TrajectorySample] = Field(default_factory=list)

    @model_validator(mode="after")
    def _uniform_times(self) -> "Trajectory":
        times = np.array([sample.time for sample in self.samples])
        if len(times) > 1:
            steps = np.diff(times)
            if np.any(steps <= 0):
                raise ValueError("trajectory times must be strictly increasing")
            if np.max(np.abs(steps - self.h)) > STEP_UNIFORMITY_TOL * max(1.0, self.h):
                raise ValueError("trajectory times must be uniformly spaced by h")
        return self

    @property
    def times(self) -> np.ndarray:
        return np.array([sample.time for sample in self.samples])

    def max_energy_drift(self) -> float:
        energies = np.array([sample.energy for sample in self.samples])
        return float(np.max(np.abs(energies - energies[0])))

    def max_noether_residual(self) -> float:
        return float(max(sample.noether_residual for sample in self.samples))

    def csv_header(self) -> List[str]:
        first = self.samples[0].momenta
        n = first.n
        header = ["t", "energy", "noether_residual"]
        header += [f"mu_{_index_label(idx, n)}" for idx in np.ndindex(*first.mu.shape)]
        header += [f"gamma_{_index_label(idx, n)}" for idx in np.ndindex(*first.gamma.shape)]
        return header

    def write_csv(self, handle: TextIO) -> None:
        """Write one row per sample; floats use 17 significant digits"""
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(self.csv_header())
        for sample in self.samples:
            row = [sample.time, sample.energy, sample.noether_residual]
            row += list(sample.momenta.mu.ravel()) + list(sample.momenta.gamma.ravel())
            writer.writerow([_format(value) for value in row])


class VariationCurve(BaseModel):
    """
    Time-sampled variation η(t) = (η_g, η_v)(t) with its time derivative.
    Arrays are stacked along time: eta_g has shape (T, n, n), eta_v (T, *V-shape).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    times: np.ndarray
    eta_g: np.ndarray
    eta_v: np.ndarray
    eta_g_dot: np.ndarray
    eta_v_dot: np.ndarray
    endpoint_tol: float = 1e-10

    @field_validator("times", "eta_g", "eta_v", "eta_g_dot", "eta_v_dot", mode="before")
    @classmethod
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    @model_validator(mode="after")
    def _vanishes_at_endpoints(self) -> "VariationCurve":
        count = len(self.times)
        for array in (self.eta_g, self.eta_v, self.eta_g_dot, self.eta_v_dot):
            if array.shape[0] != count:
                raise ValueError("variation arrays must be sampled on the curve's times")
        for index in (0, -1):
            if max(np.max(np.abs(self.eta_g[index])), np.max(np.abs(self.eta_v[index]))) > self.endpoint_tol:
                raise ValueError("variation must vanish at both endpoints")
        return self

    def eta(self, index: int) -> AlgebraElement:
        return AlgebraElement(xi_g=self.eta_g[index], xi_v=self.eta_v[index])

    def eta_dot(self, index: int) -> AlgebraElement:
        return AlgebraElement(xi_g=self.eta_g_dot[index], xi_v=self.eta_v_dot[index])
