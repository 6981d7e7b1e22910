"""Data models for centered semi-direct products, jets and trajectories"""

from .lie import AlgebraElement, CoalgebraElement, GroupElement, TangentVector
from .jet import Jet2, PolyMap2
from .trajectory import EPState, Trajectory, TrajectorySample, VariationCurve

__all__ = [
    "GroupElement",
    "AlgebraElement",
    "CoalgebraElement",
    "TangentVector",
    "Jet2",
    "PolyMap2",
    "EPState",
    "Trajectory",
    "TrajectorySample",
    "VariationCurve",
]
