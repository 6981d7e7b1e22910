"""Numerical core: kernels, centered semi-direct products, instances, jets and dynamics"""

from .errors import CsdpError, DimensionMismatchError, SingularMatrixError
from .csdp_core import (
    ActionPair,
    bracket,
    coad,
    coad_group,
    compose,
    identity,
    inverse,
    random_algebra_element,
    random_group_element,
    verify_action_pair,
)
from .instances import GlMatInstance, GlT12Instance, make_instance
from .jets import jet_compose, jet_identity, jet_inverse
from .dynamics import QuadraticLagrangian, integrate, integrate_flow

__all__ = [
    "CsdpError",
    "DimensionMismatchError",
    "SingularMatrixError",
    "ActionPair",
    "bracket",
    "coad",
    "coad_group",
    "compose",
    "identity",
    "inverse",
    "random_algebra_element",
    "random_group_element",
    "verify_action_pair",
    "GlMatInstance",
    "GlT12Instance",
    "make_instance",
    "jet_compose",
    "jet_identity",
    "jet_inverse",
    "QuadraticLagrangian",
    "integrate",
    "integrate_flow",
]
