"""
Concrete centered semi-direct products: GL(n) ⋈ Mat(n) and GL(n) ⋈ T¹₂(n), with the
S¹₂ restriction, plus their closed-form heart, diamond and Euler-Poincaré operators.
"""

import logging
from typing import List, Tuple

import numpy as np

from src.models.schemas import InstanceKind, Orientation
from .algebra_core import Matrix, Space, Tensor12, Tensor21, check_operand, check_same_shape, random_matrix, symmetrize
from .csdp_core import ActionPair, Check, coad_g, diamond, heart

logger = logging.getLogger(__name__)


# GL(n) ⋈ Mat(n)

def glmat_heart(A: Matrix, w: Matrix) -> Matrix:
    """A♥w = Aᵀw − wAᵀ"""
    A, w = np.asarray(A, dtype=np.float64), np.asarray(w, dtype=np.float64)
    check_same_shape(A, w)
    return A.T @ w - w @ A.T


def glmat_diamond(v: Matrix, w: Matrix) -> Matrix:
    """v◇w = vᵀw − wvᵀ"""
    v, w = np.asarray(v, dtype=np.float64), np.asarray(w, dtype=np.float64)
    check_same_shape(v, w)
    return v.T @ w - w @ v.T


def glmat_toy_ep(xi: Matrix, v: Matrix, mu: Matrix, gamma: Matrix) -> Tuple[Matrix, Matrix]:
    """
    Closed-form Euler-Poincaré equations on GL(n) ⋈ Mat(n) with left-invariant signs:
    μ̇ = (ξᵀμ − μξᵀ) + vᵀγ − γvᵀ and γ̇ = ξᵀγ − γξᵀ, where v is the Mat(n) velocity.
    """
    mu_dot = (xi.T @ mu - mu @ xi.T) + v.T @ gamma - gamma @ v.T
    gamma_dot = xi.T @ gamma - gamma @ xi.T
    return mu_dot, gamma_dot


class GlMatInstance(ActionPair):
    """GL(n) acting on Mat(n) by left and right matrix multiplication"""

    def __init__(self, n: int):
        super().__init__(n, Space.MAT, InstanceKind.GLMAT.value)

    def left_act(self, g, v):
        check_operand(g, v)
        return g @ v

    def right_act(self, v, g):
        check_operand(g, v)
        return v @ g

    def inf_left(self, xi, v):
        check_operand(xi, v)
        return xi @ v

    def inf_right(self, v, xi):
        check_operand(xi, v)
        return v @ xi

    def heart(self, xi, alpha):
        return glmat_heart(xi, alpha)

    def diamond(self, v, alpha):
        return glmat_diamond(v, alpha)


# GL(n) ⋈ T¹₂(n); T[i, j, k] = T^i_{jk}

def t12_left_act(g: Matrix, T: Tensor12) -> Tensor12:
    """(g·T)^l_{jk} = g^l_i T^i_{jk}"""
    check_operand(g, T)
    return np.einsum("li,ijk->ljk", g, T)


def t12_right_act(T: Tensor12, g: Matrix) -> Tensor12:
    """(T·g)^i_{jk} = T^i_{lm} g^l_j g^m_k"""
    check_operand(g, T)
    return np.einsum("ilm,lj,mk->ijk", T, g, g)


def t12_inf_left(xi: Matrix, T: Tensor12) -> Tensor12:
    check_operand(xi, T)
    return np.einsum("li,ijk->ljk", xi, T)


def t12_inf_right(T: Tensor12, xi: Matrix) -> Tensor12:
    """(T·ξ)^i_{jk} = T^i_{lk} ξ^l_j + T^i_{jl} ξ^l_k"""
    check_operand(xi, T)
    return np.einsum("ilk,lj->ijk", T, xi) + np.einsum("ijl,lk->ijk", T, xi)


def t12_heart(xi: Matrix, alpha: Tensor21) -> Tensor21:
    """
    (ξ♥α)_i^{jk} = ξ^l_i α_l^{jk} − α_i^{lk} ξ^j_l − α_i^{jl} ξ^k_l

    Transpose of T ↦ ξ·T − T·ξ under the full-contraction pairing.
    """
    check_operand(xi, alpha)
    return (
        np.einsum("li,ljk->ijk", xi, alpha)
        - np.einsum("ilk,jl->ijk", alpha, xi)
        - np.einsum("ijl,kl->ijk", alpha, xi)
    )


def t12_diamond(T: Tensor12, alpha: Tensor21) -> Matrix:
    """
    (T◇α)_{ab} = α_i^{bk} T^i_{ak} + α_i^{jb} T^i_{ja} − α_a^{jk} T^b_{jk}

    Transpose of ξ ↦ T·ξ − ξ·T; argument order is (V-value, V*-value).
    """
    check_same_shape(T, alpha)
    return (
        np.einsum("ibk,iak->ab", alpha, T)
        + np.einsum("ijb,ija->ab", alpha, T)
        - np.einsum("ajk,bjk->ab", alpha, T)
    )


def t12_ep_rhs(
    xi: Matrix,
    T: Tensor12,
    mu: Matrix,
    gamma: Tensor21,
    orientation: Orientation = Orientation.RIGHT,
) -> Tuple[Matrix, Tensor21]:
    """Momentum form of the tensor Euler-Poincaré equations; T is the T¹₂ velocity"""
    sign = orientation_sign(orientation)
    mu_dot = sign * (coad_g(xi, mu) + t12_diamond(T, gamma))
    gamma_dot = sign * t12_heart(xi, gamma)
    return mu_dot, gamma_dot


class GlT12Instance(ActionPair):
    """
    GL(n) acting on (1,2)-tensors: on the contravariant slot from the left, by
    pull-back of both covariant slots from the right. With symmetric_only the
    space is restricted to S¹₂, which both actions preserve.
    """

    def __init__(self, n: int, symmetric_only: bool = False):
        kind = InstanceKind.GLT12_SYM if symmetric_only else InstanceKind.GLT12
        super().__init__(n, Space.S12 if symmetric_only else Space.T12, kind.value)
        self.symmetric_only = symmetric_only

    def left_act(self, g, v):
        return t12_left_act(g, v)

    def right_act(self, v, g):
        return t12_right_act(v, g)

    def inf_left(self, xi, v):
        return t12_inf_left(xi, v)

    def inf_right(self, v, xi):
        return t12_inf_right(v, xi)

    def project(self, v):
        if self.symmetric_only:
            return symmetrize(v)
        return np.asarray(v, dtype=np.float64)

    def heart(self, xi, alpha):
        return self.project(t12_heart(xi, alpha))

    def diamond(self, v, alpha):
        return t12_diamond(v, alpha)


def orientation_sign(orientation: Orientation) -> float:
    """Sign of the coadjoint term in μ̇ = ±ad*: minus for right trivialization, plus for left"""
    orientation = Orientation(orientation)
    if orientation is Orientation.RIGHT:
        return -1.0
    if orientation is Orientation.LEFT:
        return 1.0
    raise ValueError(f"orientation must be right or left, got {orientation.value}")


def make_instance(kind: InstanceKind, n: int) -> ActionPair:
    """Build the action pair for a named instance"""
    kind = InstanceKind(kind)
    if kind is InstanceKind.GLMAT:
        return GlMatInstance(n)
    return GlT12Instance(n, symmetric_only=kind is InstanceKind.GLT12_SYM)


# Closed forms against the generic pairing-transpose operators

def _heart_closed_form(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        xi, alpha = random_matrix(rng, act.n), act.random_value(rng)
        worst = max(worst, float(np.max(np.abs(act.heart(xi, alpha) - heart(xi, alpha, act)))))
    return worst


def _diamond_closed_form(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        v, alpha = act.random_value(rng), act.random_value(rng)
        worst = max(worst, float(np.max(np.abs(act.diamond(v, alpha) - diamond(v, alpha, act)))))
    return worst


def _coad_g_closed_form(act, rng, samples, tol):
    worst = 0.0
    basis = act.gl_basis
    for _ in range(samples):
        xi, mu = random_matrix(rng, act.n), random_matrix(rng, act.n)
        values = [float(np.vdot(mu, xi @ e - e @ xi)) for e in basis]
        worst = max(worst, float(np.max(np.abs(coad_g(xi, mu) - basis.dual_from_values(np.array(values))))))
    return worst


CLOSED_FORM_CHECKS: List[Check] = [
    Check(name="heart_closed_form", run=_heart_closed_form),
    Check(name="diamond_closed_form", run=_diamond_closed_form),
    Check(name="coad_g_closed_form", run=_coad_g_closed_form),
]
