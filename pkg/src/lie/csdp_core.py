"""
Generic centered semi-direct product G ⋈ V for G = GL(n).

Every operation is parameterized by an ActionPair: a left and a right action of
GL(n) on V that commute, together with their infinitesimal versions. Heart and
diamond are assembled generically as pairing transposes over the bases of V and
gl(n); concrete instances may override them with closed forms.
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.models.lie import AlgebraElement, CoalgebraElement, GroupElement
from src.models.schemas import CheckResult, RunReport, Tolerances
from .algebra_core import (
    DEFAULT_TOLERANCES,
    Basis,
    Matrix,
    Space,
    check_same_shape,
    fd_derivative,
    make_basis,
    mat_exp,
    mat_inverse,
    mat_mul,
    pairing,
    random_group_matrix,
    random_matrix,
    trace_pairing,
)

logger = logging.getLogger(__name__)


class ActionPair(ABC):
    """
    Commuting left and right actions of GL(n) on a vector space V.

    Subclasses provide:
    - left_act(g, v) and right_act(v, g): the group actions
    - inf_left(ξ, v) and inf_right(v, ξ): their derivatives at the identity
    Implementations must be stateless.
    """

    def __init__(self, n: int, space: Space, name: str):
        if n < 1:
            raise ValueError(f"dimension must be positive, got {n}")
        self.n = n
        self.space = space
        self.name = name

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name!r}, n={self.n})"

    @abstractmethod
    def left_act(self, g: Matrix, v: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def right_act(self, v: np.ndarray, g: Matrix) -> np.ndarray:
        pass

    @abstractmethod
    def inf_left(self, xi: Matrix, v: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def inf_right(self, v: np.ndarray, xi: Matrix) -> np.ndarray:
        pass

    @property
    def basis(self) -> Basis:
        return make_basis(self.space, self.n)

    @property
    def gl_basis(self) -> Basis:
        return make_basis(Space.GL, self.n)

    @property
    def value_shape(self) -> Tuple[int, ...]:
        return self.basis.shape

    def zero(self) -> np.ndarray:
        return np.zeros(self.value_shape)

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection onto V inside its container; identity unless V is a subspace"""
        return np.asarray(v, dtype=np.float64)

    def random_value(self, rng: np.random.Generator) -> np.ndarray:
        return self.project(rng.uniform(-1.0, 1.0, size=self.value_shape))

    def heart(self, xi: Matrix, alpha: np.ndarray) -> np.ndarray:
        return heart(xi, alpha, self)

    def diamond(self, v: np.ndarray, alpha: np.ndarray) -> Matrix:
        return diamond(v, alpha, self)


class LeftFactor(ActionPair):
    """The left semi-direct factor G ⋉ V: keeps the left action, right action trivial"""

    def __init__(self, base: ActionPair):
        super().__init__(base.n, base.space, f"{base.name}-left")
        self.base = base

    def left_act(self, g, v):
        return self.base.left_act(g, v)

    def right_act(self, v, g):
        return np.asarray(v, dtype=np.float64)

    def inf_left(self, xi, v):
        return self.base.inf_left(xi, v)

    def inf_right(self, v, xi):
        return np.zeros_like(v, dtype=np.float64)

    def project(self, v):
        return self.base.project(v)


class RightFactor(ActionPair):
    """The right semi-direct factor G ⋊ V: keeps the right action, left action trivial"""

    def __init__(self, base: ActionPair):
        super().__init__(base.n, base.space, f"{base.name}-right")
        self.base = base

    def left_act(self, g, v):
        return np.asarray(v, dtype=np.float64)

    def right_act(self, v, g):
        return self.base.right_act(v, g)

    def inf_left(self, xi, v):
        return np.zeros_like(v, dtype=np.float64)

    def inf_right(self, v, xi):
        return self.base.inf_right(v, xi)

    def project(self, v):
        return self.base.project(v)


def left_factor(act: ActionPair) -> ActionPair:
    return LeftFactor(act)


def right_factor(act: ActionPair) -> ActionPair:
    return RightFactor(act)


# Group operations

def identity(act: ActionPair) -> GroupElement:
    return GroupElement(g=np.eye(act.n), v=act.zero())


def compose(a: GroupElement, b: GroupElement, act: ActionPair) -> GroupElement:
    """(g₁, v₁)·(g₂, v₂) = (g₁g₂, g₁·v₂ + v₁·g₂)"""
    return GroupElement(
        g=mat_mul(a.g, b.g),
        v=act.left_act(a.g, b.v) + act.right_act(a.v, b.g),
    )


def inverse(a: GroupElement, act: ActionPair, tolerances: Tolerances = DEFAULT_TOLERANCES) -> GroupElement:
    """(g, v)⁻¹ = (g⁻¹, −g⁻¹·v·g⁻¹)"""
    g_inv = mat_inverse(a.g, tolerances)
    return GroupElement(g=g_inv, v=-act.left_act(g_inv, act.right_act(a.v, g_inv)))


def big_ad(a: GroupElement, b: GroupElement, act: ActionPair) -> GroupElement:
    """Conjugation AD_a(b) = a·b·a⁻¹"""
    return compose(compose(a, b, act), inverse(a, act), act)


def _adjoint(a: GroupElement, g_inv: Matrix, xi: AlgebraElement, act: ActionPair) -> AlgebraElement:
    conjugated = a.g @ xi.xi_g @ g_inv
    v_right = act.right_act(a.v, g_inv)
    xi_v = (
        act.right_act(act.inf_right(a.v, xi.xi_g), g_inv)
        + act.left_act(a.g, act.right_act(xi.xi_v, g_inv))
        - act.inf_left(conjugated, v_right)
    )
    return AlgebraElement(xi_g=conjugated, xi_v=xi_v)


def ad_big(
    a: GroupElement,
    xi: AlgebraElement,
    act: ActionPair,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> AlgebraElement:
    """Adjoint representation Ad_{(g,v)}(ξ, w) = (gξg⁻¹, v·ξg⁻¹ + g·w·g⁻¹ − (gξg⁻¹)·v·g⁻¹)"""
    check_same_shape(a.g, xi.xi_g)
    return _adjoint(a, mat_inverse(a.g, tolerances), xi, act)


def bracket(x: AlgebraElement, y: AlgebraElement, act: ActionPair) -> AlgebraElement:
    """[(ξ₁, v₁), (ξ₂, v₂)] = ([ξ₁, ξ₂], ξ₁·v₂ + v₁·ξ₂ − ξ₂·v₁ − v₂·ξ₁)"""
    check_same_shape(x.xi_g, y.xi_g)
    return AlgebraElement(
        xi_g=x.xi_g @ y.xi_g - y.xi_g @ x.xi_g,
        xi_v=(
            act.inf_left(x.xi_g, y.xi_v)
            + act.inf_right(x.xi_v, y.xi_g)
            - act.inf_left(y.xi_g, x.xi_v)
            - act.inf_right(y.xi_v, x.xi_g)
        ),
    )


# Coadjoint operators

def coad_g(xi: Matrix, mu: Matrix) -> Matrix:
    """ad*_ξ μ = ξᵀμ − μξᵀ on gl(n)* under the trace pairing"""
    xi, mu = np.asarray(xi, dtype=np.float64), np.asarray(mu, dtype=np.float64)
    check_same_shape(xi, mu)
    return xi.T @ mu - mu @ xi.T


def heart(xi: Matrix, alpha: np.ndarray, act: ActionPair) -> np.ndarray:
    """
    Generic heart operator ξ♥α, defined by ⟨ξ♥α, v⟩ = ⟨α, ξ·v − v·ξ⟩ for all v in V.

    The functional on V is evaluated on every basis element and turned back into
    its Gram-dual representative, so the result lies in V even when V is a proper
    subspace of its container.
    """
    check_same_shape(alpha, act.zero())
    basis = act.basis
    values = [pairing(alpha, act.inf_left(xi, b) - act.inf_right(b, xi)) for b in basis]
    return basis.dual_from_values(np.array(values))


def diamond(v: np.ndarray, alpha: np.ndarray, act: ActionPair) -> Matrix:
    """Generic diamond operator v◇α, defined by ⟨v◇α, ξ⟩ = ⟨α, v·ξ − ξ·v⟩ for all ξ in gl(n)"""
    check_same_shape(v, alpha)
    basis = act.gl_basis
    values = [pairing(alpha, act.inf_right(v, e) - act.inf_left(e, v)) for e in basis]
    return basis.dual_from_values(np.array(values))


def coad(xi: AlgebraElement, m: CoalgebraElement, act: ActionPair) -> CoalgebraElement:
    """ad*_{(ξ_g, ξ_v)}(μ, γ) = (ad*_{ξ_g}μ + ξ_v◇γ, ξ_g♥γ)"""
    return CoalgebraElement(
        mu=coad_g(xi.xi_g, m.mu) + act.diamond(xi.xi_v, m.gamma),
        gamma=act.heart(xi.xi_g, m.gamma),
    )


def coad_group(
    a: GroupElement,
    m: CoalgebraElement,
    act: ActionPair,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> CoalgebraElement:
    """Ad*_a m, defined by ⟨Ad*_a m, η⟩ = ⟨m, Ad_a η⟩"""
    g_inv = mat_inverse(a.g, tolerances)
    zero_v = act.zero()
    zero_g = np.zeros((act.n, act.n))
    mu_values = [m.pair(_adjoint(a, g_inv, AlgebraElement(xi_g=e, xi_v=zero_v), act)) for e in act.gl_basis]
    gamma_values = [m.pair(_adjoint(a, g_inv, AlgebraElement(xi_g=zero_g, xi_v=b), act)) for b in act.basis]
    return CoalgebraElement(
        mu=act.gl_basis.dual_from_values(np.array(mu_values)),
        gamma=act.basis.dual_from_values(np.array(gamma_values)),
    )


# Random sampling

def random_group_element(act: ActionPair, rng: np.random.Generator) -> GroupElement:
    return GroupElement(g=random_group_matrix(rng, act.n), v=act.random_value(rng))


def random_algebra_element(act: ActionPair, rng: np.random.Generator) -> AlgebraElement:
    return AlgebraElement(xi_g=random_matrix(rng, act.n), xi_v=act.random_value(rng))


def random_coalgebra_element(act: ActionPair, rng: np.random.Generator) -> CoalgebraElement:
    return CoalgebraElement(mu=random_matrix(rng, act.n), gamma=act.random_value(rng))


# Verification

CheckFn = Callable[[ActionPair, np.random.Generator, int, Tolerances], float]


class Check(BaseModel):
    """A named numerical law; `run` returns the max violation over `samples` random draws"""
    model_config = ConfigDict(frozen=True)

    name: str
    run: CheckFn
    finite_difference: bool = False

    def evaluate(
        self,
        act: ActionPair,
        rng: np.random.Generator,
        samples: int,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ) -> CheckResult:
        tolerance = tolerances.fd_tol if self.finite_difference else tolerances.exact_tol
        return CheckResult.from_violation(self.name, self.run(act, rng, samples, tolerances), tolerance)


def _max_abs(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _left_identity(act, rng, samples, tol):
    return max(_max_abs(act.left_act(np.eye(act.n), v), v) for v in (act.random_value(rng) for _ in range(samples)))


def _right_identity(act, rng, samples, tol):
    return max(_max_abs(act.right_act(v, np.eye(act.n)), v) for v in (act.random_value(rng) for _ in range(samples)))


def _left_compat(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        g, h = random_group_matrix(rng, act.n), random_group_matrix(rng, act.n)
        v = act.random_value(rng)
        worst = max(worst, _max_abs(act.left_act(g, act.left_act(h, v)), act.left_act(g @ h, v)))
    return worst


def _right_compat(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        g, h = random_group_matrix(rng, act.n), random_group_matrix(rng, act.n)
        v = act.random_value(rng)
        worst = max(worst, _max_abs(act.right_act(act.right_act(v, g), h), act.right_act(v, g @ h)))
    return worst


def _commutation(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        g, h = random_group_matrix(rng, act.n), random_group_matrix(rng, act.n)
        v = act.random_value(rng)
        worst = max(worst, _max_abs(act.right_act(act.left_act(g, v), h), act.left_act(g, act.right_act(v, h))))
    return worst


def _inf_left_fd(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        xi, v = random_matrix(rng, act.n), act.random_value(rng)
        estimate = fd_derivative(lambda eps: act.left_act(mat_exp(eps * xi), v), 0.0, tol.fd_step)
        worst = max(worst, _max_abs(act.inf_left(xi, v), estimate))
    return worst


def _inf_right_fd(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        xi, v = random_matrix(rng, act.n), act.random_value(rng)
        estimate = fd_derivative(lambda eps: act.right_act(v, mat_exp(eps * xi)), 0.0, tol.fd_step)
        worst = max(worst, _max_abs(act.inf_right(v, xi), estimate))
    return worst


def _closure(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        g, xi, v = random_group_matrix(rng, act.n), random_matrix(rng, act.n), act.random_value(rng)
        for image in (act.left_act(g, v), act.right_act(v, g), act.inf_left(xi, v), act.inf_right(v, xi)):
            worst = max(worst, _max_abs(act.project(image), image))
    return worst


ACTION_PAIR_CHECKS: List[Check] = [
    Check(name="left_identity", run=_left_identity),
    Check(name="left_compat", run=_left_compat),
    Check(name="right_identity", run=_right_identity),
    Check(name="right_compat", run=_right_compat),
    Check(name="commutation", run=_commutation),
    Check(name="inf_left_fd", run=_inf_left_fd, finite_difference=True),
    Check(name="inf_right_fd", run=_inf_right_fd, finite_difference=True),
    Check(name="closure", run=_closure),
]


def _group_associativity(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        a, b, c = (random_group_element(act, rng) for _ in range(3))
        left = compose(compose(a, b, act), c, act)
        right = compose(a, compose(b, c, act), act)
        worst = max(worst, left.distance(right))
    return worst


def _group_identity(act, rng, samples, tol):
    e = identity(act)
    worst = 0.0
    for _ in range(samples):
        a = random_group_element(act, rng)
        worst = max(worst, compose(e, a, act).distance(a), compose(a, e, act).distance(a))
    return worst


def _group_inverse(act, rng, samples, tol):
    e = identity(act)
    worst = 0.0
    for _ in range(samples):
        a = random_group_element(act, rng)
        a_inv = inverse(a, act, tol)
        worst = max(worst, compose(a, a_inv, act).distance(e), compose(a_inv, a, act).distance(e))
    return worst


def _bracket_antisymmetry(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        x, y = random_algebra_element(act, rng), random_algebra_element(act, rng)
        worst = max(worst, bracket(x, y, act).distance(bracket(y, x, act).scaled(-1.0)))
    return worst


def _bracket_jacobi(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        x, y, z = (random_algebra_element(act, rng) for _ in range(3))
        total = (
            bracket(x, bracket(y, z, act), act)
            + bracket(y, bracket(z, x, act), act)
            + bracket(z, bracket(x, y, act), act)
        )
        worst = max(worst, float(np.max(np.abs(total.stacked()))))
    return worst


def _bracket_fd(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        x, y = random_algebra_element(act, rng), random_algebra_element(act, rng)

        def transported(t: float) -> np.ndarray:
            a = GroupElement(g=mat_exp(t * x.xi_g), v=t * x.xi_v)
            return ad_big(a, y, act, tol).stacked()

        worst = max(worst, _max_abs(bracket(x, y, act).stacked(), fd_derivative(transported, 0.0, tol.fd_step)))
    return worst


def _adjoint_fd(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        a, xi = random_group_element(act, rng), random_algebra_element(act, rng)

        def conjugated(eps: float) -> np.ndarray:
            b = GroupElement(g=mat_exp(eps * xi.xi_g), v=eps * xi.xi_v)
            return big_ad(a, b, act).stacked()

        worst = max(worst, _max_abs(ad_big(a, xi, act, tol).stacked(), fd_derivative(conjugated, 0.0, tol.fd_step)))
    return worst


def _adjoint_representation(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        a, b = random_group_element(act, rng), random_group_element(act, rng)
        xi = random_algebra_element(act, rng)
        nested = ad_big(a, ad_big(b, xi, act, tol), act, tol)
        worst = max(worst, nested.distance(ad_big(compose(a, b, act), xi, act, tol)))
    return worst


def _heart_duality(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        xi, alpha = random_matrix(rng, act.n), act.random_value(rng)
        result = act.heart(xi, alpha)
        for v in act.basis:
            expected = pairing(alpha, act.inf_left(xi, v) - act.inf_right(v, xi))
            worst = max(worst, abs(pairing(result, v) - expected))
    return worst


def _diamond_duality(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        v, alpha = act.random_value(rng), act.random_value(rng)
        result = act.diamond(v, alpha)
        for e in act.gl_basis:
            expected = pairing(alpha, act.inf_right(v, e) - act.inf_left(e, v))
            worst = max(worst, abs(trace_pairing(result, e) - expected))
    return worst


def _coad_duality(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        xi, eta = random_algebra_element(act, rng), random_algebra_element(act, rng)
        m = random_coalgebra_element(act, rng)
        worst = max(worst, abs(coad(xi, m, act).pair(eta) - m.pair(bracket(xi, eta, act))))
    return worst


def _coad_group_duality(act, rng, samples, tol):
    worst = 0.0
    for _ in range(samples):
        a, eta = random_group_element(act, rng), random_algebra_element(act, rng)
        m = random_coalgebra_element(act, rng)
        worst = max(worst, abs(coad_group(a, m, act, tol).pair(eta) - m.pair(ad_big(a, eta, act, tol))))
    return worst


def _factor_bracket_sum(act, rng, samples, tol):
    left, right = left_factor(act), right_factor(act)
    worst = 0.0
    for _ in range(samples):
        x, y = random_algebra_element(act, rng), random_algebra_element(act, rng)
        total = bracket(x, y, left).xi_v + bracket(x, y, right).xi_v
        worst = max(worst, _max_abs(bracket(x, y, act).xi_v, total))
    return worst


def _factor_heart_sum(act, rng, samples, tol):
    left, right = left_factor(act), right_factor(act)
    worst = 0.0
    for _ in range(samples):
        xi, alpha = random_matrix(rng, act.n), act.random_value(rng)
        worst = max(worst, _max_abs(act.heart(xi, alpha), left.heart(xi, alpha) + right.heart(xi, alpha)))
    return worst


def _factor_diamond_sum(act, rng, samples, tol):
    left, right = left_factor(act), right_factor(act)
    worst = 0.0
    for _ in range(samples):
        v, alpha = act.random_value(rng), act.random_value(rng)
        worst = max(worst, _max_abs(act.diamond(v, alpha), left.diamond(v, alpha) + right.diamond(v, alpha)))
    return worst


STRUCTURE_CHECKS: List[Check] = [
    Check(name="group_associativity", run=_group_associativity),
    Check(name="group_identity", run=_group_identity),
    Check(name="group_inverse", run=_group_inverse),
    Check(name="bracket_antisymmetry", run=_bracket_antisymmetry),
    Check(name="bracket_jacobi", run=_bracket_jacobi),
    Check(name="bracket_fd", run=_bracket_fd, finite_difference=True),
    Check(name="adjoint_fd", run=_adjoint_fd, finite_difference=True),
    Check(name="adjoint_representation", run=_adjoint_representation),
    Check(name="heart_duality", run=_heart_duality),
    Check(name="diamond_duality", run=_diamond_duality),
    Check(name="coad_duality", run=_coad_duality),
    Check(name="coad_group_duality", run=_coad_group_duality),
    Check(name="factor_bracket_sum", run=_factor_bracket_sum),
    Check(name="factor_heart_sum", run=_factor_heart_sum),
    Check(name="factor_diamond_sum", run=_factor_diamond_sum),
]


def check_rng(seed: int, index: int) -> np.random.Generator:
    """Independent, reproducible stream per check"""
    return np.random.default_rng([seed, index])


def run_checks(
    act: ActionPair,
    checks: List[Check],
    seed: int,
    samples: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RunReport:
    results = [
        check.evaluate(act, check_rng(seed, index), samples, tolerances)
        for index, check in enumerate(checks)
    ]
    report = RunReport(subject=f"{act.name}({act.n})", checks=results)
    failures = report.failures()
    if failures:
        logger.warning(f"{report.subject}: {len(failures)} check(s) failed: {', '.join(c.name for c in failures)}")
    return report


def verify_action_pair(
    act: ActionPair,
    seed: int = 0,
    samples: int = 20,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RunReport:
    """
    Run the action-pair laws on `samples` random draws.

    Checks the identity and compatibility laws of both actions, their mutual
    commutation, the finite-difference consistency of the infinitesimal actions
    and closure of V under all four maps. Failures are reported, never raised.
    """
    return run_checks(act, ACTION_PAIR_CHECKS, seed, samples, tolerances)


def structure_checks() -> Dict[str, Check]:
    return {check.name: check for check in ACTION_PAIR_CHECKS + STRUCTURE_CHECKS}
