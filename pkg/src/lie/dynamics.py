"""
Euler-Poincaré flows on G ⋈ V: reduced Lagrangians, right/left/advected vector
fields, reconstruction, fixed-step RK4 integration and conservation diagnostics.
"""

import logging
from typing import Any, Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.integrate import simpson

from src.models.lie import AlgebraElement, CoalgebraElement, GroupElement, TangentVector, frozen_array
from src.models.schemas import CheckResult, ConfigDoc, LagrangianSpec, Orientation, RunReport, Tolerances
from src.models.trajectory import EPState, Trajectory, TrajectorySample, VariationCurve
from .algebra_core import (
    DEFAULT_TOLERANCES,
    Space,
    check_invertible,
    fd_derivative,
    make_basis,
    mat_inverse,
)
from .csdp_core import ActionPair, coad, coad_group, identity, inverse, random_algebra_element
from .errors import DimensionMismatchError, SingularMatrixError
from .instances import make_instance, orientation_sign

logger = logging.getLogger(__name__)

# First-order coefficients below this count as a vanishing action gradient
ACTION_GRADIENT_TOL = 1e-6


class QuadraticLagrangian(BaseModel):
    """
    Diagonal quadratic reduced Lagrangian
    ℓ(ξ_g, ξ_v) = ½ Σ weights_g[i]·c_i² + ½ Σ weights_v[j]·d_j²
    where c and d are the coordinates of ξ_g and ξ_v over the gl(n) and V bases.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    space: Space
    weights_g: np.ndarray
    weights_v: np.ndarray

    @field_validator("weights_g", "weights_v", mode="before")
    @classmethod
    def freeze_arrays(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    @model_validator(mode="after")
    def _check_weights(self) -> "QuadraticLagrangian":
        if np.any(self.weights_g <= 0) or np.any(self.weights_v <= 0):
            raise ValueError("Lagrangian weights must be positive")
        n = int(round(np.sqrt(len(self.weights_g))))
        if n < 1 or n * n != len(self.weights_g):
            raise ValueError(f"weights_g must have n² entries, got {len(self.weights_g)}")
        expected = len(make_basis(self.space, n))
        if len(self.weights_v) != expected:
            raise ValueError(f"weights_v must have {expected} entries for {self.space.value}({n})")
        return self

    @property
    def n(self) -> int:
        return int(round(np.sqrt(len(self.weights_g))))

    @classmethod
    def uniform(cls, act: ActionPair) -> "QuadraticLagrangian":
        return cls(space=act.space, weights_g=np.ones(act.n ** 2), weights_v=np.ones(len(act.basis)))

    @classmethod
    def from_spec(cls, spec: LagrangianSpec, act: ActionPair) -> "QuadraticLagrangian":
        """Empty weight lists mean unit weights"""
        weights_g = spec.weights_g or [1.0] * act.n ** 2
        weights_v = spec.weights_v or [1.0] * len(act.basis)
        if len(weights_g) != act.n ** 2 or len(weights_v) != len(act.basis):
            raise DimensionMismatchError(
                f"{act.name}({act.n}) needs {act.n ** 2} gl weights and {len(act.basis)} V weights, "
                f"got {len(weights_g)} and {len(weights_v)}"
            )
        return cls(space=act.space, weights_g=weights_g, weights_v=weights_v)


def _bases(l: QuadraticLagrangian):
    return make_basis(Space.GL, l.n), make_basis(l.space, l.n)


def lagrangian_value(l: QuadraticLagrangian, xi: AlgebraElement) -> float:
    gl, vb = _bases(l)
    c, d = gl.coords(xi.xi_g), vb.coords(xi.xi_v)
    return float(0.5 * np.dot(l.weights_g, c * c) + 0.5 * np.dot(l.weights_v, d * d))


def legendre(l: QuadraticLagrangian, xi: AlgebraElement) -> CoalgebraElement:
    """(μ, γ) = (δℓ/δξ_g, δℓ/δξ_v)"""
    gl, vb = _bases(l)
    return CoalgebraElement(
        mu=gl.dual_from_values(l.weights_g * gl.coords(xi.xi_g)),
        gamma=vb.dual_from_values(l.weights_v * vb.coords(xi.xi_v)),
    )


def inverse_legendre(l: QuadraticLagrangian, m: CoalgebraElement) -> AlgebraElement:
    gl, vb = _bases(l)
    return AlgebraElement(
        xi_g=gl.from_coords(gl.values(m.mu) / l.weights_g),
        xi_v=vb.from_coords(vb.values(m.gamma) / l.weights_v),
    )


def energy(l: QuadraticLagrangian, xi: AlgebraElement) -> float:
    """⟨μ, ξ_g⟩ + ⟨γ, ξ_v⟩ − ℓ(ξ); equals ℓ(ξ) for a quadratic ℓ"""
    return legendre(l, xi).pair(xi) - lagrangian_value(l, xi)


def algebra_from_coords(coords: List[float], act: ActionPair) -> AlgebraElement:
    """Split coordinates into the gl(n) part then the V part"""
    size_g = act.n ** 2
    if len(coords) != size_g + len(act.basis):
        raise DimensionMismatchError(
            f"{act.name}({act.n}) needs {size_g + len(act.basis)} algebra coordinates, got {len(coords)}"
        )
    coords = np.asarray(coords, dtype=np.float64)
    return AlgebraElement(
        xi_g=act.gl_basis.from_coords(coords[:size_g]),
        xi_v=act.basis.from_coords(coords[size_g:]),
    )


# Euler-Poincaré vector fields

def ep_rhs_right(xi: AlgebraElement, l: QuadraticLagrangian, act: ActionPair) -> CoalgebraElement:
    """(μ̇, γ̇) = (−ad*_{ξ_g}μ − ξ_v◇γ, −ξ_g♥γ)"""
    return -coad(xi, legendre(l, xi), act)


def ep_rhs_left(xi: AlgebraElement, l: QuadraticLagrangian, act: ActionPair) -> CoalgebraElement:
    """(μ̇, γ̇) = (ad*_{ξ_g}μ + ξ_v◇γ, ξ_g♥γ)"""
    return coad(xi, legendre(l, xi), act)


def ep_rhs(
    xi: AlgebraElement,
    l: QuadraticLagrangian,
    act: ActionPair,
    orientation: Orientation = Orientation.RIGHT,
) -> CoalgebraElement:
    if Orientation(orientation) is Orientation.LEFT:
        return ep_rhs_left(xi, l, act)
    if Orientation(orientation) is Orientation.RIGHT:
        return ep_rhs_right(xi, l, act)
    raise ValueError("advected flows use ep_rhs_advected")


def ep_rhs_advected(
    xi_g: np.ndarray,
    v: np.ndarray,
    l: QuadraticLagrangian,
    act: ActionPair,
    orientation: Orientation = Orientation.RIGHT,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Advected-parameter Euler-Poincaré system, with v slaved to the group motion:
    - μ̇ = ∓(ad*_{ξ_g}μ + v◇δℓ/δv), minus for right trivialization
    - v̇ = ξ_g·v + v·ξ_g
    """
    sign = orientation_sign(orientation)
    m = legendre(l, AlgebraElement(xi_g=xi_g, xi_v=v))
    mu_dot = sign * coad(AlgebraElement(xi_g=xi_g, xi_v=v), m, act).mu
    v_dot = act.project(act.inf_left(xi_g, v) + act.inf_right(v, xi_g))
    return mu_dot, v_dot


# Trivialization and reconstruction

def reconstruct_rhs(state: EPState, act: ActionPair) -> TangentVector:
    """Tangent of right translation: d/dt(g, v) = (ξ_g g, ξ_g·v + ξ_v·g)"""
    g, v = state.group.g, state.group.v
    xi = state.algebra
    return TangentVector(g_dot=xi.xi_g @ g, v_dot=act.inf_left(xi.xi_g, v) + act.right_act(xi.xi_v, g))


def reconstruct_left_rhs(state: EPState, act: ActionPair) -> TangentVector:
    """Tangent of left translation: d/dt(g, v) = (g ξ_g, g·ξ_v + v·ξ_g)"""
    g, v = state.group.g, state.group.v
    xi = state.algebra
    return TangentVector(g_dot=g @ xi.xi_g, v_dot=act.left_act(g, xi.xi_v) + act.inf_right(v, xi.xi_g))


def right_trivialize(
    velocity: TangentVector,
    at: GroupElement,
    act: ActionPair,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> AlgebraElement:
    """(ġ, v̇)·(g, v)⁻¹ = (ġg⁻¹, (v̇ − ξ_g·v)·g⁻¹)"""
    g_inv = mat_inverse(at.g, tolerances)
    xi_g = velocity.g_dot @ g_inv
    return AlgebraElement(xi_g=xi_g, xi_v=act.right_act(velocity.v_dot - act.inf_left(xi_g, at.v), g_inv))


def left_trivialize(
    velocity: TangentVector,
    at: GroupElement,
    act: ActionPair,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> AlgebraElement:
    """(g, v)⁻¹·(ġ, v̇) = (g⁻¹ġ, g⁻¹·(v̇ − v·ξ_g))"""
    g_inv = mat_inverse(at.g, tolerances)
    xi_g = g_inv @ velocity.g_dot
    return AlgebraElement(xi_g=xi_g, xi_v=act.left_act(g_inv, velocity.v_dot - act.inf_right(at.v, xi_g)))


def induced_variation(
    xi: AlgebraElement,
    eta: AlgebraElement,
    eta_dot: AlgebraElement,
    act: ActionPair,
) -> AlgebraElement:
    """
    Constrained variation of the right-trivialized velocity:
    δξ_g = η̇_g − [ξ_g, η_g]
    δξ_v = η̇_v + η_g·ξ_v − ξ_v·η_g + η_v·ξ_g − ξ_g·η_v
    """
    return AlgebraElement(
        xi_g=eta_dot.xi_g - (xi.xi_g @ eta.xi_g - eta.xi_g @ xi.xi_g),
        xi_v=(
            eta_dot.xi_v
            + act.inf_left(eta.xi_g, xi.xi_v)
            - act.inf_right(xi.xi_v, eta.xi_g)
            + act.inf_right(eta.xi_v, xi.xi_g)
            - act.inf_left(xi.xi_g, eta.xi_v)
        ),
    )


# Integration

def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of the autonomous system ẏ = rhs(y)"""
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _StateLayout:
    """Packing of (μ, γ or nothing, g, v) into one flat vector"""

    def __init__(self, act: ActionPair, advected: bool):
        n = act.n
        size_v = int(np.prod(act.value_shape))
        self.act = act
        self.advected = advected
        self.shapes = [(n, n)] + ([] if advected else [act.value_shape]) + [(n, n), act.value_shape]
        sizes = [n * n] + ([] if advected else [size_v]) + [n * n, size_v]
        self.offsets = np.cumsum([0] + sizes)

    def unpack(self, y: np.ndarray) -> List[np.ndarray]:
        return [
            y[start:stop].reshape(shape)
            for start, stop, shape in zip(self.offsets[:-1], self.offsets[1:], self.shapes)
        ]

    @staticmethod
    def pack(*parts: np.ndarray) -> np.ndarray:
        return np.concatenate([np.ravel(part) for part in parts])


def noether_momentum(
    state: EPState,
    momenta: CoalgebraElement,
    act: ActionPair,
    orientation: Orientation = Orientation.RIGHT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> CoalgebraElement:
    """
    Coadjoint transport of the reduced momenta along the group trajectory:
    - right: Ad*_{(g,v)}(μ, γ)
    - left: Ad*_{(g,v)⁻¹}(μ, γ)
    - advected: gᵀμg⁻ᵀ on gl(n)* only, which is not conserved in general
    """
    orientation = Orientation(orientation)
    if orientation is Orientation.RIGHT:
        return coad_group(state.group, momenta, act, tolerances)
    if orientation is Orientation.LEFT:
        return coad_group(inverse(state.group, act, tolerances), momenta, act, tolerances)
    g = state.group.g
    return CoalgebraElement(mu=g.T @ momenta.mu @ mat_inverse(g, tolerances).T, gamma=act.zero())


def _sample(
    act: ActionPair,
    l: QuadraticLagrangian,
    orientation: Orientation,
    time: float,
    parts: List[np.ndarray],
    reference: Optional[CoalgebraElement],
    tolerances: Tolerances,
) -> Tuple[TrajectorySample, CoalgebraElement]:
    if orientation is Orientation.ADVECTED:
        mu, g, v = parts
        xi_g = inverse_legendre(l, CoalgebraElement(mu=mu, gamma=act.zero())).xi_g
        gamma = legendre(l, AlgebraElement(xi_g=xi_g, xi_v=v)).gamma
        momenta = CoalgebraElement(mu=mu, gamma=gamma)
        algebra = AlgebraElement(xi_g=xi_g, xi_v=act.zero())
        sample_energy = float(np.vdot(mu, xi_g)) - lagrangian_value(l, AlgebraElement(xi_g=xi_g, xi_v=v))
    else:
        mu, gamma, g, v = parts
        momenta = CoalgebraElement(mu=mu, gamma=gamma)
        algebra = inverse_legendre(l, momenta)
        sample_energy = energy(l, algebra)
    state = EPState(group=GroupElement(g=g, v=v), algebra=algebra, time=time)
    transported = noether_momentum(state, momenta, act, orientation, tolerances)
    if reference is None:
        reference = transported
    sample = TrajectorySample(
        time=time,
        state=state,
        momenta=momenta,
        energy=sample_energy,
        noether_residual=transported.distance(reference),
    )
    return sample, reference


def integrate_flow(
    act: ActionPair,
    l: QuadraticLagrangian,
    initial: AlgebraElement,
    h: float,
    steps: int,
    orientation: Orientation = Orientation.RIGHT,
    t0: float = 0.0,
    v0: Optional[np.ndarray] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Trajectory:
    """
    Integrate the coupled momentum and reconstruction system with fixed-step RK4,
    starting at the identity of G ⋈ V (or at (e, v0) for advected runs).

    Raises:
        SingularMatrixError: the reconstructed g left GL(n) numerically; carries the step index
    """
    if not h > 0 or steps < 1:
        raise ValueError("integration needs h > 0 and steps >= 1")
    orientation = Orientation(orientation)
    advected = orientation is Orientation.ADVECTED
    layout = _StateLayout(act, advected)
    start = identity(act)

    if advected:
        v_start = act.project(act.zero() if v0 is None else np.asarray(v0, dtype=np.float64))
        m0 = legendre(l, AlgebraElement(xi_g=initial.xi_g, xi_v=v_start))
        y = layout.pack(m0.mu, start.g, v_start)

        def rhs(y: np.ndarray) -> np.ndarray:
            mu, g, v = layout.unpack(y)
            xi_g = inverse_legendre(l, CoalgebraElement(mu=mu, gamma=act.zero())).xi_g
            mu_dot, v_dot = ep_rhs_advected(xi_g, v, l, act, Orientation.RIGHT)
            return layout.pack(mu_dot, xi_g @ g, v_dot)
    else:
        m0 = legendre(l, initial)
        y = layout.pack(m0.mu, m0.gamma, start.g, start.v)
        reconstruct = reconstruct_rhs if orientation is Orientation.RIGHT else reconstruct_left_rhs

        def rhs(y: np.ndarray) -> np.ndarray:
            mu, gamma, g, v = layout.unpack(y)
            xi = inverse_legendre(l, CoalgebraElement(mu=mu, gamma=gamma))
            m_dot = ep_rhs(xi, l, act, orientation)
            tangent = reconstruct(EPState(group=GroupElement(g=g, v=v), algebra=xi, time=0.0), act)
            return layout.pack(m_dot.mu, m_dot.gamma, tangent.g_dot, tangent.v_dot)

    first, reference = _sample(act, l, orientation, t0, layout.unpack(y), None, tolerances)
    samples = [first]
    for step in range(1, steps + 1):
        try:
            y = rk4_step(rhs, y, h)
            parts = layout.unpack(y)
            check_invertible(parts[-2], tolerances)
            sample, _ = _sample(act, l, orientation, t0 + step * h, parts, reference, tolerances)
        except SingularMatrixError as e:
            logger.warning(f"Reconstruction left GL({act.n}) at step {step}")
            raise e.at_step(step) from e
        samples.append(sample)
        if step % 1000 == 0:
            logger.debug(f"{act.name}({act.n}) {orientation.value}: step {step}/{steps}")
    return Trajectory(instance=act.name, orientation=orientation, h=h, samples=samples)


def integrate(config: ConfigDoc, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Trajectory:
    """Build the instance, Lagrangian and initial data described by a config, then integrate"""
    act = make_instance(config.instance, config.n)
    l = QuadraticLagrangian.from_spec(config.lagrangian, act)
    rng = np.random.default_rng(config.seed)
    if config.initial.xi is not None:
        initial = algebra_from_coords(config.initial.xi, act)
    else:
        initial = random_algebra_element(act, rng)
    v0 = None
    if config.orientation is Orientation.ADVECTED:
        if config.initial.v0 is not None:
            if len(config.initial.v0) != len(act.basis):
                raise DimensionMismatchError(f"v0 needs {len(act.basis)} coordinates, got {len(config.initial.v0)}")
            v0 = act.basis.from_coords(config.initial.v0)
        else:
            v0 = act.random_value(rng)
    return integrate_flow(
        act,
        l,
        initial,
        h=config.integrator.h,
        steps=config.integrator.steps,
        orientation=config.orientation,
        t0=config.integrator.t0,
        v0=v0,
        tolerances=tolerances,
    )


# Variational diagnostics

def make_variation_curve(times: np.ndarray, act: ActionPair, rng: np.random.Generator) -> VariationCurve:
    """η(t) = sin(πs)·A + sin(2πs)·B with s = (t − t₀)/(t₁ − t₀) and random A, B in g ⋈ V"""
    times = np.asarray(times, dtype=np.float64)
    span = times[-1] - times[0]
    s = (times - times[0]) / span
    a, b = random_algebra_element(act, rng), random_algebra_element(act, rng)

    def stack(weights_a: np.ndarray, weights_b: np.ndarray, part: str) -> np.ndarray:
        first, second = getattr(a, part), getattr(b, part)
        return np.einsum("t,...->t...", weights_a, first) + np.einsum("t,...->t...", weights_b, second)

    value_a, value_b = np.sin(np.pi * s), np.sin(2 * np.pi * s)
    # exact zeros at both endpoints
    value_a[[0, -1]] = 0.0
    value_b[[0, -1]] = 0.0
    rate_a, rate_b = np.pi * np.cos(np.pi * s) / span, 2 * np.pi * np.cos(2 * np.pi * s) / span
    return VariationCurve(
        times=times,
        eta_g=stack(value_a, value_b, "xi_g"),
        eta_v=stack(value_a, value_b, "xi_v"),
        eta_g_dot=stack(rate_a, rate_b, "xi_g"),
        eta_v_dot=stack(rate_a, rate_b, "xi_v"),
    )


def action_gradient(
    xis: List[AlgebraElement],
    times: np.ndarray,
    variation: VariationCurve,
    l: QuadraticLagrangian,
    act: ActionPair,
    step: float = 1e-3,
) -> float:
    """
    First-order coefficient d/dε ∫ℓ(ξ + ε·δξ)dt at ε = 0, by Simpson quadrature in t
    and a central difference in ε (exact up to rounding for quadratic ℓ).
    """
    variations = [
        induced_variation(xi, variation.eta(i), variation.eta_dot(i), act)
        for i, xi in enumerate(xis)
    ]

    def action(eps: float) -> float:
        values = [lagrangian_value(l, xi + dxi.scaled(eps)) for xi, dxi in zip(xis, variations)]
        return float(simpson(values, x=times))

    return float(fd_derivative(action, 0.0, step))


def action_gradient_check(
    trajectory: Trajectory,
    variations: List[VariationCurve],
    l: QuadraticLagrangian,
    act: ActionPair,
    tolerance: float = ACTION_GRADIENT_TOL,
) -> RunReport:
    """
    Constrained variational principle along a sampled trajectory: the action's
    first-order change under every induced variation must vanish.
    """
    times = trajectory.times
    xis = [sample.state.algebra for sample in trajectory.samples]
    checks = []
    for index, variation in enumerate(variations):
        if len(variation.times) != len(times) or np.max(np.abs(variation.times - times)) > 1e-12:
            raise ValueError("variation curves must be sampled on the trajectory's times")
        coefficient = action_gradient(xis, times, variation, l, act)
        checks.append(CheckResult.from_violation(f"action_gradient_{index:02d}", abs(coefficient), tolerance))
    return RunReport(subject=f"{trajectory.instance} action gradient", checks=checks)
