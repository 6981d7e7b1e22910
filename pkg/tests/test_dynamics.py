import io
import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.lie.algebra_core import asymmetry, fd_derivative, mat_exp, random_matrix
from src.lie.csdp_core import compose, random_algebra_element, random_group_element
from src.lie.dynamics import (
    ACTION_GRADIENT_TOL,
    QuadraticLagrangian,
    action_gradient,
    action_gradient_check,
    algebra_from_coords,
    energy,
    ep_rhs,
    ep_rhs_advected,
    ep_rhs_left,
    ep_rhs_right,
    induced_variation,
    integrate,
    integrate_flow,
    inverse_legendre,
    lagrangian_value,
    left_trivialize,
    legendre,
    make_variation_curve,
    noether_momentum,
    reconstruct_left_rhs,
    reconstruct_rhs,
    right_trivialize,
    rk4_step,
)
from src.lie.errors import DimensionMismatchError, SingularMatrixError
from src.lie.instances import GlMatInstance, GlT12Instance
from src.models.lie import AlgebraElement, GroupElement, TangentVector
from src.models.schemas import ConfigDoc, LagrangianSpec, Orientation, Tolerances
from src.models.trajectory import EPState, Trajectory, VariationCurve

from conftest import E, EXACT_TOL


def random_lagrangian(act, rng):
    return QuadraticLagrangian(
        space=act.space,
        weights_g=rng.uniform(0.5, 2.0, size=act.n ** 2),
        weights_v=rng.uniform(0.5, 2.0, size=len(act.basis)),
    )


def max_abs(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# Lagrangian and Legendre transform

def test_legendre_round_trip(act, rng):
    l = random_lagrangian(act, rng)
    xi = random_algebra_element(act, rng)
    assert inverse_legendre(l, legendre(l, xi)).distance(xi) <= EXACT_TOL


def test_unit_weights_make_legendre_the_identity(glmat2, rng):
    l = QuadraticLagrangian.uniform(glmat2)
    xi = random_algebra_element(glmat2, rng)
    m = legendre(l, xi)
    assert max_abs(m.mu, xi.xi_g) == 0.0
    assert max_abs(m.gamma, xi.xi_v) == 0.0


def test_energy_of_quadratic_lagrangian(act, rng):
    l = random_lagrangian(act, rng)
    xi = random_algebra_element(act, rng)
    assert energy(l, xi) == pytest.approx(lagrangian_value(l, xi), abs=EXACT_TOL)

    unit = QuadraticLagrangian.uniform(GlMatInstance(2))
    assert energy(unit, AlgebraElement(xi_g=E(1, 2), xi_v=np.zeros((2, 2)))) == pytest.approx(0.5, abs=1e-15)
    assert lagrangian_value(unit, AlgebraElement(xi_g=np.zeros((2, 2)), xi_v=np.zeros((2, 2)))) == 0.0


def test_lagrangian_weights_are_validated(glmat2):
    with pytest.raises(ValidationError):
        QuadraticLagrangian(space=glmat2.space, weights_g=[1.0, -1.0, 1.0, 1.0], weights_v=[1.0] * 4)
    with pytest.raises(ValidationError):
        QuadraticLagrangian(space=glmat2.space, weights_g=[1.0] * 3, weights_v=[1.0] * 4)
    with pytest.raises(DimensionMismatchError):
        QuadraticLagrangian.from_spec(LagrangianSpec(weights_g=[1.0] * 4, weights_v=[1.0] * 8), glmat2)
    with pytest.raises(ValidationError):
        LagrangianSpec(weights_g=[0.0])


def test_lagrangian_from_empty_spec_is_uniform(t12_sym2):
    l = QuadraticLagrangian.from_spec(LagrangianSpec(), t12_sym2)
    assert l.n == 2
    assert np.array_equal(l.weights_v, np.ones(6))


def test_algebra_from_coords(glmat2):
    xi = algebra_from_coords([0, 1, 0, 0, 0, 0, 1, 0], glmat2)
    assert np.array_equal(xi.xi_g, E(1, 2))
    assert np.array_equal(xi.xi_v, E(2, 1))
    with pytest.raises(DimensionMismatchError):
        algebra_from_coords([0.0] * 7, glmat2)


# Euler-Poincaré vector fields

def test_ep_rhs_vanishes_at_rest(act):
    l = QuadraticLagrangian.uniform(act)
    zero = AlgebraElement(xi_g=np.zeros((act.n, act.n)), xi_v=act.zero())
    assert np.max(np.abs(ep_rhs_right(zero, l, act).stacked())) == 0.0


def test_ep_rhs_orientations_differ_by_sign(act, rng):
    l = random_lagrangian(act, rng)
    xi = random_algebra_element(act, rng)
    assert np.max(np.abs(ep_rhs_left(xi, l, act).stacked() + ep_rhs_right(xi, l, act).stacked())) == 0.0
    assert ep_rhs(xi, l, act, "left").distance(ep_rhs_left(xi, l, act)) == 0.0
    with pytest.raises(ValueError):
        ep_rhs(xi, l, act, Orientation.ADVECTED)


def test_ep_rhs_is_tangent_to_energy_levels(act, rng):
    l = random_lagrangian(act, rng)
    xi = random_algebra_element(act, rng)
    # dE/dt = ⟨μ̇, ξ⟩ = ∓⟨μ, [ξ, ξ]⟩
    assert abs(ep_rhs_right(xi, l, act).pair(xi)) <= EXACT_TOL


def test_ep_rhs_vanishes_on_abelian_glmat_1(rng):
    act = GlMatInstance(1)
    l = random_lagrangian(act, rng)
    for _ in range(10):
        xi = random_algebra_element(act, rng)
        assert np.max(np.abs(ep_rhs_right(xi, l, act).stacked())) == 0.0


def test_advected_rhs_examples():
    act = GlMatInstance(1)
    l = QuadraticLagrangian.uniform(act)
    mu_dot, v_dot = ep_rhs_advected(np.array([[0.4]]), np.array([[0.5]]), l, act)
    assert mu_dot[0, 0] == 0.0
    assert v_dot[0, 0] == pytest.approx(0.4, abs=1e-15)


# Trivialization and reconstruction

def test_reconstruction_round_trips(act, rng):
    a, xi = random_group_element(act, rng), random_algebra_element(act, rng)
    state = EPState(group=a, algebra=xi, time=0.0)
    assert right_trivialize(reconstruct_rhs(state, act), a, act).distance(xi) <= EXACT_TOL
    assert left_trivialize(reconstruct_left_rhs(state, act), a, act).distance(xi) <= EXACT_TOL


def test_reconstruction_is_derivative_of_translation(act, rng, tolerances):
    a, xi = random_group_element(act, rng), random_algebra_element(act, rng)
    state = EPState(group=a, algebra=xi, time=0.0)

    def flow(t):
        return GroupElement(g=mat_exp(t * xi.xi_g), v=t * xi.xi_v)

    right = fd_derivative(lambda t: compose(flow(t), a, act).stacked(), 0.0, tolerances.fd_step)
    left = fd_derivative(lambda t: compose(a, flow(t), act).stacked(), 0.0, tolerances.fd_step)
    assert max_abs(reconstruct_rhs(state, act).stacked(), right) <= tolerances.fd_tol
    assert max_abs(reconstruct_left_rhs(state, act).stacked(), left) <= tolerances.fd_tol


def test_induced_variation_is_linear_in_eta(act, rng):
    xi = random_algebra_element(act, rng)
    eta1, eta2, rate1, rate2 = (random_algebra_element(act, rng) for _ in range(4))
    total = induced_variation(xi, eta1 + eta2, rate1 + rate2, act)
    parts = induced_variation(xi, eta1, rate1, act) + induced_variation(xi, eta2, rate2, act)
    assert total.distance(parts) <= EXACT_TOL

    zero = AlgebraElement(xi_g=np.zeros((act.n, act.n)), xi_v=act.zero())
    assert np.max(np.abs(induced_variation(xi, zero, zero, act).stacked())) == 0.0


def test_induced_variation_matches_two_parameter_curve(act, rng, tolerances):
    G0, V0 = mat_exp(random_matrix(rng, act.n, scale=0.3)), act.random_value(rng)
    X, W = random_matrix(rng, act.n, scale=0.5), act.random_value(rng)
    A, B = random_matrix(rng, act.n, scale=0.5), act.random_value(rng)

    def curve(t, eps):
        base = GroupElement(g=mat_exp(t * X) @ G0, v=V0 + t * W)
        push = GroupElement(g=mat_exp(eps * math.sin(t) * A), v=eps * math.sin(t) * B)
        return compose(push, base, act)

    def velocity(t, eps):
        at = curve(t, eps)
        rate = fd_derivative(lambda s: curve(s, eps).stacked(), t, 1e-4)
        size = act.n ** 2
        tangent = TangentVector(g_dot=rate[:size].reshape(act.n, act.n), v_dot=rate[size:].reshape(act.value_shape))
        return right_trivialize(tangent, at, act)

    t = 0.7
    variation = fd_derivative(lambda eps: velocity(t, eps).stacked(), 0.0, 1e-3)
    expected = induced_variation(
        velocity(t, 0.0),
        AlgebraElement(xi_g=math.sin(t) * A, xi_v=math.sin(t) * B),
        AlgebraElement(xi_g=math.cos(t) * A, xi_v=math.cos(t) * B),
        act,
    )
    assert max_abs(variation, expected.stacked()) <= tolerances.fd_tol


# Integration

def test_rk4_step_matches_taylor_polynomial():
    h = 0.1
    result = rk4_step(lambda y: y, np.array([1.0]), h)
    assert result[0] == pytest.approx(1 + h + h ** 2 / 2 + h ** 3 / 6 + h ** 4 / 24, abs=1e-15)


def test_rk4_is_fourth_order():
    errors = []
    for steps in (10, 20):
        y, h = np.array([1.0]), 1.0 / steps
        for _ in range(steps):
            y = rk4_step(lambda x: x, y, h)
        errors.append(abs(y[0] - math.e))
    assert 14.0 <= errors[0] / errors[1] <= 18.0


def test_integrate_flow_rejects_bad_step(glmat2):
    l = QuadraticLagrangian.uniform(glmat2)
    xi = AlgebraElement(xi_g=np.zeros((2, 2)), xi_v=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        integrate_flow(glmat2, l, xi, h=0.0, steps=10)
    with pytest.raises(ValueError):
        integrate_flow(glmat2, l, xi, h=0.1, steps=0)


@pytest.mark.slow
def test_abelian_flow_keeps_momenta_exactly():
    act = GlMatInstance(1)
    l = QuadraticLagrangian(space=act.space, weights_g=[1.5], weights_v=[0.8])
    xi = AlgebraElement(xi_g=[[0.3]], xi_v=[[0.7]])
    trajectory = integrate_flow(act, l, xi, h=1e-3, steps=10_000)
    first, last = trajectory.samples[0], trajectory.samples[-1]
    assert last.momenta.distance(first.momenta) == 0.0
    assert trajectory.max_energy_drift() <= 1e-12
    assert trajectory.max_noether_residual() <= 1e-10
    assert last.state.group.g[0, 0] == pytest.approx(math.exp(3.0), rel=1e-10)


@pytest.mark.parametrize("orientation", [Orientation.RIGHT, Orientation.LEFT])
def test_short_flows_conserve_energy_and_momentum_map(act, orientation, rng):
    l = random_lagrangian(act, rng)
    xi = random_algebra_element(act, rng)
    trajectory = integrate_flow(act, l, xi, h=5e-3, steps=50, orientation=orientation)
    assert len(trajectory.samples) == 51
    assert trajectory.samples[0].noether_residual == 0.0
    assert trajectory.max_energy_drift() <= 1e-6
    assert trajectory.max_noether_residual() <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("make_act", [lambda: GlMatInstance(2), lambda: GlT12Instance(2, symmetric_only=True)])
def test_conservation_errors_shrink_at_fourth_order(make_act):
    act = make_act()
    rng = np.random.default_rng(99)
    l = random_lagrangian(act, rng)
    xi = AlgebraElement(xi_g=random_matrix(rng, act.n, scale=0.75), xi_v=1.5 * act.random_value(rng))

    drifts, residuals = [], []
    for h in (1e-2, 5e-3, 2.5e-3):
        trajectory = integrate_flow(act, l, xi, h=h, steps=int(round(1.0 / h)))
        drifts.append(trajectory.max_energy_drift())
        residuals.append(trajectory.max_noether_residual())

    assert drifts[0] / drifts[1] >= 12.0
    assert drifts[1] / drifts[2] >= 12.0
    assert residuals[0] / residuals[1] >= 12.0
    assert residuals[1] / residuals[2] >= 12.0


def test_advected_flow_matches_exponential_growth():
    act = GlMatInstance(1)
    l = QuadraticLagrangian.uniform(act)
    xi = AlgebraElement(xi_g=[[0.4]], xi_v=[[0.0]])
    trajectory = integrate_flow(act, l, xi, h=1e-3, steps=1000, orientation=Orientation.ADVECTED, v0=[[0.5]])
    for sample in trajectory.samples[::100]:
        expected = 0.5 * math.exp(0.8 * sample.time)
        assert sample.state.group.v[0, 0] == pytest.approx(expected, rel=1e-10)


def test_symmetric_flows_stay_symmetric(t12_sym2, rng):
    l = random_lagrangian(t12_sym2, rng)
    xi = random_algebra_element(t12_sym2, rng)
    advected = integrate_flow(
        t12_sym2, l, xi, h=1e-3, steps=1000, orientation=Orientation.ADVECTED, v0=t12_sym2.random_value(rng)
    )
    assert max(asymmetry(sample.state.group.v) for sample in advected.samples) <= 1e-12

    right = integrate_flow(t12_sym2, l, xi, h=1e-2, steps=100)
    assert max(asymmetry(sample.momenta.gamma) for sample in right.samples) <= 1e-12


def test_advected_momentum_map_starts_at_reference(glmat2, rng):
    l = random_lagrangian(glmat2, rng)
    xi = random_algebra_element(glmat2, rng)
    trajectory = integrate_flow(glmat2, l, xi, h=1e-2, steps=5, orientation=Orientation.ADVECTED, v0=np.eye(2))
    first = trajectory.samples[0]
    transported = noether_momentum(first.state, first.momenta, glmat2, Orientation.ADVECTED)
    assert np.array_equal(transported.mu, first.momenta.mu)
    assert np.array_equal(transported.gamma, np.zeros((2, 2)))


def test_singular_reconstruction_reports_step(glmat2):
    l = QuadraticLagrangian.uniform(glmat2)
    # g(t) = diag(e^-t, e^t) keeps det 1 while the scale-aware threshold 0.5·e^{2t} overtakes it
    xi = AlgebraElement(xi_g=np.diag([-1.0, 1.0]), xi_v=np.zeros((2, 2)))
    with pytest.raises(SingularMatrixError) as excinfo:
        integrate_flow(glmat2, l, xi, h=0.1, steps=10, tolerances=Tolerances(sing_tol=0.5))
    assert excinfo.value.step == 4


def test_trajectory_csv(glmat2, rng):
    l = QuadraticLagrangian.uniform(glmat2)
    trajectory = integrate_flow(glmat2, l, random_algebra_element(glmat2, rng), h=0.01, steps=3)
    assert trajectory.csv_header() == [
        "t", "energy", "noether_residual",
        "mu_00", "mu_01", "mu_10", "mu_11",
        "gamma_00", "gamma_01", "gamma_10", "gamma_11",
    ]
    buffer = io.StringIO()
    trajectory.write_csv(buffer)
    rows = buffer.getvalue().splitlines()
    assert len(rows) == 5
    assert rows[1].split(",")[0] == "0"
    assert all(len(row.split(",")) == 11 for row in rows)


def test_tensor_trajectory_header():
    act = GlT12Instance(2)
    xi = random_algebra_element(act, np.random.default_rng(0))
    trajectory = integrate_flow(act, QuadraticLagrangian.uniform(act), xi, h=0.01, steps=1)
    header = trajectory.csv_header()
    assert header[7:9] == ["gamma_000", "gamma_001"]
    assert len(header) == 3 + 4 + 8


def test_trajectory_requires_uniform_times(glmat2, rng):
    l = QuadraticLagrangian.uniform(glmat2)
    trajectory = integrate_flow(glmat2, l, random_algebra_element(glmat2, rng), h=0.01, steps=3)
    with pytest.raises(ValidationError):
        Trajectory(instance="glmat", orientation=Orientation.RIGHT, h=0.02, samples=trajectory.samples)


def test_integrate_from_config(glmat2):
    config = ConfigDoc.model_validate(ConfigDoc.model_config["json_schema_extra"]["example"])
    trajectory = integrate(config)
    assert len(trajectory.samples) == 101
    first = trajectory.samples[0].state.algebra
    assert first.distance(algebra_from_coords(config.initial.xi, glmat2)) <= 1e-15

    seeded = config.model_copy(update={"initial": config.initial.model_copy(update={"xi": None})})
    again = integrate(seeded)
    assert integrate(seeded).samples[-1].momenta.distance(again.samples[-1].momenta) == 0.0

    wrong = config.model_copy(update={"initial": config.initial.model_copy(update={"xi": [0.0] * 3})})
    with pytest.raises(DimensionMismatchError):
        integrate(wrong)


# Variational principle

def test_variation_curve_must_vanish_at_endpoints():
    times = np.linspace(0.0, 1.0, 5)
    eta = np.ones((5, 1, 1))
    with pytest.raises(ValidationError):
        VariationCurve(times=times, eta_g=eta, eta_v=eta, eta_g_dot=eta, eta_v_dot=eta)


def test_variation_curve_vanishes_at_endpoints(glmat2, rng):
    curve = make_variation_curve(np.linspace(0.0, 1.0, 11), glmat2, rng)
    assert np.max(np.abs(curve.eta(0).stacked())) == 0.0
    assert np.max(np.abs(curve.eta(10).stacked())) == 0.0


@pytest.fixture(
    params=[lambda: GlMatInstance(2), lambda: GlT12Instance(2, symmetric_only=True)],
    ids=["glmat", "glt12_sym"],
)
def ep_setup(request):
    act = request.param()
    rng = np.random.default_rng(7)
    l = random_lagrangian(act, rng)
    xi = random_algebra_element(act, rng)
    return act, l, xi


def gradient_report(act, l, trajectory, seed=3, count=10):
    rng = np.random.default_rng(seed)
    curves = [make_variation_curve(trajectory.times, act, rng) for _ in range(count)]
    return action_gradient_check(trajectory, curves, l, act)


def test_action_is_stationary_along_euler_poincare_solutions(ep_setup):
    act, l, xi = ep_setup
    trajectory = integrate_flow(act, l, xi, h=1e-3, steps=1000)
    report = gradient_report(act, l, trajectory)
    assert report.passed, report.render()
    assert [check.name for check in report.checks] == [f"action_gradient_{i:02d}" for i in range(10)]
    assert all(check.tolerance == ACTION_GRADIENT_TOL for check in report.checks)


def test_action_gradient_shrinks_under_refinement(ep_setup):
    act, l, xi = ep_setup
    coarse = gradient_report(act, l, integrate_flow(act, l, xi, h=0.1, steps=10))
    fine = gradient_report(act, l, integrate_flow(act, l, xi, h=0.05, steps=20))
    worst_coarse = max(check.max_violation for check in coarse.checks)
    worst_fine = max(check.max_violation for check in fine.checks)
    assert worst_coarse / worst_fine >= 4.0


def test_action_gradient_detects_wrong_equations(ep_setup):
    act, l, xi = ep_setup
    # left-trivialized equations are not stationary for right-trivialized variations
    trajectory = integrate_flow(act, l, xi, h=1e-3, steps=1000, orientation=Orientation.LEFT)
    report = gradient_report(act, l, trajectory)
    assert not report.passed
    assert max(check.max_violation for check in report.checks) >= 1e3 * ACTION_GRADIENT_TOL


def test_action_gradient_is_large_along_a_random_curve(ep_setup):
    act, l, _ = ep_setup
    rng = np.random.default_rng(21)
    times = np.linspace(0.0, 1.0, 1001)
    a, b, c = (random_algebra_element(act, rng) for _ in range(3))
    xis = [a + b.scaled(t) + c.scaled(math.sin(3.0 * t)) for t in times]
    curves = [make_variation_curve(times, act, rng) for _ in range(10)]
    worst = max(abs(action_gradient(xis, times, curve, l, act)) for curve in curves)
    assert worst >= 1e3 * ACTION_GRADIENT_TOL


def test_action_gradient_check_requires_matching_times(glmat2, rng):
    l = QuadraticLagrangian.uniform(glmat2)
    trajectory = integrate_flow(glmat2, l, random_algebra_element(glmat2, rng), h=0.1, steps=4)
    curve = make_variation_curve(np.linspace(0.0, 1.0, 5), glmat2, rng)
    with pytest.raises(ValueError):
        action_gradient_check(trajectory, [curve], l, glmat2)
