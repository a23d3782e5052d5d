import math

import numpy as np
import pytest

from vicpass.geom import Pose
from vicpass.passivation import (
    EPSILON,
    AttractorState,
    InitialEnergyBudget,
    curl_passivation,
    damping_power,
    deflection_limit_continuous,
    deflection_limit_step,
    deflection_passivated_wrench,
    draw_initial_energy,
    stiffness_limit_step,
    stiffness_passivated_wrench,
)


def diag6(*values):
    if len(values) == 1:
        values = values * 6
    return np.diag(np.asarray(values, dtype=float))


def x_axis(value):
    v = np.zeros(6)
    v[0] = value
    return v


# --- damping power ---------------------------------------------------------


def test_damping_power_zero_rate():
    assert damping_power(np.zeros(6), diag6(10.0)) == 0.0


def test_damping_power_quadratic_scalar():
    p = damping_power(x_axis(0.5), diag6(10.0))
    assert abs(p - 2.5) < 1e-12


def test_damping_power_lagged_clamps_negative():
    p = damping_power(x_axis(0.5), diag6(10.0), dv_prev=x_axis(-0.5), mode="lagged")
    assert p == 0.0
    p = damping_power(x_axis(0.5), diag6(10.0), dv_prev=x_axis(0.25), mode="lagged")
    assert abs(p - 1.25) < 1e-12


def test_damping_power_bad_mode():
    with pytest.raises(ValueError):
        damping_power(np.zeros(6), diag6(1.0), mode="cubic")
    with pytest.raises(ValueError):
        damping_power(np.zeros(6), diag6(1.0), mode="lagged")


# --- continuous deflection limiting ----------------------------------------


def test_continuous_recovery_sign():
    d_dot = deflection_limit_continuous(
        d=0.5, dx=x_axis(0.1), K=diag6(1000.0), K_dot=np.zeros((6, 6)), P_d=1.0
    )
    assert d_dot > 0.0
    assert abs(d_dot - 0.2) < 1e-12


def test_continuous_fast_drop_on_stiffening():
    d_dot = deflection_limit_continuous(
        d=0.0, dx=x_axis(0.1), K=diag6(1000.0), K_dot=diag6(1e6), P_d=0.0
    )
    # at d = 0 the injection term vanishes with d^2, so the rate is zero
    assert d_dot == 0.0
    d_dot = deflection_limit_continuous(
        d=0.9, dx=x_axis(0.1), K=diag6(1000.0), K_dot=diag6(1e6), P_d=0.0
    )
    assert d_dot < -100.0


# --- discrete deflection limiting ------------------------------------------


def test_deflection_step_constant_stiffness_keeps_full_scale():
    K = diag6(1000.0)
    d_next = deflection_limit_step(1.0, K, K, x_axis(0.1), P_d=0.0, dt=1e-3)
    assert abs(d_next - 1.0) < 1e-12


def test_deflection_step_doubled_stiffness_exact_ratio():
    K = diag6(1000.0)
    dx = x_axis(0.1)
    d_next = deflection_limit_step(1.0, K, 2.0 * K, dx, P_d=0.0, dt=1e-3)
    assert abs(d_next - 1.0 / math.sqrt(2.0)) < 1e-12
    # scaled spring energy is conserved across the stiffness doubling
    before = 0.5 * 1.0**2 * float(dx @ (K @ dx))
    after = 0.5 * d_next**2 * float(dx @ ((2.0 * K) @ dx))
    assert abs(after - before) < 1e-12


def test_deflection_step_zero_error_recovers():
    d_next = deflection_limit_step(
        0.2, diag6(1000.0), diag6(2000.0), np.zeros(6), P_d=0.5, dt=1e-3
    )
    assert d_next == 1.0


def test_deflection_step_budget_certificate():
    # the defining inequality: scaled spring energy grows by at most P_d dt
    rng = np.random.default_rng(17)
    d = 0.0
    dt = 1e-3
    K = np.zeros((6, 6))
    for _ in range(1000):
        A = rng.standard_normal((6, 6))
        K_next = A @ A.T * rng.uniform(0.0, 50.0)
        dx = rng.uniform(-0.1, 0.1, size=6)
        P_d = rng.uniform(0.0, 2.0)
        d_next = deflection_limit_step(d, K, K_next, dx, P_d, dt)
        assert 0.0 <= d_next <= 1.0
        before = 0.5 * d * d * float(dx @ (K @ dx))
        after = 0.5 * d_next * d_next * float(dx @ (K_next @ dx))
        assert after - before <= P_d * dt + 1e-12 * max(1.0, abs(before))
        d, K = d_next, K_next


def test_deflection_wrench_scaling():
    K = diag6(1000.0)
    K_d = diag6(10.0)
    dx = x_axis(0.1)
    dv = x_axis(0.2)
    nominal = K @ dx + K_d @ dv
    np.testing.assert_allclose(
        deflection_passivated_wrench(1.0, K, K_d, dx, dv), nominal, atol=1e-12
    )
    np.testing.assert_allclose(
        deflection_passivated_wrench(0.0, K, K_d, dx, dv), K_d @ dv, atol=1e-12
    )
    w = deflection_passivated_wrench(0.5, K, K_d, dx, np.zeros(6))
    np.testing.assert_allclose(w, x_axis(25.0), rtol=0.0, atol=1e-12)


def test_lever_power_identity():
    # scaled-lever power equals the passivated spring wrench power
    rng = np.random.default_rng(21)
    for _ in range(100):
        A = rng.standard_normal((6, 6))
        K = A @ A.T * 100.0
        dx = rng.standard_normal(6) * 0.1
        dv = rng.standard_normal(6)
        d = rng.uniform(0.0, 1.0)
        lever = float((K @ (d * dx)) @ (d * dv))
        spring = float(((d * d) * (K @ dx)) @ dv)
        assert abs(lever - spring) < 1e-12 * max(1.0, abs(lever))


# --- stiffness-change limiting ----------------------------------------------


def test_stiffness_step_decrease_passes_through():
    K_plus = diag6(2000.0)
    K_target = diag6(1500.0)
    K_next, d = stiffness_limit_step(K_plus, K_target, x_axis(0.1), P_d=0.0, dt=1e-3)
    assert np.array_equal(K_next, K_target)
    assert d == 1.0


def test_stiffness_step_no_budget_freezes():
    K_plus = diag6(1000.0)
    K_next, d = stiffness_limit_step(
        K_plus, diag6(2000.0), x_axis(0.1), P_d=0.0, dt=1e-3
    )
    assert d == 0.0
    np.testing.assert_allclose(K_next, K_plus, rtol=0.0, atol=0.0)


def test_stiffness_step_partial_adoption_exact():
    K_next, d = stiffness_limit_step(
        diag6(1000.0), diag6(2000.0), x_axis(0.1), P_d=1000.0, dt=1e-3
    )
    assert abs(d - 0.2) < 1e-12
    assert abs(K_next[0, 0] - 1200.0) < 1e-12


def test_stiffness_step_composition_identity():
    # the convex-combination update equals realizing d of the commanded
    # stiffness rate for one step
    rng = np.random.default_rng(33)
    for _ in range(50):
        A = rng.standard_normal((6, 6))
        B = rng.standard_normal((6, 6))
        K_plus = A @ A.T * 50.0
        K_target = B @ B.T * 50.0
        dx = rng.uniform(-0.1, 0.1, size=6)
        P_d = rng.uniform(0.0, 1.0)
        dt = 1e-3
        K_next, d = stiffness_limit_step(K_plus, K_target, dx, P_d, dt)
        K_dot = (K_target - K_plus) / dt
        composed = K_plus + dt * (d * K_dot)
        scale = max(1.0, float(np.max(np.abs(K_next))))
        np.testing.assert_allclose(K_next, composed, rtol=0.0, atol=1e-12 * scale)


def test_stiffness_step_certificate_and_psd():
    rng = np.random.default_rng(37)
    K_plus = np.zeros((6, 6))
    dt = 1e-3
    for _ in range(1000):
        A = rng.standard_normal((6, 6))
        K_target = A @ A.T * rng.uniform(0.0, 50.0)
        dx = rng.uniform(-0.1, 0.1, size=6)
        P_d = rng.uniform(0.0, 2.0)
        K_next, d = stiffness_limit_step(K_plus, K_target, dx, P_d, dt)
        assert 0.0 <= d <= 1.0
        assert np.min(np.linalg.eigvalsh(0.5 * (K_next + K_next.T))) > -1e-9
        gain = 0.5 * float(dx @ ((K_next - K_plus) @ dx))
        assert gain <= P_d * dt + 1e-12
        K_plus = K_next


def test_stiffness_wrench():
    K_plus = diag6(1200.0)
    w = stiffness_passivated_wrench(K_plus, diag6(10.0), x_axis(0.1), np.zeros(6))
    np.testing.assert_allclose(w, x_axis(120.0), rtol=0.0, atol=1e-12)


# --- curl passivation --------------------------------------------------------


def curl_2dof():
    return np.array([[0.0, 5.0], [-5.0, 0.0]])


def test_curl_zero_matrix():
    d_curl, w = curl_passivation(np.zeros((6, 6)), x_axis(0.1), x_axis(1.0), 1.0, 0.0)
    assert d_curl == 1.0
    assert np.array_equal(w, np.zeros(6))


def test_curl_dissipative_case_unscaled():
    dx = np.array([0.1, 0.0])
    dv = np.array([0.0, -0.2])
    d_curl, w = curl_passivation(curl_2dof(), dx, dv, P_d=0.0, P_a=0.0)
    assert d_curl == 1.0
    np.testing.assert_allclose(w, np.array([0.0, -0.5]), rtol=0.0, atol=1e-12)
    # the injected power is negative here, so a zero allowance changes nothing
    d_curl, w = curl_passivation(curl_2dof(), dx, dv, P_d=0.0, P_a=0.0, allowance=0.0)
    assert d_curl == 1.0
    np.testing.assert_allclose(w, np.array([0.0, -0.5]), rtol=0.0, atol=1e-12)


def test_curl_no_residual_budget():
    dx = np.array([0.1, 0.0])
    dv = np.array([0.0, 0.2])  # injecting orientation
    d_curl, w = curl_passivation(
        curl_2dof(), dx, dv, P_d=0.01, P_a=0.02, allowance=0.0
    )
    assert d_curl == 0.0
    assert np.array_equal(w, np.zeros(2))


def test_curl_partial_scaling():
    dx = np.array([0.1, 0.0])
    dv = np.array([0.0, 0.2])  # P_curl = 0.1 W
    d_curl, w = curl_passivation(
        curl_2dof(), dx, dv, P_d=0.08, P_a=0.02, allowance=0.05
    )
    assert abs(d_curl - 0.6) < 1e-12
    np.testing.assert_allclose(w, np.array([0.0, -0.3]), rtol=0.0, atol=1e-12)


def test_curl_within_allowance():
    dx = np.array([0.1, 0.0])
    dv = np.array([0.0, 0.2])
    d_curl, _ = curl_passivation(curl_2dof(), dx, dv, P_d=0.0, P_a=0.0, allowance=0.1)
    assert d_curl == 1.0


def test_curl_scaling_always_in_range():
    rng = np.random.default_rng(41)
    for _ in range(200):
        A = rng.standard_normal((6, 6))
        K_curl = 0.5 * (A - A.T) * 10.0
        dx = rng.standard_normal(6) * 0.1
        dv = rng.standard_normal(6)
        d_curl, _ = curl_passivation(
            K_curl, dx, dv, P_d=rng.uniform(0, 1), P_a=rng.uniform(0, 1)
        )
        assert 0.0 <= d_curl <= 1.0


# --- initial energy budget ---------------------------------------------------


def test_budget_example():
    budget = InitialEnergyBudget(remaining=0.2, rate_limit=0.3)
    granted = draw_initial_energy(budget, requested=1.0, dt=1e-3)
    assert abs(granted - 0.3) < 1e-15
    assert abs(budget.remaining - 0.1997) < 1e-15


def test_budget_empty_grants_nothing():
    budget = InitialEnergyBudget(remaining=0.0, rate_limit=0.3)
    assert draw_initial_energy(budget, requested=1.0, dt=1e-3) == 0.0


def test_budget_small_request():
    budget = InitialEnergyBudget(remaining=0.2, rate_limit=0.3)
    granted = draw_initial_energy(budget, requested=0.1, dt=1e-3)
    assert abs(granted - 0.1) < 1e-15


def test_budget_monotone_and_nonnegative():
    rng = np.random.default_rng(43)
    budget = InitialEnergyBudget(remaining=0.05, rate_limit=2.0)
    prev = budget.remaining
    for _ in range(500):
        draw_initial_energy(budget, requested=float(rng.uniform(0, 3)), dt=1e-3)
        assert 0.0 <= budget.remaining <= prev
        prev = budget.remaining
    # a large enough request drains the rest in one step
    budget2 = InitialEnergyBudget(remaining=1e-4, rate_limit=100.0)
    granted = draw_initial_energy(budget2, requested=50.0, dt=1e-3)
    assert abs(granted - 0.1) < 1e-12
    assert budget2.remaining == 0.0


def test_budget_validation():
    with pytest.raises(ValueError):
        InitialEnergyBudget(remaining=-1.0, rate_limit=0.1)
    budget = InitialEnergyBudget(remaining=1.0, rate_limit=0.1)
    with pytest.raises(ValueError):
        draw_initial_energy(budget, requested=-0.5, dt=1e-3)


# --- per-attractor record -----------------------------------------------------


def test_attractor_state_defaults():
    state = AttractorState(id=0, pose=Pose.identity())
    assert state.d == 0.0
    assert state.d_curl == 1.0
    assert np.array_equal(state.K_passivated, np.zeros((6, 6)))
    assert np.array_equal(state.twist, np.zeros(6))
    assert isinstance(state.prev_pose, Pose)


def test_attractor_state_validation():
    with pytest.raises(ValueError):
        AttractorState(id=0, pose=Pose.identity(), d=1.5)
    bad = np.zeros((6, 6))
    bad[0, 1] = 1.0
    with pytest.raises(ValueError):
        AttractorState(id=0, pose=Pose.identity(), K_passivated=bad)


def test_epsilon_is_machine_epsilon():
    assert EPSILON == float(np.finfo(float).eps)
