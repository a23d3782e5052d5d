"""Passivation of variable-stiffness springs and curl wrenches.

Raising a spring's stiffness while it is deflected injects energy.  Two
limiters keep that injection within the energy the attractor's damper has
just dissipated:

  * deflection limiting keeps the nominal stiffness but scales the spring
    wrench by d^2, choosing the next d so the scaled spring energy grows by
    at most the damping budget;
  * stiffness-change limiting moves a realized stiffness toward the target
    by a convex step sized so the spring-energy increase stays within the
    budget.

Both enforce, step by step,

    1/2 (new spring energy at dx) - 1/2 (old spring energy at dx) <= P_d dt

at the freshest deflection measurement dx.  The skew remainder left by
arbitration is not a spring and gets its own scaling from the residual
budget, and an initial-energy budget can top up P_d so the robot is able to
start moving from rest.
"""

from dataclasses import dataclass, field

import numpy as np

from .geom import Pose
from .impedance import CartesianChart, ManifoldChart

EPSILON = float(np.finfo(float).eps)


def damping_power(dv, K_d, dv_prev=None, mode="quadratic"):
    """Power dissipated by the attractor damper, the budget for limiting.

    Quadratic mode evaluates dv^T K_d dv and is nonnegative for PSD K_d.
    Lagged mode evaluates dv^T K_d dv_prev against the previous deflection
    rate; that product can turn negative, in which case it is clamped at
    zero so downstream square roots stay real.
    """
    dv = np.asarray(dv, dtype=float)
    K_d = np.asarray(K_d, dtype=float)
    if mode == "quadratic":
        return float(dv @ (K_d @ dv))
    if mode == "lagged":
        if dv_prev is None:
            raise ValueError("lagged mode needs the previous deflection rate")
        raw = float(dv @ (K_d @ np.asarray(dv_prev, dtype=float)))
        return max(0.0, raw)
    raise ValueError(f"unknown damping power mode: {mode!r}")


def deflection_limit_continuous(d, dx, K, K_dot, P_d, epsilon=EPSILON):
    """Rate of change of the deflection scaling in the continuous law.

        d_dot = (P_d - 1/2 d^2 dx^T K_dot dx) / (d dx^T K dx + epsilon)

    The caller integrates d_dot and clamps d to [0, 1].  The equation is
    stiff near d = 0; epsilon only guards the division, so driving it with
    large stiffness steps needs a small enough time step or a larger
    epsilon.  Meant for the one-axis demonstrator; the discrete form below
    is the one with a step-by-step guarantee.
    """
    dx = np.asarray(dx, dtype=float)
    K = np.asarray(K, dtype=float)
    K_dot = np.asarray(K_dot, dtype=float)
    injection = 0.5 * d * d * float(dx @ (K_dot @ dx))
    return (P_d - injection) / (d * float(dx @ (K @ dx)) + epsilon)


def deflection_limit_step(d, K_current, K_next, dx, P_d, dt, epsilon=EPSILON):
    """Next deflection scaling such that the scaled spring energy at the
    current deflection grows by at most P_d dt.

        d_next = min(1, sqrt((P_d dt + 1/2 d^2 dx^T K dx)
                             / (1/2 dx^T K_next dx + epsilon)))

    When the deflection vanishes the denominator collapses to epsilon and
    any positive budget restores d to 1.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    dx = np.asarray(dx, dtype=float)
    K_current = np.asarray(K_current, dtype=float)
    K_next = np.asarray(K_next, dtype=float)
    num = max(0.0, P_d) * dt + 0.5 * d * d * float(dx @ (K_current @ dx))
    den = 0.5 * float(dx @ (K_next @ dx)) + epsilon
    return min(1.0, float(np.sqrt(max(0.0, num) / den)))


def deflection_passivated_wrench(d, K_p, K_d, dx, dv):
    """Spring wrench scaled by d^2 plus the unscaled damping wrench."""
    K_p = np.asarray(K_p, dtype=float)
    K_d = np.asarray(K_d, dtype=float)
    dx = np.asarray(dx, dtype=float)
    dv = np.asarray(dv, dtype=float)
    return (d * d) * (K_p @ dx) + K_d @ dv


def stiffness_limit_step(K_passivated, K_target, dx, P_d, dt):
    """Move the realized stiffness toward the target within the budget.

    Returns ``(K_next, d)`` where d in [0, 1] is the fraction of the
    commanded change adopted this step and

        K_next = d K_target + (1 - d) K_passivated

    Constant or decreasing stiffness along dx is adopted outright (d = 1);
    otherwise d is sized so the spring-energy increase at dx is at most
    P_d dt.  A convex combination of PSD matrices, so PSD is preserved.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    K_passivated = np.asarray(K_passivated, dtype=float)
    K_target = np.asarray(K_target, dtype=float)
    dx = np.asarray(dx, dtype=float)
    K_dot = (K_target - K_passivated) / dt
    q = float(dx @ (K_dot @ dx))
    if 0.5 * q <= 0.0:
        return K_target.copy(), 1.0
    d = min(1.0, max(0.0, 2.0 * max(0.0, P_d) / q))
    K_next = d * K_target + (1.0 - d) * K_passivated
    return K_next, d


def stiffness_passivated_wrench(K_passivated, K_d, dx, dv):
    """Spring wrench from the realized stiffness plus the damping wrench."""
    K_passivated = np.asarray(K_passivated, dtype=float)
    K_d = np.asarray(K_d, dtype=float)
    dx = np.asarray(dx, dtype=float)
    dv = np.asarray(dv, dtype=float)
    return K_passivated @ dx + K_d @ dv


def curl_passivation(K_curl, dx, dv, P_d, P_a, allowance=0.1):
    """Scale the skew-stiffness wrench so its active power fits the budget.

    The skew part injects power P_curl = -dv^T K_curl dx.  Injections below
    ``allowance`` pass unscaled; beyond it, only the damping budget left
    over after the spring limiter (P_d - P_a) may be spent.  Returns
    ``(d_curl, w_curl)`` with w_curl = d_curl K_curl dx.
    """
    if allowance < 0.0:
        raise ValueError("allowance must be nonnegative")
    K_curl = np.asarray(K_curl, dtype=float)
    dx = np.asarray(dx, dtype=float)
    dv = np.asarray(dv, dtype=float)
    w_raw = K_curl @ dx
    P_curl = -float(dv @ w_raw)
    if P_curl <= allowance:
        d_curl = 1.0
    elif P_d <= P_a:
        d_curl = 0.0
    else:
        d_curl = min((P_d - P_a) / P_curl, 1.0)
    return d_curl, d_curl * w_raw


@dataclass
class InitialEnergyBudget:
    """A one-shot energy reserve released at a bounded rate."""

    remaining: float
    rate_limit: float

    def __post_init__(self):
        if self.remaining < 0.0:
            raise ValueError("remaining energy must be nonnegative")
        if self.rate_limit < 0.0:
            raise ValueError("rate limit must be nonnegative")


def draw_initial_energy(budget: InitialEnergyBudget, requested, dt):
    """Grant power from the budget: min(requested, rate limit, remaining/dt).

    Decrements the budget by the granted energy; the caller adds the grant
    to its damping budget for this step.
    """
    if requested < 0.0:
        raise ValueError("requested power must be nonnegative")
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    granted = min(float(requested), budget.rate_limit, budget.remaining / dt)
    granted = max(0.0, granted)
    budget.remaining = max(0.0, budget.remaining - granted * dt)
    return granted


def _zeros66():
    return np.zeros((6, 6))


@dataclass
class AttractorState:
    """Per-attractor record carried across control steps.

    ``d`` is the deflection-limiter scaling, ``K_passivated`` the realized
    stiffness of the change limiter, ``d_curl`` the skew-wrench scaling.
    New attractors start with zero realized stiffness and d = 0 so springs
    build up only as fast as dissipation pays for them.
    """

    id: int
    pose: Pose
    prev_pose: Pose = None
    twist: np.ndarray = None
    chart: ManifoldChart = field(default_factory=CartesianChart)
    K_nominal: np.ndarray = field(default_factory=_zeros66)
    K_curl: np.ndarray = field(default_factory=_zeros66)
    K_passivated: np.ndarray = field(default_factory=_zeros66)
    d: float = 0.0
    d_curl: float = 1.0

    def __post_init__(self):
        if self.prev_pose is None:
            self.prev_pose = self.pose.copy()
        if self.twist is None:
            self.twist = np.zeros(6)
        self.twist = np.asarray(self.twist, dtype=float)
        self.K_nominal = np.asarray(self.K_nominal, dtype=float)
        self.K_curl = np.asarray(self.K_curl, dtype=float)
        self.K_passivated = np.asarray(self.K_passivated, dtype=float)
        if not 0.0 <= self.d <= 1.0:
            raise ValueError("d must lie in [0, 1]")
        if not 0.0 <= self.d_curl <= 1.0:
            raise ValueError("d_curl must lie in [0, 1]")
        scale = max(1.0, float(np.max(np.abs(self.K_passivated))))
        if np.max(np.abs(self.K_passivated - self.K_passivated.T)) > 1e-9 * scale:
            raise ValueError("K_passivated must be symmetric within 1e-9")
