"""Floating 6-DOF rigid body, penalty wall, and the velocity low-pass filter.

The plant is a task-space double integrator: constant mass matrix M, viscous
matrix D, world-frame twist u, so M u' = w_total - D u with no velocity
product terms. Orientation is integrated by applying the world twist as a
body-frame increment through the exponential map.

Damping is integrated at the velocity midpoint,

    (M + dt/2 D) u_next = (M - dt/2 D) u + w_total dt,

which keeps the semi-implicit flavor (the new twist integrates the pose) and
makes the kinetic-energy budget an identity: with u_mid = (u + u_next)/2,

    KE_next - KE = u_mid . w_total dt - u_mid . D u_mid dt,

so plant dissipation is unconditionally nonnegative and the energy ledger can
account each step exactly instead of to O(dt).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PlantDivergedError
from .geom import Pose, exp_map, quat_conjugate, rotate_tangent

DEFAULT_M = np.diag([5.0, 5.0, 5.0, 0.2, 0.2, 0.2])
DEFAULT_D = np.diag([5.0, 5.0, 5.0, 0.5, 0.5, 0.5])


@dataclass
class WallParams:
    """Penalty plane {p . axis = offset}; pushes along +axis when penetrated."""

    axis: np.ndarray
    offset: float
    stiffness: float
    damping: float

    def __post_init__(self):
        self.axis = np.asarray(self.axis, dtype=float)
        n = np.linalg.norm(self.axis)
        if n == 0.0:
            raise ValueError("wall axis must be nonzero")
        self.axis = self.axis / n
        if self.stiffness < 0.0 or self.damping < 0.0:
            raise ValueError("wall stiffness and damping must be >= 0")


@dataclass
class PlantParams:
    M: np.ndarray = field(default_factory=lambda: DEFAULT_M.copy())
    D: np.ndarray = field(default_factory=lambda: DEFAULT_D.copy())
    dt: float = 1e-3
    wall: Optional[WallParams] = None

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)
        self.D = np.asarray(self.D, dtype=float)
        if self.M.shape != (6, 6) or self.D.shape != (6, 6):
            raise ValueError("M and D must be 6x6")
        if not np.allclose(self.M, self.M.T, atol=1e-12):
            raise ValueError("M must be symmetric")
        if not np.allclose(self.D, self.D.T, atol=1e-12):
            raise ValueError("D must be symmetric")
        if np.linalg.eigvalsh(self.M).min() <= 0.0:
            raise ValueError("M must be positive definite")
        if np.linalg.eigvalsh(self.D).min() < -1e-12:
            raise ValueError("D must be positive semidefinite")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        h = 0.5 * self.dt
        # cached step matrices: u' = _step_gain @ u + _step_inv @ (w dt)
        self._step_inv = np.linalg.inv(self.M + h * self.D)
        self._step_gain = self._step_inv @ (self.M - h * self.D)


@dataclass
class PlantState:
    pose: Pose
    twist: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def __post_init__(self):
        self.twist = np.asarray(self.twist, dtype=float).copy()

    def copy(self) -> "PlantState":
        return PlantState(self.pose.copy(), self.twist.copy())

    def kinetic_energy(self, params: PlantParams) -> float:
        return 0.5 * float(self.twist @ params.M @ self.twist)


def wall_wrench(state: PlantState, wall: Optional[WallParams]) -> np.ndarray:
    """Repulsive-only penalty wrench; zero torque."""
    out = np.zeros(6)
    if wall is None:
        return out
    s = float(wall.axis @ state.pose.position) - wall.offset
    if s >= 0.0:
        return out
    rate = -float(wall.axis @ state.twist[:3])  # penetration rate
    f = wall.stiffness * (-s) + wall.damping * rate
    if f > 0.0:
        out[:3] = f * wall.axis
    return out


def plant_step(state: PlantState, params: PlantParams,
               total_wrench: np.ndarray, external_wrench: np.ndarray) -> PlantState:
    """Advance one control period under controller + external + wall wrenches.

    Deterministic: identical inputs give bit-identical outputs.
    """
    w = total_wrench + external_wrench + wall_wrench(state, params.wall)
    twist_next = params._step_gain @ state.twist + params._step_inv @ (w * params.dt)
    if not np.all(np.isfinite(twist_next)):
        raise PlantDivergedError(detail=f"twist={twist_next}")
    q_inv = quat_conjugate(state.pose.orientation)
    pose_next = exp_map(state.pose, rotate_tangent(q_inv, twist_next * params.dt))
    return PlantState(pose_next, twist_next)


@dataclass
class LowPassFilter:
    """First-order filter y' = y + alpha (u - y), alpha = dt/(dt + 1/(2 pi fc)).

    ``cutoff_hz = None`` passes the input through unchanged.
    """

    cutoff_hz: Optional[float]
    state: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=float).copy()

    def step(self, u: np.ndarray, dt: float) -> np.ndarray:
        if self.cutoff_hz is None:
            self.state = np.asarray(u, dtype=float).copy()
        else:
            alpha = dt / (dt + 1.0 / (2.0 * np.pi * self.cutoff_hz))
            self.state = self.state + alpha * (u - self.state)
        return self.state.copy()
