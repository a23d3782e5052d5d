"""Impedance wrench law, damping design, and manifold chart transforms.

The impedance wrench acts on a 6-DOF tangent error (linear first, angular
second) expressed in the end-effector body frame.  Damping matrices are
designed by simultaneous diagonalization of the mass and stiffness matrices
so every vibration mode gets the same damping ratio.

Charts reshape the translational spring geometry.  A chart supplies

  * error coordinates: where the spring deflection lives,
  * a wrench transform back to the end-effector frame,
  * a velocity transform that is the exact adjoint of the wrench transform,

so that (chart wrench) . (chart velocity) equals (body wrench) . (body
velocity) and energy bookkeeping is coordinate independent.  The cartesian
chart is the identity.  The cylindrical chart measures (radius, arc length,
height) around a configurable axis and is singular on the axis itself; inside
``r_min`` the transform raises :class:`ChartSingularityError` and the caller
is expected to fall back to the cartesian chart for that step.
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ChartSingularityError
from .geom import Pose, log_map, quat_to_matrix


def impedance_wrench(K_p, K_d, dx, dv):
    """Spring-damper wrench ``K_p @ dx + K_d @ dv``."""
    K_p = np.asarray(K_p, dtype=float)
    K_d = np.asarray(K_d, dtype=float)
    dx = np.asarray(dx, dtype=float)
    dv = np.asarray(dv, dtype=float)
    return K_p @ dx + K_d @ dv


def _require_symmetric(K, tol, name):
    K = np.asarray(K, dtype=float)
    scale = max(1.0, float(np.max(np.abs(K))))
    if np.max(np.abs(K - K.T)) > tol * scale:
        raise ValueError(f"{name} must be symmetric within {tol:g}")
    return 0.5 * (K + K.T)


def double_diagonalization_damping(M, K_p_sym, xi=0.7):
    """Design a damping matrix giving ratio ``xi`` on every mode of (M, K).

    Factor M = L L^T, diagonalize the mass-normalized stiffness
    L^-1 K L^-T = Q diag(lam) Q^T, and assemble

        K_d = (L Q) diag(2 xi sqrt(lam)) (L Q)^T

    For M = I and diagonal K this reduces to the familiar per-axis rule
    k_d = 2 xi sqrt(k).  The input stiffness must already be symmetric;
    pass the symmetric part of a modulated stiffness, never the raw matrix.
    """
    if not 0.0 < xi <= 1.0:
        raise ValueError("damping ratio must be in (0, 1]")
    M = np.asarray(M, dtype=float)
    K = _require_symmetric(K_p_sym, 1e-9, "stiffness")
    L = np.linalg.cholesky(M)
    # L^-1 K L^-T via two triangular solves.
    tmp = np.linalg.solve(L, K)
    K_tilde = np.linalg.solve(L, tmp.T).T
    K_tilde = 0.5 * (K_tilde + K_tilde.T)
    lam, Q = np.linalg.eigh(K_tilde)
    lam = np.clip(lam, 0.0, None)
    B = L @ Q
    K_d = B @ np.diag(2.0 * xi * np.sqrt(lam)) @ B.T
    return 0.5 * (K_d + K_d.T)


def floor_damping(K_d, floor=0.1):
    """Clamp the eigenvalues of a symmetric damping matrix at ``floor``.

    Keeps dissipation strictly positive even when the designed damping
    vanishes together with the stiffness, so scaling recovery is never
    starved of budget.
    """
    K_d = _require_symmetric(K_d, 1e-9, "damping")
    lam, Q = np.linalg.eigh(K_d)
    lam = np.clip(lam, float(floor), None)
    out = Q @ np.diag(lam) @ Q.T
    return 0.5 * (out + out.T)


@dataclass
class CartesianChart:
    """Identity chart: body-frame tangent coordinates are used as-is."""


@dataclass
class CylindricalChart:
    """Cylindrical coordinates (radius, arc length, height) about an axis.

    The axis is the local z direction of ``axis_pose``.  Arc length is the
    angle scaled by ``radius_reference`` so all three coordinates carry
    metres.  The chart is undefined within ``r_min`` of the axis.
    """

    axis_pose: Pose = field(default_factory=Pose.identity)
    radius_reference: float = 1.0
    r_min: float = 0.01

    def __post_init__(self):
        if self.radius_reference <= 0.0:
            raise ValueError("radius_reference must be positive")
        if self.r_min <= 0.0:
            raise ValueError("r_min must be positive")


ManifoldChart = Union[CartesianChart, CylindricalChart]


def _axis_frame_position(chart: CylindricalChart, position):
    R_a = quat_to_matrix(chart.axis_pose.orientation)
    return R_a.T @ (np.asarray(position, dtype=float) - chart.axis_pose.position)


def cylindrical_coordinates(chart: CylindricalChart, position):
    """Map a world position to (radius, arc, height) chart coordinates.

    Raises :class:`ChartSingularityError` within ``r_min`` of the axis where
    the angle is ill conditioned.
    """
    p = _axis_frame_position(chart, position)
    r = float(np.hypot(p[0], p[1]))
    if r < chart.r_min:
        raise ChartSingularityError(
            f"radius {r:.3e} m is inside the chart singularity r_min={chart.r_min:g} m"
        )
    theta = float(np.arctan2(p[1], p[0]))
    return np.array([r, chart.radius_reference * theta, p[2]])


def chart_error(chart: ManifoldChart, ee_pose: Pose, target_pose: Pose):
    """Spring deflection from the end effector to the target, in chart coords.

    The angular block is always the body-frame rotation error; only the
    translational block is reshaped by the chart.  For the cylindrical chart
    the angle difference is wrapped to (-pi, pi] before scaling by the
    reference radius.
    """
    err = log_map(ee_pose, target_pose)
    if isinstance(chart, CartesianChart):
        return err
    c_ee = cylindrical_coordinates(chart, ee_pose.position)
    c_t = cylindrical_coordinates(chart, target_pose.position)
    r_ref = chart.radius_reference
    dtheta = (c_t[1] - c_ee[1]) / r_ref
    dtheta = (dtheta + np.pi) % (2.0 * np.pi) - np.pi
    lin = np.array([c_t[0] - c_ee[0], r_ref * dtheta, c_t[2] - c_ee[2]])
    return np.concatenate([lin, err[3:]])


def chart_rotation(chart: ManifoldChart, ee_pose: Pose):
    """Orthogonal 6x6 block rotating chart axes into the end-effector frame."""
    if isinstance(chart, CartesianChart):
        return np.eye(6)
    R_ee = quat_to_matrix(ee_pose.orientation)
    R_a = quat_to_matrix(chart.axis_pose.orientation)
    out = np.eye(6)
    out[:3, :3] = R_ee.T @ R_a
    return out


def chart_jacobian_t(chart: ManifoldChart, ee_pose: Pose):
    """Transpose of the chart Jacobian at the end-effector position.

    Maps chart-coordinate forces to axis-frame cartesian forces (angular
    block is the identity).  Singular within ``r_min`` of the axis.
    """
    if isinstance(chart, CartesianChart):
        return np.eye(6)
    p = _axis_frame_position(chart, ee_pose.position)
    r = float(np.hypot(p[0], p[1]))
    if r < chart.r_min:
        raise ChartSingularityError(
            f"radius {r:.3e} m is inside the chart singularity r_min={chart.r_min:g} m"
        )
    c, s = p[0] / r, p[1] / r
    k = chart.radius_reference / r
    J = np.array([[c, s, 0.0], [-k * s, k * c, 0.0], [0.0, 0.0, 1.0]])
    out = np.eye(6)
    out[:3, :3] = J.T
    return out


def chart_transform(chart: ManifoldChart, ee_pose: Pose):
    """Full 6x6 map from chart wrenches to end-effector body wrenches."""
    return chart_rotation(chart, ee_pose) @ chart_jacobian_t(chart, ee_pose)


def manifold_wrench_transform(chart: ManifoldChart, ee_pose: Pose, w_manifold):
    """Transform a chart-coordinate wrench to the end-effector body frame."""
    w = np.asarray(w_manifold, dtype=float)
    return chart_transform(chart, ee_pose) @ w


def manifold_velocity_transform(chart: ManifoldChart, ee_pose: Pose, twist_body):
    """Adjoint map taking body-frame twists to chart-coordinate velocities.

    Defined as the transpose of the wrench transform so chart-side power
    equals body-side power exactly.
    """
    v = np.asarray(twist_body, dtype=float)
    return chart_transform(chart, ee_pose).T @ v
