"""Geometry of rigid-body poses on R^3 x SO(3).

Conventions used throughout the package:

* Quaternions are numpy arrays ``[w, x, y, z]`` of unit norm.
* 6-vectors stack the linear part first: twists are ``[v; omega]``, wrenches
  ``[f; tau]``, pose errors ``[dp; dtheta]``.
* ``log_map(base, target)`` expresses the error in the *base* body frame:
  linear part ``R(q_base)^T (p_target - p_base)``, angular part the rotation
  vector of ``q_base^-1 * q_target`` with shortest-arc sign (norm <= pi).
  All controller-side tangent quantities live in the end-effector body frame;
  ``rotate_tangent`` re-expresses them (block-diagonal rotation on both
  halves).
* Orientations are canonicalized to ``w >= 0`` before taking logs, so a
  quaternion and its negation produce bit-identical results (double cover).
  At ``w == 0`` (half-turn) the sign is fixed so the largest-magnitude vector
  component is positive, ties broken by lowest index; this makes the
  antipodal case deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_SMALL_ANGLE = 1e-12


def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("zero quaternion")
    if abs(n - 1.0) < 1e-12:
        # already unit: keep bits so renormalization is idempotent
        return q.copy()
    return q / n


def quat_canonical(q: np.ndarray) -> np.ndarray:
    """Fix the sign ambiguity of the double cover, deterministically."""
    w = q[0]
    if w > 0.0:
        return q
    if w < 0.0:
        return -q
    v = q[1:]
    k = int(np.argmax(np.abs(v)))
    return q if v[k] > 0.0 else -q


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate a 3-vector by the quaternion (q v q^-1, expanded)."""
    w = q[0]
    u = q[1:]
    t = 2.0 * np.cross(u, v)
    return v + w * t + np.cross(u, t)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_rotvec(r: np.ndarray) -> np.ndarray:
    """Unit quaternion of a rotation vector (axis * angle)."""
    r = np.asarray(r, dtype=float)
    angle = np.linalg.norm(r)
    half = 0.5 * angle
    if angle < _SMALL_ANGLE:
        # sin(half)/angle -> 1/2 - angle^2/48
        s = 0.5 - angle * angle / 48.0
    else:
        s = np.sin(half) / angle
    return np.array([np.cos(half), r[0] * s, r[1] * s, r[2] * s])


def quat_to_rotvec(q: np.ndarray) -> np.ndarray:
    """Rotation vector of a unit quaternion, shortest arc (norm <= pi)."""
    q = quat_canonical(q)
    w = q[0]
    v = q[1:]
    n = np.linalg.norm(v)
    if n < _SMALL_ANGLE:
        # angle/sin(angle/2) * v/2 with the first Taylor correction
        return (2.0 / w) * (1.0 - n * n / (3.0 * w * w)) * v
    angle = 2.0 * np.arctan2(n, w)
    return (angle / n) * v


def rotate_tangent(q: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Apply the block-diagonal rotation of q to a stacked 6-vector."""
    out = np.empty(6)
    out[:3] = quat_rotate(q, t[:3])
    out[3:] = quat_rotate(q, t[3:])
    return out


def tangent_rotation(q: np.ndarray) -> np.ndarray:
    """The 6x6 block-diagonal rotation matrix of a quaternion."""
    R = quat_to_matrix(q)
    out = np.zeros((6, 6))
    out[:3, :3] = R
    out[3:, 3:] = R
    return out


@dataclass
class Pose:
    """Position plus unit quaternion; the quaternion is normalized on init."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.array([1.0, 0, 0, 0]))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).copy()
        self.orientation = quat_normalize(self.orientation)

    def copy(self) -> "Pose":
        return Pose(self.position.copy(), self.orientation.copy())

    @staticmethod
    def identity() -> "Pose":
        return Pose()


def log_map(base: Pose, target: Pose) -> np.ndarray:
    """Pose error from base to target, expressed in the base body frame."""
    out = np.empty(6)
    qb_inv = quat_conjugate(base.orientation)
    out[:3] = quat_rotate(qb_inv, target.position - base.position)
    out[3:] = quat_to_rotvec(quat_multiply(qb_inv, target.orientation))
    return out


def exp_map(base: Pose, delta: np.ndarray) -> Pose:
    """Apply a base-frame tangent increment to a pose (inverse of log_map)."""
    delta = np.asarray(delta, dtype=float)
    p = base.position + quat_rotate(base.orientation, delta[:3])
    q = quat_multiply(base.orientation, quat_from_rotvec(delta[3:]))
    return Pose(p, q)


def finite_difference_twist(current: Pose, previous: Pose, dt: float) -> np.ndarray:
    """Body-frame twist of a pose trajectory from two samples.

    Returns -log_map(current, previous)/dt, i.e. the increment that carried
    ``previous`` to ``current`` expressed in the current body frame. Exact
    zeros when the samples coincide.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if np.array_equal(current.position, previous.position) and (
        np.array_equal(current.orientation, previous.orientation)
        or np.array_equal(current.orientation, -previous.orientation)
    ):
        return np.zeros(6)
    return -log_map(current, previous) / dt
