"""Vectorized runner for the seeded random-scenario family.

Statistical passivity checks run thousands of 2 s scenarios; stepping them
one by one through the scalar harness is needlessly slow because every run
of the family shares the same structure (one attractor, cartesian chart,
piecewise-constant stiffness, one force step, no wall, budget, or
arbitration).  This module advances a whole batch at once with stacked
numpy arrays, replicating the scalar harness arithmetic operation for
operation so results agree to rounding.

Only the family produced by ``random_family_params`` is supported; anything
richer belongs in the scalar harness.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .plant import PlantParams
from .scenario import random_family_params

_SMALL_ANGLE = 1e-12
_FAMILY_CUTOFF_HZ = 10.0
_XI = 0.7
_FLOOR = 0.1
_EPSILON = float(np.finfo(float).eps)

BATCH_METHODS = ("none", "deflection_discrete", "stiffness_change")


# ---------------------------------------------------------------------------
# batched quaternion helpers (arrays (B, 4) / (B, 3), [w, x, y, z])


def q_conjugate(q):
    out = q.copy()
    out[:, 1:] *= -1.0
    return out


def q_multiply(a, b):
    aw, ax, ay, az = a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    bw, bx, by, bz = b[:, 0], b[:, 1], b[:, 2], b[:, 3]
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=1)


def q_rotate(q, v):
    w = q[:, :1]
    u = q[:, 1:]
    t = 2.0 * np.cross(u, v)
    return v + w * t + np.cross(u, t)


def q_to_matrix(q):
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    B = q.shape[0]
    R = np.empty((B, 3, 3))
    R[:, 0, 0] = 1 - 2 * (y * y + z * z)
    R[:, 0, 1] = 2 * (x * y - w * z)
    R[:, 0, 2] = 2 * (x * z + w * y)
    R[:, 1, 0] = 2 * (x * y + w * z)
    R[:, 1, 1] = 1 - 2 * (x * x + z * z)
    R[:, 1, 2] = 2 * (y * z - w * x)
    R[:, 2, 0] = 2 * (x * z - w * y)
    R[:, 2, 1] = 2 * (y * z + w * x)
    R[:, 2, 2] = 1 - 2 * (x * x + y * y)
    return R


def q_normalize(q):
    n = np.linalg.norm(q, axis=1, keepdims=True)
    if np.any(n == 0.0):
        raise ValueError("zero quaternion in batch")
    keep = np.abs(n - 1.0) < 1e-12
    return np.where(keep, q, q / n)


def q_from_rotvec(r):
    angle = np.linalg.norm(r, axis=1)
    half = 0.5 * angle
    small = angle < _SMALL_ANGLE
    safe = np.where(small, 1.0, angle)
    s = np.where(small, 0.5 - angle * angle / 48.0, np.sin(half) / safe)
    return np.concatenate([np.cos(half)[:, None], r * s[:, None]], axis=1)


def q_to_rotvec(q):
    sign = np.where(q[:, :1] < 0.0, -1.0, 1.0)
    q = q * sign
    w = q[:, 0]
    v = q[:, 1:]
    n = np.linalg.norm(v, axis=1)
    small = n < _SMALL_ANGLE
    w_safe = np.where(w == 0.0, 1.0, w)
    small_scale = (2.0 / w_safe) * (1.0 - n * n / (3.0 * w_safe * w_safe))
    n_safe = np.where(small, 1.0, n)
    big_scale = 2.0 * np.arctan2(n, w) / n_safe
    return v * np.where(small, small_scale, big_scale)[:, None]


# ---------------------------------------------------------------------------
# batched damping design (mirrors the scalar double diagonalization + floor)


def _batch_damping(M, K):
    """Modal damping then eigenvalue floor for a stack of stiffnesses."""
    K = 0.5 * (K + K.transpose(0, 2, 1))
    L = np.linalg.cholesky(M)
    tmp = np.linalg.solve(L, K)
    K_tilde = np.linalg.solve(L, tmp.transpose(0, 2, 1)).transpose(0, 2, 1)
    K_tilde = 0.5 * (K_tilde + K_tilde.transpose(0, 2, 1))
    lam, Q = np.linalg.eigh(K_tilde)
    lam = np.clip(lam, 0.0, None)
    Bm = L @ Q
    K_d = (Bm * (2.0 * _XI * np.sqrt(lam))[:, None, :]) @ Bm.transpose(0, 2, 1)
    K_d = 0.5 * (K_d + K_d.transpose(0, 2, 1))
    lam, Q = np.linalg.eigh(K_d)
    lam = np.clip(lam, _FLOOR, None)
    out = (Q * lam[:, None, :]) @ Q.transpose(0, 2, 1)
    return 0.5 * (out + out.transpose(0, 2, 1))


def _quad(dx, K):
    """Batched dx . (K dx)."""
    return np.einsum("bi,bi->b", dx, np.einsum("bij,bj->bi", K, dx))


@dataclass
class BatchResult:
    """Per-run passivity accounting for a batch of family members."""

    violation_energy: np.ndarray     # (B,) joules above reading, threshold 0
    violation_steps: np.ndarray      # (B,) steps with any positive excess
    n_steps: int
    series: Optional[dict] = None    # populated when collect=True


def run_random_batch(seeds: Sequence[int], method: str,
                     collect: bool = False) -> BatchResult:
    if method not in BATCH_METHODS:
        raise ValueError(f"batch runner supports {BATCH_METHODS}, not {method!r}")
    members = [random_family_params(int(s)) for s in seeds]
    B = len(members)
    if B == 0:
        raise ValueError("empty seed list")
    dt = members[0].dt
    duration = members[0].duration
    n_steps = int(round(duration / dt))

    offsets = np.stack([m.offset for m in members])
    K_stage = np.stack([np.stack([m.K0, m.K1, m.K2]) for m in members])  # (B,3,6,6)
    t1 = np.array([m.t1 for m in members])
    t2 = np.array([m.t2 for m in members])
    w_ext_full = np.stack([m.wrench for m in members])
    t_force = np.array([m.t_force for m in members])

    params = PlantParams(dt=dt)
    M, G, Hinv = params.M, params._step_gain, params._step_inv
    alpha = dt / (dt + 1.0 / (2.0 * np.pi * _FAMILY_CUTOFF_HZ))

    arangeB = np.arange(B)
    K_d_stage = None
    if method != "stiffness_change":
        K_d_stage = np.stack([_batch_damping(M, K_stage[:, j]) for j in range(3)],
                             axis=1)

    # plant state
    p = np.zeros((B, 3))
    q = np.tile(np.array([1.0, 0.0, 0.0, 0.0]), (B, 1))
    u = np.zeros((B, 6))

    # controller state (family members always start engaged)
    d = np.ones(B)
    K_nom_prev = K_stage[:, 0].copy()
    K_plus = K_stage[:, 0].copy()
    K_eff = K_stage[:, 0].copy()
    fstate = np.zeros((B, 6))
    dv = np.zeros((B, 6))
    kd_src = np.full((B, 6, 6), np.nan)
    K_d = np.zeros((B, 6, 6))

    viol_energy = np.zeros(B)
    viol_steps = np.zeros(B, dtype=int)
    series = {"vdot": [], "vdot_inp": [], "d": [], "v_pot": [], "v_total": []} \
        if collect else None

    def stage(t):
        return (t >= t1).astype(int) + (t >= t2).astype(int)

    def deflection_error():
        qc = q_conjugate(q)
        lin = q_rotate(qc, offsets - p)
        ang = q_to_rotvec(qc)
        return np.concatenate([lin, ang], axis=1)

    def refresh_damping(K_src):
        nonlocal K_d, kd_src
        changed = ~np.all(K_src == kd_src, axis=(1, 2))
        if np.any(changed):
            K_d[changed] = _batch_damping(M, K_src[changed])
            kd_src[changed] = K_src[changed]

    def limiter(K_target, P_d):
        nonlocal d, K_nom_prev, K_plus, K_eff
        before = 0.5 * _quad(dx, K_eff)
        if method == "none":
            d = np.ones(B)
            K_eff = K_target.copy()
        elif method == "deflection_discrete":
            num = np.maximum(0.0, P_d) * dt + 0.5 * d * d * _quad(dx, K_nom_prev)
            den = 0.5 * _quad(dx, K_target) + _EPSILON
            d = np.minimum(1.0, np.sqrt(np.maximum(0.0, num) / den))
            K_nom_prev = K_target.copy()
            K_eff = (d * d)[:, None, None] * K_target
        else:
            K_dot = (K_target - K_plus) / dt
            qq = _quad(dx, K_dot)
            adopt = 0.5 * qq <= 0.0
            qq_safe = np.where(adopt, 1.0, qq)
            frac = np.minimum(1.0, np.maximum(0.0, 2.0 * np.maximum(0.0, P_d) / qq_safe))
            frac = np.where(adopt, 1.0, frac)
            K_plus = np.where(adopt[:, None, None], K_target,
                              frac[:, None, None] * K_target
                              + (1.0 - frac)[:, None, None] * K_plus)
            K_plus = 0.5 * (K_plus + K_plus.transpose(0, 2, 1))
            d = frac
            K_eff = K_plus
        after = 0.5 * _quad(dx, K_eff)
        return before, after - before

    # boundary 0
    dx = deflection_error()
    K_cmd = K_stage[arangeB, stage(0.0)]
    if method == "stiffness_change":
        refresh_damping(K_plus)
    else:
        K_d = K_d_stage[arangeB, stage(0.0)]
    P_d = np.zeros(B)
    V_pot = 0.5 * _quad(dx, K_eff)
    before, switch = limiter(K_cmd, P_d)
    V_pot = before + switch
    dx_prev = dx.copy()
    v_kin = 0.5 * np.einsum("bi,bi->b", u @ M, u)
    v_total_prev = v_kin + V_pot
    if collect:
        series["vdot"].append(np.zeros(B))
        series["vdot_inp"].append(np.zeros(B))
        series["d"].append(d.copy())
        series["v_pot"].append(V_pot.copy())
        series["v_total"].append(v_total_prev.copy())

    for k in range(n_steps):
        t = k * dt
        w_ext = np.where((t >= t_force)[:, None], w_ext_full, 0.0)
        w_chart = np.einsum("bij,bj->bi", K_eff, dx) + np.einsum("bij,bj->bi", K_d, dv)
        R = q_to_matrix(q)
        w_world = np.concatenate([
            np.einsum("bij,bj->bi", R, w_chart[:, :3]),
            np.einsum("bij,bj->bi", R, w_chart[:, 3:]),
        ], axis=1)

        u_prev = u
        w_tot = (w_world + w_ext) * dt
        u = np.einsum("ij,bj->bi", G, u_prev) + np.einsum("ij,bj->bi", Hinv, w_tot)
        if not np.all(np.isfinite(u)):
            raise FloatingPointError("batch plant state became non-finite")
        delta = u * dt
        qc = q_conjugate(q)
        db_lin = q_rotate(qc, delta[:, :3])
        db_ang = q_rotate(qc, delta[:, 3:])
        p = p + q_rotate(q, db_lin)
        q = q_normalize(q_multiply(q, q_from_rotvec(db_ang)))

        u_bar = 0.5 * (u_prev + u)
        port_ext = np.einsum("bi,bi->b", u_bar, w_ext)
        port_world = np.einsum("bi,bi->b", u_bar, w_world)
        v_pot_old = V_pot

        t_next = (k + 1) * dt
        dx = deflection_error()
        raw = (dx - dx_prev) / dt
        fstate = fstate + alpha * (raw - fstate)
        dv = fstate
        K_cmd = K_stage[arangeB, stage(t_next)]
        if method == "stiffness_change":
            refresh_damping(K_plus)
        else:
            K_d = K_d_stage[arangeB, stage(t_next)]
        P_d = np.einsum("bi,bi->b", dv, np.einsum("bij,bj->bi", K_d, dv))

        before, switch = limiter(K_cmd, P_d)
        motion = before - v_pot_old
        V_pot = before + switch
        dx_prev = dx.copy()

        v_kin = 0.5 * np.einsum("bi,bi->b", u @ M, u)
        v_total = v_kin + V_pot
        vdot = (v_total - v_total_prev) / dt
        vdot_inp = port_ext + (motion / dt + P_d + port_world)
        excess = vdot - vdot_inp
        bad = excess > 0.0
        viol_energy += np.where(bad, excess * dt, 0.0)
        viol_steps += bad
        v_total_prev = v_total
        if collect:
            series["vdot"].append(vdot.copy())
            series["vdot_inp"].append(vdot_inp.copy())
            series["d"].append(d.copy())
            series["v_pot"].append(V_pot.copy())
            series["v_total"].append(v_total.copy())

    if collect:
        series = {k: np.stack(v, axis=1) for k, v in series.items()}
    return BatchResult(violation_energy=viol_energy, violation_steps=viol_steps,
                       n_steps=n_steps, series=series)
