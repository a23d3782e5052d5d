import numpy as np
import pytest

from vicpass.geom import (
    Pose,
    exp_map,
    finite_difference_twist,
    log_map,
    quat_conjugate,
    quat_from_rotvec,
    quat_multiply,
    quat_rotate,
    quat_to_matrix,
    quat_to_rotvec,
    rotate_tangent,
)


def random_pose(rng, max_angle=np.pi - 0.05):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, max_angle)
    return Pose(rng.uniform(-1.0, 1.0, size=3), quat_from_rotvec(axis * angle))


def test_log_map_pure_translation():
    base = Pose.identity()
    target = Pose(np.array([1.0, 0.0, 0.0]), np.array([1.0, 0, 0, 0]))
    assert np.allclose(log_map(base, target), [1, 0, 0, 0, 0, 0], atol=1e-15)


def test_log_map_quarter_turn_about_z():
    # quaternion-log oracle: q = (cos pi/4, 0, 0, sin pi/4) -> theta = pi/2 z
    base = Pose.identity()
    q = np.array([np.cos(np.pi / 4), 0.0, 0.0, np.sin(np.pi / 4)])
    target = Pose(np.zeros(3), q)
    err = log_map(base, target)
    assert np.allclose(err, [0, 0, 0, 0, 0, np.pi / 2], atol=1e-12)


def test_log_map_linear_part_in_base_frame():
    # base rotated pi/2 about z: world +x offset reads as body -y
    base = Pose(np.zeros(3), quat_from_rotvec([0, 0, np.pi / 2]))
    target = Pose(np.array([1.0, 0.0, 0.0]), base.orientation.copy())
    err = log_map(base, target)
    assert np.allclose(err, [0, -1, 0, 0, 0, 0], atol=1e-12)


def test_exp_map_quarter_turn():
    base = Pose.identity()
    out = exp_map(base, np.array([0, 0, 0, 0, 0, np.pi / 2]))
    s = np.sqrt(2.0) / 2.0
    assert np.allclose(out.orientation, [s, 0, 0, s], atol=1e-12)
    assert np.allclose(out.position, 0.0)


def test_exp_log_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        base = random_pose(rng)
        delta = np.empty(6)
        delta[:3] = rng.uniform(-2, 2, size=3)
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        delta[3:] = axis * rng.uniform(0.0, np.pi - 0.011)
        back = log_map(base, exp_map(base, delta))
        assert np.allclose(back, delta, atol=1e-9)


def test_double_cover_exact():
    rng = np.random.default_rng(8)
    for _ in range(200):
        a = random_pose(rng)
        b = random_pose(rng)
        ref = log_map(a, b)
        for fa in (1.0, -1.0):
            for fb in (1.0, -1.0):
                a2 = Pose(a.position, fa * a.orientation)
                b2 = Pose(b.position, fb * b.orientation)
                assert np.array_equal(log_map(a2, b2), ref)


def test_shortest_arc_norm_at_most_pi():
    rng = np.random.default_rng(9)
    for _ in range(500):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        assert np.linalg.norm(quat_to_rotvec(q)) <= np.pi + 1e-12


def test_antipodal_half_turn_deterministic():
    rng = np.random.default_rng(10)
    for _ in range(100):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        q = np.concatenate([[0.0], axis])  # exact half turn
        r1 = quat_to_rotvec(q)
        r2 = quat_to_rotvec(-q)
        assert np.array_equal(r1, r2)
        assert np.isclose(np.linalg.norm(r1), np.pi, atol=1e-12)


def test_frame_consistency_reversal():
    # log_map(b, a) = -R(q_b^-1 q_a) log_map(a, b)
    rng = np.random.default_rng(11)
    for _ in range(300):
        a = random_pose(rng, max_angle=1.4)
        b = random_pose(rng, max_angle=1.4)
        q_rel = quat_multiply(quat_conjugate(b.orientation), a.orientation)
        lhs = log_map(b, a)
        rhs = -rotate_tangent(q_rel, log_map(a, b))
        assert np.allclose(lhs, rhs, atol=1e-9)


def test_rotation_matrix_matches_quat_rotate():
    rng = np.random.default_rng(12)
    for _ in range(100):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        v = rng.normal(size=3)
        assert np.allclose(quat_to_matrix(q) @ v, quat_rotate(q, v), atol=1e-12)


def test_finite_difference_twist_translation():
    prev = Pose.identity()
    cur = Pose(np.array([0.001, 0.0, 0.0]), np.array([1.0, 0, 0, 0]))
    tw = finite_difference_twist(cur, prev, 0.001)
    assert np.allclose(tw, [1, 0, 0, 0, 0, 0], atol=1e-9)


def test_finite_difference_twist_rotation():
    prev = Pose.identity()
    cur = Pose(np.zeros(3), quat_from_rotvec([0, 0, 0.01]))
    tw = finite_difference_twist(cur, prev, 0.01)
    assert np.allclose(tw, [0, 0, 0, 0, 0, 1.0], atol=1e-9)


def test_finite_difference_twist_zero_and_errors():
    p = Pose(np.array([0.3, -0.2, 0.1]), quat_from_rotvec([0.1, 0.2, 0.3]))
    assert np.array_equal(finite_difference_twist(p, p.copy(), 1e-3), np.zeros(6))
    with pytest.raises(ValueError):
        finite_difference_twist(p, p, 0.0)
    with pytest.raises(ValueError):
        finite_difference_twist(p, p, -1e-3)


def test_pose_normalizes_orientation():
    p = Pose(np.zeros(3), np.array([2.0, 0.0, 0.0, 0.0]))
    assert abs(np.linalg.norm(p.orientation) - 1.0) < 1e-9
