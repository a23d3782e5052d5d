"""Scenario descriptions: schedules, the built-in catalogue, YAML loading.

A scenario bundles everything a simulation run needs: plant parameters,
attractor schedules (pose, stiffness, covariance), the external wrench
profile, the passivation method, and numeric knobs.  Schedules are small
closed-form objects evaluated at absolute time so runs are deterministic
and restartable from any step.

Built-in scenarios are exposed through ``catalogue_names`` and
``build_scenario``; ad-hoc ones load from YAML via ``load_scenario``.
``random_scenario`` draws from a seeded family of step-wrench plus
stiffness-jump runs used for statistical passivity checks.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import yaml

from .geom import Pose
from .impedance import CartesianChart, CylindricalChart, ManifoldChart
from .passivation import EPSILON
from .plant import DEFAULT_D, DEFAULT_M, WallParams

METHODS = (
    "none",
    "deflection_continuous",
    "deflection_discrete",
    "stiffness_change",
    "tank_baseline",
)

ARBITRATION_MODES = ("none", "fixed", "gaussian")


def _matrix6(value) -> np.ndarray:
    """Accept a 6-vector (diagonal) or a full 6x6 array."""
    a = np.asarray(value, dtype=float)
    if a.shape == (6,):
        return np.diag(a)
    if a.shape == (6, 6):
        return a.copy()
    raise ValueError(f"expected 6 diagonal entries or a 6x6 matrix, got shape {a.shape}")


# ---------------------------------------------------------------------------
# schedules


@dataclass
class StiffnessSegment:
    """One piece of a stiffness schedule, active from ``t_start`` onward.

    kind "hold" keeps ``K``; "ramp" interpolates linearly from ``K`` to
    ``K_end`` over [t_start, t_end] and holds after; "sinusoid" returns
    K + K_amplitude * sin(omega (t - t_start) + phase).
    """

    t_start: float
    K: np.ndarray
    kind: str = "hold"
    K_end: Optional[np.ndarray] = None
    t_end: Optional[float] = None
    K_amplitude: Optional[np.ndarray] = None
    omega: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        self.K = _matrix6(self.K)
        if self.K_end is not None:
            self.K_end = _matrix6(self.K_end)
        if self.K_amplitude is not None:
            self.K_amplitude = _matrix6(self.K_amplitude)
        if self.kind not in ("hold", "ramp", "sinusoid"):
            raise ValueError(f"unknown stiffness segment kind {self.kind!r}")
        if self.kind == "ramp" and (self.K_end is None or self.t_end is None):
            raise ValueError("ramp segments need K_end and t_end")
        if self.kind == "sinusoid" and self.K_amplitude is None:
            raise ValueError("sinusoid segments need K_amplitude")

    def value(self, t: float) -> np.ndarray:
        if self.kind == "hold":
            return self.K.copy()
        if self.kind == "ramp":
            span = self.t_end - self.t_start
            s = 1.0 if span <= 0.0 else min(1.0, max(0.0, (t - self.t_start) / span))
            return (1.0 - s) * self.K + s * self.K_end
        return self.K + self.K_amplitude * math.sin(
            self.omega * (t - self.t_start) + self.phase)


@dataclass
class StiffnessSchedule:
    segments: List[StiffnessSegment]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("stiffness schedule needs at least one segment")
        self.segments = sorted(self.segments, key=lambda s: s.t_start)

    def value(self, t: float) -> np.ndarray:
        active = self.segments[0]
        for seg in self.segments:
            if seg.t_start <= t:
                active = seg
            else:
                break
        return active.value(t)


@dataclass
class PoseSchedule:
    """Attractor pose over time.

    kinds: "fixed"; "line" (position interpolates pose -> pose_end over
    [t_start, t_end], clamped, orientation held); "axis_sinusoid"
    (position = pose.position + axis * amplitude * sin(omega (t - t_start)
    + phase)); "polyline_nearest" (snaps to the vertex closest to the
    current endpoint position; requires ``ee_position``).
    """

    pose: Pose
    kind: str = "fixed"
    pose_end: Optional[Pose] = None
    t_start: float = 0.0
    t_end: float = 0.0
    axis: Optional[np.ndarray] = None
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    vertices: Optional[List[Pose]] = None

    def __post_init__(self):
        if self.kind not in ("fixed", "line", "axis_sinusoid", "polyline_nearest"):
            raise ValueError(f"unknown pose schedule kind {self.kind!r}")
        if self.kind == "line" and self.pose_end is None:
            raise ValueError("line schedules need pose_end")
        if self.kind == "axis_sinusoid":
            if self.axis is None:
                raise ValueError("axis_sinusoid schedules need an axis")
            self.axis = np.asarray(self.axis, dtype=float)
            n = np.linalg.norm(self.axis)
            if n == 0.0:
                raise ValueError("axis must be nonzero")
            self.axis = self.axis / n
        if self.kind == "polyline_nearest" and not self.vertices:
            raise ValueError("polyline_nearest schedules need vertices")

    def value(self, t: float, ee_position: Optional[np.ndarray] = None) -> Pose:
        if self.kind == "fixed":
            return self.pose.copy()
        if self.kind == "line":
            span = self.t_end - self.t_start
            s = 1.0 if span <= 0.0 else min(1.0, max(0.0, (t - self.t_start) / span))
            p = (1.0 - s) * self.pose.position + s * self.pose_end.position
            return Pose(p, self.pose.orientation)
        if self.kind == "axis_sinusoid":
            off = 0.0
            if t >= self.t_start:
                off = self.amplitude * math.sin(self.omega * (t - self.t_start) + self.phase)
            return Pose(self.pose.position + off * self.axis, self.pose.orientation)
        if ee_position is None:
            raise ValueError("polyline_nearest needs the endpoint position")
        best = min(self.vertices,
                   key=lambda v: float(np.linalg.norm(v.position - ee_position)))
        return best.copy()


@dataclass
class WrenchComponent:
    """Additive contribution to the external wrench.

    kinds: "constant" (value on [t_start, t_end)); "step" (value from
    t_start on); "sinusoid" (wrench * sin(omega (t - t_start) + phase)
    on [t_start, t_end)).
    """

    wrench: np.ndarray
    kind: str = "step"
    t_start: float = 0.0
    t_end: float = math.inf
    omega: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        self.wrench = np.asarray(self.wrench, dtype=float).reshape(6)
        if self.kind not in ("constant", "step", "sinusoid"):
            raise ValueError(f"unknown wrench kind {self.kind!r}")

    def value(self, t: float) -> np.ndarray:
        if self.kind == "step":
            return self.wrench.copy() if t >= self.t_start else np.zeros(6)
        if t < self.t_start or t >= self.t_end:
            return np.zeros(6)
        if self.kind == "constant":
            return self.wrench.copy()
        return self.wrench * math.sin(self.omega * (t - self.t_start) + self.phase)


@dataclass
class WrenchProfile:
    components: List[WrenchComponent] = field(default_factory=list)

    def value(self, t: float) -> np.ndarray:
        out = np.zeros(6)
        for c in self.components:
            out += c.value(t)
        return out


@dataclass
class CovarianceSchedule:
    """Measurement covariance over time: "fixed", or a linear "crossfade"
    from Sigma to Sigma_end over [t_start, t_end] (stays positive definite
    when both ends are)."""

    Sigma: np.ndarray
    kind: str = "fixed"
    Sigma_end: Optional[np.ndarray] = None
    t_start: float = 0.0
    t_end: float = 0.0

    def __post_init__(self):
        self.Sigma = _matrix6(self.Sigma)
        if self.Sigma_end is not None:
            self.Sigma_end = _matrix6(self.Sigma_end)
        if self.kind not in ("fixed", "crossfade"):
            raise ValueError(f"unknown covariance kind {self.kind!r}")
        if self.kind == "crossfade" and self.Sigma_end is None:
            raise ValueError("crossfade schedules need Sigma_end")

    def value(self, t: float) -> np.ndarray:
        if self.kind == "fixed":
            return self.Sigma.copy()
        span = self.t_end - self.t_start
        s = 1.0 if span <= 0.0 else min(1.0, max(0.0, (t - self.t_start) / span))
        return (1.0 - s) * self.Sigma + s * self.Sigma_end


# ---------------------------------------------------------------------------
# scenario


@dataclass
class AttractorSpec:
    pose_schedule: PoseSchedule
    stiffness_schedule: StiffnessSchedule
    chart: ManifoldChart = field(default_factory=CartesianChart)
    covariance: Optional[CovarianceSchedule] = None
    start_engaged: bool = False


@dataclass
class BudgetSpec:
    energy: float
    rate: float


@dataclass
class TankSpec:
    level: float = 1.0
    capacity: float = 1.0
    floor: float = 0.01


@dataclass
class Scenario:
    name: str
    duration: float
    attractors: List[AttractorSpec]
    dt: float = 1e-3
    method: str = "deflection_discrete"
    wrench: WrenchProfile = field(default_factory=WrenchProfile)
    M: np.ndarray = field(default_factory=lambda: DEFAULT_M.copy())
    D: np.ndarray = field(default_factory=lambda: DEFAULT_D.copy())
    wall: Optional[WallParams] = None
    initial_pose: Pose = field(default_factory=Pose.identity)
    initial_twist: np.ndarray = field(default_factory=lambda: np.zeros(6))
    arbitration: str = "none"
    fixed_scalings: Optional[List[np.ndarray]] = None
    budget: Optional[BudgetSpec] = None
    tank: TankSpec = field(default_factory=TankSpec)
    damping_xi: float = 0.7
    damping_floor: float = 0.1
    damping_source: str = "passivated"
    scale_damping_wrench: bool = False
    damping_power_mode: str = "quadratic"
    epsilon: float = EPSILON
    curl_allowance: float = 0.1
    velocity_filter_cutoff_hz: Optional[float] = 10.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.arbitration not in ARBITRATION_MODES:
            raise ValueError(f"unknown arbitration mode {self.arbitration!r}")
        if self.arbitration == "fixed" and not self.fixed_scalings:
            raise ValueError("fixed arbitration needs fixed_scalings")
        if self.duration <= 0.0 or self.dt <= 0.0:
            raise ValueError("duration and dt must be positive")
        if not self.attractors:
            raise ValueError("scenario needs at least one attractor")
        if self.damping_source not in ("nominal", "passivated"):
            raise ValueError("damping_source must be 'nominal' or 'passivated'")
        self.M = np.asarray(self.M, dtype=float)
        self.D = np.asarray(self.D, dtype=float)
        self.initial_twist = np.asarray(self.initial_twist, dtype=float).reshape(6)

    def steps(self) -> int:
        return int(round(self.duration / self.dt))


# ---------------------------------------------------------------------------
# built-in catalogue


def _fig4_step_continuous() -> Scenario:
    """Single-axis stiffness step under the continuous deflection limiter.

    The spring holds the endpoint deflected with a constant force while a
    small sinusoidal force keeps a trickle of dissipation available.  At
    t = 1 s the stiffness steps up 1.6x; the scaling dips instantly to keep
    the stored energy from jumping and then climbs back as dissipation pays
    the difference.
    """
    k0 = np.zeros(6)
    k0[0] = 100.0
    k1 = np.zeros(6)
    k1[0] = 160.0
    att = AttractorSpec(
        pose_schedule=PoseSchedule(pose=Pose(np.array([0.1, 0.0, 0.0]))),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=k0),
            StiffnessSegment(t_start=1.0, K=k1),
        ]),
        start_engaged=True,
    )
    wrench = WrenchProfile([
        WrenchComponent(kind="constant", wrench=[-7.0, 0, 0, 0, 0, 0]),
        WrenchComponent(kind="sinusoid", wrench=[1.0, 0, 0, 0, 0, 0],
                        omega=4.0 * math.pi),
    ])
    return Scenario(
        name="fig4_step_continuous",
        duration=3.0,
        dt=1.25e-4,
        method="deflection_continuous",
        attractors=[att],
        wrench=wrench,
        initial_pose=Pose(np.array([0.03, 0.0, 0.0])),
    )


def _init_from_rest(method: str, name: str) -> Scenario:
    """Springs commanded on at t = 0 with zero stored energy; a force step at
    0.5 s supplies the dissipation that lets the stiffness build up."""
    att = AttractorSpec(
        pose_schedule=PoseSchedule(pose=Pose(np.array([0.1, 0.0, 0.0]))),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=[500.0, 500.0, 500.0, 10.0, 10.0, 10.0]),
        ]),
    )
    wrench = WrenchProfile([
        WrenchComponent(kind="step", wrench=[10.0, 0, 0, 0, 0, 0], t_start=0.5),
    ])
    return Scenario(
        name=name,
        duration=1.5,
        dt=1e-3,
        method=method,
        attractors=[att],
        wrench=wrench,
    )


def _fig5_init_deflection() -> Scenario:
    return _init_from_rest("deflection_discrete", "fig5_init_deflection")


def _fig6_init_kdot() -> Scenario:
    return _init_from_rest("stiffness_change", "fig6_init_kdot")


def _sinusoid_scenario(method: str, name: str) -> Scenario:
    """Stiffness oscillating on one axis while a constant lateral force loads
    another.  The scalar deflection limiter couples the axes (the lateral
    error breathes with the oscillation); the stiffness-change limiter leaves
    the constant axis untouched."""
    base = np.array([700.0, 2000.0, 2000.0, 50.0, 50.0, 50.0])
    amp = np.zeros(6)
    amp[0] = 500.0
    att = AttractorSpec(
        pose_schedule=PoseSchedule(
            kind="axis_sinusoid", pose=Pose(), axis=[0.0, 1.0, 0.0],
            amplitude=0.1, omega=0.8),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, kind="sinusoid", K=base,
                             K_amplitude=amp, omega=1.0),
        ]),
        start_engaged=True,
    )
    wrench = WrenchProfile([
        WrenchComponent(kind="step", wrench=[10.0, 0.0, -30.0, 0, 0, 0]),
    ])
    return Scenario(
        name=name,
        duration=9.0,
        dt=1e-3,
        method=method,
        attractors=[att],
        wrench=wrench,
    )


def _fig9_sinusoid_deflection() -> Scenario:
    return _sinusoid_scenario("deflection_discrete", "fig9_sinusoid_deflection")


def _fig10_sinusoid_kdot() -> Scenario:
    return _sinusoid_scenario("stiffness_change", "fig10_sinusoid_kdot")


def _baseline_tank() -> Scenario:
    """Tank-gated stiffness against a wall: the attractor drives the spring
    deeper while the endpoint is blocked, draining the tank until the gate
    chatters on and off near its floor."""
    att = AttractorSpec(
        pose_schedule=PoseSchedule(
            kind="line", pose=Pose(), pose_end=Pose(np.array([-0.2, 0.0, 0.0])),
            t_start=0.0, t_end=1.0),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=[1000.0, 1000.0, 1000.0, 10.0, 10.0, 10.0]),
        ]),
    )
    return Scenario(
        name="baseline_tank",
        duration=1.0,
        dt=1e-3,
        method="tank_baseline",
        attractors=[att],
        wall=WallParams(axis=[1.0, 0.0, 0.0], offset=0.0,
                        stiffness=1e5, damping=300.0),
        tank=TankSpec(level=1.0, capacity=1.0, floor=0.01),
    )


def _impact_initial_energy() -> Scenario:
    """Startup energy budget plus a wall impact.

    The spring starts empty; a small budget raises the stiffness enough to
    start motion from rest.  The endpoint runs into a wall short of the
    attractor and settles there.  A stiffness jump while parked (budget
    spent, nothing dissipating) must leave the realized stiffness frozen;
    pulling the endpoint off the wall at 9 s restarts dissipation and lets
    the stiffness climb.
    """
    att = AttractorSpec(
        pose_schedule=PoseSchedule(pose=Pose(np.array([0.1, 0.0, 0.0]))),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=[500.0, 500.0, 500.0, 10.0, 10.0, 10.0]),
            StiffnessSegment(t_start=7.0, K=[900.0, 500.0, 500.0, 10.0, 10.0, 10.0]),
        ]),
    )
    wrench = WrenchProfile([
        WrenchComponent(kind="step", wrench=[-20.0, 0, 0, 0, 0, 0], t_start=9.0),
    ])
    return Scenario(
        name="impact_initial_energy",
        duration=10.0,
        dt=1e-3,
        method="stiffness_change",
        attractors=[att],
        wrench=wrench,
        wall=WallParams(axis=[-1.0, 0.0, 0.0], offset=-0.05,
                        stiffness=1e5, damping=300.0),
        budget=BudgetSpec(energy=0.2, rate=0.3),
    )


def _arbitration_two_trajectories() -> Scenario:
    """Two candidate trajectories blended by measurement confidence; the
    covariances cross over mid-run so authority hands from one to the other."""
    att0 = AttractorSpec(
        pose_schedule=PoseSchedule(
            kind="polyline_nearest", pose=Pose(np.array([0.08, 0.0, 0.0])),
            vertices=[Pose(np.array([0.08, 0.0, 0.0])),
                      Pose(np.array([0.12, 0.06, 0.0])),
                      Pose(np.array([0.16, 0.12, 0.0]))]),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=[600.0, 600.0, 600.0, 20.0, 20.0, 20.0]),
        ]),
        covariance=CovarianceSchedule(
            kind="crossfade", Sigma=[0.01] * 6, Sigma_end=[0.09] * 6,
            t_start=1.0, t_end=3.0),
        start_engaged=True,
    )
    att1 = AttractorSpec(
        pose_schedule=PoseSchedule(
            kind="polyline_nearest", pose=Pose(np.array([-0.06, 0.04, 0.0])),
            vertices=[Pose(np.array([-0.06, 0.04, 0.0])),
                      Pose(np.array([-0.10, 0.08, 0.02]))]),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=[400.0, 400.0, 400.0, 15.0, 15.0, 15.0]),
        ]),
        covariance=CovarianceSchedule(
            kind="crossfade", Sigma=[0.09] * 6, Sigma_end=[0.01] * 6,
            t_start=1.0, t_end=3.0),
        start_engaged=True,
    )
    wrench = WrenchProfile([
        WrenchComponent(kind="sinusoid", wrench=[2.0, 1.0, 0, 0, 0, 0],
                        omega=2.0 * math.pi),
    ])
    return Scenario(
        name="arbitration_two_trajectories",
        duration=4.0,
        dt=1e-3,
        method="stiffness_change",
        attractors=[att0, att1],
        wrench=wrench,
        arbitration="gaussian",
    )


def _asymmetric_two_attractors() -> Scenario:
    """Non-commuting covariances make the arbitrated stiffness asymmetric, so
    the curl limiter is exercised; the excitation ends at 3 s and the curl
    scaling returns to one as motion dies out."""

    def rotz(angle):
        c, s = math.cos(angle), math.sin(angle)
        R = np.eye(6)
        R[0, 0] = c
        R[0, 1] = -s
        R[1, 0] = s
        R[1, 1] = c
        return R

    R1 = rotz(0.6)
    R2 = rotz(-0.7)
    s1 = R1 @ np.diag([0.01, 0.05, 0.02, 0.02, 0.02, 0.02]) @ R1.T
    s2 = R2 @ np.diag([0.05, 0.01, 0.03, 0.02, 0.02, 0.02]) @ R2.T
    att0 = AttractorSpec(
        pose_schedule=PoseSchedule(pose=Pose(np.array([0.09, 0.02, 0.0]))),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=[700.0, 500.0, 600.0, 20.0, 20.0, 20.0]),
        ]),
        covariance=CovarianceSchedule(Sigma=s1),
        start_engaged=True,
    )
    att1 = AttractorSpec(
        pose_schedule=PoseSchedule(pose=Pose(np.array([-0.05, 0.07, 0.01]))),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=[500.0, 700.0, 550.0, 20.0, 20.0, 20.0]),
        ]),
        covariance=CovarianceSchedule(Sigma=s2),
        start_engaged=True,
    )
    wrench = WrenchProfile([
        WrenchComponent(kind="sinusoid", wrench=[3.0, 2.0, 1.0, 0, 0, 0],
                        omega=3.0 * math.pi, t_end=3.0),
    ])
    return Scenario(
        name="asymmetric_two_attractors",
        duration=4.0,
        dt=1e-3,
        method="stiffness_change",
        attractors=[att0, att1],
        wrench=wrench,
        arbitration="gaussian",
    )


CATALOGUE = {
    "fig4_step_continuous": _fig4_step_continuous,
    "fig5_init_deflection": _fig5_init_deflection,
    "fig6_init_kdot": _fig6_init_kdot,
    "fig9_sinusoid_deflection": _fig9_sinusoid_deflection,
    "fig10_sinusoid_kdot": _fig10_sinusoid_kdot,
    "baseline_tank": _baseline_tank,
    "impact_initial_energy": _impact_initial_energy,
    "arbitration_two_trajectories": _arbitration_two_trajectories,
    "asymmetric_two_attractors": _asymmetric_two_attractors,
}


def catalogue_names() -> List[str]:
    return sorted(CATALOGUE)


def build_scenario(name: str) -> Scenario:
    try:
        return CATALOGUE[name]()
    except KeyError:
        raise KeyError(
            f"unknown scenario {name!r}; available: {', '.join(catalogue_names())}"
        ) from None


# ---------------------------------------------------------------------------
# seeded random family


def _random_rotation(rng) -> np.ndarray:
    a = rng.standard_normal((3, 3))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


def _random_block_spd(rng, lo_t, hi_t, lo_r, hi_r) -> np.ndarray:
    K = np.zeros((6, 6))
    qt = _random_rotation(rng)
    qr = _random_rotation(rng)
    K[:3, :3] = qt @ np.diag(rng.uniform(lo_t, hi_t, 3)) @ qt.T
    K[3:, 3:] = qr @ np.diag(rng.uniform(lo_r, hi_r, 3)) @ qr.T
    return 0.5 * (K + K.T)


@dataclass
class RandomFamilyParams:
    """Draws defining one member of the statistical family."""

    offset: np.ndarray
    K0: np.ndarray
    K1: np.ndarray
    K2: np.ndarray
    t1: float
    t2: float
    wrench: np.ndarray
    t_force: float
    duration: float = 2.0
    dt: float = 1e-3


def random_family_params(seed: int) -> RandomFamilyParams:
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    offset = direction * 0.1

    K0 = _random_block_spd(rng, 100.0, 2000.0, 5.0, 100.0)
    s1 = rng.uniform(1.5, 2.0)
    s2 = rng.uniform(1.5, 2.0)
    t1 = rng.uniform(0.5, 0.9)
    t2 = rng.uniform(1.2, 1.6)

    fdir = rng.standard_normal(3)
    fdir /= np.linalg.norm(fdir)
    force = fdir * rng.uniform(10.0, 50.0)
    tdir = rng.standard_normal(3)
    tdir /= np.linalg.norm(tdir)
    torque = tdir * rng.uniform(0.1, 1.0)
    w = np.concatenate([force, torque])
    t_force = rng.uniform(0.05, 0.1)
    return RandomFamilyParams(offset=offset, K0=K0, K1=s1 * K0, K2=s1 * s2 * K0,
                              t1=t1, t2=t2, wrench=w, t_force=t_force)


def random_scenario(seed: int, method: str = "deflection_discrete") -> Scenario:
    """Member of the statistical family: one attractor about 10 cm away, a
    force step early on, and two upward stiffness jumps mid-run."""
    p = random_family_params(seed)
    att = AttractorSpec(
        pose_schedule=PoseSchedule(pose=Pose(p.offset)),
        stiffness_schedule=StiffnessSchedule([
            StiffnessSegment(t_start=0.0, K=p.K0),
            StiffnessSegment(t_start=p.t1, K=p.K1),
            StiffnessSegment(t_start=p.t2, K=p.K2),
        ]),
        start_engaged=True,
    )
    return Scenario(
        name=f"random_{seed}",
        duration=p.duration,
        dt=p.dt,
        method=method,
        attractors=[att],
        wrench=WrenchProfile([
            WrenchComponent(kind="step", wrench=p.wrench, t_start=p.t_force)]),
    )


# ---------------------------------------------------------------------------
# YAML loading


def _pose_from_dict(d) -> Pose:
    return Pose(np.asarray(d.get("position", [0.0, 0.0, 0.0]), dtype=float),
                np.asarray(d.get("orientation", [1.0, 0.0, 0.0, 0.0]), dtype=float))


def _chart_from_dict(d) -> ManifoldChart:
    if d is None:
        return CartesianChart()
    kind = d.get("kind", "cartesian")
    if kind == "cartesian":
        return CartesianChart()
    if kind == "cylindrical":
        return CylindricalChart(
            axis_pose=_pose_from_dict(d.get("axis_pose", {})),
            radius_reference=float(d.get("radius_reference", 1.0)),
            r_min=float(d.get("r_min", 0.01)))
    raise ValueError(f"unknown chart kind {kind!r}")


def _stiffness_segment_from_dict(d) -> StiffnessSegment:
    kw = dict(d)
    if "diag" in kw:
        kw["K"] = kw.pop("diag")
    return StiffnessSegment(**kw)


def _pose_schedule_from_dict(d) -> PoseSchedule:
    kw = dict(d)
    kw["pose"] = _pose_from_dict(kw.get("pose", {}))
    if "pose_end" in kw:
        kw["pose_end"] = _pose_from_dict(kw["pose_end"])
    if "vertices" in kw:
        kw["vertices"] = [_pose_from_dict(v) for v in kw["vertices"]]
    return PoseSchedule(**kw)


def _attractor_from_dict(d) -> AttractorSpec:
    segs = [_stiffness_segment_from_dict(s) for s in d["stiffness"]]
    cov = None
    if "covariance" in d and d["covariance"] is not None:
        cov = CovarianceSchedule(**d["covariance"])
    return AttractorSpec(
        pose_schedule=_pose_schedule_from_dict(d["pose"]),
        stiffness_schedule=StiffnessSchedule(segs),
        chart=_chart_from_dict(d.get("chart")),
        covariance=cov,
        start_engaged=bool(d.get("start_engaged", False)),
    )


def scenario_from_dict(d: dict) -> Scenario:
    kw = {
        "name": d.get("name", "unnamed"),
        "duration": float(d["duration"]),
        "attractors": [_attractor_from_dict(a) for a in d["attractors"]],
    }
    for key in ("dt", "method", "arbitration", "damping_xi", "damping_floor",
                "damping_source", "scale_damping_wrench", "damping_power_mode",
                "epsilon", "curl_allowance"):
        if key in d:
            kw[key] = d[key]
    if "velocity_filter_cutoff_hz" in d:
        kw["velocity_filter_cutoff_hz"] = d["velocity_filter_cutoff_hz"]
    if "wrench" in d:
        kw["wrench"] = WrenchProfile([WrenchComponent(**c) for c in d["wrench"]])
    plant = d.get("plant", {})
    if "mass" in plant:
        kw["M"] = _matrix6(plant["mass"])
    if "damping" in plant:
        kw["D"] = _matrix6(plant["damping"])
    if "wall" in plant and plant["wall"] is not None:
        kw["wall"] = WallParams(**plant["wall"])
    if "initial_pose" in d:
        kw["initial_pose"] = _pose_from_dict(d["initial_pose"])
    if "initial_twist" in d:
        kw["initial_twist"] = np.asarray(d["initial_twist"], dtype=float)
    if "budget" in d and d["budget"] is not None:
        kw["budget"] = BudgetSpec(**d["budget"])
    if "tank" in d and d["tank"] is not None:
        kw["tank"] = TankSpec(**d["tank"])
    if "fixed_scalings" in d and d["fixed_scalings"] is not None:
        kw["fixed_scalings"] = [_matrix6(s) for s in d["fixed_scalings"]]
    return Scenario(**kw)


def load_scenario(path: str) -> Scenario:
    with open(path, "r") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path} does not contain a scenario mapping")
    return scenario_from_dict(data)
