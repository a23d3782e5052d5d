"""Closed-loop scenario runs with an exact per-step energy ledger.

The simulation alternates controller boundaries and plant intervals.  At
boundary k the controller reads the fresh deflections, updates its limiter
state, and emits the wrench held constant over [t_k, t_{k+1}].  The ledger
tracks a storage function

    V = kinetic energy + sum of spring potentials + startup budget remaining

and an input-power reading

    Vdot_inp[k+1] = sum_i ( Motion_i[k] / dt + P_d_i[k+1] + u_bar . w_i )
                    + u_bar . (w_ext + w_wall)

where Motion_i[k] is the spring-energy change due to deflection motion at
frozen stiffness, P_d_i is the attractor's physical damping power, and the
u_bar terms are midpoint port powers.  With the midpoint plant discretization
the kinetic-energy change per step is exactly u_bar . w dt - u_bar . D u_bar
dt, so the defect

    Vdot - Vdot_inp = -u_bar . D u_bar + sum_i (Switch_i / dt - P_d_i' )

holds to rounding.  Switch_i is the spring-energy change caused by the
boundary-k limiter update at the fresh deflection, and P_d_i' is the
dissipation available to that limiter (physical plus any startup-budget
grant; the grant appears as a matching decrease of the budget term inside V,
so it cancels).  Both passivation methods certify Switch <= P_d' dt, which
makes every step's defect nonpositive up to rounding dust; the unlimited
method and the tank baseline do not, which is exactly what the violation
columns are for.

Conventions worth knowing before reading traces:

 - Row k holds the state after boundary k.  Row 0 defines Vdot =
   Vdot_inp = 0.
 - Deflections, spring wrenches, and damping act in chart coordinates;
   the chart transform (identity for the cartesian chart) maps them to the
   end-effector body frame, and the body-to-world rotation maps them onto
   the plant.  External wrenches are world-frame.
 - The trace column att{i}_P_d_W records P_d' (grants included) since that
   is what the limiter could spend; the ledger reading uses the physical
   P_d internally.
 - For the tank baseline the att{i}_d column stores the tank gate (0/1)
   and the tank level is deliberately not part of V: the baseline's
   violations are the point of comparison.
 - A cylindrical chart falling back to cartesian inside its singular
   radius re-charts the potential; the resulting switch is not certified
   and may flag. Catalogue scenarios keep clear of singular regions.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .arbitration import GaussianWrench, gaussian_product, scaling_to_stiffness, symmetrize_split
from .errors import ChartSingularityError, PlantDivergedError
from .geom import Pose, tangent_rotation
from .impedance import (CartesianChart, chart_error, chart_transform,
                        double_diagonalization_damping, floor_damping)
from .passivation import (InitialEnergyBudget, curl_passivation, damping_power,
                          deflection_limit_continuous, deflection_limit_step,
                          draw_initial_energy, stiffness_limit_step)
from .plant import LowPassFilter, PlantParams, PlantState, plant_step, wall_wrench
from .scenario import Scenario
from .tank import EnergyTank, tank_step

VIOLATION_GUARD = 1e-9


# ---------------------------------------------------------------------------
# trace container


@dataclass
class TraceTable:
    """Column-oriented trace; every column is a float array of equal length."""

    columns: Dict[str, np.ndarray]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise KeyError(
                f"trace has no column {name!r}; available: "
                + ", ".join(self.columns)) from None

    @property
    def names(self) -> List[str]:
        return list(self.columns)

    def n_rows(self) -> int:
        return len(next(iter(self.columns.values())))


def write_trace(trace: TraceTable, path: str, decimate: int = 1) -> None:
    """Write a CSV trace; floats serialize via repr so reads are lossless.

    ``decimate`` keeps every n-th row (plus the last) for plotting; energy
    metrics expect an undecimated trace.
    """
    if decimate < 1:
        raise ValueError("decimate must be >= 1")
    names = trace.names
    n = trace.n_rows()
    idx = list(range(0, n, decimate))
    if idx and idx[-1] != n - 1:
        idx.append(n - 1)
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        cols = [trace.columns[name] for name in names]
        for i in idx:
            fh.write(",".join(_format_cell(name, col[i])
                              for name, col in zip(names, cols)) + "\n")


def _format_cell(name: str, value: float) -> str:
    if name == "violation_flag":
        return str(int(value))
    return repr(float(value))


def read_trace(path: str) -> TraceTable:
    with open(path, "r") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path} is empty")
        names = header.split(",")
        data = [[] for _ in names]
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(names):
                raise ValueError(f"{path}: row has {len(parts)} cells, expected {len(names)}")
            for slot, cell in zip(data, parts):
                slot.append(float(cell))
    return TraceTable({name: np.asarray(col) for name, col in zip(names, data)})


@dataclass
class ViolationMetrics:
    percent_steps: float
    energy_joules: float


def violation_metrics(trace: TraceTable, threshold: float = 0.0) -> ViolationMetrics:
    """Fraction of steps (percent) and summed excess energy where the ledger
    reads more storage growth than input, beyond ``threshold`` watts."""
    t = trace.column("time_s")
    vdot = trace.column("Vdot_W")
    vinp = trace.column("Vdot_inp_W")
    if len(t) < 2:
        return ViolationMetrics(0.0, 0.0)
    dt = np.diff(t)
    excess = (vdot - vinp)[1:]
    bad = excess > threshold
    energy = float(np.sum(excess[bad] * dt[bad]))
    return ViolationMetrics(100.0 * float(np.count_nonzero(bad)) / len(excess), energy)


# ---------------------------------------------------------------------------
# per-attractor runtime state


class _AttractorRuntime:
    def __init__(self, spec, index: int):
        self.spec = spec
        self.index = index
        self.filter = LowPassFilter(cutoff_hz=None)
        self.vertex_idx: Optional[int] = None
        self.dx = np.zeros(6)
        self.dx_prev: Optional[np.ndarray] = None
        self.dv = np.zeros(6)
        self.dv_prev = np.zeros(6)
        self.d = 0.0
        self.d_curl = 1.0
        self.K_plus = np.zeros((6, 6))      # realized stiffness (matrix methods)
        self.K_nom_prev = np.zeros((6, 6))  # spring basis of the scalar methods
        self.K_eff = np.zeros((6, 6))       # stiffness in force over the next interval
        self.V_pot = 0.0
        self.P_d = 0.0
        self.P_d_prime = 0.0
        self.w_world = np.zeros(6)
        # per-boundary scratch
        self.chart_active = spec.chart
        self.T = np.eye(6)
        self.K_cmd = np.zeros((6, 6))
        self.K_d = np.zeros((6, 6))
        self.K_target = np.zeros((6, 6))
        self.K_curl = np.zeros((6, 6))
        self.scaling: Optional[np.ndarray] = None
        self.replaced = False
        self.switch = 0.0
        self.before_switch = 0.0
        self._kd_src: Optional[np.ndarray] = None
        self._kd_mat: Optional[np.ndarray] = None

    def damping_matrix(self, M: np.ndarray, K_src: np.ndarray, xi: float,
                       floor: float) -> np.ndarray:
        """Damping design with a cache keyed on the source stiffness."""
        if self._kd_src is None or not np.array_equal(K_src, self._kd_src):
            self._kd_src = K_src.copy()
            self._kd_mat = floor_damping(
                double_diagonalization_damping(M, K_src, xi=xi), floor=floor)
        return self._kd_mat


def _psd_clamp(K: np.ndarray) -> np.ndarray:
    K = 0.5 * (K + K.T)
    lam, Q = np.linalg.eigh(K)
    if lam[0] >= 0.0:
        return K
    lam = np.clip(lam, 0.0, None)
    K = Q @ np.diag(lam) @ Q.T
    return 0.5 * (K + K.T)


def _nearest_vertex(vertices, position) -> int:
    best, best_d = 0, math.inf
    for i, v in enumerate(vertices):
        dist = float(np.linalg.norm(v.position - position))
        if dist < best_d:
            best, best_d = i, dist
    return best


# ---------------------------------------------------------------------------
# scenario runner


def run_scenario(scenario: Scenario) -> TraceTable:
    n_steps = scenario.steps()
    n_rows = n_steps + 1
    dt = scenario.dt
    method = scenario.method
    n_att = len(scenario.attractors)

    if scenario.arbitration == "gaussian":
        for i, spec in enumerate(scenario.attractors):
            if spec.covariance is None:
                raise ValueError(
                    f"gaussian arbitration needs a covariance schedule on every "
                    f"attractor (attractor {i} has none)")
    if scenario.arbitration == "fixed" and len(scenario.fixed_scalings) != n_att:
        raise ValueError("fixed arbitration needs one scaling per attractor")

    params = PlantParams(M=scenario.M.copy(), D=scenario.D.copy(), dt=dt,
                         wall=scenario.wall)
    state = PlantState(scenario.initial_pose.copy(), scenario.initial_twist.copy())

    budget = None
    if scenario.budget is not None and method in (
            "deflection_continuous", "deflection_discrete", "stiffness_change"):
        budget = InitialEnergyBudget(remaining=scenario.budget.energy,
                                     rate_limit=scenario.budget.rate)
    tank = None
    if method == "tank_baseline":
        tank = EnergyTank(level=scenario.tank.level, capacity=scenario.tank.capacity,
                          floor=scenario.tank.floor)

    rts = [_AttractorRuntime(spec, i) for i, spec in enumerate(scenario.attractors)]
    for rt in rts:
        rt.filter = LowPassFilter(cutoff_hz=scenario.velocity_filter_cutoff_hz)

    cols: Dict[str, np.ndarray] = {"time_s": np.empty(n_rows)}
    for i in range(n_att):
        for j in range(6):
            cols[f"att{i}_dx{j}"] = np.empty(n_rows)
        cols[f"att{i}_d"] = np.empty(n_rows)
        cols[f"att{i}_d_curl"] = np.empty(n_rows)
        for j in range(6):
            cols[f"att{i}_K_diag{j}"] = np.empty(n_rows)
        cols[f"att{i}_V_pot_J"] = np.empty(n_rows)
        cols[f"att{i}_P_d_W"] = np.empty(n_rows)
    for name in ("pose_x", "pose_y", "pose_z", "quat_w", "quat_x", "quat_y", "quat_z"):
        cols[name] = np.empty(n_rows)
    for j in range(6):
        cols[f"twist_{j}"] = np.empty(n_rows)
    for name in ("V_kin_J", "V_inp_J", "V_total_J", "Vdot_W", "Vdot_inp_W",
                 "violation_flag"):
        cols[name] = np.empty(n_rows)

    def geometry_pass(k: int, t: float):
        """Fresh deflections, deflection rates, commands, damping, and P_d."""
        for rt in rts:
            spec = rt.spec
            rt.replaced = False
            sched = spec.pose_schedule
            if sched.kind == "polyline_nearest":
                idx = _nearest_vertex(sched.vertices, state.pose.position)
                if rt.vertex_idx is not None and idx != rt.vertex_idx:
                    # vertex hop is an attractor replacement: forget the old
                    # spring entirely and restart the limiter from zero
                    rt.replaced = True
                    rt.d = 0.0
                    rt.K_plus = np.zeros((6, 6))
                    rt.K_nom_prev = np.zeros((6, 6))
                    rt.K_eff = np.zeros((6, 6))
                    rt.V_pot = 0.0
                    rt.filter = LowPassFilter(
                        cutoff_hz=scenario.velocity_filter_cutoff_hz)
                rt.vertex_idx = idx
                target = sched.vertices[idx].copy()
            else:
                target = sched.value(t, ee_position=state.pose.position)

            try:
                rt.chart_active = spec.chart
                rt.dx = chart_error(rt.chart_active, state.pose, target)
                rt.T = chart_transform(rt.chart_active, state.pose)
            except ChartSingularityError:
                rt.chart_active = CartesianChart()
                rt.dx = chart_error(rt.chart_active, state.pose, target)
                rt.T = np.eye(6)

            if rt.dx_prev is None or rt.replaced:
                raw = np.zeros(6)
            else:
                raw = (rt.dx - rt.dx_prev) / dt
            rt.dv_prev = rt.dv
            rt.dv = rt.filter.step(raw, dt)

            rt.K_cmd = spec.stiffness_schedule.value(t)
            if scenario.damping_source == "passivated" and method == "stiffness_change":
                K_src = rt.K_plus
            elif scenario.damping_source == "passivated" and method == "tank_baseline":
                K_src = rt.K_eff
            else:
                K_src = rt.K_cmd
            rt.K_d = rt.damping_matrix(params.M, K_src, scenario.damping_xi,
                                       scenario.damping_floor)
            rt.P_d = damping_power(rt.dv, rt.K_d, dv_prev=rt.dv_prev,
                                   mode=scenario.damping_power_mode)

    def arbitration_pass(t: float):
        if scenario.arbitration == "none":
            for rt in rts:
                rt.K_target = rt.K_cmd
                rt.K_curl = np.zeros((6, 6))
                rt.scaling = None
            return
        if scenario.arbitration == "fixed":
            scalings = scenario.fixed_scalings
        else:
            inputs = []
            for rt in rts:
                mean = rt.T @ (rt.K_cmd @ rt.dx + rt.K_d @ rt.dv)
                inputs.append(GaussianWrench(mean=mean,
                                             covariance=rt.spec.covariance.value(t)))
            _, scalings = gaussian_product(inputs)
        for rt, S in zip(rts, scalings):
            rt.scaling = np.asarray(S, dtype=float)
            K_arb = scaling_to_stiffness(rt.scaling, rt.chart_active, state.pose,
                                         rt.K_cmd)
            dec = symmetrize_split(K_arb)
            rt.K_target = _psd_clamp(dec.symmetric)
            rt.K_curl = dec.skew

    def limiter_pass(k: int):
        nonlocal tank
        eps = scenario.epsilon
        if scenario.scale_damping_wrench and scenario.arbitration != "none":
            for rt in rts:
                if rt.scaling is not None:
                    rt.K_d = scaling_to_stiffness(rt.scaling, rt.chart_active,
                                                  state.pose, rt.K_d)
                    rt.P_d = max(0.0, float(rt.dv @ (rt.K_d @ rt.dv)))

        if method == "tank_baseline":
            required = []
            for rt in rts:
                want = 0.5 * float(rt.dx @ (rt.K_target @ rt.dx))
                required.append(max(0.0, (want - rt.V_pot) / dt))
            enabled, tank = tank_step(tank, sum(rt.P_d for rt in rts),
                                      sum(required), dt)
            for rt, need in zip(rts, required):
                rt.P_d_prime = rt.P_d
                before = 0.5 * float(rt.dx @ (rt.K_eff @ rt.dx))
                if enabled or need == 0.0:
                    rt.K_eff = rt.K_target.copy()
                rt.d = 1.0 if enabled else 0.0
                after = 0.5 * float(rt.dx @ (rt.K_eff @ rt.dx))
                rt.switch = after - before
                rt.before_switch = before
            return

        for rt in rts:
            P_needed = 0.0
            if method in ("deflection_continuous", "deflection_discrete"):
                full = 0.5 * float(rt.dx @ (rt.K_target @ rt.dx))
                cur = 0.5 * rt.d * rt.d * float(rt.dx @ (rt.K_nom_prev @ rt.dx))
                P_needed = max(0.0, (full - cur) / dt)
            elif method == "stiffness_change":
                full = 0.5 * float(rt.dx @ (rt.K_target @ rt.dx))
                cur = 0.5 * float(rt.dx @ (rt.K_plus @ rt.dx))
                P_needed = max(0.0, (full - cur) / dt)
            granted = 0.0
            if budget is not None and P_needed > rt.P_d:
                granted = draw_initial_energy(budget, P_needed - rt.P_d, dt)
            rt.P_d_prime = rt.P_d + granted

            before = 0.5 * float(rt.dx @ (rt.K_eff @ rt.dx))
            if method == "none":
                rt.d = 1.0
                rt.K_eff = rt.K_target.copy()
            elif method == "deflection_discrete":
                rt.d = deflection_limit_step(rt.d, rt.K_nom_prev, rt.K_target,
                                             rt.dx, rt.P_d_prime, dt, epsilon=eps)
                rt.K_nom_prev = rt.K_target.copy()
                rt.K_eff = rt.d * rt.d * rt.K_target
            elif method == "deflection_continuous":
                K_dot = (rt.K_target - rt.K_nom_prev) / dt
                ddot = deflection_limit_continuous(rt.d, rt.dx, rt.K_nom_prev,
                                                   K_dot, rt.P_d_prime, epsilon=eps)
                rt.d = min(1.0, max(0.0, rt.d + ddot * dt))
                rt.K_nom_prev = rt.K_target.copy()
                rt.K_eff = rt.d * rt.d * rt.K_target
            else:  # stiffness_change
                rt.K_plus, rt.d = stiffness_limit_step(rt.K_plus, rt.K_target,
                                                       rt.dx, rt.P_d_prime, dt)
                rt.K_plus = 0.5 * (rt.K_plus + rt.K_plus.T)
                rt.K_eff = rt.K_plus
            after = 0.5 * float(rt.dx @ (rt.K_eff @ rt.dx))
            rt.switch = after - before
            rt.before_switch = before

    def wrench_pass():
        R6 = tangent_rotation(state.pose.orientation)
        for rt in rts:
            if method == "none":
                rt.d_curl = 1.0
                w_curl = rt.K_curl @ rt.dx
            else:
                P_a = rt.switch / dt
                if method in ("deflection_continuous", "deflection_discrete"):
                    P_a = max(0.0, P_a)
                rt.d_curl, w_curl = curl_passivation(
                    rt.K_curl, rt.dx, rt.dv, rt.P_d_prime, P_a,
                    allowance=scenario.curl_allowance)
            w_chart = rt.K_eff @ rt.dx + rt.K_d @ rt.dv + w_curl
            rt.w_world = R6 @ (rt.T @ w_chart)

    def write_row(k: int, t: float, vdot: float, vdot_inp: float, v_inp_cum: float,
                  v_total: float):
        cols["time_s"][k] = t
        for i, rt in enumerate(rts):
            for j in range(6):
                cols[f"att{i}_dx{j}"][k] = rt.dx[j]
            cols[f"att{i}_d"][k] = rt.d
            cols[f"att{i}_d_curl"][k] = rt.d_curl
            diag = np.diag(rt.K_eff)
            for j in range(6):
                cols[f"att{i}_K_diag{j}"][k] = diag[j]
            cols[f"att{i}_V_pot_J"][k] = rt.V_pot
            cols[f"att{i}_P_d_W"][k] = rt.P_d_prime
        cols["pose_x"][k], cols["pose_y"][k], cols["pose_z"][k] = state.pose.position
        q = state.pose.orientation
        cols["quat_w"][k], cols["quat_x"][k] = q[0], q[1]
        cols["quat_y"][k], cols["quat_z"][k] = q[2], q[3]
        for j in range(6):
            cols[f"twist_{j}"][k] = state.twist[j]
        cols["V_kin_J"][k] = state.kinetic_energy(params)
        cols["V_inp_J"][k] = v_inp_cum
        cols["V_total_J"][k] = v_total
        cols["Vdot_W"][k] = vdot
        cols["Vdot_inp_W"][k] = vdot_inp
        cols["violation_flag"][k] = 1.0 if vdot > vdot_inp + VIOLATION_GUARD else 0.0

    # boundary 0: engage springs per spec, no motion yet, defined zero rates
    geometry_pass(0, 0.0)
    for rt in rts:
        if rt.spec.start_engaged:
            rt.d = 1.0
            rt.K_plus = rt.K_cmd.copy()
            rt.K_nom_prev = rt.K_cmd.copy()
            rt.K_eff = rt.K_cmd.copy()
        if method == "none":
            rt.K_eff = rt.K_cmd.copy()
            rt.K_nom_prev = rt.K_cmd.copy()
        rt.V_pot = 0.5 * float(rt.dx @ (rt.K_eff @ rt.dx))
    arbitration_pass(0.0)
    limiter_pass(0)
    for rt in rts:
        rt.V_pot = rt.before_switch + rt.switch
        rt.dx_prev = rt.dx.copy()
    wrench_pass()

    v_total = (state.kinetic_energy(params) + sum(rt.V_pot for rt in rts)
               + (budget.remaining if budget is not None else 0.0))
    v_inp_cum = 0.0
    write_row(0, 0.0, 0.0, 0.0, v_inp_cum, v_total)
    v_total_prev = v_total

    for k in range(n_steps):
        t = k * dt
        w_ext = scenario.wrench.value(t)
        w_wall = wall_wrench(state, params.wall)
        w_ctrl = np.zeros(6)
        for rt in rts:
            w_ctrl += rt.w_world
        u_prev = state.twist.copy()
        try:
            state = plant_step(state, params, w_ctrl, w_ext)
        except PlantDivergedError as err:
            raise PlantDivergedError(step=k, time_s=t, detail=str(err)) from None
        u_bar = 0.5 * (u_prev + state.twist)
        port_ext = float(u_bar @ (w_ext + w_wall))
        ports = [float(u_bar @ rt.w_world) for rt in rts]
        v_pot_old = [rt.V_pot for rt in rts]

        t_next = (k + 1) * dt
        geometry_pass(k + 1, t_next)
        arbitration_pass(t_next)
        limiter_pass(k + 1)
        wrench_pass()

        vdot_inp = port_ext
        for rt, port, vp_old in zip(rts, ports, v_pot_old):
            motion = rt.before_switch - vp_old
            rt.V_pot = rt.before_switch + rt.switch
            rt.dx_prev = rt.dx.copy()
            vdot_inp += motion / dt + rt.P_d + port

        v_total = (state.kinetic_energy(params) + sum(rt.V_pot for rt in rts)
                   + (budget.remaining if budget is not None else 0.0))
        vdot = (v_total - v_total_prev) / dt
        v_inp_cum += vdot_inp * dt
        write_row(k + 1, t_next, vdot, vdot_inp, v_inp_cum, v_total)
        v_total_prev = v_total

    return TraceTable(cols)
