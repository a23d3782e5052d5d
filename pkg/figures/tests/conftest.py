"""Synthetic trace files shaped like the simulator's CSV contract."""

import numpy as np
import pytest


def trace_columns(rows=120, n_attractors=1, with_violations=False):
    t = np.linspace(0.0, 0.5, rows)
    cols = [("time_s", t)]
    for i in range(n_attractors):
        for j in range(6):
            cols.append((f"att{i}_dx{j}", 0.01 * np.sin(t * (j + 1) + i)))
        cols.append((f"att{i}_d", np.clip(1.0 - 0.5 * t, 0.0, 1.0)))
        cols.append((f"att{i}_d_curl", np.ones(rows)))
        for j in range(6):
            cols.append((f"att{i}_K_diag{j}", 500.0 + 100.0 * t * (j + 1)))
        cols.append((f"att{i}_V_pot_J", 0.1 * t))
        cols.append((f"att{i}_P_d_W", 0.05 * np.cos(t) ** 2))
    cols += [("pose_x", 0.1 * t), ("pose_y", np.zeros(rows)),
             ("pose_z", np.zeros(rows)),
             ("quat_w", np.ones(rows)), ("quat_x", np.zeros(rows)),
             ("quat_y", np.zeros(rows)), ("quat_z", np.zeros(rows))]
    for j in range(6):
        cols.append((f"twist_{j}", 0.2 * np.sin(t + j)))
    vdot = -0.1 * np.ones(rows)
    flag = np.zeros(rows)
    if with_violations:
        vdot = vdot.copy()
        vdot[40:50] = 0.3
        vdot[80:82] = 0.2
        flag[40:50] = 1.0
        flag[80:82] = 1.0
    cols += [("V_kin_J", 0.05 * np.ones(rows)),
             ("V_inp_J", 0.01 * t),
             ("V_total_J", 0.05 + 0.1 * t),
             ("Vdot_W", vdot),
             ("Vdot_inp_W", np.zeros(rows)),
             ("violation_flag", flag)]
    return dict(cols)


def write_csv(path, columns):
    names = list(columns)
    rows = len(next(iter(columns.values())))
    lines = [",".join(names)]
    for k in range(rows):
        lines.append(",".join(repr(float(columns[n][k])) for n in names))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def trace_file(tmp_path):
    return write_csv(tmp_path / "trace.csv", trace_columns())


@pytest.fixture
def violating_trace_file(tmp_path):
    return write_csv(tmp_path / "viol.csv",
                     trace_columns(with_violations=True))


@pytest.fixture
def two_attractor_trace_file(tmp_path):
    return write_csv(tmp_path / "two.csv", trace_columns(n_attractors=2))
