"""Named panel layouts for the simulator's built-in scenarios."""

from typing import Dict, List

from .panels import PanelSpec

_POWER = PanelSpec(("Vdot_W", "Vdot_inp_W"), ylabel="power [W]",
                   labels=("storage rate", "input reading"),
                   styles=("-", "--"))
_ENERGY = PanelSpec(("V_total_J", "V_inp_J"), ylabel="energy [J]",
                    labels=("storage", "cumulative input"),
                    styles=("-", "--"))

PRESETS: Dict[str, List[PanelSpec]] = {
    # stiffness step under the continuous deflection law
    "fig4": [
        PanelSpec(("att0_K_diag0",), ylabel="stiffness [N/m]"),
        PanelSpec(("att0_d",), ylabel="deflection scaling d"),
        _POWER,
    ],
    # engagement from rest, deflection limiter
    "fig5": [
        PanelSpec(("twist_0", "twist_1", "twist_2"), ylabel="velocity [m/s]",
                  labels=("vx", "vy", "vz")),
        PanelSpec(("att0_d",), ylabel="deflection scaling d"),
        _POWER,
    ],
    # engagement from rest, stiffness-rate limiter
    "fig6": [
        PanelSpec(("twist_0", "twist_1", "twist_2"), ylabel="velocity [m/s]",
                  labels=("vx", "vy", "vz")),
        PanelSpec(("att0_K_diag0",), ylabel="realized stiffness [N/m]"),
        _POWER,
    ],
    # sinusoidal stiffness under load, deflection limiter
    "fig9": [
        PanelSpec(("att0_dx2",), ylabel="vertical error [m]"),
        PanelSpec(("att0_K_diag0",), ylabel="stiffness [N/m]"),
        PanelSpec(("att0_d",), ylabel="deflection scaling d"),
    ],
    # sinusoidal stiffness under load, stiffness-rate limiter
    "fig10": [
        PanelSpec(("att0_dx2",), ylabel="vertical error [m]"),
        PanelSpec(("att0_K_diag0",), ylabel="realized stiffness [N/m]"),
        PanelSpec(("att0_d",), ylabel="rate scaling d"),
    ],
    # shared-tank baseline: gate chattering after depletion
    "tank": [
        PanelSpec(("att0_d",), ylabel="tank gate"),
        PanelSpec(("att0_K_diag0",), ylabel="realized stiffness [N/m]"),
        _ENERGY,
    ],
    # startup budget, wall contact, frozen stiffness
    "impact": [
        PanelSpec(("att0_K_diag0",), ylabel="realized stiffness [N/m]"),
        PanelSpec(("twist_0",), ylabel="velocity [m/s]"),
        _ENERGY,
    ],
    # two fused attractors
    "arbitration": [
        PanelSpec(("att0_d", "att1_d"), ylabel="scaling d",
                  labels=("attractor 0", "attractor 1")),
        PanelSpec(("att0_K_diag0", "att1_K_diag0"), ylabel="stiffness [N/m]",
                  labels=("attractor 0", "attractor 1")),
        _POWER,
    ],
}


def preset_panels(name: str) -> List[PanelSpec]:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; "
                       f"available: {', '.join(sorted(PRESETS))}") from None
