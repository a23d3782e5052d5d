"""Energy-tank gating of stiffness changes, the comparison baseline.

Spring-energy increases are paid from a tank filled by dissipated energy.
While the tank holds more than a small floor the requested stiffness is
realized instantly; once it drains the variable-stiffness action is switched
off entirely.  The binary gate is deliberate: near the floor the tank
refills a little, re-enables, pays one step, drains, and disables again,
reproducing the rapid on/off chattering this baseline is known for.
"""

from dataclasses import dataclass


@dataclass
class EnergyTank:
    """Tank state: current level, capacity, and the enable floor, in joules."""

    level: float
    capacity: float = 1.0
    floor: float = 0.01

    def __post_init__(self):
        if self.capacity <= 0.0:
            raise ValueError("capacity must be positive")
        if not 0.0 <= self.level <= self.capacity:
            raise ValueError("level must lie in [0, capacity]")
        if self.floor < 0.0:
            raise ValueError("floor must be nonnegative")


def tank_step(tank: EnergyTank, P_d, P_required, dt):
    """Advance the tank one step; returns ``(enabled, tank_next)``.

    ``enabled`` is decided from the pre-update level.  When enabled, the
    requested power is drained and the caller realizes the full stiffness
    request this step; when disabled the request is suppressed and nothing
    drains.  Dissipated power refills the tank up to its capacity.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    enabled = tank.level > tank.floor
    level = tank.level + max(0.0, P_d) * dt
    if enabled:
        level -= max(0.0, P_required) * dt
    level = min(tank.capacity, max(0.0, level))
    return enabled, EnergyTank(level=level, capacity=tank.capacity, floor=tank.floor)
