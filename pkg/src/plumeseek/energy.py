"""Per-UAV energy accounting.

Five meters tick independently and sum into the mission total:

    flying    P_f * fly_time          (kJ, time at constant speed)
    hovering  P_h * n_hover * t_h     (one hover per sensing point)
    turning   e_b * n_turns           (fixed cost per heading change)
    compute   gamma_c * C * f^2 * bits
    comm      P_T * bits / r_T

The flying and hovering powers and the per-turn energy default to values
measured on a DJI Matrice 100 class quadrotor. An agent is grounded once
its total strictly exceeds the budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class EnergyParams:
    fly_power: float = 0.663          # kJ per second of level flight
    hover_power: float = 0.47         # kJ per second of hover
    turn_energy: float = 3.415        # kJ per turning point
    hover_duration: float = 1.0       # seconds hovered per sensing point
    cap_coefficient: float = 1e-28    # switched-capacitance scale
    cycles_per_bit: float = 1000.0    # CPU cycles per processed bit
    cpu_freq: float = 1e9             # Hz
    tx_power: float = 0.25            # kJ per second of transmission
    tx_rate: float = 1e6              # bits per second
    budget: float = 2000.0            # kJ available per agent

    def __post_init__(self) -> None:
        for name in ("fly_power", "hover_power", "turn_energy",
                     "hover_duration", "cap_coefficient", "cycles_per_bit",
                     "cpu_freq", "tx_power", "tx_rate"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.budget < 0.0:
            raise ValueError("budget must be non-negative")


@dataclass
class EnergyLedger:
    """Append-only event counters plus derived energies for one agent."""

    params: EnergyParams
    fly_distance: float = 0.0
    fly_time: float = 0.0
    hover_points: int = 0
    turn_points: int = 0
    compute_bits: int = 0
    comm_bits: int = 0

    def record_flight(self, distance: float, speed: float) -> None:
        if distance < 0.0:
            raise ValueError("distance must be non-negative")
        if speed <= 0.0:
            raise ValueError("speed must be positive")
        self.fly_distance += distance
        self.fly_time += distance / speed

    def record_hover(self) -> None:
        self.hover_points += 1

    def record_turn(self) -> None:
        self.turn_points += 1

    def record_compute(self, bits: int) -> None:
        if bits < 0:
            raise ValueError("bits must be non-negative")
        self.compute_bits += bits

    def record_comm(self, bits: int) -> None:
        if bits < 0:
            raise ValueError("bits must be non-negative")
        self.comm_bits += bits

    @property
    def e_fly(self) -> float:
        return self.params.fly_power * self.fly_time

    @property
    def e_hover(self) -> float:
        return (self.params.hover_power * self.hover_points
                * self.params.hover_duration)

    @property
    def e_turn(self) -> float:
        return self.params.turn_energy * self.turn_points

    @property
    def e_compute(self) -> float:
        p = self.params
        return (p.cap_coefficient * p.cycles_per_bit * p.cpu_freq ** 2
                * self.compute_bits)

    @property
    def e_comm(self) -> float:
        return self.params.tx_power * self.comm_bits / self.params.tx_rate

    @property
    def e_movement(self) -> float:
        return self.e_fly + self.e_hover + self.e_turn

    def total_and_budget(self) -> tuple[float, bool]:
        """Mission total so far and whether it strictly exceeds the budget."""
        total = self.e_movement + self.e_compute + self.e_comm
        return total, total > self.params.budget
