"""Drive power, base-plate heat and thermal photons for an attenuated drive line."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import constants, coupling, dynamics
from .coupling import TransmonParams
from .errors import DriveTooWeakError

DEFAULT_CHAIN = "4K:40@4,MXC:20@0.01"
# A 43 dB line distributed over the 4 K, cold-plate and mixing-chamber stages.
PRIOR_WORK_CHAIN = "4K:20@4,CP:10@0.1,MXC:13@0.01"


@dataclass(frozen=True)
class Stage:
    label: str
    db: float
    temperature: float

    def __post_init__(self):
        if not self.db >= 0:
            raise ValueError(f"stage {self.label}: attenuation must be >= 0 dB")
        if not self.temperature > 0:
            raise ValueError(f"stage {self.label}: temperature must be > 0 K")


@dataclass(frozen=True)
class AttenuationChain:
    """Attenuators from room temperature down, each at its own temperature."""

    stages: tuple[Stage, ...]
    source_temperature: float = 300.0

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.source_temperature > 0:
            raise ValueError("source temperature must be > 0 K")

    @property
    def total_db(self) -> float:
        return float(sum(s.db for s in self.stages))

    @property
    def cooling_monotone(self) -> bool:
        """False when a stage sits warmer than the one before it."""
        temps = [self.source_temperature] + [s.temperature for s in self.stages]
        return all(b <= a for a, b in zip(temps, temps[1:]))

    @classmethod
    def parse(cls, text: str, source_temperature: float = 300.0) -> "AttenuationChain":
        """Read ``"label:dB@T,..."``, e.g. ``"4K:40@4,MXC:20@0.01"``."""
        stages = []
        for part in filter(None, (s.strip() for s in text.split(","))):
            m = re.fullmatch(r"([^:@]+):([^@]+)@(.+)", part)
            if not m:
                raise ValueError(f"stage {part!r} is not of the form label:dB@T")
            label, db, temp = m.groups()
            try:
                stages.append(Stage(label.strip(), float(db.lower().removesuffix("db")),
                                    float(temp.upper().removesuffix("K"))))
            except ValueError as exc:
                raise ValueError(f"stage {part!r}: {exc}") from None
        if not stages:
            raise ValueError("chain has no stages")
        return cls(tuple(stages), source_temperature)

    def format(self) -> str:
        return ",".join(f"{s.label}:{s.db:g}@{s.temperature:g}" for s in self.stages)


def bose_einstein_occupation(f, T):
    """Mean photon number 1/(exp(hf/kT) - 1)."""
    x = constants.h * np.asarray(f, dtype=float) / (constants.k_B * np.asarray(T, dtype=float))
    out = 1.0 / np.expm1(x)
    return float(out) if out.ndim == 0 else out


def chain_photon_number(chain: AttenuationChain, f: float) -> float:
    """Thermal photons after the chain; each stage mixes in its own occupation.

    n_out = n_in / A + (1 - 1/A) n_BE(T_stage) with A the linear attenuation.
    """
    n = bose_einstein_occupation(f, chain.source_temperature)
    for s in chain.stages:
        a = 10.0 ** (-s.db / 10)
        n = n * a + (1 - a) * bose_einstein_occupation(f, s.temperature)
    return float(n)


@dataclass(frozen=True)
class GateBudget:
    """A rectangular pi pulse of length ``duration``.

    ``gamma`` is the drive-line decay rate at the drive frequency (1/s). The
    target Rabi frequency defaults to 1/(2 duration).
    """

    duration: float
    gamma: float
    mode: str = "resonant"
    params: TransmonParams | None = None
    f_rabi: float | None = None

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("gate duration must be positive")
        if not self.gamma > 0:
            raise ValueError("coupling rate at the drive frequency must be positive")
        if self.mode not in ("resonant", "subharmonic"):
            raise ValueError(f"unknown drive mode {self.mode!r}")
        if self.mode == "subharmonic" and self.params is None:
            raise ValueError("subharmonic budgets need transmon parameters")

    @property
    def target_rabi(self) -> float:
        return self.f_rabi if self.f_rabi is not None else 1.0 / (2 * self.duration)


def dbm(power_w):
    with np.errstate(divide="ignore"):
        return 10 * np.log10(np.asarray(power_w, dtype=float) / 1e-3)


def subharmonic_eta(g: GateBudget) -> float:
    """eta needed for the target subharmonic Rabi rate 2|alpha| eta^3 / 3."""
    eta = (3 * g.target_rabi / (2 * abs(g.params.alpha))) ** (1 / 3)
    if eta >= 1:
        raise DriveTooWeakError(f"the gate needs eta = {eta:.3f}, outside the perturbative range eta < 1")
    return eta


def chip_voltage(g: GateBudget, f_drive: float, z_tml: float = 50.0) -> float:
    """Peak voltage at the chip end of the line for the gate."""
    if g.mode == "resonant":
        omega_r = 2 * math.pi * g.target_rabi
    else:
        eta = subharmonic_eta(g)
        omega_r = dynamics.omega_for_eta(g.params, f_drive, eta)
    return coupling.voltage_for_rabi(g.gamma, f_drive, z_tml, omega_r / (2 * math.pi))


def chip_power_dbm(g: GateBudget, f_drive: float, z_tml: float = 50.0) -> float:
    """Travelling-wave peak power V^2/(2Z) at the chip, in dBm."""
    v = chip_voltage(g, f_drive, z_tml)
    return float(dbm(v * v / (2 * z_tml)))


def required_room_temperature_power(g: GateBudget, chain: AttenuationChain, z_tml: float = 50.0,
                                    f_drive: float | None = None) -> float:
    """Peak power at room temperature (dBm) that realises the gate.

    ``f_drive`` defaults to f_q (resonant) or f_q/3 (subharmonic). In the
    subharmonic case the voltage-to-coupling factor is evaluated at the drive
    frequency, where ``g.gamma`` is also taken.
    """
    if f_drive is None:
        if g.params is None:
            raise ValueError("f_drive is required without transmon parameters")
        f_drive = g.params.f_q if g.mode == "resonant" else g.params.f_q / 3
    return chip_power_dbm(g, f_drive, z_tml) + chain.total_db


def base_plate_heat(room_power_dbm: float, chain: AttenuationChain) -> float:
    """Power dissipated in the last stage (dBm) for a given room-temperature power."""
    if not chain.stages:
        raise ValueError("chain has no stages")
    last = chain.stages[-1]
    entering = room_power_dbm - (chain.total_db - last.db)
    frac = 1 - 10.0 ** (-last.db / 10)
    if frac <= 0:
        return -math.inf
    return float(entering + 10 * math.log10(frac))
