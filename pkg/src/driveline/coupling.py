"""Qubit-side numbers derived from the drive-line network.

Converts the real part of the driving-point admittance into a decay rate,
combines it with dielectric and Purcell channels, and relates drive voltage to
Rabi frequency. Frequencies are in Hz unless a name says otherwise; rates are
in 1/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from . import constants, network
from .errors import DivergenceError, PassivityError

# Negative conductance above this magnitude (S) is a passivity violation;
# smaller values are round-off and are clamped to zero.
PASSIVITY_TOL = 1e-12


def capacitance_from_ec(e_c_hz: float) -> float:
    """Total capacitance whose charging energy ``e^2/2C`` equals ``h*e_c_hz``."""
    return constants.e ** 2 / (2 * constants.h * e_c_hz)


@dataclass(frozen=True)
class TransmonParams:
    """Transmon parameters; energies are given as frequencies E/h.

    Parameters
    ----------
    f_q : float
        0-1 transition frequency.
    alpha : float
        Anharmonicity alpha/2pi, negative.
    e_c, e_j : float
        Charging and Josephson energies over h.
    c_q : float
        Total qubit capacitance (F), tied to ``e_c``.
    f_max : float, optional
        Sweet-spot frequency of a flux-tunable device.
    """

    f_q: float
    alpha: float
    e_c: float
    e_j: float
    c_q: float
    f_max: float | None = None

    def __post_init__(self):
        if not self.alpha < 0:
            raise ValueError(f"anharmonicity must be negative, got {self.alpha}")
        if not (self.e_c > 0 and self.e_j > 0 and self.f_q > 0 and self.c_q > 0):
            raise ValueError("f_q, E_C, E_J and C_q must be positive")
        if abs(self.c_q / capacitance_from_ec(self.e_c) - 1) > 1e-6:
            raise ValueError("C_q is inconsistent with E_C")
        if self.e_j / self.e_c <= 20:
            raise ValueError(f"E_J/E_C = {self.e_j / self.e_c:.3g} is outside the transmon regime")
        f_est = math.sqrt(8 * self.e_j * self.e_c) - self.e_c
        if abs(f_est / self.f_q - 1) > 0.02:
            raise ValueError(f"f_q = {self.f_q:.6g} Hz disagrees with sqrt(8 E_J E_C) - E_C = {f_est:.6g} Hz")

    @classmethod
    def from_frequency(cls, f_q, e_c, alpha=None, f_max=None):
        """Parameters with E_J chosen so that sqrt(8 E_J E_C) - E_C = f_q."""
        e_j = (f_q + e_c) ** 2 / (8 * e_c)
        alpha = -e_c if alpha is None else alpha
        return cls(f_q, alpha, e_c, e_j, capacitance_from_ec(e_c), f_max)

    @property
    def omega_q(self):
        return 2 * math.pi * self.f_q

    @property
    def omega_alpha(self):
        return 2 * math.pi * self.alpha

    def with_frequency(self, f_q):
        """Same charging energy and anharmonicity, tuned to ``f_q``."""
        return replace(self, f_q=f_q, e_j=(f_q + self.e_c) ** 2 / (8 * self.e_c))


@dataclass(frozen=True)
class LossChannels:
    """Non-drive-line relaxation channels.

    ``kappa`` and ``g`` are kappa/2pi and g/2pi of the readout resonator at
    ``f_r``; ``t1_other`` lumps anything not modelled.
    """

    tan_delta: float = 0.0
    temperature: float = 0.02
    f_r: float | None = None
    kappa: float | None = None
    g: float | None = None
    t1_other: float | None = None

    def __post_init__(self):
        if self.tan_delta < 0:
            raise ValueError("tan_delta must be >= 0")
        if not self.temperature > 0:
            raise ValueError("temperature must be > 0")
        if (self.kappa is not None and self.kappa < 0) or (self.g is not None and self.g < 0):
            raise ValueError("kappa and g must be >= 0")


def _conductance(y_in_real):
    g = np.asarray(y_in_real, dtype=float)
    if np.any(g < -PASSIVITY_TOL):
        raise PassivityError(f"Re[Y_in] = {float(np.min(g)):.3e} S is negative")
    return np.maximum(g, 0.0)


def gamma_q(y_in_real, c_q):
    """External decay rate Re[Y_in]/C_q."""
    if not c_q > 0:
        raise ValueError("c_q must be positive")
    out = _conductance(y_in_real) / c_q
    return float(out) if out.ndim == 0 else out


def t1_ext(y_in_real, c_q):
    """C_q/Re[Y_in]; infinite where the qubit is decoupled."""
    if not c_q > 0:
        raise ValueError("c_q must be positive")
    g = _conductance(y_in_real)
    with np.errstate(divide="ignore"):
        out = np.where(g > 0, c_q / np.where(g > 0, g, 1.0), np.inf)
    return float(out) if out.ndim == 0 else out


def drive_terminations(netlist, drive_port: int = 1, qubit_port: int = 2) -> dict[int, str]:
    """Drive port matched, every other non-qubit port grounded."""
    return {p.index: ("matched" if p.index == drive_port else "grounded")
            for p in netlist.ports if p.index != qubit_port}


def gamma_from_netlist(netlist, f, c_q, drive_port: int = 1, qubit_port: int = 2, terminations=None):
    """Drive-line decay rate Re[Y_in(f)]/C_q seen from the qubit port."""
    terms = drive_terminations(netlist, drive_port, qubit_port) if terminations is None else terminations
    f = np.atleast_1d(np.asarray(f, dtype=float))
    y = network.driving_point_admittance(netlist, qubit_port, terms, network.FrequencyGrid(f))
    out = gamma_q(np.real(y), c_q)
    return float(out[0]) if np.ndim(out) and out.size == 1 else out


def gamma_q_analytic(p: TransmonParams, c_d, z_tml=50.0):
    """Weak-coupling decay rate through a small capacitance ``c_d`` into ``z_tml``.

    gamma = 2 e^2 (C_d/C_q)^2 sqrt(E_J/2E_C) Z omega_q / hbar
    """
    ratio = np.asarray(c_d, dtype=float) / p.c_q
    out = (2 * constants.e ** 2 * ratio ** 2 * math.sqrt(p.e_j / (2 * p.e_c))
           * z_tml * p.omega_q / constants.hbar)
    return float(out) if np.ndim(out) == 0 else out


def _beta(f, z_tml):
    """Voltage-to-coupling factor sqrt(1/(2 hbar omega Z)), per volt."""
    return 1.0 / np.sqrt(2 * constants.hbar * 2 * np.pi * np.asarray(f, dtype=float) * z_tml)


def rabi_from_admittance(gamma, f_q, z_tml, v_peak):
    """Rabi frequency Omega_R/2pi = 2 sqrt(gamma) beta / 2pi for peak chip voltage ``v_peak``."""
    out = 2 * np.sqrt(gamma) * _beta(f_q, z_tml) * np.asarray(v_peak, dtype=float) / (2 * np.pi)
    return float(out) if np.ndim(out) == 0 else out


def voltage_for_rabi(gamma, f_q, z_tml, f_rabi):
    """Peak chip voltage giving Rabi frequency ``f_rabi``; inverse of :func:`rabi_from_admittance`."""
    if not np.all(np.asarray(gamma) > 0):
        raise DivergenceError("a decoupled qubit cannot be driven", hint="gamma must be positive")
    out = 2 * np.pi * np.asarray(f_rabi, dtype=float) / (2 * np.sqrt(gamma) * _beta(f_q, z_tml))
    return float(out) if np.ndim(out) == 0 else out


def t1_dielectric(p: TransmonParams, loss: LossChannels) -> float:
    """Capacitive dielectric loss, 1/T1 = (sqrt(8 E_J E_C)/hbar) tan_delta coth(hbar omega/2kT)."""
    if not loss.tan_delta > 0:
        return math.inf
    x = constants.h * p.f_q / (2 * constants.k_B * loss.temperature)
    coth = 1.0 if x > 350 else 1.0 / math.tanh(x)
    plasma = 2 * math.pi * math.sqrt(8 * p.e_j * p.e_c)
    return 1.0 / (plasma * loss.tan_delta * coth)


def t1_purcell(loss: LossChannels, f_q: float) -> float:
    """Purcell decay through the readout resonator, T1 = Delta^2/(kappa g^2), all angular."""
    if loss.f_r is None or loss.kappa is None or loss.g is None:
        raise ValueError("resonator f_r, kappa and g are required")
    if loss.g == 0 or loss.kappa == 0:
        return math.inf
    delta = 2 * math.pi * (f_q - loss.f_r)
    if delta == 0:
        raise DivergenceError("qubit and resonator are degenerate")
    return delta ** 2 / (2 * math.pi * loss.kappa * (2 * math.pi * loss.g) ** 2)


def t1_total(channels: Iterable[float]) -> float:
    """Harmonic combination of independent T1 contributions; infinities drop out."""
    finite = []
    for t in channels:
        if not t > 0:
            raise ValueError(f"T1 contributions must be positive, got {t}")
        if not math.isinf(t):
            finite.append(float(t))
    if len(finite) <= 1:
        return finite[0] if finite else math.inf
    return 1.0 / math.fsum(1.0 / t for t in finite)


def dispersive_shift(p: TransmonParams, g_hz: float, f_r: float) -> float:
    """Dispersive shift chi/2pi = alpha g^2 / (Delta (Delta + alpha)) in Hz."""
    delta = p.f_q - f_r
    scale = max(abs(p.f_q), abs(f_r))
    if abs(delta) < 1e-12 * scale or abs(delta + p.alpha) < 1e-12 * scale:
        raise DivergenceError(f"detuning {delta:.6g} Hz sits on a pole of the dispersive shift")
    return p.alpha * g_hz ** 2 / (delta * (delta + p.alpha))
