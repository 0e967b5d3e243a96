"""Reference drive-line circuits: standard capacitive drive, lambda/4 and lambda/2 filters.

Every design has the drive line on port 1, the qubit island on port 2 (shunted
by the qubit capacitance) and the readout resonator on port 3 through a small
coupling capacitor. Filter lengths are set from the target stopband frequency.
"""

import math

from . import constants
from .network import Element, Netlist, Port

EPS_EFF = 6.45
Z_LINE = 50.0
C_Q = 83e-15
C_G = 5e-15
C_D_STANDARD = 80e-18
C_D_LAMBDA4 = 4.5e-15
C_D_LAMBDA2 = 9.2e-15
F_STOP = 5e9
# Residual line loss of the filter stubs (dB/m); sets the finite stopband T1.
FILTER_ATTEN = 2e-5


def wavelength(f, eps_eff=EPS_EFF):
    return constants.c / (f * math.sqrt(eps_eff))


def _common(c_q, c_g):
    return [
        Element.capacitor("q", "0", c_q, name="Cq"),
        Element.capacitor("q", "r", c_g, name="Cg"),
    ], (Port(2, "q"), Port(3, "r"))


def standard_drive(c_d=C_D_STANDARD, c_q=C_Q, c_g=C_G, z_ref=Z_LINE):
    """Drive port coupled straight to the qubit through ``c_d``."""
    els, ports = _common(c_q, c_g)
    els.insert(0, Element.capacitor("d", "q", c_d, name="Cd"))
    return Netlist(tuple(els), (Port(1, "d", z_ref),) + ports, frozenset({"0"}))


def lambda4_filter(c_d=C_D_LAMBDA4, f_stop=F_STOP, c_q=C_Q, c_g=C_G, eps_eff=EPS_EFF,
                   z0=Z_LINE, atten=FILTER_ATTEN):
    """Qubit tapped into the input of an open quarter-wave stub."""
    els, ports = _common(c_q, c_g)
    length = wavelength(f_stop, eps_eff) / 4
    els = [
        Element.capacitor("x0", "q", c_d, name="Cd"),
        Element.tline("x0", "x1", z0, eps_eff, length, atten, name="stub"),
    ] + els
    return Netlist(tuple(els), (Port(1, "x0", z0),) + ports, frozenset({"0"}))


def lambda2_filter(c_bot=C_D_LAMBDA2 / 2, c_top=None, f_stop=F_STOP, c_q=C_Q, c_g=C_G,
                   eps_eff=EPS_EFF, z0=Z_LINE, atten=FILTER_ATTEN):
    """Qubit tapped at both ends of an open half-wave line.

    ``Cbot`` sits at the driven end, ``Ctop`` at the open end.
    """
    c_top = c_bot if c_top is None else c_top
    els, ports = _common(c_q, c_g)
    length = wavelength(f_stop, eps_eff) / 2
    els = [
        Element.capacitor("x0", "q", c_bot, name="Cbot"),
        Element.tline("x0", "x1", z0, eps_eff, length, atten, name="stub"),
        Element.capacitor("x1", "q", c_top, name="Ctop"),
    ] + els
    return Netlist(tuple(els), (Port(1, "x0", z0),) + ports, frozenset({"0"}))


DESIGNS = {
    "standard": standard_drive,
    "lambda4": lambda4_filter,
    "lambda2": lambda2_filter,
}
