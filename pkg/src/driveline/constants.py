"""Physical constants (CODATA 2018; the SI-defining ones are exact)."""

import math

h = 6.62607015e-34
hbar = h / (2 * math.pi)
e = 1.602176634e-19
k_B = 1.380649e-23
c = 299792458.0
phi0 = h / (2 * e)
