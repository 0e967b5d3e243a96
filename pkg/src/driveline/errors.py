"""Exception hierarchy.

Every error carries the name of the module that raised it and, where one
exists, a short remediation hint; the CLI prints both instead of a traceback.
"""


class DrivelineError(Exception):
    module = "driveline"
    hint = ""

    def __init__(self, message, hint=None):
        super().__init__(message)
        if hint is not None:
            self.hint = hint


class NetlistError(DrivelineError, ValueError):
    module = "network"


class TopologyError(NetlistError):
    hint = "check GND statements and that every node connects to ground or a port"


class NumericRangeError(DrivelineError, ArithmeticError):
    module = "network"
    hint = "reduce attenuation*length or the frequency range"


class ParseError(DrivelineError, ValueError):
    module = "rfio"

    def __init__(self, message, line=None, column=None, hint=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message, hint)
        self.line = line
        self.column = column


class UnsupportedFeatureError(ParseError):
    hint = "only version-1 S-parameter Touchstone files with 1-4 ports are supported"


class PassivityError(DrivelineError, ValueError):
    module = "coupling"
    hint = "the admittance has a negative real part; check element signs"


class DivergenceError(DrivelineError, ZeroDivisionError):
    module = "coupling"
    hint = "the requested detuning sits on a pole of the formula"


class OutOfModelError(DrivelineError, ValueError):
    module = "dynamics"


class DimensionError(DrivelineError, ValueError):
    module = "dynamics"
    hint = "use at least 3 levels for subharmonic driving"


class StiffnessError(DrivelineError, RuntimeError):
    module = "dynamics"
    hint = "lower dt_max or the drive amplitude"


class NoOscillationError(DrivelineError, RuntimeError):
    module = "dynamics"
    hint = "lengthen the trace to cover at least two oscillation periods"


class DegenerateFitError(DrivelineError, RuntimeError):
    module = "fitting"
    hint = "the data do not constrain all model parameters"


class FitStageError(DrivelineError, RuntimeError):
    module = "fitting"


class DriveTooWeakError(DrivelineError, ValueError):
    module = "budget"
    hint = "increase the coupling at the drive frequency or the gate time"
