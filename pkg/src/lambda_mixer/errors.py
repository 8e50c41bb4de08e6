"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration errors exit 2,
numerical failures exit 3, validation failures exit 4.
"""


class LambdaMixerError(Exception):
    """Base class for all package errors."""


class NumericalError(LambdaMixerError):
    """Base class for errors raised by the numerical core."""


class DegenerateDenominator(NumericalError):
    """|Omega_1|^2 + |E_1|^2 vanished; the adiabatic eigenstate is undefined."""


class ConvergenceFailure(NumericalError):
    """Eigensolver did not reach the residual bound within its budget."""


class AmbiguousBranch(NumericalError):
    """Two eigenbranches overlap the reference equally; likely a level crossing."""


class StepSizeUnderflow(NumericalError):
    """Adaptive integrator shrank the step below the representable minimum."""


class NoCycleFound(NumericalError):
    """Trajectory contains no conversion maximum; zeta_max is too small."""


class PhaseSingularity(NumericalError):
    """Analytic conversion length diverges as the initial phase approaches pi."""


class OutOfValidityRegion(NumericalError):
    """Analytic prediction requested outside its stated validity region."""


class UndefinedPhase(NumericalError):
    """Relative phase is undefined because a field amplitude is (numerically) zero."""


class ConfigError(LambdaMixerError):
    """Base class for run-configuration errors."""


class ParseError(ConfigError):
    """Malformed config document; carries line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    """A config value is outside its allowed range; carries the key name."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class UnknownKey(ConfigError):
    """Config document contains a key the schema does not define."""

    def __init__(self, key: str, line: int):
        super().__init__(f"unknown key {key!r} on line {line}")
        self.key = key
        self.line = line
