"""Exception hierarchy.

Two broad families matter to callers (and to the CLI exit codes):

* :class:`InputError` -- the user handed us something malformed: a netlist
  that does not parse, a Touchstone file with a bad option line, a circuit
  whose capacitive structure cannot define a qubit port.  CLI exit code 2.
* :class:`PhysicsError` -- the inputs were well formed but the requested
  computation failed: a root search that never brackets, an impedance
  evaluated exactly on a network resonance, dressed states that cannot be
  labelled.  CLI exit code 1.
"""

from __future__ import annotations

__all__ = [
    "ZZCalcError",
    "InputError",
    "NetlistError",
    "NetlistSyntaxError",
    "NetlistValidationError",
    "DegenerateReductionError",
    "TouchstoneError",
    "TableError",
    "PhysicsError",
    "PoleProximityError",
    "StampSingularityError",
    "ExtrapolationError",
    "ConvergenceError",
    "DegeneracyError",
    "LabelingError",
    "SingularMassError",
    "FloatingModeError",
]


class ZZCalcError(Exception):
    """Base class for every error raised deliberately by this package."""


class InputError(ZZCalcError):
    """Malformed user input (files, values, circuit structure)."""


class NetlistError(InputError):
    """Problem with a circuit description file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NetlistSyntaxError(NetlistError):
    """A line of the circuit file does not parse."""


class NetlistValidationError(NetlistError):
    """The file parses but describes an inconsistent circuit."""


class DegenerateReductionError(InputError):
    """A qubit port has no capacitive path to ground, so no shunt
    capacitance can be defined for it."""


class TouchstoneError(InputError):
    """Problem reading a Touchstone scattering-parameter file."""


class TableError(InputError):
    """Problem reading a tabulated impedance file."""


class PhysicsError(ZZCalcError):
    """A well-posed computation failed to produce a usable answer."""


class PoleProximityError(PhysicsError):
    """Impedance requested exactly on (or numerically too close to) a
    resonance of the coupling network."""

    def __init__(self, message: str, omega: float | None = None):
        self.omega = omega
        super().__init__(message)


class StampSingularityError(PhysicsError):
    """A transmission-line stamp was evaluated at a frequency where its
    electrical length is an exact multiple of pi."""


class ExtrapolationError(PhysicsError):
    """Tabulated impedance requested outside the tabulated frequency grid."""


class ConvergenceError(PhysicsError):
    """An iterative solve (root search, fixed point, secant) did not
    converge within its iteration budget."""


class DegeneracyError(PhysicsError):
    """Two qubits are too close in frequency for the dispersive
    perturbation theory to be meaningful."""


class LabelingError(PhysicsError):
    """Dressed eigenstates could not be matched to bare product states
    with adequate overlap."""


class SingularMassError(PhysicsError):
    """Massless (capacitance-free) nodes could not be eliminated from the
    equations of motion."""


class FloatingModeError(PhysicsError):
    """The linearized circuit has zero-frequency modes (floating islands),
    so a normal-mode expansion is not defined."""
