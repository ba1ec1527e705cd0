"""Exception types shared across the simulator."""


class QsimError(Exception):
    """Base class for all simulator errors."""


class InvalidSizeError(QsimError, ValueError):
    """Qubit count outside the supported range."""


class DimensionError(QsimError, ValueError):
    """Operands describe different Hilbert-space dimensions."""


class NormalizationError(QsimError, ValueError):
    """Amplitude vector is not normalized within tolerance."""


class QubitIndexError(QsimError, IndexError):
    """Qubit index out of range, duplicated, or overlapping another set."""


class UnknownGateError(QsimError, ValueError):
    """Gate name not present in the catalog."""


class ArityError(QsimError, ValueError):
    """Wrong number of parameters for an operation."""


class ShapeError(QsimError, ValueError):
    """Matrix is not square with a power-of-two dimension."""


class UnsupportedSizeError(QsimError, ValueError):
    """Gate targets more qubits than the in-place kernels support."""


class CapacityError(QsimError, ValueError):
    """Operation exceeds the dense-representation qubit cap."""


class BackendConflictError(QsimError, ValueError):
    """A backend with this name is already registered."""


class BackendNotFoundError(QsimError, ValueError):
    """No backend registered under this name."""


class DistributionError(QsimError, ValueError):
    """Probability vector is negative or badly normalized."""


class HermiticityError(QsimError, ArithmeticError):
    """Operator failed a hermiticity check, or an expectation value
    carried an imaginary residue above tolerance."""


class NumericalError(QsimError, ArithmeticError):
    """A numerical routine failed to converge or lost precision."""


class StepSizeError(QsimError, ValueError):
    """Integrator norm drift exceeded tolerance; a smaller dt is needed."""


class DecompositionError(QsimError, ValueError):
    """Hamiltonian term cannot be turned into a product-formula gate."""


class ScheduleError(QsimError, ValueError):
    """Annealing schedule violates its endpoint constraints."""


class InvalidOracleError(QsimError, ValueError):
    """Marked-state set is empty or covers the whole basis."""


class ObjectiveError(QsimError, ValueError):
    """Objective returned a non-finite value.

    Carries the offending point in ``point``.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class SerializationError(QsimError, ValueError):
    """Circuit contains a gate the text format cannot represent."""


class ParseError(QsimError, ValueError):
    """Source program rejected; carries position and error kind.

    ``kind`` is one of ``lexical``, ``syntax``, ``unknown-gate``,
    ``arity``, ``range``, ``expression``.
    """

    def __init__(self, message, line, column, kind="syntax"):
        super().__init__(f"{line}:{column}: {kind}: {message}")
        self.line = line
        self.column = column
        self.kind = kind


class MonotonicityWarning(UserWarning):
    """Feedback-law energy trace increased beyond tolerance."""


class ConvergenceWarning(UserWarning):
    """Optimizer stopped on budget without meeting its tolerance; the
    best point seen is still returned."""
