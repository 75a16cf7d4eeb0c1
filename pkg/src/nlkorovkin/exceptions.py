"""Exception hierarchy.

Axiom and bound violations are *not* exceptions; they are reported as data
through :class:`nlkorovkin.reports.PropertyReport`.
"""


class KorovkinLabError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(KorovkinLabError, ValueError):
    """A set or sequence is malformed (unsorted, overlapping, reversed)."""


class DomainError(KorovkinLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidDistortionError(KorovkinLabError, ValueError):
    """A distortion function is not nondecreasing or does not vanish at 0."""


class ConfigurationError(KorovkinLabError, ValueError):
    """Invalid configuration: bad knob values, unknown names, missing inputs."""


class PreconditionError(KorovkinLabError, ValueError):
    """A structural hypothesis required by a construction does not hold."""


class EvaluationError(KorovkinLabError, ArithmeticError):
    """A numerical evaluation produced non-finite values.

    ``context`` carries whatever is known about the failing evaluation,
    typically the family name, ``n``, the function name and the point.
    """

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def __str__(self):
        base = super().__str__()
        if not self.context:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
        return f"{base} ({extra})"


class QuadratureWarning(RuntimeWarning):
    """Adaptive refinement hit its sample cap without stabilising."""
