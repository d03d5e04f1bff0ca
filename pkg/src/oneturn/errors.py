"""Exception hierarchy shared across the package.

Every raised condition maps to one of these; callers that need to
distinguish engineering failures (bad input, geometry, quadrature
breakdown) from analytic refusals (hypotheses unverifiable, identity
undecidable) can branch on the two base classes `InputError` and
`AnalyticRefusal`.
"""

from __future__ import annotations


class OneturnError(Exception):
    """Base class for all package errors."""


class InputError(OneturnError):
    """Malformed input, violated precondition, or numeric breakdown."""


class AnalyticRefusal(OneturnError):
    """The requested conclusion cannot be certified from the given data."""


class BranchCutError(InputError):
    """Argument lies on (or crosses) the square-root branch cut."""


class ConvergenceError(InputError):
    """Iterative solver failed to converge; carries the last residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class OrderError(InputError):
    """A truncation order outside the representable range was requested."""


class ExactnessError(InputError):
    """The operation would leave the exact rational coefficient field."""


class ParseError(InputError):
    """Malformed literal or document; carries a location when known."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


class GrammarError(InputError):
    """Expression not expressible in the composition grammar."""


class EvalDomainError(InputError):
    """An intermediate value left the admissible evaluation domain.

    `node` identifies the offending operation in the flattened
    composition (index and kind), per the evaluation contract.
    """

    def __init__(self, message: str, node: str | None = None):
        super().__init__(message if node is None else f"{message} (at {node})")
        self.node = node


class EvalRangeError(InputError):
    """A value exceeded the representable numeric range of the evaluator."""


class PartitionError(InputError):
    """Constructed partition violates the partition axioms."""


class GeometryError(InputError):
    """Partition surgery could not meet its geometric postconditions."""


class QuadratureError(InputError):
    """Adaptive quadrature failed to converge; reports the worst subinterval."""

    def __init__(self, message: str, worst_interval: tuple[float, float] | None = None):
        super().__init__(message)
        self.worst_interval = worst_interval


class PreconditionError(InputError):
    """A documented operation precondition does not hold."""


class CapabilityError(InputError):
    """A component handle lacks a capability the operation requires."""


class HypothesisViolation(AnalyticRefusal):
    """A declared analytic hypothesis was falsified on the check grid."""


class CertificateRefused(AnalyticRefusal):
    """Bound certificate construction refused; names the failing hypothesis."""

    def __init__(self, message: str, failing_hypothesis: str | None = None):
        super().__init__(message)
        self.failing_hypothesis = failing_hypothesis


class NotYetPositive(AnalyticRefusal):
    """A decay rate that is only eventually positive was requested too early.

    Carries the abscissa at which positivity was first observed, when the
    search found one.
    """

    def __init__(self, message: str, first_positive: float | None = None):
        super().__init__(message)
        self.first_positive = first_positive
