"""Exception types.

Invalid input (bad numbers, inconsistent areas) derives from
:class:`InvalidInput`; violated mathematical preconditions (an obtuse
triangle where a non-obtuse one is required, say) derive from
:class:`PreconditionFailed`. The CLI maps the two families to distinct exit
codes.
"""


class TrilipError(Exception):
    pass


class InvalidInput(TrilipError, ValueError):
    pass


class PreconditionFailed(TrilipError, ValueError):
    pass


class DegenerateTriangle(InvalidInput):
    pass


class AreaMismatch(InvalidInput):
    pass


class NonpositiveScale(InvalidInput):
    pass


class OutOfRange(InvalidInput):
    pass


class IdenticalEndpoints(InvalidInput):
    pass


class NotTangent(InvalidInput):
    pass


class OutsideDomain(InvalidInput):
    pass


class NotAcute(PreconditionFailed):
    pass


class Obtuse(PreconditionFailed):
    pass


class NotRight(PreconditionFailed):
    pass


# the right angle has to sit at vertex 1 for the closed-form right distance
class NotRightAtV1(NotRight):
    pass


class AltitudeMismatch(PreconditionFailed):
    pass


class AngleConditionViolated(PreconditionFailed):
    pass


class NotNested(PreconditionFailed):
    pass


class NoInteriorFoot(PreconditionFailed):
    pass


class NoPivot(PreconditionFailed):
    pass


class ConstructionError(TrilipError, RuntimeError):
    """A map construction hit a configuration it cannot handle."""
