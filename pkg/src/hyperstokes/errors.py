"""Exception hierarchy shared by all hyperstokes modules."""


class HyperstokesError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(HyperstokesError, ValueError):
    """An argument is malformed (wrong shape, non-finite, non-orthogonal, ...)."""


class SingularPointError(HyperstokesError, ZeroDivisionError):
    """A singular kernel was evaluated at its singularity (x = 0)."""


class BodyConfigError(HyperstokesError, ValueError):
    """A body definition violates its invariants (empty segments, m_c > m, ...)."""


class AssemblyError(HyperstokesError):
    """The kernel matrix cannot be assembled (e.g. coincident quadrature nodes)."""


class SingularSystemError(HyperstokesError):
    """A linear system required by the solver is numerically singular."""


class NoTranslationalOrientation(HyperstokesError):
    """The coupling tensor has no numerical null space, so no purely
    translational orientation can be predicted."""
