"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`MesofluctError`,
so callers (the CLI in particular) can separate usage problems from numerical ones.
"""


class MesofluctError(Exception):
    """Base class for all package errors."""


class DimensionError(MesofluctError, ValueError):
    """Matrix shapes do not fit together."""


class ValidityError(MesofluctError, ValueError):
    """An input violates a structural requirement (hermiticity, symmetry, ...)."""


class CompletePositivityError(MesofluctError, ValueError):
    """The bath coupling violates lambda^2 <= 1."""


class DivergenceError(MesofluctError, ArithmeticError):
    """A fixed-step integration produced non-finite values."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite value encountered at integration step {step}")


class SpanClosureError(MesofluctError, ArithmeticError):
    """The generator maps the fluctuation basis outside its own span."""


class ConsistencyError(MesofluctError, ArithmeticError):
    """An internal closed-form cross-check failed (signals an implementation bug)."""


class TruncationError(MesofluctError, ArithmeticError):
    """Too much thermal weight sits at the top of the Fock truncation."""

    def __init__(self, tail_mass, n_max):
        self.tail_mass = tail_mass
        self.n_max = n_max
        super().__init__(
            f"tail mass {tail_mass:.3e} at n_max={n_max} exceeds tolerance; raise n_max"
        )


class ResolutionError(MesofluctError, ArithmeticError):
    """A sign change was missed because the sampling grid is too coarse."""


class ConvergenceError(MesofluctError, ArithmeticError):
    """An iterative procedure did not settle within its budget."""


class BracketError(MesofluctError, ArithmeticError):
    """A bisection bracket does not contain a sign change."""
