"""Exception types shared across the package."""


class GenssError(Exception):
    """Base class for all package-specific errors."""


class NotInvertibleHere(GenssError):
    """Division requested outside the invertible monomial fragment."""


class NotReducible(GenssError):
    """Generalized circuit coefficients share no clearing monomial."""


class UnsupportedConvolution(GenssError):
    """Convolution factor is not supported on the half line [0, oo)."""


class QuadratureFailure(GenssError):
    """Adaptive quadrature did not reach the requested tolerance."""


class StiffnessFailure(GenssError):
    """The ODE integrator failed (step size underflow or non-convergence)."""


class IllConditioned(GenssError):
    """Root finding or multiplicity clustering is ambiguous at threshold."""


class SingularWronskian(GenssError):
    """The homogeneous-basis Wronskian vanished numerically.

    The basis of a constant-coefficient operator always has a nonzero
    Wronskian, so this signals a root-finding failure upstream.
    """


class OrderTooHigh(GenssError):
    """Mollifier derivative order above the supported cap."""


class UnsupportedRegime(GenssError):
    """Circuit regime outside the printed closed-form cases."""


class ParseError(GenssError):
    """Problem-DSL syntax error with position information."""

    def __init__(self, message: str, position: int, expected: tuple = ()):
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} at position {position}"
        if self.expected:
            detail += " (expected: " + ", ".join(self.expected) + ")"
        super().__init__(detail)
