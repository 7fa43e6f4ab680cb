"""Exception hierarchy shared by all modules."""


class XPJostError(Exception):
    """Base class for library errors."""


class DomainError(XPJostError, ValueError):
    """Argument outside the domain where an operation is defined."""


class AccuracyError(XPJostError, ArithmeticError):
    """Series acceleration could not reach the requested tolerance."""


class ConsistencyError(XPJostError, ArithmeticError):
    """Two evaluation paths that must agree do not."""


class BracketError(XPJostError, ArithmeticError):
    """Root search window exhausted without a sign change."""


class PoleError(XPJostError, ZeroDivisionError):
    """Evaluation requested at (or numerically on) a pole."""


class QuadratureError(XPJostError, ArithmeticError):
    """Quadrature did not converge within its refinement budget."""


class WindowError(XPJostError, ValueError):
    """Principal-value evaluation point too close to the window edge."""


class CollinearityError(XPJostError, ArithmeticError):
    """Rows of the amplitude system are numerically collinear."""


class NegativeNormError(XPJostError, ArithmeticError):
    """Quadratic-form norm came out negative or complex."""


class PhaseUnwrapError(XPJostError, ArithmeticError):
    """Scan mesh too coarse to follow the phase continuously."""


class BoundaryZeroError(XPJostError, ArithmeticError):
    """Function vanishes (numerically) on a contour used for winding."""


class ConvergenceError(XPJostError, ArithmeticError):
    """Iterative solver did not converge within its budget."""


class ConfigError(XPJostError, ValueError):
    """Invalid or inconsistent run configuration."""
