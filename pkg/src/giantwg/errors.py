"""Exception hierarchy shared by all giantwg modules."""


class GiantWGError(Exception):
    """Base class; sweep workers turn these into flagged rows."""

    code = "error"


class SingularGreenFunction(GiantWGError, ZeroDivisionError):
    code = "singular_green"


class OrderOverflow(GiantWGError, ValueError):
    code = "order_overflow"


class SeriesDiverged(GiantWGError, ArithmeticError):
    code = "series_diverged"


class QuadratureNotConverged(GiantWGError, ArithmeticError):
    code = "quadrature_not_converged"


class GridTooCoarse(GiantWGError, ValueError):
    code = "grid_too_coarse"


class UndefinedG2(GiantWGError, ZeroDivisionError):
    code = "undefined_g2"


class DegenerateSteadyState(GiantWGError, ArithmeticError):
    code = "degenerate_steady_state"


class CutoffTooSmall(GiantWGError, ValueError):
    code = "cutoff_too_small"


class NotConverged(GiantWGError, ArithmeticError):
    code = "not_converged"


class EigenSolverFailure(GiantWGError, ArithmeticError):
    code = "eigensolver_failure"


class OrderingAssemblyError(GiantWGError, ValueError):
    code = "ordering_assembly"


class ParseError(GiantWGError, ValueError):
    """Malformed config text; carries the offending line and field when known."""

    code = "parse_error"

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ValidationError(GiantWGError, ValueError):
    """A parsed value violates an invariant; ``field`` names it."""

    code = "validation_error"

    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)
