"""Exception hierarchy shared by every module of the package."""


class ItlogError(Exception):
    """Base class for all computational errors raised by this package."""


class SeriesError(ItlogError, ValueError):
    pass


class DomainMismatchError(SeriesError, TypeError):
    """Exact-rational and complex-float series were mixed."""


class NotAPowerSeriesError(SeriesError):
    """A quotient would need negative powers of z."""


class SeriesZeroDivisionError(SeriesError, ZeroDivisionError):
    pass


class EmptyResultError(SeriesError):
    """The guaranteed truncation order of a result would be negative."""


class CompositionError(SeriesError):
    """The inner series of a composition has a non-zero constant term."""


class NotInvertibleError(SeriesError):
    pass


class NonFormalError(SeriesError):
    """exp/log/sin applied where the result would need a transcendental constant."""


class OrderDeficitError(SeriesError):
    """An input is truncated too early for the requested output order."""


class NotParabolicError(SeriesError):
    pass


class ResonanceError(ItlogError, ValueError):
    """The multiplier makes a linearization pivot vanish."""

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class BoettcherCaseError(ItlogError, ValueError):
    """Multiplier zero: superattracting, handled by Boettcher's equation instead."""


class RankUndefinedError(ItlogError, ValueError):
    pass


class NoFixedPointError(ItlogError, ArithmeticError):
    pass


class NotRepellingError(ItlogError, ValueError):
    pass


class DivergenceError(ItlogError, ArithmeticError):
    """A forward orbit escaped the magnitude cap."""

    def __init__(self, message, last_n=None):
        super().__init__(message)
        self.last_n = last_n


class ParseError(ItlogError, ValueError):
    def __init__(self, message, pos=None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos


class EvaluationError(ItlogError, ValueError):
    """A series-core precondition failed while evaluating an expression."""

    def __init__(self, message, pos=None):
        if pos is not None:
            message = f"{message} (in expression at position {pos})"
        super().__init__(message)
        self.pos = pos
