"""Exception types shared by the simulator and the analytic evaluator."""


class NomaASError(Exception):
    """Base class. ``code`` is a stable upper-case identifier."""

    code = "NOMA_AS_ERROR"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self):
        return f"{self.code}: {super().__str__()}"


class ConfigError(NomaASError, ValueError):
    code = "CONFIG_INVALID"


class DomainError(NomaASError, ValueError):
    code = "DOMAIN_ERROR"


class QuadratureError(NomaASError, ArithmeticError):
    """Raised when adaptive quadrature misses its tolerance.

    The best estimate obtained is kept on ``result``.
    """

    code = "NON_CONVERGED"

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class CdfRangeError(NomaASError, ArithmeticError):
    code = "CDF_OUT_OF_RANGE"
