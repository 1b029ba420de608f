"""Exception hierarchy shared by all qmetro modules."""


class QMetroError(Exception):
    """Base class for every error raised by qmetro."""


class NonHermitianInput(QMetroError, ValueError):
    pass


class NegativeEigenvalue(QMetroError, ValueError):
    pass


class DimensionMismatch(QMetroError, ValueError):
    pass


class BadParameter(QMetroError, ValueError):
    pass


class ParameterMismatch(QMetroError, ValueError):
    pass


class SingularDistribution(QMetroError, ValueError):
    """Derivative mass sits on an outcome of zero probability."""


class SupportViolation(QMetroError, ValueError):
    """The state derivative leaves the support of the state."""


class SolverFailure(QMetroError, RuntimeError):
    pass


class BetaZeroInfeasible(QMetroError):
    """No Kraus representation makes beta vanish; the channel may beat the SQL."""


class DimensionGuard(QMetroError, ValueError):
    """Requested N-probe Hilbert space exceeds the brute-force size limit."""


class DomainError(QMetroError, ValueError):
    pass


class ParseError(QMetroError, ValueError):
    pass
