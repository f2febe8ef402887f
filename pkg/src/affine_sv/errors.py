"""Exception hierarchy shared by all modules."""


class AffineSVError(Exception):
    """Base class for every error raised by :mod:`affine_sv`."""


class ContractViolation(AffineSVError, ValueError):
    """A value that must be an extended real came back as NaN."""


class NonConvergentIntegral(AffineSVError):
    """A user supplied cumulant handle reported failure (returned NaN)."""


class DomainError(AffineSVError, ValueError):
    """Argument lies outside the effective domain of the requested quantity."""


class SignChangeError(AffineSVError, ValueError):
    """R(u, .) vanishes strictly inside an integration interval."""


class AssumptionError(AffineSVError):
    """A standing assumption (e.g. chi(0) < 0 and chi(1) < 0) does not hold."""


class NoRoot(AffineSVError):
    """R(u, .) = 0 has no solution, i.e. u lies outside the interval I."""


class ParameterError(AffineSVError, ValueError):
    """Invalid model parameters."""


class StripError(AffineSVError, ValueError):
    """Fourier damping parameter outside the strip of finite moments."""


class BoundsError(AffineSVError, ValueError):
    """Option price outside the static no-arbitrage bounds."""


class SpecError(AffineSVError, ValueError):
    """Malformed JSON model description; ``field`` names the culprit."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"field '{field}': {message}")
