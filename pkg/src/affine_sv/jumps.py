"""Jump measures with closed-form cumulant generating functions.

Marks live on D = R x R_{>=0}: ``x`` is the log-price jump, ``y`` the
variance jump. A :class:`CompoundPoisson` measure is ``intensity`` times
the law of the mark. Every mark law exposes

* ``mgf(u, w)``            E[exp(uX + wY)], ``inf`` outside its domain
* ``dmgf_dw(u, w)``        E[Y exp(uX + wY)]
* ``w_boundary(u)``        sup{w : mgf(u, w) < inf}
* ``trunc_x``, ``trunc_y`` E[X/(1+X^2)], E[Y/(1+Y^2)]

All of them accept complex ``u``/``w``; finiteness is decided on real parts.
"""
from __future__ import annotations

import math
from functools import cached_property
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import NonConvergentIntegral, ParameterError

INF = math.inf


def _real(z) -> float:
    return z.real if isinstance(z, complex) else float(z)


def _expect(fn, density, lo, hi) -> float:
    val, _ = quad(lambda s: fn(s) * density(s), lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


class MarkLaw:
    """Distribution of a jump mark (X, Y) on D."""

    y_dependent = False
    log_moment = True

    def mgf(self, u, w=0.0):
        raise NotImplementedError

    def dmgf_dw(self, u, w=0.0):
        return 0.0

    def w_boundary(self, u) -> float:
        return INF if math.isfinite(_real(self.mgf(u, 0.0))) else -INF

    def x_bounds(self) -> tuple[float, float]:
        """Interval (k_minus, k_plus) of u where mgf(u, 0) is finite."""
        return -INF, INF

    def supported_on_D(self) -> bool:
        return True

    @property
    def trunc_x(self) -> float:
        return 0.0

    @property
    def trunc_y(self) -> float:
        return 0.0

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ExponentialMarks(MarkLaw):
    """One-sided exponential price jumps ``X = sign * E`` with ``E ~ Exp(rate)``.

    The mean absolute jump size is ``1/rate``; downward jumps (``sign=-1``)
    give ``k_minus = -rate``.
    """

    rate: float
    sign: int = -1

    def __post_init__(self):
        if not self.rate > 0:
            raise ParameterError("rate must be positive")
        if self.sign not in (-1, 1):
            raise ParameterError("sign must be +1 or -1")

    def mgf(self, u, w=0.0):
        den = self.rate - self.sign * u
        if _real(den) <= 0:
            return INF
        return self.rate / den

    def x_bounds(self):
        return (-self.rate, INF) if self.sign < 0 else (-INF, self.rate)

    @cached_property
    def trunc_x(self):
        return self.sign * _expect(lambda e: e / (1 + e * e), lambda e: self.rate * math.exp(-self.rate * e), 0, INF)

    def to_json(self):
        return {"family": "exponential", "rate": self.rate, "sign": self.sign}


@dataclass(frozen=True)
class DoubleExponentialMarks(MarkLaw):
    """Asymmetric Laplace price jumps (Kou marks)."""

    p_up: float
    eta_up: float
    eta_down: float

    def __post_init__(self):
        if not (0 <= self.p_up <= 1 and self.eta_up > 0 and self.eta_down > 0):
            raise ParameterError("need 0 <= p_up <= 1 and positive rates")

    def mgf(self, u, w=0.0):
        ur = _real(u)
        if ur >= self.eta_up and self.p_up > 0 or ur <= -self.eta_down and self.p_up < 1:
            return INF
        return self.p_up * self.eta_up / (self.eta_up - u) + (1 - self.p_up) * self.eta_down / (self.eta_down + u)

    def x_bounds(self):
        lo = -self.eta_down if self.p_up < 1 else -INF
        hi = self.eta_up if self.p_up > 0 else INF
        return lo, hi

    @cached_property
    def trunc_x(self):
        g = lambda e: e / (1 + e * e)
        up = _expect(g, lambda e: self.eta_up * math.exp(-self.eta_up * e), 0, INF)
        down = _expect(g, lambda e: self.eta_down * math.exp(-self.eta_down * e), 0, INF)
        return self.p_up * up - (1 - self.p_up) * down

    def to_json(self):
        return {"family": "double_exponential", "p_up": self.p_up, "eta_up": self.eta_up, "eta_down": self.eta_down}


@dataclass(frozen=True)
class GaussianMarks(MarkLaw):
    """Normal price jumps, as in the Bates model."""

    mean: float
    std: float

    def __post_init__(self):
        if not self.std >= 0:
            raise ParameterError("std must be nonnegative")

    def mgf(self, u, w=0.0):
        e = self.mean * u + 0.5 * self.std**2 * u * u
        if _real(e) > 709.0:
            return INF
        return np.exp(e) if isinstance(e, complex) else math.exp(e)

    @cached_property
    def trunc_x(self):
        if self.std == 0:
            return self.mean / (1 + self.mean**2)
        s, m = self.std, self.mean
        dens = lambda x: math.exp(-0.5 * ((x - m) / s) ** 2) / (s * math.sqrt(2 * math.pi))
        return _expect(lambda x: x / (1 + x * x), dens, -INF, INF)

    def to_json(self):
        return {"family": "gaussian", "mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class PointMark(MarkLaw):
    """Deterministic mark (x, y)."""

    x: float = 0.0
    y: float = 0.0

    @property
    def y_dependent(self):
        return self.y != 0.0

    def mgf(self, u, w=0.0):
        e = self.x * u + self.y * w
        if _real(e) > 709.0:
            return INF
        return np.exp(e) if isinstance(e, complex) else math.exp(e)

    def dmgf_dw(self, u, w=0.0):
        m = self.mgf(u, w)
        return self.y * m if self.y != 0.0 else 0.0

    def w_boundary(self, u):
        return INF

    def supported_on_D(self):
        return self.y >= 0

    @cached_property
    def trunc_x(self):
        return self.x / (1 + self.x**2)

    @cached_property
    def trunc_y(self):
        return self.y / (1 + self.y**2)

    def to_json(self):
        return {"family": "point", "x": self.x, "y": self.y}


@dataclass(frozen=True)
class CoupledExponentialMarks(MarkLaw):
    """Variance jump ``Y ~ Exp(rate)`` with simultaneous price jump ``X = slope * Y``.

    This is the mark law of a BNS model with a Gamma-OU variance process.
    """

    rate: float
    slope: float = 0.0
    y_dependent = True

    def __post_init__(self):
        if not self.rate > 0:
            raise ParameterError("rate must be positive")

    def mgf(self, u, w=0.0):
        den = self.rate - (w + self.slope * u)
        if _real(den) <= 0:
            return INF
        return self.rate / den

    def dmgf_dw(self, u, w=0.0):
        den = self.rate - (w + self.slope * u)
        if _real(den) <= 0:
            return INF
        return self.rate / (den * den)

    def w_boundary(self, u):
        return self.rate - self.slope * _real(u)

    def x_bounds(self):
        if self.slope == 0:
            return -INF, INF
        b = self.rate / self.slope
        return (b, INF) if self.slope < 0 else (-INF, b)

    @cached_property
    def trunc_x(self):
        dens = lambda y: self.rate * math.exp(-self.rate * y)
        return _expect(lambda y: self.slope * y / (1 + (self.slope * y) ** 2), dens, 0, INF)

    @cached_property
    def trunc_y(self):
        dens = lambda y: self.rate * math.exp(-self.rate * y)
        return _expect(lambda y: y / (1 + y * y), dens, 0, INF)

    def to_json(self):
        return {"family": "coupled_exponential", "rate": self.rate, "slope": self.slope}


class JumpMeasureSpec:
    """Common interface of jump measures: the one-dimensional price-jump exponent.

    ``kappa(u)`` is the (uncompensated) cumulant exponent of the price jumps,
    ``compensated(u) = kappa(u) - u * kappa(1)``.
    """

    kappa_minus: float = -INF
    kappa_plus: float = INF
    log_moment = True

    def kappa(self, u):
        raise NotImplementedError

    def compensated(self, u):
        k = self.kappa(u)
        if _real(k) == INF:
            return INF
        return k - u * self.kappa(1.0)

    def dkappa(self, u):
        h = 1e-6 * max(1.0, abs(u))
        return (self.kappa(u + h) - self.kappa(u - h)) / (2 * h)


@dataclass(frozen=True)
class CompoundPoisson(JumpMeasureSpec):
    """Finite jump measure ``intensity * law(marks)``."""

    intensity: float
    marks: MarkLaw

    def __post_init__(self):
        if not self.intensity >= 0:
            raise ParameterError("intensity must be nonnegative")

    @property
    def kappa_minus(self):
        return self.marks.x_bounds()[0]

    @property
    def kappa_plus(self):
        return self.marks.x_bounds()[1]

    @property
    def y_dependent(self):
        return self.marks.y_dependent

    def kappa(self, u):
        m = self.marks.mgf(u, 0.0)
        if _real(m) == INF:
            return INF
        return self.intensity * (m - 1.0)

    def dkappa(self, u):
        h = 1e-6 * max(1.0, abs(u))
        return (self.kappa(u + h) - self.kappa(u - h)) / (2 * h)

    def to_json(self):
        return {"intensity": self.intensity, **self.marks.to_json()}


@dataclass(frozen=True)
class AnalyticCgf(JumpMeasureSpec):
    """Escape hatch: a user supplied exponent ``kappa`` with declared domain.

    ``kappa`` must be finite on (kappa_minus, kappa_plus) and is treated as
    ``+inf`` outside. A NaN return value is reported as
    :class:`~affine_sv.errors.NonConvergentIntegral`.
    """

    fn: Callable[[float], float]
    kappa_minus: float = -INF
    kappa_plus: float = INF
    derivative: Callable[[float], float] | None = None
    log_moment: bool = True
    name: str = field(default="analytic")

    def __post_init__(self):
        if not self.kappa_minus <= 0 <= self.kappa_plus:
            raise ParameterError("need kappa_minus <= 0 <= kappa_plus")

    y_dependent = False

    def kappa(self, u):
        ur = _real(u)
        if ur <= self.kappa_minus or ur >= self.kappa_plus:
            return INF
        v = self.fn(u)
        if v != v:
            raise NonConvergentIntegral(f"{self.name}: kappa({u!r}) returned NaN")
        return v

    def dkappa(self, u):
        if self.derivative is not None:
            return self.derivative(u)
        return super().dkappa(u)

    def to_json(self):
        raise TypeError("AnalyticCgf wraps a Python callable and cannot be serialized")
