"""Moment explosion times, critical moments and Lee wing slopes."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .affine_core import GeneratorPair
from .errors import DomainError, NoRoot
from .jumps import INF
from .longterm import _require_assumptions, _solve_w, l_plus
from .riccati import implicit_time_of_level

PRIMARY = "primary"
STATIONARY = "stationary"

_U_CAP = 1e6


@dataclass(frozen=True)
class ExplosionTime:
    value: float
    branch: str  # "a" (no explosion), "b" (quadrature) or "c" (immediate)


@dataclass(frozen=True)
class ExplosionProfile:
    u: float
    T_star: float
    T_star_S: float
    branch: str
    branch_S: str


@dataclass(frozen=True)
class WingSlopes:
    T: float
    u_minus: float
    u_plus: float
    left_slope: float
    right_slope: float


def _infinite(x):
    return not math.isfinite(x)


def _immediate(g, u, chi_at):
    if _infinite(g.F(u, 0.0)) or _infinite(g.R(u, 0.0)):
        return True
    for v in chi_at:
        try:
            if _infinite(g.chi(v)):
                return True
        except DomainError:
            return True
    return False


def _stable_root(g, u):
    """w(u) and whether u lies in J; (None, False) outside I."""
    try:
        w = _solve_w(g, u)
    except NoRoot:
        return None, False
    return w, math.isfinite(g.F(u, w))


def explosion_time(g: GeneratorPair, u) -> ExplosionTime:
    """T*(u): 0 if F(u,0), R(u,0) or chi(u) is infinite, +inf on J, else the 1/R quadrature."""
    u = float(u)
    _require_assumptions(g)
    if _immediate(g, u, (u,)):
        return ExplosionTime(0.0, "c")
    _, in_J = _stable_root(g, u)
    if in_J:
        return ExplosionTime(INF, "a")
    cap = min(g.f_plus(u), g.r_plus(u))
    return ExplosionTime(implicit_time_of_level(g, u, 0.0, cap), "b")


def explosion_time_stationary(g: GeneratorPair, u) -> ExplosionTime:
    """T*^S(u): as T*(u) with the quadrature capped at l_+ and case (a) requiring w(u) <= l_+."""
    u = float(u)
    _require_assumptions(g)
    lp = l_plus(g)
    # chi(0) is the stated condition; chi(u) = inf also precludes a local solution
    if _immediate(g, u, (0.0, u)):
        return ExplosionTime(0.0, "c")
    w, in_J = _stable_root(g, u)
    if in_J and w <= lp:
        return ExplosionTime(INF, "a")
    cap = min(g.f_plus(u), g.r_plus(u), lp)
    return ExplosionTime(implicit_time_of_level(g, u, 0.0, cap), "b")


def explosion_profile(g: GeneratorPair, u) -> ExplosionProfile:
    a = explosion_time(g, u)
    s = explosion_time_stationary(g, u)
    return ExplosionProfile(float(u), a.value, s.value, a.branch, s.branch)


def _tstar_fn(g, regime):
    if regime == PRIMARY:
        return lambda u: explosion_time(g, u).value
    if regime == STATIONARY:
        return lambda u: explosion_time_stationary(g, u).value
    raise ValueError(f"unknown regime {regime!r}")


def _generalized_inverse(tstar, T, inside, outward):
    """Boundary of {u : T*(u) > T} moving outward from ``inside``.

    Bisection runs to adjacent doubles (well inside the 1e-12 relative
    target) and returns the outer end, so a boundary where T* drops to 0,
    such as kappa_- for a jump model, is reported exactly.
    """
    lo = inside
    step = 1.0
    hi = inside + outward * step
    while tstar(hi) > T:
        lo = hi
        step *= 2.0
        hi = inside + outward * step
        if abs(hi) > _U_CAP:
            return outward * INF
    while True:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if tstar(mid) > T:
            lo = mid
        else:
            hi = mid
    return hi


def critical_moments(g: GeneratorPair, T, regime=PRIMARY):
    """(u_-(T), u_+(T)): generalized inverses of T* on (-inf, 0] and [1, inf)."""
    if not T > 0:
        raise ValueError("T must be positive")
    f = _tstar_fn(g, regime)
    return _generalized_inverse(f, T, 0.0, -1), _generalized_inverse(f, T, 1.0, +1)


def varsigma(x):
    """2 - 4 (sqrt(x^2 + x) - x), with varsigma(inf) = 0."""
    if x == INF:
        return 0.0
    if x < 0:
        raise DomainError("varsigma is defined for x >= 0")
    if x == 0:
        return 2.0
    return 2.0 - 4.0 * x / (math.sqrt(x * x + x) + x)


def lee_slopes(g: GeneratorPair, T, regime=PRIMARY) -> WingSlopes:
    lo, hi = critical_moments(g, T, regime)
    return WingSlopes(T, lo, hi, varsigma(-lo), varsigma(hi - 1.0))


def cutoff_time(g: GeneratorPair):
    """T# = T*(kappa_-) of the jump-free counterpart; +inf when kappa_- = -inf."""
    params = getattr(g, "params", None)
    jumps = getattr(params, "jumps", None)
    if jumps is None or not hasattr(g, "jump_free"):
        raise DomainError("cutoff time needs a model with a state-independent jump part")
    km = jumps.kappa_minus
    if km == -INF:
        return INF
    return explosion_time(g.jump_free(), km).value


__all__ = [
    "ExplosionTime", "ExplosionProfile", "WingSlopes", "explosion_time", "explosion_time_stationary",
    "explosion_profile", "critical_moments", "varsigma", "lee_slopes", "cutoff_time",
]
