"""Closed-form model presets: Heston, Heston with jumps, Bates and BNS.

Each preset is a :class:`~affine_sv.affine_core.GeneratorPair` with analytic
F, R, chi and domain boundaries, plus closed forms for w(u), h(u), the
explosion times and critical moments. The closed forms double as oracles
for the numerical pipeline, so they are written out independently of it.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .affine_core import AdmissibleParameterSet, GeneratorPair
from .errors import DomainError, ParameterError
from .jumps import (
    INF,
    CompoundPoisson,
    CoupledExponentialMarks,
    ExponentialMarks,
    GaussianMarks,
    JumpMeasureSpec,
    _real,
)


def _finite(z) -> bool:
    return math.isfinite(_real(z))


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HestonParams:
    lam: float
    theta: float
    zeta: float
    rho: float

    def __post_init__(self):
        if not (self.lam > 0 and self.theta > 0 and self.zeta > 0):
            raise ParameterError("lam, theta and zeta must be positive")
        if not -1.0 <= self.rho <= 1.0:
            raise ParameterError("rho must lie in [-1, 1]")

    def to_json(self):
        return {"lambda": self.lam, "theta": self.theta, "zeta": self.zeta, "rho": self.rho}


@dataclass(frozen=True)
class HestonJumpParams:
    """Heston variance with an independent state-independent price-jump part."""

    heston: HestonParams
    jumps: JumpMeasureSpec

    def __post_init__(self):
        if not isinstance(self.jumps, JumpMeasureSpec):
            raise ParameterError("jumps must be a JumpMeasureSpec")
        if isinstance(self.jumps, CompoundPoisson) and self.jumps.y_dependent:
            raise ParameterError("price jumps must not move the variance")

    @classmethod
    def exponential(cls, heston, intensity, mean_size):
        """Downward exponential jumps with mean absolute size ``mean_size`` (kappa_- = -1/mean_size)."""
        if not mean_size > 0:
            raise ParameterError("mean_size must be positive")
        return cls(heston, CompoundPoisson(intensity, ExponentialMarks(1.0 / mean_size, -1)))

    @property
    def kappa_minus(self):
        return self.jumps.kappa_minus


@dataclass(frozen=True)
class BatesParams:
    """Heston variance with price jumps arriving at rate proportional to V."""

    heston: HestonParams
    jumps: JumpMeasureSpec

    def __post_init__(self):
        if not isinstance(self.jumps, JumpMeasureSpec):
            raise ParameterError("jumps must be a JumpMeasureSpec")
        if isinstance(self.jumps, CompoundPoisson) and self.jumps.y_dependent:
            raise ParameterError("price jumps must not move the variance")


@dataclass(frozen=True)
class BNSParams:
    """BNS model; ``subordinator`` is the background driving Levy process J.

    ``subordinator.kappa`` is the cgf of J_1 and ``kappa_plus`` its upper
    domain boundary. With ``CompoundPoisson(c, ExponentialMarks(b, +1))`` the
    variance is a Gamma-OU process with stationary law Gamma(c, b).
    """

    lam: float
    rho: float
    subordinator: JumpMeasureSpec

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError("lam must be positive")
        if not self.rho < 0:
            raise ParameterError("rho must be negative")
        s = self.subordinator
        if isinstance(s, CompoundPoisson):
            if s.y_dependent or not s.kappa_minus == -INF:
                raise ParameterError("subordinator must have nonnegative jumps in the price coordinate")
            if isinstance(s.marks, ExponentialMarks) and s.marks.sign != 1:
                raise ParameterError("subordinator jumps must be upward")
        elif not isinstance(s, JumpMeasureSpec):
            raise ParameterError("subordinator must be a JumpMeasureSpec")

    @property
    def kappa_plus(self):
        return self.subordinator.kappa_plus


def gamma_subordinator(shape, rate):
    """Compound Poisson subordinator whose OU process has stationary law Gamma(shape, rate)."""
    return CompoundPoisson(shape, ExponentialMarks(rate, 1))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


class _HestonFamily(GeneratorPair):
    """Shared closed forms for models whose R is the Heston quadratic plus kR(u).

    Subclasses supply ``_kF(u)`` and ``_kR(u)``: compensated jump exponents
    entering F and R respectively (0 for plain Heston).
    """

    provenance = "closed_form"

    def __init__(self, hp: HestonParams, name):
        self.hp = hp
        self.name = name

    def _kF(self, u):
        return 0.0

    def _kR(self, u):
        return 0.0

    def F(self, u, w):
        k = self._kF(u)
        if not _finite(k):
            return INF
        return self.hp.lam * self.hp.theta * w + k

    def R(self, u, w):
        k = self._kR(u)
        if not _finite(k):
            return INF
        p = self.hp
        return 0.5 * (u * u - u) + 0.5 * p.zeta**2 * w * w - p.lam * w + u * w * p.rho * p.zeta + k

    def dR_dw(self, u, w):
        if not _finite(self._kR(u)):
            return INF
        p = self.hp
        return p.zeta**2 * w - p.lam + u * p.rho * p.zeta

    def dF_dw(self, u, w):
        if not _finite(self._kF(u)):
            return INF
        return self.hp.lam * self.hp.theta

    def chi(self, u):
        if not _finite(self._kR(u)):
            raise DomainError(f"chi({u}) undefined: R({u}, 0) = inf")
        return self.hp.rho * self.hp.zeta * u - self.hp.lam

    def f_plus(self, u):
        return INF if _finite(self._kF(u)) else 0.0

    def r_plus(self, u):
        return INF if _finite(self._kR(u)) else 0.0

    def quadratic_coefficients(self, u):
        kf, kr = self._kF(u), self._kR(u)
        if not (_finite(kf) and _finite(kr)):
            return None
        p = self.hp
        return 0.5 * (u * u - u) + kr, p.rho * p.zeta * u - p.lam, 0.5 * p.zeta**2, kf, p.lam * p.theta

    def l_plus_closed(self):
        return 2.0 * self.hp.lam / self.hp.zeta**2

    def closed_stationary_cgf(self, w):
        return heston_stationary_l(self.hp, w)

    # closed forms shared by the family
    def delta(self, u):
        """chi(u)^2 - zeta^2 (u^2 - u + 2 kR(u)); ``-inf`` where the jump exponent is infinite."""
        k = self._kR(u)
        if not _finite(k):
            return -INF
        p = self.hp
        c = p.rho * p.zeta * u - p.lam
        return c * c - p.zeta**2 * (u * u - u + 2.0 * k)


class HestonGenerator(_HestonFamily):
    def __init__(self, hp: HestonParams, name="heston"):
        super().__init__(hp, name)

    def parameters(self) -> AdmissibleParameterSet:
        p = self.hp
        return AdmissibleParameterSet(
            alpha=((1.0, p.rho * p.zeta), (p.rho * p.zeta, p.zeta**2)),
            b=(0.0, p.lam * p.theta),
            beta=(-0.5, -p.lam),
        )


class HestonJumpGenerator(_HestonFamily):
    def __init__(self, params: HestonJumpParams, name="heston_jumps"):
        super().__init__(params.heston, name)
        self.params = params

    def _kF(self, u):
        return self.params.jumps.compensated(u)

    def parameters(self) -> AdmissibleParameterSet:
        p, j = self.hp, self.params.jumps
        if not isinstance(j, CompoundPoisson):
            raise ParameterError("only compound Poisson jumps have a parameter embedding")
        return AdmissibleParameterSet(
            alpha=((1.0, p.rho * p.zeta), (p.rho * p.zeta, p.zeta**2)),
            b=(j.intensity * j.marks.trunc_x - j.kappa(1.0), p.lam * p.theta),
            beta=(-0.5, -p.lam),
            m=j,
        )

    def jump_free(self) -> HestonGenerator:
        return HestonGenerator(self.hp)


class BatesGenerator(_HestonFamily):
    def __init__(self, params: BatesParams, name="bates"):
        super().__init__(params.heston, name)
        self.params = params

    def _kR(self, u):
        return self.params.jumps.compensated(u)

    def parameters(self) -> AdmissibleParameterSet:
        p, j = self.hp, self.params.jumps
        if not isinstance(j, CompoundPoisson):
            raise ParameterError("only compound Poisson jumps have a parameter embedding")
        return AdmissibleParameterSet(
            alpha=((1.0, p.rho * p.zeta), (p.rho * p.zeta, p.zeta**2)),
            b=(0.0, p.lam * p.theta),
            beta=(-0.5 + j.intensity * j.marks.trunc_x - j.kappa(1.0), -p.lam),
            mu=j,
        )


class BNSGenerator(GeneratorPair):
    provenance = "closed_form"

    def __init__(self, params: BNSParams, name="bns"):
        self.params = params
        self.name = name

    def _kappa(self, z):
        return self.params.subordinator.kappa(z)

    def F(self, u, w):
        p = self.params
        k = self._kappa(w + p.rho * u)
        if not _finite(k):
            return INF
        return p.lam * k - u * p.lam * self._kappa(p.rho)

    def R(self, u, w):
        return 0.5 * (u * u - u) - self.params.lam * w

    def dR_dw(self, u, w):
        return -self.params.lam

    def dF_dw(self, u, w):
        p = self.params
        z = w + p.rho * u
        if not _finite(self._kappa(z)):
            return INF
        return p.lam * p.subordinator.dkappa(z)

    def chi(self, u):
        return -self.params.lam

    def f_plus(self, u):
        return max(self.params.kappa_plus - self.params.rho * _real(u), 0.0)

    def r_plus(self, u):
        return INF

    def l_plus_closed(self):
        return self.params.kappa_plus

    def closed_stationary_cgf(self, w):
        s = self.params.subordinator
        if isinstance(s, CompoundPoisson) and isinstance(s.marks, ExponentialMarks):
            if _real(w) >= s.marks.rate:
                return INF
            return -s.intensity * cmath.log(1 - w / s.marks.rate) if isinstance(w, complex) \
                else -s.intensity * math.log1p(-w / s.marks.rate)
        return None

    def parameters(self) -> AdmissibleParameterSet:
        p, s = self.params, self.params.subordinator
        if not (isinstance(s, CompoundPoisson) and isinstance(s.marks, ExponentialMarks)):
            raise ParameterError("parameter embedding needs exponential subordinator jumps")
        m = CompoundPoisson(p.lam * s.intensity, CoupledExponentialMarks(s.marks.rate, p.rho))
        return AdmissibleParameterSet(
            alpha=((1.0, 0.0), (0.0, 0.0)),
            b=(m.intensity * m.marks.trunc_x - p.lam * s.kappa(p.rho), 0.0),
            beta=(-0.5, -p.lam),
            m=m,
        )


def heston_generator(p: HestonParams) -> HestonGenerator:
    return HestonGenerator(p)


def heston_jump_generator(p: HestonJumpParams) -> HestonJumpGenerator:
    return HestonJumpGenerator(p)


def bates_generator(p: BatesParams) -> BatesGenerator:
    return BatesGenerator(p)


def bns_generator(p: BNSParams) -> BNSGenerator:
    return BNSGenerator(p)


# ---------------------------------------------------------------------------
# Heston-family closed forms
# ---------------------------------------------------------------------------


def _hp(p):
    return p.heston if isinstance(p, (HestonJumpParams, BatesParams)) else p


def heston_delta(p: HestonParams, u):
    c = p.rho * p.zeta * u - p.lam
    return c * c - p.zeta**2 * (u * u - u)


def heston_closed_w(p: HestonParams, u):
    """Stable equilibrium (lam - u rho zeta - sqrt(Delta)) / zeta^2."""
    p = _hp(p)
    d = heston_delta(p, u)
    if d < 0:
        raise DomainError(f"Delta({u}) = {d} < 0: u outside I")
    return (p.lam - u * p.rho * p.zeta - math.sqrt(d)) / p.zeta**2


def heston_closed_w_unstable(p: HestonParams, u):
    p = _hp(p)
    d = heston_delta(p, u)
    if d < 0:
        raise DomainError(f"Delta({u}) = {d} < 0: u outside I")
    return (p.lam - u * p.rho * p.zeta + math.sqrt(d)) / p.zeta**2


def heston_closed_h(p: HestonParams, u):
    p = _hp(p)
    return p.lam * p.theta * heston_closed_w(p, u)


def heston_excluded_case(p: HestonParams, u) -> bool:
    """True when chi(u) > 0 and Delta(u) > 0 with u outside [0, 1].

    Both roots of R(u, .) are then negative and psi(t, u, 0) explodes even
    though Delta >= 0; this requires chi(1) >= 0.
    """
    p = _hp(p)
    c = p.rho * p.zeta * u - p.lam
    return (u < 0 or u > 1) and c > 0 and heston_delta(p, u) > 0


def _arctan_branch(d, c):
    s = math.sqrt(-d)
    return 2.0 / s * (math.atan(s / c) + (math.pi if c < 0 else 0.0)) if c != 0 else math.pi / s


def heston_closed_Tstar(p: HestonParams, u):
    """Explosion time: +inf if Delta >= 0, else the arctan formula.

    In the excluded case (see :func:`heston_excluded_case`) the finite
    logarithmic value (1/sqrt(Delta)) log((chi + sqrt(Delta)) / (chi - sqrt(Delta)))
    is returned instead of +inf.
    """
    p = _hp(p)
    d = heston_delta(p, u)
    c = p.rho * p.zeta * u - p.lam
    if d >= 0:
        if heston_excluded_case(p, u):
            s = math.sqrt(d)
            return math.log((c + s) / (c - s)) / s
        return INF
    return _arctan_branch(d, c)


def bates_delta(p: BatesParams, u):
    k = p.jumps.compensated(u)
    if not _finite(k):
        return -INF
    h = p.heston
    c = h.rho * h.zeta * u - h.lam
    return c * c - h.zeta**2 * (u * u - u + 2.0 * k)


def bates_closed_w(p: BatesParams, u):
    d = bates_delta(p, u)
    if d < 0:
        raise DomainError(f"Delta({u}) < 0: u outside I")
    h = p.heston
    return (h.lam - u * h.rho * h.zeta - math.sqrt(d)) / h.zeta**2


def bates_closed_h(p: BatesParams, u):
    return p.heston.lam * p.heston.theta * bates_closed_w(p, u)


def bates_closed_Tstar(p: BatesParams, u):
    d = bates_delta(p, u)
    if d == -INF:
        return 0.0
    if d > 0:
        return INF
    if d == 0:
        # tangency: the quadrature diverges logarithmically
        return INF
    h = p.heston
    return _arctan_branch(d, h.rho * h.zeta * u - h.lam)


def heston_jump_closed_Tstar(p: HestonJumpParams, u):
    if u <= p.jumps.kappa_minus or not _finite(p.jumps.kappa(u)):
        return 0.0
    return heston_closed_Tstar(p.heston, u)


# stationary regime -----------------------------------------------------------


def heston_stationary_l(p: HestonParams, w):
    """Gamma cumulant function -(2 lam theta / zeta^2) log(1 - zeta^2 w / (2 lam))."""
    p = _hp(p)
    if _real(w) >= 2 * p.lam / p.zeta**2:
        return INF
    x = p.zeta**2 * w / (2 * p.lam)
    k = -2 * p.lam * p.theta / p.zeta**2
    return k * (cmath.log(1 - x) if isinstance(x, complex) else math.log1p(-x))


def heston_chi_plus(p: HestonParams, u):
    return p.rho * p.zeta * u + p.lam


def heston_stationary_closed_Tstar(p: HestonParams, u):
    """Stationary explosion time: integral of 1/R(u, .) over [0, 2 lam / zeta^2]."""
    p = _hp(p)
    if p.rho * p.zeta - p.lam >= 0:
        raise ParameterError("stationary closed form needs chi(1) < 0")
    d = heston_delta(p, u)
    c = p.rho * p.zeta * u - p.lam
    cp = heston_chi_plus(p, u)
    lam = p.lam
    if d > 0:
        s = math.sqrt(d)
        if s >= -cp:
            return INF
        return math.log(abs((cp * c + 2 * lam * s - d) / (cp * c - 2 * lam * s - d))) / s
    if d == 0:
        # equal roots at -chi / zeta^2; finite only if the double root lies beyond l_+
        if -c > 2 * lam or c > 0:
            return _heston_stationary_double_root(p, u)
        return INF
    s = math.sqrt(-d)
    den = cp * c - d
    if den == 0:
        return math.pi / s
    return 2.0 / s * (math.atan(2 * lam * s / den) + (math.pi if den < 0 else 0.0))


def _heston_stationary_double_root(p: HestonParams, u):
    # R = (zeta^2 / 2)(w - w0)^2 with w0 outside [0, l_+]
    c = p.rho * p.zeta * u - p.lam
    w0 = -c / p.zeta**2
    lp = 2 * p.lam / p.zeta**2
    k = 2 / p.zeta**2
    return k * (1.0 / (w0 - lp) - 1.0 / w0)


def heston_stationary_closed(p: HestonParams):
    """(l, l_plus, T*^S) closed forms for the Heston model."""
    p = _hp(p)
    if p.rho * p.zeta - p.lam >= 0:
        raise ParameterError("stationary regime needs chi(1) < 0")
    return (
        lambda w: heston_stationary_l(p, w),
        2 * p.lam / p.zeta**2,
        lambda u: heston_stationary_closed_Tstar(p, u),
    )


# ---------------------------------------------------------------------------
# BNS closed forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BNSClosedForms:
    params: BNSParams

    def w(self, u):
        return (u * u - u) / (2 * self.params.lam)

    def h(self, u):
        p = self.params
        k = p.subordinator.kappa(u * u / (2 * p.lam) + u * (p.rho - 1 / (2 * p.lam)))
        if not _finite(k):
            return INF
        return p.lam * k - u * p.lam * p.subordinator.kappa(p.rho)

    def f_plus(self, u):
        return max(self.params.kappa_plus - self.params.rho * u, 0.0)

    def _log_formula(self, u, k):
        if k == INF:
            return INF
        uu = u * (u - 1)
        if uu <= 0:
            return INF
        arg = 1 - 2 * self.params.lam * k / uu
        if arg <= 0:
            return INF
        return -math.log(arg) / self.params.lam

    def Tstar(self, u):
        p = self.params
        if not _finite(p.subordinator.kappa(p.rho * u)):
            return 0.0
        return self._log_formula(u, self.f_plus(u))

    def u_pm(self, t):
        p = self.params
        kp = p.kappa_plus
        if kp == INF:
            return -INF, INF
        e = -math.expm1(-p.lam * t) if t != INF else 1.0
        a = 0.5 - p.rho * p.lam / e
        r = math.sqrt(0.25 + (2 * kp - p.rho) * p.lam / e + (p.rho * p.lam / e) ** 2)
        return a - r, a + r

    def l(self, w):
        p = self.params
        closed = BNSGenerator(p).closed_stationary_cgf(w)
        if closed is not None:
            return closed
        raise ParameterError("closed-form l only for exponential subordinator jumps")

    @property
    def l_plus(self):
        return self.params.kappa_plus

    def _k_stationary(self, u):
        kp = self.params.kappa_plus
        if u >= 1:
            return kp
        return max(kp - self.params.rho * u, 0.0)

    def Tstar_S(self, u):
        p = self.params
        if not _finite(p.subordinator.kappa(p.rho * u)):
            return 0.0
        return self._log_formula(u, self._k_stationary(u))

    def u_pm_stationary(self, T):
        p = self.params
        kp = p.kappa_plus
        if kp == INF:
            return -INF, INF
        e = -math.expm1(-p.lam * T) if T != INF else 1.0
        lo = self.u_pm(T)[0]
        hi = 0.5 + math.sqrt(0.25 + 2 * kp * p.lam / e)
        return lo, hi


def bns_closed(p: BNSParams) -> BNSClosedForms:
    return BNSClosedForms(p)


# ---------------------------------------------------------------------------
# classical Heston characteristic solution (oracle for the Riccati engine)
# ---------------------------------------------------------------------------


def heston_riccati_closed(p: HestonParams, t, u, w0=0.0):
    """(psi, phi) of the classical Heston solution; complex u allowed.

    Written in the 'stable' form with the root of smaller real part so no
    branch switching of the logarithm occurs for moderate t.
    """
    p = _hp(p)
    z2 = p.zeta**2
    c = p.rho * p.zeta * u - p.lam
    d = cmath.sqrt(c * c - z2 * (u * u - u))
    wm, wp = (-c - d) / z2, (-c + d) / z2
    e = cmath.exp(-d * t)
    g0 = (w0 - wm) / (w0 - wp)
    psi = (wm - wp * g0 * e) / (1 - g0 * e)
    phi = p.lam * p.theta * (wm * t - 2 / z2 * cmath.log((1 - g0 * e) / (1 - g0)))
    if isinstance(u, complex) or isinstance(w0, complex):
        return psi, phi
    return psi.real, phi.real


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

# Calibrated Heston parameters used throughout the examples and figures.
FIG_HESTON = HestonParams(lam=1.3253, theta=0.0354, zeta=0.3877, rho=-0.7165)
# Downward exponential jumps of mean size 0.1 (kappa_- = -10), intensity 0.1.
FIG_JUMPS = HestonJumpParams.exponential(FIG_HESTON, intensity=0.1, mean_size=0.1)
# Bates: Gaussian jumps arriving at rate 2 V_t.
DEFAULT_BATES = BatesParams(FIG_HESTON, CompoundPoisson(2.0, GaussianMarks(-0.05, 0.1)))
# BNS with Gamma(1, 25) stationary variance (mean 0.04).
DEFAULT_BNS = BNSParams(lam=0.6, rho=-0.4, subordinator=gamma_subordinator(1.0, 25.0))

PRESETS = {
    "heston": lambda: HestonGenerator(FIG_HESTON),
    "heston_jumps": lambda: HestonJumpGenerator(FIG_JUMPS),
    "bates": lambda: BatesGenerator(DEFAULT_BATES),
    "bns": lambda: BNSGenerator(DEFAULT_BNS),
}


def preset(name: str) -> GeneratorPair:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
