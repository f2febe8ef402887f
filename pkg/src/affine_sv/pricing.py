"""European option prices from the affine cgf, and Black-Scholes implied variance.

Prices use the damped payoff transform with ``S_0 = 1``: for a damping
parameter ``a`` inside the strip of finite moments,

    I(a) = (1/pi) int_0^inf Re[ exp(Phi(a + iv) + (1 - a - iv) xi) / ((a + iv)(a + iv - 1)) ] dv

equals the call price for ``a > 1``, the call price minus 1 for
``0 < a < 1`` and the put price for ``a < 0`` (residues at 0 and 1).
The strip (u_-(T), u_+(T)) comes from :mod:`affine_sv.explosion`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar
from scipy.special import erfcx, log_ndtr

from .affine_core import GeneratorPair
from .errors import BoundsError, StripError
from .explosion import PRIMARY, STATIONARY, critical_moments
from .jumps import INF
from .longterm import stationary_cgf
from .riccati import DEFAULT_CONFIG, SolverConfig, psi_phi

V_CAP = 500.0
_SQRT_HALF_PI = math.sqrt(math.pi / 2)


@dataclass(frozen=True)
class SmilePoint:
    T: float
    xi: float
    call_price: float
    implied_variance: float


@dataclass(frozen=True)
class ForwardSmilePoint:
    tau: float
    T: float
    xi: float
    price: float
    implied_volatility: float


# ---------------------------------------------------------------------------
# Black-Scholes
# ---------------------------------------------------------------------------


def _mills(x):
    return _SQRT_HALF_PI * erfcx(x / math.sqrt(2.0))


def _log_bs_otm(V, xi):
    """log of the out-of-the-money Black-Scholes price at total variance V (call for xi >= 0, put otherwise)."""
    s = math.sqrt(V)
    d1 = -xi / s + 0.5 * s
    d2 = d1 - s
    log_pdf = -0.5 * d1 * d1 - 0.5 * math.log(2 * math.pi)
    diff = _mills(-d1) - _mills(-d2) if xi >= 0 else _mills(d2) - _mills(d1)
    if diff <= 0:
        # Mills-ratio difference underflowed; fall back to normal cdfs
        if xi >= 0:
            a, b = log_ndtr(d1), xi + log_ndtr(d2)
        else:
            a, b = xi + log_ndtr(-d2), log_ndtr(-d1)
        if a <= b:
            return -INF
        return a + math.log1p(-math.exp(b - a))
    return log_pdf + math.log(diff)


def bs_call(V, xi):
    """Black-Scholes call price with S_0 = 1, total variance V, log-moneyness xi."""
    if V <= 0:
        return max(1.0 - math.exp(xi), 0.0)
    otm = math.exp(_log_bs_otm(V, xi))
    return otm if xi >= 0 else otm + 1.0 - math.exp(xi)


def implied_variance(price, T, xi, kind="call"):
    """Total implied Black-Scholes variance sigma^2 T reproducing ``price``.

    ``kind`` is "call", "put" or "otm" (call for xi >= 0, put for xi < 0).
    """
    if not T > 0:
        raise ValueError("T must be positive")
    ex = math.exp(xi)
    if kind == "call":
        lo, hi = max(1.0 - ex, 0.0), 1.0
        otm = price if xi >= 0 else price - (1.0 - ex)
    elif kind == "put":
        lo, hi = max(ex - 1.0, 0.0), ex
        otm = price if xi < 0 else price - (ex - 1.0)
    elif kind == "otm":
        lo, hi = 0.0, min(1.0, ex)
        otm = price
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if not (lo < price < hi) or not otm > 0:
        raise BoundsError(f"price {price!r} outside the no-arbitrage bounds ({lo!r}, {hi!r})")
    target = math.log(otm)
    f = lambda v: _log_bs_otm(v, xi) - target
    a, b = 1e-8, 1.0
    while f(a) > 0:
        a *= 1e-2
        if a < 1e-300:
            raise BoundsError("price too small to invert")
    while f(b) < 0:
        b *= 2.0
        if b > 1e6:
            raise BoundsError("price too close to the upper bound to invert")
    return brentq(f, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)


# ---------------------------------------------------------------------------
# Fourier pricing
# ---------------------------------------------------------------------------


def _model_cgf(g, T, V0, regime, cfg):
    if regime == PRIMARY:
        def phi(z):
            psi, ph = psi_phi(g, T, z, 0.0, cfg)
            return ph + V0 * psi
        return phi

    closed = g.closed_stationary_cgf(0.0) is not None

    def phi_s(z):
        psi, ph = psi_phi(g, T, z, 0.0, cfg)
        if not np.isfinite(psi):
            return INF
        l = g.closed_stationary_cgf(psi) if closed else stationary_cgf(g, psi)
        return ph + l
    return phi_s


def _real_log_integrand(cgf_fn, a, xi):
    c = cgf_fn(a)
    c = c.real if isinstance(c, complex) else c
    if not math.isfinite(c):
        return INF
    return c + (1.0 - a) * xi - math.log(abs(a * (a - 1.0)))


def _choose_damping(cgf_fn, xi, strip):
    lo, hi = strip
    if xi >= 0:
        a, b = 1.0, min(hi, 1.0 + 200.0)
    else:
        a, b = max(lo, -200.0), 0.0
    pad = 1e-6 * max(1.0, b - a)
    res = minimize_scalar(lambda x: _real_log_integrand(cgf_fn, x, xi), bounds=(a + pad, b - pad),
                          method="bounded", options={"xatol": 1e-6})
    return float(res.x)


def _inverse_transform(cgf_fn, a, xi):
    def envelope(v):
        z = complex(a, v)
        c = cgf_fn(z)
        if not np.isfinite(c):
            return INF
        return math.exp(c.real + (1 - a) * xi) / abs(z * (z - 1))

    def integrand(v):
        z = complex(a, v)
        c = cgf_fn(z)
        return (cmath.exp(c + (1 - z) * xi) / (z * (z - 1))).real

    e0 = envelope(0.0)
    v_max = 10.0
    while v_max < V_CAP and envelope(v_max) > 1e-17 * e0:
        v_max *= 2.0
    v_max = min(v_max, V_CAP)
    val, err = quad(integrand, 0.0, v_max, epsabs=1e-16 * e0, epsrel=1e-11, limit=2000)
    return val / math.pi, err / math.pi, envelope(v_max) * v_max / math.pi


@dataclass(frozen=True)
class PriceResult:
    call: float
    otm: float
    u_damp: float
    strip: tuple
    quad_error: float
    tail_bound: float


def price_details(g: GeneratorPair, T, xi, V0=None, u_damp=None, regime=PRIMARY,
                  cfg: SolverConfig = DEFAULT_CONFIG, strip=None) -> PriceResult:
    if not T > 0:
        raise ValueError("T must be positive")
    if regime == PRIMARY and not (V0 is not None and V0 > 0):
        raise ValueError("V0 must be positive")
    strip = strip or critical_moments(g, T, regime)
    cgf_fn = _model_cgf(g, T, V0, regime, cfg)
    if u_damp is None:
        u_damp = _choose_damping(cgf_fn, xi, strip)
    if not (strip[0] < u_damp < strip[1]) or u_damp in (0.0, 1.0):
        raise StripError(f"u_damp = {u_damp} outside the strip {strip} (or at a pole)")
    val, err, tail = _inverse_transform(cgf_fn, u_damp, xi)
    ex = math.exp(xi)
    if u_damp > 1:
        call = val
    elif u_damp > 0:
        call = val + 1.0
    else:
        call = val + 1.0 - ex
    otm = call if xi >= 0 else call - (1.0 - ex)
    if u_damp < 0 and xi < 0:
        otm = val
    elif u_damp > 1 and xi >= 0:
        otm = val
    return PriceResult(call, otm, u_damp, tuple(strip), err, tail)


def call_price(g: GeneratorPair, T, xi, V0, u_damp=None, cfg: SolverConfig = DEFAULT_CONFIG):
    """Price of (exp(X_T) - exp(xi))_+ with X_0 = 0 and variance V0."""
    return price_details(g, T, xi, V0, u_damp, PRIMARY, cfg).call


def stationary_call_price(g: GeneratorPair, T, xi, u_damp=None, cfg: SolverConfig = DEFAULT_CONFIG):
    """Call price in the stationary variance regime (cgf phi + l(psi))."""
    return price_details(g, T, xi, None, u_damp, STATIONARY, cfg).call


def smile(g: GeneratorPair, T, xis, V0=None, regime=PRIMARY, cfg: SolverConfig = DEFAULT_CONFIG):
    """Call prices and total implied variances on a log-moneyness grid."""
    strip = critical_moments(g, T, regime)
    out = []
    for xi in xis:
        r = price_details(g, T, float(xi), V0, None, regime, cfg, strip=strip)
        out.append(SmilePoint(T, float(xi), r.call, implied_variance(r.otm, T, float(xi), kind="otm")))
    return out


def forward_smile_limit(g: GeneratorPair, T, xis, cfg: SolverConfig = DEFAULT_CONFIG):
    """Forward-start smile in the limit of a distant start date (stationary regime)."""
    return [ForwardSmilePoint(INF, p.T, p.xi, p.call_price, math.sqrt(p.implied_variance / T))
            for p in smile(g, T, xis, None, STATIONARY, cfg)]
