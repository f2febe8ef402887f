import math

import numpy as np
import pytest

import oracles
from affine_sv import models, pricing
from affine_sv.errors import BoundsError, StripError
from affine_sv.explosion import critical_moments

HP = models.FIG_HESTON
ARGS = (HP.lam, HP.theta, HP.zeta, HP.rho)
V0 = 0.04


def _stationary_cf(T):
    shape, rate = 2 * HP.lam * HP.theta / HP.zeta**2, 2 * HP.lam / HP.zeta**2

    def cf(z):
        b = HP.lam - HP.rho * HP.zeta * z
        d = np.sqrt(b * b - HP.zeta**2 * (z * z - z))
        g = (b - d) / (b + d)
        e = np.exp(-d * T)
        psi = (b - d) / HP.zeta**2 * (1 - e) / (1 - g * e)
        phi = HP.lam * HP.theta / HP.zeta**2 * ((b - d) * T - 2 * np.log((1 - g * e) / (1 - g)))
        return np.exp(phi - shape * np.log(1 - psi / rate))

    return cf


@pytest.mark.parametrize("T, xi", [(0.5, 0.0), (1.0, 0.0), (1.0, -0.2), (1.0, 0.3), (3.0, 0.5)])
def test_heston_call_against_gil_pelaez(heston, T, xi):
    cf = lambda z: oracles.heston_cf(*ARGS, T, V0, z)
    ref = oracles.gil_pelaez_call(cf, xi)
    assert pricing.call_price(heston, T, xi, V0) == pytest.approx(ref, abs=1e-6)


@pytest.mark.parametrize("T, xi", [(1.0, 0.0), (2.0, -0.3)])
def test_stationary_call_against_gil_pelaez(heston, T, xi):
    ref = oracles.gil_pelaez_call(_stationary_cf(T), xi)
    assert pricing.stationary_call_price(heston, T, xi) == pytest.approx(ref, abs=1e-6)


@pytest.mark.parametrize("a", [-2.0, -0.5, 0.5, 1.5, 4.0])
def test_price_independent_of_damping(heston, a):
    ref = pricing.call_price(heston, 1.0, 0.1, V0)
    assert pricing.call_price(heston, 1.0, 0.1, V0, u_damp=a) == pytest.approx(ref, abs=1e-9)


def test_damping_outside_strip(heston):
    lo, hi = critical_moments(heston, 1.0)
    for a in (lo - 1.0, hi + 1.0, 0.0, 1.0):
        with pytest.raises(StripError):
            pricing.call_price(heston, 1.0, 0.0, V0, u_damp=a)


def test_bad_inputs(heston):
    with pytest.raises(ValueError):
        pricing.call_price(heston, -1.0, 0.0, V0)
    with pytest.raises(ValueError):
        pricing.call_price(heston, 1.0, 0.0, 0.0)


def _bs_otm(V, xi):
    # direct OTM formula: call for xi >= 0, put N(-d2) e^xi - N(-d1) otherwise
    from scipy.stats import norm
    s = math.sqrt(V)
    d1 = -xi / s + s / 2
    if xi >= 0:
        return oracles.bs_call(V, xi)
    return math.exp(xi) * norm.cdf(-(d1 - s)) - norm.cdf(-d1)


@pytest.mark.parametrize("V", [3e-3, 0.01, 0.04, 0.3, 2.0])
@pytest.mark.parametrize("xi", [-1.0, -0.1, 0.0, 0.2, 1.5])
def test_black_scholes_round_trip(V, xi):
    c = oracles.bs_call(V, xi)
    assert pricing.bs_call(V, xi) == pytest.approx(c, rel=1e-10, abs=1e-15)
    otm = _bs_otm(V, xi)
    assert pricing.implied_variance(otm, 1.0, xi, kind="otm") == pytest.approx(V, rel=1e-8)


@pytest.mark.parametrize("V, xi", [(0.04, -0.1), (0.3, 0.2), (2.0, -1.0)])
def test_call_and_put_inversion(V, xi):
    c = oracles.bs_call(V, xi)
    assert pricing.implied_variance(c, 1.0, xi) == pytest.approx(V, rel=1e-8)
    assert pricing.implied_variance(c - (1 - math.exp(xi)), 1.0, xi, kind="put") == pytest.approx(V, rel=1e-8)


def test_implied_variance_far_wing():
    # the OTM price is tiny; the log-space evaluation keeps full relative accuracy
    V, xi = 0.04, 1.5
    otm = pricing.bs_call(V, xi)
    assert otm < 1e-12
    assert pricing.implied_variance(otm, 1.0, xi, kind="otm") == pytest.approx(V, rel=1e-8)


def test_implied_variance_bounds():
    with pytest.raises(BoundsError):
        pricing.implied_variance(1.2, 1.0, 0.0)
    with pytest.raises(BoundsError):
        pricing.implied_variance(-0.1, 1.0, 0.0)
    with pytest.raises(BoundsError):
        pricing.implied_variance(0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        pricing.implied_variance(0.1, 1.0, 0.0, kind="straddle")


def test_call_monotone_convex_and_bounded(heston):
    xis = np.linspace(-0.6, 0.6, 13)
    c = np.array([pricing.call_price(heston, 1.0, x, V0) for x in xis])
    k = np.exp(xis)
    assert np.all(np.diff(c) < 0)
    # convex in strike K = e^xi
    slopes = np.diff(c) / np.diff(k)
    assert np.all(np.diff(slopes) > 0)
    assert np.all(c >= np.maximum(1 - k, 0)) and np.all(c <= 1)


def test_wing_limits(heston):
    assert pricing.call_price(heston, 1.0, -6.0, V0) == pytest.approx(1 - math.exp(-6.0), abs=1e-9)
    assert pricing.call_price(heston, 1.0, 3.0, V0) < 1e-8


def test_stationary_smile_short_maturity_is_mixture():
    # at small T the stationary price tends to E[C_BS(V T)] with V ~ Gamma
    g = models.preset("heston")
    T, xi = 0.01, 0.0
    shape, rate = 2 * HP.lam * HP.theta / HP.zeta**2, 2 * HP.lam / HP.zeta**2
    from scipy.integrate import quad
    from scipy.stats import gamma
    mix, _ = quad(lambda v: oracles.bs_call(v * T, xi) * gamma.pdf(v, shape, scale=1 / rate), 0, np.inf,
                  limit=200)
    assert pricing.stationary_call_price(g, T, xi) == pytest.approx(mix, rel=2e-2)


def test_smile_points(heston):
    pts = pricing.smile(heston, 1.0, [-0.3, 0.0, 0.3], V0=V0)
    for p in pts:
        assert p.call_price == pytest.approx(pricing.call_price(heston, 1.0, p.xi, V0), abs=1e-12)
        assert pricing.bs_call(p.implied_variance, p.xi) == pytest.approx(p.call_price, abs=1e-10)
    # negative correlation gives a downward-sloping smile
    assert pts[0].implied_variance > pts[1].implied_variance > pts[2].implied_variance


def test_forward_smile_limit(heston):
    pts = pricing.forward_smile_limit(heston, 1.0, [0.0])
    sp = pricing.smile(heston, 1.0, [0.0], regime="stationary")[0]
    assert pts[0].implied_volatility == pytest.approx(math.sqrt(sp.implied_variance), rel=1e-12)
    assert pts[0].tau == math.inf


@pytest.mark.parametrize("name", ["heston_jumps", "bates", "bns"])
def test_put_call_parity_other_models(name):
    g = models.preset(name)
    v0 = 0.04
    lo, hi = critical_moments(g, 1.0)
    c_hi = pricing.call_price(g, 1.0, 0.1, v0, u_damp=min(1.5, 0.5 * (1 + hi)))
    c_lo = pricing.call_price(g, 1.0, 0.1, v0, u_damp=max(-0.5, 0.5 * lo))
    assert c_hi == pytest.approx(c_lo, abs=1e-9)
