"""Independent reference computations used by the test suite.

Nothing here calls into the package's solvers: each oracle is a separate
route to the same number (different formula, different integrator, or
higher precision).
"""
import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.stats import norm

mp.mp.dps = 30


def heston_psi_phi_mp(lam, theta, zeta, rho, t, u):
    """Classical Heston solution with psi(0) = 0, in 30-digit arithmetic.

    Uses the rotation-count-free form with g = (b - d) / (b + d) and
    exp(-d t), so the principal square root and logarithm stay continuous.
    """
    u, t = mp.mpmathify(u), mp.mpf(t)
    b = lam - rho * zeta * u
    d = mp.sqrt(b * b - zeta**2 * (u * u - u))
    g = (b - d) / (b + d)
    e = mp.exp(-d * t)
    psi = (b - d) / zeta**2 * (1 - e) / (1 - g * e)
    phi = lam * theta / zeta**2 * ((b - d) * t - 2 * mp.log((1 - g * e) / (1 - g)))
    if mp.im(u) == 0:
        return float(mp.re(psi)), float(mp.re(phi))
    return complex(psi), complex(phi)


def heston_psi_phi_taylor(lam, theta, zeta, rho, t, u):
    """Same quantities from mpmath's Taylor-series ODE integrator."""
    def rhs(s, y):
        psi = y[0]
        return [0.5 * (u * u - u) + 0.5 * zeta**2 * psi**2 - lam * psi + rho * zeta * u * psi, lam * theta * psi]

    sol = mp.odefun(rhs, 0, [mp.mpf(0), mp.mpf(0)])
    psi, phi = sol(t)
    return float(psi), float(phi)


def heston_cf(lam, theta, zeta, rho, t, v0, z):
    """E[exp(z X_t)] for complex z (numpy, little-trap form)."""
    b = lam - rho * zeta * z
    d = np.sqrt(b * b - zeta**2 * (z * z - z))
    g = (b - d) / (b + d)
    e = np.exp(-d * t)
    psi = (b - d) / zeta**2 * (1 - e) / (1 - g * e)
    phi = lam * theta / zeta**2 * ((b - d) * t - 2 * np.log((1 - g * e) / (1 - g)))
    return np.exp(phi + v0 * psi)


def gil_pelaez_call(cf, xi, v_max=400.0):
    """Call price with S_0 = 1 from the two-probability (Gil-Pelaez) formula.

    ``cf(z)`` is E[exp(z X_T)]; P1 uses the share measure cf(1 + iv).
    """
    def p(shift):
        def f(v):
            return (np.exp(-1j * v * xi) * cf(shift + 1j * v) / (1j * v)).real
        val, _ = quad(f, 1e-12, v_max, limit=4000, epsabs=1e-14, epsrel=1e-13)
        return 0.5 + val / math.pi

    return p(1.0) - math.exp(xi) * p(0.0)


def bs_call(total_var, xi):
    s = math.sqrt(total_var)
    d1 = -xi / s + s / 2
    return norm.cdf(d1) - math.exp(xi) * norm.cdf(d1 - s)


def gamma_cumulant(lam, theta, zeta, w):
    """Cumulant function of Gamma(2 lam theta / zeta^2, 2 lam / zeta^2)."""
    shape, rate = 2 * lam * theta / zeta**2, 2 * lam / zeta**2
    return -shape * math.log1p(-w / rate)


def ode_blowup_time(R, u, t_max=50.0, level=1e7):
    """Blow-up time of psi' = R(u, psi), psi(0) = 0, by a stiff ODE solve plus the analytic tail.

    The remaining time from ``level`` to infinity is approximated by
    integrating 1 / R over [level, inf) with scipy's quad.
    """
    def event(t, y):
        return y[0] - level

    event.terminal = True
    sol = solve_ivp(lambda t, y: [R(u, y[0])], (0.0, t_max), [0.0], method="Radau", rtol=1e-11, atol=1e-12,
                    events=event)
    if not sol.t_events[0].size:
        return math.inf
    tail, _ = quad(lambda x: 1.0 / R(u, x), level, math.inf)
    return float(sol.t_events[0][0]) + tail


def compound_poisson_kappa(intensity, density, lo, hi, u, compensate=True):
    """intensity * int (e^{ux} - 1) f(x) dx - u * intensity * int (e^x - 1) f(x) dx over [lo, hi] by quadrature."""
    def integral(k):
        val, _ = quad(lambda x: (math.exp(k * x) - 1.0) * density(x), lo, hi, limit=500)
        return val

    out = intensity * integral(u)
    if compensate:
        out -= u * intensity * integral(1.0)
    return out
