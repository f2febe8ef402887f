"""Generalized Riccati equations psi' = R(u, psi), phi' = F(u, psi).

``solve_riccati`` integrates psi with an adaptive Dormand-Prince 5(4) scheme
and accumulates phi alongside it, using the compiled kernel when R is
quadratic in w and F is affine in w. Blow-up times are refined with the
implicit relation t = integral of d eta / R(u, eta).
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from . import kernels
from .affine_core import GeneratorPair
from .errors import ContractViolation, DomainError, SignChangeError
from .jumps import INF

COMPLETED = "completed"
BLEW_UP = "blew_up"
LEFT_DOMAIN = "left_domain"

_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-12, limit=1000)


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float | None = None  # None: 1 / max(1, |chi(u)|)
    blowup_threshold: float = 1e10
    domain_margin: float = 1e-9

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "blowup_threshold", "domain_margin"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_step is not None and not self.max_step > 0:
            raise ValueError("max_step must be positive")


DEFAULT_CONFIG = SolverConfig()


@dataclass
class RiccatiSolution:
    u: complex | float
    w0: complex | float
    times: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    status: str
    t_event: float | None = None
    n_steps: int = 0
    backend: str = ""
    config: SolverConfig = field(default=DEFAULT_CONFIG, repr=False)

    @property
    def grid(self):
        return list(zip(self.times.tolist(), self.psi.tolist(), self.phi.tolist()))

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED

    def at_end(self):
        """(psi, phi) at the last requested time; ``(inf, inf)`` if it was not reached."""
        if not self.completed:
            return INF, INF
        return self.psi[-1], self.phi[-1]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("t,psi,phi\n")
        for t, p, f in zip(self.times, self.psi, self.phi):
            out.write(f"{t:.17g},{_fmt(p)},{_fmt(f)}\n")
        tail = f"{self.t_event:.17g}" if self.t_event is not None else ""
        out.write(f"# status={self.status}{' t=' + tail if tail else ''}\n")
        return out.getvalue()


def _fmt(x):
    if isinstance(x, complex) or np.iscomplexobj(x):
        return f"{complex(x).real:.17g}{complex(x).imag:+.17g}j"
    return f"{float(x):.17g}"


def _is_complex(*xs):
    return any(isinstance(x, complex) or np.iscomplexobj(x) for x in xs)


def _max_step(g, u, cfg):
    if cfg.max_step is not None:
        return cfg.max_step
    try:
        c = g.chi(u.real if isinstance(u, complex) else u)
    except DomainError:
        return 1.0
    if not math.isfinite(c):
        return 1.0
    return 1.0 / max(1.0, abs(c))


def _cap(g, u):
    ur = u.real if isinstance(u, complex) else u
    return min(g.f_plus(ur), g.r_plus(ur))


def solve_riccati(g: GeneratorPair, u, w0, t_end, cfg: SolverConfig = DEFAULT_CONFIG, t_grid=None, n_out=101):
    """Integrate the Riccati pair from t = 0 to ``t_end``.

    Output is reported at ``t_grid`` if given (must start at 0 and increase),
    else on ``n_out`` equispaced points. Complex ``u``/``w0`` are allowed.
    """
    if t_grid is None:
        times = np.linspace(0.0, float(t_end), n_out) if t_end > 0 else np.array([0.0])
    else:
        times = np.asarray(t_grid, dtype=float)
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ValueError("t_grid must start at 0 and be strictly increasing")
    r_init = g.R(u, w0)
    if r_init != r_init:
        raise ContractViolation("R evaluated to NaN")
    if (r_init.real if isinstance(r_init, complex) else r_init) == INF:
        raise DomainError(f"R({u}, {w0}) = inf: immediate explosion (blew up at t = 0)")
    cplx = _is_complex(u, w0)
    h_max = _max_step(g, u, cfg)
    cap = _cap(g, u)
    w_cap = cap - cfg.domain_margin if cap < INF else INF
    coeffs = g.quadratic_coefficients(u)
    if coeffs is not None:
        if cplx:
            res = kernels.quad_solve_complex(*coeffs, w0, times, cfg.rel_tol, cfg.abs_tol, h_max, cfg.blowup_threshold)
        else:
            res = kernels.quad_solve_real(*coeffs, float(w0), times, cfg.rel_tol, cfg.abs_tol, h_max,
                                          cfg.blowup_threshold, w_cap)
        backend = kernels.BACKEND
    else:
        def rhs(p):
            return g.R(u, p), g.F(u, p)

        res = kernels.solve_generic(rhs, complex(w0) if cplx else float(w0), times, cfg.rel_tol, cfg.abs_tol,
                                    h_max, cfg.blowup_threshold, w_cap, cplx)
        backend = "python"
    psi_out, phi_out, k, code, t_stop, psi_stop, _, steps = res
    t_stop = float(t_stop)
    if code == kernels.COMPLETED:
        status, t_event = COMPLETED, None
    elif code == kernels.LEFT_DOMAIN:
        status, t_event = LEFT_DOMAIN, t_stop
    else:
        status = BLEW_UP
        t_event = t_stop
        if not cplx:
            t_event += _remaining_time(g, u, float(psi_stop), cap)
    return RiccatiSolution(u, w0, times[:k].copy(), psi_out[:k].copy(), phi_out[:k].copy(), status, t_event,
                           int(steps), backend, cfg)


def _remaining_time(g, u, psi, cap):
    """Time for psi to travel from ``psi`` to ``cap`` (0 if R is not positive there)."""
    r = g.R(u, psi)
    if not (math.isfinite(r) and r > 0) or psi >= cap:
        return 0.0
    try:
        return implicit_time_of_level(g, u, psi, cap)
    except SignChangeError:
        return 0.0


def cgf(g: GeneratorPair, t, u, w, X0=0.0, V0=1.0, cfg: SolverConfig = DEFAULT_CONFIG):
    """phi(t, u, w) + V0 psi(t, u, w) + X0 u, or +inf if the solution blew up before t."""
    if not V0 > 0:
        raise ValueError("V0 must be positive")
    if t == 0:
        return w * V0 + X0 * u
    try:
        sol = solve_riccati(g, u, w, t, cfg, t_grid=[0.0, t])
    except DomainError:
        return INF
    if not sol.completed:
        return INF
    return sol.phi[-1] + V0 * sol.psi[-1] + X0 * u


def psi_phi(g: GeneratorPair, t, u, w=0.0, cfg: SolverConfig = DEFAULT_CONFIG):
    """(psi(t, u, w), phi(t, u, w)); ``(inf, inf)`` after blow-up."""
    if t == 0:
        return w, 0.0 * w
    sol = solve_riccati(g, u, w, t, cfg, t_grid=[0.0, t])
    return sol.at_end()


def check_flow_property(g: GeneratorPair, u, w, t, s, cfg: SolverConfig = DEFAULT_CONFIG):
    """Residuals of phi(t+s) = phi(t) + phi(s, psi(t)) and psi(t+s) = psi(s, psi(t))."""
    psi_ts, phi_ts = psi_phi(g, t + s, u, w, cfg)
    psi_t, phi_t = psi_phi(g, t, u, w, cfg)
    psi_s, phi_s = psi_phi(g, s, u, psi_t, cfg)
    vals = (psi_ts, phi_ts, psi_t, phi_t, psi_s, phi_s)
    if any(not np.isfinite(v) for v in vals):
        raise DomainError("flow property needs finite solutions on both sides")
    return abs(phi_ts - phi_t - phi_s), abs(psi_ts - psi_s)


# ---------------------------------------------------------------------------
# implicit time integral
# ---------------------------------------------------------------------------


def _vertex(g, u, a, b):
    q = g.quadratic_coefficients(u)
    if q is not None and q[2] != 0:
        v = -q[1] / (2 * q[2])
        return v if a < v < b else None
    return None


def _sign_check(g, u, a, b):
    """Raise SignChangeError if R(u, .) changes sign or vanishes inside (a, b)."""
    if math.isinf(b):
        probes = np.tan(np.linspace(math.atan(a), math.pi / 2, 66)[1:-1])
    else:
        probes = np.linspace(a, b, 66)[1:-1]
    vals = np.array([g.R(u, x) for x in probes])
    fin = vals[np.isfinite(vals)]
    if fin.size == 0:
        return 1.0
    if np.any(fin == 0) or (fin.min() < 0 < fin.max()):
        raise SignChangeError(f"R({u}, .) changes sign on ({a}, {b})")
    sign = 1.0 if fin[0] > 0 else -1.0
    # convexity: a positive R may still dip below zero between probes
    if sign > 0:
        hi = b if math.isfinite(b) else probes[-1]
        v = _vertex(g, u, a, hi)
        if v is None:
            res = minimize_scalar(lambda x: g.R(u, x), bounds=(a, hi), method="bounded",
                                  options={"xatol": 1e-12 * max(1.0, abs(hi))})
            v, rv = res.x, res.fun
        else:
            rv = g.R(u, v)
        if rv <= 0 and a < v < b:
            raise SignChangeError(f"R({u}, .) vanishes near {v} inside ({a}, {b})")
    return sign


def implicit_time_of_level(g: GeneratorPair, u, w_from, w_to):
    """Integral of 1 / R(u, eta) from ``w_from`` to ``w_to`` (``w_to`` may be +inf)."""
    if w_from == w_to:
        return 0.0
    if w_to < w_from:
        return -implicit_time_of_level(g, u, w_to, w_from)
    a, b = float(w_from), float(w_to)
    _sign_check(g, u, a, b)
    if math.isinf(b):
        def f(s):
            x = math.tan(s)
            r = g.R(u, x)
            return (1.0 + x * x) / r

        lo = math.atan(a)
        v = _vertex(g, u, a, INF)
        pts = [math.atan(v)] if v is not None else None
        val, _ = quad(f, lo, math.pi / 2, points=pts, **_QUAD_OPTS)
        return val
    v = _vertex(g, u, a, b)
    val, _ = quad(lambda x: 1.0 / g.R(u, x), a, b, points=[v] if v is not None else None, **_QUAD_OPTS)
    return val
