"""Long-term behaviour: stable equilibria w(u), the rate h(u), intervals I and J,
conservativeness and martingale verdicts, convergence constants and the
invariant variance law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from .affine_core import GeneratorPair
from .errors import AssumptionError, NoRoot
from .jumps import INF

_BISECT_ITERS = 60
_ENDPOINT_TOL = 1e-8
_U_CAP = 1e6
_ZERO_TOL = 1e-12
_MARGINAL = 1e-5

CONSERVATIVE = "conservative"
NOT_CONSERVATIVE = "not_conservative"
MARTINGALE = "martingale"
NOT_MARTINGALE = "not_martingale"
INCONCLUSIVE = "inconclusive"


@dataclass
class Verdict:
    status: str
    reason: str
    evidence: list = field(default_factory=list)

    @property
    def holds(self):
        return self.status in (CONSERVATIVE, MARTINGALE)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __contains__(self, u):
        return self.lo <= u <= self.hi


@dataclass(frozen=True)
class ConvergenceBounds:
    X: float
    Omega: float
    C: float


@dataclass(frozen=True)
class Equilibria:
    stable: float
    unstable: float | None
    marginal: bool = False


# ---------------------------------------------------------------------------
# conservativeness / martingale property
# ---------------------------------------------------------------------------


def _is_zero(x):
    return abs(x) <= _ZERO_TOL


def _osgood(g, u, depth=12):
    """Partial integrals of 1/R(u, .) over [-1, -10^-k]; divergence means the Osgood condition holds."""
    parts = []
    for k in range(1, depth + 1):
        val, _ = quad(lambda x: 1.0 / g.R(u, x), -1.0, -(10.0 ** -k), limit=500)
        parts.append(val)
    incs = np.abs(np.diff(parts))
    if incs[-1] == 0 or incs[-1] < 1e-3 * incs[0] and incs[-1] / incs[-2] < 0.5:
        return "converges", parts
    ratio = incs[-1] / incs[-2]
    if ratio > 0.9:
        return "diverges", parts
    return "unclear", parts


def _slope_unbounded(g, u):
    """For numerically differentiated generators: do difference quotients of R(u, .) at 0- keep growing?"""
    if g.provenance != "callable":
        return False
    q = [(g.R(u, 0.0) - g.R(u, -h)) / h for h in (1e-4, 1e-6, 1e-8)]
    return abs(q[1]) > 3 * abs(q[0]) and abs(q[2]) > 3 * abs(q[1])


def _check_point(g, u, good, bad):
    f0, r0 = g.F(u, 0.0), g.R(u, 0.0)
    ev = [f"F({u},0) = {f0!r}", f"R({u},0) = {r0!r}"]
    if not (_is_zero(f0) and _is_zero(r0)):
        return Verdict(bad, f"F({u},0) and R({u},0) must both vanish", ev)
    c = g.chi(float(u))
    ev.append(f"chi({u}) = {c!r}")
    if math.isfinite(c) and not _slope_unbounded(g, u):
        return Verdict(good, f"chi({u}) < inf", ev)
    outcome, parts = _osgood(g, u)
    ev.append("partial integrals " + ", ".join(f"{p:.6g}" for p in parts))
    if outcome == "diverges":
        return Verdict(good, "Osgood integral diverges", ev)
    if outcome == "converges":
        return Verdict(bad, "Osgood integral converges", ev)
    return Verdict(INCONCLUSIVE, "divergence test undecided at configured depth", ev)


def conservativeness_check(g: GeneratorPair) -> Verdict:
    return _check_point(g, 0.0, CONSERVATIVE, NOT_CONSERVATIVE)


def martingale_check(g: GeneratorPair) -> Verdict:
    c = conservativeness_check(g)
    if c.status == INCONCLUSIVE:
        return Verdict(INCONCLUSIVE, "conservativeness undecided", c.evidence)
    if not c.holds:
        return Verdict(NOT_MARTINGALE, "not conservative: " + c.reason, c.evidence)
    return _check_point(g, 1.0, MARTINGALE, NOT_MARTINGALE)


# ---------------------------------------------------------------------------
# stable equilibrium w(u)
# ---------------------------------------------------------------------------


def _require_assumptions(g):
    c0, c1 = g.chi(0.0), g.chi(1.0)
    if not (c0 < 0 and c1 < 0):
        raise AssumptionError(f"need chi(0) < 0 and chi(1) < 0, got {c0!r}, {c1!r}")


def _inner_cap(g, u):
    r = g.r_plus(u)
    return r * (1 - 1e-12) if math.isfinite(r) else INF


def _min_on_right(g, u):
    """(argmin, min) of the convex map w -> R(u, w) on [0, r_+(u))."""
    cap = _inner_cap(g, u)
    q = g.quadratic_coefficients(u)
    if q is not None:
        r0, r1, r2 = q[:3]
        if r2 > 0:
            v = max(0.0, -r1 / (2 * r2))
            return v, g.R(u, v)
        if r1 < 0:
            return INF, -INF
        return 0.0, r0
    prev_w, prev_r = 0.0, g.R(u, 0.0)
    w = 1.0
    while True:
        if w >= cap:
            w = cap
        r = g.R(u, w)
        if r <= 0:
            return w, r
        if not math.isfinite(r) or r >= prev_r or w >= cap:
            break
        prev_w, prev_r = w, r
        w *= 2.0
        if w > 1e12:
            return w, r
    hi = w if math.isfinite(g.R(u, w)) else _finite_edge(g, u, prev_w, w)
    res = minimize_scalar(lambda x: g.R(u, x), bounds=(0.0, hi), method="bounded",
                          options={"xatol": 1e-13 * max(1.0, hi)})
    if res.fun < prev_r:
        return res.x, res.fun
    return prev_w, prev_r


def _finite_edge(g, u, lo, hi):
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if math.isfinite(g.R(u, mid)):
            lo = mid
        else:
            hi = mid
    return lo


def _root_in(g, u, a, b):
    return brentq(lambda x: g.R(u, x), a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def solve_w(g: GeneratorPair, u):
    """Stable root of R(u, .) = 0; raises NoRoot outside I."""
    _require_assumptions(g)
    return _solve_w(g, float(u))


def _solve_w(g, u):
    if u == 0.0 or u == 1.0:
        return 0.0
    r0 = g.R(u, 0.0)
    if not math.isfinite(r0):
        raise NoRoot(f"R({u}, 0) = inf")
    if r0 == 0.0:
        return 0.0
    if r0 < 0:
        lo = -1.0
        while g.R(u, lo) < 0:
            lo *= 2.0
            if lo < -1e15:
                raise NoRoot(f"no sign change of R({u}, .) below 0")
        return _root_in(g, u, lo, 0.0)
    v, rv = _min_on_right(g, u)
    if rv > 0:
        raise NoRoot(f"R({u}, .) > 0 on [0, r_+)")
    if v == INF:
        hi = 1.0
        while g.R(u, hi) > 0:
            hi *= 2.0
        v = hi
    if rv == 0.0:
        return v
    return _root_in(g, u, 0.0, v)


def _has_root(g, u):
    try:
        _solve_w(g, u)
        return True
    except NoRoot:
        return False


def _edge(pred, inside, outward):
    """Boundary of {pred} moving from ``inside`` in direction ``outward`` (+1/-1)."""
    step = 1.0
    lo = inside
    hi = inside + outward * step
    while pred(hi):
        lo = hi
        step *= 2.0
        hi = inside + outward * step
        if abs(hi) > _U_CAP:
            return outward * INF
    for _ in range(200):
        if abs(hi - lo) <= _ENDPOINT_TOL * 1e-3:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def compute_interval_I(g: GeneratorPair) -> Interval:
    _require_assumptions(g)
    pred = lambda u: _has_root(g, u)
    return Interval(_edge(pred, 0.0, -1), _edge(pred, 1.0, +1))


def _h_finite(g, u):
    try:
        w = _solve_w(g, u)
    except NoRoot:
        return False
    return math.isfinite(g.F(u, w))


def compute_J(g: GeneratorPair, I: Interval | None = None) -> Interval:
    _require_assumptions(g)
    I = I or compute_interval_I(g)

    def pred(u):
        return I.lo <= u <= I.hi and _h_finite(g, u)

    lo = I.lo if math.isfinite(I.lo) and pred(I.lo) else _edge(pred, 0.0, -1)
    hi = I.hi if math.isfinite(I.hi) and pred(I.hi) else _edge(pred, 1.0, +1)
    return Interval(lo, hi)


def compute_h(g: GeneratorPair, u):
    w = solve_w(g, u)
    return g.F(float(u), w)


def classify_equilibria(g: GeneratorPair, u) -> Equilibria:
    w = solve_w(g, u)
    u = float(u)
    d = g.dR_dw(u, w)
    # near a tangency dR/dw ~ sqrt(disc); below this level the two roots are
    # closer than double precision can separate (u within ~1e-10 of an I endpoint)
    c = g.chi(u)
    marginal = abs(d) <= _MARGINAL * max(1.0, abs(c) if math.isfinite(c) else 1.0)
    q = g.quadratic_coefficients(u)
    if q is not None:
        r0, r1, r2 = q[:3]
        if r2 == 0:
            return Equilibria(w, None, marginal)
        disc = r1 * r1 - 4 * r2 * r0
        other = (-r1 + math.sqrt(max(disc, 0.0))) / (2 * r2)
        return Equilibria(w, other if other > w and not marginal else None, marginal)
    cap = _inner_cap(g, u)
    # beyond the minimum of the convex R(u, .) a second root may exist
    lo = w + max(1e-6, 1e-6 * abs(w))
    x = max(lo, 1.0)
    while True:
        if x >= cap:
            return Equilibria(w, None, marginal)
        r = g.R(u, x)
        if not math.isfinite(r):
            return Equilibria(w, None, marginal)
        if r > 0:
            break
        x *= 2.0
        if x > 1e12:
            return Equilibria(w, None, marginal)
    if g.R(u, lo) >= 0:
        return Equilibria(w, None, marginal)
    return Equilibria(w, _root_in(g, u, lo, x), marginal)


# ---------------------------------------------------------------------------
# convergence constants
# ---------------------------------------------------------------------------


def convergence_bounds(g: GeneratorPair) -> ConvergenceBounds:
    _require_assumptions(g)
    X = min(abs(g.chi(0.0)), abs(g.chi(1.0)))
    grid = np.linspace(0.0, 1.0, 101)
    vals = np.array([g.dF_dw(u, 0.0) for u in grid])
    k = int(np.argmax(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, 100)]
    res = minimize_scalar(lambda u: -g.dF_dw(u, 0.0), bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    omega = max(vals[k], -res.fun)
    res = minimize_scalar(lambda u: _solve_w(g, u), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    C = max(abs(res.fun), max(abs(_solve_w(g, u)) for u in grid))
    return ConvergenceBounds(X, float(omega), float(C))


# ---------------------------------------------------------------------------
# invariant law of the variance
# ---------------------------------------------------------------------------

_NEAR_ZERO = 1e-7


def _ratio(g, eta, limit):
    if abs(eta) < _NEAR_ZERO:
        return limit
    return g.F(0.0, eta) / g.R(0.0, eta)


def _stationary_upper(g):
    """min(unstable root of R(0, .), f_+(0), r_+(0))."""
    try:
        un = classify_equilibria(g, 0.0).unstable
    except NoRoot:
        un = None
    return min(un if un is not None else INF, g.f_plus(0.0), g.r_plus(0.0))


def stationary_cgf(g: GeneratorPair, w):
    """l(w) = integral from w to 0 of F(0, eta) / R(0, eta); complex w allowed."""
    c0 = g.chi(0.0)
    if not c0 < 0:
        raise AssumptionError(f"stationary law needs chi(0) < 0, got {c0!r}")
    if w == 0:
        return 0.0
    limit = g.dF_dw(0.0, 0.0) / c0
    if isinstance(w, complex):
        if w.imag == 0:
            w = w.real
        else:
            return _segment_integral(g, w, limit)
    if w > 0 and w >= l_plus(g):
        return INF
    val, _ = quad(lambda x: _ratio(g, x, limit), w, 0.0, epsabs=0.0, epsrel=1e-13, limit=1000)
    return val


def _segment_integral(g, w, limit):
    def f(s):
        eta = s * w
        return _ratio(g, eta, limit) * w

    re, _ = quad(lambda s: f(s).real, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=500)
    im, _ = quad(lambda s: f(s).imag, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=500)
    return -complex(re, im)


def l_plus(g: GeneratorPair):
    """sup{w > 0 : l(w) < inf}; closed form where the model provides one."""
    c0 = g.chi(0.0)
    if not c0 < 0:
        raise AssumptionError(f"stationary law needs chi(0) < 0, got {c0!r}")
    closed = getattr(g, "l_plus_closed", None)
    if closed is not None:
        return closed()
    return _stationary_upper(g)


@dataclass
class LongTermProfile:
    I: Interval
    J: Interval
    w: callable
    h: callable
    unstable: callable


def long_term_profile(g: GeneratorPair) -> LongTermProfile:
    I = compute_interval_I(g)
    J = compute_J(g, I)
    return LongTermProfile(I, J, lambda u: solve_w(g, u), lambda u: compute_h(g, u),
                           lambda u: classify_equilibria(g, u).unstable)


@dataclass
class StationaryLaw:
    l: callable
    l_plus: float


def stationary_law(g: GeneratorPair) -> StationaryLaw:
    return StationaryLaw(lambda w: stationary_cgf(g, w), l_plus(g))


__all__ = [
    "Verdict", "Interval", "ConvergenceBounds", "Equilibria", "LongTermProfile", "StationaryLaw",
    "conservativeness_check", "martingale_check", "solve_w", "compute_interval_I", "compute_J",
    "compute_h", "classify_equilibria", "convergence_bounds", "stationary_cgf", "l_plus",
    "long_term_profile", "stationary_law",
]
