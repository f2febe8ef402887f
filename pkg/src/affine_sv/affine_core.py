"""Affine stochastic volatility models through their generator functions F and R.

A model is represented by a :class:`GeneratorPair`, an object that evaluates
F(u, w) and R(u, w) as extended reals (``math.inf`` outside the effective
domain) together with the derived quantities chi(u), f_+(u), r_+(u).

Two routes produce generators:

* :class:`ParametricGenerator` evaluates the Levy-Khintchine form from an
  :class:`AdmissibleParameterSet`;
* the closed-form presets in :mod:`affine_sv.models`.

Truncation convention (fixed): ``omega_F(x, y) = (x/(1+x^2), 0)`` and
``omega_R(x, y) = (x/(1+x^2), y/(1+y^2))``. Any other truncation only shifts
the drift vectors b and beta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DomainError
from .jumps import INF, AnalyticCgf, CompoundPoisson, JumpMeasureSpec

# Finiteness bisection for domain boundaries.
_BRACKET_START = 1.0
_BRACKET_CAP = 1e12
_BOUNDARY_RTOL = 1e-10


def _is_inf(x) -> bool:
    return (x.real if isinstance(x, complex) else x) == INF


def _check(value, what):
    if value != value:
        raise ContractViolation(f"{what} evaluated to NaN")
    return value


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleParameterSet:
    """The tuple (a, alpha, b, beta, c, gamma, m, mu) of an affine model.

    ``a`` and ``alpha`` are 2x2 matrices (nested sequences), ``b`` and
    ``beta`` 2-vectors; ``m`` (state-independent) and ``mu``
    (state-proportional) are jump measures or ``None``.
    """

    a: tuple = ((0.0, 0.0), (0.0, 0.0))
    alpha: tuple = ((0.0, 0.0), (0.0, 0.0))
    b: tuple = (0.0, 0.0)
    beta: tuple = (0.0, 0.0)
    c: float = 0.0
    gamma: float = 0.0
    m: JumpMeasureSpec | None = None
    mu: JumpMeasureSpec | None = None

    def __post_init__(self):
        for name in ("a", "alpha"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (2, 2):
                raise ValueError(f"{name} must be 2x2, got shape {arr.shape}")
            object.__setattr__(self, name, tuple(map(tuple, arr.tolist())))
        for name in ("b", "beta"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (2,):
                raise ValueError(f"{name} must have length 2")
            object.__setattr__(self, name, tuple(arr.tolist()))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "gamma", float(self.gamma))


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)  # (name, passed, detail)

    def add(self, name, passed, detail=""):
        self.checks.append((name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self):
        return [name for name, ok, _ in self.checks if not ok]

    def lines(self):
        return [f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({d})" if d else "") for name, ok, d in self.checks]


def _psd(mat, tol=1e-12):
    arr = np.asarray(mat, dtype=float)
    if not np.allclose(arr, arr.T, atol=tol, rtol=0):
        return False, "not symmetric"
    ev = np.linalg.eigvalsh(arr)
    return bool(ev.min() >= -tol * max(1.0, abs(ev).max())), f"eigenvalues {ev.min():.6g}, {ev.max():.6g}"


def _jump_checks(report, name, jm):
    if jm is None:
        report.add(f"{name} is a Levy measure on D", True, "no jumps")
        return
    if isinstance(jm, CompoundPoisson):
        report.add(f"{name} intensity >= 0", jm.intensity >= 0)
        report.add(f"{name} is a Levy measure on D", jm.marks.supported_on_D(), "finite measure")
        if name == "m":
            report.add("m integrates (x^2 + y) ^ 1", True, "finite measure")
    elif isinstance(jm, AnalyticCgf):
        report.add(f"{name} is a Levy measure on D", True, "declared by analytic cgf")
        if name == "m":
            report.add("m integrates (x^2 + y) ^ 1", True, "declared by analytic cgf")
    else:
        report.add(f"{name} is a Levy measure on D", False, f"unsupported jump spec {type(jm).__name__}")


def validate_admissibility(p: AdmissibleParameterSet) -> ValidationReport:
    """Check the admissibility conditions; every condition gets one line."""
    rep = ValidationReport()
    ok, detail = _psd(p.a)
    rep.add("a positive semi-definite", ok, detail)
    a = p.a
    rep.add("a12 = a21 = a22 = 0", a[0][1] == 0 and a[1][0] == 0 and a[1][1] == 0)
    ok, detail = _psd(p.alpha)
    rep.add("alpha positive semi-definite", ok, detail)
    rep.add("b in D (b2 >= 0)", p.b[1] >= 0, f"b2 = {p.b[1]:.17g}")
    rep.add("c >= 0", p.c >= 0, f"c = {p.c:.17g}")
    rep.add("gamma >= 0", p.gamma >= 0, f"gamma = {p.gamma:.17g}")
    _jump_checks(rep, "m", p.m)
    _jump_checks(rep, "mu", p.mu)
    return rep


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


class GeneratorPair:
    """Extended-real generator functions F, R of an affine model.

    Subclasses implement :meth:`F` and :meth:`R`; derivative and domain
    methods have numerical defaults that subclasses override with analytic
    expressions where available.
    """

    provenance = "callable"
    name = "generator"

    def F(self, u, w):
        raise NotImplementedError

    def R(self, u, w):
        raise NotImplementedError

    # derivatives ---------------------------------------------------------
    def dR_dw(self, u, w):
        return _one_sided_derivative(lambda x: self.R(u, x), w)

    def dF_dw(self, u, w):
        return _one_sided_derivative(lambda x: self.F(u, x), w)

    def chi(self, u):
        if _is_inf(self.R(u, 0.0)):
            raise DomainError(f"chi({u}) undefined: R({u}, 0) = inf")
        return self.dR_dw(u, 0.0)

    # domains -------------------------------------------------------------
    def f_plus(self, u):
        return _finiteness_boundary(lambda w: self.F(u, w))

    def r_plus(self, u):
        return _finiteness_boundary(lambda w: self.R(u, w))

    # fast path -----------------------------------------------------------
    def quadratic_coefficients(self, u):
        """Return (r0, r1, r2, f0, f1) if R = r0 + r1 w + r2 w^2 and F = f0 + f1 w, else None."""
        return None

    # optional closed forms used by pricing in the stationary regime
    def closed_stationary_cgf(self, w):
        return None

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class CallableGenerator(GeneratorPair):
    """Wrap two plain callables ``F(u, w)`` and ``R(u, w)``."""

    def __init__(self, F, R, name="callable"):
        self._F, self._R, self.name = F, R, name

    def F(self, u, w):
        return self._F(u, w)

    def R(self, u, w):
        return self._R(u, w)


def _one_sided_derivative(fn, w):
    """Left difference quotient with Richardson extrapolation (second order)."""
    h = 1e-6 * max(1.0, abs(w))
    f0 = fn(w)
    if _is_inf(f0):
        return INF
    d1 = (f0 - fn(w - h)) / h
    d2 = (f0 - fn(w - h / 2)) / (h / 2)
    return 2 * d2 - d1


def _finiteness_boundary(fn):
    """sup{w >= 0 : fn(w) < inf} by geometric bracketing plus bisection."""
    if _is_inf(fn(0.0)):
        return 0.0
    lo, hi = 0.0, _BRACKET_START
    while not _is_inf(fn(hi)):
        lo, hi = hi, 2.0 * hi
        if hi > _BRACKET_CAP:
            return INF
    for _ in range(200):
        if hi - lo <= _BOUNDARY_RTOL * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if _is_inf(fn(mid)):
            hi = mid
        else:
            lo = mid
    return lo


class ParametricGenerator(GeneratorPair):
    """F and R evaluated from admissible parameters via the Levy-Khintchine form."""

    provenance = "parameters"

    def __init__(self, params: AdmissibleParameterSet, name="parameters"):
        self.params = params
        self.name = name
        a, al = params.a, params.alpha
        self._a = (a[0][0], a[0][1] + a[1][0], a[1][1])
        self._al = (al[0][0], al[0][1] + al[1][0], al[1][1])
        self._m_trunc = self._truncations(params.m)
        self._mu_trunc = self._truncations(params.mu)

    @staticmethod
    def _truncations(jm):
        if isinstance(jm, CompoundPoisson):
            return jm.marks.trunc_x, jm.marks.trunc_y
        return 0.0, 0.0

    @staticmethod
    def _jump_term(jm, trunc, u, w, use_y):
        if jm is None:
            return 0.0
        if isinstance(jm, CompoundPoisson):
            mg = jm.marks.mgf(u, w)
            if _is_inf(mg):
                return INF
            comp = u * trunc[0] + (w * trunc[1] if use_y else 0.0)
            return jm.intensity * (mg - 1.0 - comp)
        return jm.kappa(u)

    def F(self, u, w):
        p = self.params
        a11, a12, a22 = self._a
        j = self._jump_term(p.m, self._m_trunc, u, w, use_y=False)
        if _is_inf(j):
            return INF
        val = 0.5 * (a11 * u * u + a12 * u * w + a22 * w * w) + p.b[0] * u + p.b[1] * w - p.c + j
        return _check(val, "F")

    def R(self, u, w):
        p = self.params
        a11, a12, a22 = self._al
        j = self._jump_term(p.mu, self._mu_trunc, u, w, use_y=True)
        if _is_inf(j):
            return INF
        val = 0.5 * (a11 * u * u + a12 * u * w + a22 * w * w) + p.beta[0] * u + p.beta[1] * w - p.gamma + j
        return _check(val, "R")

    def dR_dw(self, u, w):
        p = self.params
        _, a12, a22 = self._al
        d = 0.5 * a12 * u + a22 * w + p.beta[1]
        if isinstance(p.mu, CompoundPoisson) and p.mu.y_dependent:
            dm = p.mu.marks.dmgf_dw(u, w)
            if _is_inf(dm):
                return INF
            d += p.mu.intensity * (dm - self._mu_trunc[1])
        elif _is_inf(self.R(u, w)):
            return INF
        return d

    def dF_dw(self, u, w):
        p = self.params
        _, a12, a22 = self._a
        d = 0.5 * a12 * u + a22 * w + p.b[1]
        if isinstance(p.m, CompoundPoisson) and p.m.y_dependent:
            dm = p.m.marks.dmgf_dw(u, w)
            if _is_inf(dm):
                return INF
            d += p.m.intensity * dm
        elif _is_inf(self.F(u, w)):
            return INF
        return d

    def _plus(self, jm, u, fn):
        if _is_inf(fn(u, 0.0)):
            return 0.0
        if isinstance(jm, CompoundPoisson) and jm.y_dependent:
            return max(jm.marks.w_boundary(u), 0.0)
        return INF

    def f_plus(self, u):
        return self._plus(self.params.m, u, self.F)

    def r_plus(self, u):
        return self._plus(self.params.mu, u, self.R)

    def quadratic_coefficients(self, u):
        p = self.params
        for jm in (p.m, p.mu):
            if isinstance(jm, CompoundPoisson) and jm.y_dependent:
                return None
        r0 = self.R(u, 0.0)
        f0 = self.F(u, 0.0)
        if _is_inf(r0) or _is_inf(f0):
            return None
        _, a12, a22 = self._al
        _, b12, b22 = self._a
        r1 = 0.5 * a12 * u + p.beta[1]
        f1 = 0.5 * b12 * u + p.b[1]
        if b22 != 0.0:
            return None
        return r0, r1, 0.5 * a22, f0, f1


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def eval_F(g: GeneratorPair, u, w):
    """F(u, w) as an extended real; ``inf`` outside the effective domain."""
    return _check(g.F(u, w), "F")


def eval_R(g: GeneratorPair, u, w):
    """R(u, w) as an extended real; ``inf`` outside the effective domain."""
    return _check(g.R(u, w), "R")


def chi(g: GeneratorPair, u):
    """dR/dw at w = 0 (possibly ``inf``); raises DomainError if R(u, 0) = inf."""
    return _check(g.chi(u), "chi")


def domain_boundary_F(g: GeneratorPair, u):
    """f_+(u) = sup{w >= 0 : F(u, w) < inf}."""
    return g.f_plus(u)


def domain_boundary_R(g: GeneratorPair, u):
    """r_+(u) = sup{w >= 0 : R(u, w) < inf}."""
    return g.r_plus(u)


def generator_from_parameters(p: AdmissibleParameterSet, name="parameters") -> ParametricGenerator:
    return ParametricGenerator(p, name=name)
