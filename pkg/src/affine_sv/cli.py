"""Command-line interface: ``affine-sv <command> [options]``.

Every analysis command writes one table (CSV or JSON) to stdout or --out.
Exit codes: 0 pass, 1 malformed input, 2 fail or refused, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import io
from .errors import AffineSVError, AssumptionError, NoRoot, SpecError
from .explosion import PRIMARY, STATIONARY, critical_moments, cutoff_time, explosion_profile, varsigma
from .longterm import (
    INCONCLUSIVE,
    compute_h,
    compute_interval_I,
    compute_J,
    conservativeness_check,
    convergence_bounds,
    l_plus,
    martingale_check,
    solve_w,
    stationary_cgf,
)
from .pricing import price_details, implied_variance
from .riccati import SolverConfig, solve_riccati

EXIT_OK, EXIT_MALFORMED, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3


@dataclass(frozen=True)
class Table:
    header: tuple
    rows: list
    comments: tuple = ()


def _threads():
    try:
        return max(1, int(os.environ.get("AFFINE_SV_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _grid(lo, hi, n):
    if n < 1:
        raise SpecError("count", "grids must be nonempty")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise SpecError("range", "grid ranges must be finite")
    return [float(x) for x in np.linspace(lo, hi, n)]


def _cfg(tol):
    return SolverConfig(rel_tol=tol, abs_tol=tol) if tol else SolverConfig()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_validate(spec: io.ModelSpec):
    """Admissibility, conservativeness and martingale report; returns (lines, exit code)."""
    g = spec.generator
    lines = [f"model: {spec.kind}"]
    failed = False
    if hasattr(g, "parameters"):
        from .affine_core import validate_admissibility

        rep = validate_admissibility(g.parameters())
        lines += rep.lines()
        failed |= not rep.passed
    cons = conservativeness_check(g)
    mart = martingale_check(g)
    lines.append(f"conservative: {_yes(cons)}  ({cons.reason})")
    lines.append(f"martingale: {_yes(mart)}  ({mart.reason})")
    lines += [f"  {e}" for e in mart.evidence]
    failed |= cons.status != INCONCLUSIVE and not cons.holds
    failed |= mart.status != INCONCLUSIVE and not mart.holds
    c0, c1 = g.chi(0.0), g.chi(1.0)
    ok = c0 < 0 and c1 < 0
    lines.append(f"long-term assumptions chi(0) < 0, chi(1) < 0: {'yes' if ok else 'no'}"
                 f"  (chi(0) = {io.fmt(float(c0))}, chi(1) = {io.fmt(float(c1))})")
    if failed:
        return lines, EXIT_FAIL
    if INCONCLUSIVE in (cons.status, mart.status):
        return lines, EXIT_INCONCLUSIVE
    return lines, EXIT_OK


def _yes(v):
    return "inconclusive" if v.status == INCONCLUSIVE else ("yes" if v.holds else "no")


def _require_long_term(g):
    c0, c1 = g.chi(0.0), g.chi(1.0)
    if not (c0 < 0 and c1 < 0):
        raise AssumptionError(f"long-term analysis needs chi(0) < 0 and chi(1) < 0; got chi(0) = {c0!r}, "
                              f"chi(1) = {c1!r}, so the zero equilibrium is not attracting")


def _try_w(g, u):
    try:
        return solve_w(g, u)
    except NoRoot:
        return None


def cmd_figure1(spec: io.ModelSpec, u_grid, t_grid, traj_u, cfg: SolverConfig):
    """Equilibrium branches of R(u, w) = 0 and psi(t, u, 0) trajectories.

    Rows are (series, u, t, w) with series ``stable``, ``unstable``,
    ``marginal`` (tangency at an endpoint of I; t empty) or ``psi``.
    """
    g = spec.generator
    _require_long_term(g)
    from .longterm import classify_equilibria

    def branch(u):
        try:
            e = classify_equilibria(g, u)
        except NoRoot:
            return []
        out = [("marginal" if e.marginal else "stable", u, None, float(e.stable))]
        if e.unstable is not None and math.isfinite(e.unstable):
            out.append(("unstable", u, None, float(e.unstable)))
        return out

    rows = [r for rs in _pmap(branch, u_grid) for r in rs]

    def traj(u):
        sol = solve_riccati(g, u, 0.0, t_grid[-1], cfg, t_grid=t_grid)
        return [("psi", u, float(t), float(p)) for t, p in zip(sol.times, sol.psi)]

    rows += [r for rs in _pmap(traj, traj_u) for r in rs]
    b = convergence_bounds(g)
    I = compute_interval_I(g)
    comments = (f"I=[{io.fmt(I.lo)},{io.fmt(I.hi)}]", f"X={io.fmt(b.X)}", f"Omega={io.fmt(b.Omega)}", f"C={io.fmt(b.C)}")
    return Table(("series", "u", "t", "w"), rows, comments)


def cmd_figure2(spec: io.ModelSpec, t_grid):
    """Critical moments u_+-(t), their stationary versions and the jump-model u_-(t)."""
    g = spec.generator
    if not hasattr(g, "jump_free"):
        raise AssumptionError("figure2 needs a Heston model with state-independent jumps (kind heston_jumps)")
    plain = g.jump_free()
    km = g.params.jumps.kappa_minus
    t_sharp = cutoff_time(g)

    def row(t):
        lo, hi = critical_moments(plain, t)
        slo, shi = critical_moments(plain, t, STATIONARY)
        jlo, _ = critical_moments(g, t)
        return (t, lo, hi, slo, shi, jlo)

    rows = _pmap(row, t_grid)
    return Table(("t", "u_minus", "u_plus", "u_minus_S", "u_plus_S", "u_minus_jump"), rows,
                 (f"kappa_minus={io.fmt(float(km))}", f"T_sharp={io.fmt(float(t_sharp))}"))


def cmd_explosion(spec: io.ModelSpec, u_grid):
    g = spec.generator

    def row(u):
        p = explosion_profile(g, u)
        return (u, float(p.T_star), float(p.T_star_S))

    return Table(("u", "T_star", "T_star_S"), _pmap(row, u_grid))


def cmd_longterm(spec: io.ModelSpec, u_grid):
    g = spec.generator
    _require_long_term(g)
    I = compute_interval_I(g)
    J = compute_J(g, I)

    def row(u):
        w = _try_w(g, u)
        if w is None:
            return (u, None, None, False, False)
        in_J = u in J
        return (u, float(w), float(compute_h(g, u)) if in_J else math.inf, u in I, in_J)

    comments = (f"I=[{io.fmt(I.lo)},{io.fmt(I.hi)}]", f"J=[{io.fmt(J.lo)},{io.fmt(J.hi)}]")
    return Table(("u", "w", "h", "in_I", "in_J"), _pmap(row, u_grid), comments)


def cmd_critical_moments(spec: io.ModelSpec, t_grid, regime=PRIMARY):
    g = spec.generator

    def row(t):
        lo, hi = critical_moments(g, t, regime)
        return (t, lo, hi, varsigma(-lo), varsigma(hi - 1.0))

    return Table(("T", "u_minus", "u_plus", "left_slope", "right_slope"), _pmap(row, t_grid))


def cmd_smile(spec: io.ModelSpec, T, xi_grid, regime=PRIMARY, cfg: SolverConfig = SolverConfig()):
    g = spec.generator
    strip = critical_moments(g, T, regime)
    V0 = spec.V0 if regime == PRIMARY else None

    def row(xi):
        r = price_details(g, T, xi, V0, None, regime, cfg, strip=strip)
        return (T, xi, r.call, implied_variance(r.otm, T, xi, kind="otm"))

    comments = (f"u_minus={io.fmt(strip[0])}", f"u_plus={io.fmt(strip[1])}",
                f"left_slope={io.fmt(varsigma(-strip[0]))}", f"right_slope={io.fmt(varsigma(strip[1] - 1.0))}")
    return Table(("T", "xi", "price", "implied_variance"), _pmap(row, xi_grid), comments)


def cmd_stationary(spec: io.ModelSpec, w_grid):
    g = spec.generator
    lp = l_plus(g)
    rows = _pmap(lambda w: (w, float(stationary_cgf(g, w))), w_grid)
    return Table(("w", "l"), rows, (f"l_plus={io.fmt(float(lp))}",))


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

_DEFAULT_PRESET = {"figure2": "heston_jumps"}


def _parser():
    p = argparse.ArgumentParser(prog="affine-sv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, u=None, t=None, xi=None, w=None):
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--model", help="model spec: JSON file path or inline JSON")
        src.add_argument("--preset", choices=io.PRESET_NAMES)
        sp.add_argument("--params", help="inline JSON model spec, or field overrides with --preset")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--tol", type=float, help="Riccati solver tolerance (relative and absolute)")
        for name, dflt in (("u", u), ("t", t), ("xi", xi), ("w", w)):
            if dflt is not None:
                sp.add_argument(f"--{name}-min", type=float, default=dflt[0])
                sp.add_argument(f"--{name}-max", type=float, default=dflt[1])
                sp.add_argument(f"--{name}-count", type=int, default=dflt[2])
        return sp

    common(sub.add_parser("validate", help="admissibility, conservativeness and martingale checks"))
    f1 = common(sub.add_parser("figure1", help="equilibrium branches and psi trajectories"),
                u=(None, None, 201), t=(0.0, 10.0, 101))
    f1.add_argument("--traj-count", type=int, default=11, help="trajectories for u equispaced in [0, 1]")
    common(sub.add_parser("figure2", help="critical moment curves, plain, stationary and with jumps"),
           t=(0.1, 3.0, 30))
    common(sub.add_parser("explosion", help="moment explosion times T* and T*^S"), u=(-20.0, 30.0, 201))
    common(sub.add_parser("longterm", help="w(u), h(u) and the intervals I, J"), u=(-3.0, 15.0, 181))
    cm = common(sub.add_parser("critical-moments", help="u_+-(T) and Lee wing slopes"), t=(0.25, 5.0, 20))
    cm.add_argument("--regime", choices=(PRIMARY, STATIONARY), default=PRIMARY)
    sm = common(sub.add_parser("smile", help="Fourier prices and implied variances"), xi=(-0.5, 0.5, 11))
    sm.add_argument("--maturity", type=float, default=1.0)
    sm.add_argument("--regime", choices=(PRIMARY, STATIONARY), default=PRIMARY)
    common(sub.add_parser("stationary", help="cumulant function l(w) of the invariant variance law"),
           w=(-20.0, 0.0, 101))
    return p


def _spec(args):
    if args.model:
        return io.load_model_spec(args.model)
    if args.preset:
        return io.preset_spec(args.preset, args.params)
    if args.params:
        return io.parse_model_spec(args.params)
    return io.preset_spec(_DEFAULT_PRESET.get(args.command, "heston"))


def _u_range(args, spec):
    lo, hi = args.u_min, args.u_max
    if lo is None or hi is None:
        I = compute_interval_I(spec.generator)
        lo = I.lo if lo is None else lo
        hi = I.hi if hi is None else hi
    return _grid(lo, hi, args.u_count)


def run(args):
    """Execute a parsed command; returns (text, exit code)."""
    spec = _spec(args)
    cfg = _cfg(args.tol)
    cmd = args.command
    if cmd == "validate":
        lines, code = cmd_validate(spec)
        return "\n".join(lines) + "\n", code
    if cmd == "figure1":
        traj_u = _grid(0.0, 1.0, args.traj_count)
        table = cmd_figure1(spec, _u_range(args, spec), _grid(args.t_min, args.t_max, args.t_count), traj_u, cfg)
    elif cmd == "figure2":
        table = cmd_figure2(spec, _grid(args.t_min, args.t_max, args.t_count))
    elif cmd == "explosion":
        table = cmd_explosion(spec, _grid(args.u_min, args.u_max, args.u_count))
    elif cmd == "longterm":
        table = cmd_longterm(spec, _grid(args.u_min, args.u_max, args.u_count))
    elif cmd == "critical-moments":
        table = cmd_critical_moments(spec, _grid(args.t_min, args.t_max, args.t_count), args.regime)
    elif cmd == "smile":
        table = cmd_smile(spec, args.maturity, _grid(args.xi_min, args.xi_max, args.xi_count), args.regime, cfg)
    else:
        table = cmd_stationary(spec, _grid(args.w_min, args.w_max, args.w_count))
    return io.render(table.header, table.rows, args.format, table.comments), EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        text, code = run(args)
    except SpecError as exc:
        print(f"error: malformed model spec: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except AssumptionError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except AffineSVError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
