"""Compare the compiled and pure-Python Dormand-Prince kernels on Heston Riccati solves.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from affine_sv.kernels import backends
from affine_sv.models import FIG_HESTON, HestonGenerator, heston_riccati_closed

CASES = [(-1.0, 5.0), (0.5, 5.0), (2.0, 5.0), (complex(1.5, 20.0), 1.0), (complex(-3.0, 60.0), 1.0)]


def _run(mod, g, u, t_end):
    coeffs = g.quadratic_coefficients(u)
    times = np.array([0.0, t_end])
    if isinstance(u, complex):
        return mod.quad_solve_complex(*coeffs, 0j, times, 1e-10, 1e-10, 1.0 / abs(g.chi(u.real)), 1e10)
    return mod.quad_solve_real(*coeffs, 0.0, times, 1e-10, 1e-10, 1.0 / abs(g.chi(u)), 1e10, np.inf)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    g = HestonGenerator(FIG_HESTON)
    mods = backends()
    print(f"{'u':>16} {'t':>5} " + " ".join(f"{n + ' [us]':>14}" for n in mods) + f" {'speedup':>8} {'max err':>10}")
    for u, t_end in CASES:
        timings, err = {}, 0.0
        psi_ref, phi_ref = heston_riccati_closed(FIG_HESTON, t_end, u, 0.0)
        for name, mod in mods.items():
            res = _run(mod, g, u, t_end)
            err = max(err, abs(res[0][-1] - psi_ref), abs(res[1][-1] - phi_ref))
            t0 = time.perf_counter()
            for _ in range(args.repeat):
                _run(mod, g, u, t_end)
            timings[name] = (time.perf_counter() - t0) / args.repeat * 1e6
        speed = timings["python"] / timings["cython"] if "cython" in timings else float("nan")
        print(f"{str(u):>16} {t_end:>5} " + " ".join(f"{timings[n]:>14.1f}" for n in mods)
              + f" {speed:>8.1f} {err:>10.2e}")


if __name__ == "__main__":
    main()
