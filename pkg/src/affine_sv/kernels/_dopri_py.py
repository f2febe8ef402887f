"""Pure-Python Dormand-Prince 5(4) integrators for the Riccati pair.

The state is ``(psi, phi)`` with ``psi' = R(psi)`` and ``phi' = F(psi)``;
the right-hand side is autonomous and does not depend on ``phi``.

``quad_solve_real`` / ``quad_solve_complex`` handle the quadratic class
``R = r0 + r1 w + r2 w^2``, ``F = f0 + f1 w`` and mirror the compiled
kernels in ``_dopri.pyx`` step for step. ``solve_generic`` takes an arbitrary
callable and is always pure Python.

Status codes: 0 completed, 1 blew up (|psi| > threshold or non-finite),
2 crossed the domain cap ``w_cap``, 3 left the domain (rhs became infinite
and the step could not be shrunk further).
"""
import math

import numpy as np

# Dormand-Prince tableau
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
H_MIN_REL = 1e-14

COMPLETED, BLEWUP, CAPPED, LEFT_DOMAIN = 0, 1, 2, 3


def _stepper(rhs, w0, t_out, rtol, atol, max_step, blowup, w_cap, cplx):
    n = len(t_out)
    dtype = complex if cplx else float
    psi_out = np.zeros(n, dtype=dtype)
    phi_out = np.zeros(n, dtype=dtype)
    t = 0.0
    psi = dtype(w0)
    phi = dtype(0.0)
    kr1, kf1 = rhs(psi)
    if not (math.isfinite(abs(kr1)) and math.isfinite(abs(kf1))):
        return psi_out, phi_out, 0, LEFT_DOMAIN, 0.0, psi, phi, 0
    k = 0
    while k < n and t_out[k] <= 0.0:
        psi_out[k] = psi
        phi_out[k] = phi
        k += 1
    h = min(max_step, 0.01 * (t_out[n - 1] if n else 1.0))
    steps = 0
    while k < n:
        target = t_out[k]
        last = False
        if t + h >= target:
            h = target - t
            last = True
        p2 = psi + h * A21 * kr1
        kr2, kf2 = rhs(p2)
        p3 = psi + h * (A31 * kr1 + A32 * kr2)
        kr3, kf3 = rhs(p3)
        p4 = psi + h * (A41 * kr1 + A42 * kr2 + A43 * kr3)
        kr4, kf4 = rhs(p4)
        p5 = psi + h * (A51 * kr1 + A52 * kr2 + A53 * kr3 + A54 * kr4)
        kr5, kf5 = rhs(p5)
        p6 = psi + h * (A61 * kr1 + A62 * kr2 + A63 * kr3 + A64 * kr4 + A65 * kr5)
        kr6, kf6 = rhs(p6)
        psi_new = psi + h * (B1 * kr1 + B3 * kr3 + B4 * kr4 + B5 * kr5 + B6 * kr6)
        phi_new = phi + h * (B1 * kf1 + B3 * kf3 + B4 * kf4 + B5 * kf5 + B6 * kf6)
        kr7, kf7 = rhs(psi_new)
        er = h * (E1 * kr1 + E3 * kr3 + E4 * kr4 + E5 * kr5 + E6 * kr6 + E7 * kr7)
        ef = h * (E1 * kf1 + E3 * kf3 + E4 * kf4 + E5 * kf5 + E6 * kf6 + E7 * kf7)
        sr = atol + rtol * max(abs(psi), abs(psi_new))
        sf = atol + rtol * max(abs(phi), abs(phi_new))
        err = math.sqrt(0.5 * ((abs(er) / sr) ** 2 + (abs(ef) / sf) ** 2))
        if not math.isfinite(err):
            h *= FAC_MIN
            if h < H_MIN_REL * max(1.0, t):
                return psi_out, phi_out, k, LEFT_DOMAIN, t, psi, phi, steps
            continue
        if err <= 1.0:
            steps += 1
            t = target if last else t + h
            psi, phi = psi_new, phi_new
            kr1, kf1 = kr7, kf7
            if abs(psi) > blowup:
                return psi_out, phi_out, k, BLEWUP, t, psi, phi, steps
            if psi.real >= w_cap:
                return psi_out, phi_out, k, CAPPED, t, psi, phi, steps
            if last:
                psi_out[k] = psi
                phi_out[k] = phi
                k += 1
            fac = FAC_MAX if err == 0.0 else min(FAC_MAX, max(FAC_MIN, SAFETY * err ** -0.2))
            h = min(max_step, h * fac)
        else:
            h *= max(FAC_MIN, SAFETY * err ** -0.2)
            if h < H_MIN_REL * max(1.0, t):
                return psi_out, phi_out, k, BLEWUP, t, psi, phi, steps
    return psi_out, phi_out, k, COMPLETED, t, psi, phi, steps


def quad_solve_real(r0, r1, r2, f0, f1, w0, t_out, rtol, atol, max_step, blowup, w_cap):
    def rhs(p):
        return r0 + p * (r1 + r2 * p), f0 + f1 * p

    return _stepper(rhs, float(w0), np.asarray(t_out, dtype=float), rtol, atol, max_step, blowup, w_cap, False)


def quad_solve_complex(r0, r1, r2, f0, f1, w0, t_out, rtol, atol, max_step, blowup):
    r0, r1, r2, f0, f1 = complex(r0), complex(r1), complex(r2), complex(f0), complex(f1)

    def rhs(p):
        return r0 + p * (r1 + r2 * p), f0 + f1 * p

    return _stepper(rhs, complex(w0), np.asarray(t_out, dtype=float), rtol, atol, max_step, blowup, math.inf, True)


def solve_generic(rhs, w0, t_out, rtol, atol, max_step, blowup, w_cap=math.inf, cplx=False):
    """Integrate with an arbitrary ``rhs(psi) -> (R, F)``; infinite values trigger step rejection."""
    return _stepper(rhs, w0, np.asarray(t_out, dtype=float), rtol, atol, max_step, blowup, w_cap, cplx)
