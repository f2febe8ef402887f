# cython: language_level=3
"""Compiled Dormand-Prince 5(4) kernels for quadratic Riccati pairs.

Same algorithm, constants and return convention as ``_dopri_py``; only the
quadratic class R = r0 + r1 w + r2 w^2, F = f0 + f1 w is covered.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, pow, isfinite, INFINITY

cnp.import_array()

cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double SAFETY = 0.9, FAC_MIN = 0.2, FAC_MAX = 5.0, H_MIN_REL = 1e-14


cdef inline double cabs_(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


def quad_solve_real(double r0, double r1, double r2, double f0, double f1, double w0,
                    t_out, double rtol, double atol, double max_step, double blowup, double w_cap):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ts = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef Py_ssize_t n = ts.shape[0], k = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] po = np.zeros(n), fo = np.zeros(n)
    cdef double t = 0.0, psi = w0, phi = 0.0, h, target, err, fac, sr, sf, er, ef
    cdef double kr1, kr2, kr3, kr4, kr5, kr6, kr7, p2, p3, p4, p5, p6, pn, fn
    cdef double kf1, kf3, kf4, kf5, kf6, kf7
    cdef long steps = 0
    cdef bint last
    kr1 = r0 + psi * (r1 + r2 * psi)
    kf1 = f0 + f1 * psi
    while k < n and ts[k] <= 0.0:
        po[k] = psi; fo[k] = phi; k += 1
    h = min(max_step, 0.01 * (ts[n - 1] if n else 1.0))
    while k < n:
        target = ts[k]
        last = False
        if t + h >= target:
            h = target - t
            last = True
        p2 = psi + h * A21 * kr1
        kr2 = r0 + p2 * (r1 + r2 * p2)
        p3 = psi + h * (A31 * kr1 + A32 * kr2)
        kr3 = r0 + p3 * (r1 + r2 * p3)
        p4 = psi + h * (A41 * kr1 + A42 * kr2 + A43 * kr3)
        kr4 = r0 + p4 * (r1 + r2 * p4)
        p5 = psi + h * (A51 * kr1 + A52 * kr2 + A53 * kr3 + A54 * kr4)
        kr5 = r0 + p5 * (r1 + r2 * p5)
        p6 = psi + h * (A61 * kr1 + A62 * kr2 + A63 * kr3 + A64 * kr4 + A65 * kr5)
        kr6 = r0 + p6 * (r1 + r2 * p6)
        kf3 = f0 + f1 * p3; kf4 = f0 + f1 * p4; kf5 = f0 + f1 * p5; kf6 = f0 + f1 * p6
        pn = psi + h * (B1 * kr1 + B3 * kr3 + B4 * kr4 + B5 * kr5 + B6 * kr6)
        fn = phi + h * (B1 * kf1 + B3 * kf3 + B4 * kf4 + B5 * kf5 + B6 * kf6)
        kr7 = r0 + pn * (r1 + r2 * pn)
        kf7 = f0 + f1 * pn
        er = h * (E1 * kr1 + E3 * kr3 + E4 * kr4 + E5 * kr5 + E6 * kr6 + E7 * kr7)
        ef = h * (E1 * kf1 + E3 * kf3 + E4 * kf4 + E5 * kf5 + E6 * kf6 + E7 * kf7)
        sr = atol + rtol * max(fabs(psi), fabs(pn))
        sf = atol + rtol * max(fabs(phi), fabs(fn))
        err = sqrt(0.5 * ((er / sr) ** 2 + (ef / sf) ** 2))
        if not isfinite(err):
            h *= FAC_MIN
            if h < H_MIN_REL * max(1.0, t):
                return po, fo, k, 3, t, psi, phi, steps
            continue
        if err <= 1.0:
            steps += 1
            t = target if last else t + h
            psi = pn; phi = fn
            kr1 = kr7; kf1 = kf7
            if fabs(psi) > blowup:
                return po, fo, k, 1, t, psi, phi, steps
            if psi >= w_cap:
                return po, fo, k, 2, t, psi, phi, steps
            if last:
                po[k] = psi; fo[k] = phi; k += 1
            if err == 0.0:
                fac = FAC_MAX
            else:
                fac = min(FAC_MAX, max(FAC_MIN, SAFETY * pow(err, -0.2)))
            h = min(max_step, h * fac)
        else:
            h *= max(FAC_MIN, SAFETY * pow(err, -0.2))
            if h < H_MIN_REL * max(1.0, t):
                return po, fo, k, 1, t, psi, phi, steps
    return po, fo, k, 0, t, psi, phi, steps


def quad_solve_complex(double complex r0, double complex r1, double complex r2,
                       double complex f0, double complex f1, double complex w0,
                       t_out, double rtol, double atol, double max_step, double blowup):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ts = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef Py_ssize_t n = ts.shape[0], k = 0
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] po = np.zeros(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] fo = np.zeros(n, dtype=np.complex128)
    cdef double t = 0.0, h, target, err, fac, sr, sf
    cdef double complex psi = w0, phi = 0.0
    cdef double complex kr1, kr2, kr3, kr4, kr5, kr6, kr7, p2, p3, p4, p5, p6, pn, fn, er, ef
    cdef double complex kf1, kf3, kf4, kf5, kf6, kf7
    cdef long steps = 0
    cdef bint last
    kr1 = r0 + psi * (r1 + r2 * psi)
    kf1 = f0 + f1 * psi
    while k < n and ts[k] <= 0.0:
        po[k] = psi; fo[k] = phi; k += 1
    h = min(max_step, 0.01 * (ts[n - 1] if n else 1.0))
    while k < n:
        target = ts[k]
        last = False
        if t + h >= target:
            h = target - t
            last = True
        p2 = psi + h * A21 * kr1
        kr2 = r0 + p2 * (r1 + r2 * p2)
        p3 = psi + h * (A31 * kr1 + A32 * kr2)
        kr3 = r0 + p3 * (r1 + r2 * p3)
        p4 = psi + h * (A41 * kr1 + A42 * kr2 + A43 * kr3)
        kr4 = r0 + p4 * (r1 + r2 * p4)
        p5 = psi + h * (A51 * kr1 + A52 * kr2 + A53 * kr3 + A54 * kr4)
        kr5 = r0 + p5 * (r1 + r2 * p5)
        p6 = psi + h * (A61 * kr1 + A62 * kr2 + A63 * kr3 + A64 * kr4 + A65 * kr5)
        kr6 = r0 + p6 * (r1 + r2 * p6)
        kf3 = f0 + f1 * p3; kf4 = f0 + f1 * p4; kf5 = f0 + f1 * p5; kf6 = f0 + f1 * p6
        pn = psi + h * (B1 * kr1 + B3 * kr3 + B4 * kr4 + B5 * kr5 + B6 * kr6)
        fn = phi + h * (B1 * kf1 + B3 * kf3 + B4 * kf4 + B5 * kf5 + B6 * kf6)
        kr7 = r0 + pn * (r1 + r2 * pn)
        kf7 = f0 + f1 * pn
        er = h * (E1 * kr1 + E3 * kr3 + E4 * kr4 + E5 * kr5 + E6 * kr6 + E7 * kr7)
        ef = h * (E1 * kf1 + E3 * kf3 + E4 * kf4 + E5 * kf5 + E6 * kf6 + E7 * kf7)
        sr = atol + rtol * max(cabs_(psi), cabs_(pn))
        sf = atol + rtol * max(cabs_(phi), cabs_(fn))
        err = sqrt(0.5 * ((cabs_(er) / sr) ** 2 + (cabs_(ef) / sf) ** 2))
        if not isfinite(err):
            h *= FAC_MIN
            if h < H_MIN_REL * max(1.0, t):
                return po, fo, k, 3, t, psi, phi, steps
            continue
        if err <= 1.0:
            steps += 1
            t = target if last else t + h
            psi = pn; phi = fn
            kr1 = kr7; kf1 = kf7
            if cabs_(psi) > blowup:
                return po, fo, k, 1, t, psi, phi, steps
            if last:
                po[k] = psi; fo[k] = phi; k += 1
            if err == 0.0:
                fac = FAC_MAX
            else:
                fac = min(FAC_MAX, max(FAC_MIN, SAFETY * pow(err, -0.2)))
            h = min(max_step, h * fac)
        else:
            h *= max(FAC_MIN, SAFETY * pow(err, -0.2))
            if h < H_MIN_REL * max(1.0, t):
                return po, fo, k, 1, t, psi, phi, steps
    return po, fo, k, 0, t, psi, phi, steps
