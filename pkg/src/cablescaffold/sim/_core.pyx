# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled closed-loop kernel; same algorithm and layout as ``_pykernel``."""

from libc.math cimport cos, sin, sqrt, isfinite

import numpy as np

cdef enum:
    NSTATE = 14
    P_A = 0
    P_B = 1
    P_HA = 2
    P_HB = 3
    P_M = 4
    P_IP = 5
    P_R = 6
    P_I = 7
    P_C = 8
    P_TAU0 = 9
    P_G = 10
    P_K = 11
    P_D = 12
    P_L0 = 13
    S_OK = 0
    S_NONFINITE = 1
    S_ESCAPED = 2
    S_SINGULAR = 3

OK = S_OK
ERR_NONFINITE = S_NONFINITE
ERR_ESCAPED = S_ESCAPED
ERR_SINGULAR = S_SINGULAR

cdef double SX[4]
cdef double SY[4]
SX[:] = [-1.0, 1.0, -1.0, 1.0]
SY[:] = [1.0, 1.0, -1.0, -1.0]


cdef int cable_state(const double* x, const double* p, double* lengths, double* tensions, double* wrench) noexcept nogil:
    cdef double px = x[0], py = x[1], th = x[2], vx = x[3], vy = x[4], w = x[5]
    cdef double c = cos(th), s = sin(th)
    cdef double ha = p[P_HA], hb = p[P_HB], r = p[P_R], k = p[P_K], d = p[P_D]
    cdef double fx = 0.0, fy = 0.0, mz = 0.0
    cdef double u, v, ox, oy, ex, ey, length, nx, ny, ldot, stretch, t
    cdef int i
    for i in range(4):
        u = SX[i] * hb
        v = SY[i] * ha
        ox = u * c - v * s
        oy = u * s + v * c
        ex = px + ox - (p[P_B] if i % 2 else 0.0)
        ey = py + oy - (p[P_A] if i < 2 else 0.0)
        length = sqrt(ex * ex + ey * ey)
        if length < 1e-6:
            return 0
        nx = ex / length
        ny = ey / length
        ldot = nx * (vx - oy * w) + ny * (vy + ox * w)
        stretch = length - (p[P_L0 + i] - r * x[6 + i])
        t = 0.0
        if stretch > 0.0:
            t = k * stretch + d * (ldot + r * x[10 + i])
            if t < 0.0:
                t = 0.0
        lengths[i] = length
        tensions[i] = t
        fx -= t * nx
        fy -= t * ny
        mz -= ox * t * ny - oy * t * nx
    wrench[0] = fx
    wrench[1] = fy
    wrench[2] = mz
    return 1


cdef int derivative(const double* x, const double* tau, const double* p, double* out,
                    double* lengths, double* tensions) noexcept nogil:
    cdef double wrench[3]
    cdef double qd, sgn
    cdef int i
    if not cable_state(x, p, lengths, tensions, wrench):
        return 0
    out[0] = x[3]
    out[1] = x[4]
    out[2] = x[5]
    out[3] = wrench[0] / p[P_M]
    out[4] = wrench[1] / p[P_M] - p[P_G]
    out[5] = wrench[2] / p[P_IP]
    for i in range(4):
        qd = x[10 + i]
        sgn = (qd > 0.0) - (qd < 0.0)
        out[6 + i] = qd
        out[10 + i] = (tau[i] - sgn * p[P_TAU0] - p[P_C] * qd - tensions[i] * p[P_R]) / p[P_I]
    return 1


def run_loop(x0, lref, p, acc, gains, double dt, Py_ssize_t stride, double[:, ::1] states, double[:, ::1] torques,
             double[:, ::1] tensions_out, double[:, ::1] lengths_out):
    """See ``_pykernel.run_loop``."""
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[:, ::1] ref = np.ascontiguousarray(lref, dtype=np.float64)
    cdef double[::1] accv = np.array(acc, dtype=np.float64)
    cdef double kp = gains[0], ki = gains[1], wlim = gains[2], tlim = gains[3]
    cdef Py_ssize_t nsteps = ref.shape[0] - 1
    cdef double x[NSTATE]
    cdef double xt[NSTATE]
    cdef double k1[NSTATE]
    cdef double k2[NSTATE]
    cdef double k3[NSTATE]
    cdef double k4[NSTATE]
    cdef double lens[4]
    cdef double tens[4]
    cdef double tau[4]
    cdef double wrench[3]
    cdef double e, raw, u, a, half = 0.5 * dt, bound = 0.05
    cdef double r = pv[P_R]
    cdef Py_ssize_t step, j, row
    cdef int i, status = S_OK, done = 0
    for j in range(NSTATE):
        x[j] = x0[j]
    if not cable_state(x, &pv[0], lens, tens, wrench):
        return S_SINGULAR, 0
    with nogil:
        done = <int>nsteps
        for step in range(nsteps):
            for i in range(4):
                # encoder feedback: released length, not the geometric length
                e = pv[P_L0 + i] - r * x[6 + i] - ref[step, i]
                raw = kp * e + ki * accv[i]
                u = raw
                if u > tlim:
                    u = tlim
                elif u < -tlim:
                    u = -tlim
                if not (u != raw and (e > 0.0) == (raw > 0.0) and e != 0.0):
                    a = accv[i] + e * dt
                    if a > wlim:
                        a = wlim
                    elif a < -wlim:
                        a = -wlim
                    accv[i] = a
                tau[i] = u
            if not derivative(x, tau, &pv[0], k1, lens, tens):
                status = S_SINGULAR
                done = <int>step
                break
            for j in range(NSTATE):
                xt[j] = x[j] + half * k1[j]
            if not derivative(xt, tau, &pv[0], k2, lens, tens):
                status = S_SINGULAR
                done = <int>step
                break
            for j in range(NSTATE):
                xt[j] = x[j] + half * k2[j]
            if not derivative(xt, tau, &pv[0], k3, lens, tens):
                status = S_SINGULAR
                done = <int>step
                break
            for j in range(NSTATE):
                xt[j] = x[j] + dt * k3[j]
            if not derivative(xt, tau, &pv[0], k4, lens, tens):
                status = S_SINGULAR
                done = <int>step
                break
            for j in range(NSTATE):
                x[j] = x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if not cable_state(x, &pv[0], lens, tens, wrench):
                status = S_SINGULAR
                done = <int>step
                break
            for j in range(NSTATE):
                if not isfinite(x[j]):
                    status = S_NONFINITE
            if status != S_OK:
                done = <int>step
                break
            if (step + 1) % stride == 0:
                row = (step + 1) // stride - 1
                for j in range(NSTATE):
                    states[row, j] = x[j]
                for i in range(4):
                    torques[row, i] = tau[i]
                    tensions_out[row, i] = tens[i]
                    lengths_out[row, i] = lens[i]
            if x[0] < -bound or x[0] > pv[P_B] + bound or x[1] < -bound or x[1] > pv[P_A] + bound:
                status = S_ESCAPED
                done = <int>(step + 1)
                break
    for i in range(4):
        acc[i] = accv[i]
    return status, done
