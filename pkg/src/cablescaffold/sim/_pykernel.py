"""Pure-Python closed-loop kernel.

Mirrors ``_core.pyx`` operation for operation; used when the compiled
extension is unavailable or ``CABLESCAFFOLD_BACKEND=python`` is set.

State layout (14): px, py, th, vx, vy, w, q1..q4, qd1..qd4.
Parameter layout: see ``engine.pack_params``.
"""

import math

NSTATE = 14

# parameter indices
P_A, P_B, P_HA, P_HB, P_M, P_IP, P_R, P_I, P_C, P_TAU0, P_G, P_K, P_D = range(13)
P_L0 = 13  # four released-length offsets follow
NPARAM = 17

_SX = (-1.0, 1.0, -1.0, 1.0)  # corner offset signs, width direction
_SY = (1.0, 1.0, -1.0, -1.0)  # height direction

OK = 0
ERR_NONFINITE = 1
ERR_ESCAPED = 2
ERR_SINGULAR = 3


def cable_state(x, p, lengths, tensions):
    """Fill geometric lengths and tensions; return platform wrench (fx, fy, mz) or None."""
    px, py, th, vx, vy, w = x[0], x[1], x[2], x[3], x[4], x[5]
    c, s = math.cos(th), math.sin(th)
    ha, hb, r, k, d = p[P_HA], p[P_HB], p[P_R], p[P_K], p[P_D]
    fx = fy = mz = 0.0
    for i in range(4):
        u = _SX[i] * hb
        v = _SY[i] * ha
        ox = u * c - v * s
        oy = u * s + v * c
        ex = px + ox - (p[P_B] if i % 2 else 0.0)
        ey = py + oy - (p[P_A] if i < 2 else 0.0)
        length = math.sqrt(ex * ex + ey * ey)
        if length < 1e-6:
            return None
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
    return fx, fy, mz


def derivative(x, tau, p, out, lengths, tensions):
    """Write dx/dt into ``out``; returns False on a degenerate cord."""
    wrench = cable_state(x, p, lengths, tensions)
    if wrench is None:
        return False
    fx, fy, mz = wrench
    m = p[P_M]
    out[0] = x[3]
    out[1] = x[4]
    out[2] = x[5]
    out[3] = fx / m
    out[4] = fy / m - p[P_G]
    out[5] = mz / p[P_IP]
    r, inertia, c, tau0 = p[P_R], p[P_I], p[P_C], p[P_TAU0]
    for i in range(4):
        qd = x[10 + i]
        sgn = (qd > 0.0) - (qd < 0.0)
        out[6 + i] = qd
        out[10 + i] = (tau[i] - sgn * tau0 - c * qd - tensions[i] * r) / inertia
    return True


def run_loop(x0, lref, p, acc, gains, dt, stride, states, torques, tensions_out, lengths_out):
    """Integrate ``len(lref) - 1`` steps with RK4 and a zero-order-held PI bank.

    ``lref[k]`` is the reference at step time t_k. ``gains`` is
    (kp, ki, windup_limit, torque_limit). ``acc`` is updated in place.
    Every ``stride``-th step is logged: row k of each output holds the state
    after step (k+1)*stride. Returns (status, completed_steps).
    """
    kp, ki, wlim, tlim = (float(g) for g in gains)
    nsteps = len(lref) - 1
    p = [float(v) for v in p]
    lref = lref.tolist() if hasattr(lref, "tolist") else lref
    accl = [float(a) for a in acc]
    x = [float(v) for v in x0]
    lens = [0.0] * 4
    tens = [0.0] * 4
    tau = [0.0] * 4
    k1 = [0.0] * NSTATE
    k2 = [0.0] * NSTATE
    k3 = [0.0] * NSTATE
    k4 = [0.0] * NSTATE
    xt = [0.0] * NSTATE
    if cable_state(x, p, lens, tens) is None:
        return ERR_SINGULAR, 0
    bound = 0.05
    half = 0.5 * dt
    r = p[P_R]
    for step in range(nsteps):
        ref = lref[step]
        for i in range(4):
            # encoder feedback: released length, not the geometric length
            e = p[P_L0 + i] - r * x[6 + i] - ref[i]
            raw = kp * e + ki * accl[i]
            u = raw
            if u > tlim:
                u = tlim
            elif u < -tlim:
                u = -tlim
            if not (u != raw and (e > 0.0) == (raw > 0.0) and e != 0.0):
                a = accl[i] + e * dt
                if a > wlim:
                    a = wlim
                elif a < -wlim:
                    a = -wlim
                accl[i] = a
                acc[i] = a
            tau[i] = u
        if not derivative(x, tau, p, k1, lens, tens):
            return ERR_SINGULAR, step
        for j in range(NSTATE):
            xt[j] = x[j] + half * k1[j]
        if not derivative(xt, tau, p, k2, lens, tens):
            return ERR_SINGULAR, step
        for j in range(NSTATE):
            xt[j] = x[j] + half * k2[j]
        if not derivative(xt, tau, p, k3, lens, tens):
            return ERR_SINGULAR, step
        for j in range(NSTATE):
            xt[j] = x[j] + dt * k3[j]
        if not derivative(xt, tau, p, k4, lens, tens):
            return ERR_SINGULAR, step
        for j in range(NSTATE):
            x[j] = x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        if cable_state(x, p, lens, tens) is None:
            return ERR_SINGULAR, step
        for j in range(NSTATE):
            if not math.isfinite(x[j]):
                return ERR_NONFINITE, step
        if (step + 1) % stride == 0:
            row = (step + 1) // stride - 1
            states[row] = x
            torques[row] = tau
            tensions_out[row] = tens
            lengths_out[row] = lens
        if x[0] < -bound or x[0] > p[P_B] + bound or x[1] < -bound or x[1] > p[P_A] + bound:
            return ERR_ESCAPED, step + 1
    return OK, nsteps
