"""Jitted Dormand-Prince 8(5,3) integration kernels.

Everything here operates on raw float64 arrays: y = (x, p, u, v, z) for
the main flow, or the 10-vector (state, tangent) for joint variational
propagation.  The public module surfaces live in ``integrate``,
``lyapunov``, ``poincare`` and ``scattering``; this module is private.

The stepper is the 12-stage DOP853 embedded pair with its order-7
dense-output interpolant (three extra stages, computed lazily only on
steps that contain an event or a dense sample).  Events (lattice-node
crossings, momentum sign changes, cavity exits) are localized by
bisection on the interpolant, so no stage storage beyond the current
step is needed even for very long runs.
"""

import math

import numpy as np
from numba import njit

from ._dop853_tableau import A, B, C, D, E3, E5  # noqa: F401

_A = np.ascontiguousarray(A)
_B = np.ascontiguousarray(B)
_D = np.ascontiguousarray(D)
_E3 = np.ascontiguousarray(E3)
_E5 = np.ascontiguousarray(E5)

# status codes shared with the Python layer
OK = 0
STEP_UNDERFLOW = 1
MAX_STEPS_EXCEEDED = 2

# exit outcomes
EXIT_RIGHT = 0
EXIT_LEFT = 1
EXIT_CUTOFF = 2

_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_SAFETY = 0.9
_ERR_EXP = -1.0 / 8.0


@njit(cache=True, nogil=True, inline="always")
def _rhs(y, out, wr, dl):
    sx = math.sin(y[0])
    cx = math.cos(y[0])
    out[0] = wr * y[1]
    out[1] = -y[2] * sx
    out[2] = dl * y[3]
    out[3] = -dl * y[2] + 2.0 * y[4] * cx
    out[4] = -2.0 * y[3] * cx
    if y.shape[0] == 10:
        out[5] = wr * y[6]
        out[6] = -y[7] * sx - y[2] * cx * y[5]
        out[7] = dl * y[8]
        out[8] = -dl * y[7] + 2.0 * y[9] * cx - 2.0 * y[4] * sx * y[5]
        out[9] = -2.0 * y[8] * cx + 2.0 * y[3] * sx * y[5]


@njit(cache=True, nogil=True)
def _try_step(y, h, wr, dl, K, ytmp, ynew, rtol, atol):
    """One trial step; K[0] must hold f(y).  Fills K[1..12] and ynew.

    Returns the DOP853 combined 5th/3rd-order error norm (accept < 1).
    """
    n = y.shape[0]
    for s in range(1, 12):
        for i in range(n):
            acc = 0.0
            for j in range(s):
                a = _A[s, j]
                if a != 0.0:
                    acc += a * K[j, i]
            ytmp[i] = y[i] + h * acc
        _rhs(ytmp, K[s], wr, dl)
    for i in range(n):
        acc = 0.0
        for j in range(12):
            b = _B[j]
            if b != 0.0:
                acc += b * K[j, i]
        ynew[i] = y[i] + h * acc
    _rhs(ynew, K[12], wr, dl)

    err5_2 = 0.0
    err3_2 = 0.0
    for i in range(n):
        e5 = 0.0
        e3 = 0.0
        for j in range(13):
            e5 += _E5[j] * K[j, i]
            e3 += _E3[j] * K[j, i]
        sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
        err5_2 += (e5 / sc) ** 2
        err3_2 += (e3 / sc) ** 2
    if err5_2 == 0.0 and err3_2 == 0.0:
        return 0.0
    denom = err5_2 + 0.01 * err3_2
    return abs(h) * err5_2 / math.sqrt(denom * n)


@njit(cache=True, nogil=True)
def _dense_coeffs(y, ynew, h, wr, dl, K, ytmp, F):
    """Order-7 interpolant coefficients for the accepted step.

    Computes the three extra stages K[13..15] and fills F (8 x n);
    F[7] holds y at the step start.
    """
    n = y.shape[0]
    for s in range(13, 16):
        for i in range(n):
            acc = 0.0
            for j in range(s):
                a = _A[s, j]
                if a != 0.0:
                    acc += a * K[j, i]
            ytmp[i] = y[i] + h * acc
        _rhs(ytmp, K[s], wr, dl)
    for i in range(n):
        dy = ynew[i] - y[i]
        F[0, i] = dy
        F[1, i] = h * K[0, i] - dy
        F[2, i] = 2.0 * dy - h * (K[12, i] + K[0, i])
        F[7, i] = y[i]
    for r in range(4):
        for i in range(n):
            acc = 0.0
            for j in range(16):
                d = _D[r, j]
                if d != 0.0:
                    acc += d * K[j, i]
            F[3 + r, i] = h * acc


@njit(cache=True, nogil=True, inline="always")
def _dense_eval1(F, theta, i):
    """Interpolated component i at fraction theta of the step."""
    om = 1.0 - theta
    yv = 0.0
    for idx in range(6, -1, -1):
        yv += F[idx, i]
        if (6 - idx) % 2 == 0:
            yv *= theta
        else:
            yv *= om
    return yv + F[7, i]


@njit(cache=True, nogil=True)
def _dense_eval(F, theta, out):
    for i in range(F.shape[1]):
        out[i] = _dense_eval1(F, theta, i)


@njit(cache=True, nogil=True, inline="always")
def _next_h(h, err, sgn, max_step):
    if err == 0.0:
        fac = _MAX_FACTOR
    else:
        fac = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** _ERR_EXP))
    return sgn * min(abs(h) * fac, max_step)


@njit(cache=True, nogil=True, inline="always")
def _shrink_h(h, err):
    if math.isfinite(err):
        return h * max(_MIN_FACTOR, _SAFETY * err ** _ERR_EXP)
    return h * 0.5


@njit(cache=True, nogil=True)
def _locate_node(F, xa):
    """Bisect theta where sin(x) = 0 inside the step; sin flips sign."""
    sa = math.sin(xa)
    ta, tb = 0.0, 1.0
    for _ in range(120):
        tm = 0.5 * (ta + tb)
        sm = math.sin(_dense_eval1(F, tm, 0))
        if sm == 0.0:
            return tm
        if (sm > 0.0) == (sa > 0.0):
            ta = tm
        else:
            tb = tm
        if tb - ta < 1e-17:
            break
    return 0.5 * (ta + tb)


@njit(cache=True, nogil=True)
def _run_record(y0, wr, dl, t0, t1, rtol, atol, max_step, h0, stride,
                max_steps):
    """Integrate and record every stride-th accepted step endpoint.

    Returns (ts, ys, status, n_accepted).  The initial and final points
    are always recorded.
    """
    n = y0.shape[0]
    sgn = 1.0 if t1 >= t0 else -1.0
    y = y0.copy()
    ynew = np.empty(n)
    ytmp = np.empty(n)
    K = np.empty((16, n))
    _rhs(y, K[0], wr, dl)

    cap = 4096
    ts = np.empty(cap)
    ys = np.empty((cap, n))
    ts[0] = t0
    ys[0] = y
    nrec = 1

    t = t0
    hc = min(abs(h0), abs(t1 - t0), max_step)  # controller step, unclipped
    nacc = 0
    ntot = 0
    status = OK
    while (t1 - t) * sgn > 0.0:
        h = sgn * hc
        clipped = False
        if (t + h - t1) * sgn > 0.0:
            h = t1 - t
            clipped = True
        err = _try_step(y, h, wr, dl, K, ytmp, ynew, rtol, atol)
        ntot += 1
        if ntot > max_steps:
            status = MAX_STEPS_EXCEEDED
            break
        if math.isfinite(err) and err < 1.0:
            t = t + h
            nacc += 1
            for i in range(n):
                y[i] = ynew[i]
                K[0, i] = K[12, i]
            if nacc % stride == 0 or (t1 - t) * sgn <= 0.0:
                if nrec == cap:
                    cap *= 2
                    ts2 = np.empty(cap)
                    ys2 = np.empty((cap, n))
                    ts2[:nrec] = ts[:nrec]
                    ys2[:nrec] = ys[:nrec]
                    ts, ys = ts2, ys2
                ts[nrec] = t
                ys[nrec] = y
                nrec += 1
            if not clipped:
                hc = abs(_next_h(h, err, sgn, max_step))
        else:
            hc = abs(_shrink_h(h, err))
            if hc < 1e-13 * max(1.0, abs(t)):
                status = STEP_UNDERFLOW
                break
    return ts[:nrec].copy(), ys[:nrec].copy(), status, nacc


@njit(cache=True, nogil=True)
def _run_crossings(y0, wr, dl, t0, t1, rtol, atol, max_step, h0,
                   direction, max_cross, max_steps):
    """Integrate the 5-D flow recording lattice-node crossings cos x = 1.

    direction: 0 any, +1 only p > 0, -1 only p < 0.
    Returns (cross_ts, cross_ys, status, n_accepted, t_final, y_final).
    """
    n = y0.shape[0]
    sgn = 1.0 if t1 >= t0 else -1.0
    y = y0.copy()
    ynew = np.empty(n)
    ytmp = np.empty(n)
    K = np.empty((16, n))
    F = np.empty((8, n))
    yev = np.empty(n)
    _rhs(y, K[0], wr, dl)

    cts = np.empty(max_cross)
    cys = np.empty((max_cross, 5))
    ncross = 0

    t = t0
    hc = min(abs(h0), abs(t1 - t0), max_step)  # controller step, unclipped
    nacc = 0
    ntot = 0
    status = OK
    while (t1 - t) * sgn > 0.0 and ncross < max_cross:
        h = sgn * hc
        clipped = False
        if (t + h - t1) * sgn > 0.0:
            h = t1 - t
            clipped = True
        err = _try_step(y, h, wr, dl, K, ytmp, ynew, rtol, atol)
        ntot += 1
        if ntot > max_steps:
            status = MAX_STEPS_EXCEEDED
            break
        if math.isfinite(err) and err < 1.0:
            sa = math.sin(y[0])
            sb = math.sin(ynew[0])
            if sa * sb < 0.0:
                _dense_coeffs(y, ynew, h, wr, dl, K, ytmp, F)
                theta = _locate_node(F, y[0])
                _dense_eval(F, theta, yev)
                if math.cos(yev[0]) > 0.0:
                    ok = True
                    if direction > 0 and yev[1] <= 0.0:
                        ok = False
                    if direction < 0 and yev[1] >= 0.0:
                        ok = False
                    if ok:
                        cts[ncross] = t + theta * h
                        for i in range(5):
                            cys[ncross, i] = yev[i]
                        ncross += 1
            t = t + h
            nacc += 1
            for i in range(n):
                y[i] = ynew[i]
                K[0, i] = K[12, i]
            if not clipped:
                hc = abs(_next_h(h, err, sgn, max_step))
        else:
            hc = abs(_shrink_h(h, err))
            if hc < 1e-13 * max(1.0, abs(t)):
                status = STEP_UNDERFLOW
                break
    return cts[:ncross].copy(), cys[:ncross].copy(), status, nacc, t, y


@njit(cache=True, nogil=True)
def _run_tangent(y0, wr, dl, t0, total_tau, renorm_interval, rtol, atol,
                 max_step, h0, stride, record_cross, max_cross, max_steps):
    """Joint state+tangent propagation with periodic tangent renormalization.

    y0 is the 10-vector (state, tangent); the tangent is rescaled to unit
    Euclidean norm at every checkpoint t0 + j*renorm_interval and the log
    of its growth recorded.  Optionally also records cos x = 1 crossings
    of the base trajectory (for sticking diagnostics).

    Returns (checkpoint_ts, log_growth, sample_ts, sample_ys,
    cross_ts, cross_ys, status, n_accepted, y_final).
    """
    sgn = 1.0 if total_tau >= 0.0 else -1.0
    n_check = int(round(abs(total_tau) / renorm_interval))

    y = y0.copy()
    nrm = 0.0
    for i in range(5, 10):
        nrm += y[i] * y[i]
    nrm = math.sqrt(nrm)
    for i in range(5, 10):
        y[i] /= nrm

    ynew = np.empty(10)
    ytmp = np.empty(10)
    K = np.empty((16, 10))
    F = np.empty((8, 10))
    yev = np.empty(10)
    _rhs(y, K[0], wr, dl)

    check_ts = np.empty(n_check)
    logs = np.empty(n_check)
    icheck = 0
    t_next = t0 + sgn * renorm_interval * (icheck + 1)

    cap = 4096
    sts = np.empty(cap)
    sys_ = np.empty((cap, 10))
    sts[0] = t0
    sys_[0] = y
    nrec = 1

    ncap = max_cross if record_cross else 1
    cts = np.empty(ncap)
    cys = np.empty((ncap, 5))
    ncross = 0

    t = t0
    hc = min(abs(h0), abs(total_tau), max_step)  # controller step, unclipped
    nacc = 0
    ntot = 0
    status = OK
    while icheck < n_check:
        # land exactly on the next renormalization checkpoint
        h = sgn * hc
        clipped = False
        if (t + h - t_next) * sgn > 0.0:
            h = t_next - t
            clipped = True
        err = _try_step(y, h, wr, dl, K, ytmp, ynew, rtol, atol)
        ntot += 1
        if ntot > max_steps:
            status = MAX_STEPS_EXCEEDED
            break
        if math.isfinite(err) and err < 1.0:
            if record_cross and ncross < max_cross:
                sa = math.sin(y[0])
                sb = math.sin(ynew[0])
                if sa * sb < 0.0:
                    _dense_coeffs(y, ynew, h, wr, dl, K, ytmp, F)
                    theta = _locate_node(F, y[0])
                    _dense_eval(F, theta, yev)
                    if math.cos(yev[0]) > 0.0:
                        cts[ncross] = t + theta * h
                        for i in range(5):
                            cys[ncross, i] = yev[i]
                        ncross += 1
            t = t + h
            nacc += 1
            for i in range(10):
                y[i] = ynew[i]
                K[0, i] = K[12, i]
            if nacc % stride == 0:
                if nrec == cap:
                    cap *= 2
                    sts2 = np.empty(cap)
                    sys2 = np.empty((cap, 10))
                    sts2[:nrec] = sts[:nrec]
                    sys2[:nrec] = sys_[:nrec]
                    sts, sys_ = sts2, sys2
                sts[nrec] = t
                sys_[nrec] = y
                nrec += 1
            if (t_next - t) * sgn <= 0.0:
                nrm = 0.0
                for i in range(5, 10):
                    nrm += y[i] * y[i]
                nrm = math.sqrt(nrm)
                check_ts[icheck] = t
                logs[icheck] = math.log(nrm)
                for i in range(5, 10):
                    y[i] /= nrm
                # tangent rescaling changes f(y); refresh the FSAL stage
                _rhs(y, K[0], wr, dl)
                icheck += 1
                t_next = t0 + sgn * renorm_interval * (icheck + 1)
            if not clipped:
                hc = abs(_next_h(h, err, sgn, max_step))
        else:
            hc = abs(_shrink_h(h, err))
            if hc < 1e-13 * max(1.0, abs(t)):
                status = STEP_UNDERFLOW
                break
    return (check_ts[:icheck].copy(), logs[:icheck].copy(),
            sts[:nrec].copy(), sys_[:nrec].copy(),
            cts[:ncross].copy(), cys[:ncross].copy(),
            status, nacc, y)


@njit(cache=True, nogil=True)
def _run_exit(y0, wr, dl, half_width, tau_cutoff, rtol, atol, max_step, h0,
              max_steps):
    """Integrate until |x| >= half_width or tau = tau_cutoff.

    Counts strict momentum sign changes (tangencies are not counted).
    Returns (T, n_sign_changes, outcome, y_at_end, status, n_accepted).
    """
    n = y0.shape[0]
    y = y0.copy()
    ynew = np.empty(n)
    ytmp = np.empty(n)
    K = np.empty((16, n))
    F = np.empty((8, n))
    yev = np.empty(n)
    _rhs(y, K[0], wr, dl)

    psign = 0.0
    if y[1] > 0.0:
        psign = 1.0
    elif y[1] < 0.0:
        psign = -1.0
    nsign = 0

    t = 0.0
    hc = min(h0, tau_cutoff, max_step)  # controller step, unclipped
    nacc = 0
    ntot = 0
    status = OK
    outcome = EXIT_CUTOFF
    T = tau_cutoff
    while t < tau_cutoff:
        h = hc
        clipped = False
        if t + h > tau_cutoff:
            h = tau_cutoff - t
            clipped = True
        err = _try_step(y, h, wr, dl, K, ytmp, ynew, rtol, atol)
        ntot += 1
        if ntot > max_steps:
            status = MAX_STEPS_EXCEEDED
            break
        if math.isfinite(err) and err < 1.0:
            if abs(ynew[0]) >= half_width:
                # localize the first boundary hit inside this step
                bound = half_width if ynew[0] > 0.0 else -half_width
                _dense_coeffs(y, ynew, h, wr, dl, K, ytmp, F)
                ta, tb = 0.0, 1.0
                ga = y[0] - bound
                for _ in range(120):
                    tm = 0.5 * (ta + tb)
                    gm = _dense_eval1(F, tm, 0) - bound
                    if gm == 0.0:
                        ta = tm
                        tb = tm
                        break
                    if (gm > 0.0) == (ga > 0.0):
                        ta = tm
                    else:
                        tb = tm
                    if tb - ta < 1e-17:
                        break
                theta = tb  # first theta with |x| at/just past the bound
                _dense_eval(F, theta, yev)
                T = t + theta * h
                outcome = EXIT_RIGHT if bound > 0.0 else EXIT_LEFT
                if psign != 0.0 and yev[1] * psign < 0.0:
                    nsign += 1
                for i in range(n):
                    y[i] = yev[i]
                return T, nsign, outcome, y, status, nacc
            if psign == 0.0:
                if ynew[1] > 0.0:
                    psign = 1.0
                elif ynew[1] < 0.0:
                    psign = -1.0
            elif ynew[1] * psign < 0.0:
                nsign += 1
                psign = -psign
            t = t + h
            nacc += 1
            for i in range(n):
                y[i] = ynew[i]
                K[0, i] = K[12, i]
            if not clipped:
                hc = _next_h(h, err, 1.0, max_step)
        else:
            hc = abs(_shrink_h(h, err))
            if hc < 1e-13 * max(1.0, abs(t)):
                status = STEP_UNDERFLOW
                break
    return T, nsign, outcome, y, status, nacc
