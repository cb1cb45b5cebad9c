"""Compiled inner loops for the time-stepping schemes.

Every kernel mirrors, operation for operation, the scalar reference
implementations in :mod:`obliquebm.integrator`, so compiled and interpreted
stepping agree bit for bit.  Kernels drawing their own noise consume a
``numpy.random.Generator`` in the same order as
:func:`obliquebm.model.gaussian_increments` fills its array, which keeps
single-path, Monte Carlo, and long ergodic runs on one stream contract.

All kernels release the GIL; the Monte Carlo driver runs them from a thread
pool.  ``error_model="numpy"`` gives IEEE semantics for division (needed by
the bounded cross-drift functions at a zero coordinate).
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True, error_model="numpy")


@njit(**_JIT)
def substep(b, adt):
    """Positive root of x' = b + adt/x' (adt = alpha*dt > 0).

    The b < 0 branch uses the rationalized form to avoid cancellation.
    Monotone nondecreasing in b, which is what makes pathwise comparison
    arguments survive discretization.
    """
    s = np.sqrt(b * b + 4.0 * adt)
    if b >= 0.0:
        return 0.5 * (b + s)
    return (adt + adt) / (s - b)


@njit(**_JIT)
def path_loop(x0, y0, incr, dt, alpha, beta, gamma, delta, mu, nu,
              clamp, thr, stride, times, xs, ys, iix, iiy, hits):
    """Oblique-repulsion steps over an explicit increment array.

    Own-coordinate singular drift is implicit (substep); cross drift is
    explicit with the reciprocal clamped at ``clamp``.  Records every
    ``stride``-th state (plus start and end) into the output arrays and the
    first times the pre-repulsion predictor b = x + dw + b_extra*dt falls
    below ``thr`` into ``hits`` = [x_hit, y_hit, corner_hit] (-1 means
    never).  The predictor is the right hit detector: the implicit root
    itself stays above ~sqrt(alpha*dt) no matter how negative the noise, so
    testing the post-step value would miss nearly every sub-threshold
    excursion of the underlying path.  Returns the number of recorded rows.
    """
    n = incr.shape[0]
    adt = alpha * dt
    ddt = delta * dt
    x = x0
    y = y0
    ii_x = 0.0
    ii_y = 0.0
    fx = 1.0 / max(x, clamp)
    fy = 1.0 / max(y, clamp)
    times[0] = 0.0
    xs[0] = x
    ys[0] = y
    iix[0] = 0.0
    iiy[0] = 0.0
    k = 1
    for i in range(n):
        bex = beta / max(y, clamp) - mu
        bey = gamma / max(x, clamp) - nu
        bx = x + incr[i, 0] + bex * dt
        by = y + incr[i, 1] + bey * dt
        x = substep(bx, adt)
        y = substep(by, ddt)
        fx_new = 1.0 / max(x, clamp)
        fy_new = 1.0 / max(y, clamp)
        ii_x += 0.5 * (fx + fx_new) * dt
        ii_y += 0.5 * (fy + fy_new) * dt
        fx = fx_new
        fy = fy_new
        t = (i + 1) * dt
        if bx < thr:
            if hits[0] < 0.0:
                hits[0] = t
            if by < thr and hits[2] < 0.0:
                hits[2] = t
        if by < thr and hits[1] < 0.0:
            hits[1] = t
        if (i + 1) % stride == 0 or i == n - 1:
            times[k] = t
            xs[k] = x
            ys[k] = y
            iix[k] = ii_x
            iiy[k] = ii_y
            k += 1
    return k


@njit(**_JIT)
def mc_path_loop(gen, n, x0, y0, dt, sqdt, alpha, beta, gamma, delta, mu, nu,
                 clamp, thr):
    """Single path drawing its own noise; returns endpoint summaries only.

    Output: (x_end, y_end, ii_x, ii_y, t_x_hit, t_y_hit, t_corner_hit),
    hit times -1.0 when the predictor never crossed the threshold.
    Bit-identical to path_loop fed with gaussian_increments of the same
    stream.
    """
    adt = alpha * dt
    ddt = delta * dt
    x = x0
    y = y0
    ii_x = 0.0
    ii_y = 0.0
    fx = 1.0 / max(x, clamp)
    fy = 1.0 / max(y, clamp)
    tx = -1.0
    ty = -1.0
    tc = -1.0
    for i in range(n):
        dw = gen.standard_normal() * sqdt
        dc = gen.standard_normal() * sqdt
        bex = beta / max(y, clamp) - mu
        bey = gamma / max(x, clamp) - nu
        bx = x + dw + bex * dt
        by = y + dc + bey * dt
        x = substep(bx, adt)
        y = substep(by, ddt)
        fx_new = 1.0 / max(x, clamp)
        fy_new = 1.0 / max(y, clamp)
        ii_x += 0.5 * (fx + fx_new) * dt
        ii_y += 0.5 * (fy + fy_new) * dt
        fx = fx_new
        fy = fy_new
        if bx < thr:
            t = (i + 1) * dt
            if tx < 0.0:
                tx = t
            if by < thr and tc < 0.0:
                tc = t
        if by < thr and ty < 0.0:
            ty = (i + 1) * dt
    return x, y, ii_x, ii_y, tx, ty, tc


@njit(**_JIT)
def ergodic_loop(gen, x0, y0, dt, sqdt, alpha, beta, gamma, delta, mu, nu,
                 clamp, burn_steps, stride_steps, out):
    """One long trajectory; after ``burn_steps`` records (x, y) into ``out``
    every ``stride_steps`` steps until out is full."""
    adt = alpha * dt
    ddt = delta * dt
    x = x0
    y = y0
    n_keep = out.shape[0]
    total = burn_steps + n_keep * stride_steps
    k = 0
    for i in range(total):
        dw = gen.standard_normal() * sqdt
        dc = gen.standard_normal() * sqdt
        bex = beta / max(y, clamp) - mu
        bey = gamma / max(x, clamp) - nu
        bx = x + dw + bex * dt
        by = y + dc + bey * dt
        x = substep(bx, adt)
        y = substep(by, ddt)
        j = i + 1 - burn_steps
        if j > 0 and j % stride_steps == 0:
            out[k, 0] = x
            out[k, 1] = y
            k += 1
    return x, y


@njit(**_JIT)
def psi_path_loop(x0, z0, incr, dt, alpha, beta, gamma, delta, mu, nu, eps,
                  clamp, thr, stride, times, xs, ys, iix, iiy, hits):
    """Lipschitz-truncated construction on the pair (X, Z), Z = alpha*Y - gamma*X.

    The bounded cross rate psi = 1/max(gamma*x + z, alpha*eps) enters X's
    drift as alpha*beta*psi and Z's as alpha*(alpha*delta - beta*gamma)*psi;
    X keeps its own singular term implicit, Z is fully explicit.  The
    reported second coordinate is Y = (gamma*X + Z)/alpha, which may leave
    the quadrant transiently (it only converges to the true nonnegative Y
    as eps, dt -> 0), so integrals use the clamped value.  X hits are
    detected on the pre-repulsion predictor as in path_loop; Y carries no
    repulsion correction, so its own value is the detector.
    """
    n = incr.shape[0]
    adt = alpha * dt
    zdrift = gamma * mu - alpha * nu
    zcoef = alpha * (alpha * delta - beta * gamma)
    aeps = alpha * eps
    x = x0
    z = z0
    y = (gamma * x + z) / alpha
    ii_x = 0.0
    ii_y = 0.0
    fx = 1.0 / max(x, clamp)
    fy = 1.0 / max(y, clamp)
    times[0] = 0.0
    xs[0] = x
    ys[0] = y
    iix[0] = 0.0
    iiy[0] = 0.0
    k = 1
    for i in range(n):
        psi = 1.0 / max(gamma * x + z, aeps)
        bex = alpha * beta * psi - mu
        bx = x + incr[i, 0] + bex * dt
        z = z + (alpha * incr[i, 1] - gamma * incr[i, 0]) \
            + (zcoef * psi + zdrift) * dt
        x = substep(bx, adt)
        y = (gamma * x + z) / alpha
        fx_new = 1.0 / max(x, clamp)
        fy_new = 1.0 / max(y, clamp)
        ii_x += 0.5 * (fx + fx_new) * dt
        ii_y += 0.5 * (fy + fy_new) * dt
        fx = fx_new
        fy = fy_new
        t = (i + 1) * dt
        if bx < thr:
            if hits[0] < 0.0:
                hits[0] = t
            if y < thr and hits[2] < 0.0:
                hits[2] = t
        if y < thr and hits[1] < 0.0:
            hits[1] = t
        if (i + 1) % stride == 0 or i == n - 1:
            times[k] = t
            xs[k] = x
            ys[k] = y
            iix[k] = ii_x
            iiy[k] = ii_y
            k += 1
    return k


@njit(**_JIT)
def hn_path_loop(x0, y0, incr, dt, alpha, beta, gamma, delta, mu, nu, n_trunc,
                 clamp, thr, stride, times, xs, ys, iix, iiy, hits):
    """Bounded-cross-rate construction: cross drifts through
    h_n(v) = min(n - 1, (1 - 1/n)/v), own singular terms implicit.

    h_n is exactly monotone (nonincreasing in v, nondecreasing in n) at
    float level, so with common noise the recorded paths decrease
    coordinatewise as n grows -- the discrete version of the monotone
    construction this scheme comes from.
    """
    n = incr.shape[0]
    adt = alpha * dt
    ddt = delta * dt
    one_minus = 1.0 - 1.0 / n_trunc
    cap = n_trunc - 1.0
    x = x0
    y = y0
    ii_x = 0.0
    ii_y = 0.0
    fx = 1.0 / max(x, clamp)
    fy = 1.0 / max(y, clamp)
    times[0] = 0.0
    xs[0] = x
    ys[0] = y
    iix[0] = 0.0
    iiy[0] = 0.0
    k = 1
    for i in range(n):
        bex = beta * min(cap, one_minus / y) - mu
        bey = gamma * min(cap, one_minus / x) - nu
        bx = x + incr[i, 0] + bex * dt
        by = y + incr[i, 1] + bey * dt
        x = substep(bx, adt)
        y = substep(by, ddt)
        fx_new = 1.0 / max(x, clamp)
        fy_new = 1.0 / max(y, clamp)
        ii_x += 0.5 * (fx + fx_new) * dt
        ii_y += 0.5 * (fy + fy_new) * dt
        fx = fx_new
        fy = fy_new
        t = (i + 1) * dt
        if bx < thr:
            if hits[0] < 0.0:
                hits[0] = t
            if by < thr and hits[2] < 0.0:
                hits[2] = t
        if by < thr and hits[1] < 0.0:
            hits[1] = t
        if (i + 1) % stride == 0 or i == n - 1:
            times[k] = t
            xs[k] = x
            ys[k] = y
            iix[k] = ii_x
            iiy[k] = ii_y
            k += 1
    return k


@njit(**_JIT)
def deterministic_loop(x1, y1, t1, n, dt, alpha, beta, gamma, delta,
                       clamp, times, xs, ys, iix, iiy):
    """Noise-free stepping from state (x1, y1) at time t1 over n further steps.

    Same drift treatment as path_loop with zero increments; fills the output
    arrays starting at index 0 with the initial state.
    """
    adt = alpha * dt
    ddt = delta * dt
    x = x1
    y = y1
    ii_x = 0.0
    ii_y = 0.0
    fx = 1.0 / max(x, clamp)
    fy = 1.0 / max(y, clamp)
    times[0] = t1
    xs[0] = x
    ys[0] = y
    iix[0] = 0.0
    iiy[0] = 0.0
    for i in range(n):
        bex = beta / max(y, clamp)
        bey = gamma / max(x, clamp)
        bx = x + bex * dt
        by = y + bey * dt
        x = substep(bx, adt)
        y = substep(by, ddt)
        fx_new = 1.0 / max(x, clamp)
        fy_new = 1.0 / max(y, clamp)
        ii_x += 0.5 * (fx + fx_new) * dt
        ii_y += 0.5 * (fy + fy_new) * dt
        fx = fx_new
        fy = fy_new
        times[i + 1] = t1 + (i + 1) * dt
        xs[i + 1] = x
        ys[i + 1] = y
        iix[i + 1] = ii_x
        iiy[i + 1] = ii_y


@njit(**_JIT)
def comparison_loop(alpha, v, dt, out):
    """Scalar singular equation x(t) = v(t) + alpha*int_0^t ds/x driven by the
    piecewise-linear v given at the grid nodes; implicit substep throughout."""
    adt = alpha * dt
    x = v[0]
    out[0] = x
    for i in range(v.size - 1):
        bex = (v[i + 1] - v[i]) / dt
        b = x + bex * dt
        x = substep(b, adt)
        out[i + 1] = x
