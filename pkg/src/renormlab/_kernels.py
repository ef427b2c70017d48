"""Hot orbit loops for trigonometric lifts, jit-compiled when numba is present.

Positions are kept on the circle in [0, 1) with integer winding carried
separately, so long orbits accumulate only O(sqrt(n)) ulp of drift instead of
the O(n^2) loss a raw lift iteration would suffer.
"""

import math

import numpy as np

try:
    from numba import njit as _njit

    def _jit(f):
        return _njit(cache=True)(f)
except Exception:  # pragma: no cover - numba is an optional accelerator
    def _jit(f):
        return f


@_jit
def lift_run(u0, q, mean, cos_c, sin_c):
    """q lift steps from circle coordinate u0; returns (u_q, winding)."""
    u = u0
    wind = 0
    K = len(cos_c)
    for _ in range(q):
        acc_re = 0.0
        acc_im = 0.0
        wr = math.cos(2.0 * math.pi * u)
        wi = math.sin(2.0 * math.pi * u)
        for k in range(K - 1, -1, -1):
            ar = acc_re + cos_c[k]
            ai = acc_im - sin_c[k]
            acc_re = ar * wr - ai * wi
            acc_im = ar * wi + ai * wr
        v = u + mean + acc_re
        n = math.floor(v)
        u = v - n
        wind += int(n)
    return u, wind


@_jit
def orbit_positions(x0, n, mean, cos_c, sin_c):
    out = np.empty(n + 1)
    u = x0 % 1.0
    out[0] = u
    K = len(cos_c)
    for i in range(1, n + 1):
        acc_re = 0.0
        acc_im = 0.0
        wr = math.cos(2.0 * math.pi * u)
        wi = math.sin(2.0 * math.pi * u)
        for k in range(K - 1, -1, -1):
            ar = acc_re + cos_c[k]
            ai = acc_im - sin_c[k]
            acc_re = ar * wr - ai * wi
            acc_im = ar * wi + ai * wr
        v = u + mean + acc_re
        u = v - math.floor(v)
        out[i] = u
    return out


@_jit
def rho_enclosure_run(x0, n_iter, mean, cos_c, sin_c, rat_tol):
    """One-sided rational bounds on the rotation number from the orbit of x0.

    Returns (lo_p, lo_q, hi_p, hi_q, rat_p, rat_q); rat_q == 0 means no
    periodic return within rat_tol was seen.
    """
    u = x0 % 1.0
    base = u
    wind = 0
    lo_p = -(10 ** 9)
    lo_q = 1
    hi_p = 10 ** 9
    hi_q = 1
    rat_p = 0
    rat_q = 0
    K = len(cos_c)
    for n in range(1, n_iter + 1):
        acc_re = 0.0
        acc_im = 0.0
        wr = math.cos(2.0 * math.pi * u)
        wi = math.sin(2.0 * math.pi * u)
        for k in range(K - 1, -1, -1):
            ar = acc_re + cos_c[k]
            ai = acc_im - sin_c[k]
            acc_re = ar * wr - ai * wi
            acc_im = ar * wi + ai * wr
        v = u + mean + acc_re
        m = math.floor(v)
        u = v - m
        wind += int(m)
        disp = wind + (u - base)
        f = math.floor(disp)
        fi = int(f)
        if fi * lo_q > lo_p * n:
            lo_p = fi
            lo_q = n
        if (fi + 1) * hi_q < hi_p * n:
            hi_p = fi + 1
            hi_q = n
        if rat_q == 0:
            r = disp - math.floor(disp + 0.5)
            if -rat_tol < r < rat_tol:
                rat_p = int(math.floor(disp + 0.5))
                rat_q = n
    return lo_p, lo_q, hi_p, hi_q, rat_p, rat_q
