"""Continued fractions, the Gauss map, and rotation-number estimators.

Two independent estimators are provided:

* ``rotation_number_orbit``   -- rigorous one-sided rational enclosures from
  a single orbit (the displacement of the lift over n steps brackets the
  rotation number within 1/n, and near-returns sharpen this to ~1/q^2);
* ``rotation_number_heights`` -- the continued-fraction digits read off the
  closest-return dynamics (the heights of the successive first-return maps).

Conventions: rotation numbers live in (0, 1), digits are positive integers,
and ``[r0, r1, ...]`` denotes 1/(r0 + 1/(r1 + ...)).  Convergents follow the
truncated-expansion indexing p0/q0 = 1/r0; the dynamical return times
(Q0 = 1, Q1 = r0, Q_{k+1} = r_k Q_k + Q_{k-1}) are exposed separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .analytic import CircleLift
from .errors import DomainError, FixedPointOfEta, InsufficientDigits, NotMonotone

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0
SILVER_MEAN = math.sqrt(2.0) - 1.0

RATIONAL_RETURN_TOL = 1e-12
ITERATION_CAP = 10 ** 7


def gauss(x):
    """Gauss map {1/x} on (0, 1)."""
    if isinstance(x, Fraction):
        if not 0 < x < 1:
            raise DomainError("gauss needs x in (0,1)")
        inv = 1 / x
        return inv - math.floor(inv)
    if not 0.0 < x < 1.0:
        raise DomainError("gauss needs x in (0,1), got %r" % (x,))
    inv = 1.0 / x
    return inv - math.floor(inv)


def gauss_digit(x):
    """First continued-fraction digit and the Gauss image of x."""
    if isinstance(x, Fraction):
        if not 0 < x < 1:
            raise DomainError("gauss needs x in (0,1)")
        inv = 1 / x
        d = math.floor(inv)
        return int(d), inv - d
    if not 0.0 < x < 1.0:
        raise DomainError("gauss needs x in (0,1), got %r" % (x,))
    inv = 1.0 / x
    d = math.floor(inv)
    return int(d), inv - d


@dataclass(frozen=True)
class ContinuedFraction:
    """Digit sequence of a number in (0, 1), possibly truncated."""
    digits: tuple
    exact: bool = False  # True when the digits terminate the expansion

    def __post_init__(self):
        if any(int(d) != d or d < 1 for d in self.digits):
            raise ValueError("digits must be positive integers")
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))

    @classmethod
    def from_value(cls, x, n, rational_tol=1e-13):
        if not 0.0 < x < 1.0:
            raise DomainError("value must lie in (0,1)")
        digits = []
        y = x
        for _ in range(n):
            inv = 1.0 / y
            d = math.floor(inv)
            y = inv - d
            digits.append(int(d))
            if y < rational_tol:
                return cls(tuple(digits), exact=True)
        return cls(tuple(digits))

    @property
    def value(self):
        return float(self.fraction())

    def fraction(self, k=None):
        """Exact value of the first k digits (all digits when k is None)."""
        k = len(self.digits) if k is None else k
        if k > len(self.digits):
            raise InsufficientDigits("have %d digits, need %d"
                                     % (len(self.digits), k))
        v = Fraction(0)
        for d in reversed(self.digits[:k]):
            v = Fraction(1, 1) / (d + v)
        return v

    def __len__(self):
        return len(self.digits)


def convergents(cf, n):
    """(p_k, q_k) for k < n, with p_k/q_k the value of the first k+1 digits."""
    if isinstance(cf, ContinuedFraction):
        digits = cf.digits
    else:
        digits = tuple(cf)
    if len(digits) < n:
        raise InsufficientDigits("have %d digits, need %d" % (len(digits), n))
    out = []
    p2, p1 = 1, 0   # p_{-2}, p_{-1}
    q2, q1 = 0, 1
    for k in range(n):
        r = digits[k]
        p = r * p1 + p2
        q = r * q1 + q2
        out.append((p, q))
        p2, p1 = p1, p
        q2, q1 = q1, q
    return out


def dynamical_returns(digits, m):
    """Closest-return numerators/denominators P_k, Q_k for k <= m.

    Q_0 = 1, Q_1 = r_0 and Q_{k+1} = r_k Q_k + Q_{k-1}; these are the return
    times of the orbit of 0 for a circle map with the given digit sequence.
    """
    if len(digits) < m:
        raise InsufficientDigits("have %d digits, need %d" % (len(digits), m))
    P = [0, 1]
    Q = [1, int(digits[0])] if m >= 1 else [1]
    for k in range(1, m):
        Q.append(int(digits[k]) * Q[-1] + Q[-2])
        P.append(int(digits[k]) * P[-1] + P[-2])
    return P[:m + 1], Q[:m + 1]


# ---------------------------------------------------------------------------
# Orbit estimator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RotationEstimate:
    value: float
    err: float
    rational: Fraction | None = None

    def __float__(self):
        return self.value


def _check_monotone(g, grid=2048):
    x = np.arange(grid) / grid
    d = g.eval(x, 1)
    if np.min(d) < -1e-7 * max(np.max(np.abs(d)), 1e-30):
        raise NotMonotone("lift derivative reaches %.3g" % float(np.min(d)))


def _enclosure_generic(g, x0, n_iter, rat_tol):
    u = x0 % 1.0
    base = u
    wind = 0
    lo = (-10 ** 9, 1)
    hi = (10 ** 9, 1)
    rat = None
    for n in range(1, n_iter + 1):
        v = g.eval(u)
        m = math.floor(v)
        u = v - m
        wind += m
        disp = wind + (u - base)
        f = int(math.floor(disp))
        if f * lo[1] > lo[0] * n:
            lo = (f, n)
        if (f + 1) * hi[1] < hi[0] * n:
            hi = (f + 1, n)
        if rat is None and abs(disp - round(disp)) < rat_tol:
            rat = (int(round(disp)), n)
    return lo, hi, rat


def rotation_number_orbit(g, n_iter=100000, refine=True, x0=0.0,
                          rational_tol=RATIONAL_RETURN_TOL):
    """Rotation number of a monotone lift from the orbit of x0.

    Without ``refine`` this is the n-step displacement with the 1/n error
    bound; with it, one-sided rational bounds are accumulated along the
    orbit, which tightens to ~1/q^2 at closest returns.  An exact periodic
    return (within ``rational_tol``) is reported as a rational.
    """
    _check_monotone(g)
    if not refine:
        if isinstance(g, CircleLift):
            u, wind = _kernels.lift_run(x0 % 1.0, n_iter, g.mean,
                                        g.cos_coeffs, g.sin_coeffs)
            disp = wind + (u - x0 % 1.0)
        else:
            u = x0 % 1.0
            wind = 0
            for _ in range(n_iter):
                v = g.eval(u)
                m = math.floor(v)
                u, wind = v - m, wind + m
            disp = wind + (u - x0 % 1.0)
        return RotationEstimate(disp / n_iter, 1.0 / n_iter)
    if isinstance(g, CircleLift):
        lo_p, lo_q, hi_p, hi_q, rat_p, rat_q = _kernels.rho_enclosure_run(
            x0 % 1.0, n_iter, g.mean, g.cos_coeffs, g.sin_coeffs, rational_tol)
        lo, hi, rat = (lo_p, lo_q), (hi_p, hi_q), \
            ((rat_p, rat_q) if rat_q else None)
    else:
        lo, hi, rat = _enclosure_generic(g, x0, n_iter, rational_tol)
    if rat is not None:
        frac = Fraction(rat[0], rat[1])
        return RotationEstimate(float(frac), 0.0, rational=frac)
    lo_v = lo[0] / lo[1]
    hi_v = hi[0] / hi[1]
    return RotationEstimate(0.5 * (lo_v + hi_v), 0.5 * max(hi_v - lo_v, 0.0))


# ---------------------------------------------------------------------------
# Heights estimator
# ---------------------------------------------------------------------------

def _height_stop(msg, digits, pq):
    exc = FixedPointOfEta("%s after digits %r" % (msg, list(digits)))
    exc.digits = tuple(digits)
    exc.locked_fraction = pq
    return exc


def _return_step(g, zi, zf, q, p):
    """Apply the q-step return map minus the deck translation p.

    Points near 0 are carried as an exact integer part ``zi`` plus a circle
    coordinate ``zf`` in [0, 1), so deep returns keep full precision.
    """
    if isinstance(g, CircleLift):
        u, wind = _kernels.lift_run(zf, q, g.mean, g.cos_coeffs, g.sin_coeffs)
    else:
        u = zf
        wind = 0
        for _ in range(q):
            v = g.eval(u)
            m = math.floor(v)
            u, wind = v - m, wind + m
    return zi + wind - p, u


def rotation_number_heights(g, depth=20, q_cap=ITERATION_CAP,
                            rational_tol=RATIONAL_RETURN_TOL):
    """Continued-fraction digits of the rotation number from return dynamics.

    Digit r_k counts how many times the Q_k-step first-return map moves the
    previous closest-return point before it crosses 0 -- the height of the
    k-th renormalization level, read directly off the orbit.  Raises
    FixedPointOfEta when a periodic (rational) return is reached.
    """
    _check_monotone(g)
    first = g.eval(0.0)
    m0 = first - math.floor(first)
    if not 0.0 < m0 < 1.0:
        raise DomainError("lift must move 0 off the integer lattice")
    # m_{-1} = -1 at (Q, P) = (0, 1); m_0 = frac(g(0)) at (Q, P) = (1, floor)
    zi_prev, zf_prev = -1, 0.0
    Q_prev, P_prev = 0, 1
    zi_cur, zf_cur = 0, m0
    Q_cur, P_cur = 1, int(math.floor(first))
    digits = []
    side_prev = -1.0
    while len(digits) < depth:
        r = 0
        zi, zf = zi_prev, zf_prev
        last = zi + zf
        while True:
            nzi, nzf = _return_step(g, zi, zf, Q_cur, P_cur)
            val = nzi + nzf
            if abs(val) < rational_tol:
                raise _height_stop(
                    "rational rotation number %d/%d reached" % (P_cur, Q_cur),
                    digits, (P_cur, Q_cur))
            if math.copysign(1.0, val) == side_prev:
                if abs(val - last) < 0.01 * rational_tol:
                    # the return map stalled at an attracting fixed point
                    raise _height_stop("return map has a fixed point",
                                       digits, (P_cur, Q_cur))
                r += 1
                zi, zf = nzi, nzf
                last = val
                if r * Q_cur > q_cap:
                    raise _height_stop("height exceeded iteration budget",
                                       digits, (P_cur, Q_cur))
            else:
                break
        if r == 0:
            raise _height_stop("degenerate height 0", digits, (P_cur, Q_cur))
        digits.append(r)
        Q_next = r * Q_cur + Q_prev
        P_next = r * P_cur + P_prev
        zi_prev, zf_prev = zi_cur, zf_cur
        Q_prev, P_prev = Q_cur, P_cur
        zi_cur, zf_cur = zi, zf
        Q_cur, P_cur = Q_next, P_next
        side_prev = -side_prev
        if Q_cur > q_cap:
            break
    return ContinuedFraction(tuple(digits))


def return_points(g, depth, q_cap=ITERATION_CAP):
    """Signed closest-return coordinates m_k = lift^{Q_k}(0) - P_k, k <= depth."""
    cf = rotation_number_heights(g, depth=depth, q_cap=q_cap)
    P, Q = dynamical_returns(cf.digits, len(cf))
    out = []
    for p, q in zip(P, Q):
        zi, zf = _return_step(g, 0, 0.0, q, p)
        out.append(zi + zf)
    return out, P, Q
