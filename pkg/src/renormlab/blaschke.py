"""Degree-5 Blaschke products restricting to bi-cubic circle maps.

The family is B(z) = e^{2 pi i t} z^3 (z-p)/(1-conj(p) z) (z-q)/(1-conj(q) z)
with |p|, |q| > 1: both extra factors carry their pole inside the disk, so
the restriction to |z| = 1 has topological degree 3 - 2 = 1.  On the circle
the logarithmic derivative z B'(z)/B(z) is real; a double zero at z = 1 and
at z = e^{2 pi i a} makes the restriction a circle homeomorphism with two
cubic critical points.  ``solve_critical`` enforces those four real
conditions by a damped Newton iteration in (Re p, Im p, Re q, Im q);
``fit_type`` then drives (t, a) to a target rotation number and arc.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .analytic import CircleLift
from .combinatorics import combinatorial_type
from .errors import (
    BasinEscape,
    NewtonDiverged,
    NotHomeomorphism,
    PoleHit,
    SearchFailed,
    WrongDegree,
)
from .rotation import GOLDEN_MEAN, rotation_number_orbit

TWO_PI = 2.0 * math.pi
MODULUS_MARGIN = 1e-9


@dataclass(frozen=True)
class BlaschkeParams:
    t: float
    p: complex
    q: complex

    def __post_init__(self):
        if abs(self.p) <= 1.0 + MODULUS_MARGIN or \
           abs(self.q) <= 1.0 + MODULUS_MARGIN:
            raise BasinEscape("zeros must stay outside the closed disk")
        object.__setattr__(self, "t", float(self.t) % 1.0)

    def with_t(self, t):
        return BlaschkeParams(t, self.p, self.q)

    def to_dict(self):
        return {"t": self.t, "p_re": self.p.real, "p_im": self.p.imag,
                "q_re": self.q.real, "q_im": self.q.imag}

    @classmethod
    def from_dict(cls, d):
        return cls(d["t"], complex(d["p_re"], d["p_im"]),
                   complex(d["q_re"], d["q_im"]))


def eval_blaschke(params, z):
    """B(z); poles sit at 1/conj(p), 1/conj(q) inside the disk."""
    z = np.asarray(z, dtype=complex)
    pb, qb = np.conj(params.p), np.conj(params.q)
    d1 = 1.0 - pb * z
    d2 = 1.0 - qb * z
    if np.any(np.abs(d1) < 1e-14) or np.any(np.abs(d2) < 1e-14):
        raise PoleHit("evaluation at a pole of the product")
    out = np.exp(2j * np.pi * params.t) * z ** 3 \
        * (z - params.p) / d1 * (z - params.q) / d2
    return out if out.ndim else complex(out)


def deriv_blaschke(params, z):
    """B'(z) via the logarithmic derivative."""
    z = np.asarray(z, dtype=complex)
    B = eval_blaschke(params, z)
    return B * _log_deriv(params, z) / z


def _factor_terms(w, z):
    """T_w(z) = z (1-|w|^2) / ((z-w)(1-conj(w) z)) and its z-derivative."""
    wb = np.conj(w)
    m = 1.0 - abs(w) ** 2
    den = (z - w) * (1.0 - wb * z)
    T = z * m / den
    dT = m * (wb * z * z - w) / den ** 2
    return T, dT


def _log_deriv(params, z):
    Tp, _ = _factor_terms(params.p, z)
    Tq, _ = _factor_terms(params.q, z)
    return 3.0 + Tp + Tq


def circle_derivative(params, x, with_slope=False):
    """h'(x) of the circle restriction lift h, real by circle symmetry.

    With ``with_slope`` also returns d/dx h'(x).
    """
    z = np.exp(2j * np.pi * np.asarray(x, dtype=float))
    Tp, dTp = _factor_terms(params.p, z)
    Tq, dTq = _factor_terms(params.q, z)
    val = (3.0 + Tp + Tq).real
    if not with_slope:
        return val
    slope = ((dTp + dTq) * 2j * np.pi * z).real
    return val, slope


# ---------------------------------------------------------------------------
# critical placement
# ---------------------------------------------------------------------------

def _residual(v, a):
    params = BlaschkeParams(0.0, complex(v[0], v[1]), complex(v[2], v[3]))
    out = np.empty(4)
    for i, x in enumerate((0.0, a)):
        val, slope = circle_derivative(params, x, with_slope=True)
        out[2 * i] = val
        out[2 * i + 1] = slope / TWO_PI
    return out


def _newton_critical(v0, a, max_steps=100, tol=1e-13):
    v = np.asarray(v0, dtype=float).copy()
    f = _residual(v, a)
    for _ in range(max_steps):
        if np.max(np.abs(f)) < tol:
            return v
        J = np.empty((4, 4))
        h = 1e-7
        for j in range(4):
            vp = v.copy()
            vp[j] += h
            vm = v.copy()
            vm[j] -= h
            J[:, j] = (_residual(vp, a) - _residual(vm, a)) / (2 * h)
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged("singular Jacobian") from exc
        lam = 1.0
        base = np.max(np.abs(f))
        for _ in range(60):
            vt = v - lam * step
            if math.hypot(vt[0], vt[1]) <= 1.0 + MODULUS_MARGIN or \
               math.hypot(vt[2], vt[3]) <= 1.0 + MODULUS_MARGIN:
                lam *= 0.5
                continue
            ft = _residual(vt, a)
            if np.max(np.abs(ft)) < base:
                v, f = vt, ft
                break
            lam *= 0.5
        else:
            raise NewtonDiverged("damping exhausted at residual %.3g" % base)
    if np.max(np.abs(f)) < tol:
        return v
    raise NewtonDiverged("no convergence, residual %.3g"
                         % float(np.max(np.abs(f))))


def solve_critical(guess, a, tol=1e-13):
    """Parameters with double zeros of the circle derivative at 0 and a.

    Newton from ``guess``; when that diverges, a homotopy walks the target
    angle from the symmetric configuration a = 1/2 (which has the exact
    solution p = sqrt(5), q = -sqrt(5)).  Validates |B'| < 1e-12 at both
    critical points.
    """
    if not 0.0 < a < 1.0:
        raise ValueError("a must lie in (0, 1)")
    v0 = np.array([guess.p.real, guess.p.imag, guess.q.real, guess.q.imag])
    try:
        v = _newton_critical(v0, a, tol=tol)
    except NewtonDiverged:
        v = np.array([math.sqrt(5.0), 0.0,
                      math.sqrt(5.0) * math.cos(TWO_PI * 0.5),
                      math.sqrt(5.0) * math.sin(TWO_PI * 0.5)])
        steps = max(2, int(abs(a - 0.5) / 0.05) + 1)
        for s in range(1, steps + 1):
            aa = 0.5 + (a - 0.5) * s / steps
            v = _newton_critical(v, aa, tol=tol)
    params = BlaschkeParams(guess.t, complex(v[0], v[1]),
                            complex(v[2], v[3]))
    for x in (0.0, a):
        res = abs(deriv_blaschke(params, cmath.exp(2j * math.pi * x)))
        if res > 1e-12:
            raise NewtonDiverged(
                "|B'| = %.3g at critical angle %.6g" % (res, x))
    return params


def symmetric_bicubic():
    """The exact a = 1/2 configuration: p = sqrt(5), q = -sqrt(5)."""
    return BlaschkeParams(0.0, math.sqrt(5.0) + 0j, -math.sqrt(5.0) + 0j)


# ---------------------------------------------------------------------------
# circle restriction as a lift
# ---------------------------------------------------------------------------

def winding_number(params, samples=4096):
    x = np.arange(samples) / samples
    return float(np.mean(circle_derivative(params, x)))


def circle_lift(params, samples=256, max_samples=1 << 16,
                monotone_tol=1e-10):
    """Lift of x -> arg B(e^{2 pi i x}) / (2 pi) as a CircleLift.

    The derivative h' is sampled on uniform grids and integrated termwise in
    Fourier space; the additive constant is anchored at h(0) = arg B(1)/2pi
    reduced to [0, 1).  Degree and monotonicity are verified.
    """
    n = samples
    while True:
        x = np.arange(n) / n
        d = circle_derivative(params, x)
        spec = np.fft.rfft(d - 1.0) / n
        mags = np.abs(spec)
        lead = max(mags.max() if mags.size else 0.0, 1e-6)
        m = max(1, len(mags) // 10)
        if np.max(mags[-m:]) <= 1e-14 * lead or n >= max_samples:
            break
        n *= 2
    if n >= max_samples:
        raise WrongDegree("circle derivative not resolved at %d samples" % n)
    scale = float(np.max(np.abs(d)))
    if float(np.min(d)) < -monotone_tol * max(scale, 1.0):
        raise NotHomeomorphism(
            "circle derivative reaches %.3g" % float(np.min(d)))
    wind = 1.0 + spec[0].real
    if abs(wind - 1.0) > 1e-8:
        raise WrongDegree("winding %.12g != 1" % wind)
    k = np.arange(1, len(spec))
    coef = spec[1:] / (2j * np.pi * k)
    cos_c = 2.0 * coef.real
    sin_c = -2.0 * coef.imag
    payload = CircleLift(0.0, cos_c, sin_c)
    anchor = (cmath.phase(eval_blaschke(params, 1.0 + 0j)) / TWO_PI) % 1.0
    mean = anchor - payload.periodic(0.0)
    return CircleLift(float(mean), cos_c, sin_c)


# ---------------------------------------------------------------------------
# rotation number / type targeting
# ---------------------------------------------------------------------------

def _measure_rho(params, n_iter):
    return rotation_number_orbit(circle_lift(params), n_iter=n_iter)


def fit_rotation(params, rho_target, tol=1e-7, n_iter=200000,
                 max_bisect=64):
    """Tune t (p, q fixed) so the circle restriction has the target rotation
    number.  The measured rho is nondecreasing in t and sweeps one full
    cycle as t covers [0, 1), so bisection runs on the circular position
    relative to the t = 0 measurement."""
    lift0 = circle_lift(params.with_t(0.0))

    def rho_of(t):
        return rotation_number_orbit(lift0.rotated(t), n_iter=n_iter).value

    rho0 = rho_of(0.0)
    target_key = (rho_target - rho0) % 1.0
    lo, hi = 0.0, 1.0
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        key = (rho_of(mid) - rho0) % 1.0
        if key < target_key:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    t = 0.5 * (lo + hi)
    est = rho_of(t)
    if abs((est - rho_target) % 1.0) > tol and \
       abs((rho_target - est) % 1.0) > tol:
        raise SearchFailed(
            "rotation fit stalled at %.12g (target %.12g)" % (est, rho_target))
    return params.with_t(t)


def measure_arc(params, orbit_len=2000000):
    """Rotation-coordinate arc of the free critical point of the lift."""
    lift = circle_lift(params)
    ct = combinatorial_type(lift, orbit_len=orbit_len)
    if len(ct.arcs) != 2:
        raise NotHomeomorphism("expected a bi-cubic restriction")
    return ct.arcs[0], ct.arc_errors[0]


def fit_type(rho_target, c_target, tol_rho=1e-7, tol_c=1e-5,
             budget=200, guess=None, n_iter=400000):
    """Blaschke parameters whose restriction carries the target rotation
    number and marked arc, by alternating the two one-dimensional solves.

    The inner stage places the critical points (Newton on p, q) and tunes t
    for the rotation number; the outer stage moves the free critical angle
    a by a secant iteration on the measured arc c(a).
    """
    if not 0.0 < c_target < 1.0:
        raise ValueError("c_target must lie in (0,1)")
    a = c_target
    params = guess if guess is not None else symmetric_bicubic()
    evals = 0
    history = []

    def measure(a_val):
        nonlocal params, evals
        params = solve_critical(params, a_val)
        params = fit_rotation(params, rho_target, tol=tol_rho,
                              n_iter=n_iter)
        c, err = measure_arc(params)
        evals += 1
        if evals > budget:
            raise SearchFailed("evaluation budget exhausted")
        history.append((a_val, c))
        return c

    c = measure(a)
    if abs(c - c_target) <= tol_c:
        return params
    a2 = min(max(a + (c_target - c), 1e-3), 1.0 - 1e-3)
    c2 = measure(a2)
    while abs(c2 - c_target) > tol_c * 0.5:
        if c2 == c:
            raise SearchFailed("arc measurement degenerate")
        a, c, a2 = a2, c2, a2 + (c_target - c2) * (a2 - a) / (c2 - c)
        a2 = min(max(a2, 1e-3), 1.0 - 1e-3)
        c2 = measure(a2)
    return params
