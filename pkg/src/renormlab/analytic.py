"""Spectral representations of real-analytic interval and circle maps.

Two concrete map classes live here:

* ``AnalyticMap``   -- Chebyshev series on a closed real interval.  Supports
  pointwise evaluation (real or complex argument), termwise differentiation,
  adaptive composition, and exact affine argument/value transforms.
* ``CircleLift``    -- lift of an analytic degree-one circle map, stored as
  ``x + mean + p(x)`` with ``p`` a zero-mean trigonometric polynomial, so the
  lift relation g(x+1) = g(x)+1 holds by construction.

Resolution policy: a coefficient vector is accepted as *resolved* when the
last tenth of the coefficients stays below ``RESOLVE_RTOL`` times the leading
coefficient; otherwise the degree is doubled, up to ``degree_cap``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _sfft
from numpy.polynomial import chebyshev as _cheb
from scipy.optimize import brentq

from .errors import (
    CriticalCollision,
    DegreeOverflow,
    DomainEscape,
    EvenOrderDetected,
    InsufficientAnalyticity,
    NonMonotone,
    OutOfDomain,
    UnresolvedMap,
)

DEGREE_CAP = 2048
RESOLVE_RTOL = 1e-14
TRIM_RTOL = 1e-15
TOL_MULT = 1e-7          # multiplicity detection, relative to local derivative scale
TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Chebyshev helpers
# ---------------------------------------------------------------------------

def _to_unit(x, a, b):
    return (2.0 * x - (a + b)) / (b - a)


def _chebfit_nodes(n, dtype=np.float64):
    """Chebyshev points of the first kind (roots grid), degree n -> n+1 nodes."""
    k = np.arange(n + 1).astype(dtype)
    pi = np.arccos(dtype(-1.0))
    return np.cos(pi * (2.0 * k + 1.0) / (2.0 * (n + 1)))


def _fit_at_degree(f, a, b, n, dtype=np.float64):
    u = _chebfit_nodes(n, dtype)
    x = dtype(0.5) * (b - a) * u + dtype(0.5) * (a + b)
    y = np.asarray(f(x))
    if not np.all(np.isfinite(y.astype(float))):
        raise DomainEscape("non-finite values while sampling on [%g, %g]" % (a, b))
    if dtype is np.float64:
        # DCT keeps the transform noise at the rounding floor
        c = _sfft.dct(y.astype(np.float64), type=2) / (2.0 * (n + 1))
        c *= 2.0
        c[0] *= 0.5
        return c
    # extended precision: exact discrete orthogonality on the roots grid
    V = _cheb.chebvander(u, n)
    c = (dtype(2.0) / (n + 1)) * (V.T @ y.astype(dtype))
    c[0] *= 0.5
    return c


def _resolve_rtol(dtype, n=64):
    eps = float(np.finfo(dtype).eps)
    if dtype is np.float64 or np.dtype(dtype) == np.dtype(np.float64):
        return 50.0 * eps
    # the long-double transform accumulates O(n eps) per coefficient
    return max(50.0, 2.0 * n) * eps


def _is_resolved(c):
    lead = np.max(np.abs(c))
    if lead == 0.0:
        return True
    m = max(1, len(c) // 10)
    return np.max(np.abs(c[-m:])) <= _resolve_rtol(c.dtype, len(c)) * lead


def _trim(c):
    lead = np.max(np.abs(c)) if len(c) else 0.0
    if lead == 0.0:
        return np.zeros(1, dtype=c.dtype)
    keep = np.nonzero(np.abs(c) > 5.0 * np.finfo(c.dtype).eps * lead)[0]
    n = keep[-1] + 1 if len(keep) else 1
    return np.array(c[:max(n, 2)])


def chebfit_adaptive(f, domain, degree_cap=DEGREE_CAP, initial=16,
                     dtype=np.float64):
    """Fit ``f`` on ``domain`` doubling the degree until resolved."""
    a, b = dtype(domain[0]), dtype(domain[1])
    if not b > a:
        raise DomainEscape("empty fitting interval [%g, %g]" % (a, b))
    n = initial
    while True:
        c = _fit_at_degree(f, a, b, n, dtype)
        if _is_resolved(c):
            return _trim(c)
        if n >= degree_cap:
            raise DegreeOverflow(
                "not resolved at degree %d on [%g, %g]" % (n, a, b))
        n = min(2 * n, degree_cap)


def decay_fit(coeffs):
    """Geometric decay fit |c_k| ~ C rho^-k over the resolved stretch.

    Coefficients at the roundoff floor are excluded from the regression;
    when fewer than eight genuine coefficients remain the data is treated as
    polynomial-exact and rho = inf is returned.
    """
    eps = float(np.finfo(np.asarray(coeffs).dtype).eps) \
        if np.asarray(coeffs).dtype.kind == 'f' else 2.2e-16
    c = np.abs(np.asarray(coeffs, dtype=float))
    lead = c.max() if len(c) else 0.0
    if lead == 0.0:
        return lead, np.inf
    floor = max(lead * 150.0 * eps, 1e-300)
    k = np.nonzero(c > floor)[0]
    if len(k) < 8:
        return lead, np.inf
    k = k[int(len(k) * 0.25):]
    y = np.log(c[k])
    A = np.vstack([np.ones_like(k, dtype=float), k.astype(float)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    rho = math.exp(-sol[1])
    return math.exp(sol[0]), rho


def stadium_elongation(halflen, r):
    """Elongation of the smallest Bernstein ellipse containing the r-stadium.

    The stadium is the r-neighborhood of an interval of half-length
    ``halflen``; the ellipse is measured on the same interval.
    """
    xi = 1.0 + r / halflen
    s_major = xi + math.sqrt(xi * xi - 1.0)
    t = r / halflen
    s_minor = t + math.sqrt(1.0 + t * t)
    return max(s_major, s_minor)


# ---------------------------------------------------------------------------
# AnalyticMap
# ---------------------------------------------------------------------------

class AnalyticMap:
    """Real-analytic map on [a, b] stored as a Chebyshev coefficient vector."""

    def __init__(self, domain, coeffs, tail_bound=0.0, degree_cap=DEGREE_CAP):
        coeffs = np.asarray(coeffs)
        if coeffs.dtype not in (np.dtype(np.float64), np.dtype(np.longdouble)):
            coeffs = coeffs.astype(np.float64)
        dt = coeffs.dtype.type
        self.domain = (dt(domain[0]), dt(domain[1]))
        self.coeffs = coeffs
        self.tail_bound = float(tail_bound)
        self.degree_cap = int(degree_cap)
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")
        if not self.domain[1] > self.domain[0]:
            raise ValueError("degenerate domain")
        self._dcache = {0: self.coeffs}

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_callable(cls, f, domain, tail_bound=0.0, degree_cap=DEGREE_CAP,
                      initial=16, dtype=np.float64):
        c = chebfit_adaptive(f, domain, degree_cap=degree_cap, initial=initial,
                             dtype=dtype)
        lead = float(np.max(np.abs(c)))
        tb = tail_bound + _resolve_rtol(dtype) * max(lead, 1.0)
        return cls(domain, c, tail_bound=tb, degree_cap=degree_cap)

    def astype(self, dtype):
        return AnalyticMap(self.domain, self.coeffs.astype(dtype),
                           tail_bound=self.tail_bound,
                           degree_cap=self.degree_cap)

    @classmethod
    def identity(cls, domain):
        a, b = domain
        return cls(domain, [0.5 * (a + b), 0.5 * (b - a)])

    @classmethod
    def affine(cls, domain, slope, intercept):
        a, b = domain
        mid = 0.5 * (a + b)
        return cls(domain, [slope * mid + intercept, slope * 0.5 * (b - a)])

    # -- basic queries -------------------------------------------------------

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def _deriv_coeffs(self, order):
        if order not in self._dcache:
            scale = 2.0 / (self.domain[1] - self.domain[0])
            base = max(k for k in self._dcache if k < order)
            c = self._dcache[base]
            while base < order:
                c = _cheb.chebder(c) * scale
                if len(c) == 0:
                    c = np.zeros(1)
                base += 1
                self._dcache[base] = c
        return self._dcache[order]

    def eval(self, x, deriv=0, accuracy=None, check=True):
        """Value of the ``deriv``-th derivative at ``x`` (scalar or array).

        ``accuracy`` asserts the stored truncation bound is small enough;
        ``check=False`` skips the domain test (used for controlled
        evaluation on extension neighborhoods).
        """
        if deriv > self.degree_cap:
            raise ValueError("derivative order above degree_cap")
        if accuracy is not None and self.tail_bound > accuracy:
            raise UnresolvedMap(
                "tail bound %.3g exceeds requested accuracy %.3g"
                % (self.tail_bound, accuracy))
        a, b = self.domain
        xs = np.asarray(x)
        if check and not np.iscomplexobj(xs):
            tol = 1e-9 * (b - a)
            if np.any(xs < a - tol) or np.any(xs > b + tol):
                raise OutOfDomain(
                    "x outside [%g, %g]" % (a, b))
        u = _to_unit(xs, a, b)
        out = np.asarray(_cheb.chebval(u, self._deriv_coeffs(deriv)))
        return out if out.ndim else out[()]

    def __call__(self, x):
        return self.eval(x)

    @property
    def resolved(self):
        return _is_resolved(self.coeffs)

    def decay(self):
        return decay_fit(self.coeffs)

    def stadium_plan(self, r):
        """Truncation length and error estimate for evaluation on the
        r-stadium of the domain.

        Coefficient noise is amplified by s^k on the Bernstein ellipse of
        elongation s, while the true tail decays like (s/rho)^k, so the
        series is cut where the two balance.  Returns (ncoeffs, err).
        """
        halflen = 0.5 * (self.domain[1] - self.domain[0])
        s = stadium_elongation(halflen, r)
        C, rho = self.decay()
        lead = float(np.max(np.abs(self.coeffs)))
        if lead == 0.0:
            return 1, self.tail_bound
        noise = float(np.finfo(self.coeffs.dtype).eps) * lead
        n = len(self.coeffs)
        if not np.isfinite(rho):
            # polynomial-exact data: no truncation tail beyond the last coeff
            err = 1.3 * noise * s ** (n - 1) + self.tail_bound
            return n, float(err)
        if rho <= s * 1.02:
            return n, np.inf
        ratio = s / rho
        best_k, best_err = n - 1, np.inf
        for k in range(1, n):
            tail = C * ratio ** (k + 1) / (1.0 - ratio)
            amp = 1.3 * noise * s ** k
            err = tail + amp
            if err < best_err:
                best_k, best_err = k, err
        return best_k + 1, float(best_err + self.tail_bound)

    def complex_eval_error(self, r):
        return self.stadium_plan(r)[1]

    def require_stadium(self, r, tol):
        ncoef, err = self.stadium_plan(r)
        if not err < tol:
            raise InsufficientAnalyticity(
                "cannot certify evaluation on the %.3g-stadium (err %.3g)"
                % (r, err))
        return ncoef, err

    def eval_trunc(self, z, ncoef):
        """Evaluate the series truncated to ncoef coefficients (no checks)."""
        a, b = self.domain
        u = _to_unit(np.asarray(z), a, b)
        out = np.asarray(_cheb.chebval(u, self.coeffs[:ncoef]))
        return out if out.ndim else out[()]

    # -- ranges and roots ----------------------------------------------------

    def range_bounds(self, n=257):
        a, b = self.domain
        x = np.linspace(a, b, n)
        y = self.eval(x)
        pad = self.tail_bound + 1e-14 * max(1.0, np.max(np.abs(y)))
        return float(y.min() - pad), float(y.max() + pad)

    def solve(self, value, bracket=None, n=512):
        """One root of self(x) = value inside the domain (sampled bracketing)."""
        a, b = self.domain if bracket is None else bracket
        xs = np.linspace(a, b, n)
        ys = self.eval(xs) - value
        sign = np.sign(ys)
        idx = np.nonzero(sign[:-1] * sign[1:] <= 0)[0]
        if len(idx) == 0:
            raise OutOfDomain("no root of map = %g in [%g, %g]" % (value, a, b))
        i = idx[0]
        if ys[i] == 0.0:
            return float(xs[i])
        return float(brentq(lambda t: self.eval(t) - value, xs[i], xs[i + 1],
                            xtol=1e-15, rtol=8.9e-16))

    # -- transforms ----------------------------------------------------------

    def scaled(self, arg_scale, val_scale):
        """Exact transform u -> val_scale * self(arg_scale * u)."""
        a, b = self.domain
        na, nb = a / arg_scale, b / arg_scale
        c = self.coeffs * val_scale
        if arg_scale < 0:
            na, nb = nb, na
            c = c * np.where(np.arange(len(c)) % 2 == 0, 1.0, -1.0)
        return AnalyticMap((na, nb), c, tail_bound=self.tail_bound * abs(val_scale),
                           degree_cap=self.degree_cap)

    def refit(self, domain, pad=0.0):
        """Resample onto ``domain`` enlarged by a relative ``pad`` margin."""
        a, b = domain
        m = pad * (b - a)
        lo = max(a - m, self.domain[0])
        hi = min(b + m, self.domain[1])
        out = AnalyticMap.from_callable(
            lambda x: self.eval(x, check=False), (lo, hi),
            tail_bound=self.tail_bound, degree_cap=self.degree_cap)
        return out

    # -- serialization -------------------------------------------------------

    def to_dict(self):
        return {
            "basis": "chebyshev",
            "domain": [self.domain[0], self.domain[1]],
            "coeffs": [float(v) for v in self.coeffs],
            "tail_bound": self.tail_bound,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("basis") != "chebyshev":
            raise ValueError("expected chebyshev basis payload")
        return cls(tuple(d["domain"]), d["coeffs"], tail_bound=d["tail_bound"])

    def __repr__(self):
        return "AnalyticMap([%g, %g], deg=%d, tail=%.2g)" % (
            self.domain[0], self.domain[1], self.degree, self.tail_bound)


def compose(outer, inner, tol_dom=1e-9):
    """Composition outer(inner(x)) on inner's domain as a resolved AnalyticMap.

    The range of ``inner`` must land in outer's domain up to ``tol_dom``
    (relative to outer's domain length); the overshoot, if any, is evaluated
    by polynomial continuation.
    """
    lo, hi = inner.range_bounds()
    oa, ob = outer.domain
    margin = tol_dom * (ob - oa)
    if lo < oa - margin or hi > ob + margin:
        raise DomainEscape(
            "inner range [%g, %g] escapes outer domain [%g, %g]"
            % (lo, hi, oa, ob))
    lip = float(np.sum(np.abs(outer._deriv_coeffs(1))))
    tb = outer.tail_bound + lip * inner.tail_bound
    out = AnalyticMap.from_callable(
        lambda x: outer.eval(inner.eval(x), check=False),
        inner.domain, tail_bound=tb,
        degree_cap=max(outer.degree_cap, inner.degree_cap),
        initial=max(16, inner.degree))
    return out


# ---------------------------------------------------------------------------
# Circle lifts
# ---------------------------------------------------------------------------

class CircleLift:
    """Lift of an analytic circle homeomorphism: x + mean + periodic part.

    The periodic part is a zero-mean trigonometric polynomial with cosine
    coefficients ``cos_coeffs[k-1]`` and sine coefficients ``sin_coeffs[k-1]``
    for frequency k, so the lift relation holds exactly by representation.
    """

    def __init__(self, mean, cos_coeffs=(), sin_coeffs=(), crit=None):
        self.mean = float(mean)
        self.cos_coeffs = np.asarray(cos_coeffs, dtype=float)
        self.sin_coeffs = np.asarray(sin_coeffs, dtype=float)
        n = max(len(self.cos_coeffs), len(self.sin_coeffs))
        self.cos_coeffs = np.pad(self.cos_coeffs, (0, n - len(self.cos_coeffs)))
        self.sin_coeffs = np.pad(self.sin_coeffs, (0, n - len(self.sin_coeffs)))
        self._gamma = self.cos_coeffs - 1j * self.sin_coeffs
        self._crit = crit

    # -- construction --------------------------------------------------------

    @classmethod
    def from_callable(cls, g, samples=64, max_samples=1 << 16, crit=None):
        """Fit g(x) - x by FFT on uniform grids, doubling until resolved."""
        n = samples
        while True:
            x = np.arange(n) / n
            p = np.asarray(g(x), dtype=float) - x
            spec = np.fft.rfft(p) / n
            mags = np.abs(spec)
            lead = mags.max() if mags.size else 0.0
            m = max(1, len(mags) // 10)
            if lead == 0.0 or np.max(mags[-m:]) <= RESOLVE_RTOL * max(lead, 1e-6):
                break
            if n >= max_samples:
                raise DegreeOverflow("circle lift not resolved at %d samples" % n)
            n *= 2
        mean = float(spec[0].real)
        cutoff = np.nonzero(mags > TRIM_RTOL * max(lead, 1e-6))[0]
        keep = int(cutoff[-1]) if len(cutoff) else 0
        cos_c = 2.0 * spec[1:keep + 1].real
        sin_c = -2.0 * spec[1:keep + 1].imag
        return cls(mean, cos_c, sin_c, crit=crit)

    # -- evaluation ----------------------------------------------------------

    def periodic(self, x, deriv=0):
        xs = np.asarray(x, dtype=float)
        if len(self._gamma) == 0:
            out = np.zeros_like(xs)
            return out if out.ndim else out[()]
        w = np.exp(2j * np.pi * xs)
        k = np.arange(1, len(self._gamma) + 1)
        g = self._gamma * (2j * np.pi * k) ** deriv
        acc = np.zeros_like(w)
        for gk in g[::-1]:
            acc = (acc + gk) * w
        out = acc.real
        return out if out.ndim else out[()]

    def eval(self, x, deriv=0):
        if deriv == 0:
            return x + self.mean + self.periodic(x)
        if deriv == 1:
            return 1.0 + self.periodic(x, 1)
        return self.periodic(x, deriv)

    def __call__(self, x):
        return self.eval(x)

    @property
    def modes(self):
        return len(self._gamma)

    @property
    def crit(self):
        """Critical points as (location, order) pairs; located lazily."""
        if self._crit is None:
            self._crit = critical_points(self, tol=TOL_MULT)
        return self._crit

    def deriv_min(self, n=4096):
        x = np.arange(n) / n
        return float(np.min(self.eval(x, 1)))

    # -- algebra ---------------------------------------------------------------

    def rotated(self, theta):
        """Post-rotation: x -> self(x) + theta."""
        return CircleLift(self.mean + theta, self.cos_coeffs, self.sin_coeffs)

    def plus(self, mean_shift, cos_delta=(), sin_delta=()):
        n = max(self.modes, len(cos_delta), len(sin_delta))
        c = np.zeros(n)
        s = np.zeros(n)
        c[:self.modes] += self.cos_coeffs
        s[:self.modes] += self.sin_coeffs
        c[:len(cos_delta)] += np.asarray(cos_delta, dtype=float)
        s[:len(sin_delta)] += np.asarray(sin_delta, dtype=float)
        return CircleLift(self.mean + mean_shift, c, s)

    def to_dict(self):
        d = {
            "basis": "trig",
            "mean": self.mean,
            "cos_coeffs": [float(v) for v in self.cos_coeffs],
            "sin_coeffs": [float(v) for v in self.sin_coeffs],
        }
        if self._crit is not None:
            d["crit"] = [[float(c), int(k)] for c, k in self._crit]
        return d

    @classmethod
    def from_dict(cls, d):
        if d.get("basis") != "trig":
            raise ValueError("expected trig basis payload")
        crit = d.get("crit")
        if crit is not None:
            crit = [(float(c), int(k)) for c, k in crit]
        return cls(d["mean"], d["cos_coeffs"], d["sin_coeffs"], crit=crit)

    def __repr__(self):
        return "CircleLift(mean=%.6g, modes=%d)" % (self.mean, self.modes)


def compose_lifts(outer, inner, samples=64):
    """Lift composition outer(inner(x)) as a resolved CircleLift."""
    return CircleLift.from_callable(
        lambda x: outer.eval(inner.eval(x)), samples=samples)


def rotation_lift(alpha):
    return CircleLift(alpha, crit=[])


def sine_critical_lift(theta=0.0):
    """x + theta - sin(2 pi x)/(2 pi): cubic critical point at 0."""
    return CircleLift(theta, [0.0], [-1.0 / TWO_PI])


def sine_bicubic_lift(theta, beta):
    """Two-wave family R_theta o f o R_beta o f with cubic points at 0 and
    at the preimage of the (shifted) critical point of the outer wave."""
    f = sine_critical_lift()
    inner = f.rotated(beta)
    return compose_lifts(sine_critical_lift(theta), inner)


# ---------------------------------------------------------------------------
# Critical points
# ---------------------------------------------------------------------------

def _derivative_order(g, c, tol, max_order=13):
    """Number of vanishing derivatives at c, judged against grid scales."""
    x = np.arange(512) / 512.0
    order = 1
    while order < max_order:
        scale = max(np.max(np.abs(g.eval(x, order + 1))), 1e-30)
        val = g.eval(c, order + 1)
        if abs(val) > tol * scale:
            return order + 1
        order += 1
    return order


def critical_points(g, tol=TOL_MULT, grid=8192):
    """All zeros of g' in [0, 1) with their (odd) orders.

    Candidate locations are grid clusters where g' nearly vanishes; each is
    refined through the sign change of g'' (odd-order contact forces one).
    Raises NonMonotone when g' dips genuinely below zero on the grid and
    EvenOrderDetected when a located zero has even contact order.
    """
    x = np.arange(grid) / grid
    d1 = g.eval(x, 1)
    scale1 = max(np.max(np.abs(d1)), 1e-30)
    if np.min(d1) < -1e-7 * scale1:
        raise NonMonotone("derivative reaches %.3g" % float(np.min(d1)))
    near = np.abs(d1) <= 1e-5 * scale1
    if not np.any(near):
        return []
    # circular clusters of near-critical grid points
    idx = np.nonzero(near)[0]
    clusters = [[idx[0]]]
    for i in idx[1:]:
        if i == clusters[-1][-1] + 1:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1 and clusters[0][0] == 0 and clusters[-1][-1] == grid - 1:
        clusters[0] = [i - grid for i in clusters[-1]] + clusters[0]
        clusters.pop()
    locs = []
    for cl in clusters:
        lo = (cl[0] - 1.0) / grid
        hi = (cl[-1] + 1.0) / grid
        t = np.linspace(lo, hi, max(64, 4 * len(cl)))
        d2 = np.asarray(g.eval(t, 2))
        sgn = np.sign(d2)
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            c = brentq(lambda s: float(g.eval(s, 2)), t[i], t[i + 1], xtol=1e-15)
            if abs(g.eval(c, 1)) <= tol * scale1:
                locs.append(c % 1.0)
        for i in np.nonzero(d2 == 0.0)[0]:
            if abs(g.eval(t[i], 1)) <= tol * scale1:
                locs.append(float(t[i]) % 1.0)
    # deduplicate circularly
    locs = sorted(locs)
    merged = []
    for c in locs:
        if merged and min(abs(c - merged[-1]), 1.0 - abs(c - merged[-1])) < 1e-9:
            continue
        merged.append(c)
    if len(merged) > 1 and (merged[0] + 1.0) - merged[-1] < 1e-9:
        merged.pop()
    out = []
    for c in merged:
        order = _derivative_order(g, c, tol)
        if order % 2 == 0:
            raise EvenOrderDetected(
                "critical point at %.12g has even order %d" % (c, order))
        out.append((float(c), order))
    return out


# ---------------------------------------------------------------------------
# Triples of circle diffeomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CUTriple:
    """Triple of analytic circle diffeomorphisms, phi1 normalized at 0."""
    phi1: CircleLift
    phi2: CircleLift
    phi3: CircleLift

    def __post_init__(self):
        if abs(self.phi1.eval(0.0) % 1.0) > 1e-12 and \
           abs(self.phi1.eval(0.0) % 1.0 - 1.0) > 1e-12:
            raise ValueError("phi1(0) must vanish mod 1")
        for i, phi in enumerate((self.phi1, self.phi2, self.phi3), 1):
            if phi.deriv_min() <= 0.0:
                raise NonMonotone("phi%d is not a diffeomorphism" % i)

    @classmethod
    def rotations(cls, t1, t2, t3):
        if t1 % 1.0 != 0.0:
            raise ValueError("phi1 must fix 0, pass t1 = 0")
        return cls(rotation_lift(0.0), rotation_lift(t2), rotation_lift(t3))


def assemble_bicubic(triple, collision_tol=1e-8):
    """g = phi3 o f o phi2 o f o phi1 with f the sine-wave cubic model.

    The assembled lift must carry exactly two cubic critical points;
    coincident locations raise CriticalCollision.
    """
    f = sine_critical_lift()
    g = compose_lifts(f, triple.phi1)
    g = compose_lifts(triple.phi2, g)
    g = compose_lifts(f, g)
    g = compose_lifts(triple.phi3, g)
    try:
        crit = critical_points(g)
    except EvenOrderDetected as exc:
        # the two wave factors are each cubic; even contact in the composite
        # only happens when their critical orbits merge
        raise CriticalCollision("merged critical points: %s" % exc) from exc
    if len(crit) != 2:
        if len(crit) == 1:
            raise CriticalCollision(
                "critical points collide at %.12g (order %d)" % crit[0])
        raise CriticalCollision("expected two critical points, found %d"
                                % len(crit))
    (c1, k1), (c2, k2) = crit
    gap = min(abs(c1 - c2), 1.0 - abs(c1 - c2))
    if gap < collision_tol:
        raise CriticalCollision("critical points %.12g and %.12g collide"
                                % (c1, c2))
    if (k1, k2) != (3, 3):
        raise EvenOrderDetected("orders (%d, %d) are not both cubic" % (k1, k2))
    return CircleLift(g.mean, g.cos_coeffs, g.sin_coeffs, crit=crit)


class StadiumEvaluator:
    """Certified complex evaluation on the r-neighborhood of an interval.

    A single Bernstein ellipse around a long interval is a poor cover for a
    thin stadium, so the interval is split into pieces, each refit locally;
    the local ellipses hug the stadium and certify maps whose analyticity
    strip is much thinner than the global ellipse would demand.
    """

    def __init__(self, amap, interval, r, pieces=8, overlap=1.5):
        a, b = float(interval[0]), float(interval[1])
        da, db = amap.domain
        self.r = float(r)
        self.edges = np.linspace(a, b, pieces + 1)
        self.fits = []
        self.plans = []
        self.floor = 0.0
        margin = overlap * self.r
        for i in range(pieces):
            lo = max(self.edges[i] - margin, da)
            hi = min(self.edges[i + 1] + margin, db)
            local = AnalyticMap.from_callable(
                lambda x: amap.eval(x, check=False), (lo, hi),
                tail_bound=amap.tail_bound, degree_cap=amap.degree_cap)
            ncoef, err = local.stadium_plan(self.r)
            if not np.isfinite(err):
                raise InsufficientAnalyticity(
                    "piece [%g, %g] cannot cover its %.3g-stadium"
                    % (lo, hi, self.r))
            self.fits.append(local)
            self.plans.append(ncoef)
            self.floor = max(self.floor, err)

    def eval(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        idx = np.searchsorted(self.edges, z.real, side="right") - 1
        idx = np.clip(idx, 0, len(self.fits) - 1)
        out = np.empty_like(z)
        for i in range(len(self.fits)):
            mask = idx == i
            if np.any(mask):
                out[mask] = self.fits[i].eval_trunc(z[mask], self.plans[i])
        return out
