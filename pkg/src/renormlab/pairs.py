"""Commuting pairs: validation, heights, renormalization, gluing, dist_r.

A pair zeta = (eta, xi) consists of two increasing analytic interval maps,
eta on I_eta = [0, xi(0)] and xi on I_xi = [eta(0), 0], with commuting
extensions and a common critical point at 0.  Renormalization composes
eta^r o xi (r the height), swaps the roles, and rescales the new I_eta back
to unit length through the sign-reversing chart h(x) = x / eta(0).

All maps are stored on boxes enlarged by a relative margin (default 10%)
around their dynamical intervals, so extension-neighborhood quantities
(commutators, chart derivatives) are evaluated on resolved data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .analytic import (
    TOL_MULT,
    AnalyticMap,
    CircleLift,
    StadiumEvaluator,
    chebfit_adaptive,
    compose,
)
from .errors import DomainEscape
from .errors import (
    ChartFailure,
    CriticalNotAtZero,
    EvenOrderDetected,
    FixedPointOfEta,
    InsufficientAnalyticity,
    IterationBudgetExceeded,
    NotEnoughRenormalizations,
    NotRenormalizable,
    OutOfDomain,
)
from .rotation import (
    ContinuedFraction,
    _return_step,
    dynamical_returns,
    rotation_number_heights,
)

HEIGHT_INFINITE = math.inf
HEIGHT_CAP = 10 ** 7
BOX_PAD = 0.10
TOL_COMM = 1e-10
MAX_HEIGHT_COMPOSITIONS = 1000


# ---------------------------------------------------------------------------
# interval critical points
# ---------------------------------------------------------------------------

def interval_critical_points(m, lo, hi, tol=TOL_MULT, grid=2048):
    """Zeros of m' on [lo, hi] with odd contact orders."""
    x = np.linspace(lo, hi, grid)
    d1 = np.asarray(m.eval(x, 1, check=False))
    scale1 = max(float(np.max(np.abs(d1))), 1e-30)
    near = np.abs(d1) <= 1e-5 * scale1
    if not np.any(near):
        return []
    idx = np.nonzero(near)[0]
    clusters = [[idx[0]]]
    for i in idx[1:]:
        if i == clusters[-1][-1] + 1:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    h = (hi - lo) / (grid - 1)
    locs = []
    for cl in clusters:
        wlo = lo + (cl[0] - 1) * h
        whi = lo + (cl[-1] + 1) * h
        t = np.linspace(wlo, whi, max(64, 4 * len(cl)))
        d2 = np.asarray(m.eval(t, 2, check=False))
        sgn = np.sign(d2)
        hits = list(np.nonzero(sgn[:-1] * sgn[1:] < 0)[0])
        for i in hits:
            c = brentq(lambda s: float(m.eval(s, 2, check=False)),
                       t[i], t[i + 1], xtol=1e-15)
            if abs(m.eval(c, 1, check=False)) <= tol * scale1:
                locs.append(float(c))
        for i in np.nonzero(d2 == 0.0)[0]:
            if abs(m.eval(t[i], 1, check=False)) <= tol * scale1:
                locs.append(float(t[i]))
    locs = sorted(set(locs))
    merged = []
    span = hi - lo
    for c in locs:
        if merged and c - merged[-1] < 1e-9 * span:
            continue
        merged.append(c)
    out = []
    for c in merged:
        out.append((c, derivative_order_at(m, c, lo, hi, tol)))
    return out


def derivative_order_at(m, c, lo, hi, tol=TOL_MULT, max_order=13):
    """Smallest j with m^(j)(c) above tol relative to the interval scale."""
    x = np.linspace(lo, hi, 512)
    order = 1
    while order < max_order:
        scale = max(float(np.max(np.abs(m.eval(x, order + 1, check=False)))),
                    1e-30)
        if abs(m.eval(c, order + 1, check=False)) > tol * scale:
            return order + 1
        order += 1
    return order


# ---------------------------------------------------------------------------
# the pair
# ---------------------------------------------------------------------------

class CommutingPair:
    """(eta, xi) on [0, xi(0)] and [eta(0), 0], stored on padded boxes."""

    def __init__(self, eta, xi, meta=None):
        self.eta = eta
        self.xi = xi
        self.meta = dict(meta or {})
        self._crit = None

    # -- geometry ------------------------------------------------------------

    @property
    def xi0(self):
        """Right endpoint of I_eta."""
        return float(self.xi.eval(0.0, check=False))

    @property
    def eta0(self):
        """Left endpoint of I_xi."""
        return float(self.eta.eval(0.0, check=False))

    @property
    def interval_lengths(self):
        return self.xi0, -self.eta0

    def copy_meta(self, **extra):
        d = dict(self.meta)
        d.update(extra)
        return d

    # -- critical structure ----------------------------------------------------

    def critical_orders_at_zero(self, tol=TOL_MULT):
        b, alen = self.interval_lengths
        k_eta = derivative_order_at(self.eta, 0.0, 0.0, b, tol)
        k_xi = derivative_order_at(self.xi, 0.0, -alen, 0.0, tol)
        return k_eta, k_xi

    def interior_critical_points(self, tol=TOL_MULT):
        """Critical points of eta and xi away from 0, with orders."""
        b, alen = self.interval_lengths
        out = {"eta": [], "xi": []}
        for c, k in interval_critical_points(self.eta, 0.0, b, tol):
            if c > 1e-7 * b:
                out["eta"].append((c, k))
        for c, k in interval_critical_points(self.xi, -alen, 0.0, tol):
            if c < -1e-7 * alen:
                out["xi"].append((c, k))
        return out

    # -- measurements -----------------------------------------------------------

    def commutator_window(self):
        b, alen = self.interval_lengths
        w = 0.05 * min(b, alen)
        return -w, w

    def commutator_sup(self, samples=129):
        """sup |eta o xi - xi o eta| on a window around 0."""
        lo, hi = self.commutator_window()
        x = np.linspace(lo, hi, samples)
        a = self.eta.eval(self.xi.eval(x, check=False), check=False)
        b = self.xi.eval(self.eta.eval(x, check=False), check=False)
        return float(np.max(np.abs(a - b)))

    def derivative_minima(self, samples=1025):
        b, alen = self.interval_lengths
        crit = [0.0] + [c for c, _ in self.interior_critical_points()["eta"]]
        x = np.linspace(0.0, b, samples)
        d = np.abs(np.asarray(self.eta.eval(x, 1, check=False)))
        keep = np.ones_like(x, dtype=bool)
        for c in crit:
            keep &= np.abs(x - c) > 0.02 * b
        eta_min = float(np.min(d[keep])) if np.any(keep) else 0.0
        crit = [0.0] + [c for c, _ in self.interior_critical_points()["xi"]]
        x = np.linspace(-alen, 0.0, samples)
        d = np.abs(np.asarray(self.xi.eval(x, 1, check=False)))
        keep = np.ones_like(x, dtype=bool)
        for c in crit:
            keep &= np.abs(x - c) > 0.02 * alen
        xi_min = float(np.min(d[keep])) if np.any(keep) else 0.0
        return eta_min, xi_min

    # -- transforms -----------------------------------------------------------

    def conjugate(self, s):
        """Affine conjugation x -> x/s of both maps (exact on coefficients)."""
        return CommutingPair(self.eta.scaled(s, 1.0 / s),
                             self.xi.scaled(s, 1.0 / s),
                             meta=self.meta)

    def normalized(self):
        """Rescale so that |I_eta| = 1 (orientation preserving)."""
        return self.conjugate(self.xi0)

    def refit(self, pad=BOX_PAD):
        """Resample both maps on boxes hugging their dynamical intervals."""
        dt = self.eta.coeffs.dtype.type
        b, alen = self.interval_lengths
        eta = _fit_box(lambda x: self.eta.eval(x, check=False), 0.0, b, pad,
                       degree_cap=self.eta.degree_cap,
                       tail=self.eta.tail_bound, dtype=dt)
        xi = _fit_box(lambda x: self.xi.eval(x, check=False), -alen, 0.0, pad,
                      degree_cap=self.xi.degree_cap,
                      tail=self.xi.tail_bound, dtype=dt)
        return CommutingPair(eta, xi, meta=self.meta)

    # -- serialization -----------------------------------------------------------

    def to_dict(self):
        return {"eta": self.eta.to_dict(), "xi": self.xi.to_dict(),
                "meta": {k: v for k, v in self.meta.items()
                         if isinstance(v, (int, float, str, bool, list))}}

    @classmethod
    def from_dict(cls, d):
        return cls(AnalyticMap.from_dict(d["eta"]),
                   AnalyticMap.from_dict(d["xi"]), meta=d.get("meta"))

    def __repr__(self):
        return "CommutingPair(I_eta=[0, %.6g], I_xi=[%.6g, 0])" % (
            self.xi0, self.eta0)


def _fit_box(f, lo, hi, pad, degree_cap, tail=0.0, dtype=np.float64):
    m = pad * (hi - lo)
    return AnalyticMap.from_callable(f, (lo - m, hi + m), tail_bound=tail,
                                     degree_cap=degree_cap, dtype=dtype)


def pair_astype(pair, dtype):
    """Pair with both coefficient vectors cast to ``dtype``."""
    return CommutingPair(pair.eta.astype(dtype), pair.xi.astype(dtype),
                         meta=pair.meta)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    conditions: dict
    commutator: float
    derivative_minima: tuple
    critical_orders: tuple

    @property
    def ok(self):
        return all(v[0] for v in self.conditions.values())

    def failed(self):
        return [k for k, v in self.conditions.items() if not v[0]]


def validate(pair, tol_comm=TOL_COMM, tol=TOL_MULT):
    """Check the commuting-pair conditions; failures are reported, not raised."""
    b, alen = pair.interval_lengths
    conds = {}
    conds["I"] = (b > 0.0 and alen > 0.0, (b, -alen))
    comm = pair.commutator_sup()
    scale = max(b, 1e-30)
    conds["II"] = (comm <= tol_comm * scale, comm)
    try:
        c_star = float(pair.xi.eval(pair.eta0, check=False))
        conds["III"] = (-1e-12 * b <= c_star <= b * (1 + 1e-12), c_star)
    except OutOfDomain:
        conds["III"] = (False, None)
    dmin = pair.derivative_minima()
    conds["IV"] = (dmin[0] > 0.0 and dmin[1] > 0.0, dmin)
    k_eta, k_xi = pair.critical_orders_at_zero(tol)
    interior = pair.interior_critical_points(tol)
    odd_interior = all(k % 2 == 1 for _, k in interior["eta"] + interior["xi"])
    conds["V"] = (odd_interior, interior)
    crit_at_zero = k_eta > 1 and k_xi > 1
    orders_match = k_eta == k_xi and k_eta % 2 == 1
    conds["VI"] = (crit_at_zero and orders_match, (k_eta, k_xi))
    return ValidationReport(conds, comm, dmin, (k_eta, k_xi))


# ---------------------------------------------------------------------------
# heights and renormalization
# ---------------------------------------------------------------------------

def height(pair, cap=HEIGHT_CAP):
    """Least r with 0 between eta^r(xi(0)) and eta^{r+1}(xi(0)).

    Returns HEIGHT_INFINITE when eta has a fixed point in I_eta (detected by
    a sign change of eta(x) - x before the orbit crosses 0).
    """
    b, _ = pair.interval_lengths
    x = np.linspace(1e-9 * b, b, 513)
    disp = np.asarray(pair.eta.eval(x, check=False)) - x
    if np.max(disp) >= 0.0:
        return HEIGHT_INFINITE
    x = b  # = xi(0), start of the height orbit
    r = 0
    while True:
        x = pair.eta.eval(x, check=False)
        if x <= 0.0:
            return r
        r += 1
        if r > cap:
            raise IterationBudgetExceeded("height exceeded %d" % cap)


def _tower_values(pair, x, r):
    """Pointwise eta^r(xi(x)) with box-escape checks on the way."""
    eta, xi = pair.eta, pair.xi
    lo, hi = eta.domain
    tol = 1e-9 * (hi - lo)
    y = xi.eval(x, check=False)
    for _ in range(r):
        ymin, ymax = float(np.min(y)), float(np.max(y))
        if ymin < lo - tol or ymax > hi + tol:
            raise DomainEscape(
                "inner range [%g, %g] escapes outer domain [%g, %g]"
                % (ymin, ymax, lo, hi))
        y = eta.eval(y, check=False)
    return y


def prerenormalize(pair, pad=BOX_PAD):
    """(eta^r o xi | I_xi, eta | [0, eta^r(xi(0))]), sign-flipped so the
    orientation convention holds (first map to the right of 0)."""
    r = height(pair)
    if r is HEIGHT_INFINITE or math.isinf(r):
        raise NotRenormalizable("height is infinite")
    if r > MAX_HEIGHT_COMPOSITIONS:
        raise IterationBudgetExceeded(
            "height %d beyond composition budget" % r)
    dt = pair.eta.coeffs.dtype.type
    alen = -pair.eta0
    end = -float(_tower_values(pair, np.array([0.0], dtype=dt), r)[0])

    def eta_raw(u):
        return -_tower_values(pair, -np.asarray(u, dtype=dt), r)

    def xi_raw(u):
        return -pair.eta.eval(-np.asarray(u, dtype=dt), check=False)

    new_eta = _fit_box(eta_raw, 0.0, alen, pad, pair.eta.degree_cap, dtype=dt)
    new_xi = _fit_box(xi_raw, -end, 0.0, pad, pair.eta.degree_cap, dtype=dt)
    return CommutingPair(new_eta, new_xi, meta=pair.copy_meta(last_height=r))


def renormalize(pair, pad=BOX_PAD):
    """One renormalization step, rescaled so the new I_eta is [0, 1].

    The combined chart is h(x) = x / eta(0) applied to the swapped pair
    (eta^r o xi, eta); it reverses orientation, pins the critical point at
    0, and normalizes |I_eta| = 1.  Each output map is produced by a single
    interpolation of the exact composite, keeping per-step noise at the
    rounding floor.
    """
    r = height(pair)
    if r is HEIGHT_INFINITE or math.isinf(r):
        raise NotRenormalizable("height is infinite")
    if r > MAX_HEIGHT_COMPOSITIONS:
        raise IterationBudgetExceeded(
            "height %d beyond composition budget" % r)
    dt = pair.eta.coeffs.dtype.type
    a = pair.eta.eval(dt(0.0), check=False)

    def eta_raw(u):
        return _tower_values(pair, a * np.asarray(u, dtype=dt), r) / a

    def xi_raw(u):
        return pair.eta.eval(a * np.asarray(u, dtype=dt), check=False) / a

    end = float(eta_raw(np.array([0.0], dtype=dt))[0])   # eta^r(xi(0))/a <= 0
    new_eta = _fit_box(eta_raw, 0.0, 1.0, pad, pair.eta.degree_cap, dtype=dt)
    new_xi = _fit_box(xi_raw, end, 0.0, pad, pair.eta.degree_cap, dtype=dt)
    return CommutingPair(new_eta, new_xi, meta=pair.copy_meta(last_height=r))


# ---------------------------------------------------------------------------
# extraction from circle maps
# ---------------------------------------------------------------------------

def _lift_orbit_array(g, x, q):
    """q lift steps on an array of circle positions, winding kept exactly."""
    u = np.asarray(x, dtype=float) % 1.0
    wind = np.zeros(u.shape, dtype=np.int64)
    for _ in range(q):
        v = g.eval(u)
        m = np.floor(v)
        wind += m.astype(np.int64)
        u = v - m
    return u, wind


def pair_from_circle_map(g, m, pad=BOX_PAD, require_critical=True,
                         degree_cap=2048):
    """Commuting pair of the m-th renormalization level of a circle map.

    The pair consists of the deck-translated returns (g^{Q_{m+1}} - P_{m+1},
    g^{Q_m} - P_m) on the closest-return intervals around the critical point
    at 0, sign-flipped at odd levels so the orientation convention holds.
    Measured by its own heights, the result carries rotation number
    G^{m+1}(rho(g)): each extraction level is one renormalization step deep.
    """
    shift = math.floor(g.eval(0.0))
    if shift != 0:
        if not isinstance(g, CircleLift):
            raise CriticalNotAtZero("lift must satisfy 0 < g(0) < 1")
        g = g.rotated(-float(shift))
    if require_critical:
        grid = np.arange(64) / 64.0
        scale = max(float(np.max(np.abs(g.eval(grid, 1)))), 1e-30)
        d1 = abs(g.eval(0.0, 1))
        if d1 > 1e-6 * scale:
            raise CriticalNotAtZero("g'(0) = %.3g" % d1)
    try:
        cf = rotation_number_heights(g, depth=m + 2)
    except FixedPointOfEta as exc:
        raise NotEnoughRenormalizations(str(exc)) from exc
    if len(cf) < m + 2:
        raise NotEnoughRenormalizations(
            "only %d digits available, need %d" % (len(cf), m + 2))
    P, Q = dynamical_returns(cf.digits, m + 2)
    m_m = sum(_return_step(g, 0, 0.0, Q[m], P[m]))
    m_m1 = sum(_return_step(g, 0, 0.0, Q[m + 1], P[m + 1]))

    def power_map(q, p):
        def raw(x):
            x = np.asarray(x, dtype=float)
            u, w = _lift_orbit_array(g, x, q)
            return u + (w - p).astype(float) + np.floor(x)
        return raw

    eta_raw = power_map(Q[m + 1], P[m + 1])
    xi_raw = power_map(Q[m], P[m])
    flipped = m % 2 == 1
    if not flipped:
        eta = _fit_box(eta_raw, 0.0, m_m, pad, degree_cap)
        xi = _fit_box(xi_raw, m_m1, 0.0, pad, degree_cap)
    else:
        eta = _fit_box(lambda u: -eta_raw(-np.asarray(u)), 0.0, -m_m,
                       pad, degree_cap)
        xi = _fit_box(lambda u: -xi_raw(-np.asarray(u)), -m_m1, 0.0,
                      pad, degree_cap)
    meta = {"level": m, "digits": list(cf.digits[:m + 2]),
            "P": list(P), "Q": list(Q), "flipped": flipped}
    return CommutingPair(eta, xi, meta=meta)

# ---------------------------------------------------------------------------
# gluing to a circle map
# ---------------------------------------------------------------------------

class GluedCircleLift:
    """Circle lift realized from a pair on I = [eta(0), xi(eta(0))].

    The interval endpoints are identified through the chart xi and the
    orientation-reversing affine coordinate u = -x/|I| is used, so that 0
    maps to the critical point and the rotation number of the lift equals
    the heights-based rotation number of the pair.  The lift is analytic
    except at the seam u = g(0), which is a boundary point of every
    dynamical partition.
    """

    def __init__(self, pair, chart_tol=1e-10):
        self.pair = pair
        a = pair.eta0
        b = pair.xi0
        if not (a < 0.0 < b):
            raise ChartFailure("pair intervals are degenerate")
        c_star = float(pair.xi.eval(a, check=False))
        if not c_star > 0.0:
            raise ChartFailure("xi(eta(0)) is not positive")
        dchart = float(pair.xi.eval(a, 1, check=False))
        if not dchart > chart_tol:
            raise ChartFailure("xi is not a diffeomorphism at the seam")
        self.a = a
        self.b = b
        self.c_star = c_star
        self.length = c_star - a
        self.seam = -a / self.length

    # branch A: u in [0, seam] <-> x = -uL in [eta(0), 0], F = eta o xi
    # branch B: u in (seam, 1) <-> x = (1-u)L in (0, xi(eta(0))), F = eta

    def _eval_frac(self, w, deriv):
        pair, L = self.pair, self.length
        w = np.asarray(w, dtype=float)
        out = np.empty_like(w)
        mask = w <= self.seam
        if np.any(mask):
            x = -w[mask] * L
            xi_x = pair.xi.eval(x, check=False)
            if deriv == 0:
                out[mask] = 1.0 - pair.eta.eval(xi_x, check=False) / L
            elif deriv == 1:
                out[mask] = pair.eta.eval(xi_x, 1, check=False) \
                    * pair.xi.eval(x, 1, check=False)
            elif deriv == 2:
                d1, d2 = (pair.xi.eval(x, k, check=False) for k in (1, 2))
                e1, e2 = (pair.eta.eval(xi_x, k, check=False) for k in (1, 2))
                out[mask] = -L * (e2 * d1 * d1 + e1 * d2)
            elif deriv == 3:
                d1, d2, d3 = (pair.xi.eval(x, k, check=False)
                              for k in (1, 2, 3))
                e1, e2, e3 = (pair.eta.eval(xi_x, k, check=False)
                              for k in (1, 2, 3))
                out[mask] = L * L * (e3 * d1 ** 3 + 3.0 * e2 * d1 * d2
                                     + e1 * d3)
            else:
                raise ValueError("glued lifts support derivatives up to 3")
        mask = ~mask
        if np.any(mask):
            x = (1.0 - w[mask]) * L
            if deriv == 0:
                out[mask] = 1.0 - pair.eta.eval(x, check=False) / L
            elif deriv == 1:
                out[mask] = pair.eta.eval(x, 1, check=False)
            elif deriv == 2:
                out[mask] = -L * pair.eta.eval(x, 2, check=False)
            elif deriv == 3:
                out[mask] = L * L * pair.eta.eval(x, 3, check=False)
        return out

    def eval(self, x, deriv=0):
        xs = np.asarray(x, dtype=float)
        w = xs % 1.0
        out = self._eval_frac(w, deriv)
        if deriv == 0:
            out = out + np.floor(xs)
        return out if out.ndim else out[()]

    def __call__(self, x):
        return self.eval(x)

    @property
    def crit(self):
        """Critical points on the circle with orders, from the pair data."""
        pair = self.pair
        L = self.length
        k_eta, k_xi = pair.critical_orders_at_zero()
        pts = [(0.0, max(k_eta, k_xi))]
        interior = pair.interior_critical_points()
        for c, k in interior["xi"]:
            # branch A, critical point of the chart factor xi at x = c < 0
            pts.append(((-c / L) % 1.0, k))
        for c, k in interior["eta"]:
            if c < self.c_star:
                # branch B: eta critical at x = c in (0, c*)
                pts.append(((1.0 - c / L) % 1.0, k))
            else:
                # branch A through xi: x = xi^{-1}(c) in I_xi
                x = pair.xi.solve(c, bracket=(self.a, 0.0))
                pts.append(((-x / L) % 1.0, k))
        pts = sorted(set(pts))
        return pts

    def to_dict(self):
        return {"basis": "glued", "pair": self.pair.to_dict(),
                "chart": "reflected-affine"}

    @classmethod
    def from_dict(cls, d):
        if d.get("basis") != "glued":
            raise ValueError("expected glued payload")
        return cls(CommutingPair.from_dict(d["pair"]))

    def __repr__(self):
        return "GluedCircleLift(seam=%.6g, g0=%.6g)" % (self.seam,
                                                        float(self.eval(0.0)))


def glue(pair):
    """Realize the pair dynamics as a circle lift (see GluedCircleLift)."""
    return GluedCircleLift(pair)


# ---------------------------------------------------------------------------
# the dist_r metric
# ---------------------------------------------------------------------------

def normalized_components(pair, degree=None):
    """(eta, xi-conjugated) on [0, 1] for the unit-length normalization.

    The second component is h o xi o h^{-1} with h(z) = z/eta(0), which maps
    I_xi onto [0, 1]; together the two components embed the pair in a fixed
    function space.
    """
    npair = pair.normalized()
    a = npair.eta0
    eta = npair.eta
    xi_conj = npair.xi.scaled(a, 1.0 / a)
    return eta, xi_conj


def _stadium_boundary(r, n):
    """Boundary samples of the r-neighborhood of [0, 1] (upper half only)."""
    n_top = max(n // 2, 8)
    n_cap = max(n // 4, 4)
    top = np.linspace(0.0, 1.0, n_top) + 1j * r
    th = np.linspace(np.pi / 2, 3 * np.pi / 2, n_cap)
    left = r * np.exp(1j * th[(th >= np.pi / 2) & (th <= np.pi)])
    th2 = np.linspace(-np.pi / 2, np.pi / 2, n_cap)
    right = 1.0 + r * np.exp(1j * th2[(th2 >= 0)])
    return np.concatenate([top, left, right])


def dist_r(pair_a, pair_b, r, samples=192, with_floor=False):
    """Sup distance of the normalized components over the r-neighborhood.

    Both pairs are rescaled to |I_eta| = 1 and compared as (eta, h o xi o
    h^{-1}) on N_r([0, 1]); analytic continuation into the neighborhood is
    certified through the coefficient decay of a fit on [0, 1], and the
    series are truncated where decay meets the noise floor of the ellipse.
    Raises InsufficientAnalyticity when the certified ellipse of any
    component does not contain the neighborhood.  With ``with_floor`` the
    evaluation-accuracy floor is returned alongside the distance.
    """
    comps = []
    floor = 0.0
    for p in (pair_a, pair_b):
        eta, xic = normalized_components(p)
        pair_comp = []
        for mp in (eta, xic):
            ev = StadiumEvaluator(mp, (0.0, 1.0), r)
            floor = max(floor, ev.floor)
            pair_comp.append((mp, ev))
        comps.append(pair_comp)
    zb = _stadium_boundary(r, samples)
    xs = np.linspace(0.0, 1.0, max(samples // 2, 17))
    d = 0.0
    for k in range(2):
        (fa, ea), (fb, eb) = comps[0][k], comps[1][k]
        diff_b = np.abs(ea.eval(zb) - eb.eval(zb))
        diff_r = np.abs(fa.eval(xs, check=False) - fb.eval(xs, check=False))
        d = max(d, float(np.max(diff_b)), float(np.max(diff_r)))
    if with_floor:
        return d, floor
    return d
