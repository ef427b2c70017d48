"""Poincare-neighborhood geometry and sampled complex-bounds checks.

The hyperbolic neighborhood of a real interval J inside the slit plane is
the union of two disks with common chord J whose boundaries meet the real
axis at an outer angle theta; its hyperbolic radius is log cot(theta/4).
The checks in this module sample such neighborhoods and verify Schwarz-type
invariance, power-law lower bounds near critical points, and the geometry
quantities of holomorphic-pair domains.  Everything here is a sampled
verifier, not a proof device.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import AnalyticMap, StadiumEvaluator
from .errors import (
    CurveSelfIntersection,
    DegenerateInterval,
    DomainError,
    InsufficientAnalyticity,
    OnSlit,
    SampleEscape,
    ViolationFound,
)

DEFAULT_BOUNDARY_TOL = 1e-12


def hyperbolic_radius(theta):
    """Radius log cot(theta/4) of the neighborhood with boundary angle theta."""
    if not 0.0 < theta < math.pi:
        raise DomainError("theta must lie in (0, pi)")
    return math.log(1.0 / math.tan(theta / 4.0))


def angle_for_radius(r):
    """Inverse of hyperbolic_radius."""
    if r <= 0.0:
        raise DomainError("radius must be positive")
    return 4.0 * math.atan(math.exp(-r))


@dataclass(frozen=True)
class PoincareNbhd:
    """Two-disk hyperbolic neighborhood D_theta(J) of J = [a, b]."""
    a: float
    b: float
    theta: float

    def __post_init__(self):
        if not self.b > self.a:
            raise DegenerateInterval("need a < b")
        if not 0.0 < self.theta < math.pi:
            raise DomainError("theta must lie in (0, pi)")

    @property
    def half_length(self):
        return 0.5 * (self.b - self.a)

    @property
    def mid(self):
        return 0.5 * (self.a + self.b)

    @property
    def radius(self):
        return self.half_length / math.sin(self.theta)

    @property
    def centers(self):
        k = self.half_length / math.tan(self.theta)
        return (complex(self.mid, k), complex(self.mid, -k))

    def contains(self, z, tol=DEFAULT_BOUNDARY_TOL):
        z = np.asarray(z, dtype=complex)
        c_up, c_dn = self.centers
        rad = self.radius * (1.0 + tol)
        inside = (np.abs(z - c_up) <= rad) | (np.abs(z - c_dn) <= rad)
        return inside if inside.ndim else bool(inside)

    def boundary(self, n=256):
        """Samples of the boundary arcs (upper and lower)."""
        c_up, c_dn = self.centers
        rad = self.radius
        # the upper boundary arc runs between the angles pointing at b and a
        ang_b = np.angle(complex(self.b, 0.0) - c_up)
        ang_a = np.angle(complex(self.a, 0.0) - c_up)
        if ang_a < ang_b:
            ang_a += 2 * math.pi
        t = np.linspace(ang_b, ang_a, n // 2)
        upper = c_up + rad * np.exp(1j * t)
        return np.concatenate([upper, np.conj(upper)])


def poincare_nbhd(J, theta):
    return PoincareNbhd(float(J[0]), float(J[1]), float(theta))


def membership(nbhd, z, tol=DEFAULT_BOUNDARY_TOL):
    return nbhd.contains(z, tol)


def poincare_level(z, J):
    """The angle theta for which z lies on the boundary of D_theta(J).

    Small theta corresponds to large neighborhoods, so containment in
    D_theta(J) is equivalent to poincare_level(z, J) >= theta.  Real points
    of the open interval receive the level pi.
    """
    a, b = float(J[0]), float(J[1])
    if not b > a:
        raise DegenerateInterval("need a < b")
    z = complex(z)
    if z.imag == 0.0:
        if a < z.real < b:
            return math.pi
        raise OnSlit("point lies on the slit rays")
    # inscribed-angle: the circle through a, b and z meets R at angle theta
    # with tan(theta) = half_length / k, where k is its center height
    x, y = z.real, abs(z.imag)
    m = 0.5 * (a + b)
    ell = 0.5 * (b - a)
    # center (m, k) equidistant from (a, 0) and (x, y)
    k = (x * x - 2 * m * x + y * y + m * m - ell * ell) / (2.0 * y)
    theta = math.atan2(ell, k)
    if theta <= 0.0:
        theta += math.pi
    return theta


def angle(z, J):
    """Least angle between the segments [a, z], [b, z] and the outward rays.

    The rays are (a, -inf] and [b, +inf); the value is in [0, pi] and
    symmetric under conjugation.  Points on the closed rays raise OnSlit.
    """
    a, b = float(J[0]), float(J[1])
    if not b > a:
        raise DegenerateInterval("need a < b")
    z = complex(z)
    if z.imag == 0.0 and not a < z.real < b:
        raise OnSlit("point lies on the slit rays")
    ang_a = abs(np.angle((z - a) / (-1.0)))      # against the ray to -inf
    ang_b = abs(np.angle(z - b))                 # against the ray to +inf
    return float(min(ang_a, ang_b))


# ---------------------------------------------------------------------------
# Schwarz-type invariance check
# ---------------------------------------------------------------------------

@dataclass
class SchwarzReport:
    theta: float
    theta_required: float
    margin: float
    worst_point: complex
    samples: int
    eval_floor: float

    @property
    def passed(self):
        return self.margin >= -1e-9

    def to_dict(self):
        return {"theta": self.theta, "theta_required": self.theta_required,
                "margin": self.margin,
                "worst_point": [self.worst_point.real, self.worst_point.imag],
                "samples": self.samples, "eval_floor": self.eval_floor}


def schwarz_check(phi, J, J_img, theta, n_samples=256, shrink=None,
                  raise_on_escape=True, touch_tol=1e-9):
    """Map boundary samples of D_theta(J) through phi and verify containment
    in D_theta'(J_img).

    With ``shrink`` None the target angle is theta (invariance form); a
    quasi-invariance factor in (0, 1) multiplies the target angle instead.
    The margin reported is the worst slack of the containment levels
    (images near the corners a, b of the target interval are contained in
    every neighborhood and count as level pi); a margin below -touch_tol
    raises SampleEscape carrying the witness point.
    """
    nb = poincare_nbhd(J, theta)
    target_theta = theta * (shrink if shrink is not None else 1.0)
    zs = nb.boundary(n_samples)
    floor = 0.0
    if isinstance(phi, AnalyticMap):
        pad = max(abs(z.imag) for z in zs) * 1.05
        ev = StadiumEvaluator(phi, (float(J[0]), float(J[1])), pad)
        floor = ev.floor
        ws = ev.eval(zs)
    else:
        ws = np.asarray([phi(z) for z in zs])
    corner_tol = 1e-11 * (J_img[1] - J_img[0])
    margin = math.inf
    worst = complex(0)
    for w in ws:
        w = complex(w)
        if min(abs(w - J_img[0]), abs(w - J_img[1])) <= corner_tol:
            continue
        if w.imag == 0.0 and not J_img[0] < w.real < J_img[1]:
            lvl = 0.0
        else:
            try:
                lvl = poincare_level(w, J_img)
            except OnSlit:
                lvl = 0.0
        slack = lvl - target_theta
        if slack < margin:
            margin = slack
            worst = w
    rep = SchwarzReport(theta, target_theta, float(margin), worst,
                        len(zs), floor)
    if raise_on_escape and rep.margin < -touch_tol:
        raise SampleEscape(
            "image point %s drops to level %.6g below the target %.6g"
            % (worst, margin + target_theta, target_theta))
    return rep


# ---------------------------------------------------------------------------
# power-law lower bound
# ---------------------------------------------------------------------------

@dataclass
class PowerLawReport:
    c_max: float        # largest c with some b >= 0
    b_max: float        # largest b with some c >= 0
    c_balanced: float
    b_balanced: float
    degenerate: bool
    witness: complex | None

    @property
    def positive(self):
        return self.c_balanced > 0.0 and self.b_balanced > 0.0

    def to_dict(self):
        return {"c_max": self.c_max, "b_max": self.b_max,
                "c_balanced": self.c_balanced, "b_balanced": self.b_balanced,
                "degenerate": self.degenerate,
                "witness": None if self.witness is None
                else [self.witness.real, self.witness.imag]}


def power_law_check(values, points, k=3, raise_on_violation=False):
    """Largest constants with |f(z)| >= c |z|^k + b over the sampled grid.

    ``values`` are |f| at the sample ``points``.  The feasible (c, b) region
    is the intersection of half planes b <= |f| - c |z|^k; reported are the
    two extreme vertices and the balanced point maximizing c * b.  A sample
    with |f| = 0 (within roundoff) leaves only (0, 0) and is returned as a
    violation witness.
    """
    pts = np.asarray(points, dtype=complex)
    vals = np.abs(np.asarray(values))
    pk = np.abs(pts) ** k
    if np.any(vals <= 1e-14 * max(vals.max(), 1.0)):
        i = int(np.argmin(vals))
        rep = PowerLawReport(0.0, 0.0, 0.0, 0.0, True, complex(pts[i]))
        if raise_on_violation:
            raise ViolationFound("|f| vanishes at %s" % (pts[i],))
        return rep
    b_max = float(vals.min())
    with np.errstate(divide="ignore"):
        ratios = np.where(pk > 0, vals / np.where(pk > 0, pk, 1.0), np.inf)
    c_max = float(ratios.min())
    cs = np.linspace(0.0, c_max, 201)[1:]
    best = (0.0, b_max, 0.0)
    for c in cs:
        b = float(np.min(vals - c * pk))
        if b <= 0:
            continue
        if c * b > best[2]:
            best = (float(c), b, c * b)
    c_bal, b_bal, _ = best
    degenerate = b_max <= 1e-4 * float(vals.max()) or c_bal <= 0.0
    return PowerLawReport(c_max, b_max, c_bal, b_bal, degenerate, None)


def pair_power_law(pair, r=0.04, k=3, n_radial=12, n_angular=24,
                   raise_on_violation=False):
    """Power-law report for the eta component of a normalized pair,
    sampled over a polar grid in the certified r-neighborhood of 0."""
    npair = pair.normalized()
    eta = npair.eta
    ev = StadiumEvaluator(eta, (0.0, 1.0), r)
    radii = np.linspace(r * 0.1, r * 0.95, n_radial)
    angs = np.linspace(0.0, math.pi, n_angular)
    zs = np.concatenate([rad * np.exp(1j * angs) for rad in radii])
    zs = zs[np.abs(zs.imag) <= r * 0.95]
    vals = ev.eval(zs)
    return power_law_check(vals, zs, k=k,
                           raise_on_violation=raise_on_violation)


# ---------------------------------------------------------------------------
# holomorphic-pair geometry report
# ---------------------------------------------------------------------------

@dataclass
class HoloPairGeometry:
    """Polygonal approximations of the domains of a holomorphic pair."""
    delta_center: complex
    delta_radius: float
    curves: dict            # name -> (n, 2) arrays of boundary points
    intervals: dict         # I_eta, I_xi, eta_inv_zero lengths

    def curve(self, name):
        return self.curves[name]


def _curve_self_intersects(pts):
    # crude O(n^2) segment test on a decimated copy
    q = pts[:: max(1, len(pts) // 128)]
    n = len(q)
    for i in range(n - 1):
        a, b = q[i], q[i + 1]
        for j in range(i + 2, n - 1):
            if i == 0 and j == n - 2:
                continue
            c, d = q[j], q[j + 1]
            d1 = np.cross(b - a, c - a)
            d2 = np.cross(b - a, d - a)
            d3 = np.cross(d - c, a - c)
            d4 = np.cross(d - c, b - c)
            if d1 * d2 < 0 and d3 * d4 < 0:
                return True
    return False


def quasidisk_constant(pts, max_pairs=4000, rng=None):
    """Ahlfors three-point estimator: max over sampled boundary pairs of
    diam(smaller arc) / |z1 - z2|.  A heuristic bound, not a certificate."""
    n = len(pts)
    rng = np.random.default_rng(0 if rng is None else rng)
    best = 1.0
    for _ in range(max_pairs):
        i, j = sorted(rng.integers(0, n, size=2))
        if i == j or (j - i) < 2 and (i + n - j) < 2:
            continue
        arc1 = pts[i:j + 1]
        arc2 = np.concatenate([pts[j:], pts[:i + 1]])
        arc = arc1 if len(arc1) <= len(arc2) else arc2
        chord = np.linalg.norm(pts[j] - pts[i])
        if chord < 1e-14:
            continue
        diam = np.max(np.linalg.norm(arc[:, None, :] - arc[None, ::8, :],
                                     axis=-1))
        best = max(best, diam / chord)
    return best


@dataclass
class MuReport:
    mod_lower: float
    lengths: dict
    distance_ratios: dict
    quasidisk: dict
    diam_delta: float
    mu: float
    heuristic: bool = True

    def to_dict(self):
        return {"mod_lower": self.mod_lower, "lengths": self.lengths,
                "distance_ratios": self.distance_ratios,
                "quasidisk_estimates": self.quasidisk,
                "diam_delta": self.diam_delta, "mu": self.mu,
                "quasidisk_is_heuristic": self.heuristic}


def mu_report(geometry, check_curves=True):
    """Lower bound on the geometry constant of a holomorphic pair.

    Item by item: the modulus is bounded below by the best round annulus
    separating the domain closure from the range boundary; interval lengths
    and distance/diameter ratios are measured on the curves; quasidisk
    constants use the (heuristic) three-point estimator; the diameter of
    the range caps the last item.  The minimum over items is returned.
    """
    curves = geometry.curves
    if check_curves:
        for name, pts in curves.items():
            if len(pts) >= 16 and _curve_self_intersects(np.asarray(pts)):
                raise CurveSelfIntersection("curve %s self-intersects" % name)
    omega = np.concatenate([curves[k] for k in ("U", "V", "D")
                            if k in curves])
    # (1) best round annulus around candidate centers
    c0 = omega.mean(axis=0)
    cands = [c0, np.array([geometry.delta_center.real,
                           geometry.delta_center.imag])]
    mod_lower = 0.0
    for c in cands:
        r_in = np.max(np.linalg.norm(omega - c, axis=1))
        r_out = geometry.delta_radius - np.linalg.norm(
            c - np.array([geometry.delta_center.real,
                          geometry.delta_center.imag]))
        if r_out > r_in > 0:
            mod_lower = max(mod_lower, math.log(r_out / r_in) / (2 * math.pi))
    # (2) interval lengths (|I_eta| fixed to 1 by normalization)
    lengths = dict(geometry.intervals)
    len_mu = min(lengths.get("I_xi", 0.0), lengths.get("eta_inv_zero", 0.0))
    # (3) distance/diameter ratios
    ratios = {}
    for name, pt_key in (("U", "xi0"), ("V", "eta0")):
        if name in curves and pt_key in lengths:
            pts = np.asarray(curves[name])
            p = np.array([lengths[pt_key], 0.0])
            dist = np.min(np.linalg.norm(pts - p, axis=1))
            diam = np.max(np.linalg.norm(pts[:, None, :] - pts[None, ::4, :],
                                         axis=-1))
            ratios[name] = float(dist / diam) if diam > 0 else 0.0
    ratio_mu = min(ratios.values()) if ratios else 0.0
    # (4) quasidisk constants (heuristic three-point bound)
    qd = {}
    for name in ("U", "V", "D", "Delta"):
        if name in curves:
            qd[name] = float(quasidisk_constant(np.asarray(curves[name])))
    qd_mu = 1.0 / max(qd.values()) if qd else 0.0
    # (5) range diameter
    diam_delta = 2.0 * geometry.delta_radius
    diam_mu = 1.0 / diam_delta if diam_delta > 0 else 0.0
    mu = min(mod_lower, len_mu, ratio_mu, qd_mu, diam_mu)
    return MuReport(mod_lower, lengths, ratios, qd, diam_delta, max(mu, 0.0))


def trace_preimage(amap, center, radius, x_inside, n_points=384,
                   max_halvings=18):
    """Boundary of the preimage component of a disk under an analytic map.

    March the disk boundary by continuation: for each target point on the
    circle, Newton-correct the preimage starting from the previous point,
    halving the angular step on failure.  The traced curve is the component
    boundary through the real seed points where |f - center| = radius.
    """
    f = lambda z: amap.eval(z, check=False)
    df = lambda z: amap.eval(z, 1, check=False)

    # real seed: walk right from x_inside until |f - center| crosses radius
    def level(x):
        return abs(f(x) - center) - radius

    lo, hi = amap.domain
    xs = np.linspace(x_inside, hi, 512)
    vals = np.array([level(x) for x in xs])
    idx = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if len(idx) == 0:
        raise InsufficientAnalyticity("disk preimage leaves the domain box")
    from scipy.optimize import brentq
    x0 = brentq(level, xs[idx[0]], xs[idx[0] + 1], xtol=1e-14)
    w0 = f(x0)
    phi0 = math.atan2((w0 - center).imag, (w0 - center).real)
    pts = [complex(x0)]
    z = complex(x0)
    phi = phi0
    total = 0.0
    step = 2 * math.pi / n_points
    while total < 2 * math.pi - 1e-9:
        h = min(step, 2 * math.pi - total)
        for _ in range(max_halvings):
            target = center + radius * np.exp(1j * (phi + h))
            zn = z
            ok = False
            for _ in range(30):
                d = df(zn)
                if abs(d) < 1e-13:
                    break
                zn = zn - (f(zn) - target) / d
                if abs(f(zn) - target) < 1e-12 * max(1.0, radius):
                    ok = True
                    break
            if ok and abs(zn - z) < 0.5 * max(radius, 1.0):
                break
            h *= 0.5
        else:
            raise InsufficientAnalyticity(
                "continuation stalled at angle %.3f" % phi)
        z = zn
        phi += h
        total += h
        pts.append(complex(z))
    return np.array([[p.real, p.imag] for p in pts])


def pair_geometry(pair, delta_center=None, delta_radius=None, n_points=384):
    """HoloPairGeometry of a normalized pair with a Euclidean-disk range.

    The range disk is centered on the real axis and sized to the pair
    intervals unless given; U, V, D are the traced preimage components of
    its boundary under eta, xi, and eta o xi.
    """
    npair = pair.normalized()
    a = npair.eta0
    if delta_center is None:
        delta_center = complex(0.5 * (1.0 + a), 0.0)
    if delta_radius is None:
        delta_radius = 0.62 * (1.0 - a)
    eta, xi = npair.eta, npair.xi
    curves = {}
    curves["Delta"] = np.array(
        [[delta_center.real + delta_radius * math.cos(t),
          delta_center.imag + delta_radius * math.sin(t)]
         for t in np.linspace(0, 2 * math.pi, n_points)])
    curves["U"] = trace_preimage(eta, delta_center, delta_radius,
                                 0.4, n_points)
    curves["V"] = trace_preimage(xi, delta_center, delta_radius,
                                 0.6 * a, n_points)
    comp = AnalyticMap.from_callable(
        lambda x: eta.eval(xi.eval(x, check=False), check=False),
        (a * 1.05, -a * 0.05))
    curves["D"] = trace_preimage(comp, delta_center, delta_radius,
                                 0.5 * a, n_points)
    intervals = {
        "I_eta": 1.0,
        "I_xi": -a,
        "eta_inv_zero": float(eta.solve(0.0, bracket=(0.0, 1.0))),
        "xi0": 1.0,
        "eta0": a,
    }
    return HoloPairGeometry(delta_center, delta_radius, curves, intervals)
