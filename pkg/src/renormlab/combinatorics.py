"""Dynamical partitions, real-bounds diagnostics, and combinatorial types.

The n-th dynamical partition of a circle map with critical point at 0 is
built from the orbit of 0 up to time Q_n + Q_{n+1} (closest-return times);
its intervals are the iterates of the two fundamental intervals.  Types are
measured in rotation coordinates through order-isomorphism with the rigid
rotation: the orbit of 0 is matched against the arithmetic progression
k*rho mod 1, positions computed in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .analytic import CircleLift
from .errors import (
    NotEnoughRenormalizations,
    NotPeriodicRotation,
    OrbitCollision,
    RationalRotation,
    SignatureUnstable,
    FixedPointOfEta,
)
from .rotation import (
    ContinuedFraction,
    dynamical_returns,
    rotation_number_heights,
)

COVER_TOL = 1e-12


def _orbit(g, n, x0=0.0):
    """Circle positions of the orbit of x0 under the lift, length n+1."""
    if isinstance(g, CircleLift):
        return _kernels.orbit_positions(x0, n, g.mean, g.cos_coeffs,
                                        g.sin_coeffs)
    out = np.empty(n + 1)
    u = x0 % 1.0
    out[0] = u
    for i in range(1, n + 1):
        v = float(g.eval(u))
        u = v - math.floor(v)
        out[i] = u
    return out


@dataclass(frozen=True)
class PartitionInterval:
    start: float      # left endpoint, arc runs counter-clockwise
    length: float
    level: int        # n for iterates of I_n, n+1 for iterates of I_{n+1}
    iterate: int

    @property
    def end(self):
        return (self.start + self.length) % 1.0

    def contains(self, x):
        """Half-open membership [start, start+length) on the circle."""
        d = (x - self.start) % 1.0
        return d < self.length


@dataclass
class DynamicalPartition:
    level: int
    intervals: list          # ordered by start position
    boundary: np.ndarray     # sorted boundary points
    digits: tuple

    def __len__(self):
        return len(self.intervals)

    def locate(self, x):
        """Index of the interval containing x (half-open convention)."""
        x = x % 1.0
        i = int(np.searchsorted(self.boundary, x, side="right") - 1)
        if i < 0:
            i = len(self.intervals) - 1
        return i

    def lengths(self):
        return np.array([iv.length for iv in self.intervals])

    def max_length(self):
        return float(self.lengths().max())

    def adjacency_ratio(self):
        """Largest ratio of adjacent interval lengths (>= 1)."""
        ln = self.lengths()
        nxt = np.roll(ln, -1)
        return float(np.max(np.maximum(ln / nxt, nxt / ln)))

    def to_dict(self):
        return {
            "level": self.level,
            "digits": list(self.digits),
            "intervals": [
                {"start": iv.start, "length": iv.length,
                 "level": iv.level, "iterate": iv.iterate}
                for iv in self.intervals],
        }


def partition(g, n, check=True):
    """The n-th dynamical partition of a circle map with critical point 0.

    Intervals are g^i(I_n) for i < Q_{n+1} and g^i(I_{n+1}) for i < Q_n,
    with endpoints read off the orbit of 0.  Raises
    NotEnoughRenormalizations when the rotation number does not carry n+2
    continued-fraction digits.
    """
    try:
        cf = rotation_number_heights(g, depth=n + 2)
    except FixedPointOfEta as exc:
        raise NotEnoughRenormalizations(str(exc)) from exc
    if len(cf) < n + 2:
        raise NotEnoughRenormalizations(
            "digits exhausted at %d, need %d" % (len(cf), n + 2))
    P, Q = dynamical_returns(cf.digits, n + 2)
    total = Q[n] + Q[n + 1]
    xs = _orbit(g, total)
    intervals = []
    for i in range(Q[n + 1]):
        a, b = xs[i], xs[i + Q[n]]
        if n % 2 == 1:
            a, b = b, a
        intervals.append(PartitionInterval(float(a), (b - a) % 1.0, n, i))
    for i in range(Q[n]):
        a, b = xs[i], xs[i + Q[n + 1]]
        if (n + 1) % 2 == 1:
            a, b = b, a
        intervals.append(PartitionInterval(float(a), (b - a) % 1.0, n + 1, i))
    intervals.sort(key=lambda iv: iv.start)
    boundary = np.array([iv.start for iv in intervals])
    part = DynamicalPartition(n, intervals, boundary, cf.digits[:n + 2])
    if check:
        defect = partition_defects(part)
        if max(defect) > COVER_TOL:
            raise AssertionError(
                "partition defects %r exceed tolerance" % (defect,))
    return part


def partition_defects(part):
    """(covering defect, matching defect): both should vanish to 1e-12."""
    total = sum(iv.length for iv in part.intervals)
    cover = abs(total - 1.0)
    worst = 0.0
    ivs = part.intervals
    for k, iv in enumerate(ivs):
        nxt = ivs[(k + 1) % len(ivs)]
        gap = (nxt.start - iv.end) % 1.0
        worst = max(worst, min(gap, 1.0 - gap))
    return cover, worst


@dataclass
class RealBoundsReport:
    levels: list
    max_lengths: list
    ratios: list
    terminated_at: int | None
    decreasing: bool
    ratio_window: tuple | None

    @property
    def stabilized(self):
        if self.ratio_window is None:
            return False
        lo, hi = self.ratio_window
        return hi <= 1.5 * lo

    def to_dict(self):
        return {
            "levels": self.levels,
            "max_lengths": self.max_lengths,
            "adjacency_ratios": self.ratios,
            "terminated_at": self.terminated_at,
            "max_length_decreasing": self.decreasing,
            "ratio_window": list(self.ratio_window)
            if self.ratio_window else None,
            "ratio_stabilized": self.stabilized,
        }


def real_bounds_report(g, n_max, n_stable=3):
    """Per-level mesh and adjacent-commensurability diagnostics.

    The mesh (longest interval) must decrease with the level; the adjacent
    length ratio should settle into a bounded window once the first levels
    are passed.  Levels beyond a rational rotation number are reported as
    terminated rather than computed.
    """
    levels, meshes, ratios = [], [], []
    terminated = None
    for n in range(n_max + 1):
        try:
            part = partition(g, n)
        except NotEnoughRenormalizations:
            terminated = n
            break
        levels.append(n)
        meshes.append(part.max_length())
        ratios.append(part.adjacency_ratio())
    decreasing = all(b < a for a, b in zip(meshes, meshes[1:]))
    window = None
    tail = [r for n, r in zip(levels, ratios) if n >= n_stable]
    if tail:
        window = (min(tail), max(tail))
    return RealBoundsReport(levels, meshes, ratios, terminated,
                            decreasing, window)


# ---------------------------------------------------------------------------
# combinatorial types
# ---------------------------------------------------------------------------

@dataclass
class CombinatorialType:
    orders: list          # critical orders, marked point first
    arcs: list            # rotation-coordinate arc lengths, ccw from 0
    arc_errors: list
    marked: bool = True

    def __post_init__(self):
        if abs(sum(self.arcs) - 1.0) > 1e-9:
            raise ValueError("arcs must sum to 1")
        if any(a <= 0 for a in self.arcs):
            raise ValueError("arcs must be positive")
        if any(k % 2 == 0 or k < 3 for k in self.orders):
            raise ValueError("orders must be odd and >= 3")

    def unmarked_equal(self, other, tol=1e-6):
        n = len(self.arcs)
        if len(other.arcs) != n or len(other.orders) != len(self.orders):
            return False
        for s in range(n):
            rot_orders = other.orders[s:] + other.orders[:s]
            rot_arcs = other.arcs[s:] + other.arcs[:s]
            if rot_orders == self.orders and \
               all(abs(a - b) <= tol for a, b in zip(self.arcs, rot_arcs)):
                return True
        return False

    def to_dict(self):
        return {"orders": self.orders, "arcs": self.arcs,
                "arc_errors": self.arc_errors, "marked": self.marked}


def rotation_coordinate(g, point, orbit_len=400000, digits=None,
                        collision_tol=1e-12):
    """Rotation coordinate of a circle point via order matching.

    The orbit of 0 is order-isomorphic to the orbit of 0 under the rigid
    rotation; the coordinate of ``point`` is bracketed by the rotation
    images of its two circular orbit neighbors, computed exactly from a
    deep convergent p/q.  Returns (coordinate, error).
    """
    if digits is None:
        digits = rotation_number_heights(g, depth=30)
    P, Q = dynamical_returns(digits.digits, len(digits))
    k_used = len(Q) - 1
    p, q = P[k_used], Q[k_used]
    n = min(orbit_len, max(q - 1, 64))
    xs = _orbit(g, n)[:-1]
    point = point % 1.0
    order = np.argsort(xs, kind="stable")
    sorted_xs = xs[order]
    j = int(np.searchsorted(sorted_xs, point))
    left_iter = int(order[(j - 1) % len(xs)])
    right_iter = int(order[j % len(xs)])
    gap_lo = sorted_xs[(j - 1) % len(xs)]
    gap_hi = sorted_xs[j % len(xs)]
    if abs(point - gap_lo) < collision_tol or \
       abs(point - gap_hi) < collision_tol:
        raise OrbitCollision("point %.15g hits the orbit of 0" % point)
    # rotation positions of the bracketing orbit points, exact arithmetic
    lo = Fraction(left_iter * p % q, q)
    hi = Fraction(right_iter * p % q, q)
    width = float((hi - lo) % 1)
    coord = (float(lo) + 0.5 * width) % 1.0
    # n/q^2 bounds the error of using p/q for the rotation positions
    return coord, 0.5 * width + n / (q * q)


def combinatorial_type(g, orbit_len=400000, collision_tol=1e-12):
    """Marked combinatorial type: critical orders and rotation-coordinate
    arcs between consecutive critical points, starting at the one at 0."""
    try:
        digits = rotation_number_heights(g, depth=30)
    except FixedPointOfEta as exc:
        # a deep mode-locked map still carries a useful order isomorphism;
        # only shallow rational locking defeats the measurement
        partial = getattr(exc, "digits", ())
        locked = getattr(exc, "locked_fraction", (0, 1))
        if len(partial) < 8 or locked[1] < 1000:
            raise RationalRotation(str(exc)) from exc
        digits = ContinuedFraction(partial)
    crit = list(g.crit)
    if not crit:
        raise ValueError("map carries no critical points")
    at_zero = [ck for ck in crit
               if min(ck[0] % 1.0, 1.0 - ck[0] % 1.0) <= 1e-9]
    if not at_zero:
        raise ValueError("no critical point at 0")
    others = sorted(ck for ck in crit if ck not in at_zero)
    coords = [(0.0, 0.0, at_zero[0][1])]
    for c, k in others:
        th, err = rotation_coordinate(g, c, orbit_len=orbit_len,
                                      digits=digits,
                                      collision_tol=collision_tol)
        coords.append((th, err, k))
    coords.sort(key=lambda t: t[0])
    orders = [k for _, _, k in coords]
    errs = [coords[i][1] + coords[(i + 1) % len(coords)][1]
            for i in range(len(coords))]
    arcs = [coords[i + 1][0] - coords[i][0] for i in range(len(coords) - 1)]
    arcs.append(1.0 - coords[-1][0])
    return CombinatorialType(orders, arcs, errs)


# ---------------------------------------------------------------------------
# periodic signatures
# ---------------------------------------------------------------------------

@dataclass
class PeriodicSignature:
    period: int
    w: list                  # interval index of the free critical point
    interval_counts: list
    separation_level: int

    def to_dict(self):
        return {"period": self.period, "w": self.w,
                "interval_counts": self.interval_counts,
                "separation_level": self.separation_level}


def _separated(part, x1, x2):
    """True when x1, x2 lie in distinct, non-adjacent partition intervals."""
    i1, i2 = part.locate(x1), part.locate(x2)
    if i1 == i2:
        return False
    n = len(part.intervals)
    return (i1 - i2) % n not in (1, n - 1)


def free_critical_point(g):
    """The critical point away from 0, or None for unicritical maps."""
    cands = [c for c, _ in g.crit
             if min(c % 1.0, 1.0 - c % 1.0) > 1e-9]
    if not cands:
        return None
    if len(cands) > 1:
        raise SignatureUnstable("more than one free critical point")
    return cands[0]


def periodic_signature(towers, m, j_window=4, max_separation=8):
    """Signature w of a renormalization-periodic bi-critical map.

    ``towers`` is the sequence of glued circle maps at successive
    renormalization levels (at least j_window + 1 of them).  For each level
    the free critical point is located in the 2nd dynamical partition; the
    indices must agree across the window.  The minimal level separating the
    two critical points is reported alongside.
    """
    if len(towers) < j_window:
        raise ValueError("need at least j_window tower levels")
    ws, counts = [], []
    sep_levels = []
    for j in range(j_window):
        gj = towers[j]
        c_free = free_critical_point(gj)
        if c_free is None:
            return PeriodicSignature(m, [], [], 0)
        part = partition(gj, 2)
        ws.append(part.locate(c_free) + 1)
        counts.append(len(part))
        sep = None
        for N in range(max_separation + 1):
            try:
                pN = partition(gj, N)
            except NotEnoughRenormalizations:
                break
            if _separated(pN, 0.0, c_free):
                sep = N
                break
        sep_levels.append(sep)
    if len(set(ws)) != 1 or len(set(counts)) != 1:
        raise SignatureUnstable("w indices %r vary across the window" % (ws,))
    seps = [s for s in sep_levels if s is not None]
    sep = max(seps) if len(seps) == len(sep_levels) and seps else -1
    return PeriodicSignature(m, [ws[0]], [counts[0]], sep)


def check_periodic_digits(digits, m):
    """Digits must be periodic with period dividing m."""
    d = list(digits)
    if len(d) < 2 * m:
        raise NotPeriodicRotation("too few digits to certify period %d" % m)
    for i in range(len(d) - m):
        if d[i] != d[i + m]:
            raise NotPeriodicRotation(
                "digit %d breaks period %d" % (i, m))
    return True
