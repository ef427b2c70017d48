"""Renormalization towers, seed steering, and the linearized operator.

The renormalization operator is hyperbolic transverse to its stable set, so
any imperfection of a seed is amplified step by step until the tower leaves
the combinatorial class.  ``steer_seed`` compensates: it bisects one or two
seed parameters on the observed breakdown direction, pushing the breakdown
level deeper until towers survive to the requested depth.  Towers can run
in float64 or, when the double-precision noise floor is the limit, in
80-bit extended precision via pair-space steering directions.

The linearization works in normalized pair coordinates (Chebyshev
coefficients of (eta, h o xi o h^{-1}) on [0, 1]).  Perturbation directions
are generated by trigonometric deformations of the glued circle map with
the critical point pinned at 0, so every probed state is a genuine
commuting pair; the Jacobian of one period R^m is compressed onto that
frame and its eigenvalues reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import AnalyticMap, CircleLift, _fit_at_degree
from .combinatorics import free_critical_point
from .errors import (
    EigenFailure,
    NoConvergence,
    RenormLabError,
    StepTooSmall,
    TypeDrift,
)
from .pairs import (
    CommutingPair,
    GluedCircleLift,
    dist_r,
    glue,
    height,
    normalized_components,
    pair_astype,
    pair_from_circle_map,
    renormalize,
)
from .rotation import ContinuedFraction, GOLDEN_MEAN

DIST_R_DEFAULT = 0.05


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

@dataclass
class FixedPointRecord:
    period: int
    digits: tuple
    tower: list
    residuals: list
    floors: list
    accepted: bool
    accepted_at: int | None
    tol: float
    r: float
    dtype: str
    heights: list = field(default_factory=list)

    @property
    def final(self):
        if self.accepted_at is not None:
            return self.tower[(self.accepted_at + 1) * self.period]
        return self.tower[-1]

    def summary(self):
        return {
            "period": self.period,
            "digits": list(self.digits),
            "residuals": self.residuals,
            "floors": self.floors,
            "accepted": self.accepted,
            "accepted_at": self.accepted_at,
            "tol": self.tol,
            "r": self.r,
            "dtype": self.dtype,
            "heights": self.heights,
        }


def iterate_to_fixed_point(seed, m, tol=1e-6, j_max=40, r=DIST_R_DEFAULT,
                           digits=None, stop_at_accept=True):
    """Iterate blocks of m renormalizations, recording dist_r residuals.

    Heights along the tower must follow the expected periodic digit
    sequence; a mismatch before acceptance raises TypeDrift.  The record is
    accepted at the first block whose residual drops below ``tol``;
    NoConvergence (with the partial record attached) is raised when j_max
    blocks pass without acceptance.
    """
    if digits is None:
        digits = (1,) * m
    z = seed.normalized()
    tower = [z]
    residuals = []
    floors = []
    heights = []
    accepted_at = None
    for block in range(j_max):
        prev = tower[block * m]
        z = prev
        try:
            for i in range(m):
                z = renormalize(z)
                h = z.meta.get("last_height")
                heights.append(h)
                expected = digits[(block * m + i) % len(digits)]
                if h != expected:
                    raise TypeDrift(
                        "height %s at step %d, expected %d"
                        % (h, block * m + i, expected))
                tower.append(z)
            d, fl = dist_r(prev, z, r, with_floor=True)
        except TypeDrift:
            if accepted_at is not None:
                break
            raise
        except RenormLabError as exc:
            if accepted_at is not None:
                break
            rec = FixedPointRecord(m, tuple(digits), tower, residuals, floors,
                                   False, None, tol, r, str(seed.eta.coeffs.dtype),
                                   heights)
            err = NoConvergence("tower failed at block %d: %s" % (block, exc))
            err.record = rec
            raise err from exc
        residuals.append(float(d))
        floors.append(float(fl))
        if accepted_at is None and d < tol:
            accepted_at = block
            if stop_at_accept:
                break
        if accepted_at is not None and d > 10 * tol:
            break
    rec = FixedPointRecord(m, tuple(digits), tower, residuals, floors,
                           accepted_at is not None, accepted_at, tol, r,
                           str(seed.eta.coeffs.dtype), heights)
    if accepted_at is None:
        err = NoConvergence(
            "no residual below %.3g within %d blocks (min %.3g)"
            % (tol, j_max, min(residuals) if residuals else float("nan")))
        err.record = rec
        raise err
    return rec


def scaling_constants(record):
    """Pre-rescaling lengths |I_eta| of the swapped pair per tower step.

    The rescaling factor of step j is |I_xi| = |eta_j(0)| of the normalized
    pair entering the step; the limit along the tower is the universal
    scaling ratio, to be cross-checked against interval ratios measured on
    the glued-map orbit.
    """
    return [float(-z.eta0) for z in record.tower[:-1]]


def glued_interval_ratios(pair, n_levels=10):
    """|I_{n+1}|/|I_n| along the orbit of the glued circle map."""
    from .rotation import rotation_number_heights, dynamical_returns, _return_step
    g = glue(pair)
    cf = rotation_number_heights(g, depth=n_levels + 1)
    P, Q = dynamical_returns(cf.digits, len(cf))
    lengths = []
    for p, q in zip(P, Q):
        zi, zf = _return_step(g, 0, 0.0, q, p)
        lengths.append(abs(zi + zf))
    return [lengths[i + 1] / lengths[i] for i in range(len(lengths) - 1)]


# ---------------------------------------------------------------------------
# seed steering
# ---------------------------------------------------------------------------

@dataclass
class ProbeResult:
    depth: int
    survived: bool
    rho_side: int      # sign of the rotation-mode deviation label, 0 unknown
    rho_mag: float
    c_side: int        # sign label of the arc-mode drift, 0 unknown
    c_mag: float


def _kappa(pair):
    """Scalar tracking the free critical point inside the pair, tagged by
    the map it currently sits in."""
    ic = pair.interior_critical_points()
    if ic["eta"]:
        return ("e", ic["eta"][0][0])
    if ic["xi"]:
        return ("x", ic["xi"][0][0] / max(-pair.eta0, 1e-30))
    return (None, 0.0)


def _rho_raw(pair, n=600):
    g = glue(pair)
    u, w = 0.0, 0
    for _ in range(n):
        v = float(g.eval(u))
        mfl = math.floor(v)
        u, w = v - mfl, w + mfl
    return (w + u) / n


def _rho_targets(digits, depth=40):
    """Expected rotation number at each tower level for a periodic digit
    sequence (the Gauss shifts of the continued fraction)."""
    m = len(digits)
    reps = depth // m + 3
    out = []
    for i in range(m):
        seq = (tuple(digits[i:]) + tuple(digits) * reps)[:30]
        out.append(ContinuedFraction(seq).value)
    return out


def probe_tower(make_seed, digits, depth_cap, m=None):
    """Run a disposable tower and classify how it breaks.

    Returns a ProbeResult whose side labels are consistent monotone
    functions of the seed's unstable coordinates (their absolute sign
    convention is irrelevant: the bisections calibrate against brackets).
    """
    m = m or len(digits)
    targets = _rho_targets(digits, depth_cap)
    try:
        z = make_seed()
    except RenormLabError:
        return ProbeResult(-1, False, 0, 0.0, 0, 0.0)
    kappas = [_kappa(z)]
    pairs = [z]
    broke = depth_cap
    for j in range(depth_cap):
        try:
            z2 = renormalize(z)
            h = z2.meta.get("last_height")
        except RenormLabError:
            z2, h = None, None
        if z2 is None or h != digits[j % len(digits)]:
            broke = j
            break
        z = z2
        pairs.append(z)
        kappas.append(_kappa(z))
        if len(pairs) > 4 * m + 2:
            pairs.pop(0)
    else:
        return ProbeResult(depth_cap, True, 0, 0.0, 0, 0.0)
    # rotation-mode reading from the freshest healthy level
    rho_side, rho_mag = 0, 0.0
    lev = broke - 1
    if lev >= 0:
        dev = _rho_raw(pairs[-1]) - targets[lev % len(targets)]
        rho_mag = abs(dev)
        rho_side = int(math.copysign(1, dev)) * (1 if lev % 2 == 0 else -1)
    # arc-mode reading from the stride-m drift of the tracked critical point
    c_side, c_mag = 0, 0.0
    tail = kappas
    diffs = []
    for b in range(len(tail) - 1, m - 1, -1):
        t1, t0 = tail[b], tail[b - m]
        if t1[0] is not None and t1[0] == t0[0]:
            diffs.append((b, t1[1] - t0[1]))
        if len(diffs) == 2:
            break
    if diffs:
        b, d_last = diffs[0]
        c_mag = abs(d_last)
        sgn_mult = 1
        if len(diffs) == 2 and diffs[1][1] != 0.0:
            sgn_mult = int(math.copysign(1, d_last * diffs[1][1]))
        # fold out the per-block multiplier sign so the label tracks the seed
        blocks = b // m
        c_side = int(math.copysign(1, d_last))
        if sgn_mult < 0 and blocks % 2 == 1:
            c_side = -c_side
    return ProbeResult(broke, False, rho_side, rho_mag, c_side, c_mag)


def _bisect_param(make_seed_at, digits, depth_cap, center, width, reader,
                  max_iter, min_mag, m=None):
    """Bisect one seed parameter on a probe side label.

    ``reader`` picks (side, mag) out of a ProbeResult.  Returns (center,
    final half-width, deepest break level, survived); stops early when a
    probe reaches depth_cap or the tracked mode stops being readable.
    """
    lo, hi = center - width, center + width
    pl = probe_tower(make_seed_at(lo), digits, depth_cap, m)
    ph = probe_tower(make_seed_at(hi), digits, depth_cap, m)
    grow = 0
    while not (pl.survived or ph.survived):
        sl, _ = reader(pl)
        sh, _ = reader(ph)
        if sl != 0 and sh != 0 and sl != sh:
            break
        width *= 2.0
        grow += 1
        if grow > 10:
            return center, width, max(pl.depth, ph.depth), False
        lo, hi = center - width, center + width
        pl = probe_tower(make_seed_at(lo), digits, depth_cap, m)
        ph = probe_tower(make_seed_at(hi), digits, depth_cap, m)
    if pl.survived:
        return lo, width, depth_cap, True
    if ph.survived:
        return hi, width, depth_cap, True
    sl, _ = reader(pl)
    best_depth = max(pl.depth, ph.depth)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        pm = probe_tower(make_seed_at(mid), digits, depth_cap, m)
        if pm.survived:
            return mid, 0.5 * (hi - lo), depth_cap, True
        best_depth = max(best_depth, pm.depth)
        sm, mag = reader(pm)
        if sm == 0 or mag < min_mag:
            return mid, 0.5 * (hi - lo), best_depth, False
        if sm == sl:
            lo = mid
        else:
            hi = mid
        if hi - lo <= abs(mid) * 1e-18 + 5e-22:
            break
    return 0.5 * (lo + hi), 0.5 * (hi - lo), best_depth, False


def steer_seed(make_seed, digits, x0, wx, y0=None, wy=None,
               depth_cap=60, rounds=6, inner=60, m=None):
    """Steer one or two seed parameters onto the stable set.

    ``make_seed(x[, y])`` builds a normalized pair.  The x-parameter is
    bisected on the rotation-mode label, the y-parameter (when given) on
    the arc-mode label, in alternating rounds; steering stops as soon as a
    probe survives ``depth_cap`` renormalization steps.
    """
    x, y = x0, y0
    depth = -1

    def seed_at_x(v):
        return (lambda: make_seed(v)) if y0 is None \
            else (lambda: make_seed(v, y))

    def seed_at_y(v):
        return lambda: make_seed(x, v)

    for _ in range(rounds):
        y_prev = y
        x, wxf, depth, done = _bisect_param(
            seed_at_x, digits, depth_cap, x, wx,
            lambda p: (p.rho_side, p.rho_mag), inner, 1e-4, m)
        if done:
            break
        if y0 is None:
            wx = max(16.0 * wxf, abs(x) * 1e-18 + 1e-21)
            continue
        y, wyf, depth, done = _bisect_param(
            seed_at_y, digits, depth_cap, y, wy,
            lambda p: (p.c_side, p.c_mag), inner, 1e-10, m)
        if done:
            break
        # the x optimum moves with y; restart its bracket wide enough
        wx = max(16.0 * wxf, 4.0 * abs(y - y_prev), abs(x) * 1e-18 + 1e-21)
        wy = max(16.0 * wyf, abs(y) * 1e-18 + 1e-21)
    if y0 is None:
        return x, depth
    return (x, y), depth


def shifted_pair(pair, s_both, s_eta=0.0):
    """Pair with constant shifts added to the maps (steering directions).

    Shifting both maps tracks the rotation mode; shifting eta alone breaks
    the degeneracy and reaches the arc mode.  The commutation defect
    introduced is O(shift) and stays far below the validation tolerance at
    steering scales.
    """
    e = pair.eta.coeffs.copy()
    x = pair.xi.coeffs.copy()
    dt = e.dtype.type
    e[0] += dt(s_both) + dt(s_eta)
    x[0] += dt(s_both)
    return CommutingPair(
        AnalyticMap(pair.eta.domain, e, pair.eta.tail_bound),
        AnalyticMap(pair.xi.domain, x, pair.xi.tail_bound),
        meta=pair.meta)


def refine_extended(pair, digits, depth_cap=70, rounds=5, inner=70, m=None,
                    two_axes=True):
    """Cast the pair to extended precision and steer shift directions."""
    zl = pair_astype(pair, np.longdouble)

    if two_axes:
        def make_seed(s, t):
            return shifted_pair(zl, s, t)
        (s, t), depth = steer_seed(make_seed, digits, 0.0, 1e-13,
                                   0.0, 1e-13, depth_cap, rounds, inner, m)
        return shifted_pair(zl, s, t), depth
    def make_seed(s):
        return shifted_pair(zl, s)
    s, depth = steer_seed(make_seed, digits, 0.0, 1e-13,
                          depth_cap=depth_cap, rounds=rounds, inner=inner,
                          m=m)
    return shifted_pair(zl, s), depth


# ---------------------------------------------------------------------------
# linearization
# ---------------------------------------------------------------------------

class _PerturbedLift:
    """Glued circle lift plus a small trigonometric deformation."""

    def __init__(self, base, eps, mean, cos_c, sin_c):
        self.base = base
        self.eps = eps
        self.bump = CircleLift(mean, cos_c, sin_c)

    def eval(self, x, deriv=0):
        out = np.asarray(self.base.eval(x, deriv), dtype=float)
        if deriv == 0:
            bump = self.bump.mean + self.bump.periodic(x)
        else:
            bump = self.bump.periodic(x, deriv)
        return out + self.eps * np.asarray(bump)

    def __call__(self, x):
        return self.eval(x)


def _pinned_directions(n_modes):
    """Trig deformations with first and second derivative pinned at 0.

    The mean shift is the rotation direction; cos_k and sin_k modes are
    corrected by the k = 1 modes so the critical point at 0 keeps its cubic
    contact for every direction.
    """
    dirs = [(1.0, (), ())]
    for k in range(2, n_modes + 2):
        cos_c = np.zeros(k)
        cos_c[k - 1] = 1.0
        cos_c[0] = -float(k * k)
        dirs.append((0.0, cos_c, ()))
        sin_c = np.zeros(k)
        sin_c[k - 1] = 1.0
        sin_c[0] = -float(k)
        dirs.append((0.0, (), sin_c))
    return dirs


def pair_coordinates(pair, n_coeffs):
    """First n Chebyshev coefficients of (eta, h o xi o h^{-1}) on [0, 1]."""
    eta, xic = normalized_components(pair.normalized())
    ce = _fit_at_degree(lambda x: eta.eval(x, check=False), 0.0, 1.0,
                        n_coeffs - 1)
    cx = _fit_at_degree(lambda x: xic.eval(x, check=False), 0.0, 1.0,
                        n_coeffs - 1)
    return np.concatenate([ce, cx])


@dataclass
class Linearization:
    matrix: np.ndarray
    n_coeffs: int
    n_directions: int
    step: float
    leakage: float
    richardson: float
    fwd_bwd_gap: float


def linearize(record, N, h=1e-5, check_richardson=False):
    """Finite-difference Jacobian of one period R^m at the record's limit.

    Perturbation directions are pinned trig deformations of the glued
    circle map, pushed through extraction into pair coordinates (the first
    N Chebyshev coefficients of each normalized component); the Jacobian of
    R^m is compressed onto that frame by least squares.  m = 0 performs the
    chart round trip only and must produce the identity.
    """
    if not record.accepted:
        raise NoConvergence("record was not accepted")
    m = record.period
    base_pair = record.final
    if base_pair.eta.coeffs.dtype != np.dtype(np.float64):
        base_pair = pair_astype(base_pair, np.float64)
    g = glue(base_pair)
    n_modes = max((N - 1) // 2, 1)
    dirs = _pinned_directions(n_modes)[:max(N - 2, 1)]

    def path(eps, d):
        lift = _PerturbedLift(g, eps, *d)
        z = pair_from_circle_map(lift, 0, require_critical=False).normalized()
        u = pair_coordinates(z, N)
        if m == 0:
            return u, u
        for _ in range(m):
            z = renormalize(z)
        return u, pair_coordinates(z, N)

    U, W = [], []
    gap = 0.0
    rich = 0.0
    base_u, base_w = path(0.0, (0.0, (), ()))
    for d in dirs:
        up, wp = path(h, d)
        um, wm = path(-h, d)
        du = (up - um) / (2 * h)
        dw = (wp - wm) / (2 * h)
        fwd = (wp - base_w) / h
        bwd = (base_w - wm) / h
        denom = max(np.linalg.norm(dw), 1e-30)
        gap = max(gap, float(np.linalg.norm(fwd - bwd) / denom))
        if check_richardson:
            up2, wp2 = path(h / 2, d)
            um2, wm2 = path(-h / 2, d)
            dw2 = (wp2 - wm2) / h
            rich = max(rich, float(np.linalg.norm(dw2 - dw) / denom))
        U.append(du)
        W.append(dw)
    if gap > 0.10:
        raise StepTooSmall(
            "forward/backward differences disagree by %.1f%%" % (100 * gap))
    U = np.array(U).T
    W = np.array(W).T
    A, *_ = np.linalg.lstsq(U, W, rcond=None)
    leak = float(np.linalg.norm(U @ A - W) / max(np.linalg.norm(W), 1e-30))
    return Linearization(A, N, U.shape[1], h, leak, rich, gap)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

@dataclass
class SpectrumReport:
    truncation: int
    eigenvalues: list
    unstable_count: int
    margin: float
    conjugation_defect: float
    tail_decayed: bool
    stability_across_N: bool | None = None

    def to_dict(self):
        return {
            "truncation": self.truncation,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "unstable_count": self.unstable_count,
            "margin": self.margin,
            "conjugation_defect": self.conjugation_defect,
            "tail_decayed": self.tail_decayed,
            "stability_across_N": self.stability_across_N,
        }


def spectrum(J, margin=0.05, truncation=None):
    """Eigenvalues of the compressed Jacobian, sorted by modulus.

    Counts eigenvalues beyond 1 + margin, verifies the multiset is closed
    under conjugation (the matrix is real), and checks that the moduli
    below 1 decay (the compactness signature of the operator).
    """
    if isinstance(J, Linearization):
        if truncation is None:
            truncation = J.n_coeffs
        J = J.matrix
    J = np.asarray(J, dtype=float)
    if truncation is None:
        truncation = J.shape[0]
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise EigenFailure("need a square matrix")
    try:
        ev = np.linalg.eigvals(J)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    order = np.argsort(-np.abs(ev))
    ev = ev[order]
    unstable = int(np.sum(np.abs(ev) > 1.0 + margin))
    # conjugation closure
    defect = 0.0
    pool = list(ev)
    for z in ev:
        best = min(pool, key=lambda w: abs(w - np.conj(z)))
        defect = max(defect, abs(best - np.conj(z)))
        pool.remove(best)
    mods = np.abs(ev)
    below = mods[mods < 1.0]
    decayed = bool(len(below) >= 2 and below[-1] <= 0.5 * below[0] + 1e-12)
    return SpectrumReport(int(truncation), [complex(z) for z in ev],
                          unstable, margin, float(defect), decayed)


def spectra_stable(reports):
    counts = {r.unstable_count for r in reports}
    stable = len(counts) == 1
    for r in reports:
        r.stability_across_N = stable
    return stable
