"""Local string construction on a convex caustic.

For points A, B on a convex curve, the tangent geodesics cross at C_AB and
the string excess is L(A, B) = |AC| + |BC| - arc(A, B).  The level set
L = p traced by C_AB is the p-th string curve; the map A -> B at fixed p is
the string diffeomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .curves import ConvexCurve, from_points
from .errors import IntersectionError, RangeError
from .geodesic import tangent_intersection
from .metric import MetricChart


@dataclass(frozen=True)
class StringRecord:
    """One string configuration: caustic parameters, crossing, and lengths."""

    A_param: float
    B_param: float
    C: np.ndarray
    AC: float
    BC: float
    arc: float

    @property
    def excess(self) -> float:
        return self.AC + self.BC - self.arc


def string_excess(curve: ConvexCurve, A_param: float,
                  B_param: float, **kw) -> StringRecord:
    """String record for the pair (A, B); L >= 0 and L -> 0 as B -> A."""
    A_param = curve.wrap(A_param)
    B_param = curve.wrap(B_param)
    if A_param == B_param:
        return StringRecord(A_param, B_param, curve.point(A_param), 0.0, 0.0,
                            0.0)
    C, ac, bc = tangent_intersection(curve.chart, curve, A_param, B_param,
                                     **kw)
    arc = curve.arc_between(A_param, B_param)
    return StringRecord(A_param, B_param, C, ac, bc, arc)


def _separation_seed(curve: ConvexCurve, A_param: float, p: float) -> float:
    """Arc-length separation with L ~ p from the small-angle expansion
    L ~ kappa^2 sigma^3 / 12."""
    kappa = max(curve.kappa_g(A_param), 1e-12)
    return (12.0 * p / kappa ** 2) ** (1.0 / 3.0)


def string_diffeo(curve: ConvexCurve, p: float, A_param: float,
                  sigma_guess: Optional[float] = None,
                  trust_region: Optional[float] = None,
                  tol: float = 1e-13) -> float:
    """Parameter B with string_excess(A, B) = p (monotone root-find).

    ``sigma_guess`` warm-starts the bracket with a previous arc separation.
    """
    if p < 0:
        raise RangeError("string excess must be nonnegative")
    if p == 0.0:
        return curve.wrap(A_param)
    A_param = curve.wrap(A_param)
    sA = curve.arclength(A_param)
    if curve.closed:
        sigma_max = 0.45 * curve.total_length
    else:
        sigma_max = curve.arclength(curve.tau_range[1]) - sA
        if sigma_max <= 0:
            raise RangeError("A at the end of the germ")

    tiny = 1e-6 * sigma_max

    def excess_at(sigma: float) -> float:
        # below the resolvable separation the excess is ~ kappa^2 sigma^3/12,
        # utterly negligible; short-circuit before the intersection turns
        # singular
        if sigma < tiny:
            return -p
        B = curve.param_at_arclength(sA + sigma)
        return string_excess(curve, A_param, B,
                             trust_region=trust_region).excess - p

    hi = sigma_guess if sigma_guess else _separation_seed(curve, A_param, p)
    hi = min(hi, sigma_max)
    for _ in range(60):
        try:
            val = excess_at(hi)
        except IntersectionError:
            raise RangeError(f"excess p={p} outside the trust region")
        if val >= 0.0:
            break
        hi = min(1.5 * hi, sigma_max)
        if hi == sigma_max and excess_at(sigma_max) < 0.0:
            raise RangeError(f"excess p={p} too large for this curve")
    else:
        raise RangeError(f"excess p={p} too large for this curve")
    lo = hi / 1.5 if excess_at(hi / 1.5) < 0 else tiny
    sigma = brentq(excess_at, lo, hi, xtol=tol, rtol=8.9e-16)
    return curve.param_at_arclength(sA + sigma) % 1.0 if curve.closed else \
        curve.param_at_arclength(sA + sigma)


@dataclass
class StringCurve:
    """Sampled p-th string curve with its generating records."""

    caustic: ConvexCurve
    p: float
    records: list
    points: np.ndarray
    curve: ConvexCurve


def string_curve(curve: ConvexCurve, p: float,
                 grid: Sequence[float] | int = 64,
                 trust_region: Optional[float] = None) -> StringCurve:
    """String curve of excess p over a grid of A parameters.

    For p = 0 the caustic itself is returned (with empty records).
    """
    if isinstance(grid, int):
        t0, t1 = curve.tau_range
        if curve.closed:
            grid = np.linspace(t0, t1, grid, endpoint=False)
        else:
            grid = np.linspace(t0, t1 - 0.5 * (t1 - t0), grid)
    grid = np.asarray(grid, dtype=float)
    if p == 0.0:
        pts = np.array([curve.point(t) for t in grid])
        return StringCurve(curve, 0.0, [], pts, curve)
    records = []
    sigma = None
    for A in grid:
        B = string_diffeo(curve, p, A, sigma_guess=sigma,
                          trust_region=trust_region)
        rec = string_excess(curve, A, B, trust_region=trust_region)
        sigma = rec.arc
        records.append(rec)
    pts = np.array([r.C for r in records])
    built = from_points(curve.chart, pts, closed=curve.closed,
                        name=f"string_p={p:g}")
    return StringCurve(curve, p, records, pts, built)


# ---------------------------------------------------------------------------
# Graves property


def _metric_gap(chart: MetricChart, leaf: ConvexCurve, point) -> float:
    """Approximate metric distance from a chart point to a closed leaf."""
    gap = leaf.signed_radial(point)
    tau = leaf.param_near(point)
    foot = leaf.point(tau)
    d = np.asarray(point, float) - foot
    nd = np.linalg.norm(d)
    if nd < 1e-300:
        return 0.0
    return abs(gap) * chart.norm(foot, d / nd)


def _germ_gap(chart: MetricChart, leaf: ConvexCurve, point) -> float:
    taus = np.linspace(*leaf.tau_range, 400)
    pts = np.array([leaf.point(t) for t in taus])
    d2 = np.sum((pts - np.asarray(point)) ** 2, axis=1)
    i = int(np.argmin(d2))
    t0, t1 = leaf.tau_range
    lo = taus[max(i - 1, 0)]
    hi = taus[min(i + 1, len(taus) - 1)]
    res = minimize_scalar(
        lambda t: float(np.sum((leaf.point(t) - np.asarray(point)) ** 2)),
        bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-13 * (t1 - t0)})
    foot = leaf.point(res.x)
    d = np.asarray(point, float) - foot
    nd = np.linalg.norm(d)
    if nd < 1e-300:
        return 0.0
    return nd * chart.norm(foot, d / nd)


def leaf_gap(chart: MetricChart, leaf: ConvexCurve, point) -> float:
    if leaf.closed:
        return _metric_gap(chart, leaf, point)
    return _germ_gap(chart, leaf, point)


def match_excess(inner: ConvexCurve, outer: ConvexCurve,
                 A_param: Optional[float] = None,
                 p_hi: Optional[float] = None,
                 trust_region: Optional[float] = None) -> float:
    """String excess p at which the point C(A_param, p) lands on ``outer``."""
    if A_param is None:
        t0, t1 = inner.tau_range
        A_param = t0 if inner.closed else t0 + 0.25 * (t1 - t0)

    def miss(p: float) -> float:
        B = string_diffeo(inner, p, A_param, trust_region=trust_region)
        rec = string_excess(inner, A_param, B, trust_region=trust_region)
        if outer.closed:
            return outer.signed_radial(rec.C)
        # germ leaves: signed offset along the second chart coordinate
        taus = np.linspace(*outer.tau_range, 200)
        pts = np.array([outer.point(t) for t in taus])
        d2 = np.sum((pts - rec.C) ** 2, axis=1)
        i = int(np.argmin(d2))
        n = inner.chart.rotate90(pts[i], outer.tangent_unit(taus[i]))
        return float((rec.C - pts[i]) @ n) / float(n @ n) ** 0.5

    scale = inner.total_length if inner.closed else \
        inner.arclength(inner.tau_range[1]) - inner.arclength(inner.tau_range[0])
    lo = 1e-10 * scale
    val0 = miss(lo)
    hi = p_hi if p_hi is not None else 1e-4 * scale
    last_good = lo
    for _ in range(200):
        try:
            val = miss(hi)
        except (RangeError, IntersectionError):
            hi = 0.5 * (last_good + hi)
            if hi <= last_good * (1 + 1e-12):
                raise RangeError("matching excess beyond the trust region")
            continue
        if val * val0 < 0.0:
            break
        last_good = hi
        hi *= 1.6
    else:
        raise RangeError("could not bracket the matching excess")
    return brentq(miss, last_good, hi, xtol=1e-14)


def graves_check(leaves: Sequence[ConvexCurve], i: int, j: int,
                 grid: int = 48,
                 trust_region: Optional[float] = None) -> float:
    """Max metric distance of the string curve of leaf i (excess matched at
    one point of leaf j) from leaf j."""
    inner, outer = leaves[i], leaves[j]
    p = match_excess(inner, outer, trust_region=trust_region)
    built = string_curve(inner, p, grid, trust_region=trust_region)
    return max(leaf_gap(inner.chart, outer, pt) for pt in built.points)
