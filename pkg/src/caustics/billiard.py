"""Billiard ball map inside a geodesically convex table.

Phase coordinates are (s, p): boundary arc length and p = cos(theta) with
theta in (0, pi) the metric angle between the outgoing geodesic and the
positively oriented tangent.  In these coordinates the invariant area form
is dp ^ ds, so symplecticity is a plain Jacobian determinant check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .curves import ConvexCurve
from .errors import DomainError, GrazingError
from .geodesic import GeodesicState, geodesic_ivp
from .metric import MetricChart

GRAZING_CUTOFF = 1.0 - 1e-6


@dataclass(frozen=True)
class PhasePoint:
    """Boundary arc length s (mod table length) and tangential momentum p."""

    s: float
    p: float

    def __post_init__(self):
        if not (-1.0 < self.p < 1.0):
            raise GrazingError(f"p={self.p} outside (-1, 1)")


@dataclass
class BilliardStep:
    """One bounce: the outgoing chord and the arrival phase point."""

    phase: PhasePoint          # phase after reflection at the arrival point
    start: np.ndarray          # chart point of departure
    end: np.ndarray            # chart point of arrival
    direction: np.ndarray      # unit outgoing direction at departure
    arrival_direction: np.ndarray  # unit incoming direction at arrival
    chord_length: float


def _outgoing_direction(table: ConvexCurve, tau: float, p: float) -> np.ndarray:
    T = table.tangent_unit(tau)
    N = table.chart.rotate90(table.point(tau), T)  # interior side for ccw
    return p * T + math.sqrt(max(1.0 - p * p, 0.0)) * N


def billiard_step(table: ConvexCurve, phi: PhasePoint) -> BilliardStep:
    if abs(phi.p) > GRAZING_CUTOFF:
        raise GrazingError(f"|p|={abs(phi.p)} beyond grazing cutoff")
    chart = table.chart
    ell = table.total_length
    s0 = phi.s % ell
    tau0 = table.param_at_arclength(s0)
    X = table.point(tau0)
    d = _outgoing_direction(table, tau0, phi.p)

    if chart.flat:
        tau1, Y = _next_crossing_flat(table, tau0, X, d)
        d_arr = d
    else:
        tau1, Y, d_arr = _next_crossing_curved(table, tau0, X, d)

    T1 = table.tangent_unit(tau1)
    p1 = chart.inner(Y, d_arr, T1)
    s1 = table.arclength(table.wrap(tau1)) % ell
    return BilliardStep(PhasePoint(s1, p1), X, Y, d, d_arr,
                        chord_length=float(np.linalg.norm(Y - X)))


def billiard_map(table: ConvexCurve, phi: PhasePoint) -> PhasePoint:
    """One bounce of the billiard ball map."""
    return billiard_step(table, phi).phase


def _next_crossing_flat(table: ConvexCurve, tau0, X, d, n: int = 96):
    t0, t1 = table.tau_range
    period = t1 - t0

    def f(tau):
        P = table.point(tau)
        return d[0] * (P[1] - X[1]) - d[1] * (P[0] - X[0])

    taus = tau0 + period * np.arange(1, n) / n
    vals = np.array([f(t) for t in taus])
    sign0 = np.sign(vals[0])
    idx = np.nonzero(np.sign(vals) != sign0)[0]
    if len(idx) == 0:
        raise DomainError("no return to the table curve (grazing chord)")
    i = idx[0]
    lo = taus[i - 1] if i > 0 else tau0 + period / n
    hi = taus[i]
    tau_cross = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)
    return tau_cross, table.point(tau_cross)


def _next_crossing_curved(table: ConvexCurve, tau0, X, d, n: int = 400):
    chart = table.chart
    horizon = 0.75 * table.total_length
    for _ in range(3):
        path = geodesic_ivp(chart, GeodesicState(X, d), horizon)
        if path.exited:
            # search up to the exit; a crossing may still precede it
            pass

        def g(s):
            return table.signed_radial(path.state(s).position)

        ss = np.linspace(0.0, path.length, n + 1)[1:]
        vals = np.array([g(s) for s in ss])
        # leave the immediate neighborhood of the departure point first
        away = np.nonzero(vals < -1e-9 * table.total_length)[0]
        if len(away) > 0:
            j0 = away[0]
            back = np.nonzero(vals[j0:] >= 0.0)[0]
            if len(back) > 0:
                i = j0 + back[0]
                s_cross = brentq(g, ss[i - 1], ss[i], xtol=1e-14)
                st = path.state(s_cross)
                tau1 = _project_param(table, st.position)
                return tau1, st.position, st.velocity
        if path.exited:
            raise DomainError("geodesic left the chart before returning "
                              "to the table")
        horizon *= 2.0
    raise DomainError("no return to the table curve")


def _project_param(table: ConvexCurve, point, iters: int = 3) -> float:
    """Curve parameter of the foot point of ``point`` on the table."""
    tau = table.param_near(point)
    for _ in range(iters):
        P = table.point(tau)
        V = table.velocity(tau)
        A = table.acceleration(tau)
        r = P - np.asarray(point, dtype=float)
        f = float(r @ V)
        df = float(V @ V + r @ A)
        if df == 0.0:
            break
        tau -= f / df
    return table.wrap(tau)


def reverse_phase(table: ConvexCurve, phi: PhasePoint) -> PhasePoint:
    """(s, p) -> (s, -p): conjugates the map to its inverse."""
    return PhasePoint(phi.s, -phi.p)


def symplectic_check(table: ConvexCurve, phi: PhasePoint,
                     h_s: Optional[float] = None,
                     h_p: float = 1e-6) -> float:
    """| |det J| - 1 | of the billiard map Jacobian in (s, p) coordinates."""
    ell = table.total_length
    if h_s is None:
        h_s = 1e-6 * ell

    def advance(s, p):
        out = billiard_map(table, PhasePoint(s % ell, p))
        return out.s, out.p

    s0, p0 = phi.s, phi.p
    sp, pp = advance(s0 + h_s, p0)
    sm, pm = advance(s0 - h_s, p0)
    ds_ds = _wrapped_diff(sp, sm, ell) / (2 * h_s)
    dp_ds = (pp - pm) / (2 * h_s)
    sp, pp = advance(s0, p0 + h_p)
    sm, pm = advance(s0, p0 - h_p)
    ds_dp = _wrapped_diff(sp, sm, ell) / (2 * h_p)
    dp_dp = (pp - pm) / (2 * h_p)
    det = ds_ds * dp_dp - ds_dp * dp_ds
    return abs(abs(det) - 1.0)


def _wrapped_diff(a, b, ell):
    d = (a - b) % ell
    if d > ell / 2:
        d -= ell
    return d


def _birkhoff_weights(n: int) -> np.ndarray:
    x = (np.arange(n) + 0.5) / n
    return np.exp(-1.0 / (x * (1.0 - x)))


def rotation_number(table: ConvexCurve, phi: PhasePoint, N: int = 2000,
                    weighted: bool = True):
    """Mean advance of s per iterate, as a fraction of the table length.

    Returns (rho, error_estimate).  With ``weighted`` the increments are
    averaged with a smooth bump window, which converges superpolynomially
    on Diophantine invariant curves.
    """
    if N < 1000:
        raise ValueError("need N >= 1000 iterations")
    ell = table.total_length
    cur = phi
    inc = np.empty(N)
    for k in range(N):
        nxt = billiard_map(table, cur)
        inc[k] = (nxt.s - cur.s) % ell
        cur = nxt
    if weighted:
        w = _birkhoff_weights(N)
        rho = float(np.sum(w * inc) / np.sum(w)) / ell
        h = N // 2
        wh = _birkhoff_weights(h)
        rho_h = float(np.sum(wh * inc[:h]) / np.sum(wh)) / ell
    else:
        rho = float(inc.mean()) / ell
        rho_h = float(inc[:N // 2].mean()) / ell
    return rho, abs(rho - rho_h)


# ---------------------------------------------------------------------------
# Caustics


def tangent_launch(table: ConvexCurve, caustic: ConvexCurve,
                   s: float) -> PhasePoint:
    """Phase point at arc length s whose chord is tangent to the caustic,
    with the caustic on the left of the chord (forward branch)."""
    chart = table.chart
    ell = table.total_length
    tau0 = table.param_at_arclength(s % ell)
    X = table.point(tau0)
    T = table.tangent_unit(tau0)
    if chart.flat:
        d = _tangent_direction_flat(caustic, X)
        return PhasePoint(s % ell, chart.inner(X, d, T))
    return _tangent_launch_curved(table, caustic, s, tau0, X, T)


def _caustic_center(caustic: ConvexCurve) -> np.ndarray:
    pts = np.array([caustic.point(t) for t in np.linspace(0, 1, 64,
                                                          endpoint=False)])
    return pts.mean(axis=0)


def _tangent_direction_flat(caustic: ConvexCurve, X, n: int = 256):
    """Unit direction from X tangent to the caustic, caustic on the left."""
    center = _caustic_center(caustic)

    def f(tau):
        P = caustic.point(tau)
        V = caustic.velocity(tau)
        return (P[0] - X[0]) * V[1] - (P[1] - X[1]) * V[0]

    taus = np.linspace(0.0, 1.0, n, endpoint=False)
    vals = np.array([f(t) for t in taus])
    roots = []
    for i in range(n):
        a, b = vals[i], vals[(i + 1) % n]
        if a == 0.0:
            roots.append(taus[i])
        elif a * b < 0:
            lo = taus[i]
            hi = taus[i] + 1.0 / n
            roots.append(brentq(f, lo, hi, xtol=1e-15))
    for tau in roots:
        P = caustic.point(tau)
        d = P - X
        nd = np.linalg.norm(d)
        if nd == 0.0:
            continue
        d = d / nd
        if d[0] * (center[1] - X[1]) - d[1] * (center[0] - X[0]) > 0:
            return d
    raise DomainError("no tangent line with the caustic on the left")


def _tangent_launch_curved(table, caustic, s, tau0, X, T, n: int = 48):
    chart = table.chart
    N = chart.rotate90(X, T)

    def min_radial(theta):
        d = math.cos(theta) * T + math.sin(theta) * N
        path = geodesic_ivp(chart, GeodesicState(X, d),
                            0.6 * table.total_length)
        ss = np.linspace(0, path.length, 200)
        return min(caustic.signed_radial(path.state(t).position) for t in ss)

    # the minimum signed radial distance decreases from positive (miss)
    # to negative (cut) as theta steepens from tangency
    thetas = np.linspace(0.05, math.pi / 2, n)
    prev = min_radial(thetas[0])
    for i in range(1, n):
        cur = min_radial(thetas[i])
        if prev > 0 >= cur:
            theta = brentq(min_radial, thetas[i - 1], thetas[i], xtol=1e-12)
            return PhasePoint(s % table.total_length, math.cos(theta))
        prev = cur
    raise DomainError("no tangent launch direction found")


def chord_caustic_gap(table: ConvexCurve, caustic: ConvexCurve,
                      start, direction, n: int = 512) -> float:
    """|min over the caustic of the signed offset from the chord line|.

    Zero iff the chord is tangent to the caustic (flat charts: exact
    perpendicular distance; curved charts: signed radial gap along the
    geodesic, a metric-equivalent measure at small values).
    """
    chart = table.chart
    if chart.flat:
        d = np.asarray(direction, float)
        d = d / np.linalg.norm(d)
        X = np.asarray(start, float)

        def offset(t):
            P = caustic.point(t)
            return d[0] * (P[1] - X[1]) - d[1] * (P[0] - X[0])

        return abs(_refined_min(offset, 0.0, 1.0, n))
    path = geodesic_ivp(chart, GeodesicState(start, direction),
                        0.75 * table.total_length)

    def offset(t):
        return caustic.signed_radial(path.state(t).position)

    return abs(_refined_min(offset, 0.0, path.length, n))


def _refined_min(f, lo, hi, n):
    from scipy.optimize import minimize_scalar
    ts = np.linspace(lo, hi, n, endpoint=False)
    vals = np.array([f(t) for t in ts])
    i = int(np.argmin(vals))
    h = (hi - lo) / n
    res = minimize_scalar(f, bracket=None,
                          bounds=(ts[i] - h, ts[i] + h), method="bounded",
                          options={"xatol": 1e-12})
    return min(float(res.fun), float(vals[i]))


def caustic_residual(table: ConvexCurve, caustic: ConvexCurve,
                     phi: PhasePoint) -> float:
    """Max tangency gap of the outgoing chord and its reflection."""
    step1 = billiard_step(table, phi)
    step2 = billiard_step(table, step1.phase)
    r1 = chord_caustic_gap(table, caustic, step1.start, step1.direction)
    r2 = chord_caustic_gap(table, caustic, step2.start, step2.direction)
    return max(r1, r2)


# ---------------------------------------------------------------------------
# Poncelet closure


def closure_residual(table: ConvexCurve, phi: PhasePoint, n: int) -> float:
    """Distance in (s, p) between phi and its n-th iterate."""
    ell = table.total_length
    cur = phi
    for _ in range(n):
        cur = billiard_map(table, cur)
    ds = abs(_wrapped_diff(cur.s, phi.s, ell))
    return math.hypot(ds, cur.p - phi.p)


def poncelet_search(table: ConvexCurve, caustic: ConvexCurve, n: int,
                    n_verify: int = 10, tol: float = 1e-6,
                    seed_s: float = 0.0):
    """Phase point of an n-periodic orbit tangent to the caustic, or None.

    If the orbit launched tangent to the caustic closes up after n bounces,
    ``n_verify`` further launches from other boundary points are verified to
    close as well (the closure is a property of the caustic, not of the
    starting point).
    """
    phi = tangent_launch(table, caustic, seed_s)
    if closure_residual(table, phi, n) > tol:
        return None
    ell = table.total_length
    for k in range(1, n_verify + 1):
        phik = tangent_launch(table, caustic, seed_s + ell * k / (n_verify + 1.3))
        if closure_residual(table, phik, n) > tol:
            return None
    return phi


def find_closing_caustic(table: ConvexCurve, family: Callable[[float], ConvexCurve],
                         n: int, bracket, rho_target: Optional[float] = None,
                         N: int = 2000):
    """Parameter value in ``family`` whose caustic closes after n bounces.

    Root-finds rotation_number(lam) = 1/n (or ``rho_target``) over the
    bracket; returns (lam, caustic, phase point).
    """
    target = (1.0 / n) if rho_target is None else rho_target

    def f(lam):
        caustic = family(lam)
        phi = tangent_launch(table, caustic, 0.0)
        rho, _ = rotation_number(table, phi, N)
        return rho - target

    lam = brentq(f, bracket[0], bracket[1], xtol=1e-12)
    caustic = family(lam)
    return lam, caustic, tangent_launch(table, caustic, 0.0)
