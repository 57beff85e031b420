"""Geodesic primitives: initial-value integration, two-point shooting,
geodesic curvature, and tangent-geodesic intersections.

Paths are parametrized by arc length.  On flat charts geodesics are straight
lines and all operations use closed forms; otherwise the geodesic ODE is
integrated with DOP853 at tolerance 1e-12 with dense output, and boundary
exits are event-located.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .curves import ConvexCurve
from .errors import (
    BVPError,
    ConditioningError,
    DomainError,
    IntersectionError,
)
from .metric import MetricChart

IVP_RTOL = 1e-12
IVP_ATOL = 1e-12


@dataclass
class GeodesicState:
    """Position and velocity in chart coordinates."""

    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)


@dataclass
class GeodesicPath:
    """Arc-length parametrized geodesic segment.

    ``state(s)`` evaluates position and velocity at arc length s in
    [0, length].  ``exited`` flags early termination at the chart margin.
    """

    chart: MetricChart
    length: float
    state: Callable[[float], GeodesicState]
    exited: bool = False
    _sol: object = field(default=None, repr=False)

    @property
    def start(self) -> GeodesicState:
        return self.state(0.0)

    @property
    def end(self) -> GeodesicState:
        return self.state(self.length)

    def sample(self, n: int) -> np.ndarray:
        """(n, 5) rows (arclength, u, v, du, dv)."""
        ss = np.linspace(0.0, self.length, n)
        rows = np.empty((n, 5))
        for i, s in enumerate(ss):
            st = self.state(s)
            rows[i] = (s, *st.position, *st.velocity)
        return rows


def _gamma_scalars(chart: MetricChart, u: float, v: float):
    """Christoffel symbols of a 2D metric as six scalars.

    Returns (G111, G211, G112, G212, G122, G222) where Gkij = Gamma^k_ij.
    """
    E = chart.g11(u, v)
    F = chart.g12(u, v)
    G = chart.g22(u, v)
    d = chart.metric_derivatives((u, v))
    Eu, Ev = d[0]
    Fu, Fv = d[1]
    Gu, Gv = d[2]
    D2 = 2.0 * (E * G - F * F)
    if D2 <= 0.0:
        raise ConditioningError(f"degenerate metric at {(u, v)}")
    g111 = (G * Eu - 2 * F * Fu + F * Ev) / D2
    g211 = (2 * E * Fu - E * Ev - F * Eu) / D2
    g112 = (G * Ev - F * Gu) / D2
    g212 = (E * Gu - F * Ev) / D2
    g122 = (2 * G * Fv - G * Gu - F * Gv) / D2
    g222 = (E * Gv - 2 * F * Fv + F * Gu) / D2
    return g111, g211, g112, g212, g122, g222


def geodesic_ivp(chart: MetricChart, state: GeodesicState,
                 length: float) -> GeodesicPath:
    """Integrate the geodesic with the given initial state for ``length``.

    The initial velocity is normalized to unit metric speed, so the curve
    parameter is arc length.  If the path reaches the chart safety margin it
    is truncated and flagged ``exited``.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    pos = np.asarray(state.position, dtype=float)
    chart.require_inside(pos)
    vel = chart.unit(pos, state.velocity)

    if chart.flat:
        return _flat_path(chart, pos, vel, length)
    if length == 0.0:
        return GeodesicPath(chart, 0.0,
                            lambda s: GeodesicState(pos.copy(), vel.copy()))

    def rhs(s, y):
        g111, g211, g112, g212, g122, g222 = _gamma_scalars(chart, y[0], y[1])
        du, dv = y[2], y[3]
        return (du, dv,
                -(g111 * du * du + 2 * g112 * du * dv + g122 * dv * dv),
                -(g211 * du * du + 2 * g212 * du * dv + g222 * dv * dv))

    m = chart.margin
    events = [
        lambda s, y: y[0] - (chart.u_min + m),
        lambda s, y: (chart.u_max - m) - y[0],
        lambda s, y: y[1] - (chart.v_min + m),
        lambda s, y: (chart.v_max - m) - y[1],
    ]
    for ev in events:
        ev.terminal = True
    sol = solve_ivp(rhs, (0.0, length), np.concatenate([pos, vel]),
                    method="DOP853", rtol=IVP_RTOL, atol=IVP_ATOL,
                    dense_output=True, events=events)
    if sol.status == -1:
        raise BVPError(f"geodesic integration failed: {sol.message}")
    exited = sol.status == 1
    eff_len = float(sol.t[-1])

    def state_at(s: float, _sol=sol, _L=eff_len) -> GeodesicState:
        s = min(max(s, 0.0), _L)
        y = _sol.sol(s)
        return GeodesicState(y[:2].copy(), y[2:].copy())

    return GeodesicPath(chart, eff_len, state_at, exited=exited, _sol=sol)


def _flat_path(chart: MetricChart, pos, vel, length) -> GeodesicPath:
    # clip the ray to the margin rectangle
    m = chart.margin
    lo = np.array([chart.u_min + m, chart.v_min + m])
    hi = np.array([chart.u_max - m, chart.v_max - m])
    smax = length
    for i in range(2):
        if vel[i] > 0:
            smax = min(smax, (hi[i] - pos[i]) / vel[i])
        elif vel[i] < 0:
            smax = min(smax, (lo[i] - pos[i]) / vel[i])
    exited = smax < length

    def state_at(s: float) -> GeodesicState:
        s = min(max(s, 0.0), smax)
        return GeodesicState(pos + s * vel, vel.copy())

    return GeodesicPath(chart, smax, state_at, exited=exited)


def shoot(chart: MetricChart, point, direction, length: float) -> GeodesicPath:
    """Convenience wrapper: geodesic from a point along a direction."""
    return geodesic_ivp(chart, GeodesicState(point, direction), length)


# ---------------------------------------------------------------------------
# Two-point problem


def _chord_length_estimate(chart: MetricChart, A, B, n: int = 12) -> float:
    """Metric length of the straight chart segment A -> B (Gauss nodes)."""
    x, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (x + 1.0)
    w = 0.5 * w
    d = B - A
    total = 0.0
    for ti, wi in zip(t, w):
        total += wi * chart.norm(A + ti * d, d)
    return total


def default_convexity_radius(chart: MetricChart) -> float:
    return 0.2 * min(chart.spans)


def geodesic_bvp(chart: MetricChart, A, B,
                 convexity_radius: Optional[float] = None,
                 tol: float = 1e-11, max_iter: int = 40) -> GeodesicPath:
    """Locally minimizing geodesic from A to B by shooting.

    Newton iteration on (initial direction angle, arc length) against the
    endpoint gap; the initial guess is the chart chord.  Pairs separated by
    more than the convexity radius are refused.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    chart.require_inside(A)
    chart.require_inside(B)
    radius = (default_convexity_radius(chart) if convexity_radius is None
              else convexity_radius)
    chord = np.linalg.norm(B - A)
    if chord > radius:
        raise BVPError(
            f"points too far apart (chord {chord:.3g} > convexity radius "
            f"{radius:.3g}); solution may not be unique")
    if chord == 0.0:
        vel = chart.unit(A, np.array([1.0, 0.0]))
        return GeodesicPath(chart, 0.0,
                            lambda s: GeodesicState(A.copy(), vel))
    if chart.flat:
        vel = (B - A) / chord

        def state_at(s: float) -> GeodesicState:
            s = min(max(s, 0.0), chord)
            return GeodesicState(A + s * vel, vel.copy())

        return GeodesicPath(chart, chord, state_at)

    # frame at A for the direction angle
    e1 = chart.unit(A, np.array([1.0, 0.0]))
    e2 = chart.rotate90(A, e1)

    def direction(alpha: float) -> np.ndarray:
        return math.cos(alpha) * e1 + math.sin(alpha) * e2

    w = B - A
    alpha = math.atan2(chart.inner(A, w, e2), chart.inner(A, w, e1))
    s_len = _chord_length_estimate(chart, A, B)
    scale = max(np.linalg.norm(B - A), 1e-30)

    dalpha = 1e-7
    for _ in range(max_iter):
        horizon = 1.5 * s_len
        path = geodesic_ivp(chart, GeodesicState(A, direction(alpha)), horizon)
        if path.length < s_len:
            s_len = 0.95 * path.length  # domain-limited
        st = path.state(s_len)
        gap = st.position - B
        if np.linalg.norm(gap) < tol * max(1.0, scale):
            return _trim_path(path, s_len)
        path2 = geodesic_ivp(chart, GeodesicState(A, direction(alpha + dalpha)),
                             min(horizon, path.length))
        dpos_da = (path2.state(s_len).position - st.position) / dalpha
        J = np.column_stack([dpos_da, st.velocity])
        try:
            step = np.linalg.solve(J, -gap)
        except np.linalg.LinAlgError:
            raise BVPError("singular shooting Jacobian")
        # damped update, keep length positive
        lim = 0.5 * s_len
        step = step * min(1.0, lim / max(np.linalg.norm(step), 1e-300))
        alpha += step[0]
        s_len = max(s_len + step[1], 0.1 * s_len)
    raise BVPError(f"no convergence after {max_iter} iterations "
                   f"(gap {np.linalg.norm(gap):.3e})")


def _trim_path(path: GeodesicPath, length: float) -> GeodesicPath:
    return GeodesicPath(path.chart, length,
                        lambda s: path.state(min(max(s, 0.0), length)),
                        exited=False, _sol=path._sol)


def geodesic_distance(chart: MetricChart, A, B, **kw) -> float:
    """|AB|: length of the locally minimizing geodesic."""
    return geodesic_bvp(chart, A, B, **kw).length


def geodesic_curvature(chart: MetricChart, curve: ConvexCurve,
                       param: float) -> float:
    """Signed geodesic curvature of the curve at the given parameter."""
    if curve.speed(param) < 1e-14:
        raise ConditioningError("zero-speed parametrization point")
    return curve.kappa_g(param)


# ---------------------------------------------------------------------------
# Tangent intersections


def tangent_intersection(chart: MetricChart, curve: ConvexCurve,
                         A_param: float, B_param: float,
                         trust_region: Optional[float] = None,
                         tol: float = 1e-12):
    """Crossing C of the forward tangent geodesic at A with the backward
    tangent geodesic at B.

    Returns (C, |AC|, |BC|).  The near crossing is selected: the root with
    the smallest positive tangent lengths.
    """
    A = curve.point(A_param)
    B = curve.point(B_param)
    TA = curve.tangent_unit(A_param)
    TB = curve.tangent_unit(B_param)
    if trust_region is None:
        trust_region = default_convexity_radius(chart)

    gap = np.linalg.norm(B - A)
    if gap == 0.0:
        return A.copy(), 0.0, 0.0

    if chart.flat:
        M = np.column_stack([TA, TB])
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        if abs(det) < 1e-15:
            raise IntersectionError("tangents are parallel")
        ta, tb = np.linalg.solve(M, B - A)
        if ta <= 0 or tb <= 0:
            raise IntersectionError(
                f"near crossing has nonpositive tangent lengths "
                f"({ta:.3e}, {tb:.3e})")
        if ta + tb > 2.0 * trust_region:
            raise IntersectionError("crossing outside trust region")
        return A + ta * TA, float(ta), float(tb)

    # second-order seed: for small separations |AC| ~ |BC| ~ half the chord
    ta = tb = 0.5 * _chord_length_estimate(chart, A, B)
    horizon = max(4.0 * ta, 1e-3 * min(chart.spans))
    path_a = geodesic_ivp(chart, GeodesicState(A, TA), horizon)
    path_b = geodesic_ivp(chart, GeodesicState(B, -TB), horizon)
    for _ in range(60):
        sa = path_a.state(ta)
        sb = path_b.state(tb)
        F = sa.position - sb.position
        if np.linalg.norm(F) < tol * max(1.0, gap):
            if ta + tb > 2.0 * trust_region:
                raise IntersectionError("crossing outside trust region")
            return sa.position.copy(), float(ta), float(tb)
        # F(ta, tb) = pa(ta) - pb(tb); dF/dta = va, dF/dtb = -vb
        J = np.column_stack([sa.velocity, -sb.velocity])
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            raise IntersectionError("tangent geodesics nearly parallel")
        ta = max(ta + step[0], 0.0)
        tb = max(tb + step[1], 0.0)
        need = 1.2 * max(ta, tb)
        if need > path_a.length and not path_a.exited:
            path_a = geodesic_ivp(chart, GeodesicState(A, TA), need)
        if need > path_b.length and not path_b.exited:
            path_b = geodesic_ivp(chart, GeodesicState(B, -TB), need)
        if ta > path_a.length and path_a.exited:
            raise IntersectionError("tangent geodesic exits the chart")
        if tb > path_b.length and path_b.exited:
            raise IntersectionError("tangent geodesic exits the chart")
    raise IntersectionError("no crossing found in trust region")
