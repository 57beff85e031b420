"""Parametrized convex curves on a chart.

A :class:`ConvexCurve` is a closed curve (parameter tau in [0, 1) with period
1) or a germ on an interval.  It caches an arc-length table and exposes unit
tangents and geodesic curvature.  Strict geodesic convexity (kappa_g > 0) is
assumed by all billiard and string operations and can be checked with
``assert_convex``.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConstructionError
from .metric import MetricChart, christoffel


class ConvexCurve:
    """Curve p(tau) on a chart with cached arc-length table.

    Parameters
    ----------
    chart : MetricChart
    p : callable tau -> (u, v)
    dp, d2p : optional analytic derivatives; central differences otherwise.
    closed : closed curve with period 1, else germ on ``tau_range``.
    """

    def __init__(self, chart: MetricChart, p: Callable,
                 dp: Optional[Callable] = None,
                 d2p: Optional[Callable] = None,
                 closed: bool = True,
                 tau_range: tuple = (0.0, 1.0),
                 samples: int = 1024,
                 name: str = "curve",
                 params: Optional[dict] = None):
        self.chart = chart
        self._p = p
        self._dp = dp
        self._d2p = d2p
        self.closed = closed
        self.tau_range = tau_range
        self.name = name
        self.params = dict(params or {})
        self._fd_h = 1e-6 * (tau_range[1] - tau_range[0])
        self._build_tables(samples)
        self._radial = None

    # -- parametrization --------------------------------------------------

    def wrap(self, tau: float) -> float:
        if self.closed:
            t0, t1 = self.tau_range
            return t0 + (tau - t0) % (t1 - t0)
        return tau

    def point(self, tau: float) -> np.ndarray:
        return np.asarray(self._p(self.wrap(tau)), dtype=float)

    def velocity(self, tau: float) -> np.ndarray:
        tau = self.wrap(tau)
        if self._dp is not None:
            return np.asarray(self._dp(tau), dtype=float)
        h = self._fd_h
        return (self.point(tau + h) - self.point(tau - h)) / (2.0 * h)

    def acceleration(self, tau: float) -> np.ndarray:
        tau = self.wrap(tau)
        if self._d2p is not None:
            return np.asarray(self._d2p(tau), dtype=float)
        h = 1e-4 * (self.tau_range[1] - self.tau_range[0])
        if self._dp is not None:
            return (self.velocity(tau + h) - self.velocity(tau - h)) / (2.0 * h)
        return (self.point(tau + h) - 2.0 * self.point(tau)
                + self.point(tau - h)) / (h * h)

    def speed(self, tau: float) -> float:
        return self.chart.norm(self.point(tau), self.velocity(tau))

    def tangent_unit(self, tau: float) -> np.ndarray:
        return self.chart.unit(self.point(tau), self.velocity(tau))

    # -- arc length -------------------------------------------------------

    def _build_tables(self, n: int):
        t0, t1 = self.tau_range
        taus = np.linspace(t0, t1, n + 1)
        sp = np.array([self.speed(t) for t in taus[:-1]] + [self.speed(taus[0])
                      if self.closed else self.speed(t1)])
        bc = "periodic" if self.closed and abs(sp[0] - sp[-1]) < 1e-9 * max(
            1.0, abs(sp[0])) else "not-a-knot"
        if self.closed and bc == "periodic":
            spline = CubicSpline(taus, sp, bc_type="periodic")
        else:
            spline = CubicSpline(taus, sp, bc_type=bc)
        self._speed_spline = spline
        self._arc_spline = spline.antiderivative()
        self._taus = taus
        self._s_table = self._arc_spline(taus)
        self.total_length = float(self._s_table[-1])

    def arclength(self, tau: float) -> float:
        """Arc length from tau_range[0] to tau (lifted, not wrapped)."""
        t0, t1 = self.tau_range
        if self.closed:
            k = math.floor((tau - t0) / (t1 - t0))
            frac = tau - k * (t1 - t0)
            return k * self.total_length + float(self._arc_spline(frac))
        return float(self._arc_spline(tau))

    def param_at_arclength(self, s: float) -> float:
        """Inverse of ``arclength`` (lifted for closed curves)."""
        t0, t1 = self.tau_range
        if self.closed:
            k = math.floor(s / self.total_length)
            s = s - k * self.total_length
        tau = float(np.interp(s, self._s_table, self._taus))
        # two Newton corrections on the monotone arc-length spline
        for _ in range(2):
            tau -= (float(self._arc_spline(tau)) - s) / float(
                self._speed_spline(tau))
            tau = min(max(tau, t0), t1)
        if self.closed:
            tau += k * (t1 - t0)
        return tau

    def arc_between(self, tau_a: float, tau_b: float) -> float:
        """Arc length from tau_a forward to tau_b (positive orientation)."""
        s = self.arclength(tau_b) - self.arclength(tau_a)
        if self.closed:
            s %= self.total_length
        elif s < 0:
            raise ConstructionError("tau_b behind tau_a on an open germ")
        return s

    # -- curvature --------------------------------------------------------

    def kappa_g(self, tau: float) -> float:
        """Signed geodesic curvature with respect to chart orientation."""
        pt = self.point(tau)
        vel = self.velocity(tau)
        acc = self.acceleration(tau)
        gam = christoffel(self.chart, pt)
        cov = acc + np.array([
            vel @ gam[0] @ vel,
            vel @ gam[1] @ vel,
        ])
        g11, g12, g22 = self.chart.metric(pt)
        det = g11 * g22 - g12 ** 2
        sp = self.chart.norm(pt, vel)
        return math.sqrt(det) * (vel[0] * cov[1] - vel[1] * cov[0]) / sp ** 3

    def assert_convex(self, n: int = 64):
        t0, t1 = self.tau_range
        for tau in np.linspace(t0, t1, n, endpoint=False):
            k = self.kappa_g(tau)
            if k <= 0:
                raise ConstructionError(
                    f"curve {self.name} not strictly convex: kappa_g={k:.3e} "
                    f"at tau={tau:.4f}")

    # -- radial implicit function (closed curves) -------------------------

    def _build_radial(self, n: int = 720):
        t0, t1 = self.tau_range
        taus = np.linspace(t0, t1, n, endpoint=False)
        pts = np.array([self.point(t) for t in taus])
        center = pts.mean(axis=0)
        ang = np.unwrap(np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0]))
        rad = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
        if ang[1] < ang[0]:  # clockwise parametrization
            ang, rad, taus = ang[::-1], rad[::-1], taus[::-1]
        # periodic splines in the angle variable
        ang_ext = np.append(ang, ang[0] + 2 * math.pi)
        rad_ext = np.append(rad, rad[0])
        tau_lift = np.unwrap(2 * math.pi * (taus - t0) / (t1 - t0))
        tau_ext = np.append(tau_lift, tau_lift[0] + 2 * math.pi)
        self._radial = (center,
                        CubicSpline(ang_ext, rad_ext, bc_type="periodic"),
                        CubicSpline(ang_ext, np.unwrap(tau_ext),
                                    bc_type="not-a-knot"),
                        ang[0])

    def signed_radial(self, point) -> float:
        """r(point) - boundary radius at the same chart angle; < 0 inside.

        Valid for closed curves that are star-shaped about their centroid in
        chart coordinates (true for strictly convex curves).
        """
        if not self.closed:
            raise ConstructionError("signed_radial needs a closed curve")
        if self._radial is None:
            self._build_radial()
        center, rad_spline, _, ang0 = self._radial
        d = np.asarray(point, dtype=float) - center
        ang = math.atan2(d[1], d[0])
        ang = ang0 + (ang - ang0) % (2 * math.pi)
        return math.hypot(d[0], d[1]) - float(rad_spline(ang))

    def param_near(self, point) -> float:
        """Curve parameter whose point is radially aligned with ``point``."""
        if self._radial is None:
            self._build_radial()
        center, _, tau_spline, ang0 = self._radial
        d = np.asarray(point, dtype=float) - center
        ang = math.atan2(d[1], d[0])
        ang = ang0 + (ang - ang0) % (2 * math.pi)
        t0, t1 = self.tau_range
        tau = t0 + float(tau_spline(ang)) * (t1 - t0) / (2 * math.pi)
        return self.wrap(tau)


# ---------------------------------------------------------------------------
# Standard curves


def circle(chart: MetricChart, center=(0.0, 0.0), radius: float = 1.0,
           samples: int = 512) -> ConvexCurve:
    """Circle in chart coordinates (a Euclidean circle on flat charts)."""
    cx, cy = center
    w = 2 * math.pi

    def p(t):
        return (cx + radius * math.cos(w * t), cy + radius * math.sin(w * t))

    def dp(t):
        return (-radius * w * math.sin(w * t), radius * w * math.cos(w * t))

    def d2p(t):
        return (-radius * w * w * math.cos(w * t),
                -radius * w * w * math.sin(w * t))

    return ConvexCurve(chart, p, dp, d2p, samples=samples, name="circle",
                       params={"center": list(center), "radius": radius})


def ellipse(chart: MetricChart, semi_axes, center=(0.0, 0.0),
            samples: int = 1024) -> ConvexCurve:
    """Axis-aligned ellipse in chart coordinates."""
    A, B = semi_axes
    cx, cy = center
    w = 2 * math.pi

    def p(t):
        return (cx + A * math.cos(w * t), cy + B * math.sin(w * t))

    def dp(t):
        return (-A * w * math.sin(w * t), B * w * math.cos(w * t))

    def d2p(t):
        return (-A * w * w * math.cos(w * t), -B * w * w * math.sin(w * t))

    return ConvexCurve(chart, p, dp, d2p, samples=samples, name="ellipse",
                       params={"semi_axes": [A, B], "center": list(center)})


def confocal_ellipse(chart: MetricChart, a: float, b: float,
                     lam: float = 0.0, samples: int = 1024) -> ConvexCurve:
    """The ellipse x^2/(a+lam) + y^2/(b+lam) = 1 on a flat chart."""
    if b + lam <= 0:
        raise ConstructionError("b + lam must be positive")
    cur = ellipse(chart, (math.sqrt(a + lam), math.sqrt(b + lam)),
                  samples=samples)
    cur.name = "confocal_ellipse"
    cur.params = {"a": a, "b": b, "lam": lam}
    return cur


def from_points(chart: MetricChart, points, closed: bool = True,
                name: str = "sampled") -> ConvexCurve:
    """Periodic cubic spline through sample points (tau equally spaced)."""
    pts = np.asarray(points, dtype=float)
    if closed:
        taus = np.linspace(0.0, 1.0, len(pts) + 1)
        data = np.vstack([pts, pts[:1]])
        sx = CubicSpline(taus, data[:, 0], bc_type="periodic")
        sy = CubicSpline(taus, data[:, 1], bc_type="periodic")
    else:
        taus = np.linspace(0.0, 1.0, len(pts))
        sx = CubicSpline(taus, pts[:, 0])
        sy = CubicSpline(taus, pts[:, 1])
    dsx, dsy = sx.derivative(), sy.derivative()
    d2sx, d2sy = dsx.derivative(), dsy.derivative()
    return ConvexCurve(
        chart,
        lambda t: (float(sx(t)), float(sy(t))),
        lambda t: (float(dsx(t)), float(dsy(t))),
        lambda t: (float(d2sx(t)), float(d2sy(t))),
        closed=closed, name=name)


def curve_from_spec(chart: MetricChart, spec: dict) -> ConvexCurve:
    """Rebuild a curve from {"curve": name, ...params}."""
    kind = spec.get("curve")
    if kind == "circle":
        return circle(chart, tuple(spec.get("center", (0.0, 0.0))),
                      float(spec.get("radius", 1.0)))
    if kind == "ellipse":
        return ellipse(chart, tuple(spec["semi_axes"]),
                       tuple(spec.get("center", (0.0, 0.0))))
    if kind == "confocal_ellipse":
        return confocal_ellipse(chart, float(spec["a"]), float(spec["b"]),
                                float(spec.get("lam", 0.0)))
    raise ConstructionError(f"unknown curve spec {spec!r}")
