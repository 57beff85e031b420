"""Coordinate charts with Riemannian metrics.

A :class:`MetricChart` is the universal geometry carrier of the library: an
open rectangle in chart coordinates together with evaluators for the metric
coefficients g11, g12, g22 and (analytic or finite-difference) first
derivatives.  Builders cover the Euclidean plane in Cartesian and polar
coordinates, confocal elliptic and parabolic coordinates, and synthetic
Liouville metrics (U1(u) - V1(v)) (U2(u) du^2 + V2(v) dv^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    ConditioningError,
    ConstructionError,
    DegenerateCoordinatesError,
    DomainError,
)

ScalarField = Callable[[float, float], float]


@dataclass(frozen=True)
class MetricChart:
    """An open coordinate rectangle with a Riemannian metric.

    The metric is ``g11 du^2 + 2 g12 du dv + g22 dv^2``.  If ``dg`` is given
    it must return a (3, 2) array of derivatives: rows (g11, g12, g22),
    columns (d/du, d/dv); otherwise Richardson-extrapolated central
    differences with step ``h`` are used.

    ``flat`` marks charts whose coordinates are Cartesian coordinates of the
    Euclidean plane, for which geodesics are straight lines; solvers use this
    as a fast path.  Instances are immutable and safe to share.
    """

    u_min: float
    u_max: float
    v_min: float
    v_max: float
    g11: ScalarField
    g12: ScalarField
    g22: ScalarField
    dg: Optional[Callable[[float, float], np.ndarray]] = None
    h: float = 0.0
    margin: float = 0.0
    flat: bool = False
    name: str = "custom"
    params: dict = field(default_factory=dict)
    # optional embedding of the chart into the Euclidean plane (isometry),
    # used by oracles and by confocal-coordinate charts
    to_cartesian: Optional[Callable[[float, float], tuple]] = None

    def __post_init__(self):
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise ConstructionError("empty chart rectangle")
        span = min(self.u_max - self.u_min, self.v_max - self.v_min)
        if self.h == 0.0:
            object.__setattr__(self, "h", 1e-5 * span)
        if self.margin == 0.0:
            object.__setattr__(self, "margin", 1e-7 * span)

    # -- domain -----------------------------------------------------------

    @property
    def spans(self) -> tuple:
        return (self.u_max - self.u_min, self.v_max - self.v_min)

    def contains(self, point, margin: float | None = None) -> bool:
        m = self.margin if margin is None else margin
        u, v = point
        return (self.u_min + m <= u <= self.u_max - m
                and self.v_min + m <= v <= self.v_max - m)

    def require_inside(self, point, margin: float | None = None):
        if not self.contains(point, margin):
            raise DomainError(f"point {tuple(point)} outside chart {self.name}")

    # -- metric values ----------------------------------------------------

    def metric(self, point) -> tuple:
        """(g11, g12, g22) at the point; raises DomainError outside."""
        self.require_inside(point)
        u, v = float(point[0]), float(point[1])
        g = (self.g11(u, v), self.g12(u, v), self.g22(u, v))
        if g[0] <= 0.0 or g[2] <= 0.0 or g[0] * g[2] - g[1] ** 2 <= 0.0:
            raise ConstructionError(
                f"metric not positive-definite at {(u, v)}: {g}")
        return g

    def metric_matrix(self, point) -> np.ndarray:
        g11, g12, g22 = self.metric(point)
        return np.array([[g11, g12], [g12, g22]])

    def metric_derivatives(self, point) -> np.ndarray:
        """(3, 2) array of d g_ij / d(u, v), rows (g11, g12, g22)."""
        u, v = float(point[0]), float(point[1])
        if self.dg is not None:
            return np.asarray(self.dg(u, v), dtype=float)
        return self._fd_derivatives(u, v)

    def _fd_derivatives(self, u, v) -> np.ndarray:
        fields = (self.g11, self.g12, self.g22)
        out = np.empty((3, 2))
        for i, f in enumerate(fields):
            out[i, 0] = _richardson_central(lambda s: f(s, v), u, self.h)
            out[i, 1] = _richardson_central(lambda s: f(u, s), v, self.h)
        return out

    # -- inner products ---------------------------------------------------

    def inner(self, point, x, y) -> float:
        g11, g12, g22 = self.metric(point)
        return (g11 * x[0] * y[0] + g12 * (x[0] * y[1] + x[1] * y[0])
                + g22 * x[1] * y[1])

    def norm(self, point, x) -> float:
        return math.sqrt(max(self.inner(point, x, x), 0.0))

    def unit(self, point, x) -> np.ndarray:
        n = self.norm(point, x)
        if n == 0.0:
            raise ConditioningError("cannot normalize zero vector")
        return np.asarray(x, dtype=float) / n

    def rotate90(self, point, x) -> np.ndarray:
        """Metric rotation by +90 degrees (chart orientation)."""
        g11, g12, g22 = self.metric(point)
        det = g11 * g22 - g12 ** 2
        s = 1.0 / math.sqrt(det)
        return np.array([
            -s * (g12 * x[0] + g22 * x[1]),
            s * (g11 * x[0] + g12 * x[1]),
        ])


def _richardson_central(f, x, h):
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4.0 * d2 - d1) / 3.0


def eval_metric(chart: MetricChart, point) -> tuple:
    """Metric coefficients (g11, g12, g22) of the chart at a point."""
    return chart.metric(point)


def christoffel(chart: MetricChart, point) -> np.ndarray:
    """Levi-Civita symbols Gamma[k, i, j] (symmetric in i, j).

    Uses analytic metric derivatives when the chart has them, otherwise
    central differences; raises ConditioningError for near-singular metrics.
    """
    chart.require_inside(point, margin=chart.margin)
    g11, g12, g22 = chart.metric(point)
    det = g11 * g22 - g12 ** 2
    scale = max(abs(g11), abs(g22))
    if det < 1e-14 * scale * scale:
        raise ConditioningError(f"near-singular metric at {tuple(point)}")
    d = chart.metric_derivatives(point)
    # dg[i][j][l] = d g_ij / d x^l
    dgt = np.empty((2, 2, 2))
    dgt[0, 0] = d[0]
    dgt[0, 1] = dgt[1, 0] = d[1]
    dgt[1, 1] = d[2]
    ginv = np.array([[g22, -g12], [-g12, g11]]) / det
    gamma = np.empty((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                s = 0.0
                for l in range(2):
                    s += ginv[k, l] * (dgt[j, l, i] + dgt[i, l, j] - dgt[i, j, l])
                gamma[k, i, j] = 0.5 * s
    return gamma


# ---------------------------------------------------------------------------
# Liouville metrics


@dataclass(frozen=True)
class LiouvilleSpec:
    """Data of a Liouville metric (U1(u) - V1(v)) (U2(u) du^2 + V2(v) dv^2)."""

    U1: Callable[[float], float]
    V1: Callable[[float], float]
    U2: Callable[[float], float]
    V2: Callable[[float], float]
    u_range: tuple
    v_range: tuple
    # optional analytic derivatives of the four profile functions
    dU1: Optional[Callable[[float], float]] = None
    dV1: Optional[Callable[[float], float]] = None
    dU2: Optional[Callable[[float], float]] = None
    dV2: Optional[Callable[[float], float]] = None
    params: dict = field(default_factory=dict)


def liouville_chart(spec: LiouvilleSpec, validation_grid: int = 20) -> MetricChart:
    """Chart with g11 = (U1-V1) U2, g22 = (U1-V1) V2, g12 = 0.

    Positive-definiteness is validated on a dense grid; violations raise
    ConstructionError.
    """
    U1, V1, U2, V2 = spec.U1, spec.V1, spec.U2, spec.V2

    def g11(u, v):
        return (U1(u) - V1(v)) * U2(u)

    def g22(u, v):
        return (U1(u) - V1(v)) * V2(v)

    def g12(u, v):
        return 0.0

    dg = None
    if all(f is not None for f in (spec.dU1, spec.dV1, spec.dU2, spec.dV2)):
        dU1, dV1, dU2, dV2 = spec.dU1, spec.dV1, spec.dU2, spec.dV2

        def dg(u, v):
            w = U1(u) - V1(v)
            return np.array([
                [dU1(u) * U2(u) + w * dU2(u), -dV1(v) * U2(u)],
                [0.0, 0.0],
                [dU1(u) * V2(v), -dV1(v) * V2(v) + w * dV2(v)],
            ])

    chart = MetricChart(
        spec.u_range[0], spec.u_range[1], spec.v_range[0], spec.v_range[1],
        g11, g12, g22, dg=dg, name="liouville", params=dict(spec.params))
    _validate_positive(chart, validation_grid)
    return chart


def _validate_positive(chart: MetricChart, n: int):
    us = np.linspace(chart.u_min, chart.u_max, n + 2)[1:-1]
    vs = np.linspace(chart.v_min, chart.v_max, n + 2)[1:-1]
    for u in us:
        for v in vs:
            g11, g12, g22 = chart.g11(u, v), chart.g12(u, v), chart.g22(u, v)
            if g11 <= 0 or g22 <= 0 or g11 * g22 - g12 ** 2 <= 0:
                raise ConstructionError(
                    f"metric not positive-definite at {(u, v)}")


# ---------------------------------------------------------------------------
# Elliptic coordinates


@dataclass(frozen=True)
class EllipticCoordSpec:
    """Confocal family x^2/(a+t) + y^2/(b+t) = 1 with a > b > 0."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > self.b > 0):
            raise ConstructionError("need a > b > 0")


def elliptic_from_cartesian(spec: EllipticCoordSpec, point) -> tuple:
    """Elliptic coordinates (lam, mu) of an off-axis planar point.

    lam > -b > mu > -a are the two roots of
    t^2 + t (a + b - x^2 - y^2) + (ab - b x^2 - a y^2) = 0.
    """
    a, b = spec.a, spec.b
    x, y = float(point[0]), float(point[1])
    if x == 0.0 or y == 0.0:
        raise DegenerateCoordinatesError("point on a coordinate axis")
    p = a + b - x * x - y * y
    q = a * b - b * x * x - a * y * y
    disc = p * p - 4.0 * q
    assert disc >= 0.0, "discriminant negative for a real point"
    root = math.sqrt(disc)
    # stable quadratic roots
    if p >= 0:
        mu = (-p - root) / 2.0
        lam = q / mu if mu != 0 else (-p + root) / 2.0
    else:
        lam = (-p + root) / 2.0
        mu = q / lam if lam != 0 else (-p - root) / 2.0
    if lam < mu:
        lam, mu = mu, lam
    return lam, mu


def cartesian_from_elliptic(spec: EllipticCoordSpec, coords) -> tuple:
    """Open-quadrant (x > 0, y > 0) point with elliptic coordinates (lam, mu)."""
    a, b = spec.a, spec.b
    lam, mu = float(coords[0]), float(coords[1])
    if not (lam > -b and -a < mu < -b):
        raise DegenerateCoordinatesError(
            f"invalid elliptic coordinates ({lam}, {mu})")
    x2 = (a + lam) * (a + mu) / (a - b)
    y2 = (b + lam) * (b + mu) / (b - a)
    return math.sqrt(x2), math.sqrt(y2)


# ---------------------------------------------------------------------------
# Builders


def euclidean_cartesian(bounds=(-10.0, 10.0, -10.0, 10.0)) -> MetricChart:
    one = lambda u, v: 1.0
    zero = lambda u, v: 0.0
    return MetricChart(*bounds, one, zero, one,
                       dg=lambda u, v: np.zeros((3, 2)),
                       flat=True, name="euclidean_cartesian",
                       params={"bounds": list(bounds)})


def control_chart(eps: float = 0.3,
                  bounds=(-2.0, 2.0, -2.0, 2.0)) -> MetricChart:
    """Conformal non-Liouville control metric.

    ``(1 + eps sin(u) sin(v)) (du^2 + dv^2)``: the conformal factor does not
    separate into a sum of one-variable functions in any coordinates of the
    net, so the Ivory property fails on generic rectangles.  Used as the
    power test against the Liouville checks.
    """
    if not 0 <= eps < 1:
        raise ConstructionError("need 0 <= eps < 1 for positivity")
    E = lambda u, v: 1.0 + eps * math.sin(u) * math.sin(v)
    dE = lambda u, v: np.array([eps * math.cos(u) * math.sin(v),
                                eps * math.sin(u) * math.cos(v)])
    return MetricChart(
        *bounds, E, lambda u, v: 0.0, E,
        dg=lambda u, v: np.array([dE(u, v), [0.0, 0.0], dE(u, v)]),
        name="control", params={"eps": eps, "bounds": list(bounds)})


def euclidean_polar(r_range=(0.05, 10.0), phi_range=(-math.pi, math.pi)) -> MetricChart:
    return MetricChart(
        r_range[0], r_range[1], phi_range[0], phi_range[1],
        lambda r, p: 1.0, lambda r, p: 0.0, lambda r, p: r * r,
        dg=lambda r, p: np.array([[0.0, 0.0], [0.0, 0.0], [2.0 * r, 0.0]]),
        name="euclidean_polar",
        params={"r_range": list(r_range), "phi_range": list(phi_range)},
        to_cartesian=lambda r, p: (r * math.cos(p), r * math.sin(p)))


def confocal_elliptic(a: float, b: float,
                      lam_range=None, mu_range=None) -> MetricChart:
    """Euclidean metric in elliptic coordinates (lam, mu) of the (a, b) family."""
    spec = EllipticCoordSpec(a, b)
    if lam_range is None:
        lam_range = (-b + 0.05 * (a - b), -b + 2.0 * (a - b))
    if mu_range is None:
        mu_range = (-a + 0.05 * (a - b), -b - 0.05 * (a - b))

    def h(t):  # 1 / (4 (a+t)(b+t)); negative for mu-range arguments
        return 1.0 / (4.0 * (a + t) * (b + t))

    def g11(lam, mu):
        return (lam - mu) * h(lam)

    def g22(lam, mu):
        return -(lam - mu) * h(mu)

    def dg(lam, mu):
        hl, hm = h(lam), h(mu)
        dhl = -hl * (1.0 / (a + lam) + 1.0 / (b + lam))
        dhm = -hm * (1.0 / (a + mu) + 1.0 / (b + mu))
        return np.array([
            [hl + (lam - mu) * dhl, -hl],
            [0.0, 0.0],
            [-hm, hm - (lam - mu) * dhm],
        ])

    return MetricChart(
        lam_range[0], lam_range[1], mu_range[0], mu_range[1],
        g11, lambda l, m: 0.0, g22, dg=dg,
        name="confocal_elliptic",
        params={"a": a, "b": b, "lam_range": list(lam_range),
                "mu_range": list(mu_range)},
        to_cartesian=lambda l, m: cartesian_from_elliptic(spec, (l, m)))


def confocal_parabolic(a: float, u_range=(0.2, 2.0), v_range=(0.2, 2.0)) -> MetricChart:
    """Euclidean metric in parabolic coordinates x = a u v, y = a (v^2 - u^2) / 2.

    The coordinate lines are the type-2 planar Liouville net: confocal,
    coaxial parabolas with focus at the origin.
    """
    a2 = a * a

    def g(u, v):
        return a2 * (u * u + v * v)

    return MetricChart(
        u_range[0], u_range[1], v_range[0], v_range[1],
        g, lambda u, v: 0.0, g,
        dg=lambda u, v: np.array([[2 * a2 * u, 2 * a2 * v],
                                  [0.0, 0.0],
                                  [2 * a2 * u, 2 * a2 * v]]),
        name="confocal_parabolic",
        params={"a": a, "u_range": list(u_range), "v_range": list(v_range)},
        to_cartesian=lambda u, v: (a * u * v, a * (v * v - u * u) / 2.0))


def synthetic_liouville(spec: LiouvilleSpec) -> MetricChart:
    chart = liouville_chart(spec)
    object.__setattr__(chart, "name", "synthetic_liouville")
    return chart


def elliptic_as_liouville_spec(a: float, b: float,
                               lam_range, mu_range) -> LiouvilleSpec:
    """The elliptic-coordinate metric written as a LiouvilleSpec."""
    return LiouvilleSpec(
        U1=lambda u: u, V1=lambda v: v,
        U2=lambda u: 1.0 / (4.0 * (a + u) * (b + u)),
        V2=lambda v: -1.0 / (4.0 * (a + v) * (b + v)),
        u_range=lam_range, v_range=mu_range,
        dU1=lambda u: 1.0, dV1=lambda v: 1.0,
        dU2=lambda u: -(1.0 / (a + u) + 1.0 / (b + u))
        / (4.0 * (a + u) * (b + u)),
        dV2=lambda v: (1.0 / (a + v) + 1.0 / (b + v))
        / (4.0 * (a + v) * (b + v)),
        params={"a": a, "b": b})


# ---------------------------------------------------------------------------
# Serialization: builder name + numeric parameters as JSON-friendly dicts


def _fn_from_spec(fs):
    """One-variable function from a JSON-able spec.

    Supported forms: {"poly": [c0, c1, ...]} (coefficients in increasing
    degree), {"const": c}, {"spline": {"x": [...], "y": [...]}}.
    Returns (f, df).
    """
    if "const" in fs:
        c = float(fs["const"])
        return (lambda t: c), (lambda t: 0.0)
    if "poly" in fs:
        p = np.polynomial.Polynomial(list(fs["poly"]))
        dp = p.deriv()
        return (lambda t: float(p(t))), (lambda t: float(dp(t)))
    if "spline" in fs:
        from scipy.interpolate import CubicSpline
        cs = CubicSpline(fs["spline"]["x"], fs["spline"]["y"])
        dcs = cs.derivative()
        return (lambda t: float(cs(t))), (lambda t: float(dcs(t)))
    raise ConstructionError(f"unknown function spec {fs}")


def chart_from_spec(spec: dict) -> MetricChart:
    """Rebuild a chart from {"builder": name, "params": {...}}."""
    builder = spec.get("builder")
    params = spec.get("params", {})
    if builder == "euclidean_cartesian":
        return euclidean_cartesian(tuple(params.get("bounds",
                                                    (-10, 10, -10, 10))))
    if builder == "control":
        return control_chart(params.get("eps", 0.3),
                             tuple(params.get("bounds", (-2, 2, -2, 2))))
    if builder == "euclidean_polar":
        return euclidean_polar(tuple(params.get("r_range", (0.05, 10.0))),
                               tuple(params.get("phi_range",
                                                (-math.pi, math.pi))))
    if builder == "confocal_elliptic":
        return confocal_elliptic(params["a"], params["b"],
                                 params.get("lam_range"),
                                 params.get("mu_range"))
    if builder == "confocal_parabolic":
        return confocal_parabolic(params["a"],
                                  tuple(params.get("u_range", (0.2, 2.0))),
                                  tuple(params.get("v_range", (0.2, 2.0))))
    if builder == "synthetic_liouville":
        fns = {}
        for key in ("U1", "V1", "U2", "V2"):
            fns[key], fns["d" + key] = _fn_from_spec(params[key])
        lspec = LiouvilleSpec(
            U1=fns["U1"], V1=fns["V1"], U2=fns["U2"], V2=fns["V2"],
            u_range=tuple(params["u_range"]), v_range=tuple(params["v_range"]),
            dU1=fns["dU1"], dV1=fns["dV1"], dU2=fns["dU2"], dV2=fns["dV2"],
            params=params)
        return synthetic_liouville(lspec)
    raise ConstructionError(f"unknown chart builder {builder!r}")


def chart_to_spec(chart: MetricChart) -> dict:
    return {"builder": chart.name, "params": dict(chart.params)}
