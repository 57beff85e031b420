"""Ivory property of coordinate nets and planar Liouville net classification.

A net rectangle has the Ivory property when its two geodesic diagonals have
equal length.  This module measures the Ivory defect, the first-variation
covector equalities at the corners, the unit 1-forms eta_{+-} built from a
diagonal, and recovers the Liouville coefficients a, b from two diagonal
families.  The second half classifies sampled planar orthogonal nets into
the four Euclidean Liouville types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ConditioningError, ConstructionError, DomainError
from .geodesic import GeodesicPath, _chord_length_estimate, geodesic_bvp
from .metric import MetricChart


# ---------------------------------------------------------------------------
# Quads and diagonals


@dataclass(frozen=True)
class NetQuad:
    """Coordinate rectangle [u1, u2] x [v1, v2]."""

    u1: float
    u2: float
    v1: float
    v2: float

    def __post_init__(self):
        if not (self.u1 < self.u2 and self.v1 < self.v2):
            raise ConstructionError("need u1 < u2 and v1 < v2")

    @property
    def corners(self):
        return (np.array([self.u1, self.v1]), np.array([self.u2, self.v1]),
                np.array([self.u1, self.v2]), np.array([self.u2, self.v2]))


def _covector(chart: MetricChart, point, vel) -> np.ndarray:
    g11, g12, g22 = chart.metric(point)
    return np.array([g11 * vel[0] + g12 * vel[1],
                     g12 * vel[0] + g22 * vel[1]])


def _quad_radius(chart: MetricChart, quad: NetQuad,
                 convexity_radius: Optional[float]) -> float:
    if convexity_radius is not None:
        return convexity_radius
    A = np.array([quad.u1, quad.v1])
    B = np.array([quad.u2, quad.v2])
    return 3.0 * max(_chord_length_estimate(chart, A, B),
                     np.hypot(quad.u2 - quad.u1, quad.v2 - quad.v1))


@dataclass
class DiagonalData:
    """Geodesic diagonals of a quad and their endpoint covectors.

    gamma_plus runs (u1,v1) -> (u2,v2), gamma_minus runs (u1,v2) -> (u2,v1);
    both are arc-length parametrized with unit endpoint velocities.
    ``covectors`` maps ('plus'|'minus', 'start'|'end') to the metric-dual of
    the endpoint velocity.
    """

    quad: NetQuad
    gamma_plus: GeodesicPath
    gamma_minus: GeodesicPath
    covectors: dict = field(default_factory=dict)


def diagonal_paths(chart: MetricChart, quad: NetQuad,
                   convexity_radius: Optional[float] = None) -> DiagonalData:
    radius = _quad_radius(chart, quad, convexity_radius)
    gp = geodesic_bvp(chart, (quad.u1, quad.v1), (quad.u2, quad.v2),
                      convexity_radius=radius)
    gm = geodesic_bvp(chart, (quad.u1, quad.v2), (quad.u2, quad.v1),
                      convexity_radius=radius)
    cov = {}
    for name, path in (("plus", gp), ("minus", gm)):
        for where, st in (("start", path.start), ("end", path.end)):
            cov[(name, where)] = _covector(chart, st.position, st.velocity)
    return DiagonalData(quad, gp, gm, cov)


@dataclass(frozen=True)
class IvoryResult:
    L_plus: float
    L_minus: float

    @property
    def defect(self) -> float:
        return abs(self.L_plus - self.L_minus)


def ivory_check(chart: MetricChart, quad: NetQuad,
                convexity_radius: Optional[float] = None) -> IvoryResult:
    """Lengths of the two geodesic diagonals and their defect |L+ - L-|."""
    radius = _quad_radius(chart, quad, convexity_radius)
    gp = geodesic_bvp(chart, (quad.u1, quad.v1), (quad.u2, quad.v2),
                      convexity_radius=radius)
    gm = geodesic_bvp(chart, (quad.u1, quad.v2), (quad.u2, quad.v1),
                      convexity_radius=radius)
    return IvoryResult(gp.length, gm.length)


def first_variation_check(chart: MetricChart, quad: NetQuad,
                          convexity_radius: Optional[float] = None,
                          stencil_delta: Optional[float] = None,
                          stencil_tol: float = 1e-6) -> tuple:
    """Covector equalities at the corners (first variation of arc length).

    Returns (res_u, res_v): the du-component mismatch of the diagonal
    covectors at the shared-u corners and the dv-component mismatch at the
    shared-v corners.  The Ivory property is first verified on a 3x3
    stencil of perturbed quads; a defect above ``stencil_tol`` there makes
    the residuals meaningless and raises ConstructionError.
    """
    if stencil_delta is None:
        stencil_delta = 0.05 * min(quad.u2 - quad.u1, quad.v2 - quad.v1)
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            q = NetQuad(quad.u1, quad.u2 + i * stencil_delta,
                        quad.v1, quad.v2 + j * stencil_delta)
            res = ivory_check(chart, q, convexity_radius)
            if res.defect > stencil_tol:
                raise ConstructionError(
                    f"Ivory defect {res.defect:.3e} on a stencil quad; the "
                    "first-variation identities do not apply")
    data = diagonal_paths(chart, quad, convexity_radius)
    cov = data.covectors
    res_u = abs(cov[("plus", "end")][0] - cov[("minus", "end")][0])
    res_v = abs(cov[("plus", "end")][1] + cov[("minus", "start")][1])
    return res_u, res_v


# ---------------------------------------------------------------------------
# The unit forms eta_{+-}


def _hit_coordinate_line(path: GeodesicPath, axis: int, value: float) -> float:
    """Arc length where the path crosses {coordinate[axis] = value}."""
    f = lambda s: path.state(s).position[axis] - value
    f0, f1 = f(0.0), f(path.length)
    if f0 * f1 > 0:
        raise DomainError(
            f"coordinate line {'uv'[axis]}={value} misses the diagonal")
    return brentq(f, 0.0, path.length, xtol=1e-13)


@dataclass(frozen=True)
class EtaForms:
    """phi du +- psi dv at a point, with their metric norms."""

    phi: float
    psi: float
    norm_plus: float
    norm_minus: float

    @property
    def eta_plus(self) -> np.ndarray:
        return np.array([self.phi, self.psi])

    @property
    def eta_minus(self) -> np.ndarray:
        return np.array([self.phi, -self.psi])


def _covector_norm(chart: MetricChart, point, cov) -> float:
    g11, g12, g22 = chart.metric(point)
    det = g11 * g22 - g12 * g12
    # inverse metric contraction
    return math.sqrt((g22 * cov[0] ** 2 - 2 * g12 * cov[0] * cov[1]
                      + g11 * cov[1] ** 2) / det)


def eta_forms(chart: MetricChart, quad: NetQuad, point,
              convexity_radius: Optional[float] = None,
              data: Optional[DiagonalData] = None) -> EtaForms:
    """Forms eta_{+-} = phi(u) du +- psi(v) dv at ``point`` in the quad.

    phi(u) is the du-component of the covector dual to the velocity of the
    diagonal gamma_plus where the line u=const meets it; psi(v) likewise on
    the line v=const.
    """
    u, v = float(point[0]), float(point[1])
    if not (quad.u1 <= u <= quad.u2 and quad.v1 <= v <= quad.v2):
        raise DomainError(f"point {point} outside the quad")
    if data is None:
        data = diagonal_paths(chart, quad, convexity_radius)
    path = data.gamma_plus
    su = _hit_coordinate_line(path, 0, u)
    sv = _hit_coordinate_line(path, 1, v)
    st_u = path.state(su)
    st_v = path.state(sv)
    phi = _covector(chart, st_u.position, st_u.velocity)[0]
    psi = _covector(chart, st_v.position, st_v.velocity)[1]
    pt = np.array([u, v])
    return EtaForms(phi, psi,
                    _covector_norm(chart, pt, np.array([phi, psi])),
                    _covector_norm(chart, pt, np.array([phi, -psi])))


# ---------------------------------------------------------------------------
# Liouville coefficients from two diagonal families


@dataclass
class LiouvilleRecovery:
    """Coefficients a, b recovered from the Ivory machinery on a grid."""

    u: np.ndarray
    v: np.ndarray
    a: np.ndarray
    b: np.ndarray
    U: np.ndarray
    V: np.ndarray
    U_tilde: np.ndarray
    V_tilde: np.ndarray
    max_rel_dev: float
    factorization_residual: float


def liouville_from_ivory(chart: MetricChart, quad_a: NetQuad,
                         quad_b: NetQuad, nu: int = 10, nv: int = 10,
                         convexity_radius: Optional[float] = None,
                         cond_threshold: float = 1e-8,
                         margin: float = 0.05) -> LiouvilleRecovery:
    """Recover a(u,v), b(u,v) from two diagonal families.

    The quads must overlap and have different aspect ratios.  From each
    diagonal the functions phi(u), psi(v) are sampled; with U = phi^2,
    V = psi^2 (and the tilde pair from the second quad), the system
    U/a + V/b = 1, U~/a + V~/b = 1 is solved by the determinant formulas.
    Returns the recovery together with the max relative deviation from the
    chart's metric coefficients.
    """
    u_lo, u_hi = max(quad_a.u1, quad_b.u1), min(quad_a.u2, quad_b.u2)
    v_lo, v_hi = max(quad_a.v1, quad_b.v1), min(quad_a.v2, quad_b.v2)
    if u_lo >= u_hi or v_lo >= v_hi:
        raise ConstructionError("quads do not overlap")
    mu = margin * (u_hi - u_lo)
    mv = margin * (v_hi - v_lo)
    ug = np.linspace(u_lo + mu, u_hi - mu, nu)
    vg = np.linspace(v_lo + mv, v_hi - mv, nv)

    def family(quad):
        data = diagonal_paths(chart, quad, convexity_radius)
        path = data.gamma_plus
        phi = np.empty(nu)
        psi = np.empty(nv)
        for i, u in enumerate(ug):
            st = path.state(_hit_coordinate_line(path, 0, u))
            phi[i] = _covector(chart, st.position, st.velocity)[0]
        for j, v in enumerate(vg):
            st = path.state(_hit_coordinate_line(path, 1, v))
            psi[j] = _covector(chart, st.position, st.velocity)[1]
        return phi ** 2, psi ** 2

    U, V = family(quad_a)
    Ut, Vt = family(quad_b)
    dU = Ut[:, None] - U[:, None] + np.zeros((nu, nv))
    dV = Vt[None, :] - V[None, :] + np.zeros((nu, nv))
    scale = max(np.max(np.abs(U)), np.max(np.abs(V)),
                np.max(np.abs(Ut)), np.max(np.abs(Vt)))
    if np.min(np.abs(dU)) < cond_threshold * scale or \
            np.min(np.abs(dV)) < cond_threshold * scale:
        raise ConditioningError(
            "aspect ratios too close: U~-U or V~-V nearly vanishes")
    det = U[:, None] * Vt[None, :] - Ut[:, None] * V[None, :]
    a = det / dV
    b = -det / dU
    # the paper's equivalent factorization, as a self-consistency check
    a_fact = (U[:, None] / dU - V[None, :] / dV) * dU
    fact_res = float(np.max(np.abs(a - a_fact)) / np.max(np.abs(a)))

    dev = 0.0
    for i, u in enumerate(ug):
        for j, v in enumerate(vg):
            g11, g12, g22 = chart.metric((u, v))
            dev = max(dev, abs(a[i, j] - g11) / abs(g11),
                      abs(b[i, j] - g22) / abs(g22))
    return LiouvilleRecovery(ug, vg, a, b, U, V, Ut, Vt, dev, fact_res)


# ---------------------------------------------------------------------------
# Sampled planar nets and the Weihnacht-Blaschke classifier


@dataclass
class SampledNet:
    """Rectangular grid of planar points sampled from an orthogonal net.

    ``xy[i, j]`` is the Cartesian image of (u[i], v[j]).  The u-curves
    (u = const) are the rows ``xy[i, :]``; the v-curves are the columns.
    """

    u: np.ndarray
    v: np.ndarray
    xy: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.xy = np.asarray(self.xy, dtype=float)
        if self.xy.shape != (len(self.u), len(self.v), 2):
            raise ConstructionError("xy must have shape (nu, nv, 2)")

    @property
    def scale(self) -> float:
        return float(np.ptp(self.xy.reshape(-1, 2), axis=0).max())

    def u_curves(self):
        return [self.xy[i] for i in range(len(self.u))]

    def v_curves(self):
        return [self.xy[:, j] for j in range(len(self.v))]


def _line_fit(pts: np.ndarray):
    """Total-least-squares line; returns (point, unit direction, residual)."""
    c = pts.mean(axis=0)
    d = pts - c
    _, sv, vt = np.linalg.svd(d, full_matrices=False)
    direction = vt[0]
    res = float(np.max(np.abs(d @ vt[1])))
    return c, direction, res


def _circle_fit(pts: np.ndarray):
    """Algebraic circle fit; returns (center, radius, residual)."""
    A = np.column_stack([pts[:, 0], pts[:, 1], np.ones(len(pts))])
    rhs = -(pts ** 2).sum(axis=1)
    (D, E, F), *_ = np.linalg.lstsq(A, rhs, rcond=None)
    center = np.array([-D / 2.0, -E / 2.0])
    r2 = center @ center - F
    if r2 <= 0:
        return center, 0.0, np.inf
    r = math.sqrt(r2)
    res = float(np.max(np.abs(np.hypot(*(pts - center).T) - r)))
    return center, r, res


def _normalize_quadric(Q: np.ndarray) -> np.ndarray:
    Q = Q / np.linalg.norm(Q)
    for k in range(3):
        if abs(Q[k, k]) > 1e-12:
            if Q[k, k] < 0:
                Q = -Q
            break
    else:
        idx = np.unravel_index(np.argmax(np.abs(Q)), Q.shape)
        if Q[idx] < 0:
            Q = -Q
    return Q


@dataclass(frozen=True)
class ConicQuadric:
    """Symmetric 3x3 conic matrix, Frobenius-normalized with fixed sign."""

    Q: np.ndarray

    @staticmethod
    def fit(pts: np.ndarray) -> tuple:
        """Algebraic least-squares conic through a point cloud.

        Points are isotropically pre-normalized (centroid, rms scale);
        returns (ConicQuadric, max |p^T Q p| residual over the samples).
        """
        c = pts.mean(axis=0)
        s = math.sqrt(2.0) / max(np.mean(np.hypot(*(pts - c).T)), 1e-300)
        q = (pts - c) * s
        x, y = q[:, 0], q[:, 1]
        A = np.column_stack([x * x, x * y, y * y, x, y, np.ones(len(q))])
        _, _, vt = np.linalg.svd(A, full_matrices=False)
        aa, bb, cc, dd, ee, ff = vt[-1]
        Qn = np.array([[aa, bb / 2, dd / 2],
                       [bb / 2, cc, ee / 2],
                       [dd / 2, ee / 2, ff]])
        # undo the normalization: p_n = T p with T = [[s,0,-s cx],...]
        T = np.array([[s, 0.0, -s * c[0]],
                      [0.0, s, -s * c[1]],
                      [0.0, 0.0, 1.0]])
        Q = _normalize_quadric(T.T @ Qn @ T)
        P = np.column_stack([pts, np.ones(len(pts))])
        res = float(np.max(np.abs(np.einsum("ni,ij,nj->n", P, Q, P))))
        return ConicQuadric(Q), res


def _affine_fit(P: np.ndarray, Pp: np.ndarray) -> float:
    """Max residual of the best affine map P -> Pp."""
    A = np.column_stack([P, np.ones(len(P))])
    sol, *_ = np.linalg.lstsq(A, Pp, rcond=None)
    return float(np.max(np.abs(A @ sol - Pp)))


def _concurrency_point(lines):
    """Least-squares common point of lines given as (point, direction)."""
    A = np.zeros((2, 2))
    rhs = np.zeros(2)
    for p, d, _ in lines:
        P = np.eye(2) - np.outer(d, d)
        A += P
        rhs += P @ p
    center = np.linalg.solve(A, rhs)
    worst = 0.0
    for p, d, _ in lines:
        off = center - p
        worst = max(worst, abs(off @ np.array([-d[1], d[0]])))
    return center, worst


def _central_params(Q: np.ndarray):
    """Center, axis angle, semi-axis squares, and focal distance of a
    central conic."""
    M = Q[:2, :2]
    q = Q[:2, 2]
    center = np.linalg.solve(M, -q)
    const = float(center @ M @ center + 2 * q @ center + Q[2, 2])
    w, R = np.linalg.eigh(M)
    # x'^T diag(w) x' + const = 0  ->  semi-axis squares -const/w
    axes2 = -const / w
    order = np.argsort(-axes2)   # major first
    axes2 = axes2[order]
    R = R[:, order]
    angle = math.atan2(R[1, 0], R[0, 0])
    # the axis is a line, not a direction
    angle = (angle + math.pi / 2) % math.pi - math.pi / 2
    if axes2[0] > 0 and axes2[1] > 0:
        c2 = axes2[0] - axes2[1]
    else:
        c2 = abs(axes2[0]) + abs(axes2[1])
    return center, angle, axes2, math.sqrt(max(c2, 0.0))


def _parabola_params(Q: np.ndarray):
    """Focus, axis angle, and focus-vertex distance of a parabola."""
    M = Q[:2, :2]
    w, R = np.linalg.eigh(M)
    k = int(np.argmax(np.abs(w)))
    m = w[k]
    e_eta = R[:, k]
    e_xi = np.array([e_eta[1], -e_eta[0]])
    q = Q[:2, 2]
    d = float(q @ e_xi)
    e = float(q @ e_eta)
    f = Q[2, 2]
    # m eta^2 + 2 d xi + 2 e eta + f = 0
    eta0 = -e / m
    xi0 = -(f / m - (e / m) ** 2) * m / (2 * d)
    p_lat = -d / (2 * m)
    focus_xi = xi0 + p_lat
    focus = focus_xi * e_xi + eta0 * e_eta
    axis = e_xi if p_lat >= 0 else -e_xi
    return focus, math.atan2(axis[1], axis[0]), abs(p_lat)


@dataclass
class NetClassification:
    net_type: str
    params: dict
    residuals: dict


def classify_planar_net(net: SampledNet, tol_line: float = 1e-7,
                        tol_conic: float = 1e-7,
                        sig_tol: float = 1e-4) -> NetClassification:
    """Classify a sampled planar orthogonal net into the four types.

    Pipeline: line fits per family (types 4 and 3), else conic fits with
    the affine-map property between consecutive curves, then the confocal
    signature of the finite-difference derivative of the normalized conic
    matrices; the signature's principal frame decides central vs parabolic.
    Anything that misses every branch is reported as ``unclassified`` with
    all residuals.
    """
    scale = net.scale
    residuals: dict = {}
    u_fits = [_line_fit(c) for c in net.u_curves()]
    v_fits = [_line_fit(c) for c in net.v_curves()]
    res_lu = max(f[2] for f in u_fits) / scale
    res_lv = max(f[2] for f in v_fits) / scale
    residuals["line_u"] = res_lu
    residuals["line_v"] = res_lv

    if res_lu < tol_line and res_lv < tol_line:
        return NetClassification(
            "orthogonal-lines",
            {"direction_u": list(u_fits[0][1]),
             "direction_v": list(v_fits[0][1])},
            residuals)

    if res_lu < tol_line or res_lv < tol_line:
        lines = u_fits if res_lu < tol_line else v_fits
        arcs = net.v_curves() if res_lu < tol_line else net.u_curves()
        circles = [_circle_fit(c) for c in arcs]
        res_circ = max(c[2] for c in circles) / scale
        residuals["circle"] = res_circ
        center, conc = _concurrency_point(lines)
        residuals["line_concurrency"] = conc / scale
        centers = np.array([c[0] for c in circles])
        res_conc = np.max(np.abs(centers - center)) / scale
        residuals["concentricity"] = res_conc
        if res_circ < 10 * tol_conic and conc / scale < 10 * tol_line \
                and res_conc < sig_tol:
            return NetClassification(
                "polar", {"center": list(center)}, residuals)
        return NetClassification("unclassified", {}, residuals)

    # conic branch: use the family that fits best
    best = None
    for fam_name, curves in (("u", net.u_curves()), ("v", net.v_curves())):
        fits = [ConicQuadric.fit(c) for c in curves]
        res = max(f[1] for f in fits)
        residuals[f"conic_{fam_name}"] = res
        if best is None or res < best[2]:
            best = (fam_name, fits, res, curves)
    fam_name, fits, res_conic, curves = best
    if res_conic > tol_conic:
        return NetClassification("unclassified", {}, residuals)

    res_aff = max(_affine_fit(curves[k], curves[k + 1])
                  for k in range(len(curves) - 1)) / scale
    residuals["affine"] = res_aff
    if res_aff > 10 * tol_line:
        return NetClassification("unclassified", {}, residuals)

    Qs = [f[0].Q for f in fits]
    det2 = [abs(np.linalg.det(Q[:2, :2])) for Q in Qs]
    central = min(det2) > 1e-6

    # the confocal signature is tested in its exact integrated form (an
    # invariant of each matrix in the shared principal frame) rather than by
    # finite-differencing the pencil, which would carry O(step^2) error
    if central:
        center, angle, axes2, c_foc = _central_params(Qs[0])
        R = np.array([[math.cos(angle), -math.sin(angle)],
                      [math.sin(angle), math.cos(angle)]])
        T = np.eye(3)
        T[:2, :2] = R
        T[:2, 2] = center
        worst = 0.0
        cvals = []
        for Q in Qs:
            # frame form diag(1/(a+l), 1/(b+l), -1): off-diagonals vanish
            # and 1/Q00 - 1/Q11 = a - b is the same for every curve
            q = T.T @ Q @ T
            if abs(q[2, 2]) < 1e-12 * np.linalg.norm(q):
                worst = np.inf
                break
            q = q / (-q[2, 2])
            model = np.diag([q[0, 0], q[1, 1], -1.0])
            worst = max(worst, np.linalg.norm(q - model) / np.linalg.norm(q))
            cvals.append(1.0 / q[0, 0] - 1.0 / q[1, 1])
        if np.isfinite(worst):
            cvals = np.array(cvals)
            scale2 = float(np.mean(np.abs(cvals))) + c_foc ** 2 + 1e-300
            worst = max(worst, float(np.ptp(cvals)) / scale2)
        residuals["central_signature"] = worst
        if worst < sig_tol:
            return NetClassification(
                "confocal-central",
                {"center": list(center), "angle": angle,
                 "focal_distance": c_foc,
                 "first_axes_squared": list(axes2)},
                residuals)
        return NetClassification("unclassified", {}, residuals)

    focus, angle, p_lat = _parabola_params(Qs[0])
    R = np.array([[math.cos(angle), -math.sin(angle)],
                  [math.sin(angle), math.cos(angle)]])
    T = np.eye(3)
    T[:2, :2] = R
    T[:2, 2] = focus
    worst = 0.0
    for Q in Qs:
        # confocal coaxial parabolas y^2 = 2 tau x + tau^2 share the focus
        # at the frame origin; each scaled matrix must match the tau model
        q = T.T @ Q @ T
        if abs(q[1, 1]) < 1e-12 * np.linalg.norm(q):
            worst = np.inf
            break
        q = q / q[1, 1]
        tau = -q[0, 2]
        model = np.array([[0.0, 0.0, -tau],
                          [0.0, 1.0, 0.0],
                          [-tau, 0.0, -tau * tau]])
        worst = max(worst, np.linalg.norm(q - model) / np.linalg.norm(q))
    residuals["parabolic_signature"] = worst
    if worst < sig_tol:
        return NetClassification(
            "confocal-parabolic",
            {"focus": list(focus), "angle": angle,
             "first_focal_distance": p_lat},
            residuals)
    return NetClassification("unclassified", {}, residuals)


# ---------------------------------------------------------------------------
# Synthetic net generators (closed-form samples of the four types)


def sample_confocal_central(a: float, b: float, lam_range=(0.1, 0.9),
                            mu_range=None, nu: int = 10,
                            nv: int = 12) -> SampledNet:
    """Confocal ellipse/hyperbola net x^2/(a+l) + y^2/(b+l) = 1 (positive
    quadrant branch)."""
    if mu_range is None:
        d = a - b
        mu_range = (-a + 0.15 * d, -b - 0.15 * d)
    lam = np.linspace(*lam_range, nu)
    mu = np.linspace(*mu_range, nv)
    xy = np.empty((nu, nv, 2))
    for i, l in enumerate(lam):
        for j, m in enumerate(mu):
            x2 = (a + l) * (a + m) / (a - b)
            y2 = (b + l) * (b + m) / (b - a)
            xy[i, j] = (math.sqrt(max(x2, 0.0)), math.sqrt(max(y2, 0.0)))
    return SampledNet(lam, mu, xy)


def sample_confocal_parabolic(u_range=(0.6, 1.4), v_range=(0.5, 1.5),
                              nu: int = 10, nv: int = 12) -> SampledNet:
    """Parabolic-coordinate net x = (u^2 - v^2)/2, y = u v (confocal
    coaxial parabolas with focus at the origin)."""
    us = np.linspace(*u_range, nu)
    vs = np.linspace(*v_range, nv)
    xy = np.empty((nu, nv, 2))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            xy[i, j] = ((u * u - v * v) / 2.0, u * v)
    return SampledNet(us, vs, xy)


def sample_polar(center=(0.0, 0.0), r_range=(0.5, 1.5),
                 theta_range=(0.2, 1.2), nu: int = 10,
                 nv: int = 12) -> SampledNet:
    """Radial lines (u-curves theta = const) and concentric circles."""
    thetas = np.linspace(*theta_range, nu)
    rs = np.linspace(*r_range, nv)
    xy = np.empty((nu, nv, 2))
    for i, th in enumerate(thetas):
        for j, r in enumerate(rs):
            xy[i, j] = (center[0] + r * math.cos(th),
                        center[1] + r * math.sin(th))
    return SampledNet(thetas, rs, xy)


def sample_cartesian(u_range=(0.0, 1.0), v_range=(0.0, 1.0), nu: int = 9,
                     nv: int = 9, angle: float = 0.0) -> SampledNet:
    """Orthogonal straight-line net (a rotated Cartesian grid)."""
    us = np.linspace(*u_range, nu)
    vs = np.linspace(*v_range, nv)
    ca, sa = math.cos(angle), math.sin(angle)
    xy = np.empty((nu, nv, 2))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            xy[i, j] = (ca * u - sa * v, sa * u + ca * v)
    return SampledNet(us, vs, xy)


def sample_control(nu: int = 10, nv: int = 12, eps: float = 0.1) -> SampledNet:
    """Orthogonal but non-Liouville net: image of a grid under the
    conformal map z + eps z^3 (curves are not conics)."""
    us = np.linspace(0.3, 1.0, nu)
    vs = np.linspace(0.2, 0.9, nv)
    xy = np.empty((nu, nv, 2))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            z = complex(u, v)
            w = z + eps * z ** 3
            xy[i, j] = (w.real, w.imag)
    return SampledNet(us, vs, xy)
