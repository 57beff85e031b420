"""Acceptance criteria.

Each test prints a single PASS/FAIL line with its measured numbers, then
asserts the stated tolerance.  All constants are frozen; the oracles are
closed forms, conserved quantities, or self-reconstruction against known
charts.
"""

import csv
import math

import numpy as np
from click.testing import CliRunner
from scipy.optimize import brentq

from caustics import billiard, net, poritsky
from caustics.billiard import PhasePoint
from caustics.cli import main as cli_main
from caustics.curves import circle, confocal_ellipse, ellipse
from caustics.metric import (
    confocal_elliptic,
    control_chart,
    euclidean_cartesian,
)
from caustics.net import NetQuad
from caustics.string_construction import string_curve
from conftest import make_synthetic


def report(num, name, passed, detail):
    print(f"ACCEPTANCE {num:2d} [{name}]: "
          f"{'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, f"acceptance {num} ({name}): {detail}"


FLAT = euclidean_cartesian((-4.0, 4.0, -4.0, 4.0))


def test_01_graves_confocal_string_curves():
    caustic = confocal_ellipse(FLAT, 2.0, 1.0, 0.0)

    def implicit(lam, x, y):
        return x * x / (2.0 + lam) + y * y / (1.0 + lam) - 1.0

    worst = 0.0
    for p in (0.05, 0.1, 0.2):
        built = string_curve(caustic, p, 32, trust_region=4.0)
        x, y = built.points[:, 0], built.points[:, 1]
        lam = brentq(lambda t: implicit(t, x[0], y[0]), 1e-9, 10.0)
        worst = max(worst, max(abs(implicit(lam, xi, yi))
                               for xi, yi in zip(x, y)))
    report(1, "Graves string curves confocal", worst < 1e-6,
           f"max implicit residual {worst:.3e} < 1e-6")


def test_02_circle_string_curve_closed_form():
    caustic = circle(FLAT, (0.0, 0.0), 1.0)
    built = string_curve(caustic, 2.0 - math.pi / 2.0, 64,
                         trust_region=3.0)
    radii = np.linalg.norm(built.points, axis=1)
    worst = float(np.max(np.abs(radii - math.sqrt(2.0))))
    report(2, "circle Gamma_p radius sqrt(2)", worst < 1e-8,
           f"max radial residual {worst:.3e} < 1e-8")


def test_03_symplecticity():
    rng = np.random.default_rng(2024)
    tables = [circle(FLAT, (0.0, 0.0), 1.0),
              ellipse(FLAT, (2.0, 1.0)),
              circle(make_synthetic(), (1.75, 0.0), 0.5)]
    worst = 0.0
    for table in tables:
        for _ in range(50):
            phi = PhasePoint(rng.random() * table.total_length,
                             rng.uniform(-0.85, 0.85))
            worst = max(worst, billiard.symplectic_check(table, phi))
    report(3, "symplecticity of the billiard map", worst < 1e-5,
           f"max ||det J| - 1| {worst:.3e} < 1e-5 at 50 points x 3 tables")


def test_04_poritsky_property_with_halving():
    caustic = confocal_ellipse(FLAT, 2.0, 1.0, 0.0)
    p_ref = 0.036
    p_list = [0.01, 0.02, 0.03, 0.05, 0.08]
    param1 = poritsky.poritsky_parameter(caustic, p_ref, N=100_000)
    d1 = poritsky.poritsky_check(caustic, param1, p_list)
    param4 = poritsky.poritsky_parameter(caustic, p_ref, N=400_000)
    d4 = poritsky.poritsky_check(caustic, param4, p_list)
    ratio = d4 / d1
    ok = d1 < 1e-4 and 0.35 < ratio < 0.65
    report(4, "Poritsky parameter shift defect", ok,
           f"defect(1e5) {d1:.3e} < 1e-4, defect(4e5)/defect(1e5) "
           f"{ratio:.2f} in (0.35, 0.65)")


def test_05_commutation():
    caustic = confocal_ellipse(FLAT, 2.0, 1.0, 0.0)
    worst = poritsky.commutation_check(caustic, 0.02, 0.05)
    report(5, "string diffeomorphisms commute", worst < 1e-6,
           f"sup |T_p T_q - T_q T_p| {worst:.3e} < 1e-6")


def test_06_poritsky_to_liouville():
    caustic = confocal_ellipse(FLAT, 2.0, 1.0, 0.0)
    param = poritsky.poritsky_parameter(caustic, 0.039755032692557445,
                                        N=100_000)
    recon = poritsky.poritsky_to_liouville(
        caustic, param,
        grid={"nx": 256, "ny": 33, "y_min": 0.05, "y_max": 0.10})
    d = recon.diagnostics
    ok = (d["orthogonality"] < 1e-5 and d["diagonal_kappa"] < 1e-5
          and d["pde9_residual"] < 1e-3 and d["separation_residual"] < 1e-3
          and d["liouville_residual"] < 1e-3)
    report(6, "Poritsky -> Liouville reconstruction", ok,
           "cross-term {orthogonality:.2e} < 1e-5, |kappa_g| "
           "{diagonal_kappa:.2e} < 1e-5, PDE {pde9_residual:.2e} < 1e-3, "
           "separation {separation_residual:.2e} < 1e-3, Liouville "
           "{liouville_residual:.2e} < 1e-3".format(**d))


def test_07_ivory_lemma():
    chart = confocal_elliptic(2.0, 1.0)
    rng = np.random.default_rng(77)
    du, dv = chart.spans
    worst_defect = 0.0
    worst_cross = 0.0
    for _ in range(20):
        u1 = chart.u_min + du * (0.15 + 0.5 * rng.random())
        v1 = chart.v_min + dv * (0.15 + 0.5 * rng.random())
        quad = NetQuad(u1, u1 + 0.1 * du * (0.5 + rng.random()),
                       v1, v1 + 0.1 * dv * (0.5 + rng.random()))
        res = net.ivory_check(chart, quad)
        worst_defect = max(worst_defect, res.defect)
        A = np.array(chart.to_cartesian(quad.u1, quad.v1))
        B = np.array(chart.to_cartesian(quad.u2, quad.v2))
        worst_cross = max(worst_cross,
                          abs(res.L_plus - np.linalg.norm(B - A)))
    control_defect = net.ivory_check(control_chart(),
                                     NetQuad(0.3, 0.9, 0.2, 0.7)).defect
    ok = worst_defect < 1e-7 and worst_cross < 1e-9 \
        and control_defect > 1e-4
    report(7, "Ivory lemma", ok,
           f"max |L+ - L-| {worst_defect:.3e} < 1e-7 on 20 quads, "
           f"Cartesian cross-check {worst_cross:.3e} < 1e-9, "
           f"control defect {control_defect:.3e} > 1e-4")


def test_08_ivory_to_liouville_machinery():
    chart = confocal_elliptic(2.0, 1.0)
    quad = NetQuad(0.2, 0.6, -1.6, -1.3)
    res_u, res_v = net.first_variation_check(chart, quad)
    data = net.diagonal_paths(chart, quad)
    worst_norm = 0.0
    for u in np.linspace(0.25, 0.55, 10):
        for v in np.linspace(-1.55, -1.35, 10):
            ef = net.eta_forms(chart, quad, (u, v), data=data)
            worst_norm = max(worst_norm, abs(ef.norm_plus - 1.0),
                             abs(ef.norm_minus - 1.0))
    rec = net.liouville_from_ivory(chart, quad,
                                   NetQuad(0.15, 0.7, -1.65, -1.35),
                                   nu=8, nv=8)
    ok = res_u < 1e-6 and res_v < 1e-6 and worst_norm < 1e-6 \
        and rec.max_rel_dev < 1e-4
    report(8, "Ivory -> Liouville machinery", ok,
           f"covector residuals ({res_u:.2e}, {res_v:.2e}) < 1e-6, "
           f"max |norm(eta) - 1| {worst_norm:.3e} < 1e-6, "
           f"a,b self-reconstruction {rec.max_rel_dev:.3e} < 1e-4")


def test_09_poncelet_porism():
    table = ellipse(FLAT, (2.0, 1.0))
    lam3 = -0.9827122448569944
    caustic = confocal_ellipse(FLAT, 4.0, 1.0, lam3)
    phi = billiard.poncelet_search(table, caustic, 3, n_verify=10)
    worst = 0.0
    if phi is not None:
        ell = table.total_length
        for k in range(10):
            start = billiard.tangent_launch(table, caustic,
                                            0.05 + ell * k / 10.7)
            worst = max(worst,
                        billiard.closure_residual(table, start, 3))
    ok = phi is not None and worst < 1e-6
    report(9, "Poncelet porism", ok,
           f"3-periodic orbit found, 10 other launches close with max "
           f"residual {worst:.3e} < 1e-6")


def test_10_weihnacht_blaschke_classifier():
    central = net.classify_planar_net(net.sample_confocal_central(2.0, 1.0))
    parab = net.classify_planar_net(net.sample_confocal_parabolic())
    polar = net.classify_planar_net(net.sample_polar(center=(0.3, -0.2)))
    lines = net.classify_planar_net(net.sample_cartesian(angle=0.4))
    control = net.classify_planar_net(net.sample_control())
    param_err = max(
        abs(central.params["focal_distance"] - 1.0),
        float(np.max(np.abs(central.params["center"]))),
        float(np.max(np.abs(parab.params["focus"]))),
        abs(parab.params["first_focal_distance"] - 0.18),
        float(np.max(np.abs(np.array(polar.params["center"])
                            - [0.3, -0.2]))),
        abs(abs(np.array(lines.params["direction_v"]) @
                [math.cos(0.4), math.sin(0.4)]) - 1.0))
    types_ok = (central.net_type == "confocal-central"
                and parab.net_type == "confocal-parabolic"
                and polar.net_type == "polar"
                and lines.net_type == "orthogonal-lines"
                and control.net_type == "unclassified")
    ok = types_ok and param_err < 1e-5
    report(10, "Weihnacht-Blaschke classifier", ok,
           f"all four types matched, control unclassified, max parameter "
           f"error {param_err:.3e} < 1e-5")


def test_11_phase_portrait():
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(cli_main, [
            "billiard", "phase-portrait", "--chart", "euclidean_cartesian",
            "--table", "ellipse:semi_axes=[2,1]", "--p-min", "0.3",
            "--p-max", "0.9", "--orbits", "8", "-n", "60",
            "--out", "portrait.csv"], catch_exceptions=False)
        assert result.exit_code == 0
        with open("portrait.csv") as fh:
            rows = list(csv.DictReader(fh))
    table = ellipse(FLAT, (2.0, 1.0))
    E = np.diag([0.25, 1.0])
    orbits = {}
    for row in rows:
        orbits.setdefault(row["orbit"], []).append(float(row["s"]))
    worst_j = 0.0
    for svals in orbits.values():
        pts = np.array([table.point(table.param_at_arclength(s))
                        for s in svals])
        J = []
        for k in range(len(pts) - 1):
            d = pts[k + 1] - pts[k]
            J.append(pts[k] @ E @ (d / np.linalg.norm(d)))
        worst_j = max(worst_j, float(np.ptp(J)))
    rhos = []
    for lam in np.linspace(-0.95, -0.05, 20):
        caustic = confocal_ellipse(FLAT, 4.0, 1.0, lam)
        phi = billiard.tangent_launch(table, caustic, 0.3)
        rho, _ = billiard.rotation_number(table, phi, 2000)
        rhos.append(rho)
    monotone = bool(np.all(np.diff(rhos) < 0.0))
    ok = worst_j < 1e-8 and monotone
    report(11, "phase portrait", ok,
           f"Joachimsthal spread per orbit {worst_j:.3e} < 1e-8, rotation "
           f"number strictly monotone over 20 caustics: {monotone}")
