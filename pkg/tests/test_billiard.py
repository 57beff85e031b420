import math

import numpy as np
import pytest

from caustics import billiard
from caustics.billiard import PhasePoint
from caustics.curves import circle, confocal_ellipse
from caustics.errors import GrazingError


def test_circle_advance_closed_form(unit_circle):
    # tangential momentum p = cos(pi/3) advances the arc by one third of
    # the circumference: a 3-periodic orbit
    phi = PhasePoint(0.0, 0.5)
    nxt = billiard.billiard_map(unit_circle, phi)
    assert nxt.s == pytest.approx(2.0 * math.pi / 3.0, abs=1e-9)
    assert nxt.p == pytest.approx(0.5, abs=1e-10)
    assert billiard.closure_residual(unit_circle, phi, 3) < 1e-8


def test_circle_momentum_conserved(unit_circle, rng):
    for _ in range(20):
        phi = PhasePoint(rng.random() * unit_circle.total_length,
                         rng.uniform(-0.9, 0.9))
        nxt = billiard.billiard_map(unit_circle, phi)
        assert nxt.p == pytest.approx(phi.p, abs=1e-9)


def test_grazing_rejected(unit_circle):
    with pytest.raises(GrazingError):
        billiard.billiard_map(unit_circle, PhasePoint(0.0, 0.999999999))


def test_reverse_phase_inverts(ellipse_table):
    phi = PhasePoint(1.3, 0.4)
    fwd = billiard.billiard_map(ellipse_table, phi)
    back = billiard.reverse_phase(
        ellipse_table,
        billiard.billiard_map(ellipse_table,
                              billiard.reverse_phase(ellipse_table, fwd)))
    ell = ellipse_table.total_length
    assert abs((back.s - phi.s + ell / 2) % ell - ell / 2) < 1e-8
    assert back.p == pytest.approx(phi.p, abs=1e-8)


def test_symplectic_flat(ellipse_table, rng):
    for _ in range(10):
        phi = PhasePoint(rng.random() * ellipse_table.total_length,
                         rng.uniform(-0.8, 0.8))
        assert billiard.symplectic_check(ellipse_table, phi) < 1e-5


def test_symplectic_curved(synthetic, rng):
    table = circle(synthetic, (1.75, 0.0), 0.5)
    for _ in range(5):
        phi = PhasePoint(rng.random() * table.total_length,
                         rng.uniform(-0.8, 0.8))
        assert billiard.symplectic_check(table, phi) < 1e-5


def test_rotation_number_circle(unit_circle):
    rho, err = billiard.rotation_number(unit_circle, PhasePoint(0.0, 0.5),
                                        2000)
    assert rho == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_joachimsthal_constant(flat, ellipse_table):
    E = np.diag([0.25, 1.0])
    cur = PhasePoint(0.7, 0.55)
    q = np.array(ellipse_table.point(
        ellipse_table.param_at_arclength(cur.s)))
    vals = []
    for _ in range(40):
        nxt = billiard.billiard_map(ellipse_table, cur)
        qn = np.array(ellipse_table.point(
            ellipse_table.param_at_arclength(nxt.s)))
        d = qn - q
        vals.append(q @ E @ (d / np.linalg.norm(d)))
        cur, q = nxt, qn
    assert np.ptp(vals) < 1e-8


def test_caustic_tangency(flat, ellipse_table):
    caustic = confocal_ellipse(flat, 4.0, 1.0, -0.5)
    phi = billiard.tangent_launch(ellipse_table, caustic, 0.9)
    assert billiard.caustic_residual(ellipse_table, caustic, phi) < 1e-9


def test_poncelet_search(flat, ellipse_table):
    lam3 = -0.9827122448569944
    caustic = confocal_ellipse(flat, 4.0, 1.0, lam3)
    phi = billiard.poncelet_search(ellipse_table, caustic, 3, n_verify=5)
    assert phi is not None
    assert billiard.closure_residual(ellipse_table, phi, 3) < 1e-6
    # a caustic off the closing parameter does not close
    other = confocal_ellipse(flat, 4.0, 1.0, lam3 + 0.05)
    assert billiard.poncelet_search(ellipse_table, other, 3,
                                    n_verify=2) is None


def test_find_closing_caustic(flat, ellipse_table):
    lam, caustic, phi = billiard.find_closing_caustic(
        ellipse_table, lambda t: confocal_ellipse(flat, 4.0, 1.0, t), 3,
        (-0.99, -0.2))
    assert lam == pytest.approx(-0.9827122448569944, abs=1e-6)
    assert billiard.closure_residual(ellipse_table, phi, 3) < 1e-9
