import math

import numpy as np
import pytest

from caustics.errors import ConditioningError, ConstructionError
from caustics.net import (
    NetQuad,
    diagonal_paths,
    eta_forms,
    first_variation_check,
    ivory_check,
    liouville_from_ivory,
)


def random_quad(chart, rng, frac=0.1):
    du, dv = chart.spans
    u1 = chart.u_min + du * (0.15 + 0.5 * rng.random())
    v1 = chart.v_min + dv * (0.15 + 0.5 * rng.random())
    return NetQuad(u1, u1 + frac * du * (0.5 + rng.random()),
                   v1, v1 + frac * dv * (0.5 + rng.random()))


def test_quad_orientation_required():
    with pytest.raises(ConstructionError):
        NetQuad(0.5, 0.2, 0.0, 1.0)


def test_ivory_euclidean_rectangle(flat):
    res = ivory_check(flat, NetQuad(0.0, 0.7, -0.2, 0.4))
    assert res.L_plus == pytest.approx(math.hypot(0.7, 0.6), abs=1e-12)
    assert res.defect < 1e-12


def test_ivory_confocal_random_quads(confocal, rng):
    for _ in range(8):
        quad = random_quad(confocal, rng)
        res = ivory_check(confocal, quad)
        assert res.defect < 1e-9
        # cross-check against the straight-line Cartesian image
        A = np.array(confocal.to_cartesian(quad.u1, quad.v1))
        B = np.array(confocal.to_cartesian(quad.u2, quad.v2))
        assert res.L_plus == pytest.approx(np.linalg.norm(B - A), abs=1e-9)


def test_ivory_synthetic(synthetic, rng):
    for _ in range(5):
        assert ivory_check(synthetic, random_quad(synthetic, rng)).defect \
            < 1e-9


def test_ivory_fails_on_control(control):
    res = ivory_check(control, NetQuad(0.3, 0.9, 0.2, 0.7))
    assert res.defect > 1e-4


def test_first_variation_confocal(confocal):
    res_u, res_v = first_variation_check(confocal,
                                         NetQuad(0.2, 0.6, -1.6, -1.3))
    assert res_u < 1e-9
    assert res_v < 1e-9


def test_first_variation_stencil_rejects_control(control):
    with pytest.raises(ConstructionError):
        first_variation_check(control, NetQuad(0.3, 0.9, 0.2, 0.7))


def test_eta_forms_euclidean_square(flat):
    # the diagonal of a unit square gives eta+- = (du +- dv)/sqrt(2)
    ef = eta_forms(flat, NetQuad(0.0, 1.0, 0.0, 1.0), (0.3, 0.7))
    assert ef.phi == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-10)
    assert ef.psi == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-10)
    assert ef.norm_plus == pytest.approx(1.0, abs=1e-10)
    assert ef.norm_minus == pytest.approx(1.0, abs=1e-10)


def test_eta_norms_confocal_grid(confocal):
    quad = NetQuad(0.2, 0.6, -1.6, -1.3)
    data = diagonal_paths(confocal, quad)
    for u in np.linspace(0.25, 0.55, 5):
        for v in np.linspace(-1.55, -1.35, 5):
            ef = eta_forms(confocal, quad, (u, v), data=data)
            assert abs(ef.norm_plus - 1.0) < 1e-6
            assert abs(ef.norm_minus - 1.0) < 1e-6


def test_liouville_from_ivory_euclidean(flat):
    rec = liouville_from_ivory(flat, NetQuad(0.0, 0.8, 0.0, 0.5),
                               NetQuad(-0.1, 0.9, -0.2, 0.6),
                               nu=6, nv=6)
    assert np.max(np.abs(rec.a - 1.0)) < 1e-9
    assert np.max(np.abs(rec.b - 1.0)) < 1e-9


def test_liouville_from_ivory_confocal(confocal):
    rec = liouville_from_ivory(confocal, NetQuad(0.2, 0.6, -1.6, -1.3),
                               NetQuad(0.15, 0.7, -1.65, -1.35),
                               nu=6, nv=6)
    assert rec.max_rel_dev < 1e-4
    assert rec.factorization_residual < 1e-10


def test_liouville_from_ivory_synthetic(synthetic):
    rec = liouville_from_ivory(synthetic, NetQuad(1.2, 1.6, -0.5, -0.2),
                               NetQuad(1.1, 1.7, -0.55, -0.25),
                               nu=6, nv=6)
    assert rec.max_rel_dev < 1e-4


def test_liouville_from_ivory_conditioning(confocal):
    # identical quads give vanishing U~ - U: aspect ratios too close
    quad = NetQuad(0.2, 0.6, -1.6, -1.3)
    with pytest.raises(ConditioningError):
        liouville_from_ivory(confocal, quad,
                             NetQuad(0.2, 0.6, -1.6, -1.3 + 1e-12),
                             nu=4, nv=4)


def test_liouville_from_ivory_needs_overlap(confocal):
    with pytest.raises(ConstructionError):
        liouville_from_ivory(confocal, NetQuad(0.2, 0.4, -1.6, -1.5),
                             NetQuad(0.5, 0.7, -1.4, -1.3))
