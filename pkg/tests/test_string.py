import math

import numpy as np
import pytest

from caustics.curves import ConvexCurve, confocal_ellipse
from caustics.errors import RangeError
from caustics.string_construction import (
    graves_check,
    leaf_gap,
    match_excess,
    string_curve,
    string_diffeo,
    string_excess,
)


def circle_excess(R):
    # string excess of the unit-circle caustic at crossing radius R
    return 2.0 * math.sqrt(R * R - 1.0) - 2.0 * math.acos(1.0 / R)


def test_excess_zero_at_coincident_points(unit_circle):
    rec = string_excess(unit_circle, 0.3, 0.3)
    assert rec.excess == 0.0


def test_circle_excess_closed_form(unit_circle):
    # symmetric tangents meeting at radius R
    rec = string_excess(unit_circle, -0.125, 0.125)
    assert rec.excess == pytest.approx(circle_excess(math.sqrt(2.0)),
                                       abs=1e-9)


def test_string_diffeo_inverts_excess(unit_circle):
    p = 0.05
    b = string_diffeo(unit_circle, p, 0.2)
    assert string_excess(unit_circle, 0.2, b).excess == pytest.approx(
        p, abs=1e-11)


def test_string_diffeo_rejects_negative(unit_circle):
    with pytest.raises(RangeError):
        string_diffeo(unit_circle, -0.1, 0.0)


def test_circle_string_curve_radius(unit_circle):
    # excess 2 - pi/2 puts the string curve on the circle R = sqrt(2)
    built = string_curve(unit_circle, 2.0 - math.pi / 2.0, 64,
                         trust_region=3.0)
    radii = np.linalg.norm(built.points, axis=1)
    assert np.max(np.abs(radii - math.sqrt(2.0))) < 1e-8


def test_graves_confocal(flat, ellipse_caustic):
    outer = confocal_ellipse(flat, 2.0, 1.0, 0.15)
    residual = graves_check([ellipse_caustic, outer], 0, 1, grid=32,
                            trust_region=4.0)
    assert residual < 1e-8


def test_match_excess_consistency(flat, ellipse_caustic):
    outer = confocal_ellipse(flat, 2.0, 1.0, 0.15)
    p = match_excess(ellipse_caustic, outer, trust_region=4.0)
    assert p > 0
    rec = string_excess(ellipse_caustic, 0.0,
                        string_diffeo(ellipse_caustic, p, 0.0,
                                      trust_region=4.0),
                        trust_region=4.0)
    assert leaf_gap(flat, outer, rec.C) < 1e-10


def make_germ_leaf(chart, v0):
    return ConvexCurve(chart, lambda t: (t, v0),
                       dp=lambda t: (1.0, 0.0), closed=False,
                       tau_range=(1.0, 2.6), name=f"leaf_v={v0}")


def test_graves_germ_leaves(synthetic):
    # close coordinate leaves of a Liouville germ satisfy Graves
    leaves = [make_germ_leaf(synthetic, -0.40),
              make_germ_leaf(synthetic, -0.41)]
    residual = graves_check(leaves, 0, 1,
                            grid=np.linspace(1.05, 1.6, 12),
                            trust_region=3.0)
    assert residual < 1e-8
