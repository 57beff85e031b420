import math

import numpy as np
import pytest

from caustics.net import (
    SampledNet,
    classify_planar_net,
    sample_cartesian,
    sample_confocal_central,
    sample_confocal_parabolic,
    sample_control,
    sample_polar,
)


def apply_rigid(net, angle, shift):
    R = np.array([[math.cos(angle), -math.sin(angle)],
                  [math.sin(angle), math.cos(angle)]])
    return SampledNet(net.u, net.v, net.xy @ R.T + np.asarray(shift))


def test_confocal_central():
    result = classify_planar_net(sample_confocal_central(2.0, 1.0))
    assert result.net_type == "confocal-central"
    assert np.max(np.abs(result.params["center"])) < 1e-8
    assert result.params["focal_distance"] == pytest.approx(1.0, abs=1e-8)


def test_confocal_parabolic():
    result = classify_planar_net(sample_confocal_parabolic())
    assert result.net_type == "confocal-parabolic"
    assert np.max(np.abs(result.params["focus"])) < 1e-8


def test_polar():
    result = classify_planar_net(sample_polar(center=(0.3, -0.2)))
    assert result.net_type == "polar"
    assert result.params["center"] == pytest.approx([0.3, -0.2], abs=1e-8)


def test_orthogonal_lines():
    result = classify_planar_net(sample_cartesian(angle=0.4))
    assert result.net_type == "orthogonal-lines"
    d = np.abs(np.array(result.params["direction_v"]))
    assert d == pytest.approx([math.cos(0.4), math.sin(0.4)], abs=1e-10)


def test_control_unclassified():
    result = classify_planar_net(sample_control())
    assert result.net_type == "unclassified"
    assert result.residuals  # every tried branch is reported


def test_rigid_motion_equivariance():
    angle, shift = 0.7, (1.3, -0.4)
    for net, key in [(sample_confocal_central(2.0, 1.0), "center"),
                     (sample_confocal_parabolic(), "focus"),
                     (sample_polar(), "center")]:
        base = classify_planar_net(net)
        moved = classify_planar_net(apply_rigid(net, angle, shift))
        assert moved.net_type == base.net_type
        R = np.array([[math.cos(angle), -math.sin(angle)],
                      [math.sin(angle), math.cos(angle)]])
        expected = R @ np.array(base.params[key]) + np.array(shift)
        assert np.max(np.abs(np.array(moved.params[key]) - expected)) < 1e-7


def test_noise_stability():
    rng = np.random.default_rng(11)
    for net, expected in [
            (sample_confocal_central(2.0, 1.0), "confocal-central"),
            (sample_confocal_parabolic(), "confocal-parabolic"),
            (sample_polar(), "polar"),
            (sample_cartesian(angle=0.2), "orthogonal-lines")]:
        noisy = SampledNet(net.u, net.v,
                           net.xy + 1e-9 * rng.standard_normal(net.xy.shape))
        assert classify_planar_net(noisy).net_type == expected


def test_scaled_ellipses_not_confocal():
    # concentric similar ellipses fit conics but are not a confocal family
    us = np.linspace(1.0, 2.0, 10)
    vs = np.linspace(0.1, 1.2, 12)
    xy = np.empty((10, 12, 2))
    for i, t in enumerate(us):
        for j, th in enumerate(vs):
            xy[i, j] = (2.0 * t * math.cos(th), t * math.sin(th))
    result = classify_planar_net(SampledNet(us, vs, xy))
    assert result.net_type == "unclassified"
