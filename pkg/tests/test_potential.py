import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gravaudit.model import SetupGeometry, derive_params
from gravaudit.potential import PotentialField, sphere_potential


@pytest.fixture
def params():
    return derive_params(G=1, hbar=1, c=1, m=1, N=1, R=1, t=1)


def test_center_value(params):
    assert sphere_potential([0, 0, 0], params, [0, 0, 0]) == pytest.approx(0.75)


def test_half_radius_value(params):
    # (1/2)(3/2 - 0.25/2)
    assert sphere_potential([0, 0, 0], params, [0.5, 0, 0]) == pytest.approx(0.6875, rel=1e-15)


def test_boundary_continuity(params):
    R = params.R
    inside = sphere_potential([0, 0, 0], params, [R * (1 - 1e-8), 0, 0])
    outside = sphere_potential([0, 0, 0], params, [R * (1 + 1e-8), 0, 0])
    assert sphere_potential([0, 0, 0], params, [R, 0, 0]) == pytest.approx(0.5)
    assert abs(inside - outside) / abs(inside) < 1e-6


def test_monotone_in_radius(params):
    r = np.linspace(0, 20, 4001)
    x = np.stack([r, np.zeros_like(r), np.zeros_like(r)], axis=1)
    v = sphere_potential([0, 0, 0], params, x)
    assert np.all(np.diff(v) <= 0)


@pytest.fixture
def geometry():
    return SetupGeometry((0, 0, 0), (0, 10, 0), (12, 0, 0), (12, 10, 0), R=1.0)


def test_single_source_needs_target(geometry, params):
    field = PotentialField(geometry, params)
    with pytest.raises(ValueError, match="target_branch"):
        field.evaluate([0, 0, 0])


def test_single_source_matches_sphere(geometry, params):
    field = PotentialField(geometry, params)
    x = np.array([0.3, -0.2, 0.1])
    assert field.evaluate(x, "1L") == sphere_potential(geometry.center("1L"), params, x)


def test_all_branches_far_field_superposition(geometry, params):
    field = PotentialField(geometry, params, "all-branches")
    x = np.array([500.0, 300.0, -200.0])
    r = np.linalg.norm(geometry.centers - x, axis=1)
    assert field.evaluate(x) == pytest.approx(0.5 * np.sum(0.25 / r), rel=1e-14)


def test_all_branches_vs_single_source_inside(params):
    # nearest other center at 10R: neglected sources change the potential by O(R/d)
    g = SetupGeometry((0, 0, 0), (10, 0, 0), (0, 10, 0), (10, 10, 0), R=1.0)
    single = PotentialField(g, params)
    every = PotentialField(g, params, "all-branches")
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.5, 0.5, (200, 3))
    w = every.branch_weights["1L"]
    rel = np.abs(every.evaluate(pts) - w * single.evaluate(pts, "1L")) / (w * single.evaluate(pts, "1L"))
    d_min = 10.0
    assert rel.max() <= 3 * params.R / (d_min - params.R)
    assert rel.min() > 0.1 * params.R / d_min


def test_weights_must_sum_to_one(geometry, params):
    with pytest.raises(ValueError, match="sum to 1"):
        PotentialField(geometry, params, "all-branches", {"1L": 1, "1R": 1, "2L": 0, "2R": 0})


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_rigid_motion_invariance(seed):
    params = derive_params(G=1, hbar=1, c=1, m=1, N=1, R=1, t=1)
    g = SetupGeometry((0, 0, 0), (0, 10, 0), (12, 0, 0), (12, 10, 0), R=1.0)
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    rot = q * np.sign(np.diag(r))
    shift = rng.normal(size=3) * 10
    x = rng.uniform(-15, 15, (20, 3))
    moved = g.transformed(rotation=rot, translation=shift)
    a = PotentialField(g, params, "all-branches").evaluate(x)
    b = PotentialField(moved, params, "all-branches").evaluate(x @ rot.T + shift)
    np.testing.assert_allclose(a, b, rtol=1e-10)
