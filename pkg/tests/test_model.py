import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gravaudit import model
from gravaudit.model import (GeometryError, SetupGeometry, ValidationError, branch_distances,
                             derive_params, kappa)


def test_derive_params_unit():
    p = derive_params(G=1, hbar=1, c=1, m=1, N=2, R=1, t=1)
    assert p.M == 2
    assert p.V == pytest.approx(4 * math.pi / 3, rel=1e-15)
    assert p.V == pytest.approx(4.18879, abs=1e-5)
    assert p.gamma == 1.0


def test_single_particle_mass_identity():
    assert derive_params(G=1, hbar=1, c=1, m=1, N=1, R=1, t=1).M == 1


def test_si_mass():
    p = derive_params(G=6.674e-11, hbar=1.0546e-34, c=2.998e8, m=1.67e-27, N=10**10, R=1e-7, t=1.0)
    assert p.M == pytest.approx(1.67e-17, rel=1e-12)


@pytest.mark.parametrize("name", ["G", "hbar", "c", "m", "R"])
def test_non_positive_input_names_field(name):
    args = dict(G=1, hbar=1, c=1, m=1, N=1, R=1, t=1)
    args[name] = 0.0
    with pytest.raises(ValidationError) as err:
        derive_params(**args)
    assert err.value.field == name


def test_bad_particle_count():
    with pytest.raises(ValidationError, match="N"):
        derive_params(G=1, hbar=1, c=1, m=1, N=0, R=1, t=1)


def test_derive_params_idempotent():
    p = derive_params(G=2.0, hbar=0.5, c=3.0, m=0.7, N=5, R=0.2, t=4.0)
    assert derive_params(**p.inputs()) == p


def test_branch_distances_collinear(collinear):
    d = branch_distances(collinear)
    np.testing.assert_array_equal(d, [[2.0, 3.0], [1.0, 2.0]])


def test_branch_distances_square():
    s = 5.0
    g = SetupGeometry((0, 0, 0), (0, s, 0), (s, 0, 0), (s, s, 0), R=1.0)
    d = branch_distances(g)
    np.testing.assert_allclose(d, [[s, s * math.sqrt(2)], [s * math.sqrt(2), s]], rtol=1e-15)


def test_overlap_reports_pair():
    with pytest.raises(GeometryError) as err:
        SetupGeometry((0, 0, 0), (3, 0, 0), (3.1, 0, 0), (10, 0, 0), R=0.5)
    assert ("1R", "2L") in err.value.pairs
    assert "1R-2L" in str(err.value)


def test_kappa_closed_form():
    p = derive_params(G=1, hbar=1, c=1, m=1, N=2, R=1, t=1)
    # direct arithmetic: (6 * 1 * 1 * 2^3 * 1 * 1 / 25)^2 with i^2 = -1
    assert kappa(p).real == pytest.approx(-(48 / 25) ** 2, rel=1e-13)
    assert kappa(p).real == pytest.approx(-3.6864, rel=1e-13)
    assert kappa(p).imag == 0


def test_kappa_zero_time():
    assert kappa(derive_params(G=1, hbar=1, c=1, m=1, N=2, R=1, t=0)) == 0


def test_kappa_matches_lambda_and_farfield_coupling():
    p = derive_params(G=0.3, hbar=1.7, c=1.0, m=0.9, N=3, R=0.4, t=2.5)
    assembled = model.interaction_prefactor(p) * p.t**2 * (1j * model.farfield_coupling(p)) ** 2
    assert kappa(p) == pytest.approx(assembled, rel=1e-12)


def test_kappa_log_representation_si():
    p = derive_params(G=6.674e-11, hbar=1.0546e-34, c=2.998e8, m=1.67e-27, N=10**10, R=1e-7, t=1.0)
    direct = -36 * p.G**4 * p.m**4 * p.M**6 * p.R**2 * p.t**2 / (625 * p.hbar**6)
    assert model.log10_abs_kappa(p) == pytest.approx(math.log10(abs(direct)), abs=1e-12)


def test_kappa_underflow_raises_but_log_survives():
    p = derive_params(G=1e-30, hbar=1.0, c=1.0, m=1e-30, N=1, R=1e-20, t=1e-10)
    with pytest.raises(model.NumericalError):
        kappa(p)
    assert math.isfinite(model.log10_abs_kappa(p))


@settings(max_examples=50, deadline=None)
@given(t=st.floats(1e-3, 1e3), G=st.floats(0.1, 10), m=st.floats(0.1, 10), N=st.integers(1, 50))
def test_kappa_nonpositive_and_quadratic_in_t(t, G, m, N):
    p = derive_params(G=G, hbar=1, c=1, m=m, N=N, R=1, t=t)
    k1, k2 = kappa(p), kappa(p.replace(t=2 * t))
    assert k1.real <= 0 and k1.imag == 0
    assert k2.real == pytest.approx(4 * k1.real, rel=1e-12)


def _rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    return q * np.sign(np.diag(r))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_distances_rigid_motion_invariant(seed):
    rng = np.random.default_rng(seed)
    g = SetupGeometry((0, 0, 0), (0, 4, 0), (7, 1, 0), (8, 5, 2), R=1.0)
    moved = g.transformed(rotation=_rotation(rng), translation=rng.normal(size=3) * 100)
    np.testing.assert_allclose(branch_distances(moved), branch_distances(g), rtol=1e-12)
