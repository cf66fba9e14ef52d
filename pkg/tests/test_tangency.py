import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qklab import exact, shoot, tangency
from qklab.errors import DomainError
from qklab.rosgeom import ProfileCurve


def paraboloid(n, a, radius, m=4001):
    r = np.linspace(0.0, radius, m)
    return ProfileCurve(r, a * r * r, 2 * a * r, np.full_like(r, 2 * a), n, n - 1, provenance="barrier")


@pytest.fixture(scope="module")
def c2():
    curve, _ = shoot.integrate(shoot.SlopeField(3, 2))
    return curve


def test_explicit_over_paraboloid():
    upper = exact.explicit_curve(np.linspace(0, 0.99, 2000))
    rep = tangency.first_touch(upper, paraboloid(2, 1.0, 2.0))
    assert rep.touch_radius == 0.0 and rep.shift == 0.0
    assert rep.gradient_mismatch < 1e-9 and rep.interior
    assert rep.gap_function.min() >= -tangency.GAP_TOL


def test_self_touch(c2):
    rep = tangency.first_touch(c2, c2)
    assert rep.shift == 0.0
    assert np.all(rep.gap_function == 0.0)
    assert rep.contact_fraction == 1.0


def test_interior_touch_n3(c2):
    rep = tangency.first_touch(c2, paraboloid(3, 3.0, 2.0))
    assert rep.interior and rep.touch_radius > 0
    assert rep.gradient_mismatch < 1e-6
    assert rep.unimodal
    assert rep.gap_function.min() >= -tangency.GAP_TOL
    gap_at_touch = float(tangency._spline(c2, c2.r[-1])(rep.touch_radius) + rep.shift
                         - 3.0 * rep.touch_radius ** 2)
    assert abs(gap_at_touch) <= tangency.GAP_TOL
    assert rep.ellipticity > 0


def test_touch_against_independent_maximiser(c2):
    # maximise 3 r^2 - u(r) with a bounded scalar optimiser on dense output
    from scipy.optimize import minimize_scalar

    from qklab.exact import polar_height

    res = minimize_scalar(lambda r: polar_height(3, r) - 3 * r * r, bounds=(0.3, 0.7), method="bounded",
                          options={"xatol": 1e-10})
    rep = tangency.first_touch(c2, paraboloid(3, 3.0, 2.0))
    assert rep.touch_radius == pytest.approx(res.x, abs=1e-5)
    assert rep.shift == pytest.approx(-res.fun, abs=1e-8)


@settings(max_examples=20)
@given(st.floats(-5, 5))
def test_common_constant_invariance(c):
    upper = exact.explicit_curve(np.linspace(0, 0.99, 800))
    lower = paraboloid(2, 1.5, 2.0)
    base = tangency.first_touch(upper, lower)
    up = ProfileCurve(upper.r, upper.u + c, upper.du, upper.ddu, 2, 1, provenance="explicit")
    lo = ProfileCurve(lower.r, lower.u + c, lower.du, lower.ddu, 2, 1, provenance="barrier")
    moved = tangency.first_touch(up, lo)
    assert moved.shift == pytest.approx(base.shift, abs=1e-12)
    assert moved.touch_radius == pytest.approx(base.touch_radius, abs=1e-9)


def test_boundary_touch_flagged():
    upper = exact.explicit_curve(np.linspace(0, 0.5, 400))
    # a cone-like steep candidate rises fastest at the outer edge
    r = np.linspace(0, 0.5, 400)
    lower = ProfileCurve(r, 20 * r ** 3, 60 * r ** 2, 120 * r, 2, 1, provenance="barrier")
    rep = tangency.first_touch(upper, lower)
    assert rep.at_boundary and not rep.interior


def test_no_overlap():
    a = exact.explicit_curve(np.linspace(0.0, 0.2, 10))
    b = paraboloid(2, 1.0, 2.0)
    b = ProfileCurve(b.r[b.r > 0.5], b.u[b.r > 0.5], b.du[b.r > 0.5], b.ddu[b.r > 0.5], 2, 1, provenance="barrier")
    with pytest.raises(DomainError):
        tangency.first_touch(a, b)


def test_nonexistence_demo_bowl(c2):
    bowl, _ = shoot.integrate(shoot.SlopeField(3, 0), shoot.IntegrationConfig(r_max=2.0))
    rep, text = tangency.nonexistence_demo(3, bowl, translator=c2)
    assert rep.interior and rep.tangential
    assert "DEMONSTRATION ONLY" in text and "sampled points" in text


def test_nonexistence_demo_rejects_small_domain(c2):
    with pytest.raises(DomainError):
        tangency.nonexistence_demo(3, paraboloid(3, 1.0, 1 / 3), translator=c2)
    with pytest.raises(DomainError):
        tangency.nonexistence_demo(3, paraboloid(2, 1.0, 2.0), translator=c2)


def test_demo_against_itself(c2):
    rep, _ = tangency.nonexistence_demo(3, c2, translator=c2)
    assert rep.shift == 0.0 and rep.contact_fraction == 1.0
