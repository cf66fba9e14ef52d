import itertools
from math import factorial

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import special_ortho_group

from qklab import graphgeom, rosgeom, symfunc
from qklab.errors import DomainError
from qklab.exact import explicit_ddu, explicit_slope
from qklab.graphgeom import GraphJet


def random_jet(rng, n, scale=1.5):
    a = rng.normal(size=(n, n)) * scale
    return GraphJet(rng.normal(size=n) * scale, 0.5 * (a + a.T))


def minors_sum(h, l):
    # S_l of a matrix is the sum of its principal l x l minors
    n = h.shape[0]
    if l == 0:
        return 1.0
    return sum(np.linalg.det(h[np.ix_(c, c)]) for c in itertools.combinations(range(n), l))


def test_jet_validation():
    with pytest.raises(DomainError):
        GraphJet(np.zeros(2), np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        GraphJet(np.zeros(3), np.eye(2))


def test_weingarten_flat_gradient():
    h = graphgeom.weingarten(GraphJet(np.zeros(3), np.diag([1.0, 2.0, 3.0])))
    np.testing.assert_allclose(h, np.diag([1.0, 2.0, 3.0]))


def test_weingarten_hand_evaluation():
    g = 0.7
    h = graphgeom.weingarten(GraphJet(np.array([g, 0.0, 0.0]), np.eye(3)))
    assert h[0, 0] == pytest.approx(1 / np.sqrt(1 + g * g) - g * g / (1 + g * g) ** 1.5, rel=1e-14)
    assert h[0, 0] == pytest.approx((1 + g * g) ** -1.5, rel=1e-14)
    np.testing.assert_allclose(np.diag(h)[1:], 1 / np.sqrt(1 + g * g), rtol=1e-14)


def test_weingarten_eigenvalues_match_profile_curvatures(rng):
    for _ in range(200):
        n = int(rng.integers(2, 7))
        r, du, ddu = rng.uniform(0.05, 2), rng.uniform(-3, 3), rng.uniform(-5, 5)
        jet = graphgeom.radial_jet(n, r, du, ddu, rng.normal(size=n))
        eig = np.sort(np.linalg.eigvals(graphgeom.weingarten(jet)).real)
        ref = np.sort(rosgeom.principal_curvatures(rosgeom.ProfileJet(r, 0.0, du, ddu, n, 0)))
        np.testing.assert_allclose(eig, ref, atol=1e-9)


def test_principal_curvatures_match_nonsymmetric_eigenvalues(rng):
    for n in range(2, 7):
        for _ in range(30):
            jet = random_jet(rng, n)
            eig = np.sort(np.linalg.eigvals(graphgeom.weingarten(jet)).real)
            np.testing.assert_allclose(np.sort(graphgeom.principal_curvatures(jet)), eig, atol=1e-9)


def test_graph_s_l_examples():
    jet = GraphJet(np.zeros(3), np.diag([1.0, 2.0, 3.0]))
    assert graphgeom.graph_s_l(jet, 2) == pytest.approx(11)
    assert graphgeom.graph_s_l(jet, 2, method="delta") == pytest.approx(11)
    assert graphgeom.graph_s_l(jet, 0) == 1.0
    r = 0.5
    jet = graphgeom.radial_jet(2, r, explicit_slope(r), explicit_ddu(r))
    assert graphgeom.graph_s_l(jet, 2) == pytest.approx(192 / 125, rel=1e-13)
    assert graphgeom.graph_s_l(jet, 2, method="delta", cross_check=True) == pytest.approx(192 / 125, rel=1e-13)


def test_kronecker_delta():
    assert graphgeom.kronecker_delta((0, 1), (0, 1)) == 1
    assert graphgeom.kronecker_delta((1, 0), (0, 1)) == -1
    assert graphgeom.kronecker_delta((1, 2, 0), (0, 1, 2)) == 1
    assert graphgeom.kronecker_delta((0, 0), (0, 0)) == 0
    assert graphgeom.kronecker_delta((0, 2), (0, 1)) == 0


def test_delta_prefactor_is_factorial():
    # l = 3 separates 1/l! from 1/l
    h = np.diag([1.0, 2.0, 3.0, 4.0])
    raw = graphgeom.delta_contraction(h, 3)
    assert raw / factorial(3) == pytest.approx(symfunc.elementary_symmetric([1, 2, 3, 4], 3))
    assert raw / 3 != pytest.approx(symfunc.elementary_symmetric([1, 2, 3, 4], 3))


def test_delta_limited_to_small_n():
    with pytest.raises(DomainError):
        graphgeom.delta_contraction(np.eye(9), 2)


def test_delta_equals_eigen_and_minors(rng):
    for n in range(2, 6):
        for _ in range(40):
            jet = random_jet(rng, n)
            h = graphgeom.weingarten(jet)
            for l in range(n + 1):
                eig = graphgeom.graph_s_l(jet, l)
                dlt = graphgeom.graph_s_l(jet, l, method="delta")
                scale = max(1.0, abs(eig))
                assert abs(dlt - eig) <= 1e-9 * scale
                assert abs(minors_sum(h, l) - eig) <= 1e-9 * scale


def test_rotational_consistency(rng):
    for n in range(2, 7):
        for _ in range(40):
            r, du, ddu = rng.uniform(0.05, 2), rng.uniform(-3, 3), rng.uniform(-5, 5)
            gj = graphgeom.radial_jet(n, r, du, ddu, rng.normal(size=n))
            pj = rosgeom.ProfileJet(r, 0.0, du, ddu, n, 0)
            for l in range(1, n + 1):
                a, b = graphgeom.graph_s_l(gj, l), rosgeom.s_l_profile(pj, l)
                assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


@given(st.integers(2, 6), st.integers(0, 2 ** 32 - 1))
def test_orthogonal_invariance(n, seed):
    rng = np.random.default_rng(seed)
    jet = random_jet(rng, n)
    q = special_ortho_group.rvs(n, random_state=rng) if n > 1 else np.eye(1)
    hess = q @ jet.hess @ q.T
    rot = GraphJet(q @ jet.grad, 0.5 * (hess + hess.T))
    for l in range(n + 1):
        a, b = graphgeom.graph_s_l(jet, l), graphgeom.graph_s_l(rot, l)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_residual_examples():
    for r in np.linspace(0.01, 0.99, 25):
        jet = graphgeom.radial_jet(2, r, explicit_slope(r), explicit_ddu(r), [1.0, 2.0])
        assert abs(graphgeom.graph_residual(jet, 1)) < 1e-10
    for n in range(2, 7):
        for k in range(n):
            c = (k + 1) / (n - k)
            assert abs(graphgeom.graph_residual(GraphJet(np.zeros(n), c * np.eye(n)), k)) < 1e-14
    g = np.array([0.3, -0.4])
    with pytest.raises(ZeroDivisionError):
        # hess = 0 gives S_k = 0 for k >= 1
        graphgeom.graph_residual(GraphJet(g, np.zeros((2, 2))), 1)
    # k = 0 is defined: Q_0 = S_1 = 0, residual -1/W
    assert graphgeom.graph_residual(GraphJet(g, np.zeros((2, 2))), 0) == pytest.approx(-1 / np.sqrt(1.25))


@given(arrays(float, 3, elements=st.floats(-2, 2)), st.floats(0.05, 2), st.floats(-3, 3), st.floats(-4, 4))
def test_radial_jet_direction_irrelevant(direction, r, du, ddu):
    if np.linalg.norm(direction) < 1e-3:
        direction = np.array([0.0, 0.0, 1.0])
    a = graphgeom.principal_curvatures(graphgeom.radial_jet(3, r, du, ddu, direction))
    b = graphgeom.principal_curvatures(graphgeom.radial_jet(3, r, du, ddu))
    np.testing.assert_allclose(a, b, atol=1e-12 * max(1.0, np.max(np.abs(b))))
