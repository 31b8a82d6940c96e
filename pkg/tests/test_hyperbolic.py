import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import delaunay_instance
from decorated_conformal.errors import CirclesNotDisjointError, InconsistentAnglesError
from decorated_conformal.hyperbolic import (
    clausen2,
    heights,
    horoprism_volume,
    hyperbolic_radius,
    lambda_length,
    lobachevsky,
    volume_angles,
)
from decorated_conformal.metric import DecoratedMetric, inversive_distance
from decorated_conformal.power import triangle_power

# Lobachevsky(pi/6), the global maximum, and the regular ideal tetrahedron 3 Lobachevsky(pi/3)
LOB_PI_6 = 0.5074708
REGULAR_IDEAL = 1.0149416


def lob_quad(x):
    """Independent oracle: integrate -log|2 sin s| piecewise around its singularities."""
    n = math.floor(x / math.pi)
    r = x - n * math.pi
    # one full period integrates to zero
    val, _ = quad(lambda s: -math.log(abs(2 * math.sin(s))), 0.0, r, limit=200, epsabs=1e-14, epsrel=1e-14)
    return val


def test_heights_examples():
    m = DecoratedMetric({}, np.array([1.0, math.exp(-1), 0.0]))
    hv = heights(m)
    assert hv.h == pytest.approx([0.0, 1.0, 0.0], abs=1e-15)
    assert list(hv.eps) == [1, 1, 0]
    u = np.array([0.3, -0.2, 0.7])
    assert heights(m).h - heights(m, u).h == pytest.approx(u, abs=1e-15)


def test_lambda_length_examples():
    assert lambda_length(math.sqrt(6), 0, 0, 1, 1) == pytest.approx(math.acosh(2), abs=1e-12)
    assert lambda_length(math.sqrt(6), 0, 0, 1, 1) == pytest.approx(1.3169579, abs=1e-7)
    assert lambda_length(1.7, 0, 0, 0, 0) == pytest.approx(2 * math.log(1.7), abs=1e-15)
    assert lambda_length(2.0, 0, 0, 1, 0) == pytest.approx(math.log(3), abs=1e-15)


def test_lambda_length_rejects_overlap():
    with pytest.raises(CirclesNotDisjointError):
        lambda_length(1.5, 0, 0, 1, 1)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.01, 3.0))
def test_cosh_lambda_is_inversive_distance(ri, rj, gap):
    length = ri + rj + gap
    lam = lambda_length(length, -math.log(ri), -math.log(rj), 1, 1)
    assert math.cosh(lam) == pytest.approx(inversive_distance(length, ri, rj), rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 3), st.floats(-1, 1), st.floats(-1, 1), st.floats(-0.5, 0.5))
def test_lambda_shift_ideal_ends(length, hi, hj, c):
    # with two ideal ends raising h_i by c adds exactly c
    base = lambda_length(length, hi, hj, 0, 0)
    assert lambda_length(length, hi + c, hj, 0, 0) == pytest.approx(base + c, abs=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_lambda_invariant_under_conformal_change(seed):
    # lambda-lengths depend only on the hyperbolic surface, not on u
    from decorated_conformal.energy import edge_lambda_lengths
    from decorated_conformal.metric import conformal_apply

    rng = np.random.default_rng(seed)
    tri, m = delaunay_instance("torus", seed)
    u = rng.uniform(-0.05, 0.05, tri.n_vertices)
    lam0 = edge_lambda_lengths(tri, m, heights(m))
    lam1 = edge_lambda_lengths(tri, conformal_apply(tri, m, u), heights(m, u))
    for e in tri.edge_ids():
        assert lam1[e] == pytest.approx(lam0[e], abs=1e-12)


def test_hyperbolic_radius_examples():
    assert hyperbolic_radius(0.0, 1) == pytest.approx(math.log(1 + math.sqrt(2)), abs=1e-15)
    assert hyperbolic_radius(0.0, 0) == pytest.approx(math.log(2), abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.sampled_from([0, 1]))
def test_hyperbolic_radius_round_trip(h, eps):
    rho = hyperbolic_radius(h, eps)
    assert (math.exp(rho) - eps * math.exp(-rho)) / 2 == pytest.approx(math.exp(h), rel=1e-12)


def test_lobachevsky_special_values():
    assert lobachevsky(0.0) == 0.0
    assert lobachevsky(math.pi) == pytest.approx(0.0, abs=1e-15)
    assert lobachevsky(math.pi / 6) == pytest.approx(LOB_PI_6, abs=5e-8)
    assert lobachevsky(math.pi / 6) == pytest.approx(lob_quad(math.pi / 6), abs=1e-13)
    assert lobachevsky(math.pi / 2) == pytest.approx(0.0, abs=1e-15)


def test_lobachevsky_maximum_at_pi_6():
    x = np.linspace(0.01, math.pi / 2, 2001)
    assert x[np.argmax(lobachevsky(x))] == pytest.approx(math.pi / 6, abs=1e-3)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10))
def test_lobachevsky_odd_periodic(x):
    assert lobachevsky(-x) == pytest.approx(-lobachevsky(x), abs=1e-14)
    assert lobachevsky(x + math.pi) == pytest.approx(lobachevsky(x), abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, math.pi - 0.05))
def test_lobachevsky_derivative(x):
    h = 1e-5
    fd = (lobachevsky(x + h) - lobachevsky(x - h)) / (2 * h)
    assert fd == pytest.approx(-math.log(abs(2 * math.sin(x))), abs=1e-8)


def test_clausen_known_value():
    # Catalan's constant G = Cl2(pi/2)
    assert clausen2(math.pi / 2) == pytest.approx(0.915965594177219015, abs=1e-15)


def test_regular_ideal_tetrahedron():
    v = horoprism_volume([math.pi / 3] * 3, [math.pi / 3] * 3)
    assert v == pytest.approx(3 * lobachevsky(math.pi / 3), abs=1e-13)
    assert v == pytest.approx(REGULAR_IDEAL, abs=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 2), st.floats(0.5, 2), st.floats(0.1, 0.9), st.floats(0.0, 0.4))
def test_volume_angle_triples_and_symmetry(a, b, t, rho):
    from decorated_conformal.metric import face_corner_angles

    c = abs(a - b) + t * (a + b - abs(a - b))
    L = np.array([a, b, c])
    r = rho * min(a, b, c) * np.array([1.0, 0.5, 0.0])
    theta = face_corner_angles(L)
    tp = triangle_power((L[2], L[0], L[1]), r)
    alpha = tp.alpha[[1, 2, 0]]  # reorder (ij, jk, ki) to side-opposite-corner
    g, g1, g2, mu, nu = volume_angles(theta, alpha)
    assert g1.sum() == pytest.approx(math.pi, abs=1e-12)
    assert g2.sum() == pytest.approx(math.pi, abs=1e-12)
    assert g + mu + nu == pytest.approx(np.full(3, math.pi), abs=1e-12)
    vol = horoprism_volume(theta, alpha)
    assert vol > 0
    perm = [1, 2, 0]
    assert horoprism_volume(theta[perm], alpha[perm]) == pytest.approx(vol, abs=1e-12)


def test_inconsistent_angles():
    with pytest.raises(InconsistentAnglesError):
        horoprism_volume([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
