import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import delaunay_instance
from decorated_conformal.delaunay import (
    DecoratedQuad,
    conformal_path,
    edge_weight_report,
    flip_algorithm,
    flip_diagonal_length,
    is_weighted_delaunay,
    local_delaunay_margin,
    non_flat_edges,
    quad_alpha_sum,
)
from decorated_conformal.errors import FlipCapError, NotFlippableError
from decorated_conformal.instances import grid_torus, lattice_torus, metric_from_side_lengths, random_torus
from decorated_conformal.power import triangle_power

SQRT3 = math.sqrt(3)


def quad_from_points(i, j, k, l, radii=(0, 0, 0, 0)):
    """Quad ijk | jil from planar points, k left of i->j and l right."""
    i, j, k, l = (np.asarray(p, dtype=float) for p in (i, j, k, l))
    d = np.linalg.norm
    return DecoratedQuad(d(j - i), d(k - j), d(i - k), d(l - i), d(j - l), *radii)


def circumcircle_margin(i, j, k, l):
    """Oracle for r = 0: signed circumcenter distances to the line ij, summed."""

    def center(a, b, c):
        a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
        A = 2 * np.array([b - a, c - a])
        rhs = np.array([b @ b - a @ a, c @ c - a @ a])
        return np.linalg.solve(A, rhs)

    i, j = np.asarray(i, float), np.asarray(j, float)
    t = (j - i) / np.linalg.norm(j - i)
    nrm = np.array([-t[1], t[0]])  # left normal of i->j
    dk = (center(i, j, k) - i) @ nrm
    dl = -((center(i, j, l) - i) @ nrm)
    return dk + dl


def test_equilateral_pair_margin():
    q = DecoratedQuad(1, 1, 1, 1, 1)
    assert local_delaunay_margin(q) == pytest.approx(1 / SQRT3, abs=1e-15)
    assert quad_alpha_sum(q) == pytest.approx(2 * math.pi / 3, abs=1e-15)


def test_square_is_cocircular():
    q = quad_from_points((0, 0), (1, 1), (0, 1), (1, 0))
    assert local_delaunay_margin(q) == pytest.approx(0.0, abs=1e-15)
    assert quad_alpha_sum(q) == pytest.approx(math.pi, abs=1e-15)


def test_kite_short_diagonal():
    pts = ((0, 0), (1, 0), (0.5, 3.0), (0.5, -0.1))
    q = quad_from_points(*pts)
    # circumcenters at heights 35/24 and 1.2 on opposite sides of ij
    assert circumcircle_margin(*pts) == pytest.approx(31 / 120, abs=1e-14)
    assert local_delaunay_margin(q) == pytest.approx(31 / 120, abs=1e-14)


def test_kite_long_diagonal_violates():
    # the long axis of the same kite is not Delaunay
    pts = ((0.5, -0.1), (0.5, 3.0), (0, 0), (1, 0))
    q = quad_from_points(*pts)
    expected = circumcircle_margin(*pts)
    assert expected < 0
    assert local_delaunay_margin(q) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize(
    "quad,expected",
    [
        (DecoratedQuad(math.sqrt(2), 1, 1, 1, 1), math.sqrt(2)),
        (DecoratedQuad(1, 1, 1, 1, 1), SQRT3),
    ],
)
def test_flip_lengths(quad, expected):
    assert flip_diagonal_length(quad) == pytest.approx(expected, abs=1e-15)


def test_double_flip_restores_length():
    tri, m = delaunay_instance("torus", 3)
    e = tri.edge_ids()[0]
    length = m.lengths[e]
    t2 = tri.copy()
    m2 = m.copy()
    e2 = t2.flip_edge(e)
    m2.lengths[e2] = flip_diagonal_length(DecoratedQuad.from_edge(tri, m, e))
    back = flip_diagonal_length(DecoratedQuad.from_edge(t2, m2, e2))
    assert back == pytest.approx(length, rel=1e-12)


def test_nonconvex_quad_not_flippable():
    # reflex corner at j
    q = quad_from_points((0, 0), (1, 0), (1.2, 0.5), (1.2, -0.5))
    with pytest.raises(NotFlippableError):
        flip_diagonal_length(q)


@st.composite
def random_quads(draw):
    k = (draw(st.floats(-0.5, 1.5)), draw(st.floats(0.1, 2.0)))
    l = (draw(st.floats(-0.5, 1.5)), -draw(st.floats(0.1, 2.0)))
    q = quad_from_points((0, 0), (1, 0), k, l)
    short = min(q.l_ij, q.l_jk, q.l_ki, q.l_il, q.l_lj)
    rad = [draw(st.sampled_from([0.0, 1.0])) * draw(st.floats(0.0, 0.45)) * short for _ in range(4)]
    return DecoratedQuad(q.l_ij, q.l_jk, q.l_ki, q.l_il, q.l_lj, *rad)


@settings(max_examples=200, deadline=None)
@given(random_quads())
def test_three_criteria_agree(q):
    m = local_delaunay_margin(q)
    a = quad_alpha_sum(q)
    pk = triangle_power(*q.triangle_k())
    pl = triangle_power(*q.triangle_l())
    w = 1 / math.tan(pk.alpha[0]) + 1 / math.tan(pl.alpha[0])
    if abs(m) < 1e-9:
        return
    assert (m > 0) == (a < math.pi) == (w > 0)


def test_flip_algorithm_noop_on_delaunay():
    tri, m = lattice_torus()
    res = flip_algorithm(tri, m)
    assert res.n_flips == 0


def test_long_diagonal_torus():
    # basis (1, 0), (2, 3) spans the lattice of a 1 x 3 rectangle
    tri, m = lattice_torus((1.0, 0.0), (2.0, 3.0))
    assert not is_weighted_delaunay(tri, m)
    res = flip_algorithm(tri, m)
    assert res.n_flips > 0
    assert res.report.min_margin() >= -1e-12
    lengths = sorted(res.metric.lengths.values())
    assert lengths == pytest.approx([1.0, 3.0, math.sqrt(10)], abs=1e-12)
    res.triangulation.check()


@pytest.mark.parametrize("seed", range(8))
def test_random_torus_becomes_delaunay(seed):
    tri, m = random_torus(np.random.default_rng(seed), p=3, q=3, jitter=0.3, noise=0.1)
    res = flip_algorithm(tri, m)
    assert res.report.min_margin() >= -1e-12
    assert res.metric.radii is not m.radii
    assert np.array_equal(res.metric.radii, m.radii)
    # surviving edges keep their lengths
    for e in set(tri.edge_ids()) & set(res.triangulation.edge_ids()):
        assert res.metric.lengths[e] == m.lengths[e]


def test_flip_cap():
    tri, m = lattice_torus((1.0, 0.0), (2.0, 3.0))
    with pytest.raises(FlipCapError):
        flip_algorithm(tri, m, max_flips=0)


def test_fixed_edges_never_flipped():
    tri, m = lattice_torus((1.0, 0.0), (2.0, 3.0))
    res = flip_algorithm(tri, m, fixed=frozenset(tri.edge_ids()))
    assert res.n_flips == 0


def test_square_torus_flat_diagonal():
    tri, m = lattice_torus()
    rep = edge_weight_report(tri, m)
    assert rep.flat_edges() == [1]
    assert non_flat_edges(rep) == {0, 2}
    assert rep.weight[rep.index(1)] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("radius", [0.0, 0.2])
def test_refinements_share_tessellation(radius):
    tri, side = grid_torus(3, 2)
    m = metric_from_side_lengths(tri, side, np.full(tri.n_vertices, radius))
    rep = edge_weight_report(tri, m)
    flat = rep.flat_edges()
    assert len(flat) == 6
    t2, m2 = tri.copy(), m.copy()
    for e in flat[:3]:
        q = DecoratedQuad.from_edge(t2, m2, e)
        e2 = t2.flip_edge(e)
        del m2.lengths[e]
        m2.lengths[e2] = flip_diagonal_length(q)
    rep2 = edge_weight_report(t2, m2)
    assert rep2.min_margin() >= -1e-12
    assert non_flat_edges(rep2) == non_flat_edges(rep)


@pytest.mark.parametrize("seed", range(4))
def test_generic_metric_has_no_flat_edges(seed):
    tri, m = delaunay_instance("torus", seed)
    rep = edge_weight_report(tri, m)
    assert rep.flat_edges() == []


def sorted_nonflat_lengths(res):
    keep = non_flat_edges(res.report, 1e-8)
    return sorted(res.metric.lengths[e] for e in keep)


@pytest.mark.parametrize("seed", range(6))
def test_conformal_path_is_path_independent(seed):
    rng = np.random.default_rng(seed)
    tri, m = delaunay_instance("torus", seed)
    u = rng.uniform(-0.4, 0.4, tri.n_vertices)
    v = rng.uniform(-0.4, 0.4, tri.n_vertices)
    direct = conformal_path(tri, m, u + v)
    first = conformal_path(tri, m, u)
    two = conformal_path(first.triangulation, first.metric, v)
    assert direct.report.min_margin() >= -1e-12
    assert sorted_nonflat_lengths(two) == pytest.approx(sorted_nonflat_lengths(direct), rel=1e-10)
    assert two.metric.radii == pytest.approx(direct.metric.radii, rel=1e-12)


def test_conformal_path_round_trip():
    rng = np.random.default_rng(7)
    tri, m = delaunay_instance("torus", 7)
    u = rng.uniform(-0.5, 0.5, tri.n_vertices)
    there = conformal_path(tri, m, u)
    back = conformal_path(there.triangulation, there.metric, -u)
    start = flip_algorithm(tri, m)
    assert sorted_nonflat_lengths(back) == pytest.approx(sorted_nonflat_lengths(start), rel=1e-10)


def test_conformal_path_zero_step():
    tri, m = delaunay_instance("sphere", 2, n=6)
    res = conformal_path(tri, m, np.zeros(tri.n_vertices))
    assert res.n_flips == 0
    assert res.metric.lengths == m.lengths
