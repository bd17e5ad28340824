import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import greedy_lower_bound_line
from relaxfrechet.errors import InputError
from relaxfrechet.metric_core import (
    ArcSpace,
    EuclideanPoints,
    FiniteMatrix,
    covering_number,
    diameter,
    distance,
    dudley_report,
    load_matrix_csv,
    load_points_csv,
)

TWO = FiniteMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))


def shortest_arc(t1, t2):
    # angle between unit vectors via atan2, independent of the mod-2pi formula
    c1, s1, c2, s2 = np.cos(t1), np.sin(t1), np.cos(t2), np.sin(t2)
    return (2 / math.pi) * np.arctan2(np.abs(c1 * s2 - s1 * c2), c1 * c2 + s1 * s2)


def test_distance_examples():
    assert distance(TWO, 0, 1) == 1
    assert distance(EuclideanPoints(np.array([[0.0, 0.0], [3.0, 4.0]])), 0, 1) == 5
    arc = ArcSpace()
    assert arc.thetas[1] == pytest.approx(math.pi / 2)
    assert arc.thetas[-1] == pytest.approx(3 * math.pi / 2)
    assert distance(arc, 1, arc.size - 1) == pytest.approx(2.0, abs=1e-15)


def test_distance_rejects_bad_ids():
    with pytest.raises(InputError):
        distance(TWO, 0, 2)
    with pytest.raises(InputError):
        distance(TWO, -1, 0)


def test_diameter_examples():
    assert diameter(TWO, [0, 1]) == 1
    assert diameter(EuclideanPoints(np.array([0.0, 1.0, 3.0])), [0, 1, 2]) == 3
    with pytest.raises(InputError):
        diameter(TWO, [])


def test_arc_diameter_matches_brute_force():
    arc = ArcSpace()
    th = arc.thetas
    brute = shortest_arc(th[:, None], th[None, :]).max()
    assert diameter(arc, arc.all_ids()) == pytest.approx(brute, abs=1e-12)
    assert brute == pytest.approx(2.0, abs=1e-12)


def test_arc_distance_against_atan2_on_random_pairs():
    rng = np.random.default_rng(0)
    arc = ArcSpace(4001)
    a = rng.integers(0, arc.size, 1000)
    b = rng.integers(0, arc.size, 1000)
    got = np.array([arc.distance(i, j) for i, j in zip(a, b)])
    want = shortest_arc(arc.thetas[a], arc.thetas[b])
    assert np.max(np.abs(got - want)) < 1e-12


def test_arc_space_has_theta_pi_and_isolated_point():
    arc = ArcSpace()
    assert arc.thetas[0] == 0.0
    assert arc.thetas[arc.nearest_id(math.pi)] == pytest.approx(math.pi, abs=1e-15)
    # the isolated point is at distance 1 from both arc endpoints
    assert arc.distance(0, 1) == pytest.approx(1.0)
    assert arc.distance(0, arc.size - 1) == pytest.approx(1.0)


def test_covering_examples():
    assert covering_number(TWO, [0, 1], 0.5) == 2
    assert covering_number(TWO, [0, 1], 1.0) == 1
    grid = EuclideanPoints(np.linspace(0, 1, 101))
    n = covering_number(grid, grid.all_ids(), 0.05)
    assert 10 <= n <= 20
    assert n >= greedy_lower_bound_line(np.linspace(0, 1, 101), 0.05)


@given(
    pts=st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=40),
    eps=st.floats(0, 5),
)
def test_covering_bounds_on_the_line(pts, eps):
    space = EuclideanPoints(np.array(pts))
    n = covering_number(space, space.all_ids(), eps)
    exact = greedy_lower_bound_line(pts, eps)
    assert exact <= n <= len(pts)
    # a greedy net of radius eps is an eps-separated packing, hence at most N(eps/2)
    assert n <= greedy_lower_bound_line(pts, eps / 2) or eps == 0


@given(pts=st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=30))
def test_covering_monotone_and_one_above_diameter(pts):
    space = EuclideanPoints(np.array(pts))
    ids = space.all_ids()
    radii = np.linspace(0, 12, 25)
    counts = [covering_number(space, ids, r) for r in radii]
    assert all(a >= b for a, b in zip(counts, counts[1:]))
    assert covering_number(space, ids, diameter(space, ids)) == 1
    assert max(counts) <= len(pts)


def test_dudley_examples():
    single = EuclideanPoints(np.array([0.0]))
    rep = dudley_report(single, [0], [0.1, 0.2, 0.3])
    assert rep.counts == (1, 1, 1) and rep.dudley_integral == 0

    rep = dudley_report(TWO, [0, 1], [0.25, 0.5, 0.75, 1.0])
    assert rep.counts == (2, 2, 2, 1)
    s = math.sqrt(math.log(2))
    # trapezoid over the grid with sqrt(log N) = s, s, s, 0
    hand = 0.25 * (s + s) / 2 + 0.25 * (s + s) / 2 + 0.25 * (s + 0) / 2
    assert rep.dudley_integral == pytest.approx(hand, rel=1e-15)

    grid = EuclideanPoints(np.linspace(0, 1, 101))
    rep = dudley_report(grid, grid.all_ids(), np.linspace(0.01, 1.0, 50))
    assert 0 < rep.dudley_integral < math.inf
    assert all(a >= b for a, b in zip(rep.counts, rep.counts[1:]))
    assert rep.counts[-1] == 1


def test_dudley_rejects_unsorted_grid():
    with pytest.raises(InputError):
        dudley_report(TWO, [0, 1], [0.5, 0.25])
    with pytest.raises(InputError):
        dudley_report(TWO, [0, 1], [0.0, 0.25])


def random_metric(rng, n, dim=3):
    pts = rng.normal(size=(n, dim))
    return np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))


def test_finite_matrix_accepts_metric_and_checks_axioms_exhaustively():
    d = random_metric(np.random.default_rng(1), 300)
    space = FiniteMatrix(d)
    m = space.matrix
    assert np.all(np.diag(m) == 0)
    assert np.allclose(m, m.T)
    for k in range(0, 300, 7):
        assert np.all(m <= m[:, [k]] + m[[k], :] + 1e-12)


def test_finite_matrix_rejections_name_the_problem():
    with pytest.raises(InputError, match="triangle.*x=0, y=1, z=2"):
        FiniteMatrix(np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0.0]]))
    with pytest.raises(InputError, match="asymmetric"):
        FiniteMatrix(np.array([[0, 1], [2, 0.0]]))
    with pytest.raises(InputError, match="negative"):
        FiniteMatrix(np.array([[0, -1], [-1, 0.0]]))
    with pytest.raises(InputError, match="diagonal"):
        FiniteMatrix(np.array([[1, 1], [1, 0.0]]))
    with pytest.raises(InputError, match="non-finite"):
        FiniteMatrix(np.array([[0, np.inf], [np.inf, 0.0]]))


def test_large_matrix_uses_sampled_triples():
    d = random_metric(np.random.default_rng(2), 600)
    FiniteMatrix(d)
    bad = d.copy()
    bad[:, 0] *= 50
    bad[0, :] *= 50
    bad[0, 0] = 0
    with pytest.raises(InputError, match="triangle"):
        FiniteMatrix(bad)


def test_csv_loaders(tmp_path):
    f = tmp_path / "m.csv"
    f.write_text("0,1\n1,0\n")
    assert load_matrix_csv(f).size == 2
    g = tmp_path / "p.csv"
    g.write_text("0,0\n3,4\n")
    assert load_points_csv(g).distance(0, 1) == 5
    h = tmp_path / "bad.csv"
    h.write_text("0,1\n1,x\n")
    with pytest.raises(InputError, match="row 2"):
        load_matrix_csv(h)
    r = tmp_path / "ragged.csv"
    r.write_text("0,1\n1\n")
    with pytest.raises(InputError, match="row 2"):
        load_points_csv(r)
