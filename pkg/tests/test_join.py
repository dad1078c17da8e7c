import math

import numpy as np
import pytest

from arakelov.cycles import ZeroCycle
from arakelov.heights import height_point
from arakelov.join import (
    JoinLine,
    diagonal,
    join_distance,
    join_height_check,
    join_height_measured,
    join_points,
    join_zero_cycles,
)
from arakelov.projective import ProjectivePoint, ProjectiveSubspace, fs_distance, fs_distance_to_subspace, sample_point
from arakelov.rng import RngState

pt = ProjectivePoint.from_integers
S = 1 / math.sqrt(2)


def same_span(line: JoinLine, basis):
    F = ProjectiveSubspace(tuple(basis), line.t_join)
    return all(fs_distance_to_subspace(ProjectivePoint(v), F) < 1e-14 for v in line.generators)


@pytest.mark.parametrize("x, y, basis", [
    ([1, 0], [1, 0], [(1, 0, 0, 0), (0, 0, 1, 0)]),
    ([1, 0], [0, 1], [(1, 0, 0, 0), (0, 0, 0, 1)]),
    ([1, 1], [1, 0], [(S, S, 0, 0), (0, 0, 1, 0)]),
])
def test_join_points_examples(x, y, basis):
    line = join_points(pt(x), pt(y))
    assert line.t_join == 3
    assert same_span(line, basis)


def test_join_zero_cycle_multiplicities():
    X = ZeroCycle.from_integer_points([1, 0], [1, 1])
    Y = ZeroCycle.from_integer_points([0, 1], [1, 2], [3, 1])
    lines = join_zero_cycles(X, Y)
    assert len(lines) == 6 and sum(m for _, m in lines) == X.degree * Y.degree
    lines = join_zero_cycles(ZeroCycle.from_integer_points(([1, 0], 2)), ZeroCycle.from_integer_points(([0, 1], 3)))
    assert [m for _, m in lines] == [6]


def test_join_distance_examples():
    theta = pt([1, 0])
    assert join_distance(pt([0, 1]), pt([1, 1]), theta) == pytest.approx(math.sqrt(3) / 2, abs=1e-14)
    other = pt([3, 4])
    d = fs_distance(theta, other)
    assert join_distance(other, other, theta) == pytest.approx(d, abs=1e-14)
    with pytest.raises(ValueError):
        join_distance(pt([1, 0]), pt([0, 1]), theta)


def test_join_distance_sandwich_and_symmetry():
    rng = RngState(21)
    for i in range(1000):
        t = 1 + i % 3
        x, y, th = (sample_point(t, rng.spawn(i, k)) for k in range(3))
        d = join_distance(x, y, th)
        a, b = fs_distance(th, x), fs_distance(th, y)
        assert min(a, b) - 1e-12 <= d <= max(a, b) + 1e-12
        assert join_distance(y, x, th) == pytest.approx(d, abs=1e-12)


def test_diagonal_is_unit():
    th = sample_point(2, RngState(3))
    assert np.linalg.norm(diagonal(th).unit) == pytest.approx(1.0, abs=1e-14)


def test_join_height_examples():
    assert join_height_measured(ZeroCycle.from_integer_points([0, 1]), ZeroCycle.from_integer_points([1, 0])) == \
        pytest.approx(0.0, abs=1e-15)
    X, Y = ZeroCycle.from_integer_points([3, 4]), ZeroCycle.from_integer_points([0, 1])
    assert join_height_measured(X, Y) == pytest.approx(math.log(5), abs=1e-14)
    chk = join_height_check(X, Y, RngState(1), 2 * 10**5)
    assert chk.formula == pytest.approx(math.log(5), abs=5e-3)
    assert chk.residual <= 5e-3


def test_join_height_exact_for_rational_points():
    # measured height of a join of two rational points is h(v) + h(w)
    gen = np.random.default_rng(5)
    for _ in range(20):
        v, w = (tuple(int(c) for c in gen.integers(-9, 10, size=3)) for _ in range(2))
        if not any(v) or not any(w):
            continue
        X, Y = ZeroCycle.from_integer_points(v), ZeroCycle.from_integer_points(w)
        expected = height_point(X.points[0][0].exact) + height_point(Y.points[0][0].exact)
        assert join_height_measured(X, Y) == pytest.approx(expected, abs=1e-12)


def test_join_height_degree_two():
    X = ZeroCycle.from_integer_points([1, 2], [5, -1])
    Y = ZeroCycle.from_integer_points([2, 3])
    chk = join_height_check(X, Y, RngState(2), 2 * 10**5)
    assert chk.residual <= 5e-3 * X.degree * Y.degree
