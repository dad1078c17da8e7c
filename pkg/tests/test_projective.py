import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arakelov.projective import (
    ProjectivePoint,
    ProjectiveSubspace,
    apply,
    fs_distance,
    fs_distance_to_subspace,
    random_unitary,
    sample_point,
    sample_points,
)
from arakelov.rng import RngState

S = 1 / math.sqrt(2)


@pytest.mark.parametrize("x, y, expected", [
    ([1, 0], [0, 1], 1.0),
    ([1, 1], [1, 1], 0.0),
    ([1, 0], [1, 1], S),
    ([1, 0, 0], [1j, 0, 0], 0.0),
])
def test_fs_distance_examples(x, y, expected):
    assert fs_distance(ProjectivePoint(x), ProjectivePoint(y)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("x, basis, expected", [
    ([0, 0, 1], [(1, 0, 0), (0, 1, 0)], 1.0),
    ([1, 0, 0], [(1, 0, 0), (0, 1, 0)], 0.0),
    ([1, 1, 0], [(1, 0, 0)], S),
])
def test_subspace_distance_examples(x, basis, expected):
    F = ProjectiveSubspace(tuple(basis), 2)
    assert fs_distance_to_subspace(ProjectivePoint(x), F) == pytest.approx(expected, abs=1e-15)


def test_errors():
    with pytest.raises(ValueError, match="dimension mismatch"):
        fs_distance(ProjectivePoint([1, 0]), ProjectivePoint([1, 0, 0]))
    with pytest.raises(ValueError):
        ProjectivePoint([0, 0])
    with pytest.raises(ValueError):
        ProjectiveSubspace(((1, 1, 0), (2, 2, 0)), 2)


def test_rational_points_keep_primitive_vector():
    p = ProjectivePoint.from_integers([6, -8])
    assert p.exact == (3, -4)
    assert np.linalg.norm(p.unit) == pytest.approx(1.0, abs=1e-14)


def test_sampling_is_deterministic():
    a = sample_point(1, RngState(7).spawn(3))
    b = sample_point(1, RngState(7).spawn(3))
    assert np.array_equal(a.unit, b.unit)


@pytest.mark.parametrize("t, expected", [(1, 1 / 2), (2, 1 / 3)])
def test_sampling_moments(t, expected):
    z = sample_points(t, 10**6, RngState(11).spawn(t))
    m = np.abs(z[:, 0]) ** 2
    assert abs(m.mean() - expected) <= 3 * m.std() / math.sqrt(m.size)


coord = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
vec3 = st.lists(coord, min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3)


@given(vec3, vec3, st.integers(0, 2**32 - 1))
def test_fs_identity_and_unitary_invariance(x, y, seed):
    px, py = ProjectivePoint(x), ProjectivePoint(y)
    d = fs_distance(px, py)
    assert d * d + abs(np.vdot(px.unit, py.unit)) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert fs_distance(py, px) == pytest.approx(d, abs=1e-12)
    u = random_unitary(3, RngState(seed))
    assert fs_distance(apply(u, px), apply(u, py)) == pytest.approx(d, abs=1e-10)


@given(vec3, vec3, vec3, st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_subspace_distance_is_minimum(x, a, b, lam):
    try:
        F = ProjectiveSubspace((tuple(a), tuple(b)), 2)
    except ValueError:
        return
    px = ProjectivePoint(x)
    dF = fs_distance_to_subspace(px, F)
    y = np.asarray(a) + lam * np.asarray(b)
    if np.linalg.norm(y) < 1e-6:
        return
    assert dF <= fs_distance(px, ProjectivePoint(y)) + 1e-12
