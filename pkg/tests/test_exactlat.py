import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arakelov.exactlat import (
    DegenerateBasisError,
    LatticeBasis,
    covolume_log,
    gram_det,
    is_lll_reduced,
    lll_reduce,
    orthogonal_complement,
    row_reduce,
    saturate,
    saturation_index,
)


def shortest_norm_sq(basis, box=4):
    """Exhaustive enumeration oracle over small coefficient vectors."""
    best = None
    for coeffs in itertools.product(range(-box, box + 1), repeat=len(basis)):
        if not any(coeffs):
            continue
        v = [sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(len(basis[0]))]
        n = sum(x * x for x in v)
        best = n if best is None else min(best, n)
    return best


@pytest.mark.parametrize("rows, expected", [
    ([(1, 0), (0, 1)], 1),
    ([(2, 0), (0, 3)], 36),
    ([(1, 1), (0, 2)], 4),
])
def test_gram_det_examples(rows, expected):
    assert gram_det(LatticeBasis.from_rows(rows)) == expected


@pytest.mark.parametrize("rows, expected", [
    ([(1, 0), (0, 1)], 0.0),
    ([(3, 4)], math.log(5)),
    ([(1, 1), (0, 2)], math.log(2)),
])
def test_covolume_log_examples(rows, expected):
    assert covolume_log(LatticeBasis.from_rows(rows)) == pytest.approx(expected, abs=1e-15)


def test_dependent_rows_raise():
    with pytest.raises(DegenerateBasisError, match="degenerate basis"):
        gram_det(LatticeBasis.from_rows([(1, 2), (2, 4)]))
    with pytest.raises(DegenerateBasisError):
        lll_reduce(LatticeBasis.from_rows([(1, 2, 3), (2, 4, 6)]))


def test_lll_examples():
    assert lll_reduce(LatticeBasis.from_rows([(1, 0), (0, 1)])).vectors == ((1, 0), (0, 1))
    red = lll_reduce(LatticeBasis.from_rows([(1, 1), (2, 1)]))
    assert min(sum(x * x for x in v) for v in red.vectors) == 1
    assert abs(gram_det(red)) == 1
    red = lll_reduce(LatticeBasis.from_rows([(201, 0), (200, 1)]))
    assert sum(x * x for x in red.vectors[0]) <= 2
    assert shortest_norm_sq([(201, 0), (200, 1)], box=3) == 2


def test_covolume_of_huge_entries_stays_finite():
    b = LatticeBasis.from_rows([(10**200, 1), (3, 10**180)])
    assert covolume_log(b) == pytest.approx(380 * math.log(10), rel=1e-12)


int_rows = st.lists(st.lists(st.integers(-30, 30), min_size=3, max_size=3), min_size=1, max_size=3)


def _independent(rows):
    return rows and row_reduce(rows)[1].__len__() == len(rows)


@given(int_rows, st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_gram_det_unimodular_invariance(rows, entries):
    if not _independent(rows):
        return
    k = len(rows)
    # upper unitriangular times lower unitriangular is unimodular
    up = [[1 if i == j else (entries[3 * i + j] if j > i else 0) for j in range(k)] for i in range(k)]
    lo = [[1 if i == j else (entries[3 * j + i] if j < i else 0) for j in range(k)] for i in range(k)]
    u = (np.array(up, dtype=object) @ np.array(lo, dtype=object)).tolist()
    new = [[sum(u[i][m] * rows[m][c] for m in range(k)) for c in range(3)] for i in range(k)]
    assert gram_det(LatticeBasis.from_rows(new)) == gram_det(LatticeBasis.from_rows(rows))


@given(int_rows)
def test_lll_preserves_covolume_and_is_reduced(rows):
    if not _independent(rows):
        return
    b = LatticeBasis.from_rows(rows)
    red = lll_reduce(b)
    assert gram_det(red) == gram_det(b)
    assert is_lll_reduced(red)
    n = b.rank
    # first-vector bound 2^{(n-1)/2} covol^{1/n}, squared
    assert sum(x * x for x in red.vectors[0]) ** n <= 2 ** (n * (n - 1)) * gram_det(b) * (1 + 1e-12)


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=4))
def test_rank_one_covolume_is_norm(v):
    if not any(v):
        return
    assert covolume_log(LatticeBasis.from_rows([v])) == pytest.approx(0.5 * math.log(sum(x * x for x in v)))


@pytest.mark.parametrize("sub, dim, expected", [
    ([(1, 0)], 2, [(0, 1)]),
    ([(1, 1)], 2, [(1, -1)]),
    ([(1, 0, 0), (0, 1, 0)], 3, [(0, 0, 1)]),
])
def test_orthogonal_complement_examples(sub, dim, expected):
    comp = orthogonal_complement(sub, dim)
    assert len(comp) == len(expected)
    # same span: stacking does not raise the rank
    assert len(row_reduce(list(comp) + list(expected))[1]) == len(expected)
    for c in comp:
        for s in sub:
            assert sum(Fraction(a) * b for a, b in zip(c, s)) == 0


@given(int_rows)
def test_complement_of_complement(rows):
    if not _independent(rows) or len(rows) == 3:
        return
    back = orthogonal_complement(orthogonal_complement(rows, 3), 3)
    assert len(back) == len(rows)
    assert len(row_reduce(list(back) + [list(map(Fraction, r)) for r in rows])[1]) == len(rows)


def test_orthogonal_complement_dependent_input():
    with pytest.raises(ValueError):
        orthogonal_complement([(1, 1), (2, 2)], 2)


def test_saturation():
    b = LatticeBasis.from_rows([(2, 0, 0), (0, 3, 3)])
    assert saturation_index(b) == 6
    s = saturate(b)
    assert saturation_index(s) == 1
    assert gram_det(s) * 36 == gram_det(b)
