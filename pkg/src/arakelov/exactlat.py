"""Exact rational linear algebra, lattice covolumes and integral LLL reduction.

Everything here works over Python integers and :class:`fractions.Fraction`,
so results are exact; the price is speed, which is acceptable for the small
dimensions (rank up to a few dozen) used in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

BigRational = Fraction


class DegenerateBasisError(ValueError):
    """Raised when basis vectors are linearly dependent."""

    def __init__(self, msg: str = "degenerate basis"):
        super().__init__(msg)


@dataclass(frozen=True)
class LatticeBasis:
    """Row-major integer basis of a sublattice of ``Z^ambient_dim``."""

    ambient_dim: int
    vectors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be positive")
        if not 1 <= len(self.vectors) <= self.ambient_dim:
            raise ValueError("need between 1 and ambient_dim vectors")
        for v in self.vectors:
            if len(v) != self.ambient_dim:
                raise ValueError("vector length does not match ambient_dim")
            if not all(isinstance(c, int) for c in v):
                raise TypeError("lattice vectors must have integer entries")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "LatticeBasis":
        rows = [tuple(int(c) for c in r) for r in rows]
        if not rows:
            raise ValueError("empty basis")
        return cls(len(rows[0]), tuple(rows))

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self):
        return len(self.vectors)


def _as_basis(basis) -> LatticeBasis:
    if isinstance(basis, LatticeBasis):
        return basis
    return LatticeBasis.from_rows(basis)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of a square integer matrix."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rational_det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant of a square matrix with rational entries (Gaussian elimination)."""
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            if a[i][k]:
                r = a[i][k] / a[k][k]
                a[i] = [x - r * y for x, y in zip(a[i], a[k])]
    return det


def gram_matrix(basis) -> list[list[int]]:
    b = _as_basis(basis)
    return [[dot(u, v) for v in b.vectors] for u in b.vectors]


def gram_det(basis) -> Fraction:
    """Return ``det(G G^T)`` for the basis matrix ``G``; strictly positive."""
    d = bareiss_det(gram_matrix(basis))
    if d <= 0:
        raise DegenerateBasisError()
    return Fraction(d)


def covolume_log(basis) -> float:
    """Logarithm of the covolume, ``0.5 * log(gram_det)``.

    Computed from the exact integer so that huge determinants do not overflow.
    """
    d = gram_det(basis)
    return 0.5 * _log_fraction(d)


def _log_fraction(q: Fraction) -> float:
    return _log_int(q.numerator) - _log_int(q.denominator)


def _log_int(n: int) -> float:
    if n <= 0:
        raise ValueError("log of non-positive integer")
    bits = n.bit_length()
    if bits < 1000:
        return math.log(n)
    shift = bits - 53
    return math.log(n >> shift) + shift * math.log(2.0)


def rank(vectors: Sequence[Sequence]) -> int:
    return len(row_reduce(vectors)[1])


def row_reduce(vectors: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q. Returns (nonzero rows, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in vectors]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def orthogonal_complement(subspace: Sequence[Sequence], ambient_dim: int) -> list[list[Fraction]]:
    """Rational basis of the Euclidean orthogonal complement of ``span(subspace)``.

    The complement of a rational subspace is the kernel of the matrix whose rows
    are the spanning vectors, so we read it off the reduced row echelon form.
    """
    vecs = [list(v) for v in subspace]
    for v in vecs:
        if len(v) != ambient_dim:
            raise ValueError("vector length does not match ambient_dim")
    rows, pivots = row_reduce(vecs) if vecs else ([], [])
    if len(rows) != len(vecs):
        raise DegenerateBasisError("dependent input vectors")
    free = [c for c in range(ambient_dim) if c not in pivots]
    out = []
    for fc in free:
        v = [Fraction(0)] * ambient_dim
        v[fc] = Fraction(1)
        for row, pc in zip(rows, pivots):
            v[pc] = -row[fc]
        out.append(v)
    return out


def integer_primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (first nonzero entry positive)."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        raise ValueError("zero vector")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def saturation_index(basis) -> int:
    """Index of the lattice in its saturation: gcd of the maximal minors.

    This equals the product of the Smith invariants of the basis matrix.
    """
    b = _as_basis(basis)
    k, n = b.rank, b.ambient_dim
    g = 0
    for cols in combinations(range(n), k):
        m = bareiss_det([[row[c] for c in cols] for row in b.vectors])
        g = math.gcd(g, m)
        if g == 1:
            return 1
    if g == 0:
        raise DegenerateBasisError()
    return g


def saturate(basis) -> LatticeBasis:
    """Basis of ``span_Q(basis) ∩ Z^n``.

    Computed as the integer kernel of an integral basis of the orthogonal
    complement, extracted with LLL from the embedding ``[I | N * K^T]``.
    """
    b = _as_basis(basis)
    n, k = b.ambient_dim, b.rank
    if saturation_index(b) == 1:
        return b
    comp = [integer_primitive(v) for v in orthogonal_complement(b.vectors, n)]
    if not comp:
        return LatticeBasis(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
    weight = 1 + sum(abs(x) for row in b.vectors for x in row) ** 2
    rows = []
    for i in range(n):
        rows.append(tuple(int(i == j) for j in range(n)) + tuple(weight * c[i] for c in comp))
    red = lll_reduce(LatticeBasis.from_rows(rows))
    kernel = [v[:n] for v in red.vectors if all(x == 0 for x in v[n:])]
    if len(kernel) != k:
        raise ArithmeticError("saturation failed")
    return LatticeBasis(n, tuple(tuple(v) for v in kernel))


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b for b > 0; halves round up."""
    return (2 * a + b) // (2 * b)


def lll_reduce(basis, delta=Fraction(99, 100)) -> LatticeBasis:
    """LLL-reduce an integer basis with exact integral Gram-Schmidt data.

    Integral variant (Cohen, Algorithm 2.6.7): tracks the Gram determinants
    ``d_i`` and the scaled coefficients ``lambda_ij = d_j mu_ij``, all integers.
    """
    b = _as_basis(basis)
    if not isinstance(delta, Fraction):
        delta = Fraction(str(delta))
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    vecs = [list(v) for v in b.vectors]
    n = len(vecs)
    if n == 1:
        if not any(vecs[0]):
            raise DegenerateBasisError()
        return b
    dnum, dden = delta.numerator, delta.denominator
    d = [0] * (n + 1)  # d[0] = 1, d[i] is the Gram determinant of the first i vectors
    d[0] = 1
    lam = [[0] * n for _ in range(n)]

    def gs_row(k: int):
        for j in range(k + 1):
            u = dot(vecs[k], vecs[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise DegenerateBasisError()
                d[k + 1] = u

    def red(k: int, l: int):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = _round_div(lam[k][l], d[l + 1])
            vecs[k] = [x - q * y for x, y in zip(vecs[k], vecs[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k: int, kmax: int):
        vecs[k], vecs[k - 1] = vecs[k - 1], vecs[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        bb = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (bb * t + lm * lam[i][k]) // d[k + 1]
        d[k] = bb

    gs_row(0)
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            gs_row(k)
        while True:
            red(k, k - 1)
            # Lovász: d_k d_{k-2} >= delta d_{k-1}^2 - lambda^2 (1-based)
            lhs = dden * d[k + 1] * d[k - 1]
            rhs = dnum * d[k] * d[k] - dden * lam[k][k - 1] ** 2
            if lhs < rhs:
                swap(k, kmax)
                k = max(1, k - 1)
            else:
                break
        for l in range(k - 2, -1, -1):
            red(k, l)
        k += 1
    return LatticeBasis(b.ambient_dim, tuple(tuple(v) for v in vecs))


def gram_schmidt(vectors: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Exact Gram-Schmidt; returns (orthogonal vectors, mu coefficients)."""
    star: list[list[Fraction]] = []
    n = len(vectors)
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i, v in enumerate(vectors):
        w = [Fraction(x) for x in v]
        for j in range(i):
            denom = dot(star[j], star[j])
            mu[i][j] = Fraction(dot(v, star[j])) / denom
            w = [a - mu[i][j] * c for a, c in zip(w, star[j])]
        star.append(w)
    return star, mu


def is_lll_reduced(basis, delta=Fraction(99, 100)) -> bool:
    """Check size reduction and the Lovász condition exactly."""
    b = _as_basis(basis)
    if not isinstance(delta, Fraction):
        delta = Fraction(str(delta))
    star, mu = gram_schmidt(b.vectors)
    n = b.rank
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, n):
        if dot(star[k], star[k]) < (delta - mu[k][k - 1] ** 2) * dot(star[k - 1], star[k - 1]):
            return False
    return True
