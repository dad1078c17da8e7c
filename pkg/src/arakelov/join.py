"""Joins of points and zero-cycles of ``P^t`` inside ``P^{2t+1}``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cycles import ZeroCycle, rational_representative
from .forms import DEFAULT_SAMPLES
from .heights import height_join, height_subspace, height_zero_cycle, stoll
from .projective import ProjectivePoint, ProjectiveSubspace, fs_distance, fs_distance_to_subspace
from .rng import RngState


@dataclass(frozen=True, eq=False)
class JoinLine:
    """The line ``{[λx : μy]}`` spanned by ``(x, 0)`` and ``(0, y)``."""

    x: ProjectivePoint
    y: ProjectivePoint

    def __post_init__(self):
        if self.x.t != self.y.t:
            raise ValueError("dimension mismatch")

    @property
    def t_join(self) -> int:
        return 2 * self.x.t + 1

    @property
    def generators(self) -> tuple[np.ndarray, np.ndarray]:
        z = np.zeros(self.x.t + 1, dtype=complex)
        return np.concatenate([self.x.unit, z]), np.concatenate([z, self.y.unit])

    @property
    def span(self) -> ProjectiveSubspace:
        a, b = self.generators
        return ProjectiveSubspace((tuple(a), tuple(b)), self.t_join)


def join_points(x: ProjectivePoint, y: ProjectivePoint) -> JoinLine:
    return JoinLine(x, y)


def join_zero_cycles(X: ZeroCycle, Y: ZeroCycle) -> list[tuple[JoinLine, int]]:
    """All lines ``x # y`` with multiplicity ``n_x n_y``."""
    if X.t != Y.t:
        raise ValueError("dimension mismatch")
    return [(JoinLine(x, y), m * n) for x, m in X.points for y, n in Y.points]


def diagonal(theta: ProjectivePoint) -> ProjectivePoint:
    """Unit representative ``(θ̂, θ̂)/√2`` of ``(θ, θ)``."""
    return ProjectivePoint(np.concatenate([theta.unit, theta.unit]) / math.sqrt(2))


def join_distance(x: ProjectivePoint, y: ProjectivePoint, theta: ProjectivePoint, tol: float = 1e-10) -> float:
    """``|x # y, (θ, θ)|``; lies between ``min`` and ``max`` of ``|θ,x|, |θ,y|``."""
    if fs_distance(x, theta) <= tol or fs_distance(y, theta) <= tol:
        raise ValueError("x and y must differ from theta")
    return fs_distance_to_subspace(diagonal(theta), JoinLine(x, y).span)


def _integral_vector(p: ProjectivePoint) -> tuple[int, ...]:
    return p.exact if p.exact is not None else rational_representative(p)


@dataclass(frozen=True)
class JoinHeightCheck:
    measured: float
    formula: float
    residual: float
    std_error: float


def join_height_measured(X: ZeroCycle, Y: ZeroCycle) -> float:
    """``sum n_x n_y (h(P(Zv + Zw)) - σ_1)`` over integral lines ``(v,0), (0,w)``.

    The ``σ_1`` offset removes the Stoll term of a projective line, so the
    join of two points of height 0 has height 0.
    """
    s1 = float(stoll(1))
    total = 0.0
    for line, m in join_zero_cycles(X, Y):
        v, w = _integral_vector(line.x), _integral_vector(line.y)
        z = (0,) * len(v)
        total += m * (height_subspace([tuple(v) + z, z + tuple(w)]) - s1)
    return total


def join_height_check(X: ZeroCycle, Y: ZeroCycle, rng: RngState, n_samples: int = DEFAULT_SAMPLES,
                      jobs: int = 1) -> JoinHeightCheck:
    """Compare the measured join height with ``deg X h(Y) + deg Y h(X)``,
    the factor heights coming from the Chow-form integral."""
    hx = height_zero_cycle(X, rng.spawn(0), n_samples, jobs)
    hy = height_zero_cycle(Y, rng.spawn(1), n_samples, jobs)
    formula = height_join(X.degree, hx.value, Y.degree, hy.value)
    std = math.hypot(Y.degree * hx.std_error, X.degree * hy.std_error)
    measured = join_height_measured(X, Y)
    return JoinHeightCheck(measured, formula, abs(measured - formula), std)
