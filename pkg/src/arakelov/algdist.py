"""Algebraic distances of a point to a cycle.

Three realizations: the evaluation identity for divisors
(``log|f(θ̂)| - ∫log|f| - (D/2) H_t``), multiplicity-weighted sums of log
Fubini-Study distances for zero-cycles, and the infimum of the latter over
lines through the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .cycles import Divisor, ZeroCycle, intersect_divisor_with_line, roots_of_binary
from .forms import DEFAULT_SAMPLES, HomogeneousForm, MCEstimate, harmonic, log_integral
from .projective import ProjectivePoint, ProjectiveSubspace, fs_distance, fs_distance_to_subspace, orthonormal_complement
from .rng import RngState

ON_CYCLE_TOL = 1e-10
GOLDEN_ITERATIONS = 100
_PHI = (math.sqrt(5) - 1) / 2


class PointOnCycleError(ValueError):
    def __init__(self, msg: str = "point on cycle"):
        super().__init__(msg)


@dataclass(frozen=True)
class DistanceReport:
    value: float
    method: str
    witness: ProjectiveSubspace | None = None
    std_error: float = 0.0

    def __iter__(self):
        return iter((self.value, self.std_error))

    def to_json(self) -> dict:
        out = {"value": self.value, "method": self.method, "std_error": self.std_error}
        if self.witness is not None:
            out["witness"] = [[[complex(c).real, complex(c).imag] for c in v] for v in self.witness.basis]
        return out


def _as_form(X) -> HomogeneousForm:
    if isinstance(X, Divisor):
        return X.form
    if isinstance(X, HomogeneousForm):
        return Divisor(X).form if X.is_exact else X
    raise TypeError("expected a divisor")


def d_pt(theta: ProjectivePoint, Z: ZeroCycle) -> float:
    """``sum n_x log|θ, x|``."""
    total = 0.0
    for p, m in Z.points:
        d = fs_distance(theta, p)
        if d <= ON_CYCLE_TOL:
            raise PointOnCycleError()
        total += m * math.log(d)
    return total


def d_divisor(theta: ProjectivePoint, X, rng: RngState, n_samples: int = DEFAULT_SAMPLES, jobs: int = 1,
              integral: MCEstimate | None = None) -> DistanceReport:
    """``log|f(θ̂)| - ∫ log|f| dμ - (D/2) H_t`` for the primitive form of ``X``."""
    f = _as_form(X)
    if f.t != theta.t:
        raise ValueError("dimension mismatch")
    val = abs(complex(f.evaluate(theta.unit)))
    if val < 1e-300:
        raise PointOnCycleError("point on cycle (numerically)")
    if integral is None:
        integral = log_integral(f, rng, n_samples, jobs)
    value = math.log(val) - integral.value - 0.5 * f.degree * float(harmonic(f.t))
    return DistanceReport(value, "divisor_identity", None, integral.std_error)


def d_subspace(theta: ProjectivePoint, X, F: ProjectiveSubspace, tol: float = ON_CYCLE_TOL) -> float:
    """``d_pt(θ, X . P(F))`` for a line ``P(F)`` through θ."""
    if fs_distance_to_subspace(theta, F) > 1e-8:
        raise ValueError("theta must lie on the subspace")
    Z = intersect_divisor_with_line(_as_form(X), F)
    return d_pt(theta, Z)


# -- line search through theta ----------------------------------------------

class _LineFamily:
    """Lines through θ parametrized by unit directions ``w = Q s`` in ``θ^perp``.

    Root distances on the line ``span(θ̂, w)`` are ``|β| / |(α, β)|`` for
    roots ``[α : β]`` of ``f(α θ̂ + β w)``.
    """

    def __init__(self, f: HomogeneousForm, theta: ProjectivePoint):
        self.f = f
        self.theta = theta.unit
        self.Q = orthonormal_complement(self.theta)  # (t+1, t)
        self.D = f.degree
        self.f_theta = complex(f.evaluate(self.theta))
        k = np.arange(self.D + 1)
        self.nodes = np.exp(2j * np.pi * k / (self.D + 1))

    def coefficients(self, S: np.ndarray) -> np.ndarray:
        """Rows ``c_k`` (ascending in ``z = β/α``) for directions ``Q s``."""
        W = S @ self.Q.T  # (n, t+1)
        pts = self.theta[None, None, :] + self.nodes[None, :, None] * W[:, None, :]
        vals = self.f.evaluate(pts.reshape(-1, pts.shape[-1])).reshape(W.shape[0], self.D + 1)
        c = np.fft.fft(vals, axis=1) / (self.D + 1)
        c[:, 0] = self.f_theta
        return c

    def distances(self, c: np.ndarray) -> list[tuple[float, int]] | None:
        """Root distances to θ of one coefficient row, roots at infinity included."""
        scale = np.max(np.abs(c))
        if scale == 0:
            return None
        top = self.D
        while top > 0 and abs(c[top]) <= 1e-13 * scale:
            top -= 1
        out = [(1.0, 1)] * (self.D - top)
        if top > 0:
            z = np.roots(c[: top + 1][::-1])
            out += [(float(abs(r) / math.hypot(1.0, abs(r))), 1) for r in z]
        return out

    def direction(self, s: np.ndarray) -> np.ndarray:
        return self.Q @ s

    def line(self, s: np.ndarray) -> ProjectiveSubspace:
        return ProjectiveSubspace((tuple(self.theta), tuple(self.direction(s))), len(self.theta) - 1)


def _objective_min(ds) -> float:
    if ds is None:
        return math.inf
    m = min(d for d, _ in ds)
    return math.log(m) if m > 0 else -math.inf


def _objective_sum(ds) -> float:
    if ds is None:
        return math.inf
    total = 0.0
    for d, m in ds:
        if d <= 0:
            return -math.inf
        total += m * math.log(d)
    return total


def _golden(fun: Callable[[float], float], a: float, b: float, iters: int) -> tuple[float, float]:
    c = b - _PHI * (b - a)
    d = a + _PHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _PHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _PHI * (b - a)
            fd = fun(d)
    return (c, fc) if fc <= fd else (d, fd)


def _search_lines(f: HomogeneousForm, theta: ProjectivePoint, objective, n_trials: int, rng: RngState,
                  starts: int = 4) -> tuple[float, np.ndarray, _LineFamily]:
    fam = _LineFamily(f, theta)
    t = theta.t
    gen = rng.generator()
    S = gen.standard_normal((n_trials, t)) + 1j * gen.standard_normal((n_trials, t))
    S /= np.linalg.norm(S, axis=1, keepdims=True)
    coeffs = fam.coefficients(S)
    vals = np.array([objective(fam.distances(c)) for c in coeffs])

    def value_at(s):
        return objective(fam.distances(fam.coefficients(s[None, :])[0]))

    order = np.argsort(vals, kind="stable")[:starts]
    best_val, best_s = math.inf, S[order[0]]
    for idx in order:
        s0 = S[idx]
        v0 = vals[idx]
        if t > 1:
            s0, v0 = _refine(value_at, s0, v0)
        if v0 < best_val:
            best_val, best_s = v0, s0
    return best_val, best_s, fam


def _chart(s0: np.ndarray):
    """Map from ``R^{2(t-1)}`` to unit vectors near ``s0``."""
    E = orthonormal_complement(s0)  # (t, t-1)

    def to_s(y):
        z = np.asarray(y[0::2]) + 1j * np.asarray(y[1::2])
        s = s0 + E @ z
        return s / np.linalg.norm(s)
    return to_s


def _refine(value_at, s0: np.ndarray, v0: float) -> tuple[np.ndarray, float]:
    """Coordinate-wise golden-section descent in a chart at ``s0``, then a
    Nelder-Mead polish.  Only improvements are accepted."""
    dim = 2 * (s0.size - 1)
    sweeps = 5
    per = max(1, GOLDEN_ITERATIONS // (sweeps * dim))
    radius = 0.5
    best_s, best_v = s0, v0
    for _ in range(sweeps):
        to_s = _chart(best_s)
        y = np.zeros(dim)
        for j in range(dim):
            def along(x, j=j):
                yy = y.copy()
                yy[j] = x
                return value_at(to_s(yy))
            x, fx = _golden(along, -radius, radius, per)
            if fx < best_v:
                y[j] = x
                best_v = fx
        best_s = to_s(y)
        radius *= 0.25
    to_s = _chart(best_s)
    res = minimize(lambda y: float(np.clip(value_at(to_s(y)), -1e300, 1e300)), np.zeros(dim), method="Nelder-Mead",
                   options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 400})
    if np.isfinite(res.fun) and res.fun < best_v:
        best_s, best_v = to_s(res.x), float(res.fun)
    return best_s, best_v


def nearest_on_cycle(theta: ProjectivePoint, X, search_budget: int = 512,
                     rng: RngState | None = None) -> tuple[float, ProjectivePoint]:
    """``(log|θ, X|, witness point on X)``; the value is an upper bound for
    divisors in ``P^t, t >= 2`` (line scan through θ plus local refinement)."""
    if isinstance(X, ZeroCycle):
        best = min(((fs_distance(theta, p), p) for p, _ in X.points), key=lambda z: z[0])
    else:
        f = _as_form(X)
        if f.t != theta.t:
            raise ValueError("dimension mismatch")
        if f.t == 1:
            Z = roots_of_binary(f) if f.is_exact else _roots_numeric(f)
            best = min(((fs_distance(theta, p), p) for p, _ in Z.points), key=lambda z: z[0])
        else:
            rng = rng if rng is not None else RngState(0)
            val, s, fam = _search_lines(f, theta, _objective_min, search_budget, rng)
            Z = intersect_divisor_with_line(f, fam.line(s))
            best = min(((fs_distance(theta, p), p) for p, _ in Z.points), key=lambda z: z[0])
    if best[0] <= ON_CYCLE_TOL:
        raise PointOnCycleError()
    return math.log(best[0]), best[1]


def _roots_numeric(f: HomogeneousForm) -> ZeroCycle:
    from .forms import binary_roots
    coeffs = f.restrict(np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))
    return ZeroCycle(1, tuple((ProjectivePoint(v), m) for v, m in binary_roots(coeffs)))


def dist_to_cycle(theta: ProjectivePoint, X, search_budget: int = 512, rng: RngState | None = None) -> float:
    """``log|θ, X|``: logarithm of the Fubini-Study distance to the support."""
    return nearest_on_cycle(theta, X, search_budget, rng)[0]


def d_pt_inf(theta: ProjectivePoint, X, n_trials: int = 256, rng: RngState | None = None) -> DistanceReport:
    """Approximate infimum of ``d_subspace(θ, X, L)`` over lines ``L`` through θ.

    The witness line is returned; it is exact (not searched) for ``t = 1``.
    """
    f = _as_form(X)
    if f.t != theta.t:
        raise ValueError("dimension mismatch")
    if f.t == 1:
        Z = roots_of_binary(f) if f.is_exact else _roots_numeric(f)
        whole = ProjectiveSubspace(((1, 0), (0, 1)), 1)
        return DistanceReport(d_pt(theta, Z), "subspace_search", whole, 0.0)
    rng = rng if rng is not None else RngState(0)
    _, s, fam = _search_lines(f, theta, _objective_sum, n_trials, rng)
    L = fam.line(s)
    return DistanceReport(d_subspace(theta, f, L), "subspace_search", L, 0.0)
