"""Heights of linear subspaces, divisors and zero-cycles, with the rational
constants that enter them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .cycles import Divisor, ZeroCycle, _linear_product, chow_form_zero_cycle
from .exactlat import LatticeBasis, covolume_log, gram_det, saturation_index, _log_fraction
from .forms import DEFAULT_SAMPLES, HomogeneousForm, MCEstimate, harmonic, log_integral
from .rng import RngState


def stoll(p: int) -> Fraction:
    """``sigma_p = 1/2 sum_{k=1}^p sum_{m=1}^k 1/m``."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    return Fraction(1, 2) * sum((harmonic(k) for k in range(1, p + 1)), Fraction(0))


def stoll_table(pmax: int) -> dict[int, Fraction]:
    return {p: stoll(p) for p in range(pmax + 1)}


def levine_constant(p: int, t: int) -> Fraction:
    """``sum_{n=1}^p sum_{m=0}^{t-p} 1/(m+n)``; equals ``2(sigma_t - sigma_{p-1} - sigma_{t-p})``."""
    if not 1 <= p <= t:
        raise ValueError("need 1 <= p <= t")
    return sum((Fraction(1, m + n) for n in range(1, p + 1) for m in range(t - p + 1)), Fraction(0))


def c2_constant(t: int, p: int, q: int, shifted: bool = False) -> Fraction:
    """``sigma_{t-p} + sigma_{t-q} - sigma_t - sigma_{t-p-q-1}``.

    ``shifted=True`` uses ``sigma_{t-p-q}`` in the last term instead.
    """
    last = t - p - q - (0 if shifted else 1)
    idx = (t - p, t - q, t, last)
    if min(idx) < 0:
        raise ValueError("index out of range")
    return stoll(t - p) + stoll(t - q) - stoll(t) - stoll(last)


@dataclass(frozen=True)
class HeightEstimate:
    value: float
    std_error: float
    note: str = ""

    def __iter__(self):
        return iter((self.value, self.std_error))


def height_subspace(F, t: int | None = None) -> float:
    """Height of ``P(F)``: ``log covol(F ∩ Z^{t+1}) + sigma_p``, ``p = rank - 1``.

    The lattice is saturated first; the saturation index is the gcd of the
    maximal minors, so the saturated covolume is ``covol(F) / index``.
    """
    basis = F if isinstance(F, LatticeBasis) else LatticeBasis.from_rows(F)
    if t is not None and basis.ambient_dim != t + 1:
        raise ValueError("basis does not live in Z^{t+1}")
    gd = gram_det(basis)
    idx = saturation_index(basis)
    log_cov = 0.5 * _log_fraction(gd) - math.log(idx)
    return log_cov + float(stoll(basis.rank - 1))


def height_divisor(X: Divisor | HomogeneousForm, rng: RngState, n_samples: int = DEFAULT_SAMPLES,
                   jobs: int = 1, integral: MCEstimate | None = None) -> HeightEstimate:
    """``h(div f) = D sigma_t + ∫ log|f| dμ`` for a primitive integral ``f``."""
    note = ""
    if isinstance(X, HomogeneousForm):
        X = Divisor(X)
    if X.content_removed != 1:
        note = f"content {X.content_removed} divided out"
    f = X.form
    if integral is None:
        integral = log_integral(f, rng, n_samples, jobs)
    value = f.degree * float(stoll(f.t)) + integral.value
    return HeightEstimate(value, integral.std_error, note)


def height_zero_cycle(Z: ZeroCycle, rng: RngState, n_samples: int = DEFAULT_SAMPLES, jobs: int = 1,
                      chow: HomogeneousForm | None = None) -> HeightEstimate:
    """``∫ log|R(û)| dμ + (d/2) H_t`` over the dual space, ``R`` the primitive Chow form."""
    R = chow if chow is not None else chow_form_zero_cycle(Z)
    est = log_integral(R, rng, n_samples, jobs)
    value = est.value + 0.5 * Z.degree * float(harmonic(Z.t))
    return HeightEstimate(value, est.std_error)


def height_zero_cycle_closed(Z: ZeroCycle, chow: HomogeneousForm | None = None) -> float:
    """Product-formula value ``log|c|`` where ``R = c prod <u, x̂>^{n_x}`` with unit ``x̂``.

    Uses ``∫ log|<û, x̂>| dμ = -H_t / 2``; serves as an oracle for the
    Monte-Carlo route.
    """
    R = chow if chow is not None else chow_form_zero_cycle(Z)
    prod = _linear_product(Z.t, [p.unit for p, _ in Z.points], [m for _, m in Z.points])
    keys = sorted(set(prod) | set(R.coeffs))
    rv = np.array([float(R.coeffs.get(k, 0)) for k in keys])
    pv = np.array([prod.get(k, 0) for k in keys])
    c = np.vdot(pv, rv) / np.vdot(pv, pv)
    return float(math.log(abs(c)))


def height_binary_closed(f: HomogeneousForm, dps: int = 50) -> float:
    """Height of the roots of a primitive integral binary form,
    ``log|a_d| + sum log sqrt(1 + |z_i|^2)`` over roots ``[1 : z_i]``,
    with roots at infinity contributing ``log 1``."""
    from .forms import binary_coefficients

    f = f.primitive()
    c = [int(x) for x in binary_coefficients(f)]
    top = len(c) - 1
    while top > 0 and c[top] == 0:
        top -= 1
    with mpmath.workdps(dps):
        h = mpmath.log(abs(mpmath.mpf(c[top])))
        if top > 0:
            for z in mpmath.polyroots([mpmath.mpf(x) for x in c[: top + 1][::-1]], maxsteps=500, extraprec=4 * dps):
                h += 0.5 * mpmath.log(1 + abs(z) ** 2)
        return float(h)


def height_join(deg_x: int, h_x: float, deg_y: int, h_y: float) -> float:
    """``h(X # Y) = deg X h(Y) + deg Y h(X)``."""
    return deg_x * h_y + deg_y * h_x


def height_point(v) -> float:
    """``log ||v||_2`` for a primitive integer vector."""
    return covolume_log(LatticeBasis.from_rows([v]))
