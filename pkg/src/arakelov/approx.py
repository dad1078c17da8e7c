"""Algebraic approximation of a point of ``P^1`` through small integer sections.

Integer forms of degree ``D`` with small coefficients and small value at θ
are short vectors of a lattice whose last columns carry the scaled real and
imaginary parts of the monomials at θ̂.  LLL finds one; the roots of its
irreducible factors near θ are the approximating algebraic points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

import mpmath
import numpy as np
import sympy as sp

from .exactlat import LatticeBasis, covolume_log, lll_reduce
from .forms import HomogeneousForm
from .heights import height_binary_closed
from .projective import ProjectivePoint

EXACT_HIT_FRACTION = 0.8
MAX_HALVINGS = 5
_LN2 = math.log(2)


# -- targets -----------------------------------------------------------------

def _parse_coord(text: str):
    """Decimal or rational string to ``(mpmath value, precision bits or None if exact)``."""
    s = text.strip()
    if "/" in s or all(ch.isdigit() or ch in "+-" for ch in s):
        return Fraction(s), None
    digits = sum(ch.isdigit() for ch in s.split("e")[0].split("E")[0].lstrip("+-0."))
    return s, max(1, int(math.ceil(max(digits, 1) * math.log2(10))))


@dataclass(frozen=True)
class Target:
    """A point of ``P^t`` given by decimal (or exact rational) coordinate strings.

    ``precision_bits`` is the accuracy the strings carry; ``None`` means the
    coordinates are exact rationals.
    """

    coords: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(str(c) for c in self.coords))
        if len(self.coords) < 2:
            raise ValueError("need at least two coordinates")

    @property
    def t(self) -> int:
        return len(self.coords) - 1

    @property
    def precision_bits(self) -> int | None:
        bits = [b for _, b in map(_parse_coord, self.coords) if b is not None]
        return min(bits) if bits else None

    def mp_unit(self, prec_bits: int) -> list:
        """Unit representative at ``prec_bits`` of working precision."""
        with mpmath.workprec(prec_bits):
            vals = []
            for c in self.coords:
                v, _ = _parse_coord(c)
                vals.append(mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else mpmath.mpmathify(v))
            nrm = mpmath.sqrt(mpmath.fsum(abs(x) ** 2 for x in vals))
            if nrm == 0:
                raise ValueError("coordinates must not all vanish")
            return [x / nrm for x in vals]

    def point(self) -> ProjectivePoint:
        return ProjectivePoint(np.array([complex(x) for x in self.mp_unit(80)]))


def as_target(theta) -> Target:
    if isinstance(theta, Target):
        return theta
    if isinstance(theta, ProjectivePoint):
        return Target(tuple(repr(float(c.real)) for c in theta.unit))
    return Target(tuple(theta))


def random_target(seed: int, digits: int = 300) -> Target:
    """θ = [1 : r] with ``r`` a seeded random real in (0, 1) given to ``digits`` digits."""
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(0xA9,))))
    ds = gen.integers(0, 10, size=digits)
    ds[0] = max(int(ds[0]), 1)
    return Target(("1", "0." + "".join(str(int(d)) for d in ds)))


def working_precision(theta: Target, scale_bits: int) -> int:
    pb = theta.precision_bits
    return max(4 * scale_bits, (pb if pb is not None else 4 * scale_bits) + 32, 64)


# -- lattice -----------------------------------------------------------------

def monomial_exponents(t: int, D: int) -> list[tuple[int, ...]]:
    """Exponents of degree ``D`` in descending lexicographic order (``x0^D`` first)."""
    out = set()
    for combo in combinations_with_replacement(range(t + 1), D):
        e = [0] * (t + 1)
        for i in combo:
            e[i] += 1
        out.add(tuple(e))
    return sorted(out, reverse=True)


def _round_half_even(x) -> int:
    return int(mpmath.nint(x))


def build_eval_lattice(theta, D: int, scale_bits: int) -> LatticeBasis:
    """Rows ``(e_i, round(2^s Re m_i(θ̂)), round(2^s Im m_i(θ̂)))`` over the monomials ``m_i``."""
    if D < 1:
        raise ValueError("D must be positive")
    if scale_bits < 0:
        raise ValueError("scale_bits must be nonnegative")
    theta = as_target(theta)
    exps = monomial_exponents(theta.t, D)
    prec = working_precision(theta, scale_bits)
    n = len(exps)
    rows = []
    with mpmath.workprec(prec):
        u = theta.mp_unit(prec)
        scale = mpmath.mpf(2) ** scale_bits
        for i, e in enumerate(exps):
            val = mpmath.mpc(1)
            for x, k in zip(u, e):
                val *= x ** k
            row = [0] * n
            row[i] = 1
            rows.append(tuple(row) + (_round_half_even(scale * mpmath.re(val)), _round_half_even(scale * mpmath.im(val))))
    return LatticeBasis.from_rows(rows)


@dataclass(frozen=True)
class SmallSection:
    form: HomogeneousForm
    vector: tuple[int, ...]
    scale_bits: int
    eval_bound: float  # certified bound on |f(θ̂)|
    lattice_log_covolume: float


def _form_from_coeffs(t: int, D: int, coeffs: Sequence[int]) -> HomogeneousForm:
    exps = monomial_exponents(t, D)
    return HomogeneousForm.from_terms(t, {e: int(c) for e, c in zip(exps, coeffs) if c}, degree=D)


def small_section(theta, D: int, scale_bits: int) -> SmallSection:
    """LLL on the evaluation lattice; halves ``scale_bits`` (up to 5 times)
    while the first reduced vector has zero coefficient part."""
    theta = as_target(theta)
    s = scale_bits
    n = len(monomial_exponents(theta.t, D))
    for _ in range(MAX_HALVINGS + 1):
        lat = build_eval_lattice(theta, D, s)
        red = lll_reduce(lat)
        v = red.vectors[0]
        coeffs = v[:n]
        if any(coeffs):
            f = _form_from_coeffs(theta.t, D, coeffs)
            l1 = sum(abs(c) for c in coeffs)
            short = math.sqrt(sum(c * c for c in v))
            bound = (short + 0.5 * math.sqrt(2) * l1) / 2.0 ** s
            return SmallSection(f, tuple(v), s, bound, covolume_log(lat))
        s //= 2
    raise ArithmeticError("zero coefficient part")


def find_small_section(theta, D: int, scale_bits: int) -> HomogeneousForm:
    """Nonzero integer form of degree ``D`` with small coefficients and small value at θ̂."""
    return small_section(theta, D, scale_bits).form


# -- candidates --------------------------------------------------------------

@dataclass(frozen=True)
class ApproxCandidate:
    form: HomogeneousForm  # primitive irreducible factor vanishing at alpha
    alpha: ProjectivePoint
    D: int
    deg_alpha: int
    height_alpha: float
    log_dist: float  # -inf for an exact hit
    exact_hit: bool = False
    log_dist_raw: float = 0.0  # value computed at working precision

    def to_row(self) -> dict:
        return {"D": self.D, "deg": self.deg_alpha, "height": self.height_alpha, "log_dist": self.log_dist,
                "exact_hit": self.exact_hit, "form": str(self.form.to_sympy().as_expr())}


def _binary_factors(f: HomogeneousForm) -> list[HomogeneousForm]:
    x = sp.symbols("x0 x1")
    _, facs = sp.factor_list(f.to_sympy(x).as_expr(), *x)
    out = []
    for g, _ in facs:
        poly = sp.Poly(g, *x)
        if poly.total_degree() < 1:
            continue
        h = HomogeneousForm.from_sympy(poly)
        out.append(h.primitive())
    return out


def _mp_roots(g: HomogeneousForm, prec: int) -> list[tuple]:
    """Projective roots ``(a0, a1)`` of a binary form at ``prec`` bits."""
    D = g.degree
    c = [int(g.coeffs.get((D - k, k), 0)) for k in range(D + 1)]  # c_k x0^(D-k) x1^k
    top = D
    while top > 0 and c[top] == 0:
        top -= 1
    roots = [(mpmath.mpf(0), mpmath.mpf(1))] * (D - top)
    if top > 0:
        with mpmath.workprec(prec):
            zs = mpmath.polyroots([mpmath.mpf(x) for x in c[: top + 1][::-1]], maxsteps=800, extraprec=prec)
            roots += [(mpmath.mpf(1), z) for z in zs]
    return roots


def _log_fs(alpha, theta_unit, prec) -> mpmath.mpf:
    with mpmath.workprec(prec):
        a0, a1 = alpha
        t0, t1 = theta_unit
        num = abs(a0 * t1 - a1 * t0)
        den = mpmath.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
        if num == 0:
            return mpmath.ninf
        return mpmath.log(num / den)


def approximate_point(theta, D: int, scale_bits: int) -> list[ApproxCandidate]:
    """Per irreducible factor of the small section, its root nearest θ; sorted by distance."""
    theta = as_target(theta)
    if theta.t != 1:
        raise ValueError("approximate_point needs t = 1")
    sec = small_section(theta, D, scale_bits)
    prec = working_precision(theta, sec.scale_bits)
    pb = theta.precision_bits
    hit_nats = EXACT_HIT_FRACTION * (pb if pb is not None else prec) * _LN2
    u = theta.mp_unit(prec)
    out = []
    for g in _binary_factors(sec.form):
        best = None
        for a in _mp_roots(g, prec):
            ld = _log_fs(a, u, prec)
            if best is None or ld < best[0]:
                best = (ld, a)
        ld, a = best
        raw = float(ld) if ld != mpmath.ninf else -math.inf
        hit = raw < -hit_nats
        alpha = ProjectivePoint(np.array([complex(a[0]), complex(a[1])]))
        out.append(ApproxCandidate(g, alpha, D, g.degree, height_binary_closed(g), -math.inf if hit else raw,
                                   hit, raw))
    out.sort(key=lambda c: (c.log_dist_raw, c.deg_alpha))
    return out


def scale_schedule(a: float, D: int) -> int:
    """``ceil(a D^2 / log 2)`` bits, so that ``2^s ≈ e^{a D^2}``."""
    return int(math.ceil(a * D * D / _LN2))


@dataclass(frozen=True)
class ExperimentRow:
    D: int
    scale_bits: int
    deg: int
    height: float
    log_dist: float
    exact_hit: bool

    @property
    def deg_ok(self) -> bool:
        return self.deg <= self.D


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[ExperimentRow, ...]
    a: float
    slope: float  # least squares slope of log_dist against D^2 (finite rows)
    b_hat: float  # -slope / a
    algebraic_target: bool

    def height_ok(self, margin: float = 2.0) -> bool:
        return all(r.height <= self.a * r.D + margin for r in self.rows)

    def deg_ok(self) -> bool:
        return all(r.deg_ok for r in self.rows)


def conjecture_experiment(theta, D_range: Sequence[int], a: float) -> ExperimentResult:
    """Best candidate per ``D`` under the schedule ``scale_bits = ceil(a D^2 / log 2)``."""
    theta = as_target(theta)
    rows = []
    for D in D_range:
        s = scale_schedule(a, D)
        best = approximate_point(theta, D, s)[0]
        rows.append(ExperimentRow(D, s, best.deg_alpha, best.height_alpha, best.log_dist, best.exact_hit))
    finite = [(r.D ** 2, r.log_dist) for r in rows if math.isfinite(r.log_dist)]
    algebraic = any(r.exact_hit for r in rows)
    if len(finite) >= 2:
        x, y = np.array(finite).T
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = -math.inf if algebraic else math.nan
    return ExperimentResult(tuple(rows), a, slope, -slope / a, algebraic)
