"""Divisors, zero-cycles, proper intersections and Chow forms of zero-cycles."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
import sympy as sp

from .exactlat import integer_primitive
from .forms import HomogeneousForm, binary_roots, cluster
from .projective import ProjectivePoint, ProjectiveSubspace

CLUSTER_TOL = 1e-8
MP_DPS = 60


class ImproperIntersectionError(ValueError):
    def __init__(self, msg: str = "improper intersection"):
        super().__init__(msg)


class ReconstructionError(ArithmeticError):
    def __init__(self, msg: str = "reconstruction failure"):
        super().__init__(msg)


@dataclass(frozen=True, eq=False)
class Divisor:
    """``div(f)`` for a nonzero integral form, stored primitive."""

    form: HomogeneousForm
    content_removed: Fraction = field(default=Fraction(1))

    def __post_init__(self):
        f = self.form
        if not f.is_exact:
            raise TypeError("divisors need exact coefficients")
        if f.degree < 1:
            raise ValueError("divisor of a constant")
        c = f.content()
        if c != 1 or f.terms[-1][1] < 0:
            object.__setattr__(self, "content_removed", c)
            object.__setattr__(self, "form", f.primitive())

    @classmethod
    def parse(cls, text: str, t: int) -> "Divisor":
        return cls(HomogeneousForm.parse(text, t))

    @property
    def t(self) -> int:
        return self.form.t

    @property
    def degree(self) -> int:
        return self.form.degree


@dataclass(frozen=True, eq=False)
class ZeroCycle:
    """Finite formal sum ``sum n_x [x]`` of points of ``P^t`` with ``n_x >= 1``.

    ``exact_tag`` records exact defining data when known:
    ``("binary", f)`` for the roots of a binary form,
    ``("curves", f, g)`` for the intersection of two plane curves.
    ``precise`` optionally holds high-precision (mpmath) coordinates aligned
    with ``points``; they feed the Chow form reconstruction.
    """

    t: int
    points: tuple[tuple[ProjectivePoint, int], ...]
    exact_tag: tuple | None = None
    precise: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        pts = tuple((p, int(m)) for p, m in self.points)
        if not pts:
            raise ValueError("empty zero-cycle")
        for p, m in pts:
            if m < 1:
                raise ValueError("multiplicities must be positive")
            if p.t != self.t:
                raise ValueError("dimension mismatch")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, *items) -> "ZeroCycle":
        """``ZeroCycle.of((p, 1), (q, 3))`` or ``ZeroCycle.of(p, q)``."""
        pts = [(it, 1) if isinstance(it, ProjectivePoint) else it for it in items]
        return cls(pts[0][0].t, tuple(pts))

    @classmethod
    def from_integer_points(cls, *items) -> "ZeroCycle":
        pts = []
        for it in items:
            if isinstance(it[0], (list, tuple)):
                pts.append((ProjectivePoint.from_integers(it[0]), it[1]))
            else:
                pts.append((ProjectivePoint.from_integers(it), 1))
        return cls(pts[0][0].t, tuple(pts))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.points)

    def union(self, other: "ZeroCycle") -> "ZeroCycle":
        if other.t != self.t:
            raise ValueError("dimension mismatch")
        tag = None
        if self.exact_tag and other.exact_tag and self.exact_tag[0] == other.exact_tag[0] == "binary":
            tag = ("binary", self.exact_tag[1] * other.exact_tag[1])
        return ZeroCycle(self.t, self.points + other.points, tag)

    def to_json(self) -> list:
        return [{"point": [[c.real, c.imag] for c in p.unit], "mult": m} for p, m in self.points]

    @classmethod
    def from_json(cls, obj: Sequence) -> "ZeroCycle":
        pts = []
        for item in obj:
            if "exact" in item:
                pts.append((ProjectivePoint.from_integers(item["exact"]), int(item["mult"])))
            else:
                pts.append((ProjectivePoint(item["point"]), int(item["mult"])))
        return cls(pts[0][0].t, tuple(pts))


def degree(obj) -> int:
    if isinstance(obj, (Divisor, ZeroCycle)):
        return obj.degree
    if isinstance(obj, HomogeneousForm):
        return obj.degree
    raise TypeError(f"no degree for {type(obj).__name__}")


def roots_of_binary(f: HomogeneousForm, tol: float = CLUSTER_TOL) -> ZeroCycle:
    """Zero-cycle of a binary form, tagged with the form for exact Chow data."""
    if f.t != 1:
        raise ValueError("binary form required")
    div = Divisor(f)
    coeffs = [complex(c) for c in _binary_list(div.form)]
    pts = binary_roots(coeffs, tol)
    return ZeroCycle(1, tuple((ProjectivePoint(v), m) for v, m in pts), ("binary", div.form))


def _binary_list(f: HomogeneousForm) -> list:
    c = f.coeffs
    return [c.get((f.degree - k, k), 0) for k in range(f.degree + 1)]


def intersect_divisor_with_line(X: Divisor | HomogeneousForm, L: ProjectiveSubspace, tol: float = CLUSTER_TOL) -> ZeroCycle:
    """``X . L`` for a line ``L``: roots of the form restricted along an
    orthonormal parametrization of ``L``."""
    f = X.form if isinstance(X, Divisor) else X
    if L.dim_projective != 1:
        raise ValueError("L must be a projective line")
    if L.t != f.t:
        raise ValueError("dimension mismatch")
    q = L.orthonormal()
    p0, p1 = q[:, 0], q[:, 1]
    coeffs = f.restrict(p0, p1)
    scale = np.max(np.abs(coeffs))
    if scale == 0 or scale <= 1e-13 * _coef_scale(f):
        raise ImproperIntersectionError()
    pts = binary_roots(coeffs, tol)
    return ZeroCycle(f.t, tuple((ProjectivePoint(a * p0 + b * p1), m) for (a, b), m in pts))


def _coef_scale(f: HomogeneousForm) -> float:
    return max(abs(complex(c)) for _, c in f.terms)


# ---------------------------------------------------------------------------
# plane curves

def _sym(t: int):
    return sp.symbols(f"x0:{t + 1}")


def _random_unimodular(gen: np.random.Generator, n: int = 3) -> list[list[int]]:
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(6):
        i, j = gen.choice(n, size=2, replace=False)
        k = int(gen.integers(-3, 4))
        for r in range(n):
            m[r][j] += k * m[r][i]
    return m


def _mp_roots_binary(coeffs: Sequence[int]) -> list[tuple]:
    """Roots (a, b) of ``sum c_k a^(d-k) b^k`` in mpmath precision."""
    d = len(coeffs) - 1
    top = d
    while top > 0 and coeffs[top] == 0:
        top -= 1
    out = [(mpmath.mpc(0), mpmath.mpc(1))] * (d - top)
    if top > 0:
        zs = mpmath.polyroots([mpmath.mpf(c) for c in coeffs[: top + 1][::-1]], maxsteps=400, extraprec=400)
        out += [(mpmath.mpc(1), mpmath.mpc(z)) for z in zs]
    return out


def intersect_plane_curves(X: Divisor, Y: Divisor, tol: float = CLUSTER_TOL, seed: int = 0) -> ZeroCycle:
    """``X . Y`` for plane curves by elimination along a generic projection.

    A seeded random unimodular change of coordinates puts the projection centre
    off both curves and separates fibres; intersection multiplicities are the
    exact root multiplicities of the resultant (square-free decomposition).
    """
    if X.t != 2 or Y.t != 2:
        raise ValueError("plane curves required")
    f, g = X.form, Y.form
    x = _sym(2)
    gen = np.random.default_rng([seed, 0x5EC7])
    for attempt in range(20):
        a_mat = _random_unimodular(gen)
        fa, ga = f.compose(a_mat), g.compose(a_mat)
        e2a, e2b = (0, 0, f.degree), (0, 0, g.degree)
        if fa.coeffs.get(e2a, 0) == 0 or ga.coeffs.get(e2b, 0) == 0:
            continue
        res = sp.resultant(fa.to_sympy(x).as_expr(), ga.to_sympy(x).as_expr(), x[2])
        res = sp.expand(res)
        if res == 0:
            raise ImproperIntersectionError()
        pts = _lift_fibres(fa, ga, sp.Poly(res, x[0], x[1]), a_mat)
        if pts is None:
            continue
        total = sum(p[1] for p in pts)
        if total != f.degree * g.degree:
            continue
        if len(cluster([v for v, _, _ in pts], tol)) != len(pts):
            continue
        return ZeroCycle(2, tuple((ProjectivePoint(v), m) for v, m, _ in pts), ("curves", f, g),
                         precise=tuple(hp for _, _, hp in pts))
    raise ArithmeticError("no generic projection found")


def _lift_fibres(fa: HomogeneousForm, ga: HomogeneousForm, res: sp.Poly, a_mat) -> list | None:
    """Recover the unique intersection point above each root of the resultant."""
    x = res.gens
    deg = res.total_degree()
    out = []
    with mpmath.workdps(MP_DPS):
        for fac, mult in sp.sqf_list(res)[1]:
            fac = sp.Poly(fac, *x)
            d = fac.total_degree()
            coeffs = [int(fac.coeff_monomial(x[0] ** (d - k) * x[1] ** k)) for k in range(d + 1)]
            for a, b in _mp_roots_binary(coeffs):
                fcoef = _fibre_coeffs(fa, a, b)
                gcoef = _fibre_coeffs(ga, a, b)
                cands = mpmath.polyroots(fcoef[::-1], maxsteps=400, extraprec=400) if len(fcoef) > 1 else []
                if not cands:
                    return None
                gscale = sum(abs(c) for c in gcoef)
                scored = sorted(cands, key=lambda z: abs(mpmath.polyval(gcoef[::-1], z)) / (gscale * max(1, abs(z)) ** (len(gcoef) - 1)))
                best = scored[0]
                val = abs(mpmath.polyval(gcoef[::-1], best)) / (gscale * max(1, abs(best)) ** (len(gcoef) - 1))
                if val > mpmath.mpf(10) ** (-MP_DPS // 3):
                    return None
                # a second distinct common root on the same fibre means the projection is not generic
                for z in scored[1:]:
                    v2 = abs(mpmath.polyval(gcoef[::-1], z)) / (gscale * max(1, abs(z)) ** (len(gcoef) - 1))
                    if v2 < mpmath.mpf(10) ** (-MP_DPS // 3) and abs(z - best) > mpmath.mpf(10) ** (-MP_DPS // 4):
                        return None
                xp = [a, b, best]
                xv = [sum(a_mat[i][j] * xp[j] for j in range(3)) for i in range(3)]
                vec = np.array([complex(c) for c in xv], dtype=complex)
                out.append((vec / np.linalg.norm(vec), mult, tuple(xv)))
    if sum(o[1] for o in out) != deg:
        return None
    return out


def _fibre_coeffs(f: HomogeneousForm, a, b) -> list:
    """Coefficients in increasing powers of ``x_2`` of ``f(a, b, x_2)``."""
    coeffs = [mpmath.mpc(0)] * (f.degree + 1)
    for (i, j, k), c in f.terms:
        coeffs[k] += mpmath.mpf(c.numerator) / c.denominator * a**i * b**j
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


# ---------------------------------------------------------------------------
# Chow forms

def _dual_gens(t: int):
    return sp.symbols(f"u0:{t + 1}")


def _bareiss_poly(mat: list[list[sp.Poly]], one: sp.Poly) -> sp.Poly:
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    prev = one
    for k in range(n - 1):
        if a[k][k].is_zero:
            for i in range(k + 1, n):
                if not a[i][k].is_zero:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return one * 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exquo(prev)
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def u_resultant(f: HomogeneousForm, g: HomogeneousForm) -> HomogeneousForm:
    """Primitive integral Chow form of ``div f . div g`` in ``P^2``.

    Points of the line ``<u, x> = 0`` are parametrised as
    ``(u2 s, u2 r, -(u0 s + u1 r))``; the binary resultant in ``(s, r)`` equals
    ``u2^(ab)`` times the Chow form.
    """
    u = _dual_gens(2)
    s, r = sp.symbols("s r")
    x = _sym(2)
    sub = {x[0]: u[2] * s, x[1]: u[2] * r, x[2]: -(u[0] * s + u[1] * r)}

    def binary(form: HomogeneousForm):
        expr = sp.expand(form.to_sympy(x).as_expr().subs(sub, simultaneous=True))
        p = sp.Poly(expr, s, r)
        d = form.degree
        return [sp.Poly(p.coeff_monomial(s ** (d - k) * r**k), *u, domain="ZZ") for k in range(d + 1)]

    fa, ga = binary(f), binary(g)
    m, n = f.degree, g.degree
    zero = sp.Poly(0, *u, domain="ZZ")
    one = sp.Poly(1, *u, domain="ZZ")
    rows = []
    for i in range(n):
        rows.append([zero] * i + fa + [zero] * (n - 1 - i))
    for i in range(m):
        rows.append([zero] * i + ga + [zero] * (m - 1 - i))
    det = _bareiss_poly(rows, one)
    if det.is_zero:
        raise ImproperIntersectionError()
    q, rem = sp.div(det, sp.Poly(u[2] ** (m * n), *u, domain="ZZ"))
    if not rem.is_zero:
        raise ReconstructionError("u-resultant not divisible by the parametrisation factor")
    return HomogeneousForm.from_sympy(q).primitive()


def _linear_product(t: int, vectors: Sequence[np.ndarray], mults: Sequence[int]) -> dict:
    """Numeric coefficients of ``prod <u, v_i>^{n_i}``."""
    n = t + 1
    acc = {(0,) * n: 1 + 0j}
    for v, m in zip(vectors, mults):
        lin = {tuple(int(j == i) for j in range(n)): complex(v[i]) for i in range(n)}
        for _ in range(m):
            out: dict = {}
            for e1, c1 in acc.items():
                for e2, c2 in lin.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
            acc = out
    return acc


def chow_residual(R: HomogeneousForm, Z: ZeroCycle) -> float:
    """Relative distance between ``R`` and the best multiple of ``prod <u, x̂>^{n}``."""
    prod = _linear_product(Z.t, [p.unit for p, _ in Z.points], [m for _, m in Z.points])
    keys = sorted(set(prod) | set(R.coeffs))
    rv = np.array([complex(R.coeffs.get(k, 0)) for k in keys])
    pv = np.array([prod.get(k, 0) for k in keys])
    c = np.vdot(pv, rv) / np.vdot(pv, pv)
    return float(np.linalg.norm(rv - c * pv) / np.linalg.norm(rv))


def chow_form_zero_cycle(Z: ZeroCycle, residual_tol: float = 1e-6) -> HomogeneousForm:
    """Primitive integral Chow form ``c * prod <u, x>^{n_x}`` of a Galois-stable zero-cycle.

    Exact defining data is used when available; otherwise the product is
    expanded numerically and rounded, and the rounding residual is verified.
    """
    tag = Z.exact_tag
    if tag and tag[0] == "binary":
        f = tag[1]
        R = f.compose([[0, 1], [-1, 0]]).primitive()  # f(u1, -u0)
    elif Z.precise is not None:
        R = _round_chow_precise(Z)
    elif tag and tag[0] == "curves":
        R = u_resultant(tag[1], tag[2])
    elif all(p.exact is not None for p, _ in Z.points):
        R = None
        for p, m in Z.points:
            lin = HomogeneousForm.linear(list(p.exact)) ** m
            R = lin if R is None else R * lin
        R = R.primitive()
    else:
        R = _round_chow(Z)
    if R.degree != Z.degree:
        raise ReconstructionError("Chow form degree does not match the cycle")
    if chow_residual(R, Z) > residual_tol:
        raise ReconstructionError()
    return R


def _round_chow(Z: ZeroCycle, max_den: int = 10**6) -> HomogeneousForm:
    prod = _linear_product(Z.t, [p.unit for p, _ in Z.points], [m for _, m in Z.points])
    key = max(prod, key=lambda k: abs(prod[k]))
    scale = prod[key]
    coeffs = {}
    for k, v in prod.items():
        w = v / scale
        if abs(w.imag) > 1e-7:
            raise ReconstructionError("cycle is not defined over Q")
        q = Fraction(w.real).limit_denominator(max_den)
        if q != 0:
            coeffs[k] = q
    return HomogeneousForm.from_terms(Z.t, coeffs, degree=Z.degree).primitive()


def _mpf_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    val = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -val if sign else val


def _round_chow_precise(Z: ZeroCycle) -> HomogeneousForm:
    """Round the high-precision expansion of ``prod <u, x>^{n}`` to a primitive
    integral form, then check the rounding at working precision."""
    n = Z.t + 1
    with mpmath.workdps(MP_DPS):
        acc = {(0,) * n: mpmath.mpc(1)}
        for v, (_, m) in zip(Z.precise, Z.points):
            for _ in range(m):
                out: dict = {}
                for e, c in acc.items():
                    for i in range(n):
                        ee = tuple(a + (j == i) for j, a in enumerate(e))
                        out[ee] = out.get(ee, 0) + c * v[i]
                acc = out
        key = max(acc, key=lambda k: abs(acc[k]))
        ref = acc[key]
        ratios = {k: c / ref for k, c in acc.items()}
        limit = 10 ** (MP_DPS // 2 - 5)
        fr = {}
        for k, w in ratios.items():
            if abs(w.imag) > mpmath.mpf(10) ** (-MP_DPS // 2):
                raise ReconstructionError("cycle is not defined over Q")
            q = _mpf_fraction(w.real).limit_denominator(limit)
            if q != 0:
                fr[k] = q
        R = HomogeneousForm.from_terms(Z.t, fr, degree=Z.degree).primitive()
        # verify: R must equal c * prod at working precision
        lam = mpmath.mpf(R.coeffs[key].numerator) / ref
        rc = {k: mpmath.mpf(c.numerator) for k, c in R.terms}
        worst = max(abs(lam * acc.get(k, 0) - rc.get(k, 0)) for k in set(acc) | set(rc))
        if worst > mpmath.mpf(10) ** (-MP_DPS // 3) * max(abs(c) for c in rc.values()):
            raise ReconstructionError()
    return R


def rational_representative(p: ProjectivePoint, max_den: int = 10**6, tol: float = 1e-9) -> tuple[int, ...]:
    """Primitive integer vector representing a (numerically) rational point."""
    if p.exact is not None:
        return p.exact
    v = p.unit
    k = int(np.argmax(np.abs(v)))
    w = v / v[k]
    if np.max(np.abs(w.imag)) > tol:
        raise ReconstructionError("point is not rational")
    fr = [Fraction(float(c.real)).limit_denominator(max_den) for c in w]
    prim = integer_primitive(fr)
    check = np.asarray(prim, dtype=float)
    check /= np.linalg.norm(check)
    if abs(abs(np.vdot(check, v)) - 1) > tol:
        raise ReconstructionError("point is not rational")
    return prim
