"""Homogeneous forms: evaluation, Fubini-Study L2 norms, Monte-Carlo log integrals,
sup-norm lower bounds and binary resultants."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import sympy as sp
from scipy.optimize import minimize

from .exactlat import rational_det
from .projective import ProjectivePoint, sample_points
from .rng import RngState

MC_CHUNK = 1 << 16
DEFAULT_SAMPLES = 10**6

Exponent = tuple[int, ...]


def _coerce_coef(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, (float, np.floating)):
        return Fraction(float(c)) if float(c).is_integer() else complex(c)
    if isinstance(c, sp.Rational):
        return Fraction(int(c.p), int(c.q))
    return complex(c)


@dataclass(frozen=True, eq=False)
class HomogeneousForm:
    """Homogeneous polynomial of degree ``degree`` in ``x_0 .. x_t``.

    Coefficients are exact rationals (the normal case) or complex numbers
    (forms transported by a unitary map).  ``terms`` is a tuple of
    ``(exponent, coefficient)`` pairs sorted by exponent, nonzero only.
    """

    t: int
    degree: int
    terms: tuple[tuple[Exponent, object], ...]

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("negative degree")
        if not self.terms:
            raise ValueError("zero form")
        for e, _ in self.terms:
            if len(e) != self.t + 1 or sum(e) != self.degree or min(e) < 0:
                raise ValueError(f"bad exponent {e} for degree {self.degree} in t={self.t}")

    # -- construction ---------------------------------------------------
    @classmethod
    def from_terms(cls, t: int, terms: Mapping[Exponent, object] | Iterable, degree: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, object] = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            acc[e] = acc.get(e, 0) + _coerce_coef(c)
        clean = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
        if not clean:
            raise ValueError("zero form")
        deg = sum(clean[0][0]) if degree is None else degree
        return cls(t, deg, clean)

    @classmethod
    def variable(cls, t: int, i: int) -> "HomogeneousForm":
        e = tuple(int(j == i) for j in range(t + 1))
        return cls(t, 1, ((e, Fraction(1)),))

    @classmethod
    def linear(cls, coeffs: Sequence) -> "HomogeneousForm":
        t = len(coeffs) - 1
        return cls.from_terms(t, {tuple(int(j == i) for j in range(t + 1)): c for i, c in enumerate(coeffs)}, degree=1)

    @classmethod
    def parse(cls, text: str, t: int) -> "HomogeneousForm":
        """Parse an expression in ``x0 .. xt`` such as ``"x1^2 - 2*x0^2"``."""
        gens = sp.symbols(f"x0:{t + 1}")
        expr = sp.sympify(text.replace("^", "**"), locals={str(g): g for g in gens})
        return cls.from_sympy(sp.Poly(expr, *gens))

    @classmethod
    def from_sympy(cls, poly: sp.Poly) -> "HomogeneousForm":
        t = len(poly.gens) - 1
        return cls.from_terms(t, {m: c for m, c in poly.terms()})

    # -- basic properties -----------------------------------------------
    @property
    def coeffs(self) -> dict[Exponent, object]:
        return dict(self.terms)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for _, c in self.terms)

    @property
    def is_integral(self) -> bool:
        return self.is_exact and all(c.denominator == 1 for _, c in self.terms)

    def content(self) -> Fraction:
        """Positive rational ``c`` with ``self / c`` primitive integral."""
        self._need_exact()
        num, den = 0, 1
        for _, c in self.terms:
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "HomogeneousForm":
        """Primitive integral form with positive leading coefficient (largest exponent)."""
        c = self.content()
        lead = self.terms[-1][1]
        if lead < 0:
            c = -c
        return HomogeneousForm(self.t, self.degree, tuple((e, v / c) for e, v in self.terms))

    def _need_exact(self):
        if not self.is_exact:
            raise TypeError("operation requires exact rational coefficients")

    # -- arithmetic -----------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, HomogeneousForm):
            if other.t != self.t:
                raise ValueError("dimension mismatch")
            acc: dict[Exponent, object] = {}
            for e1, c1 in self.terms:
                for e2, c2 in other.terms:
                    e = tuple(a + b for a, b in zip(e1, e2))
                    acc[e] = acc.get(e, 0) + c1 * c2
            return HomogeneousForm.from_terms(self.t, acc, degree=self.degree + other.degree)
        c = _coerce_coef(other)
        return HomogeneousForm.from_terms(self.t, {e: v * c for e, v in self.terms}, degree=self.degree)

    __rmul__ = __mul__

    def __add__(self, other: "HomogeneousForm"):
        if other.t != self.t or other.degree != self.degree:
            raise ValueError("can only add forms of equal degree and dimension")
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + c
        return HomogeneousForm.from_terms(self.t, acc, degree=self.degree)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __pow__(self, k: int):
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        return self.t == other.t and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.t, self.degree, self.terms))

    def __repr__(self):
        return f"HomogeneousForm({self.to_sympy().as_expr()}, t={self.t})"

    # -- conversions ----------------------------------------------------
    def gens(self):
        return sp.symbols(f"x0:{self.t + 1}")

    def to_sympy(self, gens=None) -> sp.Poly:
        gens = gens or self.gens()
        def conv(c):
            if isinstance(c, Fraction):
                return sp.Rational(c.numerator, c.denominator)
            return sp.nsimplify(c) if c.imag == 0 else sp.Float(c.real) + sp.I * sp.Float(c.imag)
        return sp.Poly.from_dict({e: conv(c) for e, c in self.terms}, *gens)

    def compose(self, matrix) -> "HomogeneousForm":
        """The form ``x -> f(M x)``; exact if both ``f`` and ``M`` are rational."""
        m = [list(row) for row in matrix]
        exact = self.is_exact and all(isinstance(x, (int, Fraction)) for row in m for x in row)
        n = self.t + 1
        lin = []
        for i in range(n):
            row = {tuple(int(j == k) for k in range(n)): (Fraction(m[i][j]) if exact else complex(m[i][j]))
                   for j in range(n) if m[i][j] != 0}
            lin.append(row)
        powers: dict[tuple[int, int], dict] = {}

        def mul(a, b):
            out: dict = {}
            for e1, c1 in a.items():
                for e2, c2 in b.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
            return out

        def power(i, k):
            if (i, k) not in powers:
                powers[(i, k)] = {(0,) * n: 1} if k == 0 else mul(power(i, k - 1), lin[i])
            return powers[(i, k)]

        acc: dict = {}
        for e, c in self.terms:
            if not exact:
                c = complex(c)
            prod = {(0,) * n: c}
            for i, k in enumerate(e):
                if k:
                    prod = mul(prod, power(i, k))
            for ee, cc in prod.items():
                acc[ee] = acc.get(ee, 0) + cc
        if not exact:
            scale = max(abs(c) for c in acc.values())
            acc = {e: c for e, c in acc.items() if abs(c) > 1e-15 * scale}
        return HomogeneousForm.from_terms(self.t, acc, degree=self.degree)

    # -- numerics -------------------------------------------------------
    def _arrays(self):
        exps = np.array([e for e, _ in self.terms], dtype=int)
        coefs = np.array([complex(c) for _, c in self.terms], dtype=complex)
        return exps, coefs

    def evaluate(self, points) -> np.ndarray | complex:
        """Evaluate on an ``(n, t+1)`` array of vectors (or one vector)."""
        pts = np.asarray(points, dtype=complex)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.shape[1] != self.t + 1:
            raise ValueError("dimension mismatch")
        exps, coefs = self._arrays()
        pw = [np.ones((pts.shape[0], self.degree + 1), dtype=complex) for _ in range(self.t + 1)]
        for i in range(self.t + 1):
            for k in range(1, self.degree + 1):
                pw[i][:, k] = pw[i][:, k - 1] * pts[:, i]
        out = np.zeros(pts.shape[0], dtype=complex)
        for e, c in zip(exps, coefs):
            term = np.full(pts.shape[0], c, dtype=complex)
            for i, k in enumerate(e):
                if k:
                    term *= pw[i][:, k]
            out += term
        return out[0] if single else out

    def restrict(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Coefficients ``c_k`` of ``f(alpha p + beta q) = sum c_k alpha^(D-k) beta^k``."""
        out = np.zeros(self.degree + 1, dtype=complex)
        for e, c in self.terms:
            poly = np.array([complex(c)], dtype=complex)  # ascending powers of z = beta/alpha
            for i, k in enumerate(e):
                if k:
                    lin = np.array([p[i], q[i]], dtype=complex)
                    for _ in range(k):
                        poly = np.convolve(poly, lin)
            out[: poly.size] += poly
        return out

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        def enc(c):
            if isinstance(c, Fraction):
                return str(c)
            return [c.real, c.imag]
        return {"t": self.t, "degree": self.degree,
                "terms": [{"exp": list(e), "coef": enc(c)} for e, c in self.terms]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "HomogeneousForm":
        terms = {}
        for item in obj["terms"]:
            c = item["coef"]
            terms[tuple(item["exp"])] = complex(c[0], c[1]) if isinstance(c, list) else Fraction(str(c))
        form = cls.from_terms(int(obj["t"]), terms, degree=int(obj["degree"]))
        return form


def monomial(t: int, exps: Sequence[int]) -> HomogeneousForm:
    return HomogeneousForm(t, sum(exps), ((tuple(exps), Fraction(1)),))


def random_integer_form(t: int, degree: int, bound: int, gen: np.random.Generator) -> HomogeneousForm:
    """Random form with integer coefficients uniform in ``[-bound, bound]``."""
    from itertools import combinations_with_replacement

    exps = []
    for combo in combinations_with_replacement(range(t + 1), degree):
        e = [0] * (t + 1)
        for i in combo:
            e[i] += 1
        exps.append(tuple(e))
    while True:
        coefs = gen.integers(-bound, bound + 1, size=len(exps))
        if np.any(coefs):
            return HomogeneousForm.from_terms(t, {e: int(c) for e, c in zip(exps, coefs)}, degree=degree)


# ---------------------------------------------------------------------------
# norms and integrals

def evaluate_unit(f: HomogeneousForm, x: ProjectivePoint) -> complex:
    if f.t != x.t:
        raise ValueError("dimension mismatch")
    return complex(f.evaluate(x.unit))


def l2_norm_squared(f: HomogeneousForm) -> Fraction:
    """Exact ``∫|f|^2`` for the probability Fubini-Study measure.

    Monomials are orthogonal with ``∫|x^a|^2 = t! a! / (D+t)!``.
    """
    f._need_exact()
    t, d = f.t, f.degree
    total = Fraction(0)
    for e, c in f.terms:
        w = math.factorial(t) * math.prod(math.factorial(a) for a in e)
        total += c * c * Fraction(w, math.factorial(d + t))
    return total


def l2_norm(f: HomogeneousForm) -> float:
    q = l2_norm_squared(f)
    return math.sqrt(q.numerator) / math.sqrt(q.denominator) if q.numerator < 2**1000 else math.exp(0.5 * (math.log(q.numerator) - math.log(q.denominator)))


def harmonic(t: int) -> Fraction:
    return sum((Fraction(1, m) for m in range(1, t + 1)), Fraction(0))


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    n_samples: int

    def __iter__(self):
        return iter((self.value, self.std_error))


def mc_mean(func: Callable[[np.ndarray], np.ndarray], t: int, rng: RngState,
            n_samples: int = DEFAULT_SAMPLES, jobs: int = 1, chunk: int = MC_CHUNK) -> MCEstimate:
    """Monte-Carlo mean of ``func`` over the unitarily invariant measure on ``P^t``.

    Sample ``i`` of chunk ``k`` always comes from stream ``rng.spawn(k)``, and
    chunk sums are combined in chunk order, so the result does not depend on
    ``jobs``.  Non-finite values (exact zeros of a log) are redrawn.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    sizes = [min(chunk, n_samples - k * chunk) for k in range(math.ceil(n_samples / chunk))]

    def work(k: int):
        gen = rng.spawn(k).generator()
        vals = np.asarray(func(sample_points(t, sizes[k], gen)), dtype=float)
        bad = ~np.isfinite(vals)
        while bad.any():
            vals[bad] = func(sample_points(t, int(bad.sum()), gen))
            bad = ~np.isfinite(vals)
        return math.fsum(vals), math.fsum(vals * vals)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(work, range(len(sizes))))
    else:
        parts = [work(k) for k in range(len(sizes))]
    s = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s / n_samples
    var = max(0.0, (s2 - n_samples * mean * mean) / (n_samples - 1))
    return MCEstimate(mean, math.sqrt(var / n_samples), n_samples)


def log_integral(f: HomogeneousForm, rng: RngState, n_samples: int = DEFAULT_SAMPLES, jobs: int = 1) -> MCEstimate:
    """Estimate ``∫ log|f(x̂)| dμ`` over ``P^t``."""
    with np.errstate(divide="ignore"):
        return mc_mean(lambda z: np.log(np.abs(f.evaluate(z))), f.t, rng, n_samples, jobs)


def l2_norm_mc(f: HomogeneousForm, rng: RngState, n_samples: int = DEFAULT_SAMPLES, jobs: int = 1) -> MCEstimate:
    """Monte-Carlo oracle for ``l2_norm_squared``: the sample mean of ``|f|^2``."""
    return mc_mean(lambda z: np.abs(f.evaluate(z)) ** 2, f.t, rng, n_samples, jobs)


def sup_norm_lower_bound(f: HomogeneousForm, rng: RngState, n_samples: int = 10**4,
                         refine_steps: int = 200, starts: int = 4) -> float:
    """Certified lower bound for ``sup |f|`` on unit vectors.

    Best sampled values are polished by BFGS on the sphere; every returned value
    is attained at an explicit unit vector, hence cannot exceed the true sup.
    """
    n = f.t + 1
    pts = sample_points(f.t, n_samples, rng)
    vals = np.abs(f.evaluate(pts))
    best = float(vals.max())
    idx = np.argsort(vals)[::-1][:starts]

    def obj(v):
        z = v[:n] + 1j * v[n:]
        nz = np.linalg.norm(z)
        if nz == 0:
            return 0.0
        return -abs(f.evaluate(z / nz))

    for i in idx:
        z0 = pts[i]
        res = minimize(obj, np.concatenate([z0.real, z0.imag]), method="BFGS",
                       options={"maxiter": refine_steps, "gtol": 1e-12})
        z = res.x[:n] + 1j * res.x[n:]
        val = abs(complex(f.evaluate(z / np.linalg.norm(z))))
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# binary forms

def binary_coefficients(f: HomogeneousForm) -> list[Fraction]:
    """Coefficients of a binary form in decreasing powers of ``x_0``."""
    if f.t != 1:
        raise ValueError("binary form required")
    c = f.coeffs
    return [c.get((f.degree - k, k), Fraction(0)) for k in range(f.degree + 1)]


def sylvester_resultant(f: HomogeneousForm, g: HomogeneousForm) -> Fraction:
    """Classical Sylvester resultant of two binary forms (coefficients ordered by
    decreasing power of ``x_0``).  Zero iff the forms share a projective root."""
    a, b = binary_coefficients(f), binary_coefficients(g)
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    if size == 0:
        return Fraction(1)
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + a + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + b + [Fraction(0)] * (size - n - 1 - i))
    return rational_det(rows)


def binary_roots(coeffs: Sequence[complex], tol: float = 1e-8, zero_tol: float = 1e-13) -> list[tuple[np.ndarray, int]]:
    """Projective roots ``[alpha:beta]`` of ``sum c_k alpha^(D-k) beta^k``.

    Returns ``(unit vector (alpha, beta), multiplicity)``; roots closer than
    ``tol`` in Fubini-Study distance are merged.
    """
    c = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(c))
    if scale == 0:
        raise ValueError("form vanishes identically")
    deg = c.size - 1
    top = deg
    while top > 0 and abs(c[top]) <= zero_tol * scale:
        top -= 1
    roots: list[np.ndarray] = []
    roots += [np.array([0.0, 1.0], dtype=complex)] * (deg - top)  # alpha = 0
    if top > 0:
        for z in np.roots(c[: top + 1][::-1]):
            v = np.array([1.0, z], dtype=complex)
            roots.append(v / np.linalg.norm(v))
    return cluster(roots, tol)


def cluster(vectors: Sequence[np.ndarray], tol: float, mults: Sequence[int] | None = None) -> list[tuple[np.ndarray, int]]:
    """Greedy merge of unit vectors that are within ``tol`` in FS distance."""
    mults = list(mults) if mults is not None else [1] * len(vectors)
    groups: list[list] = []
    for v, m in zip(vectors, mults):
        for g in groups:
            r = v - g[0] * np.vdot(g[0], v)
            if np.linalg.norm(r) < tol:
                g[1] += m
                g[2].append((v, m))
                break
        else:
            groups.append([v, m, [(v, m)]])
    return [(g[0], g[1]) for g in groups]
