"""Randomized verification of the arithmetic and metric Bézout inequalities.

Every check produces a :class:`BezoutReport` carrying the two sides of the
inequality, the degree factor the constant is multiplied by, and the
smallest constant (``needed``) that makes the inequality hold.  Constants are
fitted on calibration ensembles as maxima of ``needed`` and then frozen.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .algdist import PointOnCycleError, d_divisor, d_pt, d_pt_inf, nearest_on_cycle
from .cycles import Divisor, ImproperIntersectionError, ZeroCycle, intersect_divisor_with_line, intersect_plane_curves
from .forms import HomogeneousForm, MCEstimate, harmonic, log_integral, random_integer_form
from .heights import height_zero_cycle, stoll
from .projective import ProjectivePoint, ProjectiveSubspace, fs_distance, sample_point
from .rng import RngState

SIGMA_FACTOR = 3.0
CALIBRATION_SEEDS = tuple(range(10))
VERIFICATION_SEEDS = tuple(range(10, 20))


# -- staircase ---------------------------------------------------------------

@dataclass(frozen=True)
class Staircase:
    """``T -> (ν(T), κ(T))``; ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])``.

    ``breakpoints[0] = 0`` with value ``(0, 0)``.
    """

    breakpoints: tuple[float, ...]
    values: tuple[tuple[int, int], ...]
    deg_x: int
    deg_y: int

    def at(self, T: float) -> tuple[int, int]:
        i = int(np.searchsorted(self.breakpoints, T, side="right")) - 1
        return self.values[max(i, 0)]

    def invariants_hold(self) -> bool:
        if self.values[0] != (0, 0) or self.values[-1] != (self.deg_x, self.deg_y):
            return False
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            return False
        if not (0 <= self.breakpoints[0] and self.breakpoints[-1] <= 1):
            return False
        for (n0, k0), (n1, k1) in zip(self.values, self.values[1:]):
            if n1 < n0 or k1 < k0 or (n1, k1) == (n0, k0):
                return False
        return all(n <= self.deg_x and k <= self.deg_y for n, k in self.values)

    def projections_surjective(self) -> bool:
        nus = {n for n, _ in self.values}
        kappas = {k for _, k in self.values}
        return nus == set(range(self.deg_x + 1)) and kappas == set(range(self.deg_y + 1))


def staircase_from_distances(dx: Sequence[tuple[float, int]], dy: Sequence[tuple[float, int]],
                             eps: float = 0.0, tie_tol: float = 1e-12) -> Staircase:
    """Build the staircase from ``(distance, multiplicity)`` lists.

    Distances within ``tie_tol`` count as equal and produce one breakpoint
    raising both counters.  With ``eps > 0`` points are split into
    multiplicity one and the ``k``-th of ``n`` points (in sorted order) has its
    distance scaled by ``1 - eps * (n - k)``: the order is kept, ties are
    broken, all distances stay in ``[0, 1]``, and no merging takes place.
    """
    items = [(float(d), 0, m) for d, m in dx] + [(float(d), 1, m) for d, m in dy]
    deg_x = sum(m for _, m in dx)
    deg_y = sum(m for _, m in dy)
    if eps > 0:
        unit = sorted((d, side, 1) for d, side, m in items for _ in range(m))
        n = len(unit)
        if eps * n >= 1:
            raise ValueError("eps too large for the number of points")
        items = [(d * (1 - eps * (n - k)), side, 1) for k, (d, side, _) in enumerate(unit)]
        tie_tol = -1.0
    items.sort()
    bps, vals = [0.0], [(0, 0)]
    nu = ka = 0
    for d, side, m in items:
        if side == 0:
            nu += m
        else:
            ka += m
        if d - bps[-1] <= tie_tol:
            vals[-1] = (nu, ka)
        else:
            bps.append(d)
            vals.append((nu, ka))
    return Staircase(tuple(bps), tuple(vals), deg_x, deg_y)


def _line_distances(theta: ProjectivePoint, X: Divisor, F: ProjectiveSubspace) -> list[tuple[float, int]]:
    Z = intersect_divisor_with_line(X, F)
    return [(fs_distance(theta, p), m) for p, m in Z.points]


def staircase(theta: ProjectivePoint, X: Divisor, Y: Divisor, F_x: ProjectiveSubspace, F_y: ProjectiveSubspace,
              eps: float = 0.0, tie_tol: float = 1e-12) -> Staircase:
    """Counts of ``X . F_x`` and ``Y . F_y`` within distance ``T`` of θ."""
    return staircase_from_distances(_line_distances(theta, X, F_x), _line_distances(theta, Y, F_y), eps, tie_tol)


# -- reports -----------------------------------------------------------------

@dataclass(frozen=True)
class BezoutReport:
    """``lhs <= rhs + constant * norm`` checked within ``SIGMA_FACTOR`` standard errors.

    ``needed = (lhs - rhs) / norm`` and ``std_error`` is its Monte-Carlo error.
    ``residual`` is ``rhs + constant*norm - lhs`` (positive when the inequality holds).
    """

    kind: str
    lhs: float
    rhs: float
    norm: float
    needed: float
    std_error: float = 0.0
    constant: float | None = None
    instance: dict = field(default_factory=dict)
    breakpoints: tuple = ()

    @property
    def residual(self) -> float | None:
        if self.constant is None:
            return None
        return self.rhs + self.constant * self.norm - self.lhs

    @property
    def holds(self) -> bool | None:
        if self.constant is None:
            return None
        return self.needed <= self.constant + SIGMA_FACTOR * self.std_error + 1e-12

    def with_constant(self, constant: float) -> "BezoutReport":
        return BezoutReport(self.kind, self.lhs, self.rhs, self.norm, self.needed, self.std_error,
                            constant, self.instance, self.breakpoints)

    def to_json(self) -> dict:
        out = asdict(self)
        out["residual"] = self.residual
        out["holds"] = self.holds
        return out


def _coords(p: ProjectivePoint) -> list:
    return [[float(c.real), float(c.imag)] for c in p.unit]


def _report(kind, lhs, rhs, norm, std, constant=None, instance=None, breakpoints=()) -> BezoutReport:
    return BezoutReport(kind, lhs, rhs, norm, (lhs - rhs) / norm, std / norm, constant, instance or {}, breakpoints)


# -- shared evaluation of a plane pair ----------------------------------------

@dataclass
class PairData:
    """All θ-dependent and θ-independent quantities of a pair of plane curves."""

    theta: ProjectivePoint
    X: Divisor
    Y: Divisor
    Z: ZeroCycle
    i_x: MCEstimate
    i_y: MCEstimate
    i_xy: MCEstimate
    log_f: float
    log_g: float
    dist_x: float
    dist_y: float
    line_x: ProjectiveSubspace | None = None
    line_y: ProjectiveSubspace | None = None

    @property
    def deg(self) -> tuple[int, int]:
        return self.X.degree, self.Y.degree

    def h_x(self) -> float:
        return self.X.degree * float(stoll(2)) + self.i_x.value

    def h_y(self) -> float:
        return self.Y.degree * float(stoll(2)) + self.i_y.value

    def h_xy(self) -> float:
        return self.i_xy.value + 0.5 * self.Z.degree * float(harmonic(2))

    def D_x(self) -> float:
        return self.log_f - self.i_x.value - 0.5 * self.X.degree * float(harmonic(2))

    def D_y(self) -> float:
        return self.log_g - self.i_y.value - 0.5 * self.Y.degree * float(harmonic(2))

    def D_xy(self) -> float:
        return d_pt(self.theta, self.Z)

    def std(self, a: float, b: float, c: float) -> float:
        """Error of ``a I_X + b I_Y + c I_XY``."""
        return math.sqrt((a * self.i_x.std_error) ** 2 + (b * self.i_y.std_error) ** 2
                         + (c * self.i_xy.std_error) ** 2)

    def descriptor(self) -> dict:
        return {"theta": _coords(self.theta),
                "X": str(self.X.form.to_sympy().as_expr()), "Y": str(self.Y.form.to_sympy().as_expr()),
                "deg_x": self.X.degree, "deg_y": self.Y.degree}


def pair_data(theta: ProjectivePoint, X: Divisor, Y: Divisor, rng: RngState, n_samples: int = 10**6,
              jobs: int = 1, search_budget: int = 512, lines: bool = True,
              Z: ZeroCycle | None = None) -> PairData:
    """Evaluate the ingredients shared by the metric checks.

    Streams: 0, 1, 2 for the integrals over X, Y, X.Y; 3, 4 for distance
    searches; 5, 6 for the witness lines.
    """
    if Z is None:
        Z = intersect_plane_curves(X, Y)
    i_x = log_integral(X.form, rng.spawn(0), n_samples, jobs)
    i_y = log_integral(Y.form, rng.spawn(1), n_samples, jobs)
    i_xy = height_zero_cycle(Z, rng.spawn(2), n_samples, jobs)
    i_xy = MCEstimate(i_xy.value - 0.5 * Z.degree * float(harmonic(2)), i_xy.std_error, n_samples)
    fv = abs(complex(X.form.evaluate(theta.unit)))
    gv = abs(complex(Y.form.evaluate(theta.unit)))
    if fv < 1e-300 or gv < 1e-300:
        raise PointOnCycleError()
    dist_x, _ = nearest_on_cycle(theta, X, search_budget, rng.spawn(3))
    dist_y, _ = nearest_on_cycle(theta, Y, search_budget, rng.spawn(4))
    data = PairData(theta, X, Y, Z, i_x, i_y, i_xy, math.log(fv), math.log(gv), dist_x, dist_y)
    if lines:
        data.line_x = d_pt_inf(theta, X, search_budget // 2, rng.spawn(5)).witness
        data.line_y = d_pt_inf(theta, Y, search_budget // 2, rng.spawn(6)).witness
    return data


def metric_report(data: PairData, d: float | None = None, eps: float = 0.0) -> tuple[BezoutReport, Staircase]:
    """Evaluate the metric inequality at every staircase breakpoint and report
    the worst one."""
    dx_, dy_ = data.deg
    stair = staircase(data.theta, data.X, data.Y, data.line_x, data.line_y, eps)
    log_xy = min(data.dist_x, data.dist_y)
    Dx, Dy, Dxy = data.D_x(), data.D_y(), data.D_xy()
    hx, hy, hxy = data.h_x(), data.h_y(), data.h_xy()
    norm = dx_ * dy_
    rows = []
    for T, (nu, ka) in zip(stair.breakpoints, stair.values):
        lhs = nu * ka * log_xy + Dxy + hxy
        rhs = ka * Dx + nu * Dy + dy_ * hx + dx_ * hy
        # I_X enters with coefficient (κ - deg Y), I_Y with (ν - deg X), I_XY with 1
        std = data.std(ka - dy_, nu - dx_, 1.0)
        rows.append((T, nu, ka, lhs, rhs, (lhs - rhs) / norm, std / norm))
    worst = max(rows, key=lambda r: r[5])
    report = BezoutReport("metric", worst[3], worst[4], norm, worst[5], worst[6], d, data.descriptor(), tuple(rows))
    return report, stair


def part4_report(data: PairData, d_prime: float | None = None, swap: bool = False) -> BezoutReport:
    """``D(θ,X.Y) + h(X.Y) <= D(θ,Y) + deg Y h(X) + deg X h(Y) + d' deg X deg Y``
    with ``X`` the divisor nearer to θ (``swap`` exchanges the roles)."""
    dx_, dy_ = data.deg
    near_is_x = not swap
    if near_is_x and data.dist_x > data.dist_y + 1e-12 or (not near_is_x) and data.dist_y > data.dist_x + 1e-12:
        raise ValueError("precondition: the first divisor must be nearest to theta")
    far_D = data.D_y() if near_is_x else data.D_x()
    lhs = data.D_xy() + data.h_xy()
    rhs = far_D + dy_ * data.h_x() + dx_ * data.h_y()
    # far D carries -I_far; heights carry +I; net coefficients below
    if near_is_x:
        std = data.std(-dy_, 1.0 - dx_, 1.0)
    else:
        std = data.std(1.0 - dy_, -dx_, 1.0)
    inst = data.descriptor() | {"near": "Y" if swap else "X"}
    return _report("part4", lhs, rhs, dx_ * dy_, std, d_prime, inst)


def part4_reports(data: PairData, d_prime: float | None = None, tie_tol: float = 1e-12) -> list[BezoutReport]:
    """Part-4 reports in the admissible orientation(s); both when equidistant."""
    out = []
    if data.dist_x <= data.dist_y + tie_tol:
        out.append(part4_report(data, d_prime, swap=False))
    if data.dist_y <= data.dist_x + tie_tol:
        out.append(part4_report(data, d_prime, swap=True))
    return out


def metric_bezout_check(theta: ProjectivePoint, X: Divisor, Y: Divisor, rng: RngState, d: float | None = None,
                        n_samples: int = 10**6, jobs: int = 1, search_budget: int = 512,
                        eps: float = 0.0) -> BezoutReport:
    data = pair_data(theta, X, Y, rng, n_samples, jobs, search_budget)
    return metric_report(data, d, eps)[0]


def part4_check(theta: ProjectivePoint, X: Divisor, Y: Divisor, rng: RngState, d_prime: float | None = None,
                n_samples: int = 10**6, jobs: int = 1, search_budget: int = 512) -> BezoutReport:
    """Requires ``|θ, X| <= |θ, Y|``."""
    data = pair_data(theta, X, Y, rng, n_samples, jobs, search_budget, lines=False)
    return part4_report(data, d_prime)


def arithmetic_bezout_check(X: Divisor, Y: Divisor, rng: RngState, n_samples: int = 10**6, jobs: int = 1,
                            Z: ZeroCycle | None = None) -> BezoutReport:
    """``h(X.Y) <= deg Y h(X) + deg X h(Y) + (1/2) log 2 deg X deg Y`` in ``P^2``."""
    if Z is None:
        Z = intersect_plane_curves(X, Y)
    i_x = log_integral(X.form, rng.spawn(0), n_samples, jobs)
    i_y = log_integral(Y.form, rng.spawn(1), n_samples, jobs)
    h_xy = height_zero_cycle(Z, rng.spawn(2), n_samples, jobs)
    s2 = float(stoll(2))
    hx = X.degree * s2 + i_x.value
    hy = Y.degree * s2 + i_y.value
    norm = X.degree * Y.degree
    std = math.sqrt(h_xy.std_error ** 2 + (Y.degree * i_x.std_error) ** 2 + (X.degree * i_y.std_error) ** 2)
    inst = {"X": str(X.form.to_sympy().as_expr()), "Y": str(Y.form.to_sympy().as_expr()),
            "deg_x": X.degree, "deg_y": Y.degree, "h_x": hx, "h_y": hy, "h_xy": h_xy.value}
    return _report("arithmetic", h_xy.value, Y.degree * hx + X.degree * hy, norm, std, 0.5 * math.log(2), inst)


def sandwich_reports(theta: ProjectivePoint, X: Divisor, rng: RngState, n_samples: int = 10**6, jobs: int = 1,
                     search_budget: int = 512, c: float | None = None,
                     c_prime: float | None = None) -> tuple[BezoutReport, BezoutReport]:
    """``deg X log|θ,X| <= D(θ,X) + c deg X`` and ``D(θ,X) <= log|θ,X| + c' deg X``."""
    D = d_divisor(theta, X, rng.spawn(0), n_samples, jobs)
    dist, _ = nearest_on_cycle(theta, X, search_budget, rng.spawn(1))
    n = X.degree
    inst = {"theta": _coords(theta), "X": str(X.form.to_sympy().as_expr()),
            "t": X.t, "deg_x": n, "D": D.value, "log_dist": dist}
    lower = _report("sandwich_lower", n * dist, D.value, n, D.std_error, c, inst)
    upper = _report("sandwich_upper", D.value, dist, n, D.std_error, c_prime, inst)
    return lower, upper


def pair_log_distance(X: ZeroCycle, Y: ZeroCycle, tol: float = 1e-10) -> float:
    """``D(X, Y) = sum n_x n_y log|x, y|`` for zero-cycles with disjoint supports."""
    total = 0.0
    for x, m in X.points:
        for y, n in Y.points:
            d = fs_distance(x, y)
            if d <= tol:
                raise ValueError("support overlap")
            total += m * n * math.log(d)
    return total


def triangle_check(theta: ProjectivePoint, X: ZeroCycle, Y: ZeroCycle, d_bar: float | None = None) -> BezoutReport:
    """``D(X,Y) <= max(D(θ,X), D(θ,Y)) + d̄' deg X deg Y + log 2`` in ``P^1``."""
    if X.t != 1 or Y.t != 1:
        raise ValueError("zero-cycles in P^1 required")
    lhs = pair_log_distance(X, Y)
    rhs = max(d_pt(theta, X), d_pt(theta, Y)) + math.log(2)
    inst = {"theta": _coords(theta), "deg_x": X.degree, "deg_y": Y.degree}
    return _report("triangle", lhs, rhs, X.degree * Y.degree, 0.0, d_bar, inst)


# -- ensembles ---------------------------------------------------------------

KINDS = ("sandwich", "metric", "arithmetic", "triangle")
_KIND_ID = {k: i for i, k in enumerate(KINDS)}
CONSTANT_OF = {"sandwich_lower": "c", "sandwich_upper": "c_prime", "metric": "d", "part4": "d_prime",
               "triangle": "d_bar_prime", "arithmetic": "arithmetic"}


@dataclass(frozen=True)
class EnsembleSpec:
    """A seeded ensemble of random instances.

    ``classes`` are degree classes, cycled through by instance index:
    ``(t, deg)`` for ``sandwich``, ``(deg_x, deg_y)`` for ``metric`` and
    ``arithmetic`` (plane curves), ``(#X, #Y)`` point counts for ``triangle``.
    """

    kind: str
    classes: tuple[tuple[int, int], ...]
    per_seed: int
    seeds: tuple[int, ...]
    coef_bound: int = 10
    n_samples: int = 200_000
    search_budget: int = 512
    master_seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        object.__setattr__(self, "classes", tuple(tuple(int(v) for v in c) for c in self.classes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.classes or self.per_seed < 1 or not self.seeds:
            raise ValueError("empty ensemble")

    def with_seeds(self, seeds: Iterable[int]) -> "EnsembleSpec":
        return replace(self, seeds=tuple(seeds))

    def with_master_seed(self, master_seed: int) -> "EnsembleSpec":
        return replace(self, master_seed=int(master_seed))

    def instances(self) -> list[tuple[int, int, tuple[int, int]]]:
        """``(seed, index, class)`` triples in a fixed order."""
        out = []
        k = 0
        for s in self.seeds:
            for i in range(self.per_seed):
                out.append((s, i, self.classes[k % len(self.classes)]))
                k += 1
        return out

    def to_json(self) -> dict:
        return {"kind": self.kind, "classes": [list(c) for c in self.classes], "per_seed": self.per_seed,
                "seeds": list(self.seeds), "coef_bound": self.coef_bound, "n_samples": self.n_samples,
                "search_budget": self.search_budget, "master_seed": self.master_seed}

    @classmethod
    def from_json(cls, obj: dict) -> "EnsembleSpec":
        return cls(obj["kind"], tuple(tuple(c) for c in obj["classes"]), int(obj["per_seed"]),
                   tuple(obj["seeds"]), int(obj.get("coef_bound", 10)), int(obj.get("n_samples", 200_000)),
                   int(obj.get("search_budget", 512)), int(obj.get("master_seed", 0)))

    @classmethod
    def load(cls, path) -> "EnsembleSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def random_divisor(t: int, degree: int, bound: int, gen: np.random.Generator) -> Divisor:
    while True:
        f = random_integer_form(t, degree, bound, gen)
        try:
            return Divisor(f)
        except ValueError:  # pragma: no cover - constant form after content removal cannot happen
            continue


def random_plane_pair(dx: int, dy: int, bound: int, gen: np.random.Generator,
                      tries: int = 50) -> tuple[Divisor, Divisor, ZeroCycle]:
    """Random plane curves meeting properly, with their intersection cycle."""
    for _ in range(tries):
        X = random_divisor(2, dx, bound, gen)
        Y = random_divisor(2, dy, bound, gen)
        try:
            return X, Y, intersect_plane_curves(X, Y)
        except (ImproperIntersectionError, ArithmeticError):
            continue
    raise ArithmeticError("could not draw a proper pair")


def random_theta(t: int, gen_state: RngState, avoid: Sequence[HomogeneousForm] = ()) -> ProjectivePoint:
    k = 0
    while True:
        th = sample_point(t, gen_state.spawn(k))
        if all(abs(complex(f.evaluate(th.unit))) > 1e-12 for f in avoid):
            return th
        k += 1


def _random_points_p1(n: int, gen: np.random.Generator) -> ZeroCycle:
    z = gen.standard_normal((n, 2)) + 1j * gen.standard_normal((n, 2))
    return ZeroCycle(1, tuple((ProjectivePoint(v), 1) for v in z))


def run_instance(spec: EnsembleSpec, seed: int, index: int, cls: tuple[int, int],
                 constants: dict | None = None, jobs: int = 1) -> list[BezoutReport]:
    """Reports of one ensemble instance; deterministic in ``(master seed, kind, seed, index)``."""
    constants = constants or {}
    base = RngState(spec.master_seed).spawn(seed, _KIND_ID[spec.kind], index)
    gen = base.spawn(0).generator()
    tag = {"seed": seed, "index": index, "class": list(cls)}

    def tagged(reports):
        out = []
        for r in reports:
            c = constants.get(CONSTANT_OF[r.kind], r.constant)
            out.append(BezoutReport(r.kind, r.lhs, r.rhs, r.norm, r.needed, r.std_error, c,
                                    tag | r.instance, r.breakpoints))
        return out

    if spec.kind == "sandwich":
        t, deg = cls
        X = random_divisor(t, deg, spec.coef_bound, gen)
        theta = random_theta(t, base.spawn(1), [X.form])
        return tagged(sandwich_reports(theta, X, base.spawn(2), spec.n_samples, jobs, spec.search_budget))
    if spec.kind == "arithmetic":
        X, Y, Z = random_plane_pair(*cls, spec.coef_bound, gen)
        return tagged([arithmetic_bezout_check(X, Y, base.spawn(2), spec.n_samples, jobs, Z)])
    if spec.kind == "metric":
        X, Y, Z = random_plane_pair(*cls, spec.coef_bound, gen)
        theta = random_theta(2, base.spawn(1), [X.form, Y.form])
        data = pair_data(theta, X, Y, base.spawn(2), spec.n_samples, jobs, spec.search_budget, Z=Z)
        metric, stair = metric_report(data)
        inst = {"staircase_ok": stair.invariants_hold()}
        metric = BezoutReport(metric.kind, metric.lhs, metric.rhs, metric.norm, metric.needed, metric.std_error,
                              None, metric.instance | inst, metric.breakpoints)
        return tagged([metric] + part4_reports(data))
    # triangle
    nx, ny = cls
    X = _random_points_p1(nx, gen)
    Y = _random_points_p1(ny, gen)
    theta = random_theta(1, base.spawn(1))
    return tagged([triangle_check(theta, X, Y)])


def run_ensemble(spec: EnsembleSpec, constants: dict | None = None, jobs: int = 1) -> list[BezoutReport]:
    """All reports, in instance order.  ``jobs`` is forwarded to the
    Monte-Carlo integrals, which are deterministic in the worker count."""
    reports = []
    for seed, index, cls in spec.instances():
        reports.extend(run_instance(spec, seed, index, cls, constants, jobs))
    return reports


@dataclass(frozen=True)
class ConstantFit:
    """Fitted constant: maximum of ``needed`` with per-degree diagnostics."""

    name: str
    value: float
    n_reports: int
    by_degree: dict
    slope: float

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "n_reports": self.n_reports,
                "by_degree": {str(k): v for k, v in self.by_degree.items()}, "slope": self.slope}


def _degree_key(r: BezoutReport) -> int:
    if r.kind.startswith("sandwich"):
        return int(r.instance["deg_x"])
    return int(r.instance["deg_x"]) * int(r.instance["deg_y"])


def degree_slope(by_degree: dict) -> float:
    """Least-squares slope of the per-degree maxima against the degree factor."""
    if len(by_degree) < 2:
        return 0.0
    x = np.array(sorted(by_degree), dtype=float)
    y = np.array([by_degree[k] for k in sorted(by_degree)])
    return float(np.polyfit(x, y, 1)[0])


def fit_constants(reports: Sequence[BezoutReport]) -> dict[str, ConstantFit]:
    groups: dict[str, list[BezoutReport]] = {}
    for r in reports:
        groups.setdefault(CONSTANT_OF[r.kind], []).append(r)
    fits = {}
    for name, rs in groups.items():
        by_deg: dict[int, float] = {}
        for r in rs:
            k = _degree_key(r)
            by_deg[k] = max(by_deg.get(k, -math.inf), r.needed)
        fits[name] = ConstantFit(name, max(r.needed for r in rs), len(rs), dict(sorted(by_deg.items())),
                                 degree_slope(by_deg))
    return fits


def estimate_constants(spec: EnsembleSpec, jobs: int = 1) -> dict[str, ConstantFit]:
    """Fit every constant the ensemble exercises (see :data:`CONSTANT_OF`)."""
    return fit_constants(run_ensemble(spec, None, jobs))


def frozen_values(fits: dict[str, ConstantFit]) -> dict[str, float]:
    return {k: v.value for k, v in fits.items()}
