"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every stochastic criterion is computed by a ``run_*`` function of ``jobs``
whose result is a JSON-serializable record; criterion 10 recomputes them with
``jobs=4`` and compares the serialized bytes.
"""

import json
import math
import time
from fractions import Fraction
from functools import lru_cache

import mpmath
import pytest

from arakelov.algdist import d_divisor, d_pt
from arakelov.approx import Target, approximate_point, conjecture_experiment, random_target, scale_schedule
from arakelov.bezout import (
    CALIBRATION_SEEDS,
    CONSTANT_OF,
    VERIFICATION_SEEDS,
    EnsembleSpec,
    arithmetic_bezout_check,
    degree_slope,
    fit_constants,
    frozen_values,
    run_ensemble,
)
from arakelov.cycles import Divisor, ZeroCycle, roots_of_binary
from arakelov.exactlat import integer_primitive, orthogonal_complement
from arakelov.forms import (
    HomogeneousForm,
    harmonic,
    l2_norm_mc,
    l2_norm_squared,
    log_integral,
    random_integer_form,
    sup_norm_lower_bound,
)
from arakelov.heights import height_divisor, height_subspace, height_zero_cycle, levine_constant, stoll
from arakelov.join import join_distance, join_height_check, join_zero_cycles
from arakelov.projective import fs_distance, sample_point
from arakelov.rng import RngState

pytestmark = pytest.mark.acceptance

MC = 10**6
MASTER = 20240601
SANDWICH_CLASSES = tuple((t, d) for t in (1, 2) for d in (1, 2, 3, 4))
METRIC_CLASSES = ((1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))
ARITH_CLASSES = tuple((a, b) for a in range(1, 5) for b in range(a, 5))


def _stream(criterion: int) -> RngState:
    return RngState(MASTER).spawn(criterion)


def _dump(record) -> str:
    return json.dumps(record, sort_keys=True)


# -- criterion 2 --------------------------------------------------------------

@lru_cache(maxsize=None)
def run_norms(jobs: int) -> dict:
    base = _stream(2)
    gen = base.spawn(0).generator()
    rows = []
    for i in range(50):
        t = 1 + i % 2
        D = 1 + (i // 2) % 4
        f = random_integer_form(t, D, 10, gen)
        mc = l2_norm_mc(f, base.spawn(1, i), MC, jobs)
        li = log_integral(f, base.spawn(2, i), MC, jobs)
        sup = sup_norm_lower_bound(f, base.spawn(3, i))
        rows.append({"t": t, "D": D, "form": str(f.to_sympy().as_expr()), "l2sq": float(l2_norm_squared(f)),
                     "mc": mc.value, "mc_se": mc.std_error, "li": li.value, "li_se": li.std_error, "sup": sup})
    return {"rows": rows}


# -- criterion 3 --------------------------------------------------------------

def _random_primitive(gen, n):
    while True:
        v = [int(x) for x in gen.integers(-10, 11, size=n)]
        if any(v):
            return list(integer_primitive(v))


@lru_cache(maxsize=None)
def run_heights(jobs: int) -> dict:
    base = _stream(3)
    gen = base.spawn(0).generator()
    linear = []
    for t in (1, 2):
        for i in range(20):
            v = _random_primitive(gen, t + 1)
            h = height_divisor(HomogeneousForm.linear(v), base.spawn(1, t, i), MC, jobs)
            kernel = [list(integer_primitive(r)) for r in orthogonal_complement([v], t + 1)]
            linear.append({"t": t, "v": v, "h": h.value, "se": h.std_error, "kernel": height_subspace(kernel)})
    hx0 = height_divisor(Divisor.parse("x0", 1), base.spawn(2), MC, jobs)
    h34 = height_zero_cycle(ZeroCycle.from_integer_points([3, 4]), base.spawn(3), MC, jobs)
    pairs = []
    for i in range(20):
        t = 1 + i % 2
        f = random_integer_form(t, int(gen.integers(1, 4)), 10, gen)
        g = random_integer_form(t, int(gen.integers(1, 4)), 10, gen)
        hs = [height_divisor(Divisor(h), base.spawn(4, i, k), MC, jobs) for k, h in enumerate([f, g, f * g])]
        pairs.append({"hf": hs[0].value, "hg": hs[1].value, "hfg": hs[2].value,
                      "se": math.sqrt(sum(h.std_error ** 2 for h in hs))})
    return {"linear": linear, "x0": [hx0.value, hx0.std_error], "p34": [h34.value, h34.std_error], "pairs": pairs}


# -- criterion 4 --------------------------------------------------------------

@lru_cache(maxsize=None)
def run_identity(jobs: int) -> dict:
    base = _stream(4)
    gen = base.spawn(0).generator()
    rows = []
    for i in range(30):
        f = random_integer_form(1, 1 + i % 6, 10, gen)
        Z = roots_of_binary(f)
        k = 0
        while True:  # θ off the roots
            theta = sample_point(1, base.spawn(1, i, k))
            if min(fs_distance(theta, p) for p, _ in Z.points) > 1e-6:
                break
            k += 1
        r = d_divisor(theta, Divisor(f), base.spawn(2, i), MC, jobs)
        rows.append({"deg": f.degree, "d_divisor": r.value, "se": r.std_error, "d_pt": d_pt(theta, Z)})
    return {"rows": rows}


# -- criteria 5 and 7: calibrate, freeze, verify ---------------------------

def _fit_and_verify(kind, classes, cal_per_seed, ver_per_seed, jobs):
    cal_spec = EnsembleSpec(kind, classes, cal_per_seed, CALIBRATION_SEEDS, master_seed=MASTER)
    ver_spec = EnsembleSpec(kind, classes, ver_per_seed, VERIFICATION_SEEDS, master_seed=MASTER)
    cal = run_ensemble(cal_spec, None, jobs)
    fits = fit_constants(cal)
    frozen = frozen_values(fits)
    ver = run_ensemble(ver_spec, frozen, jobs)
    return cal, fits, ver


def _summary(reports):
    return [{"kind": r.kind, "needed": r.needed, "std": r.std_error, "holds": r.holds,
             "instance": r.instance} for r in reports]


@lru_cache(maxsize=None)
def run_sandwich(jobs: int) -> dict:
    start = time.perf_counter()
    cal, fits, ver = _fit_and_verify("sandwich", SANDWICH_CLASSES, 24, 6, jobs)
    return {"fits": {k: v.to_json() for k, v in fits.items()}, "cal": _summary(cal), "ver": _summary(ver),
            "seconds": None if jobs != 1 else time.perf_counter() - start}


@lru_cache(maxsize=None)
def run_metric(jobs: int) -> dict:
    start = time.perf_counter()
    cal, fits, ver = _fit_and_verify("metric", METRIC_CLASSES, 18, 3, jobs)
    return {"fits": {k: v.to_json() for k, v in fits.items()}, "cal": _summary(cal), "ver": _summary(ver),
            "seconds": None if jobs != 1 else time.perf_counter() - start}


# -- criterion 6 --------------------------------------------------------------

@lru_cache(maxsize=None)
def run_arithmetic(jobs: int) -> dict:
    spec = EnsembleSpec("arithmetic", ARITH_CLASSES, 5, tuple(range(10)), master_seed=MASTER)
    reports = run_ensemble(spec, None, jobs)
    closed = arithmetic_bezout_check(Divisor.parse("x0", 2), Divisor.parse("x1", 2), _stream(6), MC, jobs)
    return {"ensemble": _summary(reports), "closed": _summary([closed])[0] | {"lhs": closed.lhs, "rhs": closed.rhs}}


# -- criterion 8 --------------------------------------------------------------

def _random_rational_cycle(gen, t, n):
    pts = []
    while len(pts) < n:
        v = _random_primitive(gen, t + 1)
        if all(tuple(v) != tuple(w) and tuple(v) != tuple(-c for c in w) for w, _ in pts):
            pts.append((v, int(gen.integers(1, 3))))
    return ZeroCycle.from_integer_points(*pts)


@lru_cache(maxsize=None)
def run_join(jobs: int) -> dict:
    base = _stream(8)
    gen = base.spawn(0).generator()
    pairs = []
    for i in range(20):
        t = 1 + i % 2
        X = _random_rational_cycle(gen, t, int(gen.integers(1, 3)))
        Y = _random_rational_cycle(gen, t, int(gen.integers(1, 3)))
        chk = join_height_check(X, Y, base.spawn(1, i), MC, jobs)
        total = sum(m for _, m in join_zero_cycles(X, Y))
        pairs.append({"deg_x": X.degree, "deg_y": Y.degree, "join_deg": total, "measured": chk.measured,
                      "formula": chk.formula, "residual": chk.residual, "se": chk.std_error})
    triples = []
    for i in range(1000):
        t = 1 + i % 3
        x, y, th = (sample_point(t, base.spawn(2, i, k)) for k in range(3))
        triples.append([join_distance(x, y, th), fs_distance(th, x), fs_distance(th, y)])
    return {"pairs": pairs, "triples": triples}


# -- criterion 9 --------------------------------------------------------------

def _quadratic_target() -> Target:
    with mpmath.workdps(320):
        return Target(("1", mpmath.nstr(mpmath.sqrt(2) - 1, 300)))


@lru_cache(maxsize=None)
def run_approx(jobs: int) -> dict:
    start = time.perf_counter()
    out = []
    for seed in (0, 1, 2):
        res = conjecture_experiment(random_target(seed), range(2, 9), 2.0)
        out.append({"seed": seed, "slope": res.slope, "b_hat": res.b_hat, "height_ok": res.height_ok(),
                    "deg_ok": res.deg_ok(), "algebraic": res.algebraic_target,
                    "rows": [[r.D, r.deg, r.height, r.log_dist] for r in res.rows]})
    quad = approximate_point(_quadratic_target(), 2, scale_schedule(2.0, 2))[0]
    return {"targets": out, "quadratic": {"exact_hit": quad.exact_hit, "deg": quad.deg_alpha,
                                          "form": str(quad.form.to_sympy().as_expr())},
            "seconds": None if jobs != 1 else time.perf_counter() - start}


STOCHASTIC = {2: run_norms, 3: run_heights, 4: run_identity, 5: run_sandwich, 6: run_arithmetic,
              7: run_metric, 8: run_join, 9: run_approx}


# -- tests --------------------------------------------------------------------

def test_criterion_01_exact_constants(criterion):
    start = time.perf_counter()
    bad = []
    for p in range(11):
        oracle = sum((Fraction(1, 2 * m) for k in range(1, p + 1) for m in range(1, k + 1)), Fraction(0))
        if stoll(p) != oracle:
            bad.append(f"stoll({p})")
    for t in range(1, 7):
        for p in range(1, t + 1):
            if levine_constant(p, t) != 2 * (stoll(t) - stoll(p - 1) - stoll(t - p)):
                bad.append(f"levine({p},{t})")
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 1.0
    criterion(ok, f"stoll p<=10 exact, levine identity t<=6 exact; {elapsed:.3f}s; mismatches={bad}")
    assert ok


def test_criterion_02_norm_machinery(criterion):
    start = time.perf_counter()
    rows = run_norms(1)["rows"]
    elapsed = time.perf_counter() - start
    l2_fail, chain_fail, worst = [], [], 0.0
    for i, r in enumerate(rows):
        z = abs(r["mc"] - r["l2sq"]) / r["mc_se"]
        worst = max(worst, z)
        if z > 3:
            l2_fail.append(i)
        h = float(harmonic(r["t"]))
        lower = math.log(r["sup"]) - 0.5 * r["D"] * h <= r["li"] + 3 * r["li_se"]
        upper = r["li"] <= 0.5 * math.log(r["l2sq"]) + 3 * r["li_se"]
        if not (lower and upper):
            chain_fail.append(i)
    ok = not l2_fail and not chain_fail and elapsed < 600
    criterion(ok, f"50 forms: worst |l2 MC - exact| = {worst:.2f} sigma, l2 outside 3 sigma={l2_fail}, "
                  f"chain failures={chain_fail}; {elapsed:.0f}s")
    assert ok


def test_criterion_03_height_coherence(criterion):
    rec = run_heights(1)
    lin_err = max(abs(r["h"] - r["kernel"]) for r in rec["linear"])
    x0_err = abs(rec["x0"][0])
    p34_err = abs(rec["p34"][0] - math.log(5))
    add = [abs(p["hfg"] - p["hf"] - p["hg"]) / p["se"] for p in rec["pairs"]]
    ok = lin_err <= 5e-3 and x0_err <= 5e-3 and p34_err <= 5e-3 and max(add) <= 3
    criterion(ok, f"max |h(div l) - h(ker l)| = {lin_err:.2e} over 40 forms, |h(x0)| = {x0_err:.2e}, "
                  f"|h([3:4]) - log 5| = {p34_err:.2e}, additivity worst {max(add):.2f} sigma on 20 pairs")
    assert ok


def test_criterion_04_distance_identity(criterion):
    rows = run_identity(1)["rows"]
    z = [abs(r["d_divisor"] - r["d_pt"]) / r["se"] for r in rows]
    ok = max(z) <= 3
    criterion(ok, f"30 binary forms: worst |d_divisor - d_pt| = {max(z):.2f} sigma")
    assert ok


def _verify(rec, names, degree_of):
    fits = rec["fits"]
    failed = [r for r in rec["ver"] if not r["holds"]]
    slopes = {}
    for name in names:
        by_deg = {}
        for r in rec["ver"]:
            if CONSTANT_OF[r["kind"]] == name:
                k = degree_of(r["instance"])
                by_deg[k] = max(by_deg.get(k, -math.inf), r["needed"])
        slopes[name] = degree_slope(by_deg)
    return fits, failed, slopes


def test_criterion_05_sandwich(criterion):
    rec = run_sandwich(1)
    fits, failed, slopes = _verify(rec, ("c", "c_prime"), lambda inst: int(inst["deg_x"]))
    n_ver = len({(r["instance"]["seed"], r["instance"]["index"]) for r in rec["ver"]})
    cal_slopes = {k: fits[k]["slope"] for k in ("c", "c_prime")}
    ok = not failed and n_ver == 60 and all(s <= 0.05 for s in slopes.values()) \
        and all(s <= 0.05 for s in cal_slopes.values())
    criterion(ok, f"c={fits['c']['value']:.5f} c'={fits['c_prime']['value']:.5f} frozen from seeds 0-9; "
                  f"{n_ver} held-out instances, {len(failed)} failures; degree slopes held-out "
                  f"{ {k: round(v, 5) for k, v in slopes.items()} } calibration "
                  f"{ {k: round(v, 5) for k, v in cal_slopes.items()} }; {rec['seconds']:.0f}s")
    assert ok


def test_criterion_06_arithmetic_bezout(criterion):
    rec = run_arithmetic(1)
    failed = [r for r in rec["ensemble"] if not r["holds"]]
    closed = rec["closed"]
    closed_ok = closed["holds"] and abs(closed["lhs"]) <= 5e-3 and abs(closed["rhs"] - 1) <= 3 * closed["std"] + 5e-3
    worst = max(r["needed"] for r in rec["ensemble"])
    ok = not failed and len(rec["ensemble"]) == 50 and closed_ok
    criterion(ok, f"50 plane-curve pairs, {len(failed)} failures, worst (lhs-rhs)/degXdegY = {worst:.4f} "
                  f"vs (1/2)log 2 = {0.5 * math.log(2):.4f}; x0,x1: h(X.Y) = {closed['lhs']:.4f} <= "
                  f"{closed['rhs']:.4f} + (1/2)log 2")
    assert ok


def test_criterion_07_metric_bezout(criterion):
    rec = run_metric(1)
    fits, failed, _ = _verify(rec, ("d", "d_prime"), lambda inst: int(inst["deg_x"]) * int(inst["deg_y"]))
    stairs = [r["instance"]["staircase_ok"] for r in rec["cal"] + rec["ver"] if r["kind"] == "metric"]
    n_ver = len({(r["instance"]["seed"], r["instance"]["index"]) for r in rec["ver"]})
    by_kind = {k: sum(1 for r in failed if r["kind"] == k) for k in ("metric", "part4")}
    ok = not failed and all(stairs) and n_ver == 30 and rec["seconds"] < 1800
    criterion(ok, f"d={fits['d']['value']:.4f} d'={fits['d_prime']['value']:.4f} frozen from seeds 0-9; "
                  f"{n_ver} held-out instances, failures {by_kind}; staircase invariants "
                  f"{sum(stairs)}/{len(stairs)}; {rec['seconds']:.0f}s")
    assert ok


def test_criterion_08_join_laws(criterion):
    rec = run_join(1)
    deg_ok = all(p["join_deg"] == p["deg_x"] * p["deg_y"] for p in rec["pairs"])
    ratio = max(p["residual"] / (p["deg_x"] * p["deg_y"]) for p in rec["pairs"])
    sandwich_bad = sum(1 for d, a, b in rec["triples"] if not (min(a, b) - 1e-12 <= d <= max(a, b) + 1e-12))
    ok = deg_ok and ratio <= 5e-3 and sandwich_bad == 0
    criterion(ok, f"degree multiplicativity {'exact' if deg_ok else 'BROKEN'}; max height residual/(degX degY) "
                  f"= {ratio:.2e} on 20 pairs; joindist sandwich violations {sandwich_bad}/1000")
    assert ok


def test_criterion_09_approximation(criterion):
    rec = run_approx(1)
    t_ok = all(t["deg_ok"] and t["height_ok"] and t["slope"] < 0 and not t["algebraic"] for t in rec["targets"])
    q = rec["quadratic"]
    ok = t_ok and q["exact_hit"] and q["deg"] == 2 and rec["seconds"] < 300
    slopes = [round(t["slope"], 3) for t in rec["targets"]]
    criterion(ok, f"3 targets D=2..8 a=2: slopes {slopes}, deg<=D and h<=aD+2 {'hold' if t_ok else 'FAIL'}; "
                  f"sqrt2-1 exact hit at D=2 by {q['form']}; {rec['seconds']:.1f}s")
    assert ok


def test_criterion_10_determinism(criterion):
    differing = []
    for n, fn in STOCHASTIC.items():
        a, b = fn(1), fn(4)
        a = {k: v for k, v in a.items() if k != "seconds"}
        b = {k: v for k, v in b.items() if k != "seconds"}
        if _dump(a) != _dump(b):
            differing.append(n)
    ok = not differing
    criterion(ok, f"criteria 2-9 recomputed with jobs=4: byte-identical records; differing={differing}")
    assert ok
