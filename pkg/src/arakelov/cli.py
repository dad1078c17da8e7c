"""Command-line front end.

Exit codes: 0 success, 1 a checked inequality failed, 2 invalid input,
3 numeric failure (reconstruction, overflow, no generic projection).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .rng import SEED_ENV, RngState, default_seed

EXIT_OK, EXIT_CHECK_FAILED, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3
MIN_SAMPLES = 10**4


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int | None
    n_samples: int
    jobs: int = 1
    output_path: str | None = None
    format: str = "json"
    tolerance_overrides: dict = field(default_factory=dict)

    def rng(self) -> RngState:
        if self.seed is None:
            raise ValidationError(f"a seed is required (--seed or {SEED_ENV})")
        return RngState(self.seed)


# -- serialization -------------------------------------------------------------

def rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _clean(obj):
    """Make a report JSON-safe: non-finite reals become strings, tuples lists."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False, ensure_ascii=False) + "\n"


def dumps_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in _clean(list(row))])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def emit(cfg: RunConfig, text: str):
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- input parsing -------------------------------------------------------------

def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc


def read_form(args, name: str = "form", expr_name: str = "expr"):
    from .forms import HomogeneousForm

    path = getattr(args, name, None)
    expr = getattr(args, expr_name, None)
    if path:
        return HomogeneousForm.from_json(_load_json(path))
    if expr:
        if args.t is None:
            raise ValidationError("--t is required with an expression")
        return HomogeneousForm.parse(expr, args.t)
    raise ValidationError(f"--{name} or --{expr_name.replace('_', '-')} is required")


def parse_point(text: str):
    from .projective import ProjectivePoint

    try:
        val = json.loads(text)
    except json.JSONDecodeError:
        val = [v.strip() for v in text.split(",")]
    if not isinstance(val, list):
        raise ValidationError("a point is a list of coordinates")
    try:
        if all(isinstance(v, int) for v in val):
            return ProjectivePoint.from_integers(val)
        coords = [v if isinstance(v, list) else complex(v) if isinstance(v, str) else v for v in val]
        return ProjectivePoint(coords)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad point {text!r}: {exc}") from exc


def read_cycle(path: str):
    from .cycles import ZeroCycle

    return ZeroCycle.from_json(_load_json(path))


# -- subcommands ---------------------------------------------------------------

def cmd_stoll(args, cfg):
    from .heights import levine_constant, stoll

    if args.p < 0:
        raise ValidationError("--p must be nonnegative")
    if cfg.format == "json":
        out = {"p": args.p, "stoll": rational(stoll(args.p))}
        if args.t is not None:
            out["levine"] = rational(levine_constant(args.p, args.t))
        emit(cfg, dumps_json(out))
    else:
        emit(cfg, rational(stoll(args.p)) + "\n")
    return EXIT_OK


def cmd_norms(args, cfg):
    from .forms import harmonic, l2_norm_mc, l2_norm_squared, log_integral, sup_norm_lower_bound

    f = read_form(args)
    rng = cfg.rng()
    l2sq = l2_norm_squared(f)
    mc = l2_norm_mc(f, rng.spawn(0), cfg.n_samples, cfg.jobs)
    li = log_integral(f, rng.spawn(1), cfg.n_samples, cfg.jobs)
    sup = sup_norm_lower_bound(f, rng.spawn(2))
    log_l2 = 0.5 * math.log(float(l2sq))
    lower = math.log(sup) - 0.5 * f.degree * float(harmonic(f.t))
    out = {
        "l2_squared": rational(l2sq), "l2": math.sqrt(float(l2sq)),
        "l2_squared_mc": {"value": mc.value, "std_error": mc.std_error},
        "log_integral": {"value": li.value, "std_error": li.std_error},
        "sup_lower_bound": sup,
        "chain": {"log_sup_minus_half_D_H": lower, "log_integral": li.value, "log_l2": log_l2,
                  "holds": lower <= li.value + 3 * li.std_error and li.value <= log_l2 + 3 * li.std_error},
    }
    emit(cfg, dumps_json(out))
    return EXIT_OK


def cmd_integrate(args, cfg):
    from .forms import log_integral

    f = read_form(args)
    est = log_integral(f, cfg.rng(), cfg.n_samples, cfg.jobs)
    emit(cfg, dumps_json({"value": est.value, "std_error": est.std_error, "n_samples": est.n_samples}))
    return EXIT_OK


def cmd_height(args, cfg):
    from .cycles import Divisor
    from .heights import height_divisor, height_subspace, height_zero_cycle

    if args.subspace:
        rows = [[int(Fraction(c)) for c in v] for v in _load_json(args.subspace)]
        emit(cfg, dumps_json({"value": height_subspace(rows), "std_error": 0.0}))
        return EXIT_OK
    if args.points:
        Z = read_cycle(args.points)
        h = height_zero_cycle(Z, cfg.rng(), cfg.n_samples, cfg.jobs)
        emit(cfg, dumps_json({"value": h.value, "std_error": h.std_error}))
        return EXIT_OK
    X = Divisor(read_form(args, "divisor"))
    h = height_divisor(X, cfg.rng(), cfg.n_samples, cfg.jobs)
    out = {"value": h.value, "std_error": h.std_error}
    if h.note:
        out["note"] = h.note
    emit(cfg, dumps_json(out))
    return EXIT_OK


def cmd_dist(args, cfg):
    from .algdist import d_divisor, d_pt, d_pt_inf, dist_to_cycle
    from .cycles import Divisor

    theta = parse_point(args.theta)
    rng = cfg.rng()
    if args.points:
        Z = read_cycle(args.points)
        out = {"point_sum": {"value": d_pt(theta, Z), "method": "point_sum", "std_error": 0.0},
               "log_dist": dist_to_cycle(theta, Z)}
    else:
        X = Divisor(read_form(args, "divisor"))
        out = {"divisor_identity": d_divisor(theta, X, rng.spawn(0), cfg.n_samples, cfg.jobs).to_json(),
               "log_dist": dist_to_cycle(theta, X, args.budget, rng.spawn(1)),
               "subspace_search": d_pt_inf(theta, X, args.budget, rng.spawn(2)).to_json()}
    emit(cfg, dumps_json(out))
    return EXIT_OK


def cmd_intersect(args, cfg):
    from .cycles import Divisor, chow_form_zero_cycle, intersect_divisor_with_line, intersect_plane_curves
    from .forms import HomogeneousForm
    from .projective import ProjectiveSubspace

    if args.t is None:
        raise ValidationError("--t is required")
    X = Divisor(HomogeneousForm.parse(args.f, args.t))
    if args.g:
        Z = intersect_plane_curves(X, Divisor(HomogeneousForm.parse(args.g, args.t)))
    elif args.line:
        pts = [parse_point(p).unit for p in args.line]
        Z = intersect_divisor_with_line(X, ProjectiveSubspace.span(*pts))
    else:
        raise ValidationError("--g or two --line points are required")
    out = {"cycle": Z.to_json(), "degree": Z.degree}
    if args.g:
        out["chow_form"] = chow_form_zero_cycle(Z).to_json()
    emit(cfg, dumps_json(out))
    return EXIT_OK


def cmd_join(args, cfg):
    from .join import join_distance, join_height_check, join_zero_cycles

    X, Y = read_cycle(args.x), read_cycle(args.y)
    lines = join_zero_cycles(X, Y)
    out = {"degree": sum(m for _, m in lines),
           "lines": [{"generators": [[[float(c.real), float(c.imag)] for c in g] for g in ln.generators], "mult": m}
                     for ln, m in lines]}
    if args.theta:
        theta = parse_point(args.theta)
        out["distances"] = [join_distance(ln.x, ln.y, theta) for ln, _ in lines]
    if args.check_height:
        chk = join_height_check(X, Y, cfg.rng(), cfg.n_samples, cfg.jobs)
        out["height"] = {"measured": chk.measured, "formula": chk.formula, "residual": chk.residual,
                         "std_error": chk.std_error}
    emit(cfg, dumps_json(out))
    return EXIT_OK


BEZOUT_HEADER = ("instance", "kind", "seed", "index", "deg_x", "deg_y", "lhs", "rhs", "residual", "needed",
                 "constant", "std_error", "holds")


def cmd_bezout(args, cfg):
    from .bezout import CALIBRATION_SEEDS, EnsembleSpec, fit_constants, frozen_values, run_ensemble

    try:
        spec = EnsembleSpec.load(args.ensemble) if args.ensemble else None
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad ensemble spec: {exc}") from exc
    if spec is None:
        raise ValidationError("--ensemble is required")
    if cfg.seed is not None:
        spec = spec.with_master_seed(cfg.seed)
    if args.constants:
        constants = {k: float(v) for k, v in _load_json(args.constants).items()}
        fits = None
    else:
        cal_seeds = _parse_seeds(args.calibration_seeds) if args.calibration_seeds else CALIBRATION_SEEDS
        fits = fit_constants(run_ensemble(spec.with_seeds(cal_seeds), None, cfg.jobs))
        constants = frozen_values(fits)
    reports = run_ensemble(spec, constants, cfg.jobs)
    rows = []
    for i, r in enumerate(reports):
        rows.append((i, r.kind, r.instance.get("seed"), r.instance.get("index"), r.instance.get("deg_x"),
                     r.instance.get("deg_y"), r.lhs, r.rhs, r.residual, r.needed, r.constant, r.std_error,
                     r.holds))
    if cfg.format == "csv":
        emit(cfg, dumps_csv(BEZOUT_HEADER, rows))
    else:
        out = {"constants": constants, "reports": [dict(zip(BEZOUT_HEADER, row)) for row in rows]}
        if fits:
            out["fits"] = {k: v.to_json() for k, v in fits.items()}
        emit(cfg, dumps_json(out))
    return EXIT_OK if all(r.holds is not False for r in reports) else EXIT_CHECK_FAILED


def _parse_seeds(text: str) -> tuple[int, ...]:
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


APPROX_HEADER = ("D", "deg", "height", "log_dist")


def cmd_approx(args, cfg):
    from .approx import Target, conjecture_experiment, random_target

    if args.theta:
        theta = Target(tuple(c.strip() for c in args.theta.split(",")))
    else:
        if cfg.seed is None:
            raise ValidationError("--theta or a seed is required")
        theta = random_target(cfg.seed, args.digits)
    if theta.t != 1:
        raise ValidationError("approx needs a point of P^1")
    if args.dmax < 2:
        raise ValidationError("--dmax must be at least 2")
    res = conjecture_experiment(theta, range(2, args.dmax + 1), args.a)
    rows = [(r.D, r.deg, r.height, r.log_dist) for r in res.rows]
    if cfg.format == "csv":
        emit(cfg, dumps_csv(APPROX_HEADER, rows))
    else:
        emit(cfg, dumps_json({"rows": [dict(zip(APPROX_HEADER, r)) | {"exact_hit": x.exact_hit}
                                       for r, x in zip(rows, res.rows)],
                              "slope": res.slope, "b_hat": res.b_hat, "algebraic_target": res.algebraic_target,
                              "height_ok": res.height_ok(), "deg_ok": res.deg_ok()}))
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV})")
    common.add_argument("--n", type=int, default=10**6, help="Monte-Carlo samples (>= 10^4)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    p = argparse.ArgumentParser(prog="arakelov", description="Heights, algebraic distances and Bézout checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stoll", parents=[common], help="Stoll number sigma_p")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--t", type=int, default=None, help="also report the Levine constant for (p, t)")

    def form_args(sp_, name="form"):
        sp_.add_argument(f"--{name}", default=None, help="form JSON file")
        sp_.add_argument("--expr", default=None, help="form as an expression in x0..xt")
        sp_.add_argument("--t", type=int, default=None)

    s = sub.add_parser("norms", parents=[common], help="L2 norm, log-integral and sup-norm chain")
    form_args(s)
    s = sub.add_parser("integrate", parents=[common], help="Monte-Carlo integral of log|f|")
    form_args(s)

    s = sub.add_parser("height", parents=[common], help="height of a divisor, zero-cycle or subspace")
    form_args(s, "divisor")
    s.add_argument("--points", default=None, help="zero-cycle JSON file")
    s.add_argument("--subspace", default=None, help="JSON list of integer basis vectors")

    s = sub.add_parser("dist", parents=[common], help="algebraic distances of a point to a cycle")
    s.add_argument("--theta", required=True)
    form_args(s, "divisor")
    s.add_argument("--points", default=None)
    s.add_argument("--budget", type=int, default=512, help="line-search directions")

    s = sub.add_parser("intersect", parents=[common], help="intersection zero-cycle and its Chow form")
    s.add_argument("--f", required=True)
    s.add_argument("--g", default=None)
    s.add_argument("--line", action="append", default=None, help="point on the line (give twice)")
    s.add_argument("--t", type=int, default=None)

    s = sub.add_parser("join", parents=[common], help="join of two zero-cycles")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--theta", default=None)
    s.add_argument("--check-height", action="store_true")

    s = sub.add_parser("bezout-check", parents=[common], help="run a verification ensemble")
    s.add_argument("--ensemble", required=True)
    s.add_argument("--constants", default=None, help="JSON of frozen constants; fitted if absent")
    s.add_argument("--calibration-seeds", default=None, help="e.g. 0-9")

    s = sub.add_parser("approx", parents=[common], help="algebraic approximation experiment in P^1")
    s.add_argument("--theta", default=None, help="comma-separated decimal coordinates")
    s.add_argument("--dmax", type=int, default=8)
    s.add_argument("--a", type=float, default=2.0)
    s.add_argument("--digits", type=int, default=300, help="digits of a seeded random target")
    return p


COMMANDS = {"stoll": cmd_stoll, "norms": cmd_norms, "integrate": cmd_integrate, "height": cmd_height,
            "dist": cmd_dist, "intersect": cmd_intersect, "join": cmd_join, "bezout-check": cmd_bezout,
            "approx": cmd_approx}
DEFAULT_FORMAT = {"stoll": "csv", "bezout-check": "csv", "approx": "csv"}


def run(argv: Sequence[str] | None = None) -> int:
    from .cycles import ImproperIntersectionError, ReconstructionError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    seed = args.seed if args.seed is not None else default_seed()
    cfg = RunConfig(seed, args.n, args.jobs, args.output, args.format or DEFAULT_FORMAT.get(args.command, "json"))
    try:
        if cfg.n_samples < MIN_SAMPLES:
            raise ValidationError(f"--n must be at least {MIN_SAMPLES}")
        if cfg.jobs < 1:
            raise ValidationError("--jobs must be positive")
        if seed is not None and not 0 <= seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        return COMMANDS[args.command](args, cfg)
    except (ReconstructionError, OverflowError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, ImproperIntersectionError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
