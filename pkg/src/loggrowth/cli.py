"""Command-line front end.

Subcommands: eval, classify, prepare, counterexample (verify | trace),
cones, certify-ray, survey.  Reports are written to disk by default
(``--stdout`` flips this for quick inspection); every JSON report embeds
the tool version and the full run configuration, and re-running with an
embedded configuration (``survey --config report.json``) reproduces the
report byte-for-byte except for the timestamp field.

Exit codes: 0 success, 2 input error, 3 a verification suite reported
failures (the report is still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from fractions import Fraction
from typing import Sequence

from . import __version__
from . import certificates as cert
from . import cones as cn
from . import counterexample as cx
from . import expressions as ex
from . import multiseries as ms
from .rays import StandardizedRay, standardize_ray

PRECISION_ENV = "LOGGROWTH_PRECISION"


class InputError(Exception):
    pass


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return 128
    try:
        return max(64, int(raw))
    except ValueError:
        raise InputError(f"{PRECISION_ENV} must be an integer, got {raw!r}")


def _parse_vector(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(Fraction(part.strip())) for part in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse vector {text!r}; expected e.g. '0,1/2'")


def _parse_ray(o_text: str, v_text: str) -> StandardizedRay:
    o = _parse_vector(o_text)
    v = _parse_vector(v_text)
    if len(o) != len(v):
        raise InputError("--o and --v must have the same dimension")
    norm = math.sqrt(sum(c * c for c in v))
    if norm == 0.0:
        raise InputError("--v must be nonzero")
    v = tuple(c / norm for c in v)
    return standardize_ray(o, v)


def _parse_expr(text: str) -> ex.Expr:
    try:
        return ex.parse(text)
    except ex.ParseError as exc:
        raise InputError(f"cannot parse expression: {exc}")


def _load_target(args) -> cert.Target:
    sources = [s for s in (getattr(args, "expr", None), getattr(args, "builtin", None),
                           getattr(args, "set", None)) if s]
    if len(sources) > 1:
        raise InputError("give exactly one of --expr, --builtin, --set")
    if getattr(args, "builtin", None):
        name = args.builtin
        if name in ("counterexample", "counterexample-f"):
            return cx.counterexample_function()
        if name == "radial-alpha":
            return cx.radial_alpha_function()
        raise InputError(f"unknown builtin {name!r}; use counterexample or radial-alpha")
    if getattr(args, "set", None):
        with open(args.set) as fh:
            payload = fh.read().strip()
        try:
            obj = json.loads(payload)
            payload = obj["expr"] if isinstance(obj, dict) and "expr" in obj else payload
        except json.JSONDecodeError:
            pass
        return _parse_expr(payload)
    if getattr(args, "expr", None):
        return _parse_expr(args.expr)
    return cx.counterexample_function()


def _coeff_json(c) -> dict:
    if isinstance(c, Fraction):
        return {"exact": str(c), "float": float(c)}
    return {"exact": None, "float": float(c)}


def _report(command: str, config: dict, result: dict) -> dict:
    return {
        "tool": "loggrowth",
        "version": __version__,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": config,
        "result": result,
    }


def _emit(args, report: dict, default_name: str) -> None:
    payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "stdout", False):
        sys.stdout.write(payload)
        return
    path = getattr(args, "out", None) or default_name
    with open(path, "w") as fh:
        fh.write(payload)
    print(f"report written to {path}")


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_eval(args) -> int:
    e = _parse_expr(args.expr)
    point = _parse_vector(args.point) if args.point else ()
    n = ex.arity(e)
    if len(point) < n:
        raise InputError(f"expression needs {n} coordinates, got {len(point)}")
    r = ex.evaluate(e, point, args.precision)
    result = {
        "expression": ex.to_text(e),
        "point": list(point),
        "status": r.status.value,
        "value": None if r.value is None else float(r.value),
        "value_str": None if r.value is None else str(r.value),
        "log_analytic": ex.is_log_analytic(e),
        "log_depth": ex.log_depth(e),
    }
    _emit(args, _report("eval", {"precision": args.precision}, result), "report-eval.json")
    return 0


def _expansion_config(args) -> ms.ExpansionConfig:
    return ms.ExpansionConfig(depth=args.depth, precision=args.precision)


def _cmd_classify(args) -> int:
    e = _parse_expr(args.expr)
    cfg = _expansion_config(args)
    cls = ms.classify_growth(e, cfg)
    result = {"class": cls.kind.value, "N": cls.N, "note": cls.note}
    try:
        pf = ms.prepared_form(e, cfg)
        result.update({
            "a": _coeff_json(pf.a),
            "monomial": pf.monomial.to_json(),
            "monomial_text": pf.monomial.to_text(),
            "d": pf.d,
            "t": pf.t,
        })
    except (ms.OutOfFragment, ms.DepthExhausted) as exc:
        result.update({"a": None, "monomial": None, "d": None, "t": None,
                       "prepare_note": str(exc)})
    try:
        oracle = ms.numeric_growth_oracle(e, precision=args.precision)
        result["oracle_windows"] = oracle.to_json()["windows"]
        result["oracle_trend"] = oracle.trend
    except ValueError as exc:
        result["oracle_windows"] = []
        result["oracle_trend"] = f"unavailable: {exc}"
    _emit(args, _report("classify", {"precision": args.precision, "depth": args.depth},
                        result), "report-classify.json")
    return 0


def _cmd_prepare(args) -> int:
    e = _parse_expr(args.expr)
    cfg = _expansion_config(args)
    series = ms.expand(e, args.depth, cfg)
    pf = ms.prepared_form(e, cfg)
    result = {
        "a": _coeff_json(pf.a),
        "monomial": pf.monomial.to_json(),
        "monomial_text": pf.monomial.to_text(),
        "d": pf.d,
        "t": pf.t,
        "terms": [
            {"coefficient": _coeff_json(c), "monomial": m.to_json(),
             "monomial_text": m.to_text()}
            for c, m in series.terms
        ],
        "tail": None if series.tail is None else {
            "monomial": series.tail.monomial.to_json(),
            "monomial_text": series.tail.monomial.to_text(),
            "d": series.tail.d,
        },
        "threshold": series.threshold,
    }
    _emit(args, _report("prepare", {"precision": args.precision, "depth": args.depth},
                        result), "report-prepare.json")
    return 0


def _cmd_counterexample(args) -> int:
    if args.action == "trace":
        r = args.r if args.r is not None else 5.0
        grid = args.grid
        path = args.out or f"trace-r{r:g}.csv"
        rows = []
        for i in range(grid):
            theta = 2.0 * math.pi * i / grid
            rows.append((theta, cx.eval_f(r * math.cos(theta), r * math.sin(theta))))
        if args.stdout:
            writer = csv.writer(sys.stdout)
            writer.writerow(["angle", "f_value"])
            writer.writerows(rows)
        else:
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["angle", "f_value"])
                writer.writerows(rows)
            print(f"trace written to {path}")
        return 0
    rmax = args.rmax
    claim_h = cx.verify_claim_h_max()
    claim_g = cx.verify_g_continuity()
    gamma_checks = []
    for r in (2.0, 3.0, 5.0, 10.0, 15.0):
        if r > rmax:
            continue
        got, angle = cx.max_on_circle(r, grid=args.grid)
        want = cx.alpha(r * r)
        rel = abs(got - want) / abs(want)
        gamma_checks.append({"r": r, "max": got, "alpha_r2": want,
                             "rel_err": rel, "passed": rel <= 1e-6})
    exp_checks = []
    for r in (5.0, 10.0, 15.0, 20.0, 25.0):
        if r > rmax:
            continue
        got, _ = cx.max_on_circle(r, grid=args.grid)
        exp_checks.append({"r": r, "max": got, "exp_r": math.exp(r),
                           "passed": got >= math.exp(r)})
    failures = (claim_h["failures"] + claim_g["failures"]
                + sum(1 for c in gamma_checks if not c["passed"])
                + sum(1 for c in exp_checks if not c["passed"]))
    result = {
        "threshold_a": cx.A_THRESHOLD,
        "alpha_at_a_minus_1": cx.alpha(cx.A_THRESHOLD) - 1.0,
        "inner_max_checks": claim_h,
        "continuity_checks": claim_g,
        "circle_max_equals_alpha": gamma_checks,
        "circle_max_exceeds_exp": exp_checks,
        "failures": failures,
    }
    config = {"rmax": rmax, "grid": args.grid}
    _emit(args, _report("counterexample-verify", config, result),
          "report-counterexample.json")
    return 3 if failures else 0


def _cmd_cones(args) -> int:
    with open(args.set) as fh:
        A = cn.DefinableSet.from_json(fh.read())
    config = {"set": args.set, "mode": args.mode, "grid": args.grid, "tol": args.tol}
    if args.mode == "tangent":
        ds, rep = cn.tangent_base_at_infinity(A, grid=args.grid, tol=args.tol,
                                              full_output=True)
        result = {
            "directions": [list(m) for m in ds.members],
            "count": len(ds.members),
            "stabilized": rep.stabilized,
            "verdict": "sampled",
        }
    elif args.mode == "strong":
        ds = cn.strong_base_at_infinity(A, grid=args.grid)
        result = {"directions": [list(m) for m in ds.members],
                  "count": len(ds.members), "verdict": "sampled"}
    elif args.mode == "raycone":
        if not args.o or not args.v:
            raise InputError("raycone mode needs --o and --v")
        ray = _parse_ray(args.o, args.v)
        tangent = cn.ray_in_tangent_ray_cone(A, ray, tol=args.tol, grid=args.grid)
        strong = cn.ray_in_strong_ray_cone(A, ray)
        result = {"o": list(ray.o), "v": list(ray.v),
                  "in_tangent_ray_cone": tangent,
                  "in_strong_ray_cone": strong, "verdict": "sampled"}
        config.update({"o": args.o, "v": args.v})
    else:
        result = cn.density_report(A, grid=args.grid, tol=args.tol).to_json()
    _emit(args, _report("cones", config, result), f"report-cones-{args.mode}.json")
    return 0


def _certify_config(args) -> cert.CertifyConfig:
    return cert.CertifyConfig(
        fit_start=args.fit_start,
        fit_doublings=args.fit_doublings,
        validate_max=args.validate_max,
        trace_radii=tuple(args.trace_radii),
        grid=args.grid,
        offset_bound=args.offset_bound,
        expansion=ms.ExpansionConfig(precision=args.precision),
    )


def _target_descriptor(f: cert.Target) -> dict:
    if isinstance(f, ex.Expr):
        return {"expr": ex.to_text(f)}
    return {"builtin": f.name}


def _cmd_certify_ray(args) -> int:
    f = _load_target(args)
    if not args.o or not args.v:
        raise InputError("certify-ray needs --o and --v")
    ray = _parse_ray(args.o, args.v)
    cfg = _certify_config(args)
    config = {"target": _target_descriptor(f), "o": list(ray.o), "v": list(ray.v),
              **_certify_config_json(cfg)}
    try:
        certificate = cert.certify_ray(f, ray, cfg)
    except cert.UncertifiableOnSchedule as exc:
        result = {"certificate": None, "error": str(exc), "slopes": list(exc.slopes)}
        _emit(args, _report("certify-ray", config, result), "report-certify-ray.json")
        return 3
    _emit(args, _report("certify-ray", config, {"certificate": certificate.to_json()}),
          "report-certify-ray.json")
    return 0


def _certify_config_json(cfg: cert.CertifyConfig) -> dict:
    out = asdict(cfg)
    out["trace_radii"] = list(cfg.trace_radii)
    out["expansion"] = asdict(cfg.expansion)
    return out


def _cmd_survey(args) -> int:
    if args.config:
        with open(args.config) as fh:
            prior = json.load(fh)
        pc = prior["config"]
        args.rays = pc["count"]
        args.seed = pc["seed"]
        args.fit_start = pc["fit_start"]
        args.fit_doublings = pc["fit_doublings"]
        args.validate_max = pc["validate_max"]
        args.trace_radii = pc["trace_radii"]
        args.grid = pc["grid"]
        args.offset_bound = pc["offset_bound"]
        args.precision = pc["expansion"]["precision"]
        target = pc["target"]
        args.expr = target.get("expr")
        args.builtin = target.get("builtin")
        if args.builtin == "counterexample-f":
            args.builtin = "counterexample"
    f = _load_target(args)
    cfg = _certify_config(args)
    config = {"target": _target_descriptor(f), "count": args.rays, "seed": args.seed,
              **_certify_config_json(cfg)}
    report = cert.survey_rays(f, count=args.rays, seed=args.seed, config=cfg)
    result = report.to_json()
    _emit(args, _report("survey", config, result), "report-survey.json")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common(p: argparse.ArgumentParser, precision: int) -> None:
    p.add_argument("--out", help="output path (default: report-<command>.json)")
    p.add_argument("--stdout", action="store_true", help="write the report to stdout")
    p.add_argument("--precision", type=int, default=precision,
                   help="working precision in bits (default from "
                        f"{PRECISION_ENV} or 128)")


def _add_certify_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--expr", help="expression source text")
    p.add_argument("--builtin", help="builtin target: counterexample | radial-alpha")
    p.add_argument("--set", help="file containing an expression (text or {\"expr\": ...})")
    p.add_argument("--fit-start", type=float, default=10.0, dest="fit_start")
    p.add_argument("--fit-doublings", type=int, default=16, dest="fit_doublings")
    p.add_argument("--validate-max", type=float, default=1e6, dest="validate_max")
    p.add_argument("--trace-radii", type=float, nargs="+",
                   default=[5.0, 10.0, 15.0, 20.0], dest="trace_radii")
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--offset-bound", type=float, default=10.0, dest="offset_bound")


def build_parser() -> argparse.ArgumentParser:
    precision = 128
    try:
        precision = _default_precision()
    except InputError:
        pass
    parser = argparse.ArgumentParser(
        prog="loggrowth",
        description="Growth analysis for a log-analytic expression fragment.")
    parser.add_argument("--version", action="version", version=f"loggrowth {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression at a point")
    p.add_argument("expr")
    p.add_argument("--point", default="", help="comma-separated coordinates, e.g. '2,1/2'")
    _add_common(p, precision)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("classify", help="polynomial-boundedness classification")
    p.add_argument("expr")
    p.add_argument("--depth", type=int, default=4)
    _add_common(p, precision)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("prepare", help="multiseries and prepared form")
    p.add_argument("expr")
    p.add_argument("--depth", type=int, default=4)
    _add_common(p, precision)
    p.set_defaults(fn=_cmd_prepare)

    p = sub.add_parser("counterexample",
                       help="verify or trace the exponential-sphere-growth construction")
    p.add_argument("action", choices=["verify", "trace"])
    p.add_argument("--rmax", type=float, default=25.0)
    p.add_argument("--r", type=float, default=None, help="trace radius")
    p.add_argument("--grid", type=int, default=4096)
    _add_common(p, precision)
    p.set_defaults(fn=_cmd_counterexample)

    p = sub.add_parser("cones", help="cones at infinity for a definable set")
    p.add_argument("--set", required=True, help="JSON set specification file")
    p.add_argument("--mode", required=True,
                   choices=["tangent", "strong", "raycone", "density"])
    p.add_argument("--o", help="ray offset (raycone mode)")
    p.add_argument("--v", help="ray direction (raycone mode)")
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--tol", type=float, default=1e-3)
    _add_common(p, precision)
    p.set_defaults(fn=_cmd_cones)

    p = sub.add_parser("certify-ray", help="growth certificate along a ray")
    p.add_argument("--o", required=True)
    p.add_argument("--v", required=True)
    _add_certify_options(p)
    _add_common(p, precision)
    p.set_defaults(fn=_cmd_certify_ray)

    p = sub.add_parser("survey", help="certify a seeded family of rays")
    p.add_argument("--rays", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--config", help="rerun with the configuration embedded in a report")
    _add_certify_options(p)
    _add_common(p, precision)
    p.set_defaults(fn=_cmd_survey)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ex.ParseError, ms.OutOfFragment, ms.DepthExhausted, OSError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
