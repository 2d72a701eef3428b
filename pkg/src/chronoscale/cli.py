"""Command-line entry point.

Exit codes: 0 all checks passed / integral computed; 1 at least one
inequality violated or a counterexample was found; 2 usage, parse, or
domain errors. Numeric output uses 17 significant digits.
"""

from __future__ import annotations

import argparse
import sys

from .delta_calculus import QuadConfig, Rectangle
from .errors import ChronoscaleError
from .harness import (
    CampaignConfig,
    bivariate_from_expression,
    emit_report,
    run_campaign,
    run_single_check,
    search_counterexample,
)
from .inequality_ops import THEOREM_IDS
from .timescale_core import TimeScalePairSpec, parse_timescale


def _fmt(v: float) -> str:
    return f"{v:.17g}"


class _UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")


_QUAD_KEYS = {
    "quad_order": int,
    "panel_tol": float,
    "max_depth": int,
    "derivative_step_scale": float,
    "supnorm_samples_per_segment": int,
}
_TOL_KEYS = {"tol_abs": float, "tol_rel": float}


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise _UsageError("--config", f"line {lineno}: expected key=value")
                key, val = (part.strip() for part in line.split("=", 1))
                if key in _QUAD_KEYS:
                    values[key] = _QUAD_KEYS[key](val)
                elif key in _TOL_KEYS:
                    values[key] = _TOL_KEYS[key](val)
                else:
                    raise _UsageError("--config", f"line {lineno}: unknown key {key!r}")
    except OSError as exc:
        raise _UsageError("--config", str(exc)) from exc
    except ValueError as exc:
        raise _UsageError("--config", str(exc)) from exc
    return values


def _quad_from(args, file_cfg: dict) -> QuadConfig:
    kwargs = {k: file_cfg[k] for k in _QUAD_KEYS if k in file_cfg}
    for k in _QUAD_KEYS:  # flags beat config beats defaults
        flag = getattr(args, k, None)
        if flag is not None:
            kwargs[k] = flag
    return QuadConfig(**kwargs)


def _tols_from(args, file_cfg: dict) -> tuple[float, float]:
    ta = file_cfg.get("tol_abs", 1e-7)
    tr = file_cfg.get("tol_rel", 1e-7)
    if getattr(args, "tol_abs", None) is not None:
        ta = args.tol_abs
    if getattr(args, "tol_rel", None) is not None:
        tr = args.tol_rel
    return ta, tr


def _parse_ts(flag: str, text: str):
    try:
        return parse_timescale(text)
    except ChronoscaleError as exc:
        raise _UsageError(flag, str(exc)) from exc


def _parse_rect(pair, text: str) -> Rectangle:
    try:
        a, b, c, d = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise _UsageError("--rect", f"expected four comma-separated numbers, got {text!r}") from exc
    try:
        return Rectangle(pair, a, b, c, d)
    except ChronoscaleError as exc:
        raise _UsageError("--rect", str(exc)) from exc


def _parse_fn(flag: str, text: str):
    try:
        return bivariate_from_expression(text)
    except ChronoscaleError as exc:
        raise _UsageError(flag, str(exc)) from exc


def _add_common_quad_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value config file for quadrature/tolerances")
    p.add_argument("--quad-order", dest="quad_order", type=int)
    p.add_argument("--panel-tol", dest="panel_tol", type=float)
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--derivative-step-scale", dest="derivative_step_scale", type=float)
    p.add_argument(
        "--supnorm-samples", dest="supnorm_samples_per_segment", type=int
    )
    p.add_argument("--tol-abs", dest="tol_abs", type=float)
    p.add_argument("--tol-rel", dest="tol_rel", type=float)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronoscale",
        description="Delta-integral inequality checks over hybrid time scales",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run one theorem check on given inputs")
    pv.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    pv.add_argument("--ts1", required=True, help="first-axis time scale spec")
    pv.add_argument("--ts2", required=True, help="second-axis time scale spec")
    pv.add_argument("--rect", required=True, help="a,b,c,d rectangle corners")
    pv.add_argument("--f", required=True, help="expression for f(x,y)")
    pv.add_argument("--g", help="expression for g(x,y); needed by thm21/thm22")
    pv.add_argument("--out", help="write the result record as JSON")
    _add_common_quad_flags(pv)

    pc = sub.add_parser("campaign", help="run a seeded randomized campaign")
    pc.add_argument("--trials", type=int, required=True)
    pc.add_argument("--seed", type=int, required=True)
    pc.add_argument(
        "--theorems",
        default="identity,thm21,thm22-derived,thm31",
        help="comma-separated theorem ids",
    )
    pc.add_argument("--out", help="report output path")
    pc.add_argument("--format", choices=("json", "csv"), default="json")
    pc.add_argument("--max-segments", dest="max_segments", type=int, default=3)
    pc.add_argument("--span", type=float, default=3.0)
    _add_common_quad_flags(pc)

    px = sub.add_parser("counterexample", help="search for a bound violation")
    px.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    px.add_argument("--budget", type=int, required=True)
    px.add_argument("--seed", type=int, required=True)
    _add_common_quad_flags(px)

    pi = sub.add_parser("integrate", help="print a delta double integral")
    pi.add_argument("--ts1", required=True)
    pi.add_argument("--ts2", required=True)
    pi.add_argument("--rect", required=True)
    pi.add_argument("--f", required=True)
    _add_common_quad_flags(pi)
    return parser


def _cmd_verify(args) -> int:
    file_cfg = _read_config_file(args.config) if args.config else {}
    quad = _quad_from(args, file_cfg)
    ta, tr = _tols_from(args, file_cfg)
    pair = TimeScalePairSpec(_parse_ts("--ts1", args.ts1), _parse_ts("--ts2", args.ts2))
    rect = _parse_rect(pair, args.rect)
    f = _parse_fn("--f", args.f)
    g = _parse_fn("--g", args.g) if args.g else None
    if args.theorem in ("thm21", "thm22-stated", "thm22-derived") and g is None:
        raise _UsageError("--g", f"{args.theorem} needs a second function")
    cfg = CampaignConfig(
        trials=1, seed=0, theorems=(args.theorem,), tol_abs=ta, tol_rel=tr, quad=quad
    )
    try:
        res = run_single_check(args.theorem, f, g, pair, rect, cfg)
    except ChronoscaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"theorem: {res.theorem}")
    print(f"lhs     = {_fmt(res.lhs)}")
    print(f"rhs     = {_fmt(res.rhs)}")
    print(f"margin  = {_fmt(res.margin)}")
    print(f"pass    = {'true' if res.passed else 'false'}")
    if res.notes:
        print(f"notes   : {res.notes}")
    if args.out:
        import json

        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(res.to_record(0), fh, sort_keys=True, indent=1)
    return 0 if res.passed else 1


def _cmd_campaign(args) -> int:
    file_cfg = _read_config_file(args.config) if args.config else {}
    quad = _quad_from(args, file_cfg)
    ta, tr = _tols_from(args, file_cfg)
    theorems = tuple(t.strip() for t in args.theorems.split(",") if t.strip())
    try:
        cfg = CampaignConfig(
            trials=args.trials,
            seed=args.seed,
            theorems=theorems,
            ts_max_segments=args.max_segments,
            ts_span=args.span,
            tol_abs=ta,
            tol_rel=tr,
            quad=quad,
        )
    except ChronoscaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_campaign(cfg)
    s = report.summary
    print(
        f"trials={cfg.trials} records={len(report.records)} passes={s['passes']} "
        f"failures={s['failures']} skipped={s['skipped']}"
    )
    print(f"worst margin       = {_fmt(s['worst_margin'])}")
    if s["max_identity_residual"] is not None:
        print(f"max identity resid = {_fmt(s['max_identity_residual'])}")
    print(f"duration seconds   = {_fmt(report.duration_seconds)}")
    if args.out:
        emit_report(report, args.format, args.out)
        print(f"report written to {args.out}")
    return 0 if s["all_passed"] else 1


def _cmd_counterexample(args) -> int:
    file_cfg = _read_config_file(args.config) if args.config else {}
    quad = _quad_from(args, file_cfg)
    ta, tr = _tols_from(args, file_cfg)
    cfg = CampaignConfig(trials=1, seed=0, tol_abs=ta, tol_rel=tr, quad=quad)
    try:
        witness = search_counterexample(args.theorem, args.budget, args.seed, cfg)
    except ChronoscaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if witness is None:
        print(f"no counterexample for {args.theorem} within budget {args.budget}")
        return 0
    w = witness.witness
    print(f"counterexample for {args.theorem}:")
    print(f"  f = {w['f']}   g = {w['g']}")
    print(f"  ts1 = {w['timescale1']}")
    print(f"  ts2 = {w['timescale2']}")
    print(f"  rect = {','.join(_fmt(v) for v in w['rect'])}")
    print(f"  lhs = {_fmt(witness.lhs)}  rhs = {_fmt(witness.rhs)}  margin = {_fmt(witness.margin)}")
    return 1


def _cmd_integrate(args) -> int:
    file_cfg = _read_config_file(args.config) if args.config else {}
    quad = _quad_from(args, file_cfg)
    pair = TimeScalePairSpec(_parse_ts("--ts1", args.ts1), _parse_ts("--ts2", args.ts2))
    rect = _parse_rect(pair, args.rect)
    f = _parse_fn("--f", args.f)
    from .delta_calculus import delta_integral_2d

    try:
        val = delta_integral_2d(pair, f, rect, quad)
    except ChronoscaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"integral = {_fmt(val)}")
    return 0


def run_cli(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    handlers = {
        "verify": _cmd_verify,
        "campaign": _cmd_campaign,
        "counterexample": _cmd_counterexample,
        "integrate": _cmd_integrate,
    }
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ChronoscaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
