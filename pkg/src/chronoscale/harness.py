"""Built-in function corpus, seeded verification campaigns, counterexample
search, and report emission.

Campaigns are deterministic in their seed: per-trial sub-seeds are drawn up
front, so trial payloads do not depend on execution order or thread count.
"""

from __future__ import annotations

import csv
import json
import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import expr as expr_mod
from .delta_calculus import BivariateFunction, QuadConfig, Rectangle
from .errors import ChronoscaleError, ConstructionError
from .inequality_ops import (
    DEFAULT_TOL_ABS,
    DEFAULT_TOL_REL,
    THEOREM_IDS,
    InequalityResult,
    identity_grid,
    verify_thm21,
    verify_thm22,
    verify_thm31,
)
from .timescale_core import (
    TimeScale,
    TimeScalePairSpec,
    dense_overlaps,
    h_grid,
    integers,
    q_grid,
    random_timescale,
    reals,
)

ARTIFACT_VERSION = "0.1.0"


def builtin_corpus() -> list[BivariateFunction]:
    """Reference functions; polynomial entries carry the closed-form mixed
    delta derivative as a function of (x, y, sigma1(x), sigma2(y))."""
    zero = lambda x, y, sx, sy: 0.0 * (x + y + sx + sy)
    return [
        BivariateFunction("const", lambda x, y: 3.0 + 0.0 * (x + y), zero),
        BivariateFunction("x", lambda x, y: x + 0.0 * y, zero),
        BivariateFunction("y", lambda x, y: y + 0.0 * x, zero),
        BivariateFunction(
            "x*y", lambda x, y: x * y, lambda x, y, sx, sy: 1.0 + 0.0 * (x + y + sx + sy)
        ),
        BivariateFunction(
            "x^2*y",
            lambda x, y: x * x * y,
            lambda x, y, sx, sy: (sx + x) + 0.0 * (y + sy),
        ),
        BivariateFunction(
            "x^2*y^2",
            lambda x, y: (x * y) ** 2,
            lambda x, y, sx, sy: (sx + x) * (sy + y),
        ),
        BivariateFunction("x+y", lambda x, y: x + y, zero),
        BivariateFunction("sin(x)*cos(y)", lambda x, y: np.sin(x) * np.cos(y)),
        BivariateFunction("exp(x/4)*y", lambda x, y: np.exp(x / 4.0) * y),
    ]


def bivariate_from_expression(text: str) -> BivariateFunction:
    """Parse an expression into a numeric-only corpus entry."""
    ast = expr_mod.parse_expr(text)
    return BivariateFunction(
        label=text.strip(),
        eval=lambda x, y: expr_mod.eval_expr_array(ast, x, y),
    )


def resolve_corpus(selection=None) -> list[BivariateFunction]:
    """Resolve labels or expression strings into functions. None selects the
    whole built-in corpus."""
    base = builtin_corpus()
    if selection is None:
        return base
    by_label = {f.label: f for f in base}
    out = []
    for item in selection:
        if isinstance(item, BivariateFunction):
            out.append(item)
        elif item in by_label:
            out.append(by_label[item])
        else:
            out.append(bivariate_from_expression(item))
    if not out:
        raise ConstructionError("corpus selection is empty")
    return out


# ---------------------------------------------------------------------------
# campaign configuration and report


@dataclass(frozen=True)
class CampaignConfig:
    trials: int = 100
    seed: int = 0
    theorems: tuple[str, ...] = ("identity", "thm21", "thm22-derived", "thm31")
    corpus: tuple[str, ...] | None = None
    ts_max_segments: int = 3
    ts_span: float = 3.0
    ts_min_gap: float = 0.05
    tol_abs: float = DEFAULT_TOL_ABS
    tol_rel: float = DEFAULT_TOL_REL
    identity_tol_point: float = 1e-12
    identity_tol_dense: float = 1e-7
    quad: QuadConfig = field(default_factory=QuadConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ConstructionError("trials must be >= 1")
        if not self.theorems:
            raise ConstructionError("theorems must be nonempty")
        for t in self.theorems:
            if t not in THEOREM_IDS:
                raise ConstructionError(f"unknown theorem id {t!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["theorems"] = list(self.theorems)
        d["corpus"] = list(self.corpus) if self.corpus is not None else None
        return d

    @staticmethod
    def from_dict(d: dict) -> "CampaignConfig":
        d = dict(d)
        d["theorems"] = tuple(d["theorems"])
        if d.get("corpus") is not None:
            d["corpus"] = tuple(d["corpus"])
        d["quad"] = QuadConfig(**d["quad"])
        return CampaignConfig(**d)


@dataclass(frozen=True)
class VerificationReport:
    config: CampaignConfig
    records: tuple[dict, ...]
    summary: dict
    version: str = ARTIFACT_VERSION
    duration_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "records": list(self.records),
            "summary": self.summary,
            "version": self.version,
            "duration_seconds": self.duration_seconds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @staticmethod
    def from_dict(d: dict) -> "VerificationReport":
        return VerificationReport(
            config=CampaignConfig.from_dict(d["config"]),
            records=tuple(d["records"]),
            summary=d["summary"],
            version=d["version"],
            duration_seconds=d["duration_seconds"],
        )

    @staticmethod
    def from_json(text: str) -> "VerificationReport":
        return VerificationReport.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# trial sampling


def _draw_timescale(rng: random.Random, cfg: CampaignConfig) -> TimeScale:
    roll = rng.random()
    if roll < 0.20:
        a = rng.uniform(-2.0, 1.5)
        return reals(a, a + rng.uniform(0.8, 3.2))
    if roll < 0.40:
        a = rng.randint(-3, 2)
        return integers(a, a + rng.randint(2, 5))
    if roll < 0.52:
        h = rng.choice([0.2, 0.25, 0.5])
        a = rng.randint(-2, 2) * 1.0
        return h_grid(a, a + h * rng.randint(4, 12), h)
    if roll < 0.64:
        return q_grid(rng.choice([1.5, 2.0]), rng.randint(3, 5))
    return random_timescale(
        rng.getrandbits(32),
        max_segments=cfg.ts_max_segments,
        span=cfg.ts_span,
        min_gap=cfg.ts_min_gap,
    )


def _axis_candidates(ts: TimeScale, rng: random.Random):
    pts = set()
    for lo, hi in ts.segments:
        pts.add(lo)
        pts.add(hi)
        if hi > lo:
            pts.add(lo + (hi - lo) * rng.uniform(0.2, 0.8))
    return sorted(pts)


def _draw_rectangle(rng: random.Random, pair: TimeScalePairSpec):
    for _ in range(20):
        xs = _axis_candidates(pair.ts1, rng)
        ys = _axis_candidates(pair.ts2, rng)
        if len(xs) < 2 or len(ys) < 2:
            continue
        if rng.random() < 0.4:  # full span half the time keeps areas varied
            a, b = pair.ts1.min, pair.ts1.max
            c, d = pair.ts2.min, pair.ts2.max
        else:
            a, b = sorted(rng.sample(xs, 2))
            c, d = sorted(rng.sample(ys, 2))
        if a < b and c < d:
            return Rectangle(pair, a, b, c, d)
    return None


def _rect_is_pure_point(rect: Rectangle) -> bool:
    return not dense_overlaps(rect.pair.ts1, rect.a, rect.b) and not dense_overlaps(
        rect.pair.ts2, rect.c, rect.d
    )


def _skip_records(trial, theorems, reason):
    return [
        {
            "trial": trial,
            "theorem": t,
            "lhs": 0.0,
            "rhs": 0.0,
            "margin": 0.0,
            "pass": True,
            "timescale1": "",
            "timescale2": "",
            "rect": [],
            "f": "",
            "g": None,
            "notes": f"skipped: {reason}",
        }
        for t in theorems
    ]


def run_single_check(
    theorem: str,
    f: BivariateFunction,
    g: BivariateFunction | None,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    cfg: CampaignConfig,
) -> InequalityResult:
    """Dispatch one theorem check; identity reports max grid residual
    against its tolerance."""
    q = cfg.quad
    if theorem == "identity":
        tol = (
            cfg.identity_tol_point
            if _rect_is_pure_point(rect)
            else cfg.identity_tol_dense
        )
        resid, npts = identity_grid(f, pair, rect, q)
        return InequalityResult(
            theorem="identity",
            lhs=resid,
            rhs=tol,
            margin=tol - resid,
            passed=resid <= tol,
            tol_abs=0.0,
            tol_rel=0.0,
            witness={
                "timescale1": pair.ts1.descriptor,
                "timescale2": pair.ts2.descriptor,
                "rect": [rect.a, rect.b, rect.c, rect.d],
                "f": f.label,
                "g": None,
            },
            notes=f"max residual over {npts} grid points",
        )
    if theorem == "thm21":
        return verify_thm21(f, g, pair, rect, q, cfg.tol_abs, cfg.tol_rel)
    if theorem == "thm22-stated":
        return verify_thm22(f, g, pair, rect, q, "stated", cfg.tol_abs, cfg.tol_rel)
    if theorem == "thm22-derived":
        return verify_thm22(f, g, pair, rect, q, "derived", cfg.tol_abs, cfg.tol_rel)
    if theorem == "thm31":
        return verify_thm31(f, pair, rect, q, cfg.tol_abs, cfg.tol_rel)
    raise ConstructionError(f"unknown theorem id {theorem!r}")


def _run_trial(trial: int, trial_seed: int, cfg: CampaignConfig, corpus):
    rng = random.Random(trial_seed)
    ts1 = _draw_timescale(rng, cfg)
    ts2 = _draw_timescale(rng, cfg)
    pair = TimeScalePairSpec(ts1, ts2)
    rect = _draw_rectangle(rng, pair)
    if rect is None:
        return _skip_records(trial, cfg.theorems, "no usable rectangle after retries")
    f = rng.choice(corpus)
    g = rng.choice(corpus)
    records = []
    for theorem in cfg.theorems:
        try:
            res = run_single_check(theorem, f, g, pair, rect, cfg)
            records.append(res.to_record(trial))
        except ChronoscaleError as exc:
            records.append(
                {
                    "trial": trial,
                    "theorem": theorem,
                    "lhs": 0.0,
                    "rhs": 0.0,
                    "margin": 0.0,
                    "pass": False,
                    "timescale1": ts1.descriptor,
                    "timescale2": ts2.descriptor,
                    "rect": [rect.a, rect.b, rect.c, rect.d],
                    "f": f.label,
                    "g": g.label,
                    "notes": f"error: {exc}",
                }
            )
    return records


def run_campaign(cfg: CampaignConfig, threads: int | None = None) -> VerificationReport:
    """Run the configured trials; failures are recorded, never raised."""
    start = time.perf_counter()
    corpus = resolve_corpus(cfg.corpus)
    master = random.Random(cfg.seed)
    trial_seeds = [master.getrandbits(63) for _ in range(cfg.trials)]
    if threads is None:
        threads = int(os.environ.get("CHRONOSCALE_THREADS", "1") or "1")
    threads = max(1, threads)

    if threads == 1:
        per_trial = [
            _run_trial(i, s, cfg, corpus) for i, s in enumerate(trial_seeds)
        ]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_trial = list(
                pool.map(
                    lambda args: _run_trial(*args, cfg, corpus),
                    list(enumerate(trial_seeds)),
                )
            )
    records = [rec for trial_recs in per_trial for rec in trial_recs]

    skipped = sum(1 for r in records if r["notes"].startswith("skipped"))
    live = [r for r in records if not r["notes"].startswith("skipped")]
    failures = sum(1 for r in live if not r["pass"])
    identity_residuals = [r["lhs"] for r in live if r["theorem"] == "identity"]
    summary = {
        "passes": sum(1 for r in live if r["pass"]),
        "failures": failures,
        "skipped": skipped,
        "worst_margin": min((r["margin"] for r in live), default=0.0),
        "max_identity_residual": max(identity_residuals, default=None),
        "all_passed": failures == 0,
    }
    return VerificationReport(
        config=cfg,
        records=tuple(records),
        summary=summary,
        duration_seconds=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# counterexample search


def search_counterexample(
    theorem: str,
    budget: int,
    seed: int,
    cfg: CampaignConfig | None = None,
) -> InequalityResult | None:
    """Random search plus outward rectangle refinement, maximizing lhs - rhs.

    Returns the best violating result found within the evaluation budget, or
    None. Deterministic in the seed.
    """
    if budget < 1:
        raise ConstructionError("budget must be >= 1")
    cfg = cfg or CampaignConfig()
    if theorem not in THEOREM_IDS:
        raise ConstructionError(f"unknown theorem id {theorem!r}")
    corpus = resolve_corpus(cfg.corpus)
    rng = random.Random(seed)
    evals = 0
    best = None

    def attempt(f, g, pair, rect):
        nonlocal evals, best
        evals += 1
        try:
            res = run_single_check(theorem, f, g, pair, rect, cfg)
        except ChronoscaleError:
            return None
        if res.margin < 0 and (best is None or res.margin < best.margin):
            best = res
        return res

    while evals < budget:
        # bias toward wide dense rectangles: the interesting violations need
        # area, and the dense case exercises the full quadrature path
        if rng.random() < 0.6:
            a = rng.uniform(-1.0, 1.0)
            c = rng.uniform(-1.0, 1.0)
            ts1 = reals(a, a + rng.uniform(1.0, 6.0))
            ts2 = reals(c, c + rng.uniform(1.0, 6.0))
        else:
            ts1 = _draw_timescale(rng, cfg)
            ts2 = _draw_timescale(rng, cfg)
        pair = TimeScalePairSpec(ts1, ts2)
        rect = Rectangle(pair, ts1.min, ts1.max, ts2.min, ts2.max)
        f = rng.choice(corpus)
        g = rng.choice(corpus)
        res = attempt(f, g, pair, rect)
        if res is not None and res.margin < 0:
            # coordinate refinement: regrow each axis toward the scale's
            # bounds while the violation deepens
            cur = rect
            improved = True
            while improved and evals < budget:
                improved = False
                for scale in (1.25, 1.5):
                    b2 = min(ts1.max, cur.a + (cur.b - cur.a) * scale)
                    d2 = min(ts2.max, cur.c + (cur.d - cur.c) * scale)
                    if b2 == cur.b and d2 == cur.d:
                        continue
                    try:
                        cand = Rectangle(pair, cur.a, b2, cur.c, d2)
                    except ChronoscaleError:
                        continue
                    r2 = attempt(f, g, pair, cand)
                    if r2 is not None and r2.margin < (best.margin if best else 0.0):
                        cur = cand
                        improved = True
                        break
            return best
    return best


# ---------------------------------------------------------------------------
# report emission


def emit_report(report: VerificationReport, fmt: str, path: str) -> str:
    """Write JSON (full nested report) or CSV (flattened records)."""
    try:
        if fmt == "json":
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
        elif fmt == "csv":
            cols = [
                "trial", "theorem", "lhs", "rhs", "margin", "pass",
                "timescale1", "timescale2", "rect", "f", "g", "notes",
            ]
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(cols)
                for rec in report.records:
                    row = dict(rec)
                    row["rect"] = ",".join(repr(v) for v in rec["rect"])
                    row["pass"] = "true" if rec["pass"] else "false"
                    writer.writerow([row[c] if row[c] is not None else "" for c in cols])
        else:
            raise ConstructionError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise ChronoscaleError(f"cannot write report to {path!r}: {exc}") from exc
    return path
