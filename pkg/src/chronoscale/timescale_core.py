"""Time scales as finite unions of disjoint closed real intervals.

A time scale is stored as a sorted tuple of closed segments; degenerate
segments (lo == hi) are isolated points. Jump operators follow the usual
conventions at the extremes: the maximum is its own successor and the
minimum its own predecessor, so the graininess is always >= 0.
"""

from __future__ import annotations

import math
import random
import re
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError, DomainError

# Absolute tolerance for membership tests and endpoint matching. Stored
# endpoints are exact binary64 values; the tolerance only absorbs decimal
# grid construction error on the caller's side.
MATCH_TOL = 1e-12


@dataclass(frozen=True)
class TimeScale:
    """Nonempty finite union of disjoint closed intervals, sorted ascending.

    ``descriptor`` is report metadata (mini-grammar text) and does not take
    part in equality.
    """

    segments: tuple[tuple[float, float], ...]
    descriptor: str = field(default="", compare=False)

    @property
    def min(self) -> float:
        return self.segments[0][0]

    @property
    def max(self) -> float:
        return self.segments[-1][1]

    @property
    def _arrays(self):
        """Cached (los, his, next_lo) arrays for the vectorized operators."""
        cached = getattr(self, "_arrays_cache", None)
        if cached is None:
            los = np.array([s[0] for s in self.segments])
            his = np.array([s[1] for s in self.segments])
            nxt = np.array([s[0] for s in self.segments[1:]] + [self.segments[-1][1]])
            cached = (los, his, nxt)
            object.__setattr__(self, "_arrays_cache", cached)
        return cached

    @property
    def is_pure_point(self) -> bool:
        return all(lo == hi for lo, hi in self.segments)

    def __repr__(self) -> str:  # descriptor is the canonical short form
        return f"TimeScale({self.descriptor or self.segments})"


@dataclass(frozen=True)
class TimeScalePairSpec:
    """Axis pair (first/second coordinate) with a report descriptor."""

    ts1: TimeScale
    ts2: TimeScale
    descriptor: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.descriptor:
            object.__setattr__(
                self, "descriptor", f"{self.ts1.descriptor} x {self.ts2.descriptor}"
            )


def _segments_descriptor(segments) -> str:
    parts = ",".join(f"({lo!r},{hi!r})" for lo, hi in segments)
    return f"U:{parts}"


def build_timescale(raw_segments, descriptor: str | None = None) -> TimeScale:
    """Normalize a list of (lo, hi) pairs into a valid TimeScale.

    Segments are sorted; overlapping or touching segments are merged so that
    right-scattered points are unambiguous.
    """
    segs = list(raw_segments)
    if not segs:
        raise ConstructionError("time scale needs at least one segment")
    cleaned = []
    for pair in segs:
        try:
            lo, hi = float(pair[0]), float(pair[1])
        except (TypeError, ValueError, IndexError) as exc:
            raise ConstructionError(f"bad segment {pair!r}") from exc
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ConstructionError(f"non-finite segment endpoint in {pair!r}")
        if lo > hi:
            raise ConstructionError(f"segment {pair!r} has lo > hi")
        cleaned.append((lo, hi))
    cleaned.sort()
    merged = [cleaned[0]]
    for lo, hi in cleaned[1:]:
        mlo, mhi = merged[-1]
        if lo <= mhi + MATCH_TOL:  # overlap or touch: one closed interval
            merged[-1] = (mlo, max(mhi, hi))
        else:
            merged.append((lo, hi))
    # a segment narrower than the matching tolerance is indistinguishable
    # from a point; collapse it so jump operators stay well defined
    segments = tuple(
        (lo, hi) if hi - lo > MATCH_TOL else (lo, lo) for lo, hi in merged
    )
    if descriptor is None:
        descriptor = _segments_descriptor(segments)
    return TimeScale(segments, descriptor)


# ---------------------------------------------------------------------------
# canonical constructions


def reals(a: float, b: float) -> TimeScale:
    if not a < b:
        raise ConstructionError(f"reals({a}, {b}): need a < b")
    return build_timescale([(a, b)], descriptor=f"R[{a!r},{b!r}]")


def integers(a: float, b: float) -> TimeScale:
    ai, bi = round(a), round(b)
    if abs(a - ai) > MATCH_TOL or abs(b - bi) > MATCH_TOL:
        raise ConstructionError(f"integers({a}, {b}): endpoints must be integers")
    if not ai < bi:
        raise ConstructionError(f"integers({a}, {b}): need a < b")
    pts = [(float(k), float(k)) for k in range(int(ai), int(bi) + 1)]
    return build_timescale(pts, descriptor=f"Z[{int(ai)},{int(bi)}]")


def h_grid(a: float, b: float, h: float) -> TimeScale:
    if not h > 0:
        raise ConstructionError(f"h_grid step must be positive, got {h}")
    if not a < b:
        raise ConstructionError(f"h_grid({a}, {b}): need a < b")
    n = round((b - a) / h)
    if n < 1 or abs(a + n * h - b) > MATCH_TOL:
        raise ConstructionError(
            f"h_grid({a}, {b}; {h}): span is not an exact multiple of the step"
        )
    pts = [a + k * h for k in range(n)] + [b]  # pin the last point exactly
    return build_timescale([(p, p) for p in pts], descriptor=f"hZ[{a!r},{b!r};{h!r}]")


def q_grid(q: float, n: int) -> TimeScale:
    if not q > 1:
        raise ConstructionError(f"q_grid base must exceed 1, got {q}")
    if n < 1:
        raise ConstructionError(f"q_grid needs n >= 1, got {n}")
    pts = [q**k for k in range(int(n) + 1)]
    return build_timescale([(p, p) for p in pts], descriptor=f"q[{int(n)};{q!r}]")


_CANONICAL = {"reals": reals, "integers": integers, "h_grid": h_grid, "q_grid": q_grid}


def canonical(kind: str, *args) -> TimeScale:
    """Dispatch to one of reals / integers / h_grid / q_grid by name."""
    try:
        factory = _CANONICAL[kind]
    except KeyError:
        raise ConstructionError(f"unknown canonical kind {kind!r}") from None
    return factory(*args)


def random_timescale(
    seed: int,
    max_segments: int = 4,
    span: float = 3.0,
    min_gap: float = 0.05,
) -> TimeScale:
    """Seed-deterministic mix of dense intervals and isolated points.

    Parameters are clamped to sane ranges; the clamped values are what the
    descriptor records, so parsing the descriptor reproduces the scale.
    """
    gap_is_default = min_gap == 0.05
    max_segments = int(min(max(max_segments, 1), 12))
    span = float(min(max(span, 0.5), 1000.0))
    min_gap = float(min(max(min_gap, 1e-6), span / (8.0 * max_segments)))

    rng = random.Random(seed)
    if max_segments == 1:
        k = 1
        dense = [True]
    else:
        k = rng.randint(1, max_segments)
        dense = [rng.random() < 0.45 for _ in range(k)]
        if k == 1 and not dense[0]:
            dense[0] = True  # a single isolated point is not a usable scale
    widths = [rng.uniform(1.0, 2.5) if d else 0.0 for d in dense]
    gaps = [rng.uniform(0.8, 2.0) for _ in range(k - 1)]
    total = sum(widths) + sum(gaps)
    if total <= 0:  # k isolated points with no gaps cannot happen for k >= 2
        total = 1.0
    scale = span / total
    segs = []
    pos = 0.0
    for i in range(k):
        w = widths[i] * scale
        segs.append((pos, pos + w))
        pos += w
        if i < k - 1:
            pos += max(gaps[i] * scale, min_gap)

    # The grammar carries seed/segs/span only; clamping is idempotent, so a
    # descriptor built from the clamped values reproduces the scale exactly.
    # A non-default gap is not representable and falls back to the U-form.
    desc = f"rand:seed={seed},segs={max_segments},span={span!r}" if gap_is_default else None
    return build_timescale(segs, descriptor=desc)


# ---------------------------------------------------------------------------
# point location and jump operators


def _locate(ts: TimeScale, t: float):
    """Return (segment index, snapped value) or raise DomainError."""
    los = [s[0] for s in ts.segments]
    i = bisect_right(los, t) - 1
    for j in (i, i + 1):
        if 0 <= j < len(ts.segments):
            lo, hi = ts.segments[j]
            if lo - MATCH_TOL <= t <= hi + MATCH_TOL:
                # snap to the nearest endpoint within tolerance
                if abs(t - lo) <= MATCH_TOL and abs(t - lo) <= abs(t - hi):
                    return j, lo
                if abs(t - hi) <= MATCH_TOL:
                    return j, hi
                return j, t
    raise DomainError(f"point {t!r} is not in the time scale {ts.descriptor}")


def contains(ts: TimeScale, t: float) -> bool:
    try:
        _locate(ts, t)
        return True
    except DomainError:
        return False


def snap(ts: TimeScale, t: float) -> float:
    """Snap t onto the nearest stored endpoint within tolerance."""
    return _locate(ts, t)[1]


def sigma(ts: TimeScale, t: float) -> float:
    """Forward jump: least point of the scale strictly greater than t
    (t itself at right-dense points, the maximum at the maximum)."""
    i, t = _locate(ts, t)
    lo, hi = ts.segments[i]
    if t < hi:
        return t
    if i + 1 < len(ts.segments):
        return ts.segments[i + 1][0]
    return hi


def rho(ts: TimeScale, t: float) -> float:
    """Backward jump, the mirror of sigma."""
    i, t = _locate(ts, t)
    lo, hi = ts.segments[i]
    if t > lo:
        return t
    if i > 0:
        return ts.segments[i - 1][1]
    return lo


def graininess(ts: TimeScale, t: float) -> float:
    return sigma(ts, t) - _locate(ts, t)[1]


def scattered_points(ts: TimeScale, a: float, b: float):
    """All right-scattered t in [a, b), ascending."""
    _, a = _locate(ts, a)
    _, b = _locate(ts, b)
    if a > b:
        raise DomainError(f"scattered_points: need a <= b, got {a} > {b}")
    out = []
    last = len(ts.segments) - 1
    for i, (lo, hi) in enumerate(ts.segments):
        if i < last and a <= hi < b:
            out.append(hi)
    return out


def dense_overlaps(ts: TimeScale, a: float, b: float):
    """Nondegenerate pieces of [a, b] intersected with the dense segments."""
    _, a = _locate(ts, a)
    _, b = _locate(ts, b)
    out = []
    for lo, hi in ts.segments:
        lo2, hi2 = max(lo, a), min(hi, b)
        if lo2 < hi2:
            out.append((lo2, hi2))
    return out


# vectorized variants, used by the quadrature and stencil code ---------------


def _locate_vec(ts: TimeScale, pts: np.ndarray):
    """Vector version of _locate: (segment indices, snapped values)."""
    pts = np.asarray(pts, dtype=float)
    los, his, _ = ts._arrays
    idx = np.searchsorted(los, pts, side="right") - 1
    idx = np.clip(idx, 0, len(ts.segments) - 1)
    # a point just below a segment's lo still belongs to that segment
    bump = (pts > his[idx] + MATCH_TOL) & (idx + 1 < len(ts.segments))
    idx = np.where(bump, idx + 1, idx)
    ok = (pts >= los[idx] - MATCH_TOL) & (pts <= his[idx] + MATCH_TOL)
    if not np.all(ok):
        bad = pts[~ok][0]
        raise DomainError(f"point {bad!r} is not in the time scale {ts.descriptor}")
    dlo = np.abs(pts - los[idx])
    dhi = np.abs(pts - his[idx])
    snapped = np.where((dlo <= MATCH_TOL) & (dlo <= dhi), los[idx], pts)
    snapped = np.where(np.abs(snapped - his[idx]) <= MATCH_TOL, his[idx], snapped)
    return idx, snapped


def sigma_vec(ts: TimeScale, pts: np.ndarray) -> np.ndarray:
    idx, t = _locate_vec(ts, pts)
    _, his, nxt_lo = ts._arrays
    at_hi = t == his[idx]
    return np.where(at_hi, nxt_lo[idx], t)


def graininess_vec(ts: TimeScale, pts: np.ndarray) -> np.ndarray:
    _, t = _locate_vec(ts, pts)
    return sigma_vec(ts, t) - t


# ---------------------------------------------------------------------------
# mini-grammar: parse/format descriptors used by the CLI and reports

_RAND_RE = re.compile(r"^rand:seed=(-?\d+),segs=(\d+),span=([^,]+)$")
_UNION_RE = re.compile(r"^U:(.+)$")
_PAIR_RE = re.compile(r"\(([^,()]+),([^,()]+)\)")


def parse_timescale(text: str) -> TimeScale:
    """Parse the time-scale mini-grammar.

    Forms: R[a,b] | Z[a,b] | hZ[a,b;h] | q[n;q] | U:(l1,h1),(l2,h2),... |
    rand:seed=S,segs=K,span=W
    """
    text = text.strip()
    try:
        if text.startswith("R[") and text.endswith("]"):
            a, b = (float(v) for v in text[2:-1].split(","))
            return reals(a, b)
        if text.startswith("Z[") and text.endswith("]"):
            a, b = (float(v) for v in text[2:-1].split(","))
            return integers(a, b)
        if text.startswith("hZ[") and text.endswith("]"):
            body, h = text[3:-1].split(";")
            a, b = (float(v) for v in body.split(","))
            return h_grid(a, b, float(h))
        if text.startswith("q[") and text.endswith("]"):
            n, q = text[2:-1].split(";")
            return q_grid(float(q), int(n))
        m = _RAND_RE.match(text)
        if m:
            return random_timescale(int(m.group(1)), int(m.group(2)), float(m.group(3)))
        m = _UNION_RE.match(text)
        if m:
            pairs = _PAIR_RE.findall(m.group(1))
            if not pairs:
                raise ConstructionError(f"no segments in {text!r}")
            return build_timescale([(float(lo), float(hi)) for lo, hi in pairs])
    except ConstructionError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConstructionError(f"bad time-scale spec {text!r}: {exc}") from exc
    raise ConstructionError(f"unrecognized time-scale spec {text!r}")


def format_timescale(ts: TimeScale) -> str:
    return ts.descriptor or _segments_descriptor(ts.segments)
