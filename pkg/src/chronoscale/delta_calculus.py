"""Delta partial derivatives and delta integrals over rectangle domains.

The integral of h over [a, b] decomposes into exact jump terms
h(t) * (sigma(t) - t) at right-scattered t in [a, b) plus adaptive
Gauss-Legendre quadrature over the dense pieces. Derivatives are exact
difference quotients at scattered points and finite differences confined to
the enclosing dense segment otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import AccuracyError, ConstructionError, DomainError
from .timescale_core import (
    MATCH_TOL,
    TimeScale,
    TimeScalePairSpec,
    _locate,
    _locate_vec,
    dense_overlaps,
    graininess,
    scattered_points,
    sigma,
    sigma_vec,
    snap,
)

_EPS = float(np.finfo(float).eps)

# Step scale for the 5-node tensor stencils behind the numeric mixed
# derivative. 2e-3 balances the 4th-order truncation (~h^4) against the
# roundoff floor ~2.25*eps/h^2; a plain cube-root-of-eps central difference
# composition would sit near 1e-5 noise and miss the 1e-6 consistency
# contract against closed-form mixed derivatives.
MIXED_STEP_SCALE = 2e-3


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature and differentiation controls."""

    quad_order: int = 16
    panel_tol: float = 1e-11
    max_depth: int = 24
    derivative_step_scale: float = _EPS ** (1.0 / 3.0)
    supnorm_samples_per_segment: int = 9

    def __post_init__(self):
        if self.quad_order < 2:
            raise ConstructionError("quad_order must be >= 2")
        if not self.panel_tol > 0:
            raise ConstructionError("panel_tol must be positive")
        if self.max_depth < 1:
            raise ConstructionError("max_depth must be >= 1")
        if self.supnorm_samples_per_segment < 2:
            raise ConstructionError("supnorm_samples_per_segment must be >= 2")


@dataclass(frozen=True)
class BivariateFunction:
    """Evaluatable f(x, y), assumed the restriction of a smooth real function.

    ``eval`` must broadcast over numpy arrays in either argument.
    ``exact_mixed``, when present, gives the mixed delta derivative in closed
    form as a function of (x, y, sigma1(x), sigma2(y)).
    """

    label: str
    eval: Callable
    exact_mixed: Callable | None = None
    smoothness: str = "smooth-restriction"

    def __post_init__(self):
        if self.smoothness != "smooth-restriction":
            raise ConstructionError(
                f"unsupported smoothness tag {self.smoothness!r}"
            )

    def __repr__(self):
        return f"BivariateFunction({self.label!r})"


@dataclass(frozen=True)
class Rectangle:
    """Integration domain [a,b] x [c,d] with endpoints on the pair's scales."""

    pair: TimeScalePairSpec
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a = snap(self.pair.ts1, self.a)
        b = snap(self.pair.ts1, self.b)
        c = snap(self.pair.ts2, self.c)
        d = snap(self.pair.ts2, self.d)
        if not (a < b and c < d):
            raise DomainError(f"rectangle [{a},{b}]x[{c},{d}] must have a < b and c < d")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def area(self) -> float:
        return (self.b - self.a) * (self.d - self.c)

    def is_pure_point(self) -> bool:
        return not dense_overlaps(self.pair.ts1, self.a, self.b) and not dense_overlaps(
            self.pair.ts2, self.c, self.d
        )


# ---------------------------------------------------------------------------
# vector evaluation helper

def _eval_vec(h, xs: np.ndarray) -> np.ndarray:
    """Evaluate a univariate map on an array, tolerating scalar-only callables."""
    try:
        out = h(xs)
    except TypeError:
        out = np.array([float(h(float(x))) for x in xs])
    out = np.asarray(out, dtype=float)
    if out.shape != xs.shape:
        out = np.broadcast_to(out, xs.shape).astype(float)
    return out


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre over one dense interval

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _panel(h, lo: float, hi: float, order: int) -> float:
    x, w = _gl_nodes(order)
    half = 0.5 * (hi - lo)
    vals = _eval_vec(h, half * x + 0.5 * (hi + lo))
    return half * float(np.dot(w, vals))


def _adaptive(h, lo, hi, tol, noise_per_len, order, depth):
    whole = _panel(h, lo, hi, order)
    # running magnitude scale: disagreements below the roundoff floor of the
    # largest panel seen so far cannot be refined away (kinks under |.|
    # otherwise recurse forever chasing sub-eps truncation)
    scale = [abs(whole)]
    return _refine(h, lo, hi, whole, tol, noise_per_len, order, depth, scale)


def _refine(h, lo, hi, whole, tol, noise_per_len, order, depth, scale):
    mid = 0.5 * (lo + hi)
    left = _panel(h, lo, mid, order)
    right = _panel(h, mid, hi, order)
    scale[0] = max(scale[0], abs(left) + abs(right))
    err = abs(whole - (left + right))
    floor = 512.0 * _EPS * scale[0]
    if err <= max(tol, noise_per_len * (hi - lo), floor):
        return left + right, err
    if depth <= 0:
        raise AccuracyError(
            f"quadrature did not converge on [{lo}, {hi}]", left + right, err
        )
    # sqrt-splitting (children get tol/sqrt(2)) keeps the summed leaf budget
    # O(sqrt(leaves))*tol while letting kink-chasing refinement terminate:
    # panel error drops ~4x per level, so halving the budget per level can
    # race the depth cap on sharp |.| creases
    child_tol = tol / math.sqrt(2.0)
    lval, lerr = _refine(h, lo, mid, left, child_tol, noise_per_len, order, depth - 1, scale)
    rval, rerr = _refine(h, mid, hi, right, child_tol, noise_per_len, order, depth - 1, scale)
    return lval + rval, lerr + rerr


# ---------------------------------------------------------------------------
# delta integrals


def delta_integral_1d(
    ts: TimeScale,
    h,
    a: float,
    b: float,
    cfg: QuadConfig,
    *,
    abs_tol: float | None = None,
    noise_per_len: float = 0.0,
) -> float:
    """Integral of h over [a, b] on the scale: jump terms for t in [a, b)
    plus Gauss-Legendre quadrature over each dense piece."""
    a = snap(ts, a)
    b = snap(ts, b)
    if a > b:
        raise DomainError(f"integration range needs a <= b, got {a} > {b}")
    if a == b:
        return 0.0
    tol = cfg.panel_tol if abs_tol is None else abs_tol
    parts = []
    pts = scattered_points(ts, a, b)
    if pts:
        arr = np.asarray(pts)
        vals = _eval_vec(h, arr) * (sigma_vec(ts, arr) - arr)
        parts.extend(vals.tolist())
    for lo, hi in dense_overlaps(ts, a, b):
        val, _ = _adaptive(h, lo, hi, tol, noise_per_len, cfg.quad_order, cfg.max_depth)
        parts.append(val)
    return math.fsum(parts)


def delta_integral_2d(
    pair: TimeScalePairSpec,
    F,
    rect: Rectangle,
    cfg: QuadConfig,
    *,
    noise_per_len: float = 0.0,
) -> float:
    """Iterated integral: outer over the first axis of the inner integral
    over the second axis, both via delta_integral_1d."""
    feval = F.eval if isinstance(F, BivariateFunction) else F

    def inner(t: float) -> float:
        return delta_integral_1d(
            pair.ts2,
            lambda s: feval(t, s),
            rect.c,
            rect.d,
            cfg,
            noise_per_len=noise_per_len,
        )

    # the inner value carries quadrature/noise error of its own; treat it as
    # pointwise noise of the outer integrand
    outer_noise = 2.0 * noise_per_len * (rect.d - rect.c)

    def outer(tv):
        tv = np.atleast_1d(np.asarray(tv, dtype=float))
        return np.array([inner(float(t)) for t in tv])

    return delta_integral_1d(
        pair.ts1, outer, rect.a, rect.b, cfg, noise_per_len=outer_noise
    )


# ---------------------------------------------------------------------------
# delta partial derivatives


def _dense_segment(ts: TimeScale, t: float):
    i, t = _locate(ts, t)
    return ts.segments[i], t


def delta_partial(
    axis: int,
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    x: float,
    y: float,
    cfg: QuadConfig,
) -> float:
    """First delta partial derivative along the given axis.

    Right-scattered points use the exact difference quotient; right-dense
    points use a finite difference confined to the dense segment with step
    max(1e-7, derivative_step_scale * (1 + |t|)).
    """
    if axis not in (1, 2):
        raise DomainError(f"axis must be 1 or 2, got {axis}")
    ts = pair.ts1 if axis == 1 else pair.ts2
    t = snap(ts, x if axis == 1 else y)
    other = snap(pair.ts2 if axis == 1 else pair.ts1, y if axis == 1 else x)

    def g(v):
        return f.eval(v, other) if axis == 1 else f.eval(other, v)

    mu = graininess(ts, t)
    if mu > 0:
        return (float(g(sigma(ts, t))) - float(g(t))) / mu
    (lo, hi), t = _dense_segment(ts, t)
    h = max(1e-7, cfg.derivative_step_scale * (1.0 + abs(t)))
    room_l = t - lo
    room_r = hi - t
    if room_l >= h and room_r >= h:
        return (float(g(t + h)) - float(g(t - h))) / (2.0 * h)
    room = max(room_l, room_r)
    if room <= 16 * MATCH_TOL:
        raise DomainError(
            f"derivative undefined at degenerate endpoint {t!r} on {ts.descriptor}"
        )
    h = min(h, 0.5 * room)
    sgn = 1.0 if room_r >= room_l else -1.0
    # one-sided 3-point difference, O(h^2)
    return sgn * (
        -3.0 * float(g(t)) + 4.0 * float(g(t + sgn * h)) - float(g(t + 2.0 * sgn * h))
    ) / (2.0 * h)


# 5-node uniform first-derivative stencils; row s gives the weights for the
# derivative at node index s of nodes {0,..,4} spaced h apart (divide by 12h).
_STENCILS = np.array(
    [
        [-25.0, 48.0, -36.0, 16.0, -3.0],
        [-3.0, -10.0, 18.0, -6.0, 1.0],
        [1.0, -8.0, 0.0, 8.0, -1.0],
        [-1.0, 6.0, -18.0, 10.0, 3.0],
        [3.0, -16.0, 36.0, -48.0, 25.0],
    ]
)


def _axis_ops_vec(ts: TimeScale, pts: np.ndarray):
    """Differentiation operators for an array of points on one axis.

    Returns (nodes, weights), both shaped (5, n): weights dotted with f at
    the nodes give the first delta derivative along that axis. Scattered
    rows are exact two-point quotients (padded with zero weights); dense
    rows are 5-node stencils shifted to stay inside their segment.
    """
    pts = np.atleast_1d(np.asarray(pts, dtype=float))
    idx, t = _locate_vec(ts, pts)
    n = t.size
    all_los, all_his, nxt_lo = ts._arrays
    los = all_los[idx]
    his = all_his[idx]
    sig = np.where(t == his, nxt_lo[idx], t)
    mu = sig - t
    scattered = mu > 0

    nodes = np.tile(t, (5, 1))
    weights = np.zeros((5, n))

    if np.any(scattered):
        safe_mu = np.where(scattered, mu, 1.0)
        nodes[1, scattered] = sig[scattered]
        weights[0, scattered] = -1.0 / safe_mu[scattered]
        weights[1, scattered] = 1.0 / safe_mu[scattered]

    dense = ~scattered
    if np.any(dense):
        seglen = his - los
        if np.any(dense & (seglen <= 16 * MATCH_TOL)):
            bad = t[dense & (seglen <= 16 * MATCH_TOL)][0]
            raise DomainError(
                f"derivative undefined at degenerate endpoint {bad!r} on {ts.descriptor}"
            )
        h = np.minimum(MIXED_STEP_SCALE * (1.0 + np.abs(t)), seglen / 5.0)
        h = np.where(dense, h, 1.0)
        max_left = np.floor((t - los) / h + 1e-9)
        max_right = np.floor((his - t) / h + 1e-9)
        s = np.minimum(np.maximum(2.0, 4.0 - max_right), max_left).astype(int)
        offsets = np.arange(5)[:, None] - s[None, :]
        dnodes = t[None, :] + offsets * h[None, :]
        dweights = _STENCILS[s].T / (12.0 * h[None, :])
        nodes[:, dense] = dnodes[:, dense]
        weights[:, dense] = dweights[:, dense]
    return nodes, weights


def _mixed_vec(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    x: float,
    ys: np.ndarray,
    cfg: QuadConfig,
    *,
    use_exact: bool = True,
) -> np.ndarray:
    """Mixed delta derivative at (x, y) for an array of y values."""
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if use_exact and f.exact_mixed is not None:
        sx = sigma(pair.ts1, x)
        sy = sigma_vec(pair.ts2, ys)
        out = f.exact_mixed(x, ys, sx, sy)
        out = np.asarray(out, dtype=float)
        if out.shape != ys.shape:
            out = np.broadcast_to(out, ys.shape).astype(float)
        return out
    n1, w1 = _axis_ops_vec(pair.ts1, np.array([x]))
    n2, w2 = _axis_ops_vec(pair.ts2, ys)
    acc = np.zeros(ys.shape)
    for i in range(5):
        wi = w1[i, 0]
        if wi == 0.0:
            continue
        xi = n1[i, 0]
        row = np.zeros(ys.shape)
        for j in range(5):
            wj = w2[j]
            if not np.any(wj):
                continue
            row += wj * np.asarray(f.eval(xi, n2[j]), dtype=float)
        acc += wi * row
    return acc


def _mixed_mesh(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    tx: np.ndarray,
    sy: np.ndarray,
    cfg: QuadConfig,
) -> np.ndarray:
    """Numeric mixed derivative on the mesh tx x sy, shape (len(tx), len(sy))."""
    tx = np.atleast_1d(np.asarray(tx, dtype=float))
    sy = np.atleast_1d(np.asarray(sy, dtype=float))
    if f.exact_mixed is not None:
        sx = sigma_vec(pair.ts1, tx)
        s2 = sigma_vec(pair.ts2, sy)
        out = f.exact_mixed(tx[:, None], sy[None, :], sx[:, None], s2[None, :])
        return np.broadcast_to(np.asarray(out, dtype=float), (tx.size, sy.size)).copy()
    n1, w1 = _axis_ops_vec(pair.ts1, tx)
    n2, w2 = _axis_ops_vec(pair.ts2, sy)
    acc = np.zeros((tx.size, sy.size))
    for i in range(5):
        if not np.any(w1[i]):
            continue
        for j in range(5):
            if not np.any(w2[j]):
                continue
            vals = np.asarray(f.eval(n1[i][:, None], n2[j][None, :]), dtype=float)
            acc += (w1[i][:, None] * w2[j][None, :]) * vals
    return acc


def mixed_delta(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    x: float,
    y: float,
    cfg: QuadConfig,
    *,
    use_exact: bool = True,
) -> float:
    """Second-axis delta derivative of the first-axis delta derivative.

    Returns the closed form when the function carries one; the numeric
    path stays available (use_exact=False) for validation.
    """
    x = snap(pair.ts1, x)
    y = snap(pair.ts2, y)
    return float(_mixed_vec(f, pair, x, np.array([y]), cfg, use_exact=use_exact)[0])


def mixed_noise_estimate(
    f: BivariateFunction, pair: TimeScalePairSpec, rect: Rectangle, cfg: QuadConfig
) -> float:
    """Pointwise noise floor of the numeric mixed derivative over the
    rectangle; zero when the closed form is available."""
    if f.exact_mixed is not None:
        return 0.0
    xs = np.array([rect.a, 0.5 * (rect.a + rect.b), rect.b])
    ys = np.array([rect.c, 0.5 * (rect.c + rect.d), rect.d])
    amp = max(
        1.0,
        float(np.max(np.abs(np.asarray(f.eval(xs[:, None], ys[None, :]), dtype=float)))),
    )

    def _min_abs(lo, hi):  # smallest |t| in [lo, hi] gives the smallest step
        return 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))

    hx = MIXED_STEP_SCALE * (1.0 + _min_abs(rect.a, rect.b))
    hy = MIXED_STEP_SCALE * (1.0 + _min_abs(rect.c, rect.d))
    for ts, (u, v) in ((pair.ts1, (rect.a, rect.b)), (pair.ts2, (rect.c, rect.d))):
        pieces = dense_overlaps(ts, u, v)
        if pieces:
            m = min(hi - lo for lo, hi in pieces) / 5.0
            if ts is pair.ts1:
                hx = min(hx, m)
            else:
                hy = min(hy, m)
    # 2.25*eps/(hx*hy) is the tensor-stencil roundoff scale; 4x safety
    return 9.0 * _EPS * amp / (hx * hy)


def sup_norm_mixed(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    cfg: QuadConfig,
) -> float:
    """Max |mixed delta derivative| over the sample set: scattered points of
    [a,b) x [c,d) crossed with Chebyshev-spaced dense samples. A lower
    estimate of the true sup, which keeps all inequality checks conservative."""
    xs = _sup_samples(pair.ts1, rect.a, rect.b, cfg.supnorm_samples_per_segment)
    ys = np.asarray(
        _sup_samples(pair.ts2, rect.c, rect.d, cfg.supnorm_samples_per_segment)
    )
    best = 0.0
    for x in xs:
        vals = _mixed_vec(f, pair, x, ys, cfg)
        best = max(best, float(np.max(np.abs(vals))))
    return best


def chebyshev_interior(lo: float, hi: float, n: int):
    """n Chebyshev nodes strictly inside [lo, hi], ascending."""
    k = np.arange(1, n + 1)
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(np.pi * (2 * k - 1) / (2 * n))
    return np.sort(nodes).tolist()


def _sup_samples(ts: TimeScale, a: float, b: float, per_segment: int):
    pts = list(scattered_points(ts, a, b))
    for lo, hi in dense_overlaps(ts, a, b):
        pts.extend(chebyshev_interior(lo, hi, per_segment))
    return sorted(pts)


def validate_exact_mixed(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    cfg: QuadConfig,
) -> float:
    """Max |numeric - closed form| over the sup sample grid (0 when the
    function has no closed form)."""
    if f.exact_mixed is None:
        return 0.0
    xs = _sup_samples(pair.ts1, rect.a, rect.b, cfg.supnorm_samples_per_segment)
    ys = np.asarray(
        _sup_samples(pair.ts2, rect.c, rect.d, cfg.supnorm_samples_per_segment)
    )
    worst = 0.0
    for x in xs:
        exact = _mixed_vec(f, pair, x, ys, cfg, use_exact=True)
        numeric = _mixed_vec(f, pair, x, ys, cfg, use_exact=False)
        worst = max(worst, float(np.max(np.abs(numeric - exact))))
    return worst
