"""Boundary-average operator, four-quadrant integral operator, the pointwise
representation identity linking them, and the three inequality checkers with
their exact continuous/discrete cross-check oracles.

All comparisons land in InequalityResult; a check "passes" when
lhs <= rhs + tol_abs + tol_rel*|rhs|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad as _scipy_quad

from .delta_calculus import (
    BivariateFunction,
    QuadConfig,
    Rectangle,
    _adaptive,
    _gl_nodes,
    _mixed_mesh,
    _mixed_vec,
    chebyshev_interior,
    delta_integral_1d,
    mixed_noise_estimate,
    sup_norm_mixed,
)
from .errors import DomainError, MisuseError
from .timescale_core import (
    MATCH_TOL,
    TimeScalePairSpec,
    dense_overlaps,
    graininess,
    scattered_points,
    sigma,
    snap,
)

DEFAULT_TOL_ABS = 1e-7
DEFAULT_TOL_REL = 1e-7

THEOREM_IDS = ("identity", "thm21", "thm22-stated", "thm22-derived", "thm31")


@dataclass(frozen=True)
class InequalityResult:
    theorem: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tol_abs: float
    tol_rel: float
    witness: dict = field(default_factory=dict)
    notes: str = ""

    def to_record(self, trial: int) -> dict:
        w = self.witness
        return {
            "trial": trial,
            "theorem": self.theorem,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.passed,
            "timescale1": w.get("timescale1", ""),
            "timescale2": w.get("timescale2", ""),
            "rect": w.get("rect", []),
            "f": w.get("f", ""),
            "g": w.get("g"),
            "notes": self.notes,
        }


def _passes(lhs: float, rhs: float, tol_abs: float, tol_rel: float) -> bool:
    return lhs <= rhs + tol_abs + tol_rel * abs(rhs)


def _result(theorem, lhs, rhs, tol_abs, tol_rel, witness, notes=""):
    return InequalityResult(
        theorem=theorem,
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        passed=_passes(lhs, rhs, tol_abs, tol_rel),
        tol_abs=tol_abs,
        tol_rel=tol_rel,
        witness=witness,
        notes=notes,
    )


def _witness(rect: Rectangle, f: BivariateFunction, g: BivariateFunction | None):
    return {
        "timescale1": rect.pair.ts1.descriptor,
        "timescale2": rect.pair.ts2.descriptor,
        "rect": [rect.a, rect.b, rect.c, rect.d],
        "f": f.label,
        "g": g.label if g is not None else None,
    }


# ---------------------------------------------------------------------------
# boundary-average and quadrant-integral operators


def _p_closure(f: BivariateFunction, pair: TimeScalePairSpec, rect: Rectangle):
    """Broadcast-safe (x, y) -> boundary average for a fixed rectangle."""
    sa = sigma(pair.ts1, rect.a)
    sc = sigma(pair.ts2, rect.c)
    b, d = rect.b, rect.d
    corner = 0.25 * (
        float(f.eval(sa, sc)) + float(f.eval(sa, d)) + float(f.eval(b, sc)) + float(f.eval(b, d))
    )

    def p(x, y):
        return 0.5 * (f.eval(sa, y) + f.eval(x, sc) + f.eval(x, d) + f.eval(b, y)) - corner

    return p


def _check_in_rect(pair, rect, x, y):
    x = snap(pair.ts1, x)
    y = snap(pair.ts2, y)
    if not (rect.a - MATCH_TOL <= x <= rect.b + MATCH_TOL):
        raise DomainError(f"x={x!r} outside [{rect.a}, {rect.b}]")
    if not (rect.c - MATCH_TOL <= y <= rect.d + MATCH_TOL):
        raise DomainError(f"y={y!r} outside [{rect.c}, {rect.d}]")
    return x, y


def p_operator(
    f: BivariateFunction, pair: TimeScalePairSpec, rect: Rectangle, x: float, y: float
) -> float:
    """Corner-corrected average of the four boundary traces at (x, y)."""
    x, y = _check_in_rect(pair, rect, x, y)
    return float(_p_closure(f, pair, rect)(x, y))


def _iterated_2d(pair, feval, a, b, c, d, cfg, noise_per_len=0.0):
    """Iterated delta double integral over [a,b] x [c,d] of a broadcasting map."""
    if a == b or c == d:
        return 0.0

    def inner(t):
        return delta_integral_1d(
            pair.ts2, lambda s: feval(t, s), c, d, cfg, noise_per_len=noise_per_len
        )

    outer_noise = 2.0 * noise_per_len * (d - c)

    def outer(tv):
        tv = np.atleast_1d(np.asarray(tv, dtype=float))
        return np.array([inner(float(t)) for t in tv])

    return delta_integral_1d(pair.ts1, outer, a, b, cfg, noise_per_len=outer_noise)


def q_operator(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    x: float,
    y: float,
    cfg: QuadConfig,
) -> float:
    """Signed four-quadrant double integral of the mixed delta derivative,
    with the inner corner at (x, y) and the outer corners at
    (sigma1(a), sigma2(c)) and (b, d)."""
    x, y = _check_in_rect(pair, rect, x, y)
    sa = sigma(pair.ts1, rect.a)
    sc = sigma(pair.ts2, rect.c)
    if x < sa - MATCH_TOL or y < sc - MATCH_TOL:
        raise DomainError(
            f"evaluation point ({x}, {y}) precedes first jump ({sa}, {sc})"
        )
    noise = mixed_noise_estimate(f, pair, rect, cfg)

    def m(t, s):
        return _mixed_vec(f, pair, float(t), s, cfg)

    i1 = _iterated_2d(pair, m, sa, x, sc, y, cfg, noise)
    i2 = _iterated_2d(pair, m, sa, x, y, rect.d, cfg, noise)
    i3 = _iterated_2d(pair, m, x, rect.b, sc, y, cfg, noise)
    i4 = _iterated_2d(pair, m, x, rect.b, y, rect.d, cfg, noise)
    return i1 - i2 - i3 + i4


def identity_residual(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    x: float,
    y: float,
    cfg: QuadConfig,
) -> float:
    """f(x,y) minus boundary average minus a quarter of the quadrant
    integral; vanishes identically for smooth restrictions."""
    x, y = _check_in_rect(pair, rect, x, y)
    pval = p_operator(f, pair, rect, x, y)
    qval = q_operator(f, pair, rect, x, y, cfg)
    return float(f.eval(x, y)) - pval - 0.25 * qval


# ---------------------------------------------------------------------------
# evaluation grids and the grid identity check


def evaluation_grid_axis(ts, lo, hi, n_cheb, min_allowed):
    """Scattered points of the rectangle plus Chebyshev interior points per
    dense piece, filtered to stay at or beyond the first jump."""
    pts = list(scattered_points(ts, lo, hi))
    if graininess(ts, hi) > 0:
        pts.append(snap(ts, hi))
    for a0, b0 in dense_overlaps(ts, lo, hi):
        pts.extend(chebyshev_interior(a0, b0, n_cheb))
    return sorted({p for p in pts if p >= min_allowed - MATCH_TOL})


def _axis_breaks(ts, start, stop, eval_pts):
    """Integration breakpoints: eval points plus dense-piece endpoints, so
    every consecutive pair is either one jump or one dense panel."""
    brk = {start, stop}
    brk.update(p for p in eval_pts if start <= p <= stop)
    for lo, hi in dense_overlaps(ts, start, stop):
        brk.add(lo)
        brk.add(hi)
    for p in scattered_points(ts, start, stop):
        if p >= start:
            brk.add(p)
    return sorted(brk)


def _cell_integral(f, pair, cfg, x0, x1, y0, y1, noise):
    """Double integral of the mixed derivative over one cell. Cells are
    guaranteed by _axis_breaks to be a single jump or a single dense panel
    per axis."""
    ts1, ts2 = pair.ts1, pair.ts2
    jump_x = graininess(ts1, x0) > 0 and sigma(ts1, x0) == x1
    jump_y = graininess(ts2, y0) > 0 and sigma(ts2, y0) == y1
    mesh = lambda tx, sy: _mixed_mesh(f, pair, tx, sy, cfg)
    if jump_x and jump_y:
        val = float(mesh(np.array([x0]), np.array([y0]))[0, 0])
        return (x1 - x0) * (y1 - y0) * val
    if jump_x:
        line = lambda sv: mesh(np.array([x0]), np.atleast_1d(sv))[0]
        v, _ = _adaptive(line, y0, y1, cfg.panel_tol, noise, cfg.quad_order, cfg.max_depth)
        return (x1 - x0) * v
    if jump_y:
        line = lambda tv: mesh(np.atleast_1d(tv), np.array([y0]))[:, 0]
        v, _ = _adaptive(line, x0, x1, cfg.panel_tol, noise, cfg.quad_order, cfg.max_depth)
        return (y1 - y0) * v
    return _tensor_quad(mesh, x0, x1, y0, y1, cfg, noise)


def _tensor_panel(mesh, x0, x1, y0, y1, order):
    u, wu = _gl_nodes(order)
    hx, hy = 0.5 * (x1 - x0), 0.5 * (y1 - y0)
    tx = hx * u + 0.5 * (x1 + x0)
    sy = hy * u + 0.5 * (y1 + y0)
    m = mesh(tx, sy)
    return hx * hy * float(wu @ m @ wu)


def _tensor_quad(mesh, x0, x1, y0, y1, cfg, noise, depth=None, whole=None, tol=None,
                 wmin=0.0):
    if depth is None:
        depth = cfg.max_depth
    if tol is None:
        tol = cfg.panel_tol
    if whole is None:
        whole = _tensor_panel(mesh, x0, x1, y0, y1, cfg.quad_order)
    xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    quads = [
        (x0, xm, y0, ym),
        (x0, xm, ym, y1),
        (xm, x1, y0, ym),
        (xm, x1, ym, y1),
    ]
    parts = [_tensor_panel(mesh, *q, cfg.quad_order) for q in quads]
    refined = math.fsum(parts)
    err = abs(whole - refined)
    # wmin caps refinement of crease lines under |.|: a diagonal crease
    # otherwise multiplies straddling panels 2x per level, and the residual
    # truncation at the cap is ~crease_length * wmin^2, far below use-site
    # tolerances
    if (
        err <= max(tol, noise * (x1 - x0) * (y1 - y0))
        or depth <= 0
        or (x1 - x0) <= wmin
    ):
        return refined
    return math.fsum(
        _tensor_quad(mesh, *q, cfg, noise, depth - 1, parts[i], 0.5 * tol, wmin)
        for i, q in enumerate(quads)
    )


def _gl_line(mesh_rows, lo, hi, order):
    """Panel integral along the second axis for a whole batch of first-axis
    nodes at once; returns one value per row."""
    u, wu = _gl_nodes(order)
    half = 0.5 * (hi - lo)
    vals = mesh_rows(half * u + 0.5 * (hi + lo))
    return half * (vals @ wu)


def _adaptive_batch(mesh_rows, lo, hi, tol, noise_per_len, order, depth, scale=None):
    """Adaptive bisection with vector-valued panels sharing one partition.

    For integrands like |mixed(t, s)| whose creases sit at fixed s, every
    outer node needs the same subdivision; refining once for the whole batch
    removes the outer-times-inner cost blowup."""
    whole = _gl_line(mesh_rows, lo, hi, order)
    if scale is None:
        scale = [float(np.max(np.abs(whole)))]
    return _refine_batch(mesh_rows, lo, hi, whole, tol, noise_per_len, order, depth, scale)


def _refine_batch(mesh_rows, lo, hi, whole, tol, noise_per_len, order, depth, scale):
    mid = 0.5 * (lo + hi)
    left = _gl_line(mesh_rows, lo, mid, order)
    right = _gl_line(mesh_rows, mid, hi, order)
    scale[0] = max(scale[0], float(np.max(np.abs(left) + np.abs(right))))
    err = float(np.max(np.abs(whole - (left + right))))
    floor = 512.0 * 2.220446049250313e-16 * scale[0]
    if err <= max(tol, noise_per_len * (hi - lo), floor) or depth <= 0:
        return left + right
    child_tol = tol / math.sqrt(2.0)
    lval = _refine_batch(mesh_rows, lo, mid, left, child_tol, noise_per_len, order,
                         depth - 1, scale)
    rval = _refine_batch(mesh_rows, mid, hi, right, child_tol, noise_per_len, order,
                         depth - 1, scale)
    return lval + rval


def _mesh_integral_2d(mesh, pair, a, b, c, d, cfg, noise):
    """Delta double integral of a mesh-evaluatable map: the inner axis is
    integrated for a whole batch of outer nodes per call."""
    if a == b or c == d:
        return 0.0
    ts2 = pair.ts2
    jumps_y = [(s, sigma(ts2, s) - s) for s in scattered_points(ts2, c, d)]
    dense_y = dense_overlaps(ts2, c, d)
    sy = np.array([s for s, _ in jumps_y])
    muy = np.array([m for _, m in jumps_y])

    def inner_batch(tv):
        tv = np.atleast_1d(np.asarray(tv, dtype=float))
        acc = np.zeros(tv.shape)
        if len(jumps_y):
            acc += mesh(tv, sy) @ muy
        for y0, y1 in dense_y:
            rows = lambda sv: mesh(tv, np.atleast_1d(sv))
            acc += _adaptive_batch(rows, y0, y1, cfg.panel_tol, noise,
                                   cfg.quad_order, cfg.max_depth)
        return acc

    outer_noise = 2.0 * noise * (d - c)
    return delta_integral_1d(pair.ts1, inner_batch, a, b, cfg,
                             noise_per_len=outer_noise)


def identity_grid(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    cfg: QuadConfig,
    n_cheb: int = 9,
):
    """Max |identity residual| over the rectangle's evaluation grid.

    The quadrant integrals at every grid point are assembled from one shared
    cumulative table of per-cell double integrals (exact regrouping by
    additivity), which keeps the whole-grid check near the cost of a single
    full-rectangle integral. Returns (max_abs_residual, number_of_points).
    """
    ts1, ts2 = pair.ts1, pair.ts2
    sa = sigma(ts1, rect.a)
    sc = sigma(ts2, rect.c)
    xs = evaluation_grid_axis(ts1, rect.a, rect.b, n_cheb, sa)
    ys = evaluation_grid_axis(ts2, rect.c, rect.d, n_cheb, sc)
    if not xs or not ys:
        return 0.0, 0
    bx = _axis_breaks(ts1, sa, rect.b, xs)
    by = _axis_breaks(ts2, sc, rect.d, ys)
    noise = mixed_noise_estimate(f, pair, rect, cfg)

    nx, ny = len(bx), len(by)
    cells = np.zeros((nx - 1, ny - 1))
    for k in range(nx - 1):
        for l in range(ny - 1):
            cells[k, l] = _cell_integral(
                f, pair, cfg, bx[k], bx[k + 1], by[l], by[l + 1], noise
            )
    cum = np.zeros((nx, ny))
    cum[1:, 1:] = np.cumsum(np.cumsum(cells, axis=0), axis=1)

    ix = {v: i for i, v in enumerate(bx)}
    iy = {v: j for j, v in enumerate(by)}
    xi = np.array([ix[v] for v in xs])
    yj = np.array([iy[v] for v in ys])

    w_xy = cum[np.ix_(xi, yj)]
    w_xd = cum[xi, -1][:, None]
    w_by = cum[-1, yj][None, :]
    w_bd = cum[-1, -1]
    qmesh = 4.0 * w_xy - 2.0 * w_xd - 2.0 * w_by + w_bd

    xa = np.asarray(xs)
    ya = np.asarray(ys)
    fmesh = np.asarray(f.eval(xa[:, None], ya[None, :]), dtype=float)
    fmesh = np.broadcast_to(fmesh, (xa.size, ya.size))
    p = _p_closure(f, pair, rect)
    pmesh = np.broadcast_to(np.asarray(p(xa[:, None], ya[None, :]), dtype=float),
                            (xa.size, ya.size))
    res = fmesh - pmesh - 0.25 * qmesh
    return float(np.max(np.abs(res))), int(res.size)


# ---------------------------------------------------------------------------
# theorem checkers


def _theorem_domain(pair: TimeScalePairSpec, rect: Rectangle):
    """Integration window for the theorem-level integrals.

    The pointwise representation (and hence the bound on the quadrant
    operator) holds for x >= sigma1(a), y >= sigma2(c); below the first
    jump the quadrant ranges are oriented and the bound genuinely fails.
    On dense scales this window is the whole rectangle.
    """
    return (
        min(sigma(pair.ts1, rect.a), rect.b),
        min(sigma(pair.ts2, rect.c), rect.d),
    )


def verify_thm21(
    f: BivariateFunction,
    g: BivariateFunction,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    cfg: QuadConfig,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
) -> InequalityResult:
    """Product bound: the fg integral deviates from the symmetrized
    boundary-average cross terms by at most (area/8) * integral of
    |g|*sup|f_mixed| + |f|*sup|g_mixed|."""
    sa, sc = _theorem_domain(pair, rect)
    pf = _p_closure(f, pair, rect)
    pg = _p_closure(g, pair, rect)
    nf = sup_norm_mixed(f, pair, rect, cfg)
    ng = sup_norm_mixed(g, pair, rect, cfg)

    def lhs_integrand(t, s):
        fv = f.eval(t, s)
        gv = g.eval(t, s)
        return fv * gv - 0.5 * (pf(t, s) * gv + pg(t, s) * fv)

    lhs = abs(_iterated_2d(pair, lhs_integrand, sa, rect.b, sc, rect.d, cfg))

    def rhs_integrand(t, s):
        return np.abs(g.eval(t, s)) * nf + np.abs(f.eval(t, s)) * ng

    rhs = 0.125 * rect.area * _iterated_2d(
        pair, rhs_integrand, sa, rect.b, sc, rect.d, cfg
    )
    return _result("thm21", lhs, rhs, tol_abs, tol_rel, _witness(rect, f, g))


def verify_thm22(
    f: BivariateFunction,
    g: BivariateFunction,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    cfg: QuadConfig,
    variant: str = "derived",
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
) -> InequalityResult:
    """Product-of-deviations bound, in two right-hand-side variants.

    variant="stated" uses (area^2)/16 * sup|f_mixed| * sup|g_mixed|, which
    has counterexamples once the area exceeds 9; variant="derived" uses
    area^3 and is the certified bound.
    """
    if variant not in ("stated", "derived"):
        raise MisuseError(f"unknown variant {variant!r}")
    sa, sc = _theorem_domain(pair, rect)
    pf = _p_closure(f, pair, rect)
    pg = _p_closure(g, pair, rect)
    nf = sup_norm_mixed(f, pair, rect, cfg)
    ng = sup_norm_mixed(g, pair, rect, cfg)

    def lhs_integrand(t, s):
        fv = f.eval(t, s)
        gv = g.eval(t, s)
        pfv = pf(t, s)
        pgv = pg(t, s)
        return fv * gv - (pfv * gv + pgv * fv - pfv * pgv)

    lhs = abs(_iterated_2d(pair, lhs_integrand, sa, rect.b, sc, rect.d, cfg))
    power = 2 if variant == "stated" else 3
    rhs = (rect.area**power) / 16.0 * nf * ng
    return _result(
        f"thm22-{variant}", lhs, rhs, tol_abs, tol_rel, _witness(rect, f, g),
        notes=f"{variant} bound",
    )


def verify_thm31(
    f: BivariateFunction,
    pair: TimeScalePairSpec,
    rect: Rectangle,
    cfg: QuadConfig,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
) -> InequalityResult:
    """Trapezoid-type bound: the f integral against edge integrals and
    corner values, bounded by (area/4) * integral of |mixed derivative|.

    The edge and corner coefficients use the measure of the integration
    window [sigma1(a), b] x [sigma2(c), d]; that keeps the left side equal
    to a quarter of the integrated quadrant operator, which is what the
    right side bounds. On dense scales they coincide with (b-a), (d-c).
    """
    a, b, c, d = rect.a, rect.b, rect.c, rect.d
    sa, sc = _theorem_domain(pair, rect)
    total = _iterated_2d(pair, lambda t, s: f.eval(t, s), sa, b, sc, d, cfg)
    edge1 = delta_integral_1d(
        pair.ts1, lambda t: f.eval(t, sc) + f.eval(t, d), sa, b, cfg
    )
    edge2 = delta_integral_1d(
        pair.ts2, lambda s: f.eval(sa, s) + f.eval(b, s), sc, d, cfg
    )
    corners = (
        float(f.eval(sa, sc)) + float(f.eval(sa, d)) + float(f.eval(b, sc)) + float(f.eval(b, d))
    )
    lhs = abs(
        total
        - 0.5 * ((d - sc) * edge1 + (b - sa) * edge2)
        + 0.25 * (b - sa) * (d - sc) * corners
    )
    noise = mixed_noise_estimate(f, pair, rect, cfg)

    def abs_mixed_mesh(tx, sy):
        return np.abs(_mixed_mesh(f, pair, tx, sy, cfg))

    rhs = 0.25 * rect.area * _mesh_integral_2d(
        abs_mixed_mesh, pair, sa, b, sc, d, cfg, noise
    )
    return _result("thm31", lhs, rhs, tol_abs, tol_rel, _witness(rect, f, None))


# ---------------------------------------------------------------------------
# exact specialization oracles


def _require_dense(rect: Rectangle):
    for ts in (rect.pair.ts1, rect.pair.ts2):
        if len(ts.segments) != 1 or ts.segments[0][0] == ts.segments[0][1]:
            raise MisuseError(
                f"continuous oracle needs single dense intervals, got {ts.descriptor}"
            )


def _quad1(fn, lo, hi):
    val, _ = _scipy_quad(fn, lo, hi, epsabs=1e-11, epsrel=1e-11, limit=200)
    return val


def _quad2(fn, a, b, c, d):
    return _quad1(lambda t: _quad1(lambda s: fn(t, s), c, d), a, b)


def _classical_mixed(f: BivariateFunction):
    """Classical cross-derivative with one Richardson step; used only when a
    closed form is absent."""
    if f.exact_mixed is not None:
        return lambda x, y: float(f.exact_mixed(x, y, x, y))

    def cross(x, y, h, k):
        return (
            float(f.eval(x + h, y + k))
            - float(f.eval(x + h, y - k))
            - float(f.eval(x - h, y + k))
            + float(f.eval(x - h, y - k))
        ) / (4.0 * h * k)

    def mixed(x, y):
        h = 1e-3 * (1.0 + abs(x))
        k = 1e-3 * (1.0 + abs(y))
        return (4.0 * cross(x, y, 0.5 * h, 0.5 * k) - cross(x, y, h, k)) / 3.0

    return mixed


def continuous_oracle(
    theorem: str,
    f: BivariateFunction,
    g: BivariateFunction | None,
    rect: Rectangle,
    n_sup: int = 9,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
) -> InequalityResult:
    """Evaluate the dense-interval specialization directly with classical
    derivatives and adaptive quadpack integrals (jump operators collapse to
    the identity). Supremum sampling follows the same Chebyshev rule as the
    general path so the two lower estimates are comparable."""
    _require_dense(rect)
    a, b, c, d = rect.a, rect.b, rect.c, rect.d
    area = rect.area
    fe = lambda x, y: float(f.eval(x, y))

    def pc(fn):
        corner = 0.25 * (fn(a, c) + fn(a, d) + fn(b, c) + fn(b, d))
        return lambda x, y: 0.5 * (fn(x, c) + fn(x, d) + fn(a, y) + fn(b, y)) - corner

    xs = chebyshev_interior(a, b, n_sup)
    ys = chebyshev_interior(c, d, n_sup)

    def supnorm(fn):
        mx = _classical_mixed(fn)
        return max(abs(mx(x, y)) for x in xs for y in ys)

    if theorem == "thm21":
        if g is None:
            raise MisuseError("thm21 oracle needs g")
        ge = lambda x, y: float(g.eval(x, y))
        pf, pg = pc(fe), pc(ge)
        nf, ng = supnorm(f), supnorm(g)
        lhs = abs(
            _quad2(
                lambda t, s: fe(t, s) * ge(t, s)
                - 0.5 * (pf(t, s) * ge(t, s) + pg(t, s) * fe(t, s)),
                a, b, c, d,
            )
        )
        rhs = 0.125 * area * _quad2(
            lambda t, s: abs(ge(t, s)) * nf + abs(fe(t, s)) * ng, a, b, c, d
        )
        return _result("thm21", lhs, rhs, tol_abs, tol_rel, _witness(rect, f, g),
                       notes="continuous oracle")
    if theorem in ("thm22-stated", "thm22-derived"):
        if g is None:
            raise MisuseError("thm22 oracle needs g")
        ge = lambda x, y: float(g.eval(x, y))
        pf, pg = pc(fe), pc(ge)
        nf, ng = supnorm(f), supnorm(g)
        lhs = abs(
            _quad2(
                lambda t, s: fe(t, s) * ge(t, s)
                - (pf(t, s) * ge(t, s) + pg(t, s) * fe(t, s) - pf(t, s) * pg(t, s)),
                a, b, c, d,
            )
        )
        power = 2 if theorem.endswith("stated") else 3
        rhs = (area**power) / 16.0 * nf * ng
        return _result(theorem, lhs, rhs, tol_abs, tol_rel, _witness(rect, f, g),
                       notes="continuous oracle")
    if theorem == "thm31":
        total = _quad2(fe, a, b, c, d)
        edge1 = _quad1(lambda t: fe(t, c) + fe(t, d), a, b)
        edge2 = _quad1(lambda s: fe(a, s) + fe(b, s), c, d)
        corners = fe(a, c) + fe(a, d) + fe(b, c) + fe(b, d)
        lhs = abs(total - 0.5 * ((d - c) * edge1 + (b - a) * edge2) + 0.25 * area * corners)
        mx = _classical_mixed(f)
        rhs = 0.25 * area * _quad2(lambda t, s: abs(mx(t, s)), a, b, c, d)
        return _result("thm31", lhs, rhs, tol_abs, tol_rel, _witness(rect, f, None),
                       notes="continuous oracle")
    raise MisuseError(f"continuous oracle does not handle theorem {theorem!r}")


def discrete_oracle(
    theorem: str,
    f: BivariateFunction,
    g: BivariateFunction | None,
    k: int,
    r: int,
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
) -> InequalityResult:
    """Brute-force integer-lattice sums on [0,k] x [0,r] (a=c=0, b=k, d=r,
    forward jump t -> t+1). Entirely independent of the quadrature engine.

    Theorem-level sums run over the window {1..k-1} x {1..r-1} (from the
    first jump, upper end half-open), matching the general path; the
    supremum samples the full {0..k-1} x {0..r-1} lattice."""
    if k != int(k) or r != int(r):
        raise MisuseError("discrete oracle needs integer k, r")
    k, r = int(k), int(r)
    if k < 1 or r < 1:
        raise MisuseError("discrete oracle needs k >= 1 and r >= 1")
    fe = lambda x, y: float(f.eval(float(x), float(y)))

    def mixed(fn):
        return lambda x, y: fn(x + 1, y + 1) - fn(x + 1, y) - fn(x, y + 1) + fn(x, y)

    def pd(fn):
        corner = 0.25 * (fn(1, 1) + fn(1, r) + fn(k, 1) + fn(k, r))
        return lambda x, y: 0.5 * (fn(1, y) + fn(x, 1) + fn(x, r) + fn(k, y)) - corner

    gridx = range(1, k)
    gridy = range(1, r)

    def dsum(term):
        return math.fsum(term(x, y) for x in gridx for y in gridy)

    def supnorm(fn):
        mx = mixed(fn)
        return max(abs(mx(x, y)) for x in range(k) for y in range(r))

    wit = {
        "timescale1": f"Z[0,{k}]",
        "timescale2": f"Z[0,{r}]",
        "rect": [0.0, float(k), 0.0, float(r)],
        "f": f.label,
        "g": g.label if g is not None else None,
    }
    if theorem == "thm21":
        if g is None:
            raise MisuseError("thm21 oracle needs g")
        ge = lambda x, y: float(g.eval(float(x), float(y)))
        pf, pg = pd(fe), pd(ge)
        nf, ng = supnorm(fe), supnorm(ge)
        lhs = abs(dsum(lambda x, y: fe(x, y) * ge(x, y)
                       - 0.5 * (pf(x, y) * ge(x, y) + pg(x, y) * fe(x, y))))
        rhs = 0.125 * k * r * dsum(lambda x, y: abs(ge(x, y)) * nf + abs(fe(x, y)) * ng)
        return _result("thm21", lhs, rhs, tol_abs, tol_rel, wit, notes="discrete oracle")
    if theorem in ("thm22-stated", "thm22-derived"):
        if g is None:
            raise MisuseError("thm22 oracle needs g")
        ge = lambda x, y: float(g.eval(float(x), float(y)))
        pf, pg = pd(fe), pd(ge)
        nf, ng = supnorm(fe), supnorm(ge)
        lhs = abs(dsum(lambda x, y: fe(x, y) * ge(x, y)
                       - (pf(x, y) * ge(x, y) + pg(x, y) * fe(x, y)
                          - pf(x, y) * pg(x, y))))
        power = 2 if theorem.endswith("stated") else 3
        rhs = float(k * r) ** power / 16.0 * nf * ng
        return _result(theorem, lhs, rhs, tol_abs, tol_rel, wit, notes="discrete oracle")
    if theorem == "thm31":
        total = dsum(lambda x, y: fe(x, y))
        edge1 = math.fsum(fe(t, 1) + fe(t, r) for t in gridx)
        edge2 = math.fsum(fe(1, s) + fe(k, s) for s in gridy)
        corners = fe(1, 1) + fe(1, r) + fe(k, 1) + fe(k, r)
        lhs = abs(
            total
            - 0.5 * ((r - 1) * edge1 + (k - 1) * edge2)
            + 0.25 * (k - 1) * (r - 1) * corners
        )
        mx = mixed(fe)
        rhs = 0.25 * k * r * dsum(lambda x, y: abs(mx(x, y)))
        return _result("thm31", lhs, rhs, tol_abs, tol_rel, wit, notes="discrete oracle")
    raise MisuseError(f"discrete oracle does not handle theorem {theorem!r}")
