import math
import random
from fractions import Fraction

import numpy as np
import pytest

from chronoscale.delta_calculus import (
    BivariateFunction,
    QuadConfig,
    Rectangle,
    delta_integral_1d,
    delta_integral_2d,
    delta_partial,
    mixed_delta,
    sup_norm_mixed,
    validate_exact_mixed,
)
from chronoscale.errors import AccuracyError, ConstructionError, DomainError
from chronoscale.timescale_core import (
    TimeScalePairSpec,
    build_timescale,
    graininess,
    h_grid,
    integers,
    random_timescale,
    reals,
    scattered_points,
    sigma,
)
from oracles import poly_integral_1d, pure_point_integral_1d

CFG = QuadConfig()

FXY = BivariateFunction("x*y", lambda x, y: x * y,
                        lambda x, y, sx, sy: 1.0 + 0.0 * (x + y + sx + sy))
FX2 = BivariateFunction("x^2", lambda x, y: x * x + 0.0 * y)
FX2Y = BivariateFunction("x^2*y", lambda x, y: x * x * y,
                         lambda x, y, sx, sy: (sx + x) + 0.0 * (y + sy))
FCONST = BivariateFunction("const", lambda x, y: 3.0 + 0.0 * (x + y),
                           lambda x, y, sx, sy: 0.0 * (x + y + sx + sy))


def pair_of(ts1, ts2=None):
    return TimeScalePairSpec(ts1, ts2 if ts2 is not None else ts1)


# --- config and type validation ---------------------------------------------


def test_quadconfig_validation():
    for bad in (
        dict(quad_order=1),
        dict(panel_tol=0.0),
        dict(max_depth=0),
        dict(supnorm_samples_per_segment=1),
    ):
        with pytest.raises(ConstructionError):
            QuadConfig(**bad)


def test_bivariate_smoothness_tag():
    with pytest.raises(ConstructionError):
        BivariateFunction("f", lambda x, y: x, smoothness="rough")


def test_rectangle_validation():
    pair = pair_of(integers(0, 5))
    with pytest.raises(DomainError):
        Rectangle(pair, 0, 0.5, 0, 5)
    with pytest.raises(DomainError):
        Rectangle(pair, 3, 3, 0, 5)
    r = Rectangle(pair, 0, 5, 1, 4)
    assert (r.a, r.b, r.c, r.d) == (0, 5, 1, 4)


# --- delta partial derivatives ----------------------------------------------


def test_delta_partial_product_rule_everywhere():
    for pair in (pair_of(integers(0, 5)), pair_of(reals(0, 5)), pair_of(h_grid(0, 5, 0.5))):
        assert delta_partial(1, FXY, pair, 2, 3, CFG) == pytest.approx(3.0, abs=1e-7)


def test_delta_partial_x2_integer_quotient():
    # oracle: ((x+1)^2 - x^2) / 1 at x = 2
    assert delta_partial(1, FX2, pair_of(integers(0, 5)), 2, 3, CFG) == 5.0


def test_delta_partial_x2_dense():
    got = delta_partial(1, FX2, pair_of(reals(0, 4)), 2, 1, CFG)
    assert got == pytest.approx(4.0, abs=1e-7)


def test_delta_partial_one_sided_at_boundary():
    got = delta_partial(1, FX2, pair_of(reals(0, 4)), 4, 1, CFG)
    assert got == pytest.approx(8.0, abs=1e-5)


def test_delta_partial_axis2():
    assert delta_partial(2, FXY, pair_of(integers(0, 5)), 2, 3, CFG) == pytest.approx(2.0)


def test_delta_partial_degenerate_endpoint():
    ts = build_timescale([(0, 1), (2, 2)])
    with pytest.raises(DomainError, match="degenerate endpoint"):
        delta_partial(1, FX2, pair_of(ts), 2, 0.5, CFG)


def test_delta_partial_scattered_bit_reproducible():
    pair = pair_of(h_grid(0, 3, 0.25))
    vals = {delta_partial(1, FX2, pair, 1.25, 0.5, CFG) for _ in range(5)}
    other_cfg = QuadConfig(derivative_step_scale=1e-4)
    vals.add(delta_partial(1, FX2, pair, 1.25, 0.5, other_cfg))
    assert len(vals) == 1  # exact quotient: no step-size dependence


# --- mixed delta derivative --------------------------------------------------


def test_mixed_product_is_one():
    for pair in (pair_of(integers(0, 5)), pair_of(reals(0, 5)),
                 pair_of(integers(0, 5), reals(0, 5))):
        got = mixed_delta(FXY, pair, 2, 3, CFG, use_exact=False)
        assert got == pytest.approx(1.0, abs=1e-8)


def test_mixed_x2y_integer():
    # axis-1 derivative of x^2 is sigma(x)+x, then the y-derivative picks it out
    got = mixed_delta(FX2Y, pair_of(integers(0, 5)), 2, 3, CFG, use_exact=False)
    assert got == pytest.approx(5.0, abs=1e-9)


def test_mixed_constant_zero():
    assert mixed_delta(FCONST, pair_of(reals(0, 2)), 1, 1, CFG, use_exact=False) == (
        pytest.approx(0.0, abs=1e-9)
    )


def test_mixed_exact_preferred():
    pair = pair_of(integers(0, 5))
    assert mixed_delta(FX2Y, pair, 2, 3, CFG) == 5.0  # closed form, exact


def test_derivative_consistency_corpus():
    # numeric path within max(1e-6, 1e-6|exact|) of the closed form
    pairs = [
        pair_of(reals(0, 2)),
        pair_of(integers(0, 4)),
        pair_of(h_grid(0, 2, 0.25), reals(0.5, 3)),
        pair_of(random_timescale(21), random_timescale(22)),
    ]
    for f in (FXY, FX2Y, FCONST):
        for pair in pairs:
            rect = Rectangle(pair, pair.ts1.min, pair.ts1.max, pair.ts2.min, pair.ts2.max)
            dev = validate_exact_mixed(f, pair, rect, CFG)
            assert dev <= 1e-6, (f.label, pair.descriptor, dev)


# --- 1d integrals -------------------------------------------------------------


def test_integral_integers():
    assert delta_integral_1d(integers(0, 3), lambda t: t, 0, 3, CFG) == 3.0


def test_integral_reals():
    got = delta_integral_1d(reals(0, 1), lambda t: t, 0, 1, CFG)
    assert got == pytest.approx(0.5, abs=1e-10)


def test_integral_hybrid():
    # oracle: dense piece 1/2 plus jump h(1)*mu(1) = 1
    ts = build_timescale([(0, 1), (2, 2)])
    assert delta_integral_1d(ts, lambda t: t, 0, 2, CFG) == pytest.approx(1.5, abs=1e-12)


def test_integral_empty_range():
    assert delta_integral_1d(integers(0, 3), lambda t: t, 2, 2, CFG) == 0.0


def test_integral_endpoint_errors():
    with pytest.raises(DomainError):
        delta_integral_1d(integers(0, 3), lambda t: t, 0.5, 3, CFG)
    with pytest.raises(DomainError):
        delta_integral_1d(integers(0, 3), lambda t: t, 3, 0, CFG)


def test_integral_nonconvergence_error():
    # a jump discontinuity is outside the smooth-restriction contract; the
    # engine reports its best estimate instead of silently accepting
    step = lambda t: np.where(t < 1 / math.sqrt(2), 0.0, 1.0)
    with pytest.raises(AccuracyError) as exc:
        delta_integral_1d(reals(0, 1), step, 0, 1, CFG)
    # the payload names the offending panel and carries a usable estimate
    assert math.isfinite(exc.value.estimate)
    assert exc.value.error_bound > 0


def test_discrete_exactness_random():
    rng = random.Random(5)
    for _ in range(25):
        pts = sorted(rng.sample(range(-20, 40), rng.randint(3, 12)))
        ts = build_timescale([(float(p), float(p)) for p in pts])
        mus = [(t, graininess(ts, t)) for t in scattered_points(ts, ts.min, ts.max)]
        h = lambda t: math.sin(t) + t * t
        a, b = float(pts[0]), float(pts[-1])
        want = pure_point_integral_1d(mus, h, a, b)
        got = delta_integral_1d(ts, lambda t: np.sin(t) + t * t, a, b, CFG)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_continuous_polynomial_exactness():
    # degrees below twice the node count integrate to closed form
    rng = random.Random(11)
    for deg in range(0, 21, 4):
        coeffs = {i: Fraction(rng.randint(-5, 5)) for i in range(deg + 1)}
        want = float(poly_integral_1d(coeffs, Fraction(-1), Fraction(2)))

        def h(t, c=coeffs):
            return sum(float(v) * t**i for i, v in c.items())

        got = delta_integral_1d(reals(-1, 2), h, -1, 2, CFG)
        assert got == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_linearity_and_additivity_randomized():
    rng = random.Random(99)
    kinds = [
        lambda: reals(0, 2),
        lambda: integers(0, 6),
        lambda: h_grid(0, 2, 0.25),
        lambda: build_timescale([(0, 0.8), (1.2, 1.2), (1.5, 2.0)]),
        lambda: random_timescale(rng.getrandbits(30)),
    ]
    checked = 0
    while checked < 200:
        ts = rng.choice(kinds)()
        alpha, beta = rng.uniform(-3, 3), rng.uniform(-3, 3)
        h1 = lambda t: np.sin(t)
        h2 = lambda t: t * t
        a, b = ts.min, ts.max
        combo = delta_integral_1d(ts, lambda t: alpha * h1(t) + beta * h2(t), a, b, CFG)
        i1 = delta_integral_1d(ts, h1, a, b, CFG)
        i2 = delta_integral_1d(ts, h2, a, b, CFG)
        scale = abs(alpha * i1) + abs(beta * i2) + 1.0
        assert abs(combo - (alpha * i1 + beta * i2)) <= 1e-9 * scale
        # additivity at an interior scale point
        cands = [t for lo, hi in ts.segments for t in (lo, hi) if a < t < b]
        if cands:
            c = rng.choice(cands)
            whole = delta_integral_1d(ts, h2, a, b, CFG)
            parts = delta_integral_1d(ts, h2, a, c, CFG) + delta_integral_1d(
                ts, h2, c, b, CFG
            )
            assert abs(whole - parts) <= 1e-9 * (abs(whole) + 1.0)
        checked += 1


# --- 2d integrals -------------------------------------------------------------


def test_integral_2d_reals():
    pair = pair_of(reals(0, 1))
    rect = Rectangle(pair, 0, 1, 0, 1)
    assert delta_integral_2d(pair, FXY, rect, CFG) == pytest.approx(0.25, abs=1e-10)


def test_integral_2d_integers():
    pair = pair_of(integers(0, 3))
    rect = Rectangle(pair, 0, 3, 0, 3)
    # oracle: (0+1+2)^2
    assert delta_integral_2d(pair, FXY, rect, CFG) == pytest.approx(9.0, abs=1e-12)


def test_integral_2d_unit_measures_area():
    pair = pair_of(build_timescale([(0, 1), (2, 3)]), integers(0, 4))
    rect = Rectangle(pair, 0, 3, 0, 4)
    one = lambda t, s: 1.0 + 0.0 * (t + s)
    assert delta_integral_2d(pair, one, rect, CFG) == pytest.approx(12.0, abs=1e-10)


def test_fubini_on_smooth_function():
    pair = pair_of(build_timescale([(0, 1), (1.5, 2)]), h_grid(0, 2, 0.5))
    rect = Rectangle(pair, 0, 2, 0, 2)
    f = BivariateFunction("sin*exp", lambda x, y: np.sin(x) * np.exp(y / 3.0))
    xy = delta_integral_2d(pair, f, rect, CFG)
    # swapped iteration order, assembled manually
    def inner(s):
        return delta_integral_1d(pair.ts1, lambda t: f.eval(t, s), 0, 2, CFG)

    yx = delta_integral_1d(
        pair.ts2,
        lambda sv: np.array([inner(float(s)) for s in np.atleast_1d(sv)]),
        0,
        2,
        CFG,
    )
    assert xy == pytest.approx(yx, rel=1e-8)


# --- sup norm ------------------------------------------------------------------


def test_sup_norm_xy_is_one():
    for pair in (pair_of(reals(0, 1)), pair_of(integers(0, 4))):
        rect = Rectangle(pair, pair.ts1.min, pair.ts1.max, pair.ts2.min, pair.ts2.max)
        assert sup_norm_mixed(FXY, pair, rect, CFG) == pytest.approx(1.0, abs=1e-9)


def test_sup_norm_constant_zero():
    pair = pair_of(reals(0, 1))
    rect = Rectangle(pair, 0, 1, 0, 1)
    assert sup_norm_mixed(FCONST, pair, rect, CFG) == 0.0


def test_sup_norm_x2y_integers():
    # oracle: max of sigma(x)+x over scattered x in [0,2) is 1+2
    pair = pair_of(integers(0, 2))
    rect = Rectangle(pair, 0, 2, 0, 2)
    assert sup_norm_mixed(FX2Y, pair, rect, CFG) == pytest.approx(3.0, abs=1e-9)


def test_sigma_convention_in_exact_mixed():
    pair = pair_of(integers(0, 4))
    # at x=3 the closed form sees sigma(3)=4
    got = mixed_delta(FX2Y, pair, 3, 2, CFG)
    assert got == sigma(pair.ts1, 3) + 3
