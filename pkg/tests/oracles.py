"""Independent oracles used to freeze expected values in the tests.

Everything here stays away from the package's quadrature/stencil code:
exact rational polynomial integration, closed-form sums, and brute-force
lattice arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction


def poly_integral_1d(coeffs: dict[int, Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    """Integral of sum c_i x^i over [lo, hi], exactly."""
    total = Fraction(0)
    for i, c in coeffs.items():
        total += Fraction(c) * (Fraction(hi) ** (i + 1) - Fraction(lo) ** (i + 1)) / (i + 1)
    return total


def poly_integral_2d(coeffs: dict[tuple[int, int], Fraction], a, b, c, d) -> Fraction:
    """Integral of sum c_ij x^i y^j over [a,b] x [c,d], exactly."""
    total = Fraction(0)
    for (i, j), coef in coeffs.items():
        fx = (Fraction(b) ** (i + 1) - Fraction(a) ** (i + 1)) / (i + 1)
        fy = (Fraction(d) ** (j + 1) - Fraction(c) ** (j + 1)) / (j + 1)
        total += Fraction(coef) * fx * fy
    return total


def poly_mul(p: dict, q: dict) -> dict:
    out: dict[tuple[int, int], Fraction] = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, Fraction(0)) + Fraction(c1) * Fraction(c2)
    return out


def poly_add(p: dict, q: dict, qscale=1) -> dict:
    out = {k: Fraction(v) for k, v in p.items()}
    for k, v in q.items():
        out[k] = out.get(k, Fraction(0)) + Fraction(qscale) * Fraction(v)
    return out


def pure_point_integral_1d(points_with_gaps, h, a, b) -> float:
    """Sum of h(t) * mu(t) over scale points t in [a, b)."""
    return math.fsum(
        h(t) * mu for t, mu in points_with_gaps if a <= t < b
    )


def lattice_double_sum(term, xs, ys) -> float:
    return math.fsum(term(x, y) for x in xs for y in ys)
