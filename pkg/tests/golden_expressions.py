"""Golden expression corpus: text, reference closure, domain guard.

The guard filters random evaluation points to where the reference closure
is defined (positive bases, nonzero denominators)."""

import math


def _always(x, y):
    return True


GOLDEN = [
    ("x*y", lambda x, y: x * y, _always),
    ("x+y", lambda x, y: x + y, _always),
    ("x-y", lambda x, y: x - y, _always),
    ("x/y", lambda x, y: x / y, lambda x, y: abs(y) > 1e-3),
    ("x^2*y - 3", lambda x, y: x * x * y - 3, _always),
    ("-x^2", lambda x, y: -(x * x), _always),
    ("sin(x)+exp(y)", lambda x, y: math.sin(x) + math.exp(y), _always),
    ("cos(x*y)", lambda x, y: math.cos(x * y), _always),
    ("abs(x-y)", lambda x, y: abs(x - y), _always),
    ("exp(x/4)*y", lambda x, y: math.exp(x / 4) * y, _always),
    ("2^x", lambda x, y: 2.0**x, _always),
    ("x^3", lambda x, y: x**3, _always),
    ("(x+y)^2", lambda x, y: (x + y) ** 2, _always),
    ("x^2^3", lambda x, y: (x**2) ** 3, _always),  # left-associative power
    ("1/(1+x^2)", lambda x, y: 1 / (1 + x * x), _always),
    ("-x*-y", lambda x, y: (-x) * (-y), _always),
    ("x - y - 1", lambda x, y: x - y - 1, _always),
    ("x/y/2", lambda x, y: x / y / 2, lambda x, y: abs(y) > 1e-3),
    ("sin(cos(x))*exp(abs(y))", lambda x, y: math.sin(math.cos(x)) * math.exp(abs(y)), _always),
    ("3.5*x + 0.25*y^2", lambda x, y: 3.5 * x + 0.25 * y * y, _always),
]
