"""Independent oracles shared by the test modules.

Nothing here calls into k2hyper: brute-force sums use mpmath at 40 digits and
mpmath's own rising factorial, so they share no code path with the library.
"""

import itertools
from fractions import Fraction

import mpmath
import pytest

mpmath.mp.dps = 40

GENERIC_PARAMS = [
    (0.3, 0.5, 0.7, 1.5, 2.5, 3.5, 4.5),
    (0.45, -0.35, 1.2, 0.8, 1.7, 2.3, 1.1),
    (1.25, 0.6, -0.4, 2.2, 0.9, 1.6, 3.1),
]
CI_PARAMS = (Fraction(1, 3), Fraction(1, 5), Fraction(1, 7),
             Fraction(3, 2), Fraction(5, 2), Fraction(7, 2), Fraction(9, 2))
PDE_PARAMS = (0.3, 0.5, 0.7, 0.3, 0.45, 0.6, 0.75)


def rf(a, n):
    return mpmath.rf(mpmath.mpf(a) if not isinstance(a, Fraction) else mpmath.mpf(a.numerator) / a.denominator, n)


def brute_k2(params, point, degree):
    """K2 partial sum over m+n+p+q <= degree by four nested loops."""
    a, b, c, e1, e2, e3, e4 = params
    x, y, z, t = (mpmath.mpf(v) for v in point)
    total = mpmath.mpf(0)
    for m in range(degree + 1):
        for n in range(degree + 1 - m):
            for p in range(degree + 1 - m - n):
                for q in range(degree + 1 - m - n - p):
                    num = rf(a, m + n + p + q) * rf(b, m + n + q) * rf(c, p)
                    if num == 0:
                        continue
                    den = rf(e1, m) * rf(e2, n) * rf(e3, p) * rf(e4, q)
                    total += (num / den * x**m * y**n * z**p * t**q
                              / (mpmath.factorial(m) * mpmath.factorial(n)
                                 * mpmath.factorial(p) * mpmath.factorial(q)))
    return total


def brute_fc4(alpha, beta, cs, point, degree):
    total = mpmath.mpf(0)
    for idx in itertools.product(range(degree + 1), repeat=4):
        k = sum(idx)
        if k > degree:
            continue
        term = rf(alpha, k) * rf(beta, k)
        for ci, i, v in zip(cs, idx, point):
            term *= mpmath.mpf(v) ** i / (rf(ci, i) * mpmath.factorial(i))
        total += term
    return total


def fd_first(f, h):
    """4th-order central first derivative of a scalar function at 0 offset."""
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)


def fd_second(f, h):
    return (-f(2 * h) + 16 * f(h) - 30 * f(0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h)


def fd_partial(func, point, orders, h=1e-3):
    """Finite-difference mixed partial of ``func(point)`` for orders with sum <= 2."""
    point = list(point)
    slots = [i for i, o in enumerate(orders) for _ in range(o)]

    def shifted(deltas):
        p = list(point)
        for i, d in deltas:
            p[i] += d
        return func(tuple(p))

    if not slots:
        return func(tuple(point))
    if len(slots) == 1:
        i = slots[0]
        return fd_first(lambda d: shifted([(i, d)]), h)
    i, j = slots
    if i == j:
        return fd_second(lambda d: shifted([(i, d)]), h)
    return fd_first(lambda d: fd_first(lambda e: shifted([(i, d), (j, e)]), h), h)


@pytest.fixture
def ci_params():
    return CI_PARAMS
