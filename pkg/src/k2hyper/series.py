"""
Truncated multiple power series for Exton's K2 and its relatives.

Every evaluator here sums a hypergeometric-type series shell by shell, where
shell ``s`` holds all terms whose indices add up to ``s``.  Within a shell the
indices are visited in lexicographic order, each shell is summed with
``math.fsum`` and the final value is the exactly rounded sum of every term
that was kept, so results are reproducible bit for bit.

The quadruple series have the general form::

    F(x, y, z, t) = sum  Delta(m, n, p, q) x^m/m! y^n/n! z^p/p! t^q/q!

and K2 uses::

    Delta(m, n, p, q) = (a)_{m+n+p+q} (b)_{m+n+q} (c)_p
                        / ((e1)_m (e2)_n (e3)_p (e4)_q)

Pochhammer symbols are always running products, so a nonpositive integer
numerator parameter produces exact zeros and the series terminates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import DivergenceWarning, PoleError

__all__ = [
    "K2Params",
    "Point4",
    "MultiIndex4",
    "TruncationPolicy",
    "SeriesValue",
    "CoefficientRule",
    "CallableRule",
    "K2Rule",
    "LauricellaFC4Rule",
    "pochhammer",
    "pochhammer_table",
    "simplex_indices",
    "k2_coefficient",
    "quad_series_eval",
    "k2_eval",
    "k2_mixed_partial",
    "k2_terminating_sum",
    "gauss_2f1",
    "appell_f4",
    "srivastava_f3_shape",
    "f3_shape_exact",
    "lauricella_fc4",
]


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(float(v)):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class K2Params:
    """Parameters ``a, b, c; e1, e2, e3, e4`` of K2.

    Fields may be floats or ``Fraction`` instances; the exact routines keep
    fractions exact.
    """

    a: float
    b: float
    c: float
    e1: float
    e2: float
    e3: float
    e4: float

    def __post_init__(self):
        _check_finite(**self.as_dict())

    @classmethod
    def from_sequence(cls, values: Sequence) -> "K2Params":
        if len(values) != 7:
            raise ValueError(f"expected 7 parameters, got {len(values)}")
        return cls(*values)

    @property
    def e(self) -> tuple:
        return (self.e1, self.e2, self.e3, self.e4)

    def as_tuple(self) -> tuple:
        return (self.a, self.b, self.c, self.e1, self.e2, self.e3, self.e4)

    def as_dict(self) -> dict:
        return dict(zip(("a", "b", "c", "e1", "e2", "e3", "e4"), self.as_tuple()))

    def replace(self, **changes) -> "K2Params":
        return replace(self, **changes)


@dataclass(frozen=True)
class Point4:
    """Evaluation point ``(x, y, z, t)``."""

    x: float
    y: float
    z: float
    t: float

    def __post_init__(self):
        _check_finite(x=self.x, y=self.y, z=self.z, t=self.t)

    def __iter__(self) -> Iterator:
        return iter((self.x, self.y, self.z, self.t))

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.z, self.t)

    @property
    def l1_norm(self) -> float:
        return sum(abs(float(v)) for v in self)


ORIGIN = Point4(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class MultiIndex4:
    """Summation index or derivative order ``(m, n, p, q)``."""

    m: int = 0
    n: int = 0
    p: int = 0
    q: int = 0

    def __post_init__(self):
        for v in self:
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"multi-index entries must be nonnegative integers, got {v!r}")

    def __iter__(self) -> Iterator[int]:
        return iter((self.m, self.n, self.p, self.q))

    def as_tuple(self) -> tuple:
        return (self.m, self.n, self.p, self.q)

    @property
    def total(self) -> int:
        return self.m + self.n + self.p + self.q


def _as_index(idx) -> MultiIndex4:
    return idx if isinstance(idx, MultiIndex4) else MultiIndex4(*(int(v) for v in idx))


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to sum and when to stop.

    ``domain_radius`` bounds ``|x|+|y|+|z|+|t|`` for the multivariable
    evaluators; points outside only trigger a ``DivergenceWarning``.
    """

    max_total_degree: int = 30
    abs_tol: float = 1e-18
    rel_tol: float = 1e-17
    domain_radius: float = 0.5

    def __post_init__(self):
        if self.max_total_degree < 0:
            raise ValueError("max_total_degree must be >= 0")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")

    def with_degree(self, degree: int) -> "TruncationPolicy":
        return replace(self, max_total_degree=degree)


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail_estimate: float
    terms_summed: int
    truncated_at_degree: int
    diverging: bool = False
    outside_domain: bool = False

    def __float__(self) -> float:
        return float(self.value)

    def scaled(self, factor: float) -> "SeriesValue":
        return replace(
            self, value=self.value * factor, tail_estimate=self.tail_estimate * abs(factor)
        )


# ---------------------------------------------------------------------------
# Pochhammer symbols
# ---------------------------------------------------------------------------


def pochhammer(a, n: int):
    """Rising factorial ``a (a+1) ... (a+n-1)``, with ``(a)_0 = 1``.

    Works for ints, floats and Fractions; the result keeps the input type.
    """
    if n < 0:
        raise ValueError(f"pochhammer order must be >= 0, got {n}")
    result = a * 0 + 1  # unit of the same numeric type as a
    for i in range(n):
        result *= a + i
    return result


def pochhammer_table(a: float, n: int) -> np.ndarray:
    """Array ``[(a)_0, (a)_1, ..., (a)_n]`` as doubles (running product)."""
    out = np.ones(n + 1)
    if n:
        out[1:] = np.cumprod(float(a) + np.arange(n, dtype=float))
    return out


def _falling(alpha, r: int):
    result = alpha * 0 + 1
    for i in range(r):
        result *= alpha - i
    return result


@lru_cache(maxsize=None)
def _factorial_table(n: int) -> np.ndarray:
    return np.array([float(math.factorial(k)) for k in range(n + 1)])


# ---------------------------------------------------------------------------
# index enumeration
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=64)
def simplex_indices(nvars: int, degree: int) -> tuple:
    """All index tuples with ``sum <= degree``, shell-major then lexicographic.

    Returns ``(indices, offsets)``: an ``(count, nvars)`` int array and the
    start offset of every shell (length ``degree + 2``).
    """
    rows = []
    offsets = [0]
    for s in range(degree + 1):
        rows.extend(_compositions(s, nvars))
        offsets.append(len(rows))
    indices = np.array(rows, dtype=np.int64).reshape(-1, nvars)
    indices.setflags(write=False)
    return indices, tuple(offsets)


# ---------------------------------------------------------------------------
# coefficient rules
# ---------------------------------------------------------------------------


class CoefficientRule:
    """Bare coefficient ``Delta(m, n, p, q)``; factorials and powers are
    applied by the evaluator.

    Subclasses implement ``__call__`` for a single index and may override
    ``coefficients`` with a vectorised version.
    """

    def __call__(self, idx) -> float:
        raise NotImplementedError

    def coefficients(self, indices: np.ndarray) -> np.ndarray:
        return np.array([float(self(tuple(row))) for row in indices], dtype=float)


class CallableRule(CoefficientRule):
    """Wrap a plain function ``f(m, n, p, q) -> Delta``."""

    def __init__(self, func: Callable[..., float]):
        self.func = func

    def __call__(self, idx) -> float:
        return self.func(*tuple(idx))


def _pole_checked_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    zero_den = den == 0
    if np.any(zero_den & (num != 0)):
        raise PoleError("denominator Pochhammer vanishes at a term with nonzero numerator")
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=~zero_den)
    return out


class K2Rule(CoefficientRule):
    def __init__(self, params: K2Params):
        self.params = params

    def __call__(self, idx) -> float:
        return k2_coefficient(self.params, idx)

    def coefficients(self, indices: np.ndarray) -> np.ndarray:
        p = self.params
        m, n, pp, q = indices.T
        top = int(indices.sum(axis=1).max()) if len(indices) else 0
        big_a = pochhammer_table(p.a, top)
        big_b = pochhammer_table(p.b, top)
        small_c = pochhammer_table(p.c, top)
        num = big_a[m + n + pp + q] * big_b[m + n + q] * small_c[pp]
        den = (
            pochhammer_table(p.e1, top)[m]
            * pochhammer_table(p.e2, top)[n]
            * pochhammer_table(p.e3, top)[pp]
            * pochhammer_table(p.e4, top)[q]
        )
        return _pole_checked_ratio(num, den)


class LauricellaFC4Rule(CoefficientRule):
    """``(alpha)_M (beta)_M / ((c1)_m (c2)_n (c3)_p (c4)_q)`` with ``M = m+n+p+q``."""

    def __init__(self, alpha, beta, c1, c2, c3, c4):
        self.alpha, self.beta = alpha, beta
        self.denominators = (c1, c2, c3, c4)

    def __call__(self, idx) -> float:
        idx = tuple(idx)
        total = sum(idx)
        num = pochhammer(self.alpha, total) * pochhammer(self.beta, total)
        den = 1
        for cj, k in zip(self.denominators, idx):
            den *= pochhammer(cj, k)
        return _scalar_ratio(num, den)

    def coefficients(self, indices: np.ndarray) -> np.ndarray:
        top = int(indices.sum(axis=1).max()) if len(indices) else 0
        total = indices.sum(axis=1)
        num = pochhammer_table(self.alpha, top)[total] * pochhammer_table(self.beta, top)[total]
        den = np.ones(len(indices))
        for j, cj in enumerate(self.denominators):
            den = den * pochhammer_table(cj, top)[indices[:, j]]
        return _pole_checked_ratio(num, den)


def _scalar_ratio(num, den):
    if den == 0:
        if num == 0:
            return num * 0
        raise PoleError("denominator Pochhammer vanishes at a term with nonzero numerator")
    return num / den


def k2_coefficient(params: K2Params, idx):
    """Bare K2 coefficient at ``idx = (m, n, p, q)`` (no factorials, no powers).

    Exact when the parameters are Fractions.  A vanishing denominator gives
    0 if the numerator also vanishes and raises ``PoleError`` otherwise.
    """
    m, n, p, q = _as_index(idx)
    num = (
        pochhammer(params.a, m + n + p + q)
        * pochhammer(params.b, m + n + q)
        * pochhammer(params.c, p)
    )
    den = (
        pochhammer(params.e1, m)
        * pochhammer(params.e2, n)
        * pochhammer(params.e3, p)
        * pochhammer(params.e4, q)
    )
    return _scalar_ratio(num, den)


# ---------------------------------------------------------------------------
# shell summation
# ---------------------------------------------------------------------------


def _scaled_powers(v: float, degree: int) -> np.ndarray:
    """``[v^k / k!]`` for ``k = 0..degree`` as a running product."""
    out = np.ones(degree + 1)
    for k in range(1, degree + 1):
        out[k] = out[k - 1] * v / k
    return out


def _accumulate(terms: np.ndarray, offsets: Sequence[int], policy: TruncationPolicy,
                outside_domain: bool = False) -> SeriesValue:
    # a shell's size is the sum of |terms|, which cancellation cannot hide
    sizes, sums = [], []
    quiet = 0
    last = -1
    for s in range(len(offsets) - 1):
        chunk = terms[offsets[s]:offsets[s + 1]]
        size = math.fsum(np.abs(chunk))
        sizes.append(size)
        sums.append(math.fsum(chunk))
        last = s
        partial = math.fsum(sums)
        if size < max(policy.abs_tol, policy.rel_tol * abs(partial)):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    kept = offsets[last + 1]
    value = math.fsum(terms[:kept])
    mags = sizes[-3:]
    diverging = len(mags) == 3 and mags[2] > 0 and mags[0] <= mags[1] <= mags[2]
    if diverging:
        warnings.warn("series shells are not decreasing; truncated value is unreliable",
                      DivergenceWarning, stacklevel=3)
    return SeriesValue(
        value=value,
        tail_estimate=sizes[-1] if sizes else 0.0,
        terms_summed=kept,
        truncated_at_degree=max(last, 0),
        diverging=diverging,
        outside_domain=outside_domain,
    )


def _multi_series(rule: CoefficientRule, variables: Sequence[float],
                  policy: TruncationPolicy, outside_domain: bool) -> SeriesValue:
    degree = policy.max_total_degree
    indices, offsets = simplex_indices(len(variables), degree)
    coeffs = rule.coefficients(indices)
    terms = coeffs.copy()
    for j, v in enumerate(variables):
        terms *= _scaled_powers(float(v), degree)[indices[:, j]]
    return _accumulate(terms, offsets, policy, outside_domain)


def _check_domain(norm: float, radius: float) -> bool:
    outside = norm > radius
    if outside:
        warnings.warn(
            f"point with |x|+|y|+|z|+|t| = {norm:g} lies outside the evaluation domain "
            f"(radius {radius:g})",
            DivergenceWarning,
            stacklevel=3,
        )
    return outside


def quad_series_eval(rule: CoefficientRule, point: Point4,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Sum a quadruple series with bare coefficients from ``rule``."""
    outside = _check_domain(point.l1_norm, policy.domain_radius)
    return _multi_series(rule, point.as_tuple(), policy, outside)


def k2_eval(params: K2Params, point: Point4,
            policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    return quad_series_eval(K2Rule(params), point, policy)


def k2_mixed_partial(params: K2Params, point: Point4, orders,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Mixed partial derivative of K2 of the given orders.

    Differentiating the series term by term shifts every index, which is the
    same as evaluating K2 with shifted parameters times a Pochhammer
    prefactor.
    """
    i, j, k, l = _as_index(orders)
    p = params
    num = pochhammer(p.a, i + j + k + l) * pochhammer(p.b, i + j + l) * pochhammer(p.c, k)
    den = pochhammer(p.e1, i) * pochhammer(p.e2, j) * pochhammer(p.e3, k) * pochhammer(p.e4, l)
    prefactor = _scalar_ratio(num, den)
    shifted = K2Params(
        p.a + i + j + k + l, p.b + i + j + l, p.c + k,
        p.e1 + i, p.e2 + j, p.e3 + k, p.e4 + l,
    )
    return k2_eval(shifted, point, policy).scaled(float(prefactor))


def k2_terminating_sum(params: K2Params, point) -> Fraction:
    """Exact value of a terminating K2 series.

    Parameters and coordinates are converted to ``Fraction`` (floats convert
    exactly).  The series must terminate through ``a`` (total degree bound)
    or through both ``b`` and ``c``.
    """
    a, b, c, e1, e2, e3, e4 = (Fraction(v) for v in params.as_tuple())
    exact = K2Params(a, b, c, e1, e2, e3, e4)
    xs = [Fraction(v) for v in point]

    def cap(v):
        return int(-v) if v.denominator == 1 and v <= 0 else None

    a_cap, b_cap, c_cap = cap(a), cap(b), cap(c)
    if a_cap is not None:
        candidates = (idx for s in range(a_cap + 1) for idx in _compositions(s, 4))
    elif b_cap is not None and c_cap is not None:
        candidates = (
            (m, n, pp, s - m - n)
            for s in range(b_cap + 1)
            for m in range(s + 1)
            for n in range(s - m + 1)
            for pp in range(c_cap + 1)
        )
    else:
        raise ValueError("K2 series does not terminate for these parameters")

    total = Fraction(0)
    for idx in candidates:
        coeff = k2_coefficient(exact, idx)
        if coeff == 0:
            continue
        term = Fraction(coeff)
        for v, k in zip(xs, idx):
            term *= v ** k / math.factorial(k)
        total += term
    return total


# ---------------------------------------------------------------------------
# auxiliary families
# ---------------------------------------------------------------------------


def gauss_2f1(alpha, beta, gamma, x, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Gauss series ``sum (alpha)_n (beta)_n / ((gamma)_n n!) x^n``."""
    outside = _check_domain(abs(float(x)), 1.0) if abs(float(x)) >= 1 else False

    class _Rule(CoefficientRule):
        def coefficients(self, indices):
            top = policy.max_total_degree
            k = indices[:, 0]
            num = pochhammer_table(alpha, top)[k] * pochhammer_table(beta, top)[k]
            return _pole_checked_ratio(num, pochhammer_table(gamma, top)[k])

    return _multi_series(_Rule(), (x,), policy, outside)


def appell_f4(alpha, beta, gamma, delta, x, y,
              policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Appell ``F4``: ``sum (alpha)_{j+k} (beta)_{j+k} / ((gamma)_j (delta)_k)
    x^j y^k / (j! k!)``."""
    outside = _check_domain(abs(float(x)) + abs(float(y)), policy.domain_radius)

    class _Rule(CoefficientRule):
        def coefficients(self, indices):
            top = policy.max_total_degree
            j, k = indices.T
            num = pochhammer_table(alpha, top)[j + k] * pochhammer_table(beta, top)[j + k]
            den = pochhammer_table(gamma, top)[j] * pochhammer_table(delta, top)[k]
            return _pole_checked_ratio(num, den)

    return _multi_series(_Rule(), (x, y), policy, outside)


def f3_shape_exact(n: int, e1, c, e2, e3, e4, u1, u2, u3, z_denominator=None) -> Fraction:
    """Exact terminating triple series behind ``srivastava_f3_shape``.

    ``z_denominator`` optionally adds ``(z_denominator)_k`` to the
    denominator of the middle (``u2``) slot.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    e1, c, e2, e3, e4 = (Fraction(v) for v in (e1, c, e2, e3, e4))
    u1, u2, u3 = (Fraction(v) for v in (u1, u2, u3))
    extra = None if z_denominator is None else Fraction(z_denominator)
    total = Fraction(0)
    for s in range(n + 1):
        lead = pochhammer(Fraction(-n), s) * pochhammer(1 - e1 - n, s)
        if lead == 0:
            continue
        for j, k, l in _compositions(s, 3):
            num = lead * pochhammer(c, k)
            den = pochhammer(e2, j) * pochhammer(e3, k) * pochhammer(e4, l)
            if extra is not None:
                den *= pochhammer(extra, k)
            coeff = _scalar_ratio(num, den)
            if coeff == 0:
                continue
            total += (coeff * u1 ** j * u2 ** k * u3 ** l
                      / (math.factorial(j) * math.factorial(k) * math.factorial(l)))
    return total


def srivastava_f3_shape(n: int, e1, c, e2, e3, e4, u1, u2, u3,
                        policy: TruncationPolicy | None = None) -> SeriesValue:
    """Terminating triple series

        sum_{j+k+l <= n} (-n)_{j+k+l} (1-e1-n)_{j+k+l} (c)_k
                         / ((e2)_j (e3)_k (e4)_l) u1^j u2^k u3^l / (j! k! l!)

    summed exactly in rational arithmetic and rounded once.  ``policy`` is
    accepted for symmetry with the other evaluators and ignored.
    """
    total = f3_shape_exact(n, e1, c, e2, e3, e4, u1, u2, u3)
    return SeriesValue(value=float(total), tail_estimate=0.0,
                       terms_summed=math.comb(n + 3, 3), truncated_at_degree=n)


def lauricella_fc4(alpha, beta, c1, c2, c3, c4, point: Point4,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    return quad_series_eval(LauricellaFC4Rule(alpha, beta, c1, c2, c3, c4), point, policy)
