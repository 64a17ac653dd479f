"""
Verification harness for finite sums and decomposition formulas of K2.

Each ``verify_*`` function evaluates the left-hand side once and the
right-hand side in several *variants*: the form as stated plus
candidate corrections (missing powers, shifted denominators, factorials).
Every variant gets its own ``IdentityReport``; nothing is silently repaired.

Finite sums (``3.10``, ``3.11``) terminate and are computed exactly in
rational arithmetic from the binary values of the inputs.  The infinite
decompositions (``3.12``, ``3.13``) use the truncated float evaluators and
re-run at degree ``D + 4`` to check truncation stability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InconclusiveError
from .series import (
    DEFAULT_POLICY,
    K2Params,
    Point4,
    TruncationPolicy,
    k2_eval,
    k2_terminating_sum,
    lauricella_fc4,
    pochhammer,
    f3_shape_exact,
    simplex_indices,
)

__all__ = [
    "IdentityReport",
    "DuplicationIndexMap",
    "EXACT_TOL",
    "TRUNCATED_TOL",
    "ABS_FLOOR",
    "verify_3_10",
    "verify_3_11",
    "verify_3_12",
    "verify_3_13",
    "matching_variants",
]

EXACT_TOL = 1e-12
TRUNCATED_TOL = 1e-8
ABS_FLOOR = 1e-14

TEN_INDEX_NAMES = ("m", "n", "p", "q", "s", "r", "k", "l", "h", "t")


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    variant: str
    lhs: float
    rhs: float
    abs_diff: float
    rel_diff: float
    truncation: TruncationPolicy
    status: str
    notes: tuple = ()
    tail_estimate: float = 0.0
    stability_delta: float = 0.0


def _status(abs_diff: float, rel_diff: float, tol: float) -> str:
    return "match" if rel_diff <= tol or abs_diff <= ABS_FLOOR else "mismatch"


def _rel(abs_diff, lhs, rhs):
    scale = max(abs(lhs), abs(rhs))
    return abs_diff / scale if scale else abs_diff


def _exact_report(identity_id, variant, lhs: Fraction, rhs: Fraction, policy, notes=()):
    diff = abs(lhs - rhs)
    abs_diff = float(diff)
    rel_diff = float(_rel(diff, lhs, rhs))
    return IdentityReport(identity_id, variant, float(lhs), float(rhs), abs_diff, rel_diff,
                          policy, _status(abs_diff, rel_diff, EXACT_TOL), tuple(notes))


def matching_variants(reports: Sequence[IdentityReport]) -> list:
    return [r.variant for r in reports if r.status == "match"]


# ---------------------------------------------------------------------------
# finite sums
# ---------------------------------------------------------------------------


def _fr(*values):
    return [Fraction(v) for v in values]


def _binomial_sum(n: int, term) -> Fraction:
    return sum((Fraction((-1) ** r * math.comb(n, r)) * term(r) for r in range(n + 1)),
               Fraction(0))


def verify_3_10(n: int, b, c, e1, e2, e3, e4, point: Point4,
                policy: TruncationPolicy = DEFAULT_POLICY) -> list:
    """Finite sum over ``K2[-r; b, b, c, b; e]`` against a terminating triple series.

    Left side: ``sum_r (-1)^r C(n, r) K2(-r, b, c; e1..e4; x, y, z, u)``.

    Variants of the right side, all with ``f = F3(n, e1, c, e2, e3, e4; y/x, z/x, u/x)``:

    * ``printed``: ``(b)_n / (e1)_n * f``
    * ``x^n``: the same times ``x^n``
    * ``x^n, b-coupled z-slot``: ``x^n (b)_n/(e1)_n`` times the triple series
      with an extra ``(1-b-n)_k`` in the z denominator and ``-z/x`` as the z
      argument, which is ``(b)_{n-k}`` written with ``(b)_n`` pulled out.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    x, y, z, u = point
    if x == 0:
        raise ValueError("x must be nonzero")
    bq, cq, e1q, e2q, e3q, e4q = _fr(b, c, e1, e2, e3, e4)
    xq, yq, zq, uq = _fr(x, y, z, u)

    lhs = _binomial_sum(
        n, lambda r: k2_terminating_sum(K2Params(-r, bq, cq, e1q, e2q, e3q, e4q), point)
    )
    lead = pochhammer(bq, n) / pochhammer(e1q, n)
    ratios = (yq / xq, zq / xq, uq / xq)
    f3 = f3_shape_exact(n, e1q, cq, e2q, e3q, e4q, *ratios)
    coupled = f3_shape_exact(n, e1q, cq, e2q, e3q, e4q, ratios[0], -ratios[1], ratios[2],
                             z_denominator=1 - bq - n)
    variants = [
        ("printed", lead * f3, ()),
        ("x^n", xq ** n * lead * f3, ("candidate power x^n",)),
        ("x^n, b-coupled z-slot", xq ** n * lead * coupled,
         ("(b)_n replaced by (b)_{n-k} on z-terms",)),
    ]
    return [_exact_report("3.10", name, lhs, rhs, policy, notes) for name, rhs, notes in variants]


def _appell_f4_terminating(n: int, beta, gamma, delta, x, y) -> Fraction:
    total = Fraction(0)
    for s in range(n + 1):
        lead = pochhammer(Fraction(-n), s) * pochhammer(beta, s)
        for j in range(s + 1):
            k = s - j
            total += (lead * x ** j * y ** k
                      / (pochhammer(gamma, j) * pochhammer(delta, k)
                         * math.factorial(j) * math.factorial(k)))
    return total


def verify_3_11(n: int, m: int, a, e1, e2, e3, e4, point: Point4,
                policy: TruncationPolicy = DEFAULT_POLICY) -> list:
    """Double finite sum over ``K2[a; -r, -r, -s, -r; e]`` against Appell ``F4``.

    Left side: ``sum_{r,s} (-1)^(r+s) C(n, r) C(m, s) K2(a, -r, -s; e; x, y, z, u)``.
    Right side ``(a)_{m+n} / ((e1)_n (e3)_m) F4(-n, 1-e1-n; e2, e4; y/x, u/x)``
    in the variants ``printed``, ``x^n``, ``z^m`` and ``x^n z^m``.
    """
    if n < 0 or m < 0:
        raise ValueError("n and m must be >= 0")
    x, y, z, u = point
    if x == 0:
        raise ValueError("x must be nonzero")
    aq, e1q, e2q, e3q, e4q = _fr(a, e1, e2, e3, e4)
    xq, yq, zq, uq = _fr(x, y, z, u)

    lhs = Fraction(0)
    for r in range(n + 1):
        for s in range(m + 1):
            sign = Fraction((-1) ** (r + s) * math.comb(n, r) * math.comb(m, s))
            lhs += sign * k2_terminating_sum(K2Params(aq, -r, -s, e1q, e2q, e3q, e4q), point)
    base = (pochhammer(aq, m + n) / (pochhammer(e1q, n) * pochhammer(e3q, m))
            * _appell_f4_terminating(n, 1 - e1q - n, e2q, e4q, yq / xq, uq / xq))
    variants = [
        ("printed", base, ()),
        ("x^n", xq ** n * base, ("candidate power x^n",)),
        ("z^m", zq ** m * base, ("candidate power z^m",)),
        ("x^n z^m", xq ** n * zq ** m * base, ("candidate powers x^n z^m",)),
    ]
    return [_exact_report("3.11", name, lhs, rhs, policy, notes) for name, rhs, notes in variants]


# ---------------------------------------------------------------------------
# truncated decompositions
# ---------------------------------------------------------------------------


@dataclass
class _Accumulator:
    """Running value and declared tail of an outer sum of truncated series."""

    terms: list = field(default_factory=list)
    tail: float = 0.0

    def add(self, weight: float, series):
        self.terms.append(weight * series.value)
        self.tail += abs(weight) * series.tail_estimate

    @property
    def value(self) -> float:
        return math.fsum(self.terms)


def _truncated_reports(identity_id, lhs_fn, variant_fns, policy, notes_by_variant):
    """Evaluate at ``D`` and ``D + 4`` and build one report per variant."""
    wider = policy.with_degree(policy.max_total_degree + 4)
    lhs, lhs_tail = lhs_fn(policy)
    lhs_wide, _ = lhs_fn(wider)
    reports = []
    for name, fn in variant_fns:
        rhs, rhs_tail = fn(policy)
        rhs_wide, _ = fn(wider)
        delta = max(abs(rhs_wide - rhs), abs(lhs_wide - lhs))
        tail = lhs_tail + rhs_tail
        abs_diff = abs(lhs - rhs)
        rel_diff = _rel(abs_diff, lhs, rhs)
        stable = delta <= tail + 4 * math.ulp(max(abs(lhs), abs(rhs), 1e-300))
        status = _status(abs_diff, rel_diff, TRUNCATED_TOL) if stable else "inconclusive"
        notes = list(notes_by_variant.get(name, ()))
        notes.append(f"D={policy.max_total_degree} vs D={wider.max_total_degree}: "
                     f"delta {delta:.3e}, declared tail {tail:.3e}"
                     + ("" if stable else " (unstable)"))
        reports.append(IdentityReport(identity_id, name, lhs, rhs, abs_diff, rel_diff, policy,
                                      status, tuple(notes), tail, delta))
    if reports and all(r.status == "inconclusive" for r in reports):
        raise InconclusiveError(f"no variant of {identity_id} converged stably", reports)
    return reports


def verify_3_12(a, b, e1, e2, e3, e4, point: Point4,
                policy: TruncationPolicy = TruncationPolicy(16),
                outer_bound: int = 6) -> list:
    """Decomposition of ``K2(a, b, b; e)`` into Lauricella ``F_C`` series.

    The outer sum runs over ``s + k + r <= outer_bound`` of

        (a)_{2K} (b)_K / ((e1)_s (e2)_k (e3)_K (e4)_r) (-xz)^s (-yz)^k (-uz)^r
            * FC4(a + 2K, b + K; d1, d2, d3, d4; x, y, z, u),   K = s+k+r

    Variants: ``printed`` (``d = e``), ``shifted`` (``d = (e1+s, e2+k,
    e3+K, e4+r)``) and ``shifted, 1/(s!k!r!)`` which also divides each outer
    term by ``s! k! r!``.
    """
    x, y, z, u = (float(v) for v in point)
    e = (e1, e2, e3, e4)
    outer, _ = simplex_indices(3, outer_bound)

    def lhs_fn(pol):
        v = k2_eval(K2Params(a, b, b, *e), point, pol)
        return v.value, v.tail_estimate

    def make(shifted: bool, factorials: bool):
        def fn(pol):
            acc = _Accumulator()
            for s, k, r in outer.tolist():
                big = s + k + r
                num = pochhammer(a, 2 * big) * pochhammer(b, big)
                if num == 0:
                    continue
                weight = (num / (pochhammer(e1, s) * pochhammer(e2, k)
                                 * pochhammer(e3, big) * pochhammer(e4, r))
                          * (-x * z) ** s * (-y * z) ** k * (-u * z) ** r)
                if factorials:
                    weight /= math.factorial(s) * math.factorial(k) * math.factorial(r)
                if weight == 0:
                    continue
                dens = (e1 + s, e2 + k, e3 + big, e4 + r) if shifted else e
                acc.add(weight, lauricella_fc4(a + 2 * big, b + big, *dens, point, pol))
            return acc.value, acc.tail
        return fn

    variants = [
        ("printed", make(False, False)),
        ("shifted", make(True, False)),
        ("shifted, 1/(s!k!r!)", make(True, True)),
    ]
    notes = {"printed": ("missing '=' read as: left side K2(a,b,b;e) equals the outer sum",)}
    return _truncated_reports("3.12", lhs_fn, variants, policy, notes)


@dataclass(frozen=True)
class DuplicationIndexMap:
    M: int
    N: int
    P: int
    Q1: int
    Q2: int
    Q3: int
    Q4: int

    @classmethod
    def from_indices(cls, m, n, p, q, s, r, k, l, h, t) -> "DuplicationIndexMap":
        """Index sums for the ten-fold sum; ``s, k, r, l, h, t`` count the
        ``xy, xz, xu, yz, yu, zu`` cross terms."""
        return cls(
            M=m + n + p + q + s + k + r + l + h + t,
            N=2 * (m + n + q + s + r + h) + k + l + t,
            P=2 * p + k + l + t,
            Q1=2 * m + s + k + r,
            Q2=2 * n + s + l + h,
            Q3=2 * p + k + l + t,
            Q4=2 * q + r + h + t,
        )


def verify_3_13(a, b, c, e1, e2, e3, e4, point: Point4,
                policy: TruncationPolicy = TruncationPolicy(16),
                total_bound: int = 4) -> list:
    """Duplication formula for ``K2(2a, b, c; e)``.

    Ten-fold outer sum over ``(m, n, p, q, s, r, k, l, h, t)`` with
    ``M <= total_bound`` of

        (a)_M (b)_N (c)_P / prod (e_i)_{Q_i}
            * x^2m y^2n z^2p u^2q (2xy)^s (2xz)^k (2xu)^r (2yz)^l (2yu)^h (2zu)^t
            * K2(a+M, b+N, c'; e1+Q1, e2+Q2, e3+Q3, e4+Q4; x, y, z, u)

    Variants: ``printed, c+N`` and ``printed, c+P`` (``c'`` as named), and
    ``signed, 1/ten!, 2x args, c+P`` which weights each term by
    ``(-1)^M / (m! n! ... t!)`` and evaluates the inner K2 at ``2x, 2y, 2z, 2u``.
    """
    x, y, z, u = (float(v) for v in point)
    e = (e1, e2, e3, e4)
    outer, _ = simplex_indices(10, total_bound)
    doubled = Point4(2 * x, 2 * y, 2 * z, 2 * u)
    monomial_bases = (x * x, y * y, z * z, u * u, 2 * x * y, 2 * x * u,
                      2 * x * z, 2 * y * z, 2 * y * u, 2 * z * u)

    def lhs_fn(pol):
        v = k2_eval(K2Params(2 * a, b, c, *e), point, pol)
        return v.value, v.tail_estimate

    def make(c_shift: str, derived: bool):
        def fn(pol):
            acc = _Accumulator()
            for row in outer.tolist():
                idx = DuplicationIndexMap.from_indices(*row)
                num = pochhammer(a, idx.M) * pochhammer(b, idx.N) * pochhammer(c, idx.P)
                if num == 0:
                    continue
                weight = num / (pochhammer(e1, idx.Q1) * pochhammer(e2, idx.Q2)
                                * pochhammer(e3, idx.Q3) * pochhammer(e4, idx.Q4))
                for base, power in zip(monomial_bases, row):
                    weight *= base ** power
                if derived:
                    weight *= (-1) ** idx.M / math.prod(math.factorial(v) for v in row)
                if weight == 0:
                    continue
                inner_c = c + (idx.N if c_shift == "N" else idx.P)
                inner = K2Params(a + idx.M, b + idx.N, inner_c,
                                 e1 + idx.Q1, e2 + idx.Q2, e3 + idx.Q3, e4 + idx.Q4)
                acc.add(weight, k2_eval(inner, doubled if derived else point, pol))
            return acc.value, acc.tail
        return fn

    variants = [
        ("printed, c+N", make("N", False)),
        ("printed, c+P", make("P", False)),
        ("signed, 1/ten!, 2x args, c+P", make("P", True)),
    ]
    return _truncated_reports("3.13", lhs_fn, variants, policy, {})
