"""
The partial differential system satisfied by K2 and its 16 local solutions.

Substituting ``u = x^alpha y^beta z^gamma t^delta w`` into the system turns
it into the same system for ``w`` with transformed parameters, provided every
exponent solves its indicial equation ``s (s - 1 + e_i) = 0``.  Each choice
of roots therefore gives a solution

    u_j = x^alpha y^beta z^gamma t^delta K2(A, B, C; E1, E2, E3, E4; x, y, z, t)

with ``A = alpha+beta+gamma+delta+a``, ``B = alpha+beta+delta+b``,
``C = gamma+c`` and ``E_i = 2 s_i + e_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError
from .series import (
    DEFAULT_POLICY,
    K2Params,
    Point4,
    TruncationPolicy,
    _falling,
    k2_coefficient,
    k2_eval,
    k2_mixed_partial,
    simplex_indices,
)

__all__ = [
    "ExponentQuadruple",
    "TransformedParams",
    "SolutionSpec",
    "GlobalSolutionCoeffs",
    "SlotRoots",
    "IndependenceDiagnostic",
    "EXPONENT_PATTERN",
    "SECOND_ORDER_PATTERNS",
    "indicial_roots",
    "exponent_table",
    "transformed_params",
    "solution_spec",
    "solution_value",
    "solution_partial",
    "k2_function",
    "solution_function",
    "constant_function",
    "combination_function",
    "pde_residual_2nd",
    "coefficient_recurrence_check",
    "global_solution",
    "independence_check",
    "sample_points",
]

# Which slots carry the nonzero root 1 - e_i, in the conventional order of
# the sixteen solutions.
EXPONENT_PATTERN = (
    (0, 0, 0, 0),
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (1, 1, 0, 0),
    (1, 0, 1, 0),
    (1, 0, 0, 1),
    (0, 1, 1, 0),
    (0, 1, 0, 1),
    (0, 0, 1, 1),
    (1, 1, 1, 0),
    (1, 1, 0, 1),
    (1, 0, 1, 1),
    (0, 1, 1, 1),
    (1, 1, 1, 1),
)

FIRST_ORDER_PATTERNS = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
SECOND_ORDER_PATTERNS = tuple(
    tuple(sum(1 for k in pair if k == slot) for slot in range(4))
    for pair in itertools.combinations_with_replacement(range(4), 2)
)


class SlotRoots(NamedTuple):
    zero: float
    other: float
    degenerate: bool


@dataclass(frozen=True)
class ExponentQuadruple:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def as_tuple(self) -> tuple:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def indicial_values(self, params: K2Params) -> tuple:
        """``s (s - 1 + e_i)`` for each slot; all zero for a valid quadruple."""
        return tuple(s * (s - 1 + e) for s, e in zip(self.as_tuple(), params.e))


@dataclass(frozen=True)
class TransformedParams:
    A: float
    B: float
    C: float
    E1: float
    E2: float
    E3: float
    E4: float

    def as_k2_params(self) -> K2Params:
        return K2Params(self.A, self.B, self.C, self.E1, self.E2, self.E3, self.E4)


@dataclass(frozen=True)
class SolutionSpec:
    index: int
    exponents: ExponentQuadruple
    shifted: K2Params


@dataclass(frozen=True)
class GlobalSolutionCoeffs:
    k: tuple

    def __post_init__(self):
        if len(self.k) != 16:
            raise ValueError(f"need 16 coefficients, got {len(self.k)}")
        if not all(math.isfinite(float(v)) for v in self.k):
            raise ValueError("coefficients must be finite")

    @classmethod
    def unit(cls, j: int) -> "GlobalSolutionCoeffs":
        return cls(tuple(1.0 if i == j else 0.0 for i in range(1, 17)))


def indicial_roots(params: K2Params) -> list:
    """Roots ``{0, 1 - e_i}`` of each slot's indicial equation."""
    return [SlotRoots(0 * e, 1 - e, e == 1) for e in params.e]


def degenerate_slots(params: K2Params) -> list:
    """1-based slots whose two indicial roots coincide (``e_i == 1``)."""
    return [i + 1 for i, r in enumerate(indicial_roots(params)) if r.degenerate]


def exponent_table(params: K2Params) -> list:
    roots = [r.other for r in indicial_roots(params)]
    zero = params.a * 0
    return [
        ExponentQuadruple(*(roots[i] if flag else zero for i, flag in enumerate(pattern)))
        for pattern in EXPONENT_PATTERN
    ]


def transformed_params(exp: ExponentQuadruple, params: K2Params) -> TransformedParams:
    al, be, ga, de = exp.as_tuple()
    return TransformedParams(
        A=al + be + ga + de + params.a,
        B=al + be + de + params.b,
        C=ga + params.c,
        E1=2 * al + params.e1,
        E2=2 * be + params.e2,
        E3=2 * ga + params.e3,
        E4=2 * de + params.e4,
    )


def solution_spec(j: int, params: K2Params) -> SolutionSpec:
    if not 1 <= j <= 16:
        raise ValueError(f"solution index must be in 1..16, got {j}")
    exps = exponent_table(params)[j - 1]
    return SolutionSpec(j, exps, transformed_params(exps, params).as_k2_params())


def _is_integer(v) -> bool:
    return float(v) == int(float(v))


def _check_prefactor_domain(exps: ExponentQuadruple, point: Point4):
    for name, s, v in zip("xyzt", exps.as_tuple(), point):
        if v <= 0 and not _is_integer(s):
            raise DomainError(
                f"coordinate {name}={v!r} must be positive for the real power {name}^{s!r}"
            )


# ---------------------------------------------------------------------------
# functions with partial derivatives
# ---------------------------------------------------------------------------

# A "partials function" maps a derivative order tuple (i, j, k, l) to the value
# of that mixed partial at a fixed point.
PartialsFunction = Callable[[tuple], float]


def k2_function(params: K2Params, point: Point4,
                policy: TruncationPolicy = DEFAULT_POLICY) -> PartialsFunction:
    @lru_cache(maxsize=None)
    def partial(orders: tuple) -> float:
        return k2_mixed_partial(params, point, orders, policy).value

    return partial


def constant_function(value: float = 1.0) -> PartialsFunction:
    def partial(orders: tuple) -> float:
        return value if not any(orders) else 0.0

    return partial


def combination_function(weights: Sequence[float],
                         functions: Sequence[PartialsFunction]) -> PartialsFunction:
    def partial(orders: tuple) -> float:
        return math.fsum(w * f(orders) for w, f in zip(weights, functions) if w != 0)

    return partial


def solution_function(j: int, params: K2Params, point: Point4,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> PartialsFunction:
    """Partials of ``u_j`` by the Leibniz rule.

    The power prefactor is differentiated analytically and the K2 factor by
    parameter shifting.
    """
    spec = solution_spec(j, params)
    _check_prefactor_domain(spec.exponents, point)
    k2 = k2_function(spec.shifted, point, policy)
    coords = point.as_tuple()
    exps = spec.exponents.as_tuple()

    def power_derivative(slot: int, r: int) -> float:
        s, v = exps[slot], coords[slot]
        if _is_integer(s) and int(s) == 0:
            return 1.0 if r == 0 else 0.0
        return float(_falling(s, r)) * float(v) ** (float(s) - r)

    @lru_cache(maxsize=None)
    def partial(orders: tuple) -> float:
        terms = []
        for split in itertools.product(*(range(o + 1) for o in orders)):
            weight = 1.0
            for slot, (o, r) in enumerate(zip(orders, split)):
                weight *= math.comb(o, r) * power_derivative(slot, r)
                if weight == 0:
                    break
            if weight == 0:
                continue
            rest = tuple(o - r for o, r in zip(orders, split))
            terms.append(weight * k2(rest))
        return math.fsum(terms)

    return partial


def solution_value(j: int, params: K2Params, point: Point4,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    spec = solution_spec(j, params)
    _check_prefactor_domain(spec.exponents, point)
    prefactor = 1.0
    for s, v in zip(spec.exponents.as_tuple(), point):
        if float(s) != 0:
            prefactor *= float(v) ** float(s)
    return prefactor * k2_eval(spec.shifted, point, policy).value


def solution_partial(j: int, params: K2Params, point: Point4, orders,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return solution_function(j, params, point, policy)(tuple(orders))


# ---------------------------------------------------------------------------
# residuals of the second-order system
# ---------------------------------------------------------------------------


def pde_residual_2nd(eq: int, f: PartialsFunction, params: K2Params, point: Point4) -> float:
    """Left-hand side of equation ``eq`` (1..4) of the second-order system."""
    x, y, z, t = (float(v) for v in point)
    a, b, c = float(params.a), float(params.b), float(params.c)
    e1, e2, e3, e4 = (float(e) for e in params.e)

    def d(i=0, j=0, k=0, l=0):
        return f((i, j, k, l))

    u = d()
    ux, uy, uz, ut = d(1), d(0, 1), d(0, 0, 1), d(0, 0, 0, 1)
    uxx, uyy, uzz, utt = d(2), d(0, 2), d(0, 0, 2), d(0, 0, 0, 2)
    uxy, uxz, uxt = d(1, 1), d(1, 0, 1), d(1, 0, 0, 1)
    uyz, uyt, uzt = d(0, 1, 1), d(0, 1, 0, 1), d(0, 0, 1, 1)
    s = a + b + 1

    # mixed part shared by equations 1, 2 and 4
    cross = (2 * x * y * uxy + x * z * uxz + 2 * x * t * uxt
             + y * z * uyz + 2 * y * t * uyt + z * t * uzt)
    if eq == 1:
        terms = [x * (1 - x) * uxx, -y * y * uyy, -t * t * utt, -cross,
                 (e1 - s * x) * ux, -s * y * uy, -b * z * uz, -s * t * ut, -a * b * u]
    elif eq == 2:
        terms = [y * (1 - y) * uyy, -x * x * uxx, -t * t * utt, -cross,
                 -s * x * ux, (e2 - s * y) * uy, -b * z * uz, -s * t * ut, -a * b * u]
    elif eq == 3:
        terms = [z * (1 - z) * uzz, -x * z * uxz, -y * z * uyz, -z * t * uzt,
                 -c * x * ux, -c * y * uy, (e3 - (a + c + 1) * z) * uz, -c * t * ut, -a * c * u]
    elif eq == 4:
        terms = [t * (1 - t) * utt, -x * x * uxx, -y * y * uyy, -cross,
                 -s * x * ux, -s * y * uy, -b * z * uz, (e4 - s * t) * ut, -a * b * u]
    else:
        raise ValueError(f"equation index must be 1..4, got {eq}")
    return math.fsum(terms)


def coefficient_recurrence_check(eq: int, params: K2Params, bound: int,
                                 coefficient: Callable | None = None) -> float:
    """Worst relative violation of the coefficient recurrence of equation ``eq``.

    The Euler-operator form of the system acts diagonally on monomials, so on
    the full series coefficients ``c = Delta / (m! n! p! q!)`` it reads, for
    the x equation,

        (e1 + m)(m + 1) c(m+1, n, p, q) = (a + m+n+p+q)(b + m+n+q) c(m, n, p, q)

    and analogously in ``n`` (e2), ``p`` (e3, with ``c + p``) and ``q`` (e4).
    ``coefficient`` defaults to the K2 coefficient and may be replaced to
    check other sequences.
    """
    if eq not in (1, 2, 3, 4):
        raise ValueError(f"equation index must be 1..4, got {eq}")
    bare = coefficient or (lambda idx: k2_coefficient(params, idx))
    a, b, c = params.a, params.b, params.c
    e = params.e[eq - 1]
    slot = eq - 1

    def series_coeff(idx):
        return bare(idx) / math.prod(math.factorial(k) for k in idx)

    indices, _ = simplex_indices(4, bound)
    worst = 0.0
    for row in indices:
        idx = tuple(int(v) for v in row)
        m, n, p, q = idx
        k = idx[slot]
        up = list(idx)
        up[slot] += 1
        second = (b + m + n + q) if eq != 3 else (c + p)
        lhs = (e + k) * (k + 1) * series_coeff(tuple(up))
        rhs = (a + m + n + p + q) * second * series_coeff(idx)
        scale = max(abs(lhs), abs(rhs))
        if scale:
            worst = max(worst, float(abs(lhs - rhs) / scale))
    return worst


# ---------------------------------------------------------------------------
# global solution and independence
# ---------------------------------------------------------------------------


def global_solution(coeffs: GlobalSolutionCoeffs, params: K2Params, point: Point4,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``sum_j k_j u_j`` at ``point``; solutions with ``k_j = 0`` are skipped."""
    return math.fsum(
        k * solution_value(j, params, point, policy)
        for j, k in enumerate(coeffs.k, start=1)
        if k != 0
    )


@dataclass
class IndependenceDiagnostic:
    """Rank evidence for the 16 solutions.

    ``singular_values`` belong to the column-equilibrated matrix (each column
    scaled to unit 2-norm), which is what ``ratio`` and ``full_rank`` use;
    ``raw_ratio`` is the same ratio for the unscaled matrix.
    """

    singular_values: np.ndarray
    smallest: float
    largest: float
    ratio: float
    raw_ratio: float
    full_rank: bool
    rank_tol: float
    matrix: np.ndarray = field(repr=False)
    notes: list = field(default_factory=list)


def sample_points(count: int, seed: int, low: float = 0.01, high: float = 0.05) -> list:
    rng = np.random.default_rng(seed)
    return [Point4(*map(float, row)) for row in rng.uniform(low, high, size=(count, 4))]


def _sv_ratio(sv: np.ndarray) -> float:
    return float(sv[-1] / sv[0]) if sv[0] else 0.0


def independence_check(params: K2Params, points: Sequence[Point4],
                       policy: TruncationPolicy = DEFAULT_POLICY,
                       rank_tol: float = 1e-8) -> IndependenceDiagnostic:
    """Numerical rank of the 16x16 matrix ``V[i, j] = u_j(points[i])``.

    Columns differ in magnitude by orders of magnitude on a small sampling
    box, so they are scaled to unit norm before the singular values are
    compared; scaling cannot change the rank.
    """
    if len(points) != 16:
        raise ValueError(f"need 16 sample points, got {len(points)}")
    notes = []
    degenerate = degenerate_slots(params)
    if degenerate:
        notes.append(f"e_i = 1 in slot(s) {degenerate}: indicial roots coincide")
    integer_e = [i + 1 for i, e in enumerate(params.e) if _is_integer(e)]
    if integer_e:
        notes.append(f"integer e_i in slot(s) {integer_e}: parameters are not generic")
    matrix = np.array(
        [[solution_value(j, params, pt, policy) for j in range(1, 17)] for pt in points]
    )
    norms = np.linalg.norm(matrix, axis=0)
    if np.any(norms == 0):
        notes.append("a solution vanishes at every sample point")
        norms = np.where(norms == 0, 1.0, norms)
    sv = np.linalg.svd(matrix / norms, compute_uv=False)
    ratio = _sv_ratio(sv)
    return IndependenceDiagnostic(
        singular_values=sv,
        smallest=float(sv[-1]),
        largest=float(sv[0]),
        ratio=ratio,
        raw_ratio=_sv_ratio(np.linalg.svd(matrix, compute_uv=False)),
        full_rank=ratio > rank_tol,
        rank_tol=rank_tol,
        matrix=matrix,
        notes=notes,
    )
