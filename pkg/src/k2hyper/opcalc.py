"""
Exact operator calculus on monomials.

The derivative ``D`` and the antiderivative ``D^-1`` (lower limit 0) act on
powers by

    D^m   x^lam = lam (lam-1) ... (lam-m+1)      x^(lam-m)
    D^-m  x^lam = x^(lam+m) / ((lam+1) ... (lam+m))

and everything here is done with ``fractions.Fraction`` so operator images of
hypergeometric series can be compared coefficient by coefficient with no
tolerance at all.

Operator expressions of the form ``(1 - sum_i T_i)^(-alpha)`` are expanded
with the binomial series.  Each ``T_i`` is a word such as
``x D_t1 t2^-1 D_t2^-1 t1``, tagged by the series variable ``x`` that it
carries.  Powers and products of words are *normal ordered*: for a term
``prod_i T_i^(k_i)`` the inner multipliers act first, then all
antiderivatives, then all derivatives, then the outer multipliers, with the
orders added up per variable.  Under this convention

    D_t^m D_u^-m t^m { t^(beta-1) u^(gamma-1) } = (beta)_m/(gamma)_m t^(beta-1) u^(gamma+m-1)

which is the mechanism behind every operational image in this module.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PoleError
from .series import K2Params, k2_coefficient, pochhammer, simplex_indices

__all__ = [
    "VARIABLES",
    "TAGS",
    "Monomial",
    "Derive",
    "Integrate",
    "MultiplyPower",
    "Scale",
    "OperatorWord",
    "NegPowerFactor",
    "ExpansionPolicy",
    "IndeterminateSeries",
    "OpCheck",
    "apply_derive",
    "apply_integrate",
    "apply_shift_pair",
    "apply_word",
    "apply_normal_ordered",
    "expand_neg_power",
    "bracket_coefficient",
    "shift_word",
    "verify_lemma1",
    "verify_theorem31",
    "theorem31_operator",
    "composition_matches_shift",
]

VARIABLES = ("t", "u", "x", "t1", "t2", "t3", "t4", "t5", "t6")
TAGS = ("x", "y", "z", "u")


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


# ---------------------------------------------------------------------------
# monomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    """``coeff * prod var^exp`` with rational coefficient and exponents.

    ``exps`` is kept sorted with zero exponents removed, so equal monomials
    compare equal.
    """

    coeff: Fraction
    exps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeff", _q(self.coeff))
        cleaned = {}
        for var, e in self.exps:
            if var not in VARIABLES:
                raise ValueError(f"unknown formal variable {var!r}")
            cleaned[var] = cleaned.get(var, Fraction(0)) + _q(e)
        object.__setattr__(
            self, "exps", tuple(sorted((v, e) for v, e in cleaned.items() if e != 0))
        )

    @classmethod
    def of(cls, coeff=1, factors: Iterable = ()) -> "Monomial":
        """Build from ``(variable, exponent)`` factors; repeated variables multiply."""
        return cls(_q(coeff), tuple(factors))

    def exponent(self, var: str) -> Fraction:
        return dict(self.exps).get(var, Fraction(0))

    def with_exponent(self, var: str, value) -> "Monomial":
        exps = dict(self.exps)
        exps[var] = _q(value)
        return Monomial(self.coeff, tuple(exps.items()))

    def scaled(self, factor) -> "Monomial":
        return Monomial(self.coeff * _q(factor), self.exps)

    def same_powers(self, other: "Monomial") -> bool:
        return self.exps == other.exps

    def __str__(self) -> str:
        body = " ".join(f"{v}^({e})" for v, e in self.exps)
        return f"{self.coeff} {body}".strip()


def apply_derive(var: str, m: int, mono: Monomial) -> Monomial:
    if m < 0:
        raise ValueError("derivative order must be >= 0")
    lam = mono.exponent(var)
    factor = Fraction(1)
    for i in range(m):
        factor *= lam - i
    return Monomial(mono.coeff * factor, mono.exps).with_exponent(var, lam - m)


def apply_integrate(var: str, m: int, mono: Monomial) -> Monomial:
    if m < 0:
        raise ValueError("integration order must be >= 0")
    lam = mono.exponent(var)
    factor = Fraction(1)
    for i in range(1, m + 1):
        if lam + i == 0:
            raise PoleError(f"antiderivative of {var}^({lam}) hits the pole at {var}^-1")
        factor *= lam + i
    return Monomial(mono.coeff / factor, mono.exps).with_exponent(var, lam + m)


def apply_shift_pair(t_var: str, u_var: str, m: int, mono: Monomial) -> Monomial:
    """``D_t^m D_u^-m`` on ``t^(beta+m-1) u^(gamma-1)`` in closed form.

    Multiplies by ``(beta)_m / (gamma)_m`` and moves ``m`` units of degree
    from ``t`` to ``u``.
    """
    beta = mono.exponent(t_var) - m + 1
    gamma = mono.exponent(u_var) + 1
    den = pochhammer(gamma, m)
    if den == 0:
        raise PoleError(f"(gamma)_m vanishes for gamma={gamma}, m={m}")
    out = Monomial(mono.coeff * pochhammer(beta, m) / den, mono.exps)
    out = out.with_exponent(t_var, mono.exponent(t_var) - m)
    return out.with_exponent(u_var, mono.exponent(u_var) + m)


# ---------------------------------------------------------------------------
# operator atoms and words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Derive:
    var: str
    order: int = 1

    def apply(self, mono: Monomial) -> Monomial:
        return apply_derive(self.var, self.order, mono)

    def power(self, k: int) -> "Derive":
        return Derive(self.var, self.order * k)


@dataclass(frozen=True)
class Integrate:
    var: str
    order: int = 1

    def apply(self, mono: Monomial) -> Monomial:
        return apply_integrate(self.var, self.order, mono)

    def power(self, k: int) -> "Integrate":
        return Integrate(self.var, self.order * k)


@dataclass(frozen=True)
class MultiplyPower:
    var: str
    exponent: Fraction = Fraction(1)

    def apply(self, mono: Monomial) -> Monomial:
        return mono.with_exponent(self.var, mono.exponent(self.var) + _q(self.exponent))

    def power(self, k: int) -> "MultiplyPower":
        return MultiplyPower(self.var, _q(self.exponent) * k)


@dataclass(frozen=True)
class Scale:
    """Multiplication by a series variable; only its degree is tracked."""

    tag: str
    degree: int = 1

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown series variable {self.tag!r}")

    def apply(self, mono: Monomial) -> Monomial:
        return mono

    def power(self, k: int) -> "Scale":
        return Scale(self.tag, self.degree * k)


@dataclass(frozen=True)
class OperatorWord:
    """Atoms listed left to right as written; they act right to left."""

    atoms: tuple

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if not self.atoms:
            raise ValueError("operator word must not be empty")
        for atom in self.atoms:
            if isinstance(atom, (Derive, Integrate)) and atom.order < 1:
                raise ValueError("Derive/Integrate atoms need order >= 1")

    def degrees(self) -> dict:
        out = defaultdict(int)
        for atom in self.atoms:
            if isinstance(atom, Scale):
                out[atom.tag] += atom.degree
        return dict(out)

    def classified(self) -> list:
        """``(rank, atom)`` pairs; rank 0 acts first under normal ordering."""
        calculus = [i for i, a in enumerate(self.atoms) if isinstance(a, (Derive, Integrate))]
        rightmost = calculus[-1] if calculus else -1
        ranked = []
        for i, atom in enumerate(self.atoms):
            if isinstance(atom, MultiplyPower):
                ranked.append((0 if i > rightmost else 3, atom))
            elif isinstance(atom, Integrate):
                ranked.append((1, atom))
            elif isinstance(atom, Derive):
                ranked.append((2, atom))
        return ranked


def shift_word(tag: str, derive_var: str, integrate_var: str) -> OperatorWord:
    """The word ``tag * D_d w^-1 D_w^-1 d`` used by all operational images."""
    return OperatorWord((
        Scale(tag),
        Derive(derive_var),
        MultiplyPower(integrate_var, Fraction(-1)),
        Integrate(integrate_var),
        MultiplyPower(derive_var, Fraction(1)),
    ))


def apply_word(word: OperatorWord, mono: Monomial) -> Monomial:
    """Literal composition: atoms act one at a time from the right."""
    for atom in reversed(word.atoms):
        mono = atom.apply(mono)
    return mono


def apply_normal_ordered(powers: Sequence, mono: Monomial) -> Monomial:
    """Apply ``prod_i word_i^(k_i)`` in normal order to ``mono``.

    ``powers`` is a sequence of ``(word, k)`` pairs.
    """
    grouped = [defaultdict(Fraction) for _ in range(4)]
    for word, k in powers:
        if k == 0:
            continue
        for rank, atom in word.classified():
            powered = atom.power(k)
            amount = powered.exponent if isinstance(powered, MultiplyPower) else powered.order
            grouped[rank][powered.var] += _q(amount)
    for rank, bucket in enumerate(grouped):
        for var in sorted(bucket):
            amount = bucket[var]
            if rank in (0, 3):
                mono = MultiplyPower(var, amount).apply(mono)
            elif rank == 1:
                mono = apply_integrate(var, int(amount), mono)
            else:
                mono = apply_derive(var, int(amount), mono)
    return mono


# ---------------------------------------------------------------------------
# expansion of (1 - sum T_i)^(-alpha)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NegPowerFactor:
    """``(1 - sum(words))^(-exponent)``."""

    exponent: Fraction
    words: tuple

    def __post_init__(self):
        object.__setattr__(self, "exponent", _q(self.exponent))
        object.__setattr__(self, "words", tuple(self.words))
        for w in self.words:
            if sum(w.degrees().values()) < 1:
                raise ValueError("every word must carry at least one series variable")


@dataclass(frozen=True)
class ExpansionPolicy:
    total_order: int = 4

    def __post_init__(self):
        if self.total_order < 0:
            raise ValueError("total_order must be >= 0")


@dataclass
class IndeterminateSeries:
    """Coefficients of ``x^m y^n z^p u^q`` as sums of monomials in t1..t6."""

    order: int
    terms: dict = field(default_factory=dict)

    def add(self, degree: tuple, mono: Monomial):
        bucket = self.terms.setdefault(degree, {})
        bucket[mono.exps] = bucket.get(mono.exps, Fraction(0)) + mono.coeff

    def degrees(self) -> list:
        return sorted(self.terms, key=lambda d: (sum(d), d))

    def monomials(self, degree: tuple) -> list:
        bucket = self.terms.get(degree, {})
        return [Monomial(c, e) for e, c in sorted(bucket.items()) if c != 0]

    def monomial(self, degree: tuple) -> Monomial:
        """The single monomial at ``degree`` (zero monomial when absent)."""
        monos = self.monomials(degree)
        if not monos:
            return Monomial(0)
        if len(monos) > 1:
            raise ValueError(f"coefficient at {degree} is not a single monomial")
        return monos[0]


def expand_neg_power(factors, target: Monomial,
                     policy: ExpansionPolicy = ExpansionPolicy()) -> IndeterminateSeries:
    """Expand ``prod_f (1 - sum T_{f,i})^(-alpha_f) {target}`` up to total order N.

    Uses ``(1 - T)^(-alpha) = sum_k (alpha)_k T^k / k!`` and the multinomial
    theorem, so a term with counts ``k_i`` gets weight
    ``prod_f (alpha_f)_{|k_f|} / prod_i k_i!`` and the normal-ordered word
    product.
    """
    if isinstance(factors, NegPowerFactor):
        factors = [factors]
    words = [(fi, w) for fi, f in enumerate(factors) for w in f.words]
    word_degrees = [w.degrees() for _, w in words]
    series = IndeterminateSeries(policy.total_order)
    indices, _ = simplex_indices(len(words), policy.total_order)
    for row in indices:
        counts = [int(k) for k in row]
        degree = dict.fromkeys(TAGS, 0)
        for k, deg in zip(counts, word_degrees):
            for tag, d in deg.items():
                degree[tag] += k * d
        degree = tuple(degree[t] for t in TAGS)
        if sum(degree) > policy.total_order:
            continue
        weight = Fraction(1)
        for fi, f in enumerate(factors):
            weight *= pochhammer(f.exponent, sum(k for k, (fj, _) in zip(counts, words) if fj == fi))
        for k in counts:
            weight /= math.factorial(k)
        if weight == 0:
            continue
        image = apply_normal_ordered([(w, k) for k, (_, w) in zip(counts, words)], target)
        series.add(degree, image.scaled(weight))
    return series


# ---------------------------------------------------------------------------
# bracket notation for quadruple series
# ---------------------------------------------------------------------------


def bracket_coefficient(pattern: str, values: dict, idx) -> Fraction:
    """Bare coefficient of a twelve-slot bracket such as ``"a,a,a,a;b,b,c,b;e1,e2,e3,e4"``.

    The first two groups are numerator slots for the variables ``x, y, z, u``
    and the last group the denominators.  Inside a group, slots naming the
    same symbol share one Pochhammer symbol whose order is the sum of their
    indices, so ``a,a,a,a`` gives ``(a)_{m+n+p+q}`` and ``b,b,c,b`` gives
    ``(b)_{m+n+q} (c)_p``.
    """
    groups = [g.split(",") for g in pattern.replace(" ", "").split(";")]
    if len(groups) != 3 or any(len(g) != 4 for g in groups):
        raise ValueError(f"bad bracket pattern {pattern!r}")
    idx = tuple(int(k) for k in idx)

    def group_product(symbols):
        orders = defaultdict(int)
        for sym, k in zip(symbols, idx):
            orders[sym] += k
        out = Fraction(1)
        for sym, k in orders.items():
            out *= pochhammer(_q(values[sym]), k)
        return out

    num = group_product(groups[0]) * group_product(groups[1])
    den = group_product(groups[2])
    if den == 0:
        if num == 0:
            return Fraction(0)
        raise PoleError(f"denominator vanishes at {idx}")
    return num / den


# ---------------------------------------------------------------------------
# verification of operational images
# ---------------------------------------------------------------------------


@dataclass
class OpCheck:
    form: str
    order: int
    match: bool
    max_deviation: Fraction
    first_mismatch: tuple | None
    checked: int
    notes: list = field(default_factory=list)


def _compare(form: str, order: int, series: IndeterminateSeries, expected: dict,
             notes: list) -> OpCheck:
    worst = Fraction(0)
    first = None
    degrees = sorted(set(expected) | set(series.terms), key=lambda d: (sum(d), d))
    for degree in degrees:
        want = expected.get(degree, Monomial(0))
        monos = series.monomials(degree)
        got = monos[0] if len(monos) == 1 else Monomial(0)
        if len(monos) > 1 or (got.coeff != 0 and want.coeff != 0 and not got.same_powers(want)):
            dev = abs(want.coeff) + sum(abs(m.coeff) for m in monos)
        else:
            dev = abs(got.coeff - want.coeff)
        if dev != 0 and first is None:
            first = degree
        worst = max(worst, dev)
    return OpCheck(form, order, first is None, worst, first, len(degrees), notes)


def _gauss_weight(alpha, beta, gamma, k: int) -> Fraction:
    return pochhammer(alpha, k) * pochhammer(beta, k) / (pochhammer(gamma, k) * math.factorial(k))


def verify_lemma1(alpha, beta, gamma, order: int, form: str = "3.4") -> OpCheck:
    """Check an operator image of the Gauss series coefficient by coefficient.

    ``form="3.4"``: ``(1 - x D_t u^-1 D_u^-1 t)^-alpha {t^(beta-1) u^(gamma-1)}``.
    ``form="3.5"``: ``(1 - D_t D_x^-1 t)^-alpha {t^(beta-1) x^(gamma-1)}``; here
    the series variable is the formal variable ``x`` itself, so the ``x``
    degree of the image is read off its power.
    """
    alpha, beta, gamma = _q(alpha), _q(beta), _q(gamma)
    if gamma.denominator == 1 and gamma <= 0:
        raise PoleError(f"gamma={gamma} is a nonpositive integer")
    policy = ExpansionPolicy(order)
    if form == "3.4":
        word = shift_word("x", "t", "u")
        target = Monomial.of(1, [("t", beta - 1), ("u", gamma - 1)])
        shift_var = None
    elif form == "3.5":
        word = OperatorWord((Scale("x"), Derive("t"), Integrate("x"),
                             MultiplyPower("t", Fraction(1))))
        target = Monomial.of(1, [("t", beta - 1), ("x", gamma - 1)])
        shift_var = "x"
    else:
        raise ValueError(f"unknown Lemma form {form!r}")
    series = expand_neg_power(NegPowerFactor(alpha, (word,)), target, policy)
    expected = {}
    for k in range(order + 1):
        want = target.scaled(_gauss_weight(alpha, beta, gamma, k))
        if shift_var:
            want = want.with_exponent(shift_var, want.exponent(shift_var) + k)
        if want.coeff != 0:
            expected[(k, 0, 0, 0)] = want
    return _compare(f"lemma1-{form}", order, series, expected, [])


THEOREM_PATTERN = "a,a,a,a;b,b,c,b;e1,e2,e3,e4"


def theorem31_operator(params: K2Params, form: str, printed_target: bool = False):
    """``(factors, target, notes)`` of the chosen operator image of K2."""
    a, b, c, e1, e2, e3, e4 = (_q(v) for v in params.as_tuple())
    notes = []
    if form == "3.7":
        factors = [
            NegPowerFactor(b, (shift_word("x", "t1", "t2"),
                               shift_word("y", "t1", "t3"),
                               shift_word("u", "t1", "t5"))),
            NegPowerFactor(c, (shift_word("z", "t1", "t4"),)),
        ]
        slot_e3 = "t3" if printed_target else "t4"
        target = Monomial.of(1, [("t1", a - 1), ("t2", e1 - 1), ("t3", e2 - 1),
                                 (slot_e3, e3 - 1), ("t5", e4 - 1)])
        if printed_target:
            notes.append("target uses t3^(e3-1), the uncorrected left-hand side")
        else:
            notes.append("target uses t4^(e3-1); t3^(e3-1) on the left-hand side "
                         "leaves t4 without a power and breaks the z-slot")
    elif form == "3.8":
        factors = [
            NegPowerFactor(a, (shift_word("x", "t1", "t3"),
                               shift_word("y", "t1", "t4"),
                               shift_word("z", "t2", "t5"),
                               shift_word("u", "t1", "t6"))),
        ]
        target = Monomial.of(1, [("t1", b - 1), ("t2", c - 1), ("t3", e1 - 1),
                                 ("t4", e2 - 1), ("t5", e3 - 1), ("t6", e4 - 1)])
    else:
        raise ValueError(f"unknown Theorem form {form!r}")
    return factors, target, notes


def verify_theorem31(params: K2Params, order: int, form: str = "3.7",
                     printed_target: bool = False) -> OpCheck:
    """Compare an operator image of K2 with the K2 coefficients up to ``order``.

    The expected coefficient at ``(m, n, p, q)`` is
    ``k2_coefficient / (m! n! p! q!)`` times the target monomial.
    """
    exact = K2Params(*(_q(v) for v in params.as_tuple()))
    for name, e in zip(("e1", "e2", "e3", "e4"), exact.e):
        if e.denominator == 1 and e <= 0:
            raise PoleError(f"{name}={e} is a nonpositive integer")
    factors, target, notes = theorem31_operator(exact, form, printed_target)
    series = expand_neg_power(factors, target, ExpansionPolicy(order))
    expected = {}
    indices, _ = simplex_indices(4, order)
    for row in indices:
        idx = tuple(int(k) for k in row)
        weight = k2_coefficient(exact, idx) / math.prod(math.factorial(k) for k in idx)
        if weight != 0:
            expected[idx] = target.scaled(weight)
    return _compare(f"thm-{form}", order, series, expected, notes)


def composition_matches_shift(beta, gamma, m: int, t_var: str = "t", u_var: str = "u") -> bool:
    """``D_t^m`` after ``D_u^-m`` equals the closed form of ``apply_shift_pair``."""
    beta, gamma = _q(beta), _q(gamma)
    mono = Monomial.of(1, [(t_var, beta + m - 1), (u_var, gamma - 1)])
    composed = apply_derive(t_var, m, apply_integrate(u_var, m, mono))
    return composed == apply_shift_pair(t_var, u_var, m, mono)
