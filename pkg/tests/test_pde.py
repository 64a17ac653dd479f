import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import PDE_PARAMS, brute_k2, fd_partial
from k2hyper import (
    DomainError,
    GlobalSolutionCoeffs,
    K2Params,
    Point4,
    TruncationPolicy,
    coefficient_recurrence_check,
    exponent_table,
    global_solution,
    independence_check,
    k2_eval,
    pde_residual_2nd,
    sample_points,
    solution_function,
    solution_spec,
    solution_value,
)
from k2hyper.pde import (
    combination_function,
    constant_function,
    indicial_roots,
    k2_function,
    solution_partial,
    transformed_params,
)
from k2hyper.series import k2_coefficient

POLICY = TruncationPolicy(24)


def _frac_params(a, b, c, e1, e2, e3, e4):
    return K2Params(*(Fraction(v) for v in (a, b, c, e1, e2, e3, e4)))


# Parameter lists of the 16 solutions written out by hand, slot for slot,
# with their power prefactors.  Kept literal on purpose: this is the table
# the generated specs are compared against.
def printed_solutions(a, b, c, e1, e2, e3, e4):
    return {
        1: ((0, 0, 0, 0), (a, b, c, e1, e2, e3, e4)),
        2: ((1 - e1, 0, 0, 0), (1 - e1 + a, 1 - e1 + b, c, 2 - e1, e2, e3, e4)),
        3: ((0, 1 - e2, 0, 0), (1 - e2 + a, 1 - e2 + b, c, e1, 2 - e2, e3, e4)),
        4: ((0, 0, 1 - e3, 0), (1 - e3 + a, b, 1 - e3 + c, e1, e2, 2 - e3, e4)),
        5: ((0, 0, 0, 1 - e4), (1 - e4 + a, 1 - e4 + b, c, e1, e2, e3, 2 - e4)),
        6: ((1 - e1, 1 - e2, 0, 0),
            (2 - e1 - e2 + a, 2 - e1 - e2 + b, c, 2 - e1, 2 - e2, e3, e4)),
        7: ((1 - e1, 0, 1 - e3, 0),
            (2 - e1 - e3 + a, 1 - e1 + b, 1 - e3 + c, 2 - e1, e2, 2 - e3, e4)),
        8: ((1 - e1, 0, 0, 1 - e4),
            (2 - e1 - e4 + a, 2 - e1 - e4 + b, c, 2 - e1, e2, e3, 2 - e4)),
        9: ((0, 1 - e2, 1 - e3, 0),
            (2 - e2 - e3 + a, 1 - e2 + b, 1 - e3 + c, e1, 2 - e2, 2 - e3, e4)),
        10: ((0, 1 - e2, 0, 1 - e4),
             (2 - e2 - e4 + a, 2 - e2 - e4 + b, c, e1, 2 - e2, e3, 2 - e4)),
        11: ((0, 0, 1 - e3, 1 - e4),
             (2 - e3 - e4 + a, 1 - e4 + b, 1 - e3 + c, e1, e2, 2 - e3, 2 - e4)),
        12: ((1 - e1, 1 - e2, 1 - e3, 0),
             (3 - e1 - e2 - e3 + a, 2 - e1 - e2 + b, 1 - e3 + c, 2 - e1, 2 - e2, 2 - e3, e4)),
        13: ((1 - e1, 1 - e2, 0, 1 - e4),
             (3 - e1 - e2 - e4 + a, 3 - e1 - e2 - e4 + b, c, 2 - e1, 2 - e2, e3, 2 - e4)),
        14: ((1 - e1, 0, 1 - e3, 1 - e4),
             (3 - e1 - e3 - e4 + a, 2 - e1 - e4 + b, 1 - e3 + c, 2 - e1, e2, 2 - e3, 2 - e4)),
        15: ((0, 1 - e2, 1 - e3, 1 - e4),
             (3 - e2 - e3 - e4 + a, 2 - e2 - e4 + b, 1 - e3 + c, e1, 2 - e2, 2 - e3, 2 - e4)),
        16: ((1 - e1, 1 - e2, 1 - e3, 1 - e4),
             (4 - e1 - e2 - e3 - e4 + a, 3 - e1 - e2 - e4 + b, 1 - e3 + c,
              2 - e1, 2 - e2, 2 - e3, 2 - e4)),
    }


RATIONAL_SETS = [
    (Fraction(1, 3), Fraction(1, 5), Fraction(1, 7), Fraction(3, 2), Fraction(5, 2), Fraction(7, 2), Fraction(9, 2)),
    (Fraction(3, 10), Fraction(1, 2), Fraction(7, 10), Fraction(3, 10), Fraction(9, 20), Fraction(3, 5), Fraction(3, 4)),
    (Fraction(-2, 9), Fraction(4, 11), Fraction(5, 13), Fraction(7, 17), Fraction(19, 23), Fraction(29, 31), Fraction(37, 41)),
]


# indicial analysis --------------------------------------------------------


def test_indicial_roots_examples():
    roots = indicial_roots(K2Params(0.3, 0.5, 0.7, 0.7, 1.3, 0.4, 1.6))
    assert [r.zero for r in roots] == [0, 0, 0, 0]
    assert [r.other for r in roots] == pytest.approx([0.3, -0.3, 0.6, -0.6])
    assert not any(r.degenerate for r in roots)
    flagged = indicial_roots(K2Params(0.3, 0.5, 0.7, 1, 1.3, 0.4, 1.6))[0]
    assert flagged.zero == flagged.other == 0 and flagged.degenerate


@pytest.mark.parametrize("values", RATIONAL_SETS)
def test_exponent_table_columns_and_closure(values):
    p = _frac_params(*values)
    table = exponent_table(p)
    e1, e2, e3, e4 = p.e
    assert table[0].as_tuple() == (0, 0, 0, 0)
    assert table[6].as_tuple() == (1 - e1, 0, 1 - e3, 0)
    assert table[15].as_tuple() == (1 - e1, 1 - e2, 1 - e3, 1 - e4)
    assert len(set(t.as_tuple() for t in table)) == 16
    for quad in table:
        assert quad.indicial_values(p) == (0, 0, 0, 0)


def test_transformed_params_examples():
    a, b, c, e1, e2, e3, e4 = RATIONAL_SETS[0]
    p = _frac_params(*RATIONAL_SETS[0])
    tables = exponent_table(p)
    assert transformed_params(tables[0], p).as_k2_params() == p
    t2 = transformed_params(tables[1], p)
    assert (t2.A, t2.B, t2.C, t2.E1, t2.E2) == (1 - e1 + a, 1 - e1 + b, c, 2 - e1, e2)
    t16 = transformed_params(tables[15], p)
    assert (t16.A, t16.B, t16.C) == (4 - e1 - e2 - e3 - e4 + a, 3 - e1 - e2 - e4 + b, 1 - e3 + c)
    assert (t16.E1, t16.E2, t16.E3, t16.E4) == (2 - e1, 2 - e2, 2 - e3, 2 - e4)


@pytest.mark.parametrize("values", RATIONAL_SETS)
def test_solution_specs_match_literal_table(values):
    p = _frac_params(*values)
    printed = printed_solutions(*p.as_tuple())
    for j in range(1, 17):
        spec = solution_spec(j, p)
        exps, shifted = printed[j]
        assert spec.exponents.as_tuple() == exps, j
        assert spec.shifted.as_tuple() == shifted, j


# solutions ----------------------------------------------------------------


def test_first_solution_is_k2():
    p = K2Params(*PDE_PARAMS)
    pt = Point4(0.03, 0.02, 0.04, 0.01)
    assert solution_value(1, p, pt) == k2_eval(p, pt).value


def test_degenerate_exponent_reduces_to_first_solution():
    p = K2Params(0.3, 0.5, 0.7, 0.6, 1.3, 1, 1.9)
    pt = Point4(0.03, 0.02, 0.04, 0.01)
    assert solution_value(4, p, pt) == solution_value(1, p, pt)


def test_second_solution_brute_force():
    params = (0.3, 0.5, 0.7, 0.6, 1.3, 1.7, 1.9)
    a, b, c, e1, e2, e3, e4 = params
    pt = (0.04, 0.03, 0.02, 0.01)
    shifted = (1 - e1 + a, 1 - e1 + b, c, 2 - e1, e2, e3, e4)
    want = mpmath.mpf(0.04) ** (1 - e1) * brute_k2(shifted, pt, 16)
    got = solution_value(2, K2Params(*params), Point4(*pt))
    assert got == pytest.approx(float(want), rel=1e-13)


def test_fractional_power_needs_positive_coordinate():
    p = K2Params(*PDE_PARAMS)
    with pytest.raises(DomainError):
        solution_value(2, p, Point4(-0.01, 0.02, 0.03, 0.04))
    # u_1 has no prefactor, so a negative coordinate is fine
    solution_value(1, p, Point4(-0.01, 0.02, 0.03, 0.04))


@pytest.mark.parametrize("j", [2, 7, 11, 16])
@pytest.mark.parametrize("orders", [(1, 0, 0, 0), (0, 0, 0, 1), (2, 0, 0, 0), (1, 0, 1, 0), (0, 1, 0, 1)])
def test_leibniz_partials_match_finite_differences(j, orders):
    p = K2Params(*PDE_PARAMS)
    pt = (0.04, 0.035, 0.03, 0.045)
    exact = solution_partial(j, p, Point4(*pt), orders, POLICY)
    fd = fd_partial(lambda q: solution_value(j, p, Point4(*q), POLICY), pt, orders, h=1e-3)
    assert fd == pytest.approx(exact, rel=1e-6)


# residuals ----------------------------------------------------------------


def test_constant_probe_residuals():
    p = K2Params(*PDE_PARAMS)
    pt = Point4(0.02, 0.03, 0.04, 0.05)
    one = constant_function(1.0)
    for eq in (1, 2, 4):
        assert pde_residual_2nd(eq, one, p, pt) == pytest.approx(-p.a * p.b, rel=1e-15)
    assert pde_residual_2nd(3, one, p, pt) == pytest.approx(-p.a * p.c, rel=1e-15)


@pytest.mark.parametrize("eq", [1, 2, 3, 4])
def test_k2_residual_and_recurrence_certify_same_function(eq):
    p = K2Params(*PDE_PARAMS)
    assert coefficient_recurrence_check(eq, p, 10) <= 1e-14
    for pt in sample_points(3, seed=5):
        assert abs(pde_residual_2nd(eq, k2_function(p, pt, POLICY), p, pt)) <= 1e-8


@pytest.mark.parametrize("j", [1, 6, 11, 16])
def test_solution_residuals(j):
    p = K2Params(*PDE_PARAMS)
    for pt in sample_points(2, seed=99):
        f = solution_function(j, p, pt, POLICY)
        for eq in range(1, 5):
            assert abs(pde_residual_2nd(eq, f, p, pt)) <= 1e-7


def test_residual_detects_a_wrong_function():
    p = K2Params(*PDE_PARAMS)
    q = p.replace(b=p.b + 0.01)
    pt = sample_points(1, seed=3)[0]
    assert abs(pde_residual_2nd(1, k2_function(q, pt, POLICY), p, pt)) > 1e-4


# coefficient recurrences --------------------------------------------------


@pytest.mark.parametrize("eq", [1, 2, 3, 4])
@pytest.mark.parametrize("values", [PDE_PARAMS, (0.45, -0.35, 1.2, 0.8, 1.7, 2.3, 1.1)])
def test_recurrence_holds(eq, values):
    assert coefficient_recurrence_check(eq, K2Params(*values), 8) <= 1e-14


@pytest.mark.parametrize("eq", [1, 3])
def test_recurrence_catches_injected_fault(eq):
    p = K2Params(*PDE_PARAMS)
    target = (1, 1, 1, 0)

    def faulty(idx):
        base = k2_coefficient(p, idx)
        return base + 1e-3 if tuple(idx) == target else base

    assert coefficient_recurrence_check(eq, p, 8, coefficient=faulty) >= 1e-4


# global solution ----------------------------------------------------------


def test_global_solution_unit_and_zero():
    p = K2Params(*PDE_PARAMS)
    pt = Point4(0.03, 0.02, 0.04, 0.01)
    assert global_solution(GlobalSolutionCoeffs.unit(1), p, pt) == solution_value(1, p, pt)
    assert global_solution(GlobalSolutionCoeffs((0.0,) * 16), p, pt) == 0


def test_global_solution_rejects_bad_coefficients():
    with pytest.raises(ValueError):
        GlobalSolutionCoeffs((1.0,) * 15)
    with pytest.raises(ValueError):
        GlobalSolutionCoeffs((math.nan,) + (0.0,) * 15)


@settings(max_examples=5, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=16, max_size=16))
def test_residual_is_linear(weights):
    p = K2Params(*PDE_PARAMS)
    pt = Point4(0.03, 0.025, 0.04, 0.02)
    funcs = [solution_function(j, p, pt, POLICY) for j in range(1, 17)]
    combo = combination_function(weights, funcs)
    whole = pde_residual_2nd(1, combo, p, pt)
    parts = [pde_residual_2nd(1, f, p, pt) for f in funcs]
    assert whole == pytest.approx(sum(w * r for w, r in zip(weights, parts)), abs=1e-10)
    assert abs(whole) <= 16 * 2 * 1e-7
    value = global_solution(GlobalSolutionCoeffs(tuple(weights)), p, pt, POLICY)
    assert value == pytest.approx(combo((0, 0, 0, 0)), rel=1e-12, abs=1e-12)


# independence -------------------------------------------------------------


def test_independence_generic():
    diag = independence_check(K2Params(*PDE_PARAMS), sample_points(16, seed=12345))
    assert diag.full_rank
    assert diag.singular_values.shape == (16,)
    assert diag.ratio == diag.smallest / diag.largest


def test_independence_degenerate_e1():
    p = K2Params(0.3, 0.5, 0.7, 1.0, 0.45, 0.6, 0.75)
    diag = independence_check(p, sample_points(16, seed=12345))
    assert not diag.full_rank
    assert any("coincide" in n for n in diag.notes)
    np.testing.assert_array_equal(diag.matrix[:, 0], diag.matrix[:, 1])


def test_independence_duplicated_row():
    points = sample_points(16, seed=12345)
    points[5] = points[2]
    assert not independence_check(K2Params(*PDE_PARAMS), points).full_rank


def test_independence_needs_sixteen_points():
    with pytest.raises(ValueError):
        independence_check(K2Params(*PDE_PARAMS), sample_points(15, seed=1))
