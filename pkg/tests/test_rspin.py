import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohft.errors import RangeError, UnstablePair
from cohft.rspin import (
    bseries,
    degree,
    euler_commutation_check,
    fusion_coefficient,
    idempotent_check_float,
    rspin_rmatrix,
    rspin_topological_exact,
    rspin_topological_float,
    shifted_theory,
    sl2_invariant_dim,
    witten_integral,
)
from oracles import invariants_by_characters


def b_series_direct(r, a, m):
    """Coefficient of z^m in B_{r,a}, straight from the product formula."""
    num = 1
    for i in range(1, m + 1):
        num *= ((2 * i - 1) * r - 2 * (a + 1)) * ((2 * i - 1) * r + 2 * (a + 1))
    return Fraction(num, math.factorial(m)) * Fraction(-1, 16 * r * r) ** m


@settings(max_examples=100)
@given(st.lists(st.integers(0, 6), min_size=0, max_size=5))
def test_invariant_dim_matches_characters(ws):
    assert sl2_invariant_dim(ws) == invariants_by_characters(ws)


def test_invariant_dim_small():
    assert sl2_invariant_dim([]) == 1
    assert sl2_invariant_dim([1, 1]) == 1
    assert sl2_invariant_dim([1, 1, 1, 1]) == 2
    assert sl2_invariant_dim([2, 2, 2]) == 1
    assert sl2_invariant_dim([1]) == 0


@pytest.mark.parametrize("r", range(2, 9))
def test_fusion_symmetric(r):
    for a, b, c in product(range(r - 1), repeat=3):
        n = fusion_coefficient(r, a, b, c)
        assert n in (0, 1)
        assert n == fusion_coefficient(r, b, a, c) == fusion_coefficient(r, c, b, a)


def test_fusion_truncation():
    # level r-2 truncation kills triples with a + b + c > 2(r - 2)
    assert sl2_invariant_dim([1, 1, 2]) == 1
    assert fusion_coefficient(3, 1, 1, 0) == 1
    assert fusion_coefficient(4, 2, 2, 2) == 0
    assert fusion_coefficient(5, 2, 2, 2) == 1


def test_degree():
    assert degree(3, 0, [1, 1, 1, 1]) == 1
    assert degree(5, 1, [1, 2]) == Fraction(3, 5)


@pytest.mark.parametrize("r", range(2, 9))
def test_genus0_three_point(r):
    for a in product(range(r - 1), repeat=3):
        assert witten_integral(r, 0, a) == (1 if sum(a) == r - 2 else 0)
        # the shifted theory's own 3-point values are fusion numbers
        assert rspin_topological_exact(r, 0, a) == fusion_coefficient(r, a[0], a[1], r - 2 - a[2])


def test_three_point_example_sum_two_at_r3():
    # (1, 1, 0) at r = 3 has sum 2 != r - 2, so the value is 0 (unit axiom: eta(e1, e1) = 0)
    assert rspin_topological_exact(3, 0, (1, 1, 0)) == 0
    assert abs(rspin_topological_float(3, 0, (1, 1, 0))) < 1e-12
    assert rspin_topological_exact(3, 0, (1, 0, 0)) == 1


@pytest.mark.parametrize("r", range(3, 9))
def test_four_point(r):
    assert witten_integral(r, 0, (1, 1, r - 2, r - 2)) == Fraction(1, r)


def test_witten_integral_zero_cases():
    # non-integral degree, and psi degree not matching
    assert witten_integral(5, 1, (1, 2)) == 0
    assert witten_integral(4, 1, (2, 2), (0, 0)) == 0


def test_genus_one():
    # degree 0 part at genus one, times psi: topological value times 1/24
    for r in range(2, 7):
        assert witten_integral(r, 1, (0,), (1,)) == Fraction(r - 1, 24)


@pytest.mark.parametrize("r", range(2, 9))
def test_topological_closed_form(r):
    for g in range(3):
        for n in range(1 if g else 3, 4):
            for a in product(range(r - 1), repeat=n):
                exact = float(rspin_topological_exact(r, g, a))
                approx = rspin_topological_float(r, g, a)
                assert math.isclose(exact, approx, rel_tol=1e-9, abs_tol=1e-9)


@pytest.mark.parametrize("r", range(2, 9))
def test_idempotents(r):
    rep = idempotent_check_float(r)
    assert rep["pass"], rep


@pytest.mark.parametrize("r", range(2, 9))
def test_bseries_oracle(r):
    for a in range(r - 1):
        even, odd = bseries(r, a, 6)
        for m in range(7):
            expected = b_series_direct(r, a, m)
            assert (even if m % 2 == 0 else odd)[m] == expected
            assert (odd if m % 2 == 0 else even)[m] == 0


def test_bseries_known():
    even, odd = bseries(3, 0, 2)
    assert odd[1] == Fraction(-5, 144)
    assert even[2] == Fraction(385, 41472)


def test_r2_is_identity():
    R = rspin_rmatrix(2, 6)
    assert all(R[k] == [[Fraction(int(k == 0))]] for k in range(7))


def test_printed_matrices_r3_r4():
    R3 = rspin_rmatrix(3, 3)
    e0, o0 = bseries(3, 0, 3)
    e1, o1 = bseries(3, 1, 3)
    for k in range(4):
        assert R3[k] == [[e0[k], o1[k]], [o0[k], e1[k]]]
    R4 = rspin_rmatrix(4, 3)
    e0, o0 = bseries(4, 0, 3)
    e2, o2 = bseries(4, 2, 3)
    for k in range(4):
        mid = Fraction(int(k == 0))
        assert R4[k] == [[e0[k], 0, o2[k]], [0, mid, 0], [o0[k], 0, e2[k]]]


@pytest.mark.parametrize("r", range(2, 9))
def test_symplectic(r):
    assert rspin_rmatrix(r, 6).is_symplectic(shifted_theory(r).eta)


@pytest.mark.parametrize("r", range(2, 9))
def test_euler_recursion(r):
    rep = euler_commutation_check(r, 6)
    assert rep["pass"], rep


def test_range_errors():
    with pytest.raises(RangeError):
        witten_integral(3, 0, (2, 0, 0))
    with pytest.raises(RangeError):
        shifted_theory(1)
    with pytest.raises(UnstablePair):
        witten_integral(3, 0, (1, 0))
