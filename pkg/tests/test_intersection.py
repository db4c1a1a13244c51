import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohft.errors import UnstablePair
from cohft.intersection import (
    forgetful_pushforward,
    genus0_psi,
    integrate_pushforward,
    kappa_psi_correlator,
    psi_correlator,
    set_partitions,
)


def _compositions(total, n):
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, n - 1):
            yield (first,) + rest


def _all_exponents(g, n):
    return list(_compositions(3 * g - 3 + n, n))


def test_known_values():
    assert psi_correlator(0, [0, 0, 0]) == 1
    assert psi_correlator(1, [1]) == Fraction(1, 24)
    assert psi_correlator(2, [4]) == Fraction(1, 1152)
    assert psi_correlator(2, [3, 2]) == Fraction(29, 5760)
    assert psi_correlator(2, [4, 1]) == Fraction(1, 384)
    assert psi_correlator(3, [7]) == Fraction(1, 82944)


@pytest.mark.parametrize("g", range(1, 6))
def test_one_point_closed_form(g):
    assert psi_correlator(g, [3 * g - 2]) == Fraction(1, 24**g * math.factorial(g))


@pytest.mark.parametrize("n", range(3, 9))
def test_genus0_multinomial(n):
    for exps in _all_exponents(0, n):
        expected = Fraction(math.factorial(n - 3), math.prod(math.factorial(a) for a in exps))
        assert psi_correlator(0, exps) == expected == genus0_psi(exps)


def test_genus1_closed_form():
    # <tau_1^n>_1 = (n-1)!/24
    for n in range(1, 7):
        assert psi_correlator(1, [1] * n) == Fraction(math.factorial(n - 1), 24)


@settings(max_examples=60)
@given(st.integers(0, 3), st.integers(1, 4), st.data())
def test_dilaton_equation(g, n, data):
    if 2 * g - 2 + n <= 0:
        return
    exps = data.draw(st.sampled_from(_all_exponents(g, n)))
    assert psi_correlator(g, list(exps) + [1]) == (2 * g - 2 + n) * psi_correlator(g, exps)


@settings(max_examples=60)
@given(st.integers(0, 3), st.integers(1, 4), st.data())
def test_string_equation(g, n, data):
    if 2 * g - 2 + n <= 0:
        return
    exps = data.draw(st.sampled_from(list(_compositions(3 * g - 2 + n, n))))
    rhs = Fraction(0)
    for j in range(n):
        if exps[j]:
            lowered = list(exps)
            lowered[j] -= 1
            rhs += psi_correlator(g, lowered)
    assert psi_correlator(g, list(exps) + [0]) == rhs


def test_degree_mismatch_is_zero():
    assert psi_correlator(1, [2]) == 0
    assert kappa_psi_correlator(1, [0], [0]) == 0


def test_unstable():
    with pytest.raises(UnstablePair):
        psi_correlator(0, [0, 0])
    with pytest.raises(UnstablePair):
        psi_correlator(1, [])


def test_kappa_single_is_a_pushforward():
    # a single kappa_a is the pushforward of psi_{n+1}^{a+1}, with no correction
    for g, n in [(0, 4), (0, 5), (1, 1), (1, 2), (2, 1)]:
        for a in range(1, 3 * g - 3 + n + 1):
            for exps in _compositions(3 * g - 3 + n - a, n):
                assert kappa_psi_correlator(g, exps, [a]) == psi_correlator(g, list(exps) + [a + 1])


def test_kappa_pair_inverse_formula():
    # kappa_a kappa_b = pi_*(psi^{a+1} psi^{b+1}) - kappa_{a+b}
    for g, n in [(0, 5), (0, 6), (1, 2), (1, 3), (2, 1)]:
        dim = 3 * g - 3 + n
        for a in range(1, dim):
            for b in range(1, dim - a + 1):
                for exps in _compositions(dim - a - b, n):
                    lhs = kappa_psi_correlator(g, exps, [a, b])
                    rhs = psi_correlator(g, list(exps) + [a + 1, b + 1]) - psi_correlator(g, list(exps) + [a + b + 1])
                    assert lhs == rhs


def test_kappa_known_values():
    assert kappa_psi_correlator(0, [0] * 5, [1, 1]) == 5
    assert kappa_psi_correlator(1, [0], [1]) == Fraction(1, 24)
    assert kappa_psi_correlator(0, [0] * 4, [1]) == 1


def test_set_partitions_bell_numbers():
    bell = [1, 1, 2, 5, 15, 52, 203]
    for k, b in enumerate(bell):
        parts = list(set_partitions(list(range(k))))
        assert len(parts) == b
        assert len({tuple(tuple(x) for x in p) for p in parts}) == b


def test_forgetful_pushforward_two_points():
    # pi_*(psi_a^{k1} psi_b^{k2}) = kappa_{k1-1} kappa_{k2-1} + kappa_{k1+k2-2}
    assert forgetful_pushforward([2, 3]) == {(1, 2): 1, (3,): 1}
    assert forgetful_pushforward([2, 2]) == {(1, 1): 1, (2,): 1}


def test_integrate_pushforward_matches_direct_integral():
    # integrating the pushforward equals integrating on the bigger space
    for g, n in [(0, 3), (0, 4), (1, 1), (1, 2)]:
        for forgotten in ([1], [2], [1, 1], [2, 1], [1, 1, 1]):
            m = len(forgotten)
            total = 3 * g - 3 + n + m - sum(forgotten)
            if total < 0:
                continue
            for exps in _compositions(total, n):
                assert integrate_pushforward(g, exps, forgotten) == psi_correlator(g, list(exps) + forgotten)
