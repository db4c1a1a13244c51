from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cohft.errors import NonSymplectic, SingularPairing
from cohft.frobenius import (
    FrobeniusData,
    RMatrix,
    edge_kernel,
    hodge_rmatrix,
    quantum_product,
    topological_correlator,
    trivial_theory,
    unit_translation,
)
from cohft.rspin import rspin_rmatrix, shifted_theory
from cohft.verlinde import fusion_data


def test_trivial_theory():
    F = trivial_theory()
    F.check()
    assert topological_correlator(F, 3, 2, [0, 0]) == 1


@pytest.mark.parametrize("r", range(2, 9))
def test_shifted_theory_is_frobenius(r):
    F = shifted_theory(r)
    F.check()
    assert F.is_associative()


@pytest.mark.parametrize("level", range(1, 4))
def test_fusion_data_is_frobenius(level):
    fusion_data(level).check()


def test_topological_correlator_closed_form():
    # semisimple with idempotents of norm 1/lambda_i gives sum_i lambda_i^{g-1}
    F = FrobeniusData(
        [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]],
        {(0, 0, 0): Fraction(1), (0, 1, 1): Fraction(1), (1, 0, 1): Fraction(1), (1, 1, 0): Fraction(1)},
        0,
    )
    # Z/2 group algebra: e_1^2 = e_0; idempotents (e_0 +- e_1)/2 with norm 1/2
    for g in range(4):
        assert topological_correlator(F, g, 3, [0, 0, 0]) == 2**g
        assert topological_correlator(F, g, 3, [1, 1, 0]) == 2**g
        assert topological_correlator(F, g, 3, [1, 0, 0]) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 3), st.data())
def test_decompositions_agree(r, g, data):
    F = shifted_theory(r)
    n = data.draw(st.integers(1 if g else 3, 5))
    idx = data.draw(st.lists(st.integers(0, r - 2), min_size=n, max_size=n))
    a = topological_correlator(F, g, n, idx, decomposition="caterpillar")
    b = topological_correlator(F, g, n, idx, decomposition="balanced")
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.data())
def test_correlator_symmetry(r, data):
    F = shifted_theory(r)
    idx = data.draw(st.lists(st.integers(0, r - 2), min_size=4, max_size=4))
    perm = data.draw(st.permutations(idx))
    assert topological_correlator(F, 1, 4, idx) == topological_correlator(F, 1, 4, perm)


def test_quantum_product_unit():
    F = shifted_theory(5)
    for i in range(F.dim):
        v = F.basis_vector(i)
        assert quantum_product(F, F.unit_vector, v) == v


def test_singular_pairing_rejected():
    with pytest.raises(SingularPairing):
        FrobeniusData([[Fraction(0)]], {(0, 0, 0): Fraction(1)}, 0).check()


def test_broken_unit_rejected():
    F = FrobeniusData([[Fraction(1)]], {(0, 0, 0): Fraction(2)}, 0)
    with pytest.raises(ValueError):
        F.check()


def test_frobenius_json_round_trip():
    F = shifted_theory(4)
    G = FrobeniusData.from_json(F.to_json())
    assert G.eta == F.eta and G.three_point == F.three_point and G.unit == F.unit


def test_hodge_rmatrix_oracle():
    z = sympy.Symbol("z")
    expo = -sum(sympy.bernoulli(2 * k) / (2 * k * (2 * k - 1)) * z ** (2 * k - 1) for k in range(1, 5))
    expected = sympy.series(sympy.exp(expo), z, 0, 8).removeO()
    R = hodge_rmatrix(7)
    for k in range(8):
        assert R[k][0][0] == Fraction(str(expected.coeff(z, k)))
    assert [R[k][0][0] for k in range(3)] == [1, Fraction(-1, 12), Fraction(1, 288)]


@pytest.mark.parametrize("r", range(2, 9))
def test_rspin_symplectic(r):
    assert rspin_rmatrix(r, 6).is_symplectic(shifted_theory(r).eta)


def test_nonsymplectic_detected():
    R = RMatrix([[[Fraction(1)]], [[Fraction(1)]], [[Fraction(0)]]], 2)
    assert not R.is_symplectic([[Fraction(1)]])
    with pytest.raises(NonSymplectic):
        edge_kernel(R, [[Fraction(1)]])


def test_edge_kernel_identity():
    # (z + w) Delta(z, w) = eta^{-1} - R(z) eta^{-1} R(w)^T through the known order
    r = 4
    F = shifted_theory(r)
    R = rspin_rmatrix(r, 5)
    K = edge_kernel(R, F.eta)
    ei = F.eta_inv
    d = F.dim

    def mul(A, B):
        return [[sum(A[i][k] * B[k][j] for k in range(d)) for j in range(d)] for i in range(d)]

    def T(A):
        return [list(x) for x in zip(*A)]

    zero = [[Fraction(0)] * d for _ in range(d)]
    for k in range(R.order + 1):
        for l in range(R.order + 1 - k):
            lhs = [[Fraction(0)] * d for _ in range(d)]
            for kk, ll in ((k - 1, l), (k, l - 1)):
                if kk >= 0 and ll >= 0:
                    m = K[(kk, ll)] or zero
                    lhs = [[a + b for a, b in zip(x, y)] for x, y in zip(lhs, m)]
            rhs = mul(mul(R[k], ei), T(R[l]))
            rhs = [[-x for x in row] for row in rhs]
            if k == l == 0:
                rhs = [[a + b for a, b in zip(x, y)] for x, y in zip(rhs, ei)]
            assert lhs == rhs


def test_unit_translation():
    R = hodge_rmatrix(4)
    T = unit_translation(R, [Fraction(1)])
    assert T[2] == [Fraction(1, 12)]
    assert T[3] == [Fraction(-1, 288)]
    assert all(T[k] == [-R[k - 1][0][0]] for k in T)
    assert 0 not in T and 1 not in T


def test_rmatrix_json_round_trip():
    R = rspin_rmatrix(3, 4)
    S = RMatrix.from_json(R.to_json())
    assert S.coeffs == R.coeffs and S.order == R.order
