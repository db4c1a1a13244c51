"""Witten's r-spin classes through the shifted theory.

The shifted theory lives on ``V_r = <e_0, ..., e_{r-2}>`` with pairing
``eta_ab = delta_{a+b, r-2}`` and unit ``e_0``.  Its quantum product is the
sl2 Verlinde fusion product at level ``r - 2`` and its R-matrix is built from
the hypergeometric B-series.  ``W^r`` is the degree ``D`` part, so integrals
of ``W^r`` against psi monomials are ordinary reconstructed correlators.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import _linalg as la
from .arith import TruncSeries
from .errors import RangeError, check_stable
from .frobenius import FrobeniusData, RMatrix, topological_correlator
from .reconstruction import Engine, Insertion

__all__ = [
    "sl2_invariant_dim",
    "fusion_coefficient",
    "shifted_theory",
    "degree",
    "rspin_topological_exact",
    "rspin_topological_float",
    "bseries",
    "rspin_rmatrix",
    "witten_integral",
    "idempotent_check_float",
    "euler_commutation_check",
    "euler_field_matrix",
    "degree_operator",
]


def sl2_invariant_dim(weights: Sequence[int]) -> int:
    """Dimension of the invariants in ``rho_{b_1} x ... x rho_{b_n}``.

    ``rho_b`` is the irreducible sl2 representation of highest weight ``b``
    (dimension ``b + 1``); tensor products are decomposed by Clebsch-Gordan.
    """
    if any(b < 0 for b in weights):
        raise RangeError("sl2 weights must be non-negative")
    mult = {0: 1}
    for b in weights:
        nxt: dict[int, int] = {}
        for c, m in mult.items():
            for d in range(abs(c - b), c + b + 1, 2):
                nxt[d] = nxt.get(d, 0) + m
        mult = nxt
    return mult.get(0, 0)


def _check_range(r: int, *idx: int) -> None:
    if r < 2:
        raise RangeError("r must be at least 2")
    for a in idx:
        if not 0 <= a <= r - 2:
            raise RangeError(f"index {a} outside 0..{r - 2}")


def fusion_coefficient(r: int, a: int, b: int, c: int) -> int:
    """Level ``r - 2`` sl2 fusion multiplicity ``N_{abc}`` (0 or 1)."""
    _check_range(r, a, b, c)
    if a + b + c > 2 * r - 4:
        return 0
    return sl2_invariant_dim((a, b, c))


@lru_cache(maxsize=None)
def shifted_theory(r: int) -> FrobeniusData:
    """Topological part of the shifted r-spin theory."""
    _check_range(r)
    d = r - 1
    eta = [[Fraction(int(a + b == r - 2)) for b in range(d)] for a in range(d)]
    three = {}
    for a in range(d):
        for b in range(d):
            for c in range(d):
                # eta(e_a . e_b, e_c) with e_a . e_b = sum_x N_abx e_x
                val = fusion_coefficient(r, a, b, r - 2 - c)
                if val:
                    three[(a, b, c)] = Fraction(val)
    return FrobeniusData(eta, three, 0, tuple(f"e{a}" for a in range(d)))


def degree(r: int, g: int, a: Sequence[int]) -> Fraction:
    """``((r - 2)(g - 1) + sum a_i) / r``; non-integral means ``W^r = 0``."""
    return Fraction((r - 2) * (g - 1) + sum(a), r)


def rspin_topological_exact(r: int, g: int, a: Sequence[int]) -> Fraction:
    _check_range(r, *a)
    check_stable(g, len(a))
    return topological_correlator(shifted_theory(r), g, len(a), list(a))


def rspin_topological_float(r: int, g: int, a: Sequence[int]) -> float:
    _check_range(r, *a)
    n = len(a)
    check_stable(g, n)
    total = 0.0
    for k in range(1, r):
        num = math.prod(math.sin((ai + 1) * k * math.pi / r) for ai in a)
        sign = -1.0 if ((k - 1) * (g - 1)) % 2 else 1.0
        total += sign * num / math.sin(k * math.pi / r) ** (2 * g - 2 + n)
    return (r / 2) ** (g - 1) * total


def bseries(r: int, a: int, order: int) -> tuple[TruncSeries, TruncSeries]:
    """Even and odd parts of the hypergeometric series ``B_{r,a}`` through ``z^order``."""
    _check_range(r, a)
    coeffs = [Fraction(1)]
    step = Fraction(-1, 16 * r * r)
    for m in range(1, order + 1):
        i = m
        factor = Fraction(((2 * i - 1) * r - 2 * (a + 1)) * ((2 * i - 1) * r + 2 * (a + 1)), i)
        coeffs.append(coeffs[-1] * factor * step)
    series = TruncSeries(coeffs, order)
    return series.even_part(), series.odd_part()


@lru_cache(maxsize=None)
def rspin_rmatrix(r: int, order: int) -> RMatrix:
    """Diagonal entries ``Be_{r,a}``, anti-diagonal entries ``Bo_{r,a}`` (column ``a``)."""
    _check_range(r)
    d = r - 1
    mats = [la.zeros(d, d) for _ in range(order + 1)]
    for a in range(d):
        even, odd = bseries(r, a, order)
        for k in range(order + 1):
            if k % 2 == 0:
                mats[k][a][a] = even[k]
            else:
                mats[k][r - 2 - a][a] = odd[k]
    return RMatrix(mats, order)


_engines: dict[int, Engine] = {}


def _engine(r: int, order: int) -> Engine:
    eng = _engines.get(r)
    if eng is None or eng.order < order:
        eng = Engine(shifted_theory(r), rspin_rmatrix(r, max(order, 1)))
        _engines[r] = eng
    return eng


def witten_integral(r: int, g: int, a: Sequence[int], psi: Sequence[int] | None = None, *, jobs: int = 1) -> Fraction:
    """``int_{M_{g,n}} W^r_{g,n}(a) prod psi_i^{b_i}``.

    Zero unless the degree is an integer and ``D + sum b = 3g - 3 + n``.
    """
    n = len(a)
    check_stable(g, n)
    _check_range(r, *a)
    psi = tuple(psi) if psi is not None else (0,) * n
    if len(psi) != n:
        raise ValueError("need one psi exponent per marking")
    D = degree(r, g, a)
    dim = 3 * g - 3 + n
    if D.denominator != 1 or D + sum(psi) != dim or D < 0:
        return Fraction(0)
    F = shifted_theory(r)
    ins = [Insertion(F.basis_vector(ai), bi) for ai, bi in zip(a, psi)]
    return _engine(r, dim).correlator(g, ins, jobs=jobs)


def idempotent_check_float(r: int, tol: float = 1e-9) -> dict:
    """Check the sine-formula idempotents against the exact fusion constants."""
    F = shifted_theory(r)
    d = r - 1
    c = [[[float(x) for x in row] for row in plane] for plane in F.structure_constants]
    eta = [[float(x) for x in row] for row in F.eta]
    vs = [
        [math.sqrt(2 / r) * math.sin((a + 1) * k * math.pi / r) for a in range(d)]
        for k in range(1, r)
    ]

    def prod(u, v):
        out = [0.0] * d
        for i in range(d):
            for j in range(d):
                for l in range(d):
                    out[l] += u[i] * v[j] * c[i][j][l]
        return out

    worst_pair = 0.0
    worst_prod = 0.0
    for k, vk in enumerate(vs, start=1):
        for l, vl in enumerate(vs, start=1):
            pair = sum(vk[i] * eta[i][j] * vl[j] for i in range(d) for j in range(d))
            expect = (-1.0) ** (k - 1) if k == l else 0.0
            worst_pair = max(worst_pair, abs(pair - expect))
            p = prod(vk, vl)
            scale = math.sqrt(r / 2) / math.sin(k * math.pi / r) if k == l else 0.0
            worst_prod = max(worst_prod, max(abs(x - scale * y) for x, y in zip(p, vk)))
    return {
        "r": r,
        "pairing_error": worst_pair,
        "product_error": worst_prod,
        "pass": worst_pair <= tol and worst_prod <= tol,
    }


def euler_field_matrix(r: int) -> list[list[Fraction]]:
    d = r - 1
    return [[Fraction(2 if a + b == r - 2 else 0) for b in range(d)] for a in range(d)]


def degree_operator(r: int) -> list[list[Fraction]]:
    d = r - 1
    return [
        [Fraction(-(r - 2) + 2 * a, 2 * r) if a == b else Fraction(0) for b in range(d)] for a in range(d)
    ]


def euler_commutation_check(r: int, order: int) -> dict:
    """Exact check of the Euler-field recursion for ``m < order``.

    With matrices acting on column vectors the recursion reads
    ``[R_{m+1}, xi] = R_m (m - mu)``.
    """
    R = rspin_rmatrix(r, order)
    xi = euler_field_matrix(r)
    mu = degree_operator(r)
    d = r - 1
    failures = []
    for m in range(order):
        lhs = la.matadd(la.matmul(R[m + 1], xi), la.matmul(xi, R[m + 1]), -1)
        shift = la.matadd(la.scale(la.identity(d), m), mu, -1)
        rhs = la.matmul(R[m], shift)
        if any(x != y for rx, ry in zip(lhs, rhs) for x, y in zip(rx, ry)):
            failures.append(m)
    return {"r": r, "order": order, "failures": failures, "pass": not failures}
