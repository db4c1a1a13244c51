"""Intersection numbers of psi and kappa classes on the moduli of stable curves.

Conventions: ``kappa_a = p_*(psi_{n+1}^{a+1})`` for the map forgetting the last
marking, so that ``p^* kappa_a = kappa_a - psi_{n+1}^a``.  All functions return
exact :class:`~fractions.Fraction` values and return zero on degree mismatch.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import check_stable

__all__ = [
    "psi_correlator",
    "genus0_psi",
    "forgetful_pushforward",
    "kappa_psi_correlator",
    "set_partitions",
    "integrate_pushforward",
]


def _dfact(k: int) -> int:
    """Double factorial with ``(-1)!! = 1``."""
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def genus0_psi(exponents: Sequence[int]) -> Fraction:
    """Closed form ``(n-3)! / prod a_i!`` on M_{0,n} (zero off-degree)."""
    n = len(exponents)
    check_stable(0, n)
    if sum(exponents) != n - 3 or min(exponents, default=0) < 0:
        return Fraction(0)
    den = 1
    for a in exponents:
        den *= math.factorial(a)
    return Fraction(math.factorial(n - 3), den)


@lru_cache(maxsize=None)
def _dvv(g: int, exps: tuple[int, ...]) -> Fraction:
    # exps is sorted in decreasing order
    n = len(exps)
    if g < 0 or 2 * g - 2 + n <= 0:
        return Fraction(0)
    if any(a < 0 for a in exps) or sum(exps) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0 and n == 3:
        return Fraction(1)
    if g == 1 and n == 1:
        return Fraction(1, 24)
    k = exps[0] - 1  # first insertion is tau_{k+1}
    rest = list(exps[1:])
    total = Fraction(0)
    for j, d in enumerate(rest):
        new = rest.copy()
        new[j] = d + k
        total += Fraction(_dfact(2 * k + 2 * d + 1), _dfact(2 * d - 1)) * _dvv(g, _key(new))
    for r in range(k):
        s = k - 1 - r
        c = Fraction(_dfact(2 * r + 1) * _dfact(2 * s + 1), 2)
        total += c * _dvv(g - 1, _key(rest + [r, s]))
        for size in range(len(rest) + 1):
            for idx in combinations(range(len(rest)), size):
                left = [rest[i] for i in idx]
                right = [rest[i] for i in range(len(rest)) if i not in idx]
                for g1 in range(g + 1):
                    a = _dvv(g1, _key(left + [r]))
                    if a:
                        total += c * a * _dvv(g - g1, _key(right + [s]))
    return total / _dfact(2 * k + 3)


def _key(exps: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(exps, reverse=True))


def psi_correlator(g: int, exponents: Sequence[int]) -> Fraction:
    """``<tau_{a_1} ... tau_{a_n}>_g``, the integral of psi monomials."""
    n = len(exponents)
    check_stable(g, n)
    if g == 0:
        return genus0_psi(exponents)
    return _dvv(g, _key(exponents))


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items`` (blocks keep input order)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def forgetful_pushforward(exponents: Sequence[int]) -> dict[tuple[int, ...], int]:
    """Push forward ``prod_j psi_{n+j}^{k_j}`` along the map forgetting m points.

    Returns a kappa polynomial ``{sorted kappa indices: coefficient}``: a sum
    over set partitions of the forgotten points, each block ``B`` contributing
    ``(|B|-1)! kappa_{sum_{j in B} (k_j - 1)}``.
    """
    if any(k < 1 for k in exponents):
        raise ValueError("forgotten points need psi exponent >= 1")
    out: dict[tuple[int, ...], int] = {}
    for part in set_partitions(list(exponents)):
        coeff = 1
        idx = []
        for block in part:
            coeff *= math.factorial(len(block) - 1)
            idx.append(sum(block) - len(block))
        key = tuple(sorted(idx))
        out[key] = out.get(key, 0) + coeff
    return out


@lru_cache(maxsize=None)
def _kappa_psi(g: int, psi: tuple[int, ...], kappa: tuple[int, ...]) -> Fraction:
    n = len(psi)
    if sum(psi) + sum(kappa) != 3 * g - 3 + n:
        return Fraction(0)
    if not kappa:
        return psi_correlator(g, psi)
    b = kappa[-1]
    rest = kappa[:-1]
    # int X kappa_b = int_{n+1} p^*X psi_{n+1}^{b+1}, using p^*kappa_c = kappa_c - psi_{n+1}^c;
    # pulled-back psi_i agree with psi_i once multiplied by psi_{n+1}.
    total = Fraction(0)
    for size in range(len(rest) + 1):
        for idx in combinations(range(len(rest)), size):
            extra = b + 1 + sum(rest[i] for i in idx)
            remaining = tuple(rest[i] for i in range(len(rest)) if i not in idx)
            term = _kappa_psi(g, _key(psi + (extra,)), remaining)
            total += -term if size % 2 else term
    return total


def kappa_psi_correlator(g: int, psi_exponents: Sequence[int], kappas: Sequence[int] = ()) -> Fraction:
    """``int_{M_{g,n}} prod psi_i^{a_i} prod kappa_{b_j}``."""
    n = len(psi_exponents)
    check_stable(g, n)
    if any(b < 0 for b in kappas):
        raise ValueError("kappa indices must be non-negative")
    return _kappa_psi(g, _key(psi_exponents), tuple(sorted(kappas)))


def integrate_pushforward(g: int, psi_exponents: Sequence[int], forgotten: Sequence[int]) -> Fraction:
    """``int_{M_{g,n}} prod psi^a * p_{m*}(prod psi^k)`` via the kappa route."""
    total = Fraction(0)
    for kappas, c in forgetful_pushforward(forgotten).items():
        total += c * kappa_psi_correlator(g, psi_exponents, kappas)
    return total
