"""Fock-space model of the equivariant quantum cohomology of Hilb^m(C^2).

States are kept in the power-sum basis ``p_mu = prod alpha_{-mu_i} |0>``;
the Nakajima basis is ``|mu> = p_mu / z(mu)``.  Annihilators act by
``alpha_k p_mu = k m_k(mu) p_{mu - k}`` for ``k > 0``.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from typing import Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from .arith import POLY_RING, RationalFunction
from .errors import SizeMismatch

__all__ = [
    "partitions",
    "z_factor",
    "fock_inner",
    "md_matrix",
    "md_apply",
    "three_point_series",
    "is_self_adjoint",
    "semisimplicity_witness",
    "c_coefficient",
]

Partition = tuple[int, ...]


@lru_cache(maxsize=None)
def partitions(m: int) -> tuple[Partition, ...]:
    """Partitions of ``m`` in reverse-lexicographic order: ``(m), ..., (1^m)``."""

    def gen(n, largest):
        if n == 0:
            yield ()
            return
        for k in range(min(n, largest), 0, -1):
            for rest in gen(n - k, k):
                yield (k,) + rest

    return tuple(gen(m, m))


def _normalize(mu: Sequence[int]) -> Partition:
    mu = tuple(sorted((int(x) for x in mu), reverse=True))
    if any(x <= 0 for x in mu):
        raise ValueError("partition parts must be positive")
    return mu


def z_factor(mu: Sequence[int]) -> int:
    """``z(mu) = |Aut(mu)| prod mu_i``."""
    out = 1
    for k, m in Counter(mu).items():
        out *= math.factorial(m) * k**m
    return out


def fock_inner(mu: Sequence[int], nu: Sequence[int]) -> RationalFunction:
    mu, nu = _normalize(mu), _normalize(nu)
    if sum(mu) != sum(nu):
        raise SizeMismatch(f"|{mu}| != |{nu}|")
    if mu != nu:
        return RationalFunction(0)
    t1, t2, _ = RationalFunction.gens()
    sign = -1 if (sum(mu) - len(mu)) % 2 else 1
    return sign / ((t1 * t2) ** len(mu) * z_factor(mu))


def c_coefficient(k: int) -> RationalFunction:
    """``((-q)^k + 1) / ((-q)^k - 1)``."""
    _, _, q = RationalFunction.gens()
    x = (-q) ** k
    return (x + 1) / (x - 1)


def _remove(mu: Partition, k: int) -> Partition:
    out = list(mu)
    out.remove(k)
    return tuple(out)


def _add(mu: Partition, *ks: int) -> Partition:
    return tuple(sorted(mu + ks, reverse=True))


def _md_power_sum(mu: Partition) -> dict[Partition, RationalFunction]:
    """``M_D p_mu`` in the power-sum basis."""
    t1, t2, _ = RationalFunction.gens()
    out: dict[Partition, RationalFunction] = {}

    def add(key, val):
        out[key] = out.get(key, RationalFunction(0)) + val

    mult = Counter(mu)
    # diagonal part: alpha_{-k} alpha_k p_mu = k m_k p_mu, and |.| = sum of parts
    diag = RationalFunction(0)
    for k, m in mult.items():
        diag = diag + c_coefficient(k) * (k * k * m) / 2
    diag = diag - c_coefficient(1) * sum(mu) / 2
    add(mu, (t1 + t2) * diag)
    # t1 t2 alpha_{k+l} alpha_{-k} alpha_{-l} = t1 t2 alpha_{-k} alpha_{-l} alpha_{k+l}: split a part
    for s, m in mult.items():
        rest = _remove(mu, s)
        for k in range(1, s):
            add(_add(rest, k, s - k), t1 * t2 * (s * m) / 2)
    # - alpha_{-k-l} alpha_k alpha_l: join two parts
    for k in mult:
        for l in mult:
            if k == l:
                weight = k * mult[k] * k * (mult[k] - 1)
            else:
                weight = k * mult[k] * l * mult[l]
            if weight:
                add(_add(_remove(_remove(mu, k), l), k + l), RationalFunction(-weight) / 2)
    return {key: v for key, v in out.items() if v != 0}


def md_apply(vector: dict) -> dict:
    """Apply ``M_D`` to ``{partition: coefficient}`` in the Nakajima basis."""
    out: dict[Partition, RationalFunction] = {}
    for mu, c in vector.items():
        mu = _normalize(mu)
        for nu, v in _md_power_sum(mu).items():
            val = c * v * z_factor(nu) / z_factor(mu)
            out[nu] = out.get(nu, RationalFunction(0)) + val
    return {k: v for k, v in out.items() if v != 0}


@lru_cache(maxsize=None)
def md_matrix(m: int) -> tuple[tuple[RationalFunction, ...], ...]:
    """``M[i][j]`` = coefficient of ``|partitions(m)[i]>`` in ``M_D |partitions(m)[j]>``."""
    if m < 1:
        raise ValueError("m must be positive")
    basis = partitions(m)
    cols = [md_apply({mu: RationalFunction(1)}) for mu in basis]
    return tuple(tuple(col.get(nu, RationalFunction(0)) for col in cols) for nu in basis)


def three_point_series(mu1: Sequence[int], mu2: Sequence[int]) -> RationalFunction:
    """``<mu1 | M_D | mu2>``, the generating series of 3-point invariants."""
    mu1, mu2 = _normalize(mu1), _normalize(mu2)
    if sum(mu1) != sum(mu2):
        raise SizeMismatch(f"|{mu1}| != |{mu2}|")
    m = sum(mu1)
    basis = partitions(m)
    M = md_matrix(m)
    return M[basis.index(mu1)][basis.index(mu2)] * fock_inner(mu1, mu1)


def is_self_adjoint(m: int) -> bool:
    basis = partitions(m)
    M = md_matrix(m)
    norms = [fock_inner(mu, mu) for mu in basis]
    n = len(basis)
    return all(M[i][j] * norms[i] == M[j][i] * norms[j] for i in range(n) for j in range(n))


@lru_cache(maxsize=None)
def semisimplicity_witness(m: int) -> RationalFunction:
    """Discriminant of the characteristic polynomial of ``M_D`` on ``F_m``.

    Denominators are cleared by their lcm ``L``; scaling an ``n x n`` matrix
    by ``L`` scales the discriminant of its characteristic polynomial by
    ``L^{n(n-1)}``.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    M = md_matrix(m)
    n = len(M)
    L = POLY_RING.one
    for row in M:
        for v in row:
            L = L.lcm(v.denom)
    scaled = [[v.numer * (L.exquo(v.denom)) for v in row] for row in M]
    coeffs = DomainMatrix(scaled, (n, n), POLY_RING.to_domain()).charpoly()
    P = ring("x,t1,t2,q", QQ)[0]
    f = P.zero
    for i, c in enumerate(coeffs):
        f += P.from_dict({(n - i,) + exp: v for exp, v in c.terms()})
    # the discriminant lives in Q[t1, t2, q]: x is eliminated
    disc = POLY_RING.from_dict(dict(f.discriminant().terms()))
    return RationalFunction.from_polys(disc, L ** (n * (n - 1)))
