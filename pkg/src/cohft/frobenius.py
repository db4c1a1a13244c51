"""Frobenius data, R-matrices and the pieces of the reconstruction formula.

A CohFT with unit is fixed by a :class:`FrobeniusData` (its topological part)
and an :class:`RMatrix`.  Matrices act on column vectors: ``R[k][nu][mu]`` is
the coefficient of ``e_nu`` in ``R_k e_mu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Mapping, Sequence

from . import _linalg as la
from .arith import TruncSeries, bernoulli, rational_to_str, series_divide_bivariate
from .errors import NonDivisible, NonSymplectic, SingularPairing, check_stable

__all__ = [
    "FrobeniusData",
    "RMatrix",
    "EdgeKernel",
    "quantum_product",
    "topological_correlator",
    "edge_kernel",
    "unit_translation",
    "hodge_rmatrix",
    "trivial_theory",
]


@dataclass(frozen=True, eq=False)
class FrobeniusData:
    """Pairing, 3-point values and unit of a 2D TQFT.

    ``three_point[(i, j, k)]`` is the genus-0 value on ``e_i, e_j, e_k``;
    missing keys are zero and the dict must be totally symmetric.
    """

    eta: tuple[tuple, ...]
    three_point: Mapping[tuple[int, int, int], object]
    unit: int
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(tuple(r) for r in self.eta))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(self.dim)))
        tp = {k: v for k, v in self.three_point.items() if v != 0}
        object.__setattr__(self, "three_point", tp)

    @property
    def dim(self) -> int:
        return len(self.eta)

    @cached_property
    def eta_inv(self) -> list[list]:
        return la.inverse([list(r) for r in self.eta])

    def basis_vector(self, i: int) -> list:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    @cached_property
    def unit_vector(self) -> list:
        return self.basis_vector(self.unit)

    @cached_property
    def structure_constants(self) -> list[list[list]]:
        """``c[i][j]`` is the coordinate vector of ``e_i . e_j``."""
        d = self.dim
        ei = self.eta_inv
        c = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
        for (i, j, k), val in self.three_point.items():
            row = c[i][j]
            for l in range(d):
                if ei[k][l] != 0:
                    row[l] = row[l] + val * ei[k][l]
        return c

    @cached_property
    def multiplication_matrices(self) -> list[list[list]]:
        """``L[i]`` is the matrix of multiplication by ``e_i``."""
        c = self.structure_constants
        d = self.dim
        return [[[c[i][j][l] for j in range(d)] for l in range(d)] for i in range(d)]

    def product(self, u: Sequence, v: Sequence) -> list:
        d = self.dim
        c = self.structure_constants
        out = [Fraction(0)] * d
        for i in range(d):
            if u[i] == 0:
                continue
            for j in range(d):
                if v[j] == 0:
                    continue
                uv = u[i] * v[j]
                for l, x in enumerate(c[i][j]):
                    if x != 0:
                        out[l] = out[l] + uv * x
        return out

    def pairing(self, u: Sequence, v: Sequence):
        acc = Fraction(0)
        for i in range(self.dim):
            if u[i] == 0:
                continue
            for j in range(self.dim):
                if v[j] != 0 and self.eta[i][j] != 0:
                    acc = acc + u[i] * self.eta[i][j] * v[j]
        return acc

    def counit(self, u: Sequence):
        """``eta(u, 1)``, equal to the genus-0 value ``omega_{0,3}(u, 1, 1)``."""
        return self.pairing(u, self.unit_vector)

    @cached_property
    def handle(self) -> list:
        """``sum eta^{jk} e_j . e_k``; gluing a handle multiplies by this element."""
        d = self.dim
        ei = self.eta_inv
        out = [Fraction(0)] * d
        for j in range(d):
            for k in range(d):
                if ei[j][k] != 0:
                    ejk = self.product(self.basis_vector(j), self.basis_vector(k))
                    out = [a + ei[j][k] * b for a, b in zip(out, ejk)]
        return out

    def handle_power(self, g: int) -> list:
        return _handle_power(self, g)

    # -- checks ----------------------------------------------------------
    def check(self) -> None:
        """Raise if any invariant of a TQFT with unit fails."""
        d = self.dim
        for i in range(d):
            for j in range(d):
                if self.eta[i][j] != self.eta[j][i]:
                    raise ValueError("pairing is not symmetric")
        self.eta_inv  # raises SingularPairing
        for (i, j, k), v in self.three_point.items():
            for p in ((i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)):
                if self.three_point.get(p, 0) != v:
                    raise ValueError(f"three-point values not symmetric at {(i, j, k)}")
        for i in range(d):
            for j in range(d):
                if self.three_point.get((i, j, self.unit), 0) != self.eta[i][j]:
                    raise ValueError("unit axiom omega_{0,3}(a, b, 1) = eta(a, b) fails")
        if not self.is_associative():
            raise ValueError("quantum product is not associative")

    def is_associative(self) -> bool:
        d = self.dim
        e = [self.basis_vector(i) for i in range(d)]
        for i, j, k in product(range(d), repeat=3):
            lhs = self.product(self.product(e[i], e[j]), e[k])
            rhs = self.product(e[i], self.product(e[j], e[k]))
            if any(a != b for a, b in zip(lhs, rhs)):
                return False
        return True

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "eta": [[rational_to_str(x) for x in row] for row in self.eta],
            "threePoint": {
                f"{i},{j},{k}": rational_to_str(v) for (i, j, k), v in sorted(self.three_point.items())
            },
            "unit": self.unit,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FrobeniusData":
        eta = [[Fraction(x) for x in row] for row in data["eta"]]
        if len(eta) != data["dim"]:
            raise ValueError("dim does not match the pairing")
        tp = {}
        for key, v in data["threePoint"].items():
            i, j, k = (int(x) for x in key.split(","))
            tp[(i, j, k)] = Fraction(v)
        return cls(eta, tp, int(data["unit"]))


_handle_cache: dict = {}


def _handle_power(F: FrobeniusData, g: int) -> list:
    key = (id(F), g)
    hit = _handle_cache.get(key)
    if hit is not None and hit[0] is F:
        return hit[1]
    out = F.unit_vector
    for _ in range(g):
        out = F.product(out, F.handle)
    _handle_cache[key] = (F, out)
    return out


def quantum_product(F: FrobeniusData, u: Sequence, v: Sequence) -> list:
    """The unique ``w`` with ``eta(w, e_k) = omega_{0,3}(u, v, e_k)``."""
    return F.product(u, v)


def topological_correlator(
    F: FrobeniusData,
    g: int,
    n: int,
    indices: Sequence[int] | None = None,
    *,
    vectors: Sequence[Sequence] | None = None,
    decomposition: str = "caterpillar",
):
    """``omega_{g,n}`` on basis vectors (or arbitrary coordinate vectors).

    ``caterpillar`` glues a chain of trivalent genus-0 vertices and closes
    ``g`` self-loops, i.e. ``eps(v_1 ... v_n H^g)``.  ``balanced`` instead
    splits the legs in halves recursively and removes handles one at a time;
    both must agree.
    """
    check_stable(g, n)
    if vectors is None:
        if indices is None or len(indices) != n:
            raise ValueError("need exactly n basis indices")
        vectors = [F.basis_vector(i) for i in indices]
    elif len(vectors) != n:
        raise ValueError("need exactly n vectors")
    if decomposition == "caterpillar":
        acc = F.handle_power(g)
        for v in vectors:
            acc = F.product(acc, v)
        return F.counit(acc)
    if decomposition == "balanced":
        return _balanced(F, g, [list(v) for v in vectors])
    raise ValueError(f"unknown decomposition {decomposition!r}")


def _balanced(F: FrobeniusData, g: int, vecs: list):
    d = F.dim
    ei = F.eta_inv
    if g > 0:
        total = Fraction(0)
        for j in range(d):
            for k in range(d):
                if ei[j][k] != 0:
                    total = total + ei[j][k] * _balanced(
                        F, g - 1, vecs + [F.basis_vector(j), F.basis_vector(k)]
                    )
        return total
    n = len(vecs)
    if n == 3:
        acc = Fraction(0)
        for (i, j, k), val in F.three_point.items():
            c = vecs[0][i] * vecs[1][j] * vecs[2][k]
            if c != 0:
                acc = acc + c * val
        return acc
    half = n // 2
    left, right = vecs[:half], vecs[half:]
    total = Fraction(0)
    for j in range(d):
        for k in range(d):
            if ei[j][k] == 0:
                continue
            a = _balanced_or_pair(F, left + [F.basis_vector(j)])
            if a == 0:
                continue
            total = total + ei[j][k] * a * _balanced_or_pair(F, [F.basis_vector(k)] + right)
    return total


def _balanced_or_pair(F, vecs):
    if len(vecs) == 2:
        # a 2-valent genus-0 piece is just the pairing (unit insertion)
        return F.pairing(vecs[0], vecs[1])
    return _balanced(F, 0, vecs)


# ---------------------------------------------------------------------------
# R-matrices


class RMatrix:
    """Truncated series ``R(z) = Id + R_1 z + ... + R_N z^N`` of d x d matrices."""

    def __init__(self, coeffs: Sequence[Sequence[Sequence]], order: int | None = None):
        mats = [[list(r) for r in m] for m in coeffs]
        if order is None:
            order = len(mats) - 1
        d = len(mats[0])
        while len(mats) < order + 1:
            mats.append(la.zeros(d, d))
        self.coeffs = mats[: order + 1]
        self.order = order
        self.dim = d
        if any(x != y for rx, ry in zip(self.coeffs[0], la.identity(d)) for x, y in zip(rx, ry)):
            raise ValueError("R_0 must be the identity")

    @classmethod
    def identity(cls, d: int, order: int) -> "RMatrix":
        return cls([la.identity(d)], order)

    @classmethod
    def diagonal(cls, series: Sequence[TruncSeries]) -> "RMatrix":
        d = len(series)
        order = series[0].order
        mats = []
        for k in range(order + 1):
            m = la.zeros(d, d)
            for i, s in enumerate(series):
                m[i][i] = s[k]
            mats.append(m)
        return cls(mats, order)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def entry(self, row: int, col: int) -> TruncSeries:
        return TruncSeries([m[row][col] for m in self.coeffs], self.order)

    def truncate(self, order: int) -> "RMatrix":
        if order > self.order:
            raise ValueError("cannot raise the truncation order of an R-matrix")
        return RMatrix(self.coeffs[: order + 1], order)

    def adjoint(self, eta) -> "RMatrix":
        """Adjoint with respect to the pairing: ``eta^{-1} R^T eta``."""
        eta = [list(r) for r in eta]
        ei = la.inverse(eta)
        return RMatrix([la.matmul(la.matmul(ei, la.transpose(m)), eta) for m in self.coeffs], self.order)

    def symplectic_residual(self, eta) -> list:
        """Coefficients of ``R(z) eta^{-1} R(-z)^T - eta^{-1}`` through the order."""
        ei = la.inverse([list(r) for r in eta])
        out = []
        for k in range(self.order + 1):
            acc = la.zeros(self.dim, self.dim)
            for a in range(k + 1):
                b = k - a
                term = la.matmul(la.matmul(self.coeffs[a], ei), la.transpose(self.coeffs[b]))
                acc = la.matadd(acc, term, -1 if b % 2 else 1)
            if k == 0:
                acc = la.matadd(acc, ei, -1)
            out.append(acc)
        return out

    def is_symplectic(self, eta) -> bool:
        return all(la.is_zero_matrix(m) for m in self.symplectic_residual(eta))

    def apply(self, k: int, v: Sequence) -> list:
        return la.matvec(self.coeffs[k], v)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "R": [[[rational_to_str(x) for x in row] for row in m] for m in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RMatrix":
        mats = [[[Fraction(x) for x in row] for row in m] for m in data["R"]]
        return cls(mats, int(data["order"]))


@dataclass(frozen=True)
class EdgeKernel:
    """``Delta[(k, l)]``: coefficient matrix of ``z^k w^l`` in
    ``(eta^{-1} - R(z) eta^{-1} R(w)^T) / (z + w)``, for ``k + l <= order``."""

    coeffs: Mapping[tuple[int, int], list]
    order: int
    dim: int

    def __getitem__(self, kl: tuple[int, int]) -> list | None:
        return self.coeffs.get(kl)


def edge_kernel(R: RMatrix, eta) -> EdgeKernel:
    """Divide the edge numerator by ``z + w``.

    With ``R`` known through ``z^N`` the numerator is exact through total
    degree ``N``, so the kernel is returned through total degree ``N - 1``.
    """
    d = R.dim
    ei = la.inverse([list(r) for r in eta])
    N = R.order
    RT = [la.transpose(m) for m in R.coeffs]
    num_entries: dict[tuple[int, int], dict] = {(mu, nu): {} for mu in range(d) for nu in range(d)}
    for i in range(N + 1):
        left = la.matmul(R.coeffs[i], ei)
        for j in range(N + 1 - i):
            m = la.matmul(left, RT[j])
            for mu in range(d):
                for nu in range(d):
                    val = -m[mu][nu]
                    if i == 0 and j == 0:
                        val = val + ei[mu][nu]
                    if val != 0:
                        num_entries[(mu, nu)][(i, j)] = val
    out: dict[tuple[int, int], list] = {}
    for (mu, nu), num in num_entries.items():
        try:
            q = series_divide_bivariate(num)
        except NonDivisible as exc:
            raise NonSymplectic(f"edge numerator not divisible by z + w: {exc}") from exc
        for (k, l), c in q.items():
            if k + l <= N - 1:
                out.setdefault((k, l), la.zeros(d, d))[mu][nu] = c
    return EdgeKernel(out, max(N - 1, 0), d)


def unit_translation(R: RMatrix, unit: Sequence) -> dict[int, list]:
    """``T(z) = z (Id - R(z)) 1``; returns ``{k: T_k}`` for ``k >= 2``.

    ``T_k = -R_{k-1} 1``; the constant and linear terms vanish because ``R_0``
    is the identity.
    """
    out = {}
    for k in range(2, R.order + 2):
        v = [-x for x in R.apply(k - 1, unit)]
        if any(x != 0 for x in v):
            out[k] = v
    return out


def hodge_rmatrix(order: int) -> RMatrix:
    """``exp(-sum_k B_{2k} / (2k (2k-1)) z^{2k-1})`` for the total Chern class
    of the Hodge bundle (dimension one)."""
    cs = [Fraction(0)] * (order + 1)
    for k in range(1, order // 2 + 2):
        if 2 * k - 1 <= order:
            cs[2 * k - 1] = -bernoulli(2 * k) / (2 * k * (2 * k - 1))
    series = TruncSeries(cs, order).exp()
    return RMatrix([[[c]] for c in series.coeffs], order)


def trivial_theory() -> FrobeniusData:
    """``V = Q``, ``eta = 1``, all 3-point values 1."""
    return FrobeniusData(((Fraction(1),),), {(0, 0, 0): Fraction(1)}, 0, ("1",))
