"""Exact coefficient rings.

Everything here is exact: :class:`fractions.Fraction` for rationals, a dense
truncated power series type, bivariate division by ``z + w`` (used for the edge
kernel), and rational functions in ``t1, t2, q`` backed by sympy's fraction
field.  Values are immutable and safe to share between workers.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Mapping

from sympy import QQ, sympify
from sympy.polys.fields import field

from .errors import MismatchedTruncation, NonDivisible

Rational = Fraction

__all__ = [
    "Rational",
    "TruncSeries",
    "RationalFunction",
    "bernoulli",
    "rational_to_str",
    "rational_from_str",
    "series_divide_bivariate",
    "is_zero",
]


def rational_to_str(x) -> str:
    """Serialize a rational as ``"p/q"`` (or ``"p"`` when ``q == 1``)."""
    x = Fraction(x)
    return str(x)


def rational_from_str(s: str) -> Fraction:
    return Fraction(s)


def is_zero(x) -> bool:
    return x == 0


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number with the convention ``B_1 = -1/2``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    # sum_{k<=m} C(m+1, k) B_k = 0 for m >= 1
    b = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * b[k]
            binom = binom * (m + 1 - k) // (k + 1)
        b.append(-acc / (m + 1))
    return b[n]


class TruncSeries:
    """Dense power series ``c_0 + c_1 x + ... + c_N x^N`` modulo ``x^(N+1)``.

    Coefficients may be any ring elements supporting ``+``, ``*`` and mixing
    with :class:`~fractions.Fraction` (rationals, rational functions, or other
    series).  Combining two series with different order or variable raises
    :class:`MismatchedTruncation`; scalars are promoted to constant series.
    """

    __slots__ = ("var", "order", "coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Any], order: int, var: str = "z"):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        cs = list(coeffs)[: order + 1]
        cs.extend([Fraction(0)] * (order + 1 - len(cs)))
        self.coeffs = tuple(cs)
        self.order = order
        self.var = var
        self._hash = None

    @classmethod
    def constant(cls, c, order: int, var: str = "z") -> "TruncSeries":
        return cls([c], order, var)

    @classmethod
    def monomial(cls, k: int, order: int, var: str = "z", coeff=1) -> "TruncSeries":
        cs = [Fraction(0)] * (order + 1)
        if k <= order:
            cs[k] = coeff
        return cls(cs, order, var)

    # -- helpers ---------------------------------------------------------
    def _coerce(self, other) -> "TruncSeries | None":
        if isinstance(other, TruncSeries):
            if other.order != self.order or other.var != self.var:
                raise MismatchedTruncation(
                    f"cannot combine O({self.var}^{self.order + 1}) with "
                    f"O({other.var}^{other.order + 1})"
                )
            return other
        if isinstance(other, (int, Fraction, RationalFunction)):
            return TruncSeries([other], self.order, self.var)
        return None

    def __getitem__(self, k: int):
        if 0 <= k <= self.order:
            return self.coeffs[k]
        raise IndexError(f"coefficient {k} is beyond truncation order {self.order}")

    def __len__(self):
        return self.order + 1

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TruncSeries([a + b for a, b in zip(self.coeffs, o.coeffs)], self.order, self.var)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-a for a in self.coeffs], self.order, self.var)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TruncSeries([a - b for a, b in zip(self.coeffs, o.coeffs)], self.order, self.var)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            if other == 0:
                return TruncSeries([], self.order, self.var)
            return TruncSeries([a * other for a in self.coeffs], self.order, self.var)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.order
        a, b = self.coeffs, o.coeffs
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(n + 1 - i):
                bj = b[j]
                if bj != 0:
                    out[i + j] = out[i + j] + ai * bj
        return TruncSeries(out, n, self.var)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        if other == 0:
            raise ZeroDivisionError("division of a series by zero")
        return TruncSeries([a / other for a in self.coeffs], self.order, self.var)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = TruncSeries.constant(1, self.order, self.var)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "TruncSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = 1 / c0
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = Fraction(0)
            for j in range(1, k + 1):
                if self.coeffs[j] != 0:
                    acc = acc + self.coeffs[j] * out[k - j]
            out.append(-acc * inv0)
        return TruncSeries(out, self.order, self.var)

    def exp(self) -> "TruncSeries":
        """``exp(f)`` for ``f`` with vanishing constant term."""
        if self.coeffs[0] != 0:
            raise ValueError("exp needs a series without constant term")
        f = self.coeffs
        out = [Fraction(1)]
        for n in range(1, self.order + 1):
            acc = Fraction(0)
            for k in range(1, n + 1):
                if f[k] != 0:
                    acc = acc + f[k] * out[n - k] * k
            out.append(acc / n)
        return TruncSeries(out, self.order, self.var)

    def truncate(self, order: int) -> "TruncSeries":
        """Explicitly lower (or pad) the truncation order."""
        return TruncSeries(self.coeffs, order, self.var)

    def even_part(self) -> "TruncSeries":
        return TruncSeries(
            [c if k % 2 == 0 else Fraction(0) for k, c in enumerate(self.coeffs)],
            self.order,
            self.var,
        )

    def odd_part(self) -> "TruncSeries":
        return TruncSeries(
            [c if k % 2 == 1 else Fraction(0) for k, c in enumerate(self.coeffs)],
            self.order,
            self.var,
        )

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return (self.order, self.var, self.coeffs) == (other.order, other.var, other.coeffs)
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self.coeffs[0] == other and all(c == 0 for c in self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.var, self.order, self.coeffs))
        return self._hash

    def __repr__(self):
        terms = [f"{c}*{self.var}^{k}" for k, c in enumerate(self.coeffs) if c != 0]
        body = " + ".join(terms) if terms else "0"
        return f"TruncSeries({body} + O({self.var}^{self.order + 1}))"

    def to_json(self) -> dict:
        """``{exponent-string: rational-string}`` with zero coefficients omitted."""
        out = {}
        for k, c in enumerate(self.coeffs):
            if c != 0:
                out[str(k)] = c.to_json() if isinstance(c, RationalFunction) else rational_to_str(c)
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, str], order: int, var: str = "z") -> "TruncSeries":
        cs = [Fraction(0)] * (order + 1)
        for k, v in data.items():
            k = int(k)
            if k > order:
                raise MismatchedTruncation(f"exponent {k} exceeds order {order}")
            cs[k] = Fraction(v)
        return cls(cs, order, var)


def series_divide_bivariate(num: Mapping[tuple[int, int], Any]) -> dict[tuple[int, int], Any]:
    """Exact quotient of a bivariate polynomial in ``z, w`` by ``z + w``.

    ``num`` maps ``(i, j)`` to the coefficient of ``z^i w^j``.  Division is done
    one total degree at a time; each homogeneous piece must vanish at
    ``w = -z`` or :class:`NonDivisible` is raised.
    """
    by_degree: dict[int, dict[int, Any]] = {}
    for (i, j), c in num.items():
        if c != 0:
            by_degree.setdefault(i + j, {})[i] = c
    out: dict[tuple[int, int], Any] = {}
    for n, part in sorted(by_degree.items()):
        if n == 0:
            raise NonDivisible("nonzero constant term cannot be divisible by z + w")
        # (z + w) * sum_i q_i z^i w^(n-1-i): the coefficient of z^i w^(n-i)
        # is q_(i-1) + q_i, so peel off from the top z-power down.
        q = [Fraction(0)] * n
        q[n - 1] = part.get(n, Fraction(0))
        for i in range(n - 1, 0, -1):
            q[i - 1] = part.get(i, Fraction(0)) - q[i]
        if part.get(0, Fraction(0)) - q[0] != 0:
            raise NonDivisible(f"numerator does not vanish on z = -w in degree {n}")
        for i, c in enumerate(q):
            if c != 0:
                out[(i, n - 1 - i)] = c
    return out


# ---------------------------------------------------------------------------
# rational functions in t1, t2, q

_FIELD, _T1, _T2, _Q = field("t1,t2,q", QQ)
_GENS = ("t1", "t2", "q")
POLY_RING = _FIELD.ring


class RationalFunction:
    """Element of Q(t1, t2, q) kept in gcd-reduced form.

    Thin wrapper over a sympy ``FracElement`` so that mixing with ``int`` and
    ``Fraction`` works the same way as for the other coefficient rings.
    """

    __slots__ = ("value",)

    def __init__(self, value=0):
        if isinstance(value, RationalFunction):
            value = value.value
        elif isinstance(value, Fraction):
            value = _FIELD(QQ(value.numerator, value.denominator))
        elif isinstance(value, int):
            value = _FIELD(value)
        self.value = value

    @classmethod
    def gens(cls):
        return cls(_T1), cls(_T2), cls(_Q)

    @staticmethod
    def _unwrap(other):
        if isinstance(other, RationalFunction):
            return other.value
        if isinstance(other, Fraction):
            return _FIELD(QQ(other.numerator, other.denominator))
        if isinstance(other, int):
            return _FIELD(other)
        return None

    def __add__(self, other):
        o = self._unwrap(other)
        return NotImplemented if o is None else RationalFunction(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._unwrap(other)
        return NotImplemented if o is None else RationalFunction(self.value - o)

    def __rsub__(self, other):
        o = self._unwrap(other)
        return NotImplemented if o is None else RationalFunction(o - self.value)

    def __mul__(self, other):
        o = self._unwrap(other)
        return NotImplemented if o is None else RationalFunction(self.value * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._unwrap(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.value / o)

    def __rtruediv__(self, other):
        o = self._unwrap(other)
        if o is None:
            return NotImplemented
        if not self.value:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(o / self.value)

    def __neg__(self):
        return RationalFunction(-self.value)

    def __pow__(self, k: int):
        return RationalFunction(self.value**k)

    def __eq__(self, other):
        o = self._unwrap(other)
        if o is None:
            return NotImplemented
        # cross-multiplication keeps equality decidable regardless of normal form
        return self.value.numer * o.denom == o.numer * self.value.denom

    def __hash__(self):
        num, den = self._normalized()
        return hash((tuple(sorted(num.terms())), tuple(sorted(den.terms()))))

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"RationalFunction({self.value.as_expr()})"

    def __str__(self):
        return str(self.value.as_expr())

    @property
    def numer(self):
        return self._normalized()[0]

    @property
    def denom(self):
        return self._normalized()[1]

    def _normalized(self):
        num, den = self.value.numer, self.value.denom
        lc = den.LC
        return num.quo_ground(lc), den.quo_ground(lc)

    def subs(self, **values) -> "RationalFunction":
        """Substitute rational values for some of ``t1, t2, q``."""
        v = self.value
        for name, x in values.items():
            x = Fraction(x)
            v = v.subs(_FIELD.gens[_GENS.index(name)], QQ(x.numerator, x.denominator))
        return RationalFunction(v)

    def is_regular_at(self, **point) -> bool:
        """True when the reduced denominator does not vanish at ``point``."""
        den = self.value.denom
        for name, x in point.items():
            x = Fraction(x)
            den = den.subs(_GENS.index(name), QQ(x.numerator, x.denominator))
        return den != 0

    def q_series(self, order: int) -> TruncSeries:
        """Taylor expansion in ``q`` to ``O(q^(order+1))`` with coefficients in Q(t1, t2)."""
        num, den = self._normalized()
        return _poly_q_series(num, order) / _poly_q_series(den, order)

    def to_json(self) -> dict:
        num, den = self._normalized()
        return {"num": _poly_to_json(num), "den": _poly_to_json(den)}

    @classmethod
    def from_json(cls, data: Mapping) -> "RationalFunction":
        return cls(_poly_from_json(data["num"]) / _poly_from_json(data["den"]))

    @classmethod
    def from_polys(cls, num, den=None) -> "RationalFunction":
        """Build from elements of :data:`POLY_RING` (``Q[t1, t2, q]``)."""
        value = _FIELD(num)
        if den is not None:
            value = value / _FIELD(den)
        return cls(value)

    @classmethod
    def from_str(cls, s: str) -> "RationalFunction":
        return cls(_FIELD.from_expr(sympify(s)))


def _monomial_str(exps) -> str:
    parts = [f"{g}^{e}" for g, e in zip(_GENS, exps) if e]
    return " ".join(parts) if parts else "1"


def _poly_to_json(p) -> dict:
    return {_monomial_str(m): rational_to_str(Fraction(int(c.numerator), int(c.denominator))) for m, c in sorted(p.terms())}


def _poly_from_json(data: Mapping[str, str]):
    acc = _FIELD(0)
    for mono, c in data.items():
        term = _FIELD(QQ(Fraction(c).numerator, Fraction(c).denominator))
        if mono != "1":
            for piece in mono.split():
                g, e = piece.split("^")
                term = term * (_FIELD.gens[_GENS.index(g)] ** int(e))
        acc = acc + term
    return acc


def _poly_q_series(p, order: int) -> TruncSeries:
    cs = [RationalFunction(0) for _ in range(order + 1)]
    for (a, b, c), coeff in p.terms():
        if c <= order:
            mono = _FIELD(QQ(coeff)) * _T1**a * _T2**b
            cs[c] = cs[c] + RationalFunction(mono)
    return TruncSeries(cs, order, "q")
