"""Dense matrix helpers over an arbitrary exact field (lists of lists)."""

from fractions import Fraction

from .errors import SingularPairing


def zeros(rows, cols):
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(d):
    m = zeros(d, d)
    for i in range(d):
        m[i][i] = Fraction(1)
    return m


def transpose(a):
    return [list(r) for r in zip(*a)]


def matmul(a, b):
    cols = list(zip(*b))
    out = []
    for row in a:
        new = []
        for col in cols:
            acc = Fraction(0)
            for x, y in zip(row, col):
                if x != 0 and y != 0:
                    acc = acc + x * y
            new.append(acc)
        out.append(new)
    return out


def matvec(a, v):
    out = []
    for row in a:
        acc = Fraction(0)
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                acc = acc + x * y
        out.append(acc)
    return out


def matadd(a, b, sign=1):
    return [[x + sign * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a, c):
    return [[x * c for x in row] for row in a]


def is_zero_matrix(a):
    return all(x == 0 for row in a for x in row)


def inverse(a):
    """Gauss-Jordan inverse; entries must support exact division."""
    d = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(d)] for i, row in enumerate(a)]
    for col in range(d):
        pivot = next((r for r in range(col, d) if m[r][col] != 0), None)
        if pivot is None:
            raise SingularPairing("matrix is singular")
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(d):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[d:] for row in m]
