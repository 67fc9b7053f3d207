"""Exact rational linear algebra on immutable tuples.

Scalars are `fractions.Fraction` (always reduced, denominator positive),
vectors are tuples of Fractions, matrices are tuples of row tuples.  All
operations are pure and exact, so equality of results is structural.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatchError, SingularSystemError

Scalar = Fraction
Vector = tuple
Matrix = tuple


def rat(value) -> Fraction:
    """Parse a rational from "p/q" or "p" strings, ints, or Fractions.

    Floats are rejected: every quantity in this package is exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot interpret {value!r} as an exact rational")


def fmt(q: Fraction) -> str:
    """Serialize as "p/q" or "p", sign on the numerator only."""
    return str(Fraction(q))


def decimal_str(q: Fraction, digits: int = 6) -> str:
    """Fixed-point decimal rendering (round half away from zero).

    Presentation only; never used in comparisons.
    """
    q = Fraction(q)
    scaled = abs(q) * 10**digits
    units = scaled.numerator // scaled.denominator
    if 2 * (scaled.numerator % scaled.denominator) >= scaled.denominator:
        units += 1
    sign = "-" if q < 0 and units else ""
    if digits == 0:
        return f"{sign}{units}"
    whole, frac = divmod(units, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def vec(entries: Iterable) -> tuple:
    return tuple(rat(e) for e in entries)


def dot(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise DimensionMismatchError(f"dot of lengths {len(a)} and {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a):
    return tuple(c * x for x in a)


def is_zero_vector(a) -> bool:
    return all(x == 0 for x in a)


def mat(rows: Iterable[Iterable]) -> tuple:
    m = tuple(vec(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise DimensionMismatchError("matrix rows have unequal length")
    return m


def transpose(m):
    return tuple(zip(*m))


def mat_vec(m, v):
    return tuple(dot(row, v) for row in m)


def _require_square(m):
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise DimensionMismatchError("matrix is not square")
    return n


def _integer_rows(m):
    """Clear denominators row by row; returns (integer rows, product of scales)."""
    rows = []
    scale = Fraction(1)
    for row in m:
        fr = [rat(x) for x in row]
        d = math.lcm(*(x.denominator for x in fr)) if fr else 1
        rows.append([int(x * d) for x in fr])
        scale *= d
    return rows, scale


def _bareiss_det(a) -> int:
    """Fraction-free Bareiss determinant of a square integer matrix."""
    n = len(a)
    a = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def det(m) -> Fraction:
    """Exact determinant via fraction-free elimination."""
    _require_square(m)
    rows, scale = _integer_rows(m)
    return Fraction(_bareiss_det(rows)) / scale


def solve(a, b) -> tuple:
    """Exact solution of a square nonsingular system a @ x = b (Cramer on
    Bareiss determinants; adequate for the ranks this package supports)."""
    n = _require_square(a)
    if len(b) != n:
        raise DimensionMismatchError("right-hand side length does not match")
    rows, scale = _integer_rows(a)
    d_int = _bareiss_det(rows)
    if d_int == 0:
        raise SingularSystemError("matrix is singular")
    d = Fraction(d_int) / scale
    bf = vec(b)
    x = []
    for j in range(n):
        col = tuple(tuple(bf[i] if k == j else a[i][k] for k in range(n)) for i in range(n))
        x.append(det(col) / d)
    return tuple(x)


def inverse(a) -> tuple:
    n = _require_square(a)
    cols = []
    for j in range(n):
        e = tuple(Fraction(int(i == j)) for i in range(n))
        cols.append(solve(a, e))
    return transpose(cols)


def rank_of(vectors) -> int:
    """Rank of a list of equal-length vectors, by exact elimination."""
    rows = [[rat(x) for x in v] for v in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    while rank < len(rows) and col < ncols:
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                f = rows[r][col] / pv
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def primitive(v) -> tuple:
    """Scale a nonzero rational vector to its primitive integer representative,
    preserving direction."""
    fr = [rat(x) for x in v]
    if all(x == 0 for x in fr):
        raise ValueError("zero vector has no primitive representative")
    d = math.lcm(*(x.denominator for x in fr))
    ints = [int(x * d) for x in fr]
    g = math.gcd(*(abs(x) for x in ints))
    return tuple(x // g for x in ints)


def orthogonal_complement_vector(rows) -> tuple:
    """For n-1 independent vectors in n-space, a nonzero integer vector
    orthogonal to all of them (signed cofactor expansion); the zero vector
    if the input is dependent."""
    k = len(rows)
    n = k + 1
    if any(len(r) != n for r in rows):
        raise DimensionMismatchError("need n-1 vectors of length n")
    out = []
    for j in range(n):
        minor = tuple(tuple(row[i] for i in range(n) if i != j) for row in rows)
        c = det(minor) if k else Fraction(1)
        out.append(c if j % 2 == 0 else -c)
    if all(x == 0 for x in out):
        return tuple(0 for _ in range(n))
    return primitive(out)
