"""Small exact linear-algebra helpers over ``fractions.Fraction``.

Vectors are tuples of Fractions, matrices are lists of such tuples.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_frac(value) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused: they would smuggle rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE_ ") or text.count("/") > 1:
            raise ValueError(f"malformed rational {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def vec(values: Iterable) -> Vector:
    return tuple(to_frac(v) for v in values)


def frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), ZERO)


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale(c: Fraction, a: Sequence[Fraction]) -> Vector:
    return tuple(c * x for x in a)


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def is_zero(a: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in a)


def lin_comb(coeffs: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]], n: int) -> Vector:
    out = [ZERO] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for i, x in enumerate(v):
                out[i] += c * x
    return tuple(out)


def primitive(a: Sequence[Fraction]) -> Vector:
    """Positive rescaling of a nonzero vector to coprime integer coordinates."""
    den = 1
    for x in a:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in a]
    g = 0
    for k in ints:
        g = gcd(g, k)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(Fraction(k // g) for k in ints)


def sign_normalized(a: Sequence[Fraction]) -> Vector:
    """Primitive form with first nonzero coordinate positive (for lines, not rays)."""
    p = primitive(a)
    for x in p:
        if x != 0:
            return p if x > 0 else tuple(-y for y in p)
    return p


def rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = ONE / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vector]:
    """Basis of {x : row . x = 0 for every row}."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def span_basis(vectors: Sequence[Sequence[Fraction]], ncols: int) -> list[Vector]:
    """Canonical basis of the linear span: RREF rows."""
    return rref(vectors, ncols)[0]


def project_out(v: Sequence[Fraction], basis: Sequence[Sequence[Fraction]]) -> Vector:
    """Orthogonal projection of ``v`` onto the complement of span(basis)."""
    if not basis:
        return tuple(v)
    n = len(v)
    k = len(basis)
    # Solve Gram system (B B^T) c = B v.
    gram = [[dot(basis[i], basis[j]) for j in range(k)] + [dot(basis[i], v)] for i in range(k)]
    red, _ = rref(gram, k)
    coeffs = [row[k] for row in red]
    return sub(v, lin_comb(coeffs, basis, n))


def solve_square(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vector:
    n = len(a)
    aug = [tuple(a[i]) + (b[i],) for i in range(n)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise ValueError("singular system")
    return tuple(row[n] for row in red)


def inverse(a: Sequence[Sequence[Fraction]]) -> list[Vector]:
    n = len(a)
    aug = [tuple(a[i]) + tuple(ONE if j == i else ZERO for j in range(n)) for i in range(n)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in red]
