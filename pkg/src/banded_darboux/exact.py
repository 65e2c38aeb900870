"""Exact rational scalars, dense polynomials, and small dense matrices.

Everything in this package computes over `fractions.Fraction`; there is no
floating point anywhere. The identities being certified are exact
nonvanishing conditions, which rounding could neither establish nor refute.

Wire format for scalars: the canonical `str` of a Fraction, i.e. "num/den"
in lowest terms with a positive denominator, plain "num" for integers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .errors import NonzeroRemainder, NotSquare, ShapeMismatch

Rational = Fraction

ScalarLike = Union[Fraction, int, str]


def rational(value: ScalarLike) -> Fraction:
    """Coerce an int, Fraction, or "num/den" string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse the canonical "num/den" (or "num") wire form."""
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    """Canonical "num/den" wire form, lowest terms, "num" for integers."""
    return str(value)


class Polynomial:
    """Dense univariate polynomial in z with Fraction coefficients.

    Immutable. `coefficients[k]` is the coefficient of z^k; trailing zeros
    are trimmed, so the zero polynomial has an empty coefficient tuple and
    degree -1.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Iterable[ScalarLike] = ()):
        coeffs = [rational(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "_coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1,))

    @classmethod
    def constant(cls, c: ScalarLike) -> "Polynomial":
        return cls((rational(c),))

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self._coeffs) and self._coeffs[-1] == 1

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self._coeffs):
            return self._coeffs[k]
        return Fraction(0)

    def __call__(self, z: ScalarLike) -> Fraction:
        """Evaluate at z by Horner's scheme, exactly."""
        z = rational(z)
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * z + c
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self._coeffs))

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(tuple(c * other for c in self._coeffs))
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Polynomial.zero()
        out = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other._coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def times_z_power(self, k: int) -> "Polynomial":
        """Multiply by z^k (prepend k zero coefficients)."""
        if k < 0:
            raise ValueError("power must be nonnegative")
        if self.is_zero:
            return self
        return Polynomial((Fraction(0),) * k + self._coeffs)

    def deflate(self, root: ScalarLike) -> "Polynomial":
        """Divide exactly by (z - root).

        Raises NonzeroRemainder unless root actually is a root; by the
        theory, the callers' inputs always vanish there, so a remainder
        means an identity broke upstream.
        """
        if self.is_zero:
            return Polynomial.zero()
        root = rational(root)
        # Synthetic division: the running Horner accumulator visits the
        # quotient coefficients from the top degree down, ending on the
        # remainder.
        acc = Fraction(0)
        descending: list[Fraction] = []
        for c in reversed(self._coeffs):
            acc = acc * root + c
            descending.append(acc)
        remainder = descending.pop()
        if remainder != 0:
            raise NonzeroRemainder(f"remainder {remainder} dividing by (z - {root})")
        descending.reverse()
        return Polynomial(descending)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self._coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                var = "z" if k == 1 else f"z^{k}"
                body = var if mag == 1 else f"{mag}*{var}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = (first_sign if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


#: The identity polynomial z; convenient for building e.g. (Z - c) * q.
Z = Polynomial((0, 1))


def _as_poly(value):
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return Polynomial.constant(value)
    return NotImplemented


def poly_eval(p: Polynomial, z: ScalarLike) -> Fraction:
    return p(z)


def poly_div_linear(p: Polynomial, c: ScalarLike) -> Polynomial:
    return p.deflate(c)


class DenseMatrix:
    """Small immutable dense matrix of Fractions (row-major)."""

    __slots__ = ("_rows",)

    def __init__(self, rows: Iterable[Iterable[ScalarLike]]):
        grid = tuple(tuple(rational(v) for v in row) for row in rows)
        if grid:
            width = len(grid[0])
            if any(len(row) != width for row in grid):
                raise ShapeMismatch("ragged rows")
        object.__setattr__(self, "_rows", grid)

    def __setattr__(self, name, value):
        raise AttributeError("DenseMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "DenseMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "DenseMatrix":
        return cls(tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def from_function(cls, rows: int, cols: int, fn: Callable[[int, int], ScalarLike]) -> "DenseMatrix":
        return cls(tuple(tuple(fn(i, j) for j in range(cols)) for i in range(rows)))

    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def cols(self) -> int:
        return len(self._rows[0]) if self._rows else 0

    def entry(self, i: int, j: int) -> Fraction:
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def as_rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def __mul__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.rows}x{self.cols} times {other.rows}x{other.cols}")
        ocols = other.cols
        out = []
        for i in range(self.rows):
            arow = self._rows[i]
            out.append(
                tuple(
                    sum((arow[k] * other._rows[k][j] for k in range(self.cols)), Fraction(0))
                    for j in range(ocols)
                )
            )
        return DenseMatrix(out)

    def __add__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("matrix addition shape mismatch")
        return DenseMatrix(
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self._rows, other._rows))
        )

    def __sub__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("matrix subtraction shape mismatch")
        return DenseMatrix(
            tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self._rows, other._rows))
        )

    def scaled(self, c: ScalarLike) -> "DenseMatrix":
        c = rational(c)
        return DenseMatrix(tuple(tuple(c * v for v in row) for row in self._rows))

    def det(self) -> Fraction:
        return det_exact(self)

    def __eq__(self, other):
        if isinstance(other, DenseMatrix):
            return self._rows == other._rows
        return NotImplemented

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in row) for row in self._rows)
        return f"DenseMatrix[{body}]"


def det_exact(m: DenseMatrix) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rows are first scaled to integers; the Bareiss recurrence then keeps all
    intermediates integral, which bounds coefficient blowup compared with
    naive rational elimination. Row swaps only flip the sign, so the result
    does not depend on pivot choices.
    """
    if m.rows != m.cols:
        raise NotSquare(f"{m.rows}x{m.cols}")
    n = m.rows
    if n == 0:
        return Fraction(1)
    scale = 1
    work: list[list[int]] = []
    for row in m.as_rows():
        mult = math.lcm(*(v.denominator for v in row))
        scale *= mult
        work.append([int(v * mult) for v in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if work[k][k] == 0:
            for i in range(k + 1, n):
                if work[i][k] != 0:
                    work[k], work[i] = work[i], work[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = work[k][k]
        for i in range(k + 1, n):
            row_i = work[i]
            row_k = work[k]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return Fraction(sign * work[n - 1][n - 1], scale)


def solve_unit_lower_triangular(
    t: DenseMatrix, b: Sequence[ScalarLike]
) -> tuple[Fraction, ...]:
    """Solve T x = b by forward substitution, T unit lower triangular."""
    n = t.rows
    if t.cols != n or len(b) != n:
        raise ShapeMismatch(f"system is {t.rows}x{t.cols} with rhs of length {len(b)}")
    for i in range(n):
        if t.entry(i, i) != 1:
            raise ShapeMismatch(f"diagonal entry ({i},{i}) is {t.entry(i, i)}, not 1")
    x: list[Fraction] = []
    for i in range(n):
        acc = rational(b[i])
        row = t.row(i)
        for k in range(i):
            acc -= row[k] * x[k]
        x.append(acc)
    return tuple(x)
