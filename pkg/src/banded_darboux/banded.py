"""Banded truncations of semi-infinite matrices, with safe-window tracking.

All matrices here are N x N leading truncations of semi-infinite banded
matrices. A product of truncations only agrees with the truncation of the
(infinite) product on its leading rows: row i needs columns up to
i + upper(A) of A, so every product carries a `valid_rows` count. Assertions
about "the" matrix are only ever made on rows < valid_rows; entries in later
rows are stored but unspecified.

Index conventions (0-based throughout):
  * BandedHessenberg J: entries a(i, m) for max(0, i - p) <= m <= i plus an
    implicit, never-stored unit superdiagonal.
  * The factor chain's global index for its coefficients: block q >= 0 covers
    indices q*(p+1)+1 .. q*(p+1)+p+1; index q*(p+1)+1 is the diagonal of the
    upper bidiagonal at row q, and q*(p+1)+1+j is factor j's subdiagonal
    entry at row q+1.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Mapping, Sequence

from .errors import IndexOutOfRange, SizeMismatch
from .exact import (
    DenseMatrix,
    Polynomial,
    ScalarLike,
    format_rational,
    parse_rational,
    rational,
)

_ZERO = Fraction(0)


def _coerce_band(values: Iterable[ScalarLike], n: int, offset: int) -> tuple[Fraction, ...]:
    """Row-indexed band storage: slot i holds entry (i, i+offset).

    Slots whose column falls outside the matrix must hold zero.
    """
    band = [rational(v) for v in values]
    if len(band) != n:
        raise SizeMismatch(f"band {offset} has {len(band)} slots, expected {n}")
    for i, v in enumerate(band):
        if not (0 <= i + offset < n) and v != 0:
            raise SizeMismatch(f"band {offset} has a value outside the matrix at row {i}")
    return tuple(band)


class BandMatrix:
    """General banded square matrix plus its trustworthy-row count."""

    __slots__ = ("n", "lower", "upper", "_bands", "valid_rows")

    def __init__(
        self,
        n: int,
        lower: int,
        upper: int,
        bands: Mapping[int, Iterable[ScalarLike]],
        valid_rows: int | None = None,
    ):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        stored = {}
        for d in range(-lower, upper + 1):
            values = bands.get(d)
            if values is None:
                stored[d] = (_ZERO,) * n
            else:
                stored[d] = _coerce_band(values, n, d)
        object.__setattr__(self, "_bands", stored)
        object.__setattr__(self, "valid_rows", n if valid_rows is None else min(valid_rows, n))

    def __setattr__(self, name, value):
        raise AttributeError("BandMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "BandMatrix":
        return cls(n, 0, 0, {0: (Fraction(1),) * n})

    @classmethod
    def from_function(
        cls, n: int, lower: int, upper: int, fn: Callable[[int, int], ScalarLike],
        valid_rows: int | None = None,
    ) -> "BandMatrix":
        bands = {}
        for d in range(-lower, upper + 1):
            bands[d] = tuple(
                fn(i, i + d) if 0 <= i + d < n else 0 for i in range(n)
            )
        return cls(n, lower, upper, bands, valid_rows)

    def entry(self, i: int, j: int) -> Fraction:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexOutOfRange(f"({i}, {j}) outside {self.n}x{self.n}")
        d = j - i
        if -self.lower <= d <= self.upper:
            return self._bands[d][i]
        return _ZERO

    def band(self, offset: int) -> tuple[Fraction, ...]:
        return self._bands[offset]

    def band_matrix(self) -> "BandMatrix":
        return self

    def dense(self) -> DenseMatrix:
        return DenseMatrix.from_function(self.n, self.n, self.entry)

    def plus_scaled_identity(self, c: ScalarLike) -> "BandMatrix":
        c = rational(c)
        bands = dict(self._bands)
        bands[0] = tuple(v + c for v in self._bands.get(0, (_ZERO,) * self.n))
        return BandMatrix(self.n, self.lower, self.upper, bands, self.valid_rows)

    def trimmed(self) -> "BandMatrix":
        """Drop outer bands that are identically zero (window preserved)."""
        lower, upper = self.lower, self.upper
        while lower > 0 and all(v == 0 for v in self._bands[-lower]):
            lower -= 1
        while upper > 0 and all(v == 0 for v in self._bands[upper]):
            upper -= 1
        bands = {d: self._bands[d] for d in range(-lower, upper + 1)}
        return BandMatrix(self.n, lower, upper, bands, self.valid_rows)

    def equal_on_rows(self, other: "BandMatrix", rows: int) -> bool:
        if self.n != other.n:
            return False
        for i in range(min(rows, self.n)):
            lo = max(0, i - max(self.lower, other.lower))
            hi = min(self.n - 1, i + max(self.upper, other.upper))
            for j in range(lo, hi + 1):
                if self.entry(i, j) != other.entry(i, j):
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, BandMatrix):
            return NotImplemented
        return self.n == other.n and self.equal_on_rows(other, self.n)

    def __hash__(self):
        return hash((self.n, tuple(sorted((d, b) for d, b in self._bands.items()))))

    def __repr__(self):
        return (
            f"BandMatrix(n={self.n}, lower={self.lower}, upper={self.upper}, "
            f"valid_rows={self.valid_rows})"
        )


def multiply_window(a, b) -> BandMatrix:
    """Banded product with the cumulative safe-window bound.

    Row i of the truncated product uses columns of A up to i + upper(A), so
    it matches the infinite product iff those columns exist and the source
    rows are themselves trustworthy:

        valid_rows(AB) = min(valid_rows(A), valid_rows(B) - upper(A))
    """
    a = a.band_matrix()
    b = b.band_matrix()
    if a.n != b.n:
        raise SizeMismatch(f"{a.n} vs {b.n}")
    n = a.n
    lower = min(a.lower + b.lower, n - 1) if n else 0
    upper = min(a.upper + b.upper, n - 1) if n else 0
    bands: dict[int, list[Fraction]] = {d: [_ZERO] * n for d in range(-lower, upper + 1)}
    for d in range(-lower, upper + 1):
        row_band = bands[d]
        for i in range(n):
            j = i + d
            if not (0 <= j < n):
                continue
            k_lo = max(0, i - a.lower, j - b.upper)
            k_hi = min(n - 1, i + a.upper, j + b.lower)
            acc = _ZERO
            for k in range(k_lo, k_hi + 1):
                av = a.entry(i, k)
                if av != 0:
                    acc += av * b.entry(k, j)
            row_band[i] = acc
    valid = max(0, min(a.valid_rows, b.valid_rows - a.upper))
    return BandMatrix(n, lower, upper, bands, valid)


def product_window(factors: Sequence) -> BandMatrix:
    """Left-to-right windowed product of a nonempty factor sequence."""
    mats = [f.band_matrix() for f in factors]
    return reduce(multiply_window, mats)


class BandedHessenberg:
    """(p+2)-banded lower-Hessenberg truncation with unit superdiagonal.

    Stores the p subdiagonals and the diagonal; the superdiagonal is the
    structural constant 1 and is never stored. Rows >= valid_rows carry
    unspecified values (they arise from windowed products).
    """

    __slots__ = ("p", "n", "_bands", "valid_rows")

    def __init__(
        self,
        p: int,
        n: int,
        bands: Mapping[int, Iterable[ScalarLike]],
        valid_rows: int | None = None,
    ):
        if p < 1:
            raise IndexOutOfRange(f"band parameter must be >= 1, got {p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", n)
        stored = {}
        for d in range(-p, 1):
            values = bands.get(d)
            if values is None:
                stored[d] = (_ZERO,) * n
            else:
                stored[d] = _coerce_band(values, n, d)
        object.__setattr__(self, "_bands", stored)
        object.__setattr__(self, "valid_rows", n if valid_rows is None else min(valid_rows, n))

    def __setattr__(self, name, value):
        raise AttributeError("BandedHessenberg is immutable")

    def a(self, i: int, m: int) -> Fraction:
        """In-band recurrence coefficient a(i, m), max(0, i-p) <= m <= i."""
        if not (0 <= i < self.n and max(0, i - self.p) <= m <= i):
            raise IndexOutOfRange(f"a({i}, {m}) outside the band of row {i}")
        return self._bands[m - i][i]

    def entry(self, i: int, j: int) -> Fraction:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexOutOfRange(f"({i}, {j}) outside {self.n}x{self.n}")
        if j == i + 1:
            return Fraction(1)
        d = j - i
        if -self.p <= d <= 0:
            return self._bands[d][i]
        return _ZERO

    @property
    def is_regular(self) -> bool:
        """Lowest-band entries a(i, i-p) all nonzero on trustworthy rows."""
        return all(
            self._bands[-self.p][i] != 0 for i in range(self.p, self.valid_rows)
        )

    def band_matrix(self) -> BandMatrix:
        bands: dict[int, tuple[Fraction, ...]] = dict(self._bands)
        bands[1] = tuple(Fraction(1) if i + 1 < self.n else _ZERO for i in range(self.n))
        return BandMatrix(self.n, self.p, 1, bands, self.valid_rows)

    @classmethod
    def from_band_matrix(cls, bm: BandMatrix, p: int) -> "BandedHessenberg":
        """Reinterpret a windowed product as a Hessenberg truncation.

        Checks the structure on trustworthy rows: nothing above the
        superdiagonal, nothing below band -p, and a unit superdiagonal.
        """
        for d in range(2, bm.upper + 1):
            for i in range(min(bm.valid_rows, bm.n - d)):
                if bm.band(d)[i] != 0:
                    raise SizeMismatch(f"entry ({i}, {i + d}) above the superdiagonal is nonzero")
        for d in range(p + 1, bm.lower + 1):
            for i in range(d, min(bm.valid_rows, bm.n)):
                if bm.band(-d)[i] != 0:
                    raise SizeMismatch(f"entry ({i}, {i - d}) below band -{p} is nonzero")
        if bm.upper == 0 and bm.n > 1 and bm.valid_rows > 0:
            raise SizeMismatch("source has no superdiagonal at all")
        if bm.upper >= 1:
            for i in range(min(bm.valid_rows, bm.n - 1)):
                if bm.band(1)[i] != 1:
                    raise SizeMismatch(f"superdiagonal entry ({i}, {i + 1}) is {bm.band(1)[i]}, not 1")
        bands = {d: bm.band(d) for d in range(-min(p, bm.lower), 1)}
        return cls(p, bm.n, bands, bm.valid_rows)

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "N": self.n,
            "bands": {
                str(-d): [format_rational(self._bands[-d][i]) for i in range(d, self.n)]
                for d in range(0, self.p + 1)
            },
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "BandedHessenberg":
        p = int(data["p"])
        n = int(data["N"])
        bands = {}
        for d in range(0, p + 1):
            listed = data["bands"].get(str(-d))
            if listed is None or len(listed) != n - d:
                raise SizeMismatch(f"band {-d} missing or mis-sized in JSON matrix")
            bands[-d] = tuple([_ZERO] * d + [parse_rational(v) for v in listed])
        return cls(p, n, bands)

    def __eq__(self, other):
        if not isinstance(other, BandedHessenberg):
            return NotImplemented
        return (self.p, self.n, self._bands) == (other.p, other.n, other._bands)

    def __hash__(self):
        return hash((self.p, self.n, tuple(sorted(self._bands.items()))))

    def __repr__(self):
        return f"BandedHessenberg(p={self.p}, n={self.n}, valid_rows={self.valid_rows})"


def hessenberg_from_recurrence(
    p: int, n: int, coeff_provider: Callable[[int, int], ScalarLike]
) -> BandedHessenberg:
    """Populate the band from a coefficient provider a(i, m)."""
    bands: dict[int, list[ScalarLike]] = {d: [0] * n for d in range(-p, 1)}
    for i in range(n):
        for m in range(max(0, i - p), i + 1):
            bands[m - i][i] = coeff_provider(i, m)
    return BandedHessenberg(p, n, bands)


class UnitLowerBanded:
    """Unit lower triangular with w stored subdiagonals."""

    __slots__ = ("w", "n", "_bands")

    def __init__(self, w: int, n: int, bands: Mapping[int, Iterable[ScalarLike]]):
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "n", n)
        stored = {}
        for d in range(-w, 0):
            values = bands.get(d)
            stored[d] = (_ZERO,) * n if values is None else _coerce_band(values, n, d)
        object.__setattr__(self, "_bands", stored)

    def __setattr__(self, name, value):
        raise AttributeError("UnitLowerBanded is immutable")

    def entry(self, i: int, j: int) -> Fraction:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexOutOfRange(f"({i}, {j}) outside {self.n}x{self.n}")
        if i == j:
            return Fraction(1)
        d = j - i
        if -self.w <= d < 0:
            return self._bands[d][i]
        return _ZERO

    def band(self, offset: int) -> tuple[Fraction, ...]:
        return self._bands[offset]

    def band_matrix(self) -> BandMatrix:
        bands: dict[int, tuple[Fraction, ...]] = dict(self._bands)
        bands[0] = (Fraction(1),) * self.n
        return BandMatrix(self.n, self.w, 0, bands)

    @classmethod
    def from_band_matrix(cls, bm: BandMatrix, w: int | None = None) -> "UnitLowerBanded":
        if bm.upper != 0:
            bm = bm.trimmed()
            if bm.upper != 0:
                raise SizeMismatch("matrix has entries above the diagonal")
        if any(v != 1 for v in bm.band(0)):
            raise SizeMismatch("diagonal is not identically 1")
        w = bm.lower if w is None else w
        bands = {d: bm.band(d) if -bm.lower <= d else (_ZERO,) * bm.n for d in range(-w, 0)}
        return cls(w, bm.n, bands)

    def __eq__(self, other):
        if not isinstance(other, UnitLowerBanded):
            return NotImplemented
        return (self.n, self.w, self._bands) == (other.n, other.w, other._bands)

    def __hash__(self):
        return hash((self.n, self.w, tuple(sorted(self._bands.items()))))

    def __repr__(self):
        return f"UnitLowerBanded(w={self.w}, n={self.n})"


class LowerBidiagonalUnit:
    """Unit lower bidiagonal factor; `index` is its 1-based chain position."""

    __slots__ = ("index", "n", "sub")

    def __init__(self, index: int, n: int, sub: Iterable[ScalarLike]):
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "n", n)
        values = tuple(rational(v) for v in sub)
        if len(values) != n - 1:
            raise SizeMismatch(f"subdiagonal needs {n - 1} values, got {len(values)}")
        object.__setattr__(self, "sub", values)

    def __setattr__(self, name, value):
        raise AttributeError("LowerBidiagonalUnit is immutable")

    def sub_at_row(self, r: int) -> Fraction:
        """Subdiagonal entry at (r, r-1), rows r = 1..n-1."""
        if not 1 <= r <= self.n - 1:
            raise IndexOutOfRange(f"row {r} has no subdiagonal entry")
        return self.sub[r - 1]

    @property
    def is_regular(self) -> bool:
        return all(v != 0 for v in self.sub)

    def entry(self, i: int, j: int) -> Fraction:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexOutOfRange(f"({i}, {j}) outside {self.n}x{self.n}")
        if i == j:
            return Fraction(1)
        if j == i - 1:
            return self.sub[i - 1]
        return _ZERO

    def band_matrix(self) -> BandMatrix:
        return BandMatrix(
            self.n,
            1,
            0,
            {0: (Fraction(1),) * self.n, -1: (_ZERO,) + self.sub},
        )

    def leading_dense(self, k: int) -> DenseMatrix:
        return DenseMatrix.from_function(k, k, self.entry)

    def __eq__(self, other):
        if not isinstance(other, LowerBidiagonalUnit):
            return NotImplemented
        return (self.index, self.n, self.sub) == (other.index, other.n, other.sub)

    def __hash__(self):
        return hash((self.index, self.n, self.sub))

    def __repr__(self):
        return f"LowerBidiagonalUnit(index={self.index}, n={self.n})"


class UpperBidiagonal:
    """Upper bidiagonal with stored diagonal and implicit unit superdiagonal."""

    __slots__ = ("n", "diag")

    def __init__(self, n: int, diag: Iterable[ScalarLike]):
        object.__setattr__(self, "n", n)
        values = tuple(rational(v) for v in diag)
        if len(values) != n:
            raise SizeMismatch(f"diagonal needs {n} values, got {len(values)}")
        object.__setattr__(self, "diag", values)

    def __setattr__(self, name, value):
        raise AttributeError("UpperBidiagonal is immutable")

    def entry(self, i: int, j: int) -> Fraction:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexOutOfRange(f"({i}, {j}) outside {self.n}x{self.n}")
        if i == j:
            return self.diag[i]
        if j == i + 1:
            return Fraction(1)
        return _ZERO

    def band_matrix(self) -> BandMatrix:
        return BandMatrix(
            self.n,
            0,
            1,
            {
                0: self.diag,
                1: tuple(Fraction(1) if i + 1 < self.n else _ZERO for i in range(self.n)),
            },
        )

    def __eq__(self, other):
        if not isinstance(other, UpperBidiagonal):
            return NotImplemented
        return (self.n, self.diag) == (other.n, other.diag)

    def __hash__(self):
        return hash((self.n, self.diag))

    def __repr__(self):
        return f"UpperBidiagonal(n={self.n})"


class BidiagonalChain:
    """Ordered factorization data: J - C*I = L(1) ... L(p) U.

    Holds the p unit lower bidiagonal factors, the upper bidiagonal U, and
    the shift C. The chain's coefficients live on a single global index t:
    see the module docstring for the tiling.
    """

    __slots__ = ("p", "n", "shift", "factors", "upper")

    def __init__(
        self,
        p: int,
        n: int,
        shift: ScalarLike,
        factors: Sequence[LowerBidiagonalUnit],
        upper: UpperBidiagonal,
    ):
        factors = tuple(factors)
        if len(factors) != p:
            raise SizeMismatch(f"need {p} factors, got {len(factors)}")
        for pos, factor in enumerate(factors, start=1):
            if factor.index != pos:
                raise SizeMismatch(f"factor at position {pos} is labeled {factor.index}")
            if factor.n != n:
                raise SizeMismatch("factor size differs from chain size")
        if upper.n != n:
            raise SizeMismatch("upper factor size differs from chain size")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "shift", rational(shift))
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "upper", upper)

    def __setattr__(self, name, value):
        raise AttributeError("BidiagonalChain is immutable")

    def gamma_location(self, t: int) -> tuple[str, int, int]:
        """Map global index t >= 1 to its slot.

        Returns ("upper", 0, q) for the diagonal of U at row q, or
        ("factor", j, r) for factor j's subdiagonal entry at row r.
        """
        if t < 1:
            raise IndexOutOfRange(f"global index {t} must be >= 1")
        q, pos = divmod(t - 1, self.p + 1)
        if pos == 0:
            if q >= self.n:
                raise IndexOutOfRange(f"global index {t} beyond the truncation")
            return ("upper", 0, q)
        if q + 1 > self.n - 1:
            raise IndexOutOfRange(f"global index {t} beyond the truncation")
        return ("factor", pos, q + 1)

    def gamma_index(self, kind: str, j: int, r: int) -> int:
        """Inverse of gamma_location."""
        if kind == "upper":
            return r * (self.p + 1) + 1
        if kind == "factor":
            if not 1 <= j <= self.p:
                raise IndexOutOfRange(f"factor index {j} outside 1..{self.p}")
            return (r - 1) * (self.p + 1) + j + 1
        raise IndexOutOfRange(f"unknown slot kind {kind!r}")

    def gamma(self, t: int) -> Fraction:
        kind, j, r = self.gamma_location(t)
        if kind == "upper":
            return self.upper.diag[r]
        return self.factors[j - 1].sub_at_row(r)

    @property
    def is_regular(self) -> bool:
        return all(f.is_regular for f in self.factors) and all(
            v != 0 for v in self.upper.diag
        )

    def lower_product(self) -> UnitLowerBanded:
        """L(1) ... L(p); exact on the whole truncation (all factors lower)."""
        prod = product_window(self.factors)
        return UnitLowerBanded.from_band_matrix(prod, w=self.p)

    def reconstruct(self) -> BandMatrix:
        """L(1) ... L(p) U + C*I, the matrix the chain factors."""
        prod = product_window(tuple(self.factors) + (self.upper,))
        return prod.plus_scaled_identity(self.shift)

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "N": self.n,
            "C": format_rational(self.shift),
            "factors": [
                {"j": f.index, "sub": [format_rational(v) for v in f.sub]}
                for f in self.factors
            ],
            "U": {"diag": [format_rational(v) for v in self.upper.diag]},
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "BidiagonalChain":
        p = int(data["p"])
        n = int(data["N"])
        factors = [
            LowerBidiagonalUnit(int(f["j"]), n, [parse_rational(v) for v in f["sub"]])
            for f in data["factors"]
        ]
        upper = UpperBidiagonal(n, [parse_rational(v) for v in data["U"]["diag"]])
        return cls(p, n, parse_rational(data["C"]), factors, upper)

    def __repr__(self):
        return f"BidiagonalChain(p={self.p}, n={self.n}, shift={self.shift})"


def recurrence_values(hess: BandedHessenberg, z: ScalarLike, nmax: int) -> tuple[Fraction, ...]:
    """Values P_0(z) .. P_nmax(z) of the characteristic sequence at a point.

    P_{n+1}(z) = (z - a(n,n)) P_n(z) - sum_{s=1..p} a(n, n-s) P_{n-s}(z),
    with P_0 = 1 and vanishing negative-index terms. Row n of the truncation
    must be trustworthy, so nmax <= valid_rows.
    """
    if nmax > hess.valid_rows:
        raise IndexOutOfRange(
            f"need rows 0..{nmax - 1} but only {hess.valid_rows} rows are trustworthy"
        )
    z = rational(z)
    values = [Fraction(1)]
    for n in range(nmax):
        acc = (z - hess.a(n, n)) * values[n]
        for s in range(1, hess.p + 1):
            if n - s >= 0:
                acc -= hess.a(n, n - s) * values[n - s]
        values.append(acc)
    return tuple(values)


def characteristic_polys(hess: BandedHessenberg, nmax: int) -> tuple[Polynomial, ...]:
    """Monic characteristic sequence P_0 .. P_nmax of the truncation.

    Built by the band recurrence; P_n also equals det(z I_n - J_n), which
    the tests assert independently.
    """
    if nmax > hess.valid_rows:
        raise IndexOutOfRange(
            f"need rows 0..{nmax - 1} but only {hess.valid_rows} rows are trustworthy"
        )
    zed = Polynomial((0, 1))
    polys = [Polynomial.one()]
    for n in range(nmax):
        acc = (zed - hess.a(n, n)) * polys[n]
        for s in range(1, hess.p + 1):
            if n - s >= 0:
                acc = acc - hess.a(n, n - s) * polys[n - s]
        polys.append(acc)
    return tuple(polys)
