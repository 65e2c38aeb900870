"""Moment-vector functionals, dual sequences, and the orthogonality scan.

A linear functional on polynomials is stored as its truncated moment vector
(value on z^k for k = 0..M). The truncation bound is a hard contract:
applying a functional beyond degree M raises instead of silently reading
zeros, because multiplication by (z - C) consumes one degree and silent
extension would fabricate orthogonality.

A sequence {P_n} satisfying a (p+2)-term band recurrence is orthogonal with
respect to a vector (nu_1, .., nu_p) of functionals in the staircase sense:

    nu_r[z^k P_n] = 0   whenever k*p + r <= n,
    nu_r[z^k P_{k*p + r - 1}] != 0.

Such vectors are exactly the lower-staircase combinations of the dual
sequence, nu_i = sum_{k < i} lambda(i, k) * dual_k with lambda(i, i-1) != 0;
the lambda table is the "ladder" below.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    DegreeExceedsMoments,
    IndexOutOfRange,
    InsufficientMoments,
    LadderViolation,
    NotMonicOrDegreeGap,
    ShapeMismatch,
)
from .exact import (
    DenseMatrix,
    Polynomial,
    ScalarLike,
    det_exact,
    format_rational,
    parse_rational,
    rational,
)

_ZERO = Fraction(0)


class LinearFunctional:
    """Functional on polynomials of degree <= max_degree, as moments."""

    __slots__ = ("moments",)

    def __init__(self, moments: Iterable[ScalarLike]):
        object.__setattr__(self, "moments", tuple(rational(v) for v in moments))
        if not self.moments:
            raise InsufficientMoments("a functional needs at least the degree-0 moment")

    def __setattr__(self, name, value):
        raise AttributeError("LinearFunctional is immutable")

    @property
    def max_degree(self) -> int:
        return len(self.moments) - 1

    def apply(self, q: Polynomial) -> Fraction:
        if q.degree > self.max_degree:
            raise DegreeExceedsMoments(q.degree, self.max_degree)
        return sum(
            (c * m for c, m in zip(q.coefficients, self.moments)), _ZERO
        )

    def shift_multiply(self, c: ScalarLike) -> "LinearFunctional":
        """The functional q -> self[(z - c) q]; costs one degree of budget."""
        if self.max_degree < 1:
            raise InsufficientMoments("need at least two moments to multiply by (z - c)")
        c = rational(c)
        return LinearFunctional(
            tuple(self.moments[k + 1] - c * self.moments[k] for k in range(self.max_degree))
        )

    def truncated(self, max_degree: int) -> "LinearFunctional":
        if max_degree > self.max_degree:
            raise InsufficientMoments(
                f"cannot extend moments from {self.max_degree} to {max_degree}"
            )
        return LinearFunctional(self.moments[: max_degree + 1])

    def scaled(self, c: ScalarLike) -> "LinearFunctional":
        c = rational(c)
        return LinearFunctional(tuple(c * m for m in self.moments))

    def __add__(self, other):
        if not isinstance(other, LinearFunctional):
            return NotImplemented
        m = min(self.max_degree, other.max_degree)
        return LinearFunctional(
            tuple(a + b for a, b in zip(self.moments[: m + 1], other.moments[: m + 1]))
        )

    def agrees_with(self, other: "LinearFunctional", up_to: int | None = None) -> bool:
        """Moment-vector equality up to a degree (default: common range)."""
        m = min(self.max_degree, other.max_degree)
        if up_to is not None:
            if up_to > m:
                raise InsufficientMoments(f"cannot compare up to degree {up_to} with budget {m}")
            m = up_to
        return self.moments[: m + 1] == other.moments[: m + 1]

    def __eq__(self, other):
        if not isinstance(other, LinearFunctional):
            return NotImplemented
        return self.moments == other.moments

    def __hash__(self):
        return hash(self.moments)

    def __repr__(self):
        return f"LinearFunctional(M={self.max_degree})"

    def to_json_dict(self) -> dict:
        return {
            "M": self.max_degree,
            "moments": [format_rational(v) for v in self.moments],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "LinearFunctional":
        moments = [parse_rational(v) for v in data["moments"]]
        if len(moments) != int(data["M"]) + 1:
            raise ShapeMismatch("moment count disagrees with declared degree bound")
        return cls(moments)


class OrthogonalityVector:
    """A p-tuple of functionals over a common moment budget.

    Entries with longer budgets are truncated to the common minimum so that
    one bound governs every application.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[LinearFunctional]):
        entries = tuple(entries)
        if not entries:
            raise ShapeMismatch("an orthogonality vector needs at least one entry")
        m = min(f.max_degree for f in entries)
        object.__setattr__(
            self, "entries", tuple(f.truncated(m) for f in entries)
        )

    def __setattr__(self, name, value):
        raise AttributeError("OrthogonalityVector is immutable")

    @property
    def p(self) -> int:
        return len(self.entries)

    @property
    def max_degree(self) -> int:
        return self.entries[0].max_degree

    def entry(self, r: int) -> LinearFunctional:
        """1-based component access: entry(1) .. entry(p)."""
        if not 1 <= r <= self.p:
            raise IndexOutOfRange(f"component {r} outside 1..{self.p}")
        return self.entries[r - 1]

    def __eq__(self, other):
        if not isinstance(other, OrthogonalityVector):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"OrthogonalityVector(p={self.p}, M={self.max_degree})"

    def to_json_dict(self) -> dict:
        return {"entries": [f.to_json_dict() for f in self.entries]}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "OrthogonalityVector":
        return cls([LinearFunctional.from_json_dict(f) for f in data["entries"]])


class LambdaLadder:
    """Strictly lower-staircase coefficient table over a dual sequence.

    Row i (1-based, i = 1..nrows) holds lambda(i, k) for k = 0..i-1. The
    table is regular when every diagonal entry lambda(i, i-1) is nonzero.
    `stage` tags which transform stage the ladder belongs to (0 = source).
    Entries with k >= i read as structural zeros.
    """

    __slots__ = ("rows", "stage")

    def __init__(self, rows: Sequence[Iterable[ScalarLike]], stage: int = 0):
        rows = tuple(tuple(rational(v) for v in row) for row in rows)
        for i, row in enumerate(rows, start=1):
            if len(row) != i:
                raise ShapeMismatch(f"ladder row {i} needs {i} values, got {len(row)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "stage", stage)

    def __setattr__(self, name, value):
        raise AttributeError("LambdaLadder is immutable")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def value(self, i: int, k: int) -> Fraction:
        """lambda(i, k); zero for k >= i (the staircase's upper part)."""
        if not (1 <= i <= self.nrows and 0 <= k):
            raise IndexOutOfRange(f"ladder position ({i}, {k}) out of range")
        if k >= i:
            return _ZERO
        return self.rows[i - 1][k]

    @property
    def is_regular(self) -> bool:
        return all(row[i - 1] != 0 for i, row in enumerate(self.rows, start=1))

    def check_regular(self) -> None:
        for i, row in enumerate(self.rows, start=1):
            if row[i - 1] == 0:
                raise LadderViolation(i, i - 1, _ZERO, f"ladder diagonal ({i}, {i - 1}) is zero")

    def __eq__(self, other):
        if not isinstance(other, LambdaLadder):
            return NotImplemented
        return (self.rows, self.stage) == (other.rows, other.stage)

    def __hash__(self):
        return hash((self.rows, self.stage))

    def __repr__(self):
        return f"LambdaLadder(nrows={self.nrows}, stage={self.stage})"

    def to_json_dict(self) -> dict:
        return {
            "p": self.nrows,
            "lambda": [[format_rational(v) for v in row] for row in self.rows],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "LambdaLadder":
        return cls([[parse_rational(v) for v in row] for row in data["lambda"]])


def apply(f: LinearFunctional, q: Polynomial) -> Fraction:
    return f.apply(q)


def shift_multiply(f: LinearFunctional, c: ScalarLike) -> LinearFunctional:
    return f.shift_multiply(c)


def _validate_monic_run(polys: Sequence[Polynomial]) -> None:
    for n, poly in enumerate(polys):
        if poly.degree != n or not poly.is_monic:
            raise NotMonicOrDegreeGap(
                f"position {n} holds degree {poly.degree}, monic={poly.is_monic}"
            )


def dual_sequence(polys: Sequence[Polynomial]) -> tuple[LinearFunctional, ...]:
    """Functionals dual_j with dual_j[P_i] = delta_{ij}, i, j = 0..M.

    The coefficient matrix A (row i = coefficients of P_i) is unit lower
    triangular, so the moment vectors are the columns of its inverse,
    obtained by forward substitution; the dual sequence is unique.
    """
    _validate_monic_run(polys)
    m = len(polys) - 1
    rows = [
        [polys[i].coefficient(k) for k in range(m + 1)] for i in range(m + 1)
    ]
    # inv columns: solve A x = e_j; x vanishes below index j.
    columns: list[list[Fraction]] = []
    for j in range(m + 1):
        x = [_ZERO] * (m + 1)
        x[j] = Fraction(1)
        for i in range(j + 1, m + 1):
            acc = _ZERO
            row = rows[i]
            for k in range(j, i):
                if x[k]:
                    acc += row[k] * x[k]
            x[i] = -acc
        columns.append(x)
    return tuple(
        LinearFunctional(columns[j]) for j in range(m + 1)
    )


def canonical_nu(duals: Sequence[LinearFunctional], p: int) -> OrthogonalityVector:
    """The existence witness (dual_0, .., dual_{p-1}).

    Note: for p >= 2 this vector generically fails the staircase-minor
    hypotheses of the transform engine (its minor at stage 0, size 1 is the
    structural zero lambda(2, 0)); it is the canonical negative test there.
    """
    if len(duals) < p:
        raise ShapeMismatch(f"need {p} dual functionals, got {len(duals)}")
    return OrthogonalityVector(duals[:p])


def lambda_of(nu: OrthogonalityVector, polys: Sequence[Polynomial]) -> LambdaLadder:
    """Recover the ladder from nu by lambda(i, k) = nu_i[P_k].

    Also validates the staircase: nu_i[P_k] must vanish for k >= i and the
    diagonal nu_i[P_{i-1}] must not; a violation means nu is not a vector of
    staircase orthogonality for {P_n} in ladder form.
    """
    p = nu.p
    if len(polys) < p:
        raise NotMonicOrDegreeGap(f"need the first {p} polynomials, got {len(polys)}")
    _validate_monic_run(polys[:p])
    rows = []
    for i in range(1, p + 1):
        f = nu.entry(i)
        for k in range(i, p):
            value = f.apply(polys[k])
            if value != 0:
                raise LadderViolation(i, k, value, f"nu_{i}[P_{k}] = {value}, expected 0")
        diag = f.apply(polys[i - 1])
        if diag == 0:
            raise LadderViolation(i, i - 1, diag, f"nu_{i}[P_{i - 1}] = 0, expected nonzero")
        rows.append([f.apply(polys[k]) for k in range(i - 1)] + [diag])
    return LambdaLadder(rows, stage=0)


def build_nu(
    ladder: LambdaLadder, duals: Sequence[LinearFunctional]
) -> OrthogonalityVector:
    """Assemble nu_i = sum_{k < i} lambda(i, k) dual_k from a regular ladder."""
    ladder.check_regular()
    p = ladder.nrows
    if len(duals) < p:
        raise ShapeMismatch(f"need {p} dual functionals, got {len(duals)}")
    m = min(f.max_degree for f in duals[:p])
    entries = []
    for i in range(1, p + 1):
        moments = [_ZERO] * (m + 1)
        for k in range(i):
            lam = ladder.value(i, k)
            if lam == 0:
                continue
            for deg in range(m + 1):
                moments[deg] += lam * duals[k].moments[deg]
        entries.append(LinearFunctional(moments))
    return OrthogonalityVector(entries)


def delta_det(ladder: LambdaLadder, j: int, m: int) -> Fraction:
    """Staircase minor of size m at offset j; the empty minor is 1.

    Matrix convention: entry(row r, col c) = lambda(j + 1 + c, r) for
    r = 0..m-1 and c = 1..m, the staircase's upper part reading as zero.
    The offset-j minors of a source ladder equal the offset-0 minors of the
    corresponding stage-j ladder (the transport factors are unit
    triangular), which the engine cross-checks.
    """
    if j < 0 or m < 0:
        raise IndexOutOfRange(f"offset {j} and size {m} must be nonnegative")
    if m == 0:
        return Fraction(1)
    if j + m + 1 > ladder.nrows:
        raise IndexOutOfRange(
            f"minor (offset {j}, size {m}) needs ladder row {j + m + 1}, have {ladder.nrows}"
        )
    matrix = DenseMatrix.from_function(m, m, lambda r, c: ladder.value(j + 2 + c, r))
    return det_exact(matrix)


@dataclass(frozen=True)
class Witness:
    """One failed orthogonality check: kind is "zero" or "nonzero"."""

    kind: str
    r: int
    k: int
    n: int
    value: Fraction

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "r": self.r,
            "k": self.k,
            "n": self.n,
            "value": format_rational(self.value),
        }


@dataclass(frozen=True)
class OrthogonalityReport:
    """Outcome of the exhaustive staircase scan over a finite window."""

    p: int
    window: int
    zero_checks: int
    nonzero_checks: int
    failures: tuple[Witness, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "window": self.window,
            "zero_checks": self.zero_checks,
            "nonzero_checks": self.nonzero_checks,
            "passed": self.passed,
            "witnesses": [w.to_json_dict() for w in self.failures],
        }


def is_p_orthogonal(
    nu: OrthogonalityVector,
    polys: Sequence[Polynomial],
    p: int,
    window: int,
) -> OrthogonalityReport:
    """Scan every staircase condition with indices inside the window.

    Zero conditions: nu_r[z^k P_n] = 0 for all r = 1..p, k >= 0 and
    n <= window with k*p + r <= n. Nonzero conditions: nu_r[z^k P_{kp+r-1}]
    != 0 for all k with kp + r - 1 <= window. The moment budget must cover
    every application (the caller sizes it; apply raises otherwise).
    """
    if nu.p != p:
        raise ShapeMismatch(f"vector has {nu.p} entries, expected {p}")
    if len(polys) <= window:
        raise ShapeMismatch(f"need polynomials 0..{window}, got {len(polys)}")
    failures: list[Witness] = []
    zero_checks = 0
    nonzero_checks = 0
    for r in range(1, p + 1):
        f = nu.entry(r)
        for n in range(window + 1):
            k = 0
            while k * p + r <= n:
                value = f.apply(polys[n].times_z_power(k))
                zero_checks += 1
                if value != 0:
                    failures.append(Witness("zero", r, k, n, value))
                k += 1
        k = 0
        while k * p + r - 1 <= window:
            idx = k * p + r - 1
            value = f.apply(polys[idx].times_z_power(k))
            nonzero_checks += 1
            if value == 0:
                failures.append(Witness("nonzero", r, k, idx, value))
            k += 1
    return OrthogonalityReport(p, window, zero_checks, nonzero_checks, tuple(failures))
