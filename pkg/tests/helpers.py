"""Independent oracles and builders shared by the test modules.

The oracles here deliberately avoid the library code paths they check:
determinants by cofactor expansion, products by dense triple loops,
polynomial division by long division on coefficient lists.
"""

from fractions import Fraction
import random

from banded_darboux import (
    BandedHessenberg,
    FreeEntrySpec,
    ShiftedInstance,
    SingularLeadingMinor,
    UnitLowerBanded,
    ZeroPeelPivot,
    chain_from_instance,
    hessenberg_from_recurrence,
)


def catalan_hessenberg(n):
    """p = 1, diagonal 2, subdiagonal 1: the first dual functional of this
    matrix has the Catalan numbers as moments."""
    return hessenberg_from_recurrence(1, n, lambda i, m: 2 if i == m else 1)


def dense_rows(mat, n=None):
    """Entry grid of anything exposing entry(i, j)."""
    n = mat.n if n is None else n
    return [[mat.entry(i, j) for j in range(n)] for i in range(n)]


def cofactor_det(rows):
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return rows[0][0]
    total = Fraction(0)
    for j, head in enumerate(rows[0]):
        if head == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        sign = -1 if j % 2 else 1
        total += sign * head * cofactor_det(minor)
    return total


def dense_mul(a_rows, b_rows):
    n = len(a_rows)
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            aik = a_rows[i][k]
            if aik == 0:
                continue
            for j in range(n):
                out[i][j] += aik * b_rows[k][j]
    return out


def long_division(num, den):
    """Coefficient-list polynomial division: returns (quotient, remainder)."""
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    while den and den[-1] == 0:
        den.pop()
    quot = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    rem = list(num)
    while len(rem) >= len(den) and any(c != 0 for c in rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) < len(den):
            break
        shift = len(rem) - len(den)
        factor = rem[-1] / den[-1]
        quot[shift] = factor
        for i, c in enumerate(den):
            rem[shift + i] -= factor * c
    while rem and rem[-1] == 0:
        rem.pop()
    return quot, rem


def draw_rational(rng, bound=9, nonzero=False):
    num = rng.randint(-bound, bound)
    while nonzero and num == 0:
        num = rng.randint(-bound, bound)
    return Fraction(num, rng.randint(1, bound))


def random_unit_lower(rng, w, n, bound=9):
    bands = {}
    for d in range(-w, 0):
        bands[d] = [
            draw_rational(rng, bound) if i + d >= 0 else Fraction(0) for i in range(n)
        ]
    return UnitLowerBanded(w, n, bands)


def random_hessenberg_local(rng, p, n, bound=9):
    bands = {}
    for d in range(-p, 1):
        bands[d] = [
            draw_rational(rng, bound, nonzero=(d == -p)) if i + d >= 0 else Fraction(0)
            for i in range(n)
        ]
    return BandedHessenberg(p, n, bands)


def make_chain(rng, p, n, shift=Fraction(0)):
    """Random admissible instance with random free entries; retries the
    (rare) draws that land on a singular shift or a vanishing peel pivot."""
    while True:
        J = random_hessenberg_local(rng, p, n)
        try:
            inst = ShiftedInstance(J, shift)
        except SingularLeadingMinor:
            continue
        free = FreeEntrySpec(
            p, [[draw_rational(rng) for _ in range(p - j)] for j in range(1, p)]
        )
        try:
            return inst, chain_from_instance(inst, free)
        except ZeroPeelPivot:
            continue
