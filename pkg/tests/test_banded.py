"""Banded storage, windowed products, characteristic sequences."""

from fractions import Fraction
import random

import pytest

from banded_darboux import (
    BandMatrix,
    BandedHessenberg,
    BidiagonalChain,
    DenseMatrix,
    IndexOutOfRange,
    LowerBidiagonalUnit,
    SizeMismatch,
    UnitLowerBanded,
    UpperBidiagonal,
    characteristic_polys,
    det_exact,
    hessenberg_from_recurrence,
    multiply_window,
    Polynomial,
    Z,
)
from helpers import (
    catalan_hessenberg,
    dense_mul,
    dense_rows,
    draw_rational,
    random_hessenberg_local,
)


def test_hessenberg_from_recurrence_matches_dense_construction():
    J = catalan_hessenberg(3)
    assert dense_rows(J) == [
        [Fraction(2), Fraction(1), Fraction(0)],
        [Fraction(1), Fraction(2), Fraction(1)],
        [Fraction(0), Fraction(1), Fraction(2)],
    ]
    assert J.is_regular


def test_hessenberg_zero_band_is_not_regular():
    J = hessenberg_from_recurrence(2, 4, lambda i, m: 0)
    assert not J.is_regular


def test_hessenberg_seeded_regularity():
    rng = random.Random(5)
    J = random_hessenberg_local(rng, 3, 8)
    assert J.is_regular == all(J.a(i, i - 3) != 0 for i in range(3, 8))
    assert J.is_regular


def test_hessenberg_band_access_and_bounds():
    J = catalan_hessenberg(4)
    assert J.entry(0, 1) == 1
    assert J.entry(0, 2) == 0
    assert J.a(2, 1) == 1
    with pytest.raises(IndexOutOfRange):
        J.a(0, 1)
    with pytest.raises(IndexOutOfRange):
        J.entry(4, 0)


def test_hessenberg_json_round_trip():
    rng = random.Random(17)
    J = random_hessenberg_local(rng, 2, 5)
    again = BandedHessenberg.from_json_dict(J.to_json_dict())
    assert again == J


def test_multiply_identity_keeps_full_window():
    rng = random.Random(3)
    J = random_hessenberg_local(rng, 2, 5).band_matrix()
    prod = multiply_window(BandMatrix.identity(5), J)
    assert prod == J
    assert prod.valid_rows == 5


def test_multiply_bidiagonal_factors_band_values():
    n = 5
    l1 = LowerBidiagonalUnit(1, n, [1] * (n - 1))
    l2 = LowerBidiagonalUnit(2, n, [2] * (n - 1))
    prod = multiply_window(l1, l2)
    assert prod.valid_rows == n
    assert all(prod.entry(i, i) == 1 for i in range(n))
    assert all(prod.entry(i, i - 1) == 3 for i in range(1, n))
    assert all(prod.entry(i, i - 2) == 2 for i in range(2, n))
    assert dense_rows(prod) == dense_mul(dense_rows(l1), dense_rows(l2))


def test_multiply_upper_times_lower_window_shrinks():
    # U * L for the Catalan instance: Hessenberg with unit superdiagonal,
    # rows 0..N-2 trustworthy; the dense product is the oracle for values.
    n = 6
    U = UpperBidiagonal(n, [Fraction(2), Fraction(3, 2), Fraction(4, 3), 1, 1, 1])
    L = UnitLowerBanded(1, n, {-1: [0, Fraction(1, 2), Fraction(2, 3), 1, 1, 1]})
    prod = multiply_window(U, L)
    assert prod.valid_rows == n - 1
    assert dense_rows(prod) == dense_mul(dense_rows(U), dense_rows(L))
    assert all(prod.entry(i, i + 1) == 1 for i in range(n - 1))


def test_window_bound_is_honest_against_larger_truncation():
    # Rows inside the window agree with a larger truncation's product; the
    # first row beyond it does not (the truncation edge corrupts it).
    rng = random.Random(11)
    n, big = 6, 10
    diag_big = [draw_rational(rng, nonzero=True) for _ in range(big)]
    sub_big = [draw_rational(rng) for _ in range(big - 1)]
    U_small = UpperBidiagonal(n, diag_big[:n])
    L_small = LowerBidiagonalUnit(1, n, sub_big[: n - 1])
    U_big = UpperBidiagonal(big, diag_big)
    L_big = LowerBidiagonalUnit(1, big, sub_big)
    small = multiply_window(U_small, L_small)
    reference = multiply_window(U_big, L_big)
    assert small.valid_rows == n - 1
    for i in range(small.valid_rows):
        for j in range(n):
            assert small.entry(i, j) == reference.entry(i, j)
    last = n - 1
    assert any(small.entry(last, j) != reference.entry(last, j) for j in range(n))


def test_multiply_rejects_size_mismatch():
    with pytest.raises(SizeMismatch):
        multiply_window(BandMatrix.identity(3), BandMatrix.identity(4))


def test_band_closure_of_unit_lower_products():
    rng = random.Random(23)
    n = 7
    for w1, w2 in [(1, 1), (1, 2), (2, 2)]:
        a_bands = {
            d: [draw_rational(rng) if i + d >= 0 else 0 for i in range(n)]
            for d in range(-w1, 0)
        }
        b_bands = {
            d: [draw_rational(rng) if i + d >= 0 else 0 for i in range(n)]
            for d in range(-w2, 0)
        }
        a = UnitLowerBanded(w1, n, a_bands)
        b = UnitLowerBanded(w2, n, b_bands)
        prod = multiply_window(a, b)
        assert prod.upper == 0
        assert prod.lower == w1 + w2
        assert dense_rows(prod) == dense_mul(dense_rows(a), dense_rows(b))
        UnitLowerBanded.from_band_matrix(prod)  # unit diagonal survives


def test_characteristic_initial_polynomial_is_one():
    rng = random.Random(2)
    J = random_hessenberg_local(rng, 2, 5)
    assert characteristic_polys(J, 0) == (Polynomial.one(),)


def test_characteristic_catalan_values():
    J = catalan_hessenberg(4)
    P = characteristic_polys(J, 3)
    assert P[1] == Z - 2
    assert P[2] == Z * Z - 4 * Z + 3
    assert P[3] == Polynomial([-4, 10, -6, 1])


def test_characteristic_nilpotent_case_gives_monomials():
    J = hessenberg_from_recurrence(2, 5, lambda i, m: 0)
    P = characteristic_polys(J, 5)
    for n, poly in enumerate(P):
        assert poly == Polynomial([0] * n + [1])


def test_characteristic_matches_determinants_at_points():
    # P_n(z) = det(z I_n - J_n): monic degree n on both sides, so equality
    # at n+1 points settles it.
    rng = random.Random(31)
    for p in (1, 2, 3):
        J = random_hessenberg_local(rng, p, 6)
        P = characteristic_polys(J, 6)
        for n in range(7):
            for z in range(n + 1):
                minor = DenseMatrix.from_function(
                    n, n, lambda i, j: (z if i == j else 0) - J.entry(i, j)
                )
                assert P[n](z) == det_exact(minor)


def test_characteristic_rejects_untrusted_rows():
    J = catalan_hessenberg(4)
    trimmed = BandedHessenberg(1, 4, {0: J.band_matrix().band(0), -1: J.band_matrix().band(-1)}, valid_rows=2)
    with pytest.raises(IndexOutOfRange):
        characteristic_polys(trimmed, 4)


def _tiny_chain():
    n = 5
    factors = [
        LowerBidiagonalUnit(1, n, [Fraction(i + 1, 2) for i in range(n - 1)]),
        LowerBidiagonalUnit(2, n, [Fraction(2 * i + 1, 3) for i in range(n - 1)]),
    ]
    upper = UpperBidiagonal(n, [Fraction(k + 2, 3) for k in range(n)])
    return BidiagonalChain(2, n, Fraction(1, 2), factors, upper)


def test_chain_gamma_index_round_trip_tiles_every_block():
    chain = _tiny_chain()
    p, n = chain.p, chain.n
    seen = set()
    for t in range(1, (n - 1) * (p + 1) + 1):
        kind, j, r = chain.gamma_location(t)
        assert chain.gamma_index(kind, j, r) == t
        seen.add((kind, j, r))
    # Every block q covers U's row q and each factor's row q+1 exactly once.
    for q in range(n - 1):
        assert ("upper", 0, q) in seen
        for j in range(1, p + 1):
            assert ("factor", j, q + 1) in seen


def test_chain_gamma_values_land_in_declared_slots():
    chain = _tiny_chain()
    p = chain.p
    assert chain.gamma(1) == chain.upper.diag[0]
    assert chain.gamma(2) == chain.factors[0].sub_at_row(1)
    assert chain.gamma(p + 2) == chain.upper.diag[1]
    assert chain.gamma(p + 3) == chain.factors[0].sub_at_row(2)
    assert chain.gamma(2 * p + 3) == chain.upper.diag[2]


def test_chain_reconstruction_and_json_round_trip():
    chain = _tiny_chain()
    recon = chain.reconstruct()
    expected = dense_mul(
        dense_mul(dense_rows(chain.factors[0]), dense_rows(chain.factors[1])),
        dense_rows(chain.upper),
    )
    for i in range(chain.n):
        expected[i][i] += chain.shift
    assert dense_rows(recon) == expected
    assert BidiagonalChain.from_json_dict(chain.to_json_dict()).to_json_dict() == chain.to_json_dict()
