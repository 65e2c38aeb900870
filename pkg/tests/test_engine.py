"""The transport engine: hypotheses, stage ladders, free entries, rotation
of vectors, and full certificate runs."""

from fractions import Fraction
import random

import pytest

from banded_darboux import (
    ConfigError,
    ConsistencyFailure,
    DenseMatrix,
    FreeEntrySpec,
    HypothesisViolated,
    IndexOutOfRange,
    InstanceConfig,
    LinearFunctional,
    LambdaLadder,
    LowerBidiagonalUnit,
    OrthogonalityVector,
    ShiftedInstance,
    bidiagonal_chain_factor,
    build_nu,
    canonical_nu,
    chain_from_instance,
    characteristic_polys,
    check_hypotheses,
    delta_det,
    dual_sequence,
    free_entries_from_nu,
    generate,
    is_p_orthogonal,
    lambda_of,
    moment_budget,
    peel_stages,
    product_window,
    run_theorem,
    shifted_lu,
    stage_ladder,
    staircase_transport_identity,
    transformed_nu,
    transformed_polys,
)
from banded_darboux.engine import _staging
from helpers import catalan_hessenberg, draw_rational


def seeded_regular_ladder(rng, p):
    rows = []
    for i in range(1, p + 1):
        rows.append(
            [draw_rational(rng) for _ in range(i - 1)] + [draw_rational(rng, nonzero=True)]
        )
    return LambdaLadder(rows)


def built_instance(p, seed, window=None, nu_source="random", nu_ladder=None, shift="0"):
    window = 4 * p if window is None else window
    n = max(window + p + 2, moment_budget(window, p) + 1)
    cfg = InstanceConfig(
        p=p, n=n, window=window, seed=seed, shift=shift,
        nu_source=nu_source, nu_ladder=nu_ladder,
    )
    return cfg, generate(cfg)


# ------------------------------------------------------------- hypotheses


def test_hypotheses_empty_for_single_band():
    assert check_hypotheses(LambdaLadder([[3]]), 1) == []


def test_hypotheses_reject_canonical_staircase():
    ladder = LambdaLadder([[1], [0, 1], [0, 0, 1]])
    with pytest.raises(HypothesisViolated) as err:
        check_hypotheses(ladder, 3)
    assert (err.value.stage, err.value.size) == (0, 1)


def test_hypotheses_generic_ladder_values_match_minors():
    rng = random.Random(501)
    ladder = seeded_regular_ladder(rng, 3)
    table = check_hypotheses(ladder, 3)
    assert [(j, m) for j, m, _ in table] == [(0, 1), (0, 2), (1, 1)]
    for j, m, value in table:
        assert value == delta_det(ladder, j, m) != 0


# ------------------------------------------------------------ stage ladder


def test_stage_ladder_degenerate_identity_factor():
    # All-zero factor entries are only consistent when the dropped last
    # equation is 0 = 0, i.e. the old ladder's top staircase column is zero.
    old = LambdaLadder([[1], [1, 0], [3, 5, 0]])
    new = stage_ladder(old, [0, 0])
    assert new.rows == ((1,), (3, 5))
    assert new.stage == 1


def test_stage_ladder_one_by_one_solve():
    old = LambdaLadder([[2], [6, 3]])
    new = stage_ladder(old, [Fraction(1, 2)])
    assert new.value(1, 0) == old.value(2, 0) == 6
    # side condition: old(2, 1) = sub(1) * new(1, 0) -> 3 = (1/2) * 6
    assert old.value(2, 1) == Fraction(1, 2) * new.value(1, 0)


def test_stage_ladder_side_condition_failure():
    old = LambdaLadder([[2], [6, 3]])
    with pytest.raises(ConsistencyFailure):
        stage_ladder(old, [Fraction(1, 7)])


def test_stage_ladder_matches_transport_matrix_identity():
    rng = random.Random(502)
    for p in (2, 3, 4):
        ladder = seeded_regular_ladder(rng, p)
        try:
            staging = _staging(ladder, p)
        except Exception:
            continue
        if staging.violation is not None:
            continue
        n = p + 2
        # Build the bidiagonal factors from the free rows to check the
        # matrix identity on leading blocks of every size.
        factors = [
            LowerBidiagonalUnit(
                j + 1, n, list(staging.free_rows[j]) + [0] * (n - 1 - len(staging.free_rows[j]))
            )
            for j in range(p - 1)
        ]
        for j in range(1, p):
            for s in range(1, p - j):
                assert staircase_transport_identity(
                    factors, staging.stage_ladders, j, s
                )


# ------------------------------------------------------------ free entries


def test_free_entries_single_band_is_empty():
    assert free_entries_from_nu(LambdaLadder([[5]]), 1) == FreeEntrySpec(1, ())


def test_free_entries_two_bands_single_ratio():
    ladder = LambdaLadder([[2], [3, 5]])
    free = free_entries_from_nu(ladder, 2)
    assert free.value(1, 1) == Fraction(5, 3)  # lambda(2,1)/lambda(2,0)


def test_free_entries_alternating_sum_oracle():
    # At every stage, applying the inverse-bidiagonal's last row to the old
    # ladder's next column must vanish:
    #   old(k+1, k) - old(k+1, k-1) g_k + old(k+1, k-2) g_{k-1} g_k - ... = 0
    # with g_r the chosen factor entries.
    rng = random.Random(503)
    for p in (2, 3, 4):
        for _ in range(4):
            ladder = seeded_regular_ladder(rng, p)
            staging = _staging(ladder, p)
            if staging.violation is not None:
                continue
            for j, row in enumerate(staging.free_rows):
                old = staging.stage_ladders[j]
                for k in range(1, old.nrows):
                    total = Fraction(0)
                    sign = 1
                    gamma_tail = Fraction(1)
                    for t in range(k, -1, -1):
                        total += sign * old.value(k + 1, t) * gamma_tail
                        if t >= 1:
                            gamma_tail *= row[t - 1]
                        sign = -sign
                    assert total == 0


def test_free_entries_raise_on_zero_minor():
    ladder = LambdaLadder([[1], [0, 1], [0, 0, 1]])
    with pytest.raises(HypothesisViolated):
        free_entries_from_nu(ladder, 3)


def test_staged_minors_agree_both_routes():
    rng = random.Random(504)
    ladder = seeded_regular_ladder(rng, 4)
    staging = _staging(ladder, 4)
    if staging.violation is None:
        for j, m, value in staging.deltas:
            assert delta_det(ladder, j, m) == value
            assert delta_det(staging.stage_ladders[j], 0, m) == value


# --------------------------------------------------------------- rotations


def test_rotated_vector_positions():
    entries = [LinearFunctional([i + 1, 0, 0, 0]) for i in range(3)]
    nu = OrthogonalityVector(entries)
    rot = transformed_nu(nu, Fraction(0), 2)
    assert rot.p == 3
    # (nu_3, (z-0) nu_1, (z-0) nu_2): first entry keeps nu_3's moments.
    assert rot.entries[0].moments == entries[2].moments[:3]
    assert rot.entries[1].moments == entries[0].shift_multiply(0).moments
    assert rot.entries[2].moments == entries[1].shift_multiply(0).moments


def test_rotated_vector_full_turn_shifts_everything():
    entries = [LinearFunctional([1, 2, 3]), LinearFunctional([4, 5, 6])]
    nu = OrthogonalityVector(entries)
    rot = transformed_nu(nu, Fraction(1), 2)
    assert rot.entries[0].moments == entries[0].shift_multiply(1).moments
    assert rot.entries[1].moments == entries[1].shift_multiply(1).moments


def test_rotated_vector_bounds():
    nu = OrthogonalityVector([LinearFunctional([1, 2])])
    with pytest.raises(IndexOutOfRange):
        transformed_nu(nu, 0, 2)
    with pytest.raises(IndexOutOfRange):
        transformed_nu(nu, 0, 0)


def test_classical_kernel_functional_p1():
    # p = 1: the rotated vector is ((z - C) nu) and it certifies the kernel
    # sequence; checked by the direct scan.
    _, built = built_instance(1, seed=21, window=6)
    inst = built.instance
    chain = chain_from_instance(inst, FreeEntrySpec(1, ()))
    seq = transformed_polys(chain, 1, 6)
    rotated = transformed_nu(built.nu, inst.shift, 1)
    assert is_p_orthogonal(rotated, seq, 1, 6).passed


def test_full_rotation_needs_no_minor_hypothesis():
    # Even the canonical vector (whose minors vanish) transports to j = p,
    # for any choice of free entries.
    for p, seed in [(2, 31), (3, 32)]:
        _, built = built_instance(p, seed=seed, nu_source="canonical")
        inst = built.instance
        rng = random.Random(seed)
        free = FreeEntrySpec(
            p, [[draw_rational(rng) for _ in range(p - j)] for j in range(1, p)]
        )
        chain = chain_from_instance(inst, free)
        window = 4 * p
        seq = transformed_polys(chain, p, window)
        rotated = transformed_nu(built.nu, inst.shift, p)
        assert is_p_orthogonal(rotated, seq, p, window).passed


# ------------------------------------------------------------ full pipeline


def test_certificate_catalan_p1():
    n = 16
    inst = ShiftedInstance(catalan_hessenberg(n), 0)
    polys = characteristic_polys(inst.J, moment_budget(6, 1))
    duals = dual_sequence(polys)
    nu = canonical_nu(duals, 1)
    cert = run_theorem(inst, nu, 6)
    assert cert.passed
    assert cert.hypotheses == ()
    assert [v.j for v in cert.stage_verdicts] == [1]


def test_certificate_seeded_p2_p3():
    for p, seed in [(2, 41), (3, 43)]:
        _, built = built_instance(p, seed=seed)
        cert = run_theorem(built.instance, built.nu, 4 * p)
        assert cert.passed
        assert [v.j for v in cert.stage_verdicts] == list(range(1, p + 1))
        assert all(ok for _, _, ok in cert.transport_checks)
        assert cert.structure_ok
        assert cert.chain is not None and cert.partial is None


def test_certificate_four_bands_deep_stage_recursion():
    # Three peeling stages, six transport identities: the widest case the
    # generator parameters keep cheap.
    _, built = built_instance(4, seed=9)
    cert = run_theorem(built.instance, built.nu, 16)
    assert cert.passed
    assert [v.j for v in cert.stage_verdicts] == [1, 2, 3, 4]
    assert [(j, s) for j, s, _ in cert.transport_checks] == [
        (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (2, 1),
    ]


def test_certificate_rejects_canonical_vector_immediately():
    _, built = built_instance(2, seed=44, nu_source="canonical")
    with pytest.raises(HypothesisViolated) as err:
        run_theorem(built.instance, built.nu, 8)
    assert (err.value.stage, err.value.size) == (0, 1)
    assert err.value.value == 0


def test_certificate_partial_on_staged_zero():
    # lambda(3, 0) = 0 keeps the stage-0 minors alive but kills the stage-1
    # minor, so exactly one factor is peeled and the remainder (2 bands)
    # still reconstructs L together with it.
    ladder_rows = [["1"], ["1", "1"], ["0", "1", "1"]]
    cfg, built = built_instance(3, seed=45, window=9, nu_source="ladder", nu_ladder=ladder_rows)
    cert = run_theorem(built.instance, built.nu, 9)
    assert not cert.passed
    assert cert.partial is not None
    assert cert.partial.stages == 1
    assert cert.partial.violated == (1, 1)
    assert cert.partial.remainder_bands == 2
    ladder = lambda_of(built.nu, built.source_polys)
    staging = _staging(ladder, 3)
    L, _ = shifted_lu(built.instance)
    factors, remainder = peel_stages(L, staging.free_rows, 1)
    assert product_window([factors[0], remainder]) == L.band_matrix()


def test_certificate_config_guards():
    _, built = built_instance(2, seed=46)
    with pytest.raises(ConfigError):
        run_theorem(built.instance, built.nu, built.instance.n)  # window too big


def test_mixed_vectors_from_adjacent_stages():
    # From vectors at stages j and j+1 one can splice mixed vectors that
    # remain staircase-orthogonal: the tail of stage j+1 prefixed by
    # (z - C) nu^j_1 certifies stage j+1, and nu^j_1 followed by the lead
    # of stage j+1 certifies stage j.
    p, seed = 3, 47
    # Generate with extra moment headroom: the spliced vectors re-shift an
    # already-shifted entry, consuming one more degree than a plain run.
    _, built = built_instance(p, seed=seed, window=4 * p + p)
    inst = built.instance
    window = 4 * p
    cert = run_theorem(inst, built.nu, window)
    assert cert.passed
    chain = cert.chain
    seqs = {j: transformed_polys(chain, j, window) for j in range(p + 1)}
    vectors = {0: built.nu}
    for j in range(1, p + 1):
        vectors[j] = transformed_nu(built.nu, inst.shift, j)
    for j in range(p):
        nu_j, nu_next = vectors[j], vectors[j + 1]
        spliced_up = OrthogonalityVector(
            list(nu_next.entries[: p - 1]) + [nu_j.entries[0].shift_multiply(inst.shift)]
        )
        assert is_p_orthogonal(spliced_up, seqs[j + 1], p, window).passed
        spliced_down = OrthogonalityVector(
            [nu_j.entries[0]] + list(nu_next.entries[: p - 1])
        )
        assert is_p_orthogonal(spliced_down, seqs[j], p, window).passed


def test_certificate_json_shape_is_stable():
    _, built = built_instance(2, seed=48)
    cert = run_theorem(built.instance, built.nu, 8)
    doc = cert.to_json_dict()
    assert list(doc) == [
        "fingerprint", "p", "N", "C", "window", "moment_budget", "hypotheses",
        "free_entries", "transport_checks", "structure_ok", "stages",
        "partial", "passed",
    ]
    assert doc["passed"] is True
    again = run_theorem(built.instance, built.nu, 8)
    assert again.to_json_dict() == doc
