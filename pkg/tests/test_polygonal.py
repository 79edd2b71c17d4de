import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heptagonal.polygonal import (
    CoeffVector,
    RepTable,
    generalized_values_upto,
    polygonal_number,
    rep_table,
    shifted_rep_count,
    shifted_rep_table,
    unary_counts,
    verify_completion_identity,
)
from heptagonal.quadform import ShiftedDiagonalForm


def test_heptagonal_numbers():
    assert [polygonal_number(7, x) for x in range(-3, 4)] == [27, 13, 4, 0, 1, 7, 18]
    assert generalized_values_upto(7, 30) == [0, 1, 4, 7, 13, 18, 27]
    assert polygonal_number(3, 4) == 10
    assert polygonal_number(4, -5) == 25
    with pytest.raises(ValueError):
        polygonal_number(2, 1)


@given(st.integers(3, 12), st.integers(-200, 200))
def test_polygonal_matches_closed_form(m, x):
    assert 2 * polygonal_number(m, x) == (m - 2) * x * x - (m - 4) * x


def test_coeff_vector_validation():
    v = CoeffVector.parse(7, "1, 2,4")
    assert v.coeffs == (1, 2, 4) and v.ell == 3
    assert v.extend(131).coeffs == (1, 2, 4, 131)
    for bad in ("", "2,1", "0,1", "1,-3"):
        with pytest.raises(ValueError):
            CoeffVector.parse(7, bad)
    with pytest.raises(ValueError):
        CoeffVector(7, tuple(range(1, 10)))
    with pytest.raises(ValueError):
        CoeffVector.parse(7, "a,b")


def brute_reps(m, coeffs, n):
    bound = 2 + math.isqrt(2 * n)
    xs = range(-bound, bound + 1)
    return sum(
        1
        for x in itertools.product(xs, repeat=len(coeffs))
        if sum(a * polygonal_number(m, xi) for a, xi in zip(coeffs, x)) == n
    )


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 9), st.lists(st.integers(1, 6), min_size=1, max_size=3), st.integers(0, 40))
def test_rep_table_matches_enumeration(m, coeffs, n):
    v = CoeffVector(m, tuple(sorted(coeffs)))
    assert rep_table(v, n)[n] == brute_reps(m, v.coeffs, n)


def test_unary_counts_cover_negative_arguments():
    counts = unary_counts(7, 1, 30)
    assert counts[0] == 1 and counts[1] == 1 and counts[4] == 1
    assert int(counts.sum()) == len(generalized_values_upto(7, 30))


def test_count_at_zero_is_one():
    assert rep_table(CoeffVector(7, (1, 1, 1, 3)), 0)[0] == 1


def test_shifted_table_matches_meet_in_middle():
    f = ShiftedDiagonalForm((1, 1, 1, 3), 7, 10)
    table = shifted_rep_table(f, 2000)
    for h in range(0, 2001, 7):
        assert table[h] == shifted_rep_count(f, h)


def test_shifted_rep_count_small_cases():
    f = ShiftedDiagonalForm((1,), 7, 10)
    assert shifted_rep_count(f, 49) == 1  # x = 7
    assert shifted_rep_count(f, 9) == 1  # x = -3
    assert shifted_rep_count(f, 4) == 0
    assert shifted_rep_count(f, -1) == 0


@pytest.mark.parametrize("m", [5, 7, 8])
@pytest.mark.parametrize("coeffs", [(1, 1, 1, 3), (1, 2, 4), (1, 1, 3, 3)])
def test_completion_identity(m, coeffs):
    assert verify_completion_identity(CoeffVector(m, coeffs), 150)


def test_completion_identity_reports_counterexample():
    check = verify_completion_identity(CoeffVector(7, (1, 1, 1, 3)), 200)
    assert check.ok and check.counterexample is None and bool(check)


def test_completed_target():
    v = CoeffVector(7, (1, 1, 1, 3))
    assert v.completed_target(1) == 40 + 54
    assert v.completed_form() == ShiftedDiagonalForm((1, 1, 1, 3), 7, 10)


def test_rep_table_cache_roundtrip(tmp_path):
    v = CoeffVector(7, (1, 2, 4))
    first = rep_table(v, 500, cache_dir=tmp_path)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["r_m7_1-2-4_N500.u64", "r_m7_1-2-4_N500.u64.meta.json"]
    raw = (tmp_path / files[0]).read_bytes()
    assert len(raw) == 8 * 501
    assert np.array_equal(np.frombuffer(raw, dtype="<u8"), first.counts)
    second = rep_table(v, 500, cache_dir=tmp_path)
    assert np.array_equal(first.counts, second.counts)
    loaded = RepTable.load(tmp_path / files[0])
    assert loaded.coeffs == (1, 2, 4) and loaded.m == 7 and len(loaded) == 501


def test_shifted_table_cache(tmp_path):
    f = ShiftedDiagonalForm((1, 1), 7, 10)
    a = shifted_rep_table(f, 300, cache_dir=tmp_path)
    b = shifted_rep_table(f, 300, cache_dir=tmp_path)
    assert np.array_equal(a.counts, b.counts)
    assert any(p.name.startswith("s_1-1_N300_r7_M10") for p in tmp_path.iterdir())


def test_cache_rejects_truncated_file(tmp_path):
    table = rep_table(CoeffVector(7, (1,)), 50, cache_dir=tmp_path)
    path = tmp_path / "r_m7_1_N50.u64"
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError):
        RepTable.load(path)
    assert table.limit == 50


def test_overflow_is_detected():
    with pytest.raises(OverflowError):
        rep_table(CoeffVector(3, (1,) * 8), 10 ** 6)


def test_negative_limit_rejected():
    with pytest.raises(ValueError):
        rep_table(CoeffVector(7, (1,)), -1)
