import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heptagonal import arith, quadform
from heptagonal.quadform import (
    ShiftedDiagonalForm,
    eisenstein_coefficient,
    gamma_p_2,
    hilbert_symbol,
    is_anisotropic,
    is_minkowski_reduced,
    lattice_count,
    lattice_count_bound,
    level_from_gram,
    local_count,
    local_density,
    minkowski_reduce,
    modular_level_character,
)


def test_form_invariants():
    f = ShiftedDiagonalForm((1, 1, 1, 3), 7, 10)
    assert f.discriminant == 48
    assert f.level == 12
    assert f.character_discriminant == 12
    assert f.r == 7 and f.M == 10
    assert ShiftedDiagonalForm((1, 2), 17, 10).r == 7
    with pytest.raises(ValueError):
        ShiftedDiagonalForm((0, 1))


@pytest.mark.parametrize(
    "coeffs, M, expected",
    [((1, 1, 1, 3), 10, (1200, 12)), ((1, 2, 4, 131), 10, (400 * 524, 4 * 1048)), ((1, 1, 1, 1), 1, (4, 4))],
)
def test_modular_level_character(coeffs, M, expected):
    assert modular_level_character(ShiftedDiagonalForm(coeffs, 0, M)) == expected


def test_four_squares_theta_has_level_four():
    # theta^4 is modular for Gamma_0(4); 4 lcm(a) M^2 gives 4, not 16
    assert modular_level_character(ShiftedDiagonalForm((1, 1, 1, 1)))[0] == 4


def test_modular_level_character_needs_four_variables():
    with pytest.raises(ValueError):
        modular_level_character(ShiftedDiagonalForm((1, 2, 3)))


def test_level_from_gram_diagonal():
    assert level_from_gram(np.diag([2, 2, 2, 2])) == 4
    assert level_from_gram(np.diag([2, 4, 8, 262])) == 4 * 524


def brute_lattice_count(coeffs, residues, M, n):
    ranges = [range(-math.isqrt(n // a) - 1, math.isqrt(n // a) + 2) for a in coeffs]
    count = 0
    for x in itertools.product(*ranges):
        if all((xi - r) % M == 0 for xi, r in zip(x, residues)):
            if sum(a * xi * xi for a, xi in zip(coeffs, x)) <= n:
                count += 1
    return count


def test_lattice_count_examples():
    assert lattice_count(ShiftedDiagonalForm((1,)), 4) == 5
    assert lattice_count(ShiftedDiagonalForm((1, 1)), 1) == 5
    assert lattice_count(ShiftedDiagonalForm((1,)), -1) == 0


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(1, 20), min_size=1, max_size=4),
    st.sampled_from([1, 2, 10]),
    st.integers(0, 9),
    st.integers(0, 120),
)
def test_lattice_count_matches_enumeration(coeffs, M, r, n):
    f = ShiftedDiagonalForm(tuple(coeffs), r, M)
    assert lattice_count(f, n) == brute_lattice_count(f.coeffs, (f.r,) * f.ell, M, n)


def test_lattice_count_general_gram():
    gram = np.array([[2, 1], [1, 2]])  # x^2 + xy + y^2
    n = 30
    brute = sum(1 for x in range(-10, 11) for y in range(-10, 11) if x * x + x * y + y * y <= n)
    assert lattice_count(gram, n) == brute
    assert lattice_count(np.diag([2, 4]), 10) == lattice_count(ShiftedDiagonalForm((1, 2)), 10)


def test_lattice_count_bound_one_variable():
    # 3 sqrt(8) / sqrt(2) + 1 = 7 for Q = x^2, M = 1, n = 4
    bound = lattice_count_bound(ShiftedDiagonalForm((1,)), 4)
    assert bound.contains(7)
    assert lattice_count(ShiftedDiagonalForm((1,)), 4) <= bound.hi


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(1, 20), min_size=1, max_size=4),
    st.sampled_from([1, 2, 10]),
    st.integers(0, 9),
    st.integers(1, 500),
)
def test_lattice_count_bound_dominates(coeffs, M, r, n):
    f = ShiftedDiagonalForm(tuple(coeffs), r, M)
    assert lattice_count(f, n) <= lattice_count_bound(f, n).hi


def test_lattice_count_bound_shifted_line():
    f = ShiftedDiagonalForm((1,), 7, 10)
    counts = np.zeros(10 ** 4 + 1, dtype=np.int64)
    for x in range(-110, 111):
        if (x - 7) % 10 == 0 and x * x <= 10 ** 4:
            counts[x * x] += 1
    cumulative = np.cumsum(counts)
    for n in range(1, 10 ** 4 + 1, 97):
        assert cumulative[n] <= lattice_count_bound(f, n).hi


def test_lattice_count_bound_needs_positive_n():
    # the origin is counted at n = 0 but the expression is 0 there
    assert lattice_count(ShiftedDiagonalForm((1, 1)), 0) == 1
    with pytest.raises(ValueError):
        lattice_count_bound(ShiftedDiagonalForm((1, 1)), 0)


def test_lattice_count_bound_general_gram():
    gram = np.array([[2, 1], [1, 2]])
    for n in (1, 10, 100):
        assert lattice_count(gram, n) <= lattice_count_bound(gram, n).hi


@pytest.mark.parametrize("gram", [np.diag([2, 2]), np.diag([2, 4, 6, 8])])
def test_minkowski_reduced_examples_are_fixed(gram):
    assert is_minkowski_reduced(gram)
    assert np.array_equal(minkowski_reduce(gram), gram)


def test_minkowski_reduce_nondiagonal():
    reduced = minkowski_reduce(np.array([[2, 2], [2, 4]]))
    assert np.array_equal(reduced, np.diag([2, 2]))


def test_minkowski_rejects_indefinite():
    with pytest.raises(ValueError):
        minkowski_reduce(np.array([[2, 3], [3, 2]]))


def random_unimodular(dim, rng):
    U = np.eye(dim, dtype=np.int64)
    for _ in range(6):
        i, j = rng.sample(range(dim), 2)
        U[i] += rng.choice([-1, 1]) * U[j]
    return U


@pytest.mark.parametrize("seed", range(10))
def test_minkowski_reduction_preserves_the_lattice(seed):
    rng = random.Random(seed)
    dim = rng.choice([2, 3])
    base = np.diag([2 * rng.randint(1, 5) for _ in range(dim)])
    U = random_unimodular(dim, rng)
    gram = U @ base @ U.T
    reduced = minkowski_reduce(gram)
    assert is_minkowski_reduced(reduced)
    assert round(np.linalg.det(reduced)) == round(np.linalg.det(base))
    assert sorted(np.diag(reduced)) == sorted(np.diag(base))
    for n in (5, 20):
        assert lattice_count(reduced, n) == lattice_count(base, n)


@settings(max_examples=100)
@given(st.integers(-60, 60).filter(bool), st.integers(-60, 60).filter(bool))
def test_hilbert_product_formula(a, b):
    # prod over all places equals 1; the real symbol is -1 iff a, b < 0
    product = -1 if a < 0 and b < 0 else 1
    for p in arith.prime_divisors(2 * a * b):
        product *= hilbert_symbol(a, b, p)
    assert product == 1


@settings(max_examples=60)
@given(st.integers(2, 60), st.sampled_from([2, 3, 5, 7]))
def test_hilbert_symbol_steinberg(a, p):
    assert hilbert_symbol(a, 1 - a, p) == 1
    assert hilbert_symbol(a, -a, p) == 1


def has_primitive_zero(coeffs, p, k):
    mod = p ** k
    xs = np.arange(mod)
    vals = [(a * xs * xs) % mod for a in coeffs]
    grids = np.meshgrid(*vals, indexing="ij")
    total = sum(grids) % mod
    prim = np.meshgrid(*[(xs % p) != 0 for _ in coeffs], indexing="ij")
    primitive = np.logical_or.reduce(prim)
    return bool(np.any((total == 0) & primitive))


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("seed", range(15))
def test_anisotropy_matches_primitive_zero_search(p, seed):
    rng = random.Random(seed * 7 + p)
    while True:
        coeffs = tuple(sorted(rng.choice([1, 2, 3, 5, 6, 7, 10, 15]) for _ in range(4)))
        if all(a % (p * p) for a in coeffs) and any(a % p for a in coeffs):
            break
    assert is_anisotropic(coeffs, p) == (not has_primitive_zero(coeffs, p, 2))


def test_anisotropy_examples():
    assert is_anisotropic((1, 1, 3, 3), 3)
    assert not is_anisotropic((1, 1, 1, 3), 3)
    assert not is_anisotropic((1, 1, 1, 1), 5)
    assert is_anisotropic((1, 1, 1, 1), 2)  # Hamilton quaternions
    with pytest.raises(ValueError):
        is_anisotropic((1, 1, 1), 3)


def brute_local_count(coeffs, r, M, p, k, n):
    mod = p ** k
    e = arith.ord_p(M, p) if M % p == 0 else 0
    xs = np.arange(mod)
    if e:
        xs = xs[(xs - r) % p ** e == 0]
    vals = [np.bincount((a * xs * xs) % mod, minlength=mod) for a in coeffs]
    acc = np.zeros(mod, dtype=np.int64)
    acc[0] = 1
    for h in vals:
        acc = np.array([sum(acc[(t - s) % mod] * h[s] for s in range(mod)) for t in range(mod)])
    return int(acc[n % mod])


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.integers(1, 60), min_size=1, max_size=4),
    st.sampled_from([(2, 6), (3, 4), (5, 3), (7, 2)]),
    st.sampled_from([1, 2, 10, 4, 9, 25]),
    st.integers(0, 9),
    st.integers(1, 2000),
)
def test_local_count_matches_enumeration(coeffs, pk, M, r, n):
    p, k = pk
    f = ShiftedDiagonalForm(tuple(coeffs), r, M)
    assert local_count(f, p, k, n) == brute_local_count(f.coeffs, f.r, f.M, p, k, n)


@pytest.mark.parametrize("p", [257, 263, 401])
@pytest.mark.parametrize("coeffs", [(1, 2, 4, 108), (1, 1, 1, 3), (1, 1, 3, 3)])
def test_large_prime_densities_match_direct_convolution(p, coeffs, monkeypatch):
    f = ShiftedDiagonalForm(coeffs, 7, 10)
    fast = [local_density(f, p, p ** j * u).value for j in (0, 1, 2) for u in (1, 3)]
    monkeypatch.setattr(quadform, "DIRECT_CAP", p)
    quadform._count.cache_clear()
    slow = [local_density(f, p, p ** j * u).value for j in (0, 1, 2) for u in (1, 3)]
    quadform._count.cache_clear()
    assert fast == slow


def test_shift_densities_for_1113():
    f = ShiftedDiagonalForm((1, 1, 1, 3), 7, 10)
    for n in range(1, 30):
        h = 40 * n + 54
        b2 = local_density(f, 2, h).value
        b5 = local_density(f, 5, h).value
        assert (b2, b5) == (Fraction(1, 2), Fraction(1, 125))


def test_local_density_rejects_bad_input():
    f = ShiftedDiagonalForm((1, 1, 1, 1))
    with pytest.raises(ValueError):
        local_density(f, 4, 3)
    with pytest.raises(ValueError):
        local_density(f, 3, 0)


def test_gamma_p_2_good_prime_is_one():
    f = ShiftedDiagonalForm((1, 1, 1, 3), 7, 10)
    for p in (7, 11, 13):
        assert gamma_p_2(f, p, 40 + 54 + 1) == 1 or (40 + 54 + 1) % p == 0


@pytest.mark.parametrize("p", [7, 11, 13, 17])
def test_gamma_p_2_at_primes_dividing_h(p):
    f = ShiftedDiagonalForm((1, 1, 1, 3), 7, 10)
    for j in (1, 2, 3):
        assert gamma_p_2(f, p, p ** j) >= 1 - Fraction(1, p)


def test_gamma_p_2_rejects_e1_primes():
    f = ShiftedDiagonalForm((1, 1, 1, 3), 7, 10)
    with pytest.raises(ValueError):
        gamma_p_2(f, 5, 94)


def test_beta3_for_1113_is_at_least_two_thirds():
    f = ShiftedDiagonalForm((1, 1, 1, 3), 7, 10)
    for n in (1, 2, 3, 9, 27, 6, 18):
        assert local_density(f, 3, n).value >= Fraction(2, 3)


def r4_enumerated(N):
    counts = np.zeros(N + 1, dtype=np.int64)
    r = math.isqrt(N)
    squares = np.zeros(N + 1, dtype=np.int64)
    for x in range(-r, r + 1):
        squares[x * x] += 1
    counts = squares
    for _ in range(3):
        counts = np.convolve(counts, squares)[: N + 1]
    return counts


def test_eisenstein_product_reproduces_jacobi():
    f = ShiftedDiagonalForm((1, 1, 1, 1), 0, 1)
    r4 = r4_enumerated(100)
    for n in range(1, 101):
        assert eisenstein_coefficient(f, n) == r4[n]


def test_eisenstein_prefactor_is_rational():
    f = ShiftedDiagonalForm((1, 1, 1, 1), 0, 1)
    assert quadform.eisenstein_prefactor(f) == Fraction(4) / (Fraction(1, 6) * 4)
