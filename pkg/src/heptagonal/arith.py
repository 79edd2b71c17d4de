"""Elementary arithmetic, certified analytic constants and quadratic L-values.

Integer-valued and rational quantities are returned exactly (``int`` or
``fractions.Fraction``).  Anything involving pi, exponentials, zeta values or
fractional powers comes back as a :class:`RigorousInterval`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import sympy
from sympy.functions.combinatorial.numbers import kronecker_symbol

from .interval import DEFAULT_PREC, RigorousInterval

# ---------------------------------------------------------------------------
# basic arithmetic functions
# ---------------------------------------------------------------------------


def _check_positive(N):
    if int(N) != N or N < 1:
        raise ValueError(f"expected a positive integer, got {N!r}")
    return int(N)


def euler_phi(N):
    return int(sympy.totient(_check_positive(N)))


def divisors(N):
    return [int(d) for d in sympy.divisors(_check_positive(N))]


def sigma0(N):
    return int(sympy.divisor_count(_check_positive(N)))


def lcm(values):
    values = list(values)
    if not values:
        raise ValueError("lcm of an empty list")
    return math.lcm(*values)


@lru_cache(maxsize=4096)
def prime_divisors(N):
    """Sorted distinct primes dividing ``N`` (``N`` nonzero)."""
    if N == 0:
        raise ValueError("0 has infinitely many prime divisors")
    return tuple(int(p) for p in sympy.primefactors(abs(N)))


def ord_p(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


# ---------------------------------------------------------------------------
# congruence subgroups and cusps
# ---------------------------------------------------------------------------


def index_gamma0(N):
    """[SL2(Z) : Gamma_0(N)] = N prod_{p|N} (1 + 1/p)."""
    N = _check_positive(N)
    value = Fraction(N)
    for p in prime_divisors(N):
        value *= Fraction(p + 1, p)
    return int(value)


def index_gamma(N):
    """[SL2(Z) : Gamma(N)] = N^3 prod_{p|N} (1 - 1/p^2)."""
    N = _check_positive(N)
    value = Fraction(N) ** 3
    for p in prime_divisors(N):
        value *= Fraction(p * p - 1, p * p)
    return int(value)


def index_gamma01(N, L):
    """Index of Gamma_0(N) cap Gamma_1(L) as N phi(L) prod_{p|N} (1 + 1/p)."""
    N = _check_positive(N)
    L = _check_positive(L)
    if N % L:
        raise ValueError(f"L={L} must divide N={N}")
    return index_gamma0(N) * euler_phi(L)


def cusp_count(N, delta):
    """Number of cusps of Gamma(N) whose denominator has gcd ``delta`` with N."""
    N = _check_positive(N)
    delta = _check_positive(delta)
    if N % delta:
        raise ValueError(f"delta={delta} must divide N={N}")
    return euler_phi(N // delta) * euler_phi(delta) * (N // delta)


# ---------------------------------------------------------------------------
# elementary analytic bounds
# ---------------------------------------------------------------------------


def delta_N(N):
    N = _check_positive(N)
    if N >= 4:
        return Fraction(1)
    if N in (2, 3):
        return Fraction(1, 2)
    return Fraction(1, 4)


def exp_sum_bound(k, N, prec=DEFAULT_PREC):
    """Upper bound for sum_{n>=1} n^k exp(-2 pi n / N).

    The smaller of the two closed forms ``k!/(1-e^{-2pi/N})^{k+1}`` and
    ``k! N^{k+1}/(delta_N pi)^{k+1}``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    N = _check_positive(N)
    pi = RigorousInterval.pi(prec)
    fact = math.factorial(k)
    q = (-(2 * pi) / N).exp()
    first = fact / (1 - q) ** (k + 1)
    second = fact * RigorousInterval.exact(N, prec) ** (k + 1) / (delta_N(N) * pi) ** (k + 1)
    return RigorousInterval(min(first.lo, second.lo), min(first.hi, second.hi), prec)


def _sigma0_local_max(p, alpha, prec):
    # (j+1)/p^{j alpha} is unimodal in j; locate the peak in floating point and
    # take the certified max over a window around it.
    step = float(p) ** float(alpha)
    peak = max(1, math.ceil(1.0 / (step - 1.0)) - 1) if step > 1 else 1
    best = None
    for j in range(max(1, peak - 2), peak + 3):
        term = RigorousInterval.exact(j + 1, prec) / RigorousInterval.exact(p, prec) ** (alpha * j)
        if best is None:
            best = term
        else:
            best = RigorousInterval(max(best.lo, term.lo), max(best.hi, term.hi), prec)
    return best


def sigma0_bound_constant(alpha, prec=DEFAULT_PREC):
    """Certified enclosure of C_alpha = prod_{p < 2^{1/alpha}} max_j (j+1)/p^{j alpha}."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    # p < 2^{1/alpha}  <=>  p^alpha < 2, decided exactly on integers
    total = RigorousInterval.exact(1, prec)
    p = 2
    while p ** alpha.numerator < 2 ** alpha.denominator:
        total = total * _sigma0_local_max(p, alpha, prec)
        p = int(sympy.nextprime(p))
    return total


def zeta_interval(s, prec=DEFAULT_PREC, terms=None, order=None):
    """Enclosure of zeta(s) for rational s > 1 by Euler-Maclaurin summation.

    The tail after ``order`` Bernoulli corrections is bounded by
    ``4 |(s)_{2m}| / (2 pi)^{2m} * K^{1-s-2m} / (s+2m-1)``.
    """
    s = Fraction(s)
    if s <= 1:
        raise ValueError("zeta_interval needs s > 1")
    K = terms or 40
    m = order or 30
    S = RigorousInterval.exact(s, prec)
    total = RigorousInterval.exact(0, prec)
    for n in range(1, K):
        total = total + (-(S * RigorousInterval.exact(n, prec).log())).exp()
    KK = RigorousInterval.exact(K, prec)
    logK = KK.log()
    total = total + (logK * (1 - S)).exp() / (S - 1)
    total = total + (-(S * logK)).exp() / 2
    rising = S  # (s)_{2j-1}
    for j in range(1, m + 1):
        b = Fraction(sympy.bernoulli(2 * j))
        coeff = RigorousInterval.exact(b / math.factorial(2 * j), prec)
        total = total + coeff * rising * (-(S + 2 * j - 1) * logK).exp()
        rising = rising * (S + 2 * j - 1) * (S + 2 * j)
    # rising is now (s)_{2m+1}; the remainder uses (s)_{2m}
    rising_2m = rising / (S + 2 * m)
    pi = RigorousInterval.pi(prec)
    tail = 4 * rising_2m / (2 * pi) ** (2 * m) * ((1 - S - 2 * m) * logK).exp() / (S + 2 * m - 1)
    return total + tail.symmetric()


# ---------------------------------------------------------------------------
# quadratic characters and L-values
# ---------------------------------------------------------------------------


def squarefree_part(d):
    """Signed squarefree kernel: d = squarefree_part(d) * f^2."""
    if d == 0:
        raise ValueError("d must be nonzero")
    sign = -1 if d < 0 else 1
    core = 1
    for p, e in sympy.factorint(abs(d)).items():
        if e % 2:
            core *= p
    return sign * core


def fundamental_discriminant(d):
    """Discriminant of the quadratic field Q(sqrt(d)); 1 when d is a square."""
    core = squarefree_part(d)
    return core if core % 4 == 1 else 4 * core


def is_fundamental_discriminant(D):
    if D == 0:
        return False
    if D == 1:
        return True
    return fundamental_discriminant(D) == D


@dataclass(frozen=True)
class KroneckerCharacter:
    """The character n -> (D/n) attached to a fundamental discriminant D."""

    D: int

    def __post_init__(self):
        if not is_fundamental_discriminant(self.D):
            raise ValueError(f"{self.D} is not a fundamental discriminant")

    def __call__(self, n):
        return int(kronecker_symbol(self.D, n))

    @property
    def conductor(self):
        return abs(self.D)

    @property
    def is_even(self):
        return self.D > 0


def bernoulli_2_chi(chi):
    """Generalised Bernoulli number B_{2,chi} = f sum_{a=1}^{f} chi(a) B_2(a/f)."""
    f = chi.conductor
    total = Fraction(0)
    for a in range(1, f + 1):
        c = chi(a)
        if c:
            x = Fraction(a, f)
            total += c * (x * x - x + Fraction(1, 6))
    return f * total


@dataclass(frozen=True)
class LValue:
    """L(2, chi_D) = q * pi^2 / sqrt(D)."""

    D: int
    q: Fraction

    @property
    def description(self):
        return f"L(2, chi_{self.D}) = {self.q} * pi^2 / sqrt({self.D})"

    def interval(self, prec=DEFAULT_PREC):
        pi = RigorousInterval.pi(prec)
        return self.q * pi * pi / RigorousInterval.exact(self.D, prec).sqrt()


def L_value_exact(chi):
    """Exact L(2, chi) for an even quadratic character (D > 0).

    For even primitive chi of conductor D the functional equation gives
    L(2, chi) = pi^2 B_{2,chi} / D^{3/2}.  Odd characters (D < 0) have
    B_{2,chi} = 0 and L(2, chi) is not a rational multiple of pi^2/sqrt|D|
    (D = -4 gives Catalan's constant), so they are rejected.
    """
    if isinstance(chi, int):
        chi = KroneckerCharacter(chi)
    if chi.D < 0:
        raise ValueError(
            f"L(2, chi_{chi.D}) for an odd character has no closed form q*pi^2/sqrt|D|"
        )
    return LValue(chi.D, bernoulli_2_chi(chi) / chi.D)


def L_value_numeric(D, dps=40):
    """L(2, chi_D) to ``dps`` digits through the Hurwitz zeta decomposition."""
    chi = KroneckerCharacter(D)
    f = chi.conductor
    with mpmath.workdps(dps + 10):
        total = mpmath.mpf(0)
        for a in range(1, f + 1):
            c = chi(a)
            if c:
                total += c * mpmath.zeta(2, mpmath.mpf(a) / f)
        return +(total / f ** 2)
