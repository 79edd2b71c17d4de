"""Diagonal quadratic forms with congruence conditions.

Covers genus-level invariants (discriminant, level, character), lattice point
counts and the explicit upper bound for them, Minkowski reduction in small
dimension, p-adic isotropy, and exact local densities obtained by counting
solutions modulo prime powers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from . import arith
from .interval import DEFAULT_PREC, RigorousInterval


@dataclass(frozen=True)
class ShiftedDiagonalForm:
    """Q(x) = sum a_j x_j^2 restricted to x_j = r (mod M) for every j."""

    coeffs: tuple
    r: int = 0
    M: int = 1

    def __post_init__(self):
        coeffs = tuple(int(a) for a in self.coeffs)
        if not coeffs or any(a < 1 for a in coeffs):
            raise ValueError("coefficients must be positive integers")
        if self.M < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "r", int(self.r) % int(self.M))
        object.__setattr__(self, "M", int(self.M))

    @property
    def ell(self):
        return len(self.coeffs)

    @property
    def discriminant(self):
        """Delta_a = det of the Gram matrix diag(2 a_j) = 2^ell prod a_j."""
        return 2 ** self.ell * math.prod(self.coeffs)

    @property
    def level(self):
        """N_a = 4 lcm(a)."""
        return 4 * arith.lcm(self.coeffs)

    @property
    def gram(self):
        return np.diag([2 * a for a in self.coeffs]).astype(np.int64)

    @property
    def character_discriminant(self):
        """Fundamental discriminant D with psi = chi_D the character of Q(sqrt(Delta))."""
        return arith.fundamental_discriminant(self.discriminant)

    def psi(self, p):
        return arith.KroneckerCharacter(self.character_discriminant)(p)

    def value(self, x):
        return sum(a * xi * xi for a, xi in zip(self.coeffs, x))


def level_from_gram(gram):
    """Smallest N with N * gram^{-1} integral and even on the diagonal."""
    G = sympy.Matrix(np.asarray(gram).tolist())
    inv = G.inv()
    den = 1
    for entry in inv:
        den = math.lcm(den, int(sympy.fraction(entry)[1]))
    N = den
    while True:
        scaled = inv * N
        if all(e.is_integer for e in scaled) and all(int(scaled[i, i]) % 2 == 0 for i in range(G.rows)):
            return N
        N += den


def modular_level_character(f):
    """Level 4 lcm(a) M^2 and character discriminant 4 prod a of the theta series."""
    if f.ell != 4:
        raise ValueError("only quaternary forms are supported")
    return 4 * arith.lcm(f.coeffs) * f.M ** 2, 4 * math.prod(f.coeffs)


# ---------------------------------------------------------------------------
# lattice point counts
# ---------------------------------------------------------------------------


def _as_gram(form):
    if isinstance(form, ShiftedDiagonalForm):
        return form.gram
    gram = np.asarray(form, dtype=np.int64)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1] or not np.array_equal(gram, gram.T):
        raise ValueError("Gram matrix must be square and symmetric")
    if np.any(np.linalg.eigvalsh(gram.astype(float)) <= 0):
        raise ValueError("Gram matrix must be positive definite")
    return gram


def _residues(form, r, M):
    if isinstance(form, ShiftedDiagonalForm):
        return (form.r,) * form.ell, form.M
    dim = np.asarray(form).shape[0]
    if r is None:
        r = 0
    if isinstance(r, int):
        r = (r,) * dim
    return tuple(int(x) % M for x in r), M


def lattice_count(form, n, r=None, M=1):
    """Exact #{x in Z^l : Q(x) <= n, x = r (mod M)} with Q(x) = x^T G x / 2."""
    if n < 0:
        return 0
    residues, M = _residues(form, r, M)
    if isinstance(form, ShiftedDiagonalForm):
        return _diagonal_count(form.coeffs, residues, M, n)
    gram = _as_gram(form)
    if np.count_nonzero(gram - np.diag(np.diag(gram))) == 0 and np.all(np.diag(gram) % 2 == 0):
        return _diagonal_count(tuple(int(g) // 2 for g in np.diag(gram)), residues, M, n)
    return _gram_count(gram, residues, M, n)


def _diagonal_count(coeffs, residues, M, n):
    hist = np.zeros(n + 1, dtype=np.int64)
    hist[0] = 1
    for a, res in zip(coeffs, residues):
        bound = math.isqrt(n // a) + 1
        xs = np.arange(-bound, bound + 1)
        xs = xs[(xs - res) % M == 0]
        vals = a * xs * xs
        vals = vals[vals <= n]
        unary = np.bincount(vals, minlength=n + 1)
        hist = np.convolve(hist, unary)[: n + 1]
    return int(hist.sum())


def _gram_count(gram, residues, M, n):
    inv = np.linalg.inv(gram.astype(float))
    bounds = [math.isqrt(int(math.floor(2 * n * inv[i, i] + 1e-9))) + 1 for i in range(len(gram))]
    axes = [np.arange(-b, b + 1) for b in bounds]
    axes = [ax[(ax - res) % M == 0] for ax, res in zip(axes, residues)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(gram))
    twice = np.einsum("ij,jk,ik->i", grid, gram, grid)
    return int(np.count_nonzero(twice <= 2 * n))


def lattice_count_bound(form, n, M=None, prec=DEFAULT_PREC):
    """Upper enclosure of (2/M+1)^l (2n)^{l/2}/sqrt(Delta) + l (2/M+1)^{l-1} n^{(l-1)/2}.

    Only meaningful for n >= 1: at n = 0 the expression vanishes while the
    origin may still be counted.
    """
    if n < 1:
        raise ValueError("the point-count bound needs n >= 1")
    if isinstance(form, ShiftedDiagonalForm):
        M = form.M if M is None else M
        ell, disc = form.ell, form.discriminant
    else:
        gram = _as_gram(form)
        M = 1 if M is None else M
        ell = gram.shape[0]
        disc = int(round(sympy.Matrix(gram.tolist()).det()))
    base = RigorousInterval.exact(Fraction(2, M) + 1, prec)
    nn = RigorousInterval.exact(n, prec)
    first = base ** ell * _half_power(2 * nn, ell) / RigorousInterval.exact(disc, prec).sqrt()
    second = ell * base ** (ell - 1) * _half_power(nn, ell - 1)
    return first + second


def _half_power(x, k):
    # x^{k/2} for an interval x >= 0, exact at x = 0
    if x.hi == 0:
        return RigorousInterval.exact(0 if k else 1, x.prec)
    if k % 2 == 0:
        return x ** (k // 2)
    return x ** (k // 2) * x.sqrt()


# ---------------------------------------------------------------------------
# Minkowski reduction (dimension <= 4)
# ---------------------------------------------------------------------------


def _short_vectors(gram, radius):
    inv = np.linalg.inv(gram.astype(float))
    bounds = [math.isqrt(int(math.floor(2 * radius * inv[i, i] + 1e-9))) + 1 for i in range(len(gram))]
    vectors = []
    for x in itertools.product(*(range(-b, b + 1) for b in bounds)):
        if any(x):
            v = np.array(x, dtype=np.int64)
            norm = int(v @ gram @ v)
            if norm <= 2 * radius:
                vectors.append((norm, x))
    vectors.sort()
    return vectors


def _extends_primitively(rows):
    mat = sympy.Matrix(rows)
    k = mat.rows
    g = 0
    for cols in itertools.combinations(range(mat.cols), k):
        g = math.gcd(g, int(mat.extract(list(range(k)), list(cols)).det()))
        if g == 1:
            return True
    return False


def is_minkowski_reduced(gram):
    gram = np.asarray(gram, dtype=np.int64)
    dim = len(gram)
    diag = np.diag(gram)
    if any(diag[i] > diag[i + 1] for i in range(dim - 1)):
        return False
    for k in range(dim):
        for u in itertools.product((-1, 0, 1), repeat=dim):
            if not any(u[j] for j in range(k, dim)):
                continue
            v = np.array(u)
            if int(v @ gram @ v) < diag[k]:
                return False
    return True


def minkowski_reduce(gram):
    """Greedy successive-minima basis; Minkowski reduced for dimension <= 4."""
    gram = _as_gram(gram)
    dim = len(gram)
    if dim > 4:
        raise ValueError("Minkowski reduction is implemented for dimension <= 4")
    radius = int(np.max(np.diag(gram))) // 2 + 1
    while True:
        basis = []
        for _, x in _short_vectors(gram, radius):
            if _extends_primitively(basis + [list(x)]):
                basis.append(list(x))
                if len(basis) == dim:
                    break
        if len(basis) == dim:
            break
        radius *= 2
    B = np.array(basis, dtype=np.int64)
    reduced = B @ gram @ B.T
    # sign normalisation: make off-diagonal entries of the first row non-positive
    for i in range(1, dim):
        if reduced[0, i] > 0:
            B[i] = -B[i]
    reduced = B @ gram @ B.T
    if not is_minkowski_reduced(reduced):
        raise ArithmeticError("greedy reduction did not produce a Minkowski-reduced form")
    return reduced


# ---------------------------------------------------------------------------
# isotropy
# ---------------------------------------------------------------------------


def hilbert_symbol(a, b, p):
    """Hilbert symbol (a, b)_p for nonzero rationals given as integers."""
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    alpha, u = arith.ord_p(a, p), a // p ** arith.ord_p(a, p)
    beta, v = arith.ord_p(b, p), b // p ** arith.ord_p(b, p)
    if p != 2:
        sign = (-1) ** (alpha * beta * ((p - 1) // 2))
        leg_u = int(sympy.legendre_symbol(u % p, p))
        leg_v = int(sympy.legendre_symbol(v % p, p))
        return sign * leg_u ** beta * leg_v ** alpha
    eps = lambda x: ((x - 1) // 2) % 2
    omega = lambda x: ((x * x - 1) // 8) % 2
    exponent = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if exponent % 2 else 1


def _is_padic_square(d, p):
    e = arith.ord_p(d, p)
    if e % 2:
        return False
    u = d // p ** e
    if p == 2:
        return u % 8 == 1
    return sympy.legendre_symbol(u % p, p) == 1


def is_anisotropic(f, p):
    """True iff sum a_j x_j^2 has no nontrivial zero over Q_p (quaternary case).

    A quaternary form is anisotropic exactly when its discriminant is a square
    and its Hasse invariant equals -(-1,-1)_p.
    """
    coeffs = f.coeffs if isinstance(f, ShiftedDiagonalForm) else tuple(f)
    if len(coeffs) != 4:
        raise ValueError("isotropy test implemented for quaternary forms")
    if not _is_padic_square(math.prod(coeffs), p):
        return False
    hasse = 1
    for i in range(4):
        for j in range(i + 1, 4):
            hasse *= hilbert_symbol(coeffs[i], coeffs[j], p)
    return hasse == -hilbert_symbol(-1, -1, p)


# ---------------------------------------------------------------------------
# local densities by counting
# ---------------------------------------------------------------------------

DIRECT_CAP = 256  # largest modulus counted by explicit convolution
MODULUS_CAP = 10 ** 8  # largest modulus for which an explicit count is allowed


@dataclass(frozen=True)
class LocalDensity:
    p: int
    value: Fraction
    depth: int


def _unary_hist(p, k, alpha, u, c, e, zero_only):
    mod = p ** k
    if mod > MODULUS_CAP:
        raise OverflowError(f"modulus {mod} exceeds the counting cap")
    x = np.arange(mod, dtype=np.int64)
    mask = np.ones(mod, dtype=bool)
    if e:
        mask &= (x % p ** e) == c % p ** e
    if zero_only:
        mask &= (x % p) == 0
    coeff = (u * p ** alpha) % mod
    vals = (coeff * ((x * x) % mod)) % mod
    return np.bincount(vals[mask], minlength=mod)


def _cyclic_convolve(h1, h2):
    mod = len(h1)
    full = np.convolve(h1, h2)
    out = full[:mod].copy()
    out[: len(full) - mod] += full[mod:]
    return out


@lru_cache(maxsize=None)
def _direct_table(p, k, terms, zero_alpha0):
    # full distribution of Q mod p^k; independent of the target value
    hists = [
        _unary_hist(p, k, alpha, u, c, e, zero_alpha0 and alpha == 0)
        for alpha, u, c, e in terms
    ]
    acc = hists[0]
    for h in hists[1:]:
        acc = _cyclic_convolve(acc, h)
    return acc


@lru_cache(maxsize=64)
def _class_structure(p):
    # c[w][A][B] = #{s : class(s) = A, class(w - s) = B} for w in {0, 1, nonresidue};
    # classes 0 = zero, 1 = nonzero square, 2 = nonsquare
    x = np.arange(p, dtype=np.int64)
    cls = np.full(p, 2, dtype=np.int64)
    cls[(x * x) % p] = 1
    cls[0] = 0
    reps = (0, 1, int(np.flatnonzero(cls == 2)[0]))
    return reps, cls, np.stack(
        [np.bincount(3 * cls + cls[(w - x) % p], minlength=9).reshape(3, 3) for w in reps]
    )


def _class_count(p, terms, v, zero_alpha0=False):
    """Count mod an odd prime p by working with the three square classes.

    Each unary distribution u x^2 is constant on {0}, squares and nonsquares,
    so the convolution lives on a 3 dimensional space and costs O(p) once.
    """
    reps, cls, table = _class_structure(p)
    units = cls[[u % p for _, u, _, _ in terms]]

    def unary(alpha, unit_class, zero):
        if alpha >= 1:
            return np.array([p, 0, 0], dtype=object)
        if zero:
            return np.array([1, 0, 0], dtype=object)
        vec = np.array([1, 0, 0], dtype=object)
        vec[unit_class] = 2
        return vec

    acc = None
    for (alpha, _, _, _), uc in zip(terms, units):
        vec = unary(alpha, int(uc), zero_alpha0 and alpha == 0)
        if acc is None:
            acc = vec
            continue
        acc = np.array(
            [sum(acc[A] * vec[B] * int(table[w][A, B]) for A in range(3) for B in range(3))
             for w in range(3)],
            dtype=object,
        )
    return int(acc[int(cls[v % p])])


def _direct_count(p, k, terms, v, zero_alpha0=False):
    if k == 1 and p > DIRECT_CAP and p % 2 and all(t[3] == 0 for t in terms):
        return _class_count(p, terms, v, zero_alpha0)
    return int(_direct_table(p, k, terms, zero_alpha0)[v % p ** k])


@lru_cache(maxsize=None)
def _count(p, k, terms, v):
    """#{x mod p^k : x_j = c_j (mod p^{e_j}), sum u_j p^{alpha_j} x_j^2 = v (mod p^k)}.

    ``terms`` is a tuple of (alpha, u, c, e) with u a p-unit.
    """
    mod = p ** k
    v %= mod
    ell = len(terms)
    max_e = max(t[3] for t in terms)
    if k == 0:
        return 1
    if mod <= DIRECT_CAP or k <= max_e:
        return _direct_count(p, k, terms, v)
    if min(t[0] for t in terms) >= 1:
        if v % p:
            return 0
        lowered = tuple((a - 1, u, c, e) for a, u, c, e in terms)
        return p ** ell * _count(p, k - 1, lowered, v // p)
    K = max(3, max_e + 1) if p == 2 else max(1, max_e)
    if k <= K:
        return _direct_count(p, k, terms, v)
    # solutions with some alpha = 0 variable a p-unit lift p^{ell-1} to one
    good = _direct_count(p, K, terms, v) - _direct_count(p, K, terms, v, zero_alpha0=True)
    good *= p ** ((ell - 1) * (k - K))
    # remaining solutions have every alpha = 0 variable divisible by p
    zero_vars = [t for t in terms if t[0] == 0]
    if any(e and c % p for _, _, c, e in zero_vars):
        return good
    raised = tuple(
        (2, u, (c // p) % p ** (e - 1) if e > 1 else 0, max(e - 1, 0)) if a == 0 else (a, u, c, e)
        for a, u, c, e in terms
    )
    bad, rem = divmod(_count(p, k, raised, v), p ** len(zero_vars))
    if rem:
        raise ArithmeticError("non-integral lift count; counting recursion is inconsistent")
    return good + bad


def _terms(f, p):
    e = arith.ord_p(f.M, p) if f.M % p == 0 else 0
    c = f.r % p ** e if e else 0
    out = []
    for a in f.coeffs:
        alpha = arith.ord_p(a, p)
        out.append((alpha, a // p ** alpha, c, e))
    return tuple(sorted(out))


def local_count(f, p, k, n):
    """Number of x mod p^k with the congruence condition and Q(x) = n (mod p^k)."""
    return _count(p, k, _terms(f, p), n % p ** k)


def local_density(f, p, n):
    """beta_p(n) as the stabilised value of count / p^{k(l-1)}."""
    if n < 1:
        raise ValueError("local densities are taken at positive integers")
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    threshold = arith.ord_p(4 * n * f.discriminant * f.M ** 2, p) + 2
    terms = _terms(f, p)
    prev = None
    k = 1
    while True:
        value = Fraction(_count(p, k, terms, n % p ** k), p ** (k * (f.ell - 1)))
        if prev is not None and value == prev and k > threshold:
            return LocalDensity(p, value, k)
        if k > threshold + 6:
            raise ArithmeticError(f"local density at p={p}, n={n} failed to stabilise")
        prev = value
        k += 1


def e1_primes(f):
    """Primes treated through the shifted-lattice densities b_p: those dividing 2M."""
    return arith.prime_divisors(2 * f.M)


def euler_factor(f, p):
    """1 - psi(p) p^{-2}."""
    return 1 - Fraction(f.psi(p), p * p)


def gamma_p_2(f, p, n):
    """gamma_p(2) = beta_p(n) / (1 - psi(p) p^{-2}) for p outside e_1."""
    if p in e1_primes(f):
        raise ValueError(f"p={p} divides e_1; use local_density for b_p")
    return local_density(f, p, n).value / euler_factor(f, p)


def eisenstein_prefactor(f):
    """(2 pi)^2 / (sqrt(Delta) L(2, psi)) as an exact rational.

    With L(2, chi_D) = q pi^2 / sqrt(D) and Delta = D g^2 the prefactor is 4 / (q g).
    """
    delta = f.discriminant
    D = f.character_discriminant
    q = arith.L_value_exact(D).q
    g2, rem = divmod(delta, D)
    g = math.isqrt(g2)
    if rem or g * g != g2:
        raise ArithmeticError("discriminant is not D times a square")
    return Fraction(4) / (q * g)


def eisenstein_coefficient(f, h):
    """A(h) = prefactor * h * prod_{p | 2 M Delta h} beta_p(h) / (1 - psi(p) p^{-2})."""
    if f.ell != 4:
        raise ValueError("Eisenstein coefficients implemented for quaternary forms")
    if h < 1:
        raise ValueError("h must be positive")
    value = eisenstein_prefactor(f) * h
    for p in arith.prime_divisors(2 * f.M * f.discriminant * h):
        value *= local_density(f, p, h).value / euler_factor(f, p)
    return value
