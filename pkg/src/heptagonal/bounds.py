"""Eisenstein lower bounds, cusp-form upper bounds and crossover constants.

All forms here are the completed heptagonal forms sum a_j x_j^2 with
x_j = 7 (mod 10), evaluated at h = 40 n + 9 sum a_j.  Rational quantities
(C_L, C_Delta, c_a, divisor sums, extremal products) are exact; everything
involving pi or fractional powers is a certified interval whose conservative
endpoint is used in every comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import arith
from .escalator import DEFAULT_SCAN_LIMIT, escalate, nodes_at_depth
from .interval import DEFAULT_PREC, RigorousInterval, format_outward
from .quadform import (
    ShiftedDiagonalForm,
    eisenstein_coefficient,
    eisenstein_prefactor,
    euler_factor,
    is_anisotropic,
    local_density,
)

M_SHIFT = 10
R_SHIFT = 7
EPS = Fraction(1, 10 ** 6)  # h^{-EPS} absorbs prod_{p|h}(1 - 1/p) >= h^{-EPS}/20
GROWTH = 1 - EPS
CUSP_EXPONENT = Fraction(3, 5)
CROSS_EXPONENT = 1 / (Fraction(2, 5) - EPS)
NORM_DISPLAY_CONSTANT = 4 * 3 ** 10
NORM_GENERAL_CONSTANT = 4 * 3 ** 6
R_SCAN = 6


@dataclass(frozen=True)
class BoundProfile:
    """One specialisation |c_f(n)| <= C n^e ||f|| N^{1+2 delta} prod(1+1/p)^{1/2} phi(L)."""

    name: str
    exponent: Fraction
    constant: str
    delta: Fraction

    def constant_interval(self, prec=DEFAULT_PREC):
        return RigorousInterval.from_decimal(self.constant, prec)

    @property
    def level_exponent(self):
        return 1 + 2 * self.delta


PROFILES = {
    "17/30": BoundProfile("17/30", Fraction(17, 30), "4.58e128", Fraction(1, 10 ** 6)),
    "4/7": BoundProfile("4/7", Fraction(4, 7), "4.39e79", Fraction(1, 10 ** 6)),
    "3/5": BoundProfile("3/5", Fraction(3, 5), "6.95e18", Fraction(125, 10 ** 8)),
}
DEFAULT_PROFILE = PROFILES["3/5"]


@dataclass(frozen=True)
class AnisotropicDecay:
    """Local factor bounded below by c * p^{-R} with R = ord_p(h)."""

    p: int
    c: Fraction

    def __str__(self):
        return f"anisotropic:p={self.p}"


def shifted_form(a):
    return ShiftedDiagonalForm(tuple(a), R_SHIFT, M_SHIFT)


def h_value(a, n):
    return 40 * n + 9 * sum(a)


@lru_cache(maxsize=None)
def node_set(scan_limit=DEFAULT_SCAN_LIMIT):
    """Depth-4 escalator nodes for heptagonal numbers, in canonical order."""
    return tuple(nodes_at_depth(escalate(7, 4, scan_limit), 4))


def _require_node(a):
    a = tuple(a)
    if a not in node_set():
        raise ValueError(f"{a} is not a depth-4 escalator node; constants were maximised over that set only")
    return a


# ---------------------------------------------------------------------------
# Eisenstein part
# ---------------------------------------------------------------------------


def eisenstein_CL(a):
    """C_L = (2 pi)^2 / (sqrt(Delta) L(2, psi)) * prod_{p | 10} 1/(1 - psi(p) p^{-2})."""
    f = shifted_form(a)
    if f.ell != 4:
        raise ValueError("C_L is defined for four coefficients")
    value = eisenstein_prefactor(f)
    for p in arith.prime_divisors(M_SHIFT):
        value /= euler_factor(f, p)
    return value


def shift_densities(a, h):
    """(b_2, b_5) at h for the congruence x = 7 (mod 10)."""
    f = shifted_form(a)
    return tuple(local_density(f, p, h).value for p in arith.prime_divisors(M_SHIFT))


def _unit_classes(p):
    if p == 2:
        return (1, 3, 5, 7)
    nonresidue = next(u for u in range(2, p) if pow(u, (p - 1) // 2, p) == p - 1)
    return (1, nonresidue)


def local_factor_profile(a, p, R_max=R_SCAN + 2):
    """gamma_p(2) at h = p^R u for R <= R_max and each unit square class u."""
    f = shifted_form(a)
    table = {}
    for R in range(R_max + 1):
        for u in _unit_classes(p):
            table[(R, u)] = local_density(f, p, p ** R * u).value / euler_factor(f, p)
    return table


def delta_primes(a):
    """Odd primes dividing Delta_a outside the shift modulus."""
    f = shifted_form(a)
    return tuple(p for p in arith.prime_divisors(f.discriminant) if M_SHIFT % p)


def eisenstein_CDelta(a):
    """Lower bound for the product of local factors at primes p | Delta, p not dividing 10.

    Isotropic primes contribute the minimum over R <= 6 and both unit classes,
    after checking that R = 7, 8 do not go lower.  An anisotropic prime
    contributes min_R p^R gamma_p and the result is an AnisotropicDecay.
    """
    f = shifted_form(a)
    total = Fraction(1)
    decay = None
    for p in delta_primes(a):
        table = local_factor_profile(a, p)
        if is_anisotropic(f, p):
            scaled = {key: value * p ** key[0] for key, value in table.items()}
            c = min(v for (R, _), v in scaled.items() if R <= R_SCAN)
            if min(scaled.values()) < c:
                raise ArithmeticError(f"decay constant at p={p} not stable by R={R_SCAN}")
            decay = (p, c)
            continue
        low = min(v for (R, _), v in table.items() if R <= R_SCAN)
        if min(table.values()) < low:
            raise ArithmeticError(f"local factor at p={p} keeps dropping beyond R={R_SCAN}")
        total *= low
    if decay is not None:
        return AnisotropicDecay(decay[0], decay[1] * total)
    return total


def is_anisotropic_node(a):
    return isinstance(eisenstein_CDelta(a), AnisotropicDecay)


def c_constant(a):
    """c_a = C_L C_Delta / 5000 (for the anisotropic case the decay constant is used)."""
    cd = eisenstein_CDelta(a)
    value = cd.c if isinstance(cd, AnisotropicDecay) else cd
    return eisenstein_CL(a) * value / 5000


def eisenstein_exact(a, n):
    """A(h) at h = 40n + 9 sum a from the full local-density product."""
    return eisenstein_coefficient(shifted_form(a), h_value(a, n))


def eisenstein_lower(a, n, prec=DEFAULT_PREC):
    """Certified lower bound c_a h^{1 - 10^-6} for A(h)."""
    cd = eisenstein_CDelta(a)
    if isinstance(cd, AnisotropicDecay):
        raise ValueError(f"{tuple(a)} is anisotropic at p={cd.p}; use special_case_1133")
    h = RigorousInterval.exact(h_value(a, n), prec)
    return c_constant(a) * h ** GROWTH


# ---------------------------------------------------------------------------
# cusp part
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def divisor_sum(L, M=M_SHIFT):
    """sum_{d | M^2 N} phi(M^2 N/d) phi(d) (M^2 N/d) (gcd(M^2, d)/M^2)^4 with N = 4L."""
    top = M * M * 4 * L
    total = Fraction(0)
    for d in arith.divisors(top):
        total += (
            arith.euler_phi(top // d)
            * arith.euler_phi(d)
            * (top // d)
            * Fraction(math.gcd(M * M, d), M * M) ** 4
        )
    return total


def _one_minus_inverse_square(n):
    value = Fraction(1)
    for p in arith.prime_divisors(n):
        value *= 1 - Fraction(1, p * p)
    return value


def _one_plus_inverse(n):
    value = Fraction(1)
    for p in arith.prime_divisors(n):
        value *= 1 + Fraction(1, p)
    return value


def cusp_norm_sq_bound(a, M=M_SHIFT, prec=DEFAULT_PREC, leading=NORM_DISPLAY_CONSTANT):
    """Upper bound for ||f_a||^2 in the quaternary case.

    lead/pi^4 * M^4 N^2 / prod_{p | MN}(1 - p^-2) * (27 M^2 N / (Delta pi) + 16) * divisor_sum
    with N = 4 lcm(a) and Delta = 16 prod a.  ``leading`` defaults to 4*3^10;
    the general-l formula specialised to l = 4 gives 4*3^6.
    """
    if M != M_SHIFT:
        raise ValueError("the norm bound is specialised to M = 10")
    a = tuple(a)
    L = arith.lcm(a)
    N = 4 * L
    pi = RigorousInterval.pi(prec)
    exact_part = Fraction(leading * M ** 4 * N * N) / _one_minus_inverse_square(M * L) * divisor_sum(L, M)
    bracket = RigorousInterval.exact(Fraction(27 * M * M * N, 16 * math.prod(a)), prec) / pi + 16
    return exact_part * bracket / pi ** 4


@dataclass(frozen=True)
class NodeExtremes:
    max_lcm: int
    max_lcm_nodes: tuple
    max_plus_product: Fraction
    max_plus_nodes: tuple
    min_minus_product: Fraction
    min_minus_nodes: tuple


@lru_cache(maxsize=None)
def node_extremes():
    nodes = node_set()
    lcms = {a: arith.lcm(a) for a in nodes}
    plus = {a: _one_plus_inverse(20 * lcms[a]) for a in nodes}
    minus = {a: _one_minus_inverse_square(10 * lcms[a]) for a in nodes}
    max_lcm = max(lcms.values())
    max_plus = max(plus.values())
    min_minus = min(minus.values())
    return NodeExtremes(
        max_lcm,
        tuple(a for a in nodes if lcms[a] == max_lcm),
        max_plus,
        tuple(a for a in nodes if plus[a] == max_plus),
        min_minus,
        tuple(a for a in nodes if minus[a] == min_minus),
    )


@lru_cache(maxsize=None)
def max_weighted_divisor_sum(L_max):
    """(max over L <= L_max of L^2 * divisor_sum(L), the maximising L)."""
    best = None
    arg = None
    for L in range(1, L_max + 1):
        value = L * L * divisor_sum(L)
        if best is None or value > best:
            best, arg = value, L
    return best, arg


def uniform_norm_constant(prec=DEFAULT_PREC):
    """K with ||f_a||^2 <= K lcm(a)^2 divisor_sum(lcm(a)) over the whole node set."""
    ext = node_extremes()
    L = ext.max_lcm
    pi = RigorousInterval.pi(prec)
    exact_part = Fraction(NORM_DISPLAY_CONSTANT * M_SHIFT ** 4 * 16) / ext.min_minus_product
    bracket = RigorousInterval.exact(Fraction(27 * M_SHIFT ** 2 * 4 * L, 16), prec) / pi + 16
    return exact_part * bracket / pi ** 4


def uniform_norm_sq_bound(prec=DEFAULT_PREC):
    weighted, _ = max_weighted_divisor_sum(node_extremes().max_lcm)
    return uniform_norm_constant(prec) * weighted


def cusp_prefactor(a, profile=DEFAULT_PROFILE, prec=DEFAULT_PREC):
    """C (400 lcm)^{1+2 delta} prod_{p | 20 lcm}(1+1/p)^{1/2} phi(10)."""
    L = arith.lcm(tuple(a))
    return _prefactor(L, _one_plus_inverse(20 * L), profile, prec)


def _prefactor(L, plus_product, profile, prec):
    level = RigorousInterval.exact(M_SHIFT ** 2 * 4 * L, prec)
    return (
        profile.constant_interval(prec)
        * level ** profile.level_exponent
        * RigorousInterval.exact(plus_product, prec).sqrt()
        * arith.euler_phi(M_SHIFT)
    )


def uniform_prefactor(profile=DEFAULT_PROFILE, prec=DEFAULT_PREC):
    ext = node_extremes()
    return _prefactor(ext.max_lcm, ext.max_plus_product, profile, prec)


def uniform_d(profile=DEFAULT_PROFILE, prec=DEFAULT_PREC):
    """d with |B(h)| <= d h^{3/5} for every depth-4 node."""
    return uniform_prefactor(profile, prec) * uniform_norm_sq_bound(prec).sqrt()


def node_d(a, profile=DEFAULT_PROFILE, prec=DEFAULT_PREC):
    """The sharper per-node constant prefactor(a) * sqrt(norm bound(a))."""
    return cusp_prefactor(a, profile, prec) * cusp_norm_sq_bound(a, prec=prec).sqrt()


def cusp_coeff_bound(a, n, profile=DEFAULT_PROFILE, prec=DEFAULT_PREC):
    """Upper bound for |B(h)|, h = 40n + 9 sum a, with the per-node norm bound."""
    a = _require_node(a)
    h = RigorousInterval.exact(h_value(a, n), prec)
    return node_d(a, profile, prec) * h ** profile.exponent


# ---------------------------------------------------------------------------
# crossover
# ---------------------------------------------------------------------------


def crossover(a, d=None, prec=DEFAULT_PREC):
    """C_a = ((d/c_a)^{1/(2/5 - 10^-6)} - 9 sum a) / 40."""
    a = _require_node(a)
    if is_anisotropic_node(a):
        raise ValueError(f"{a} is anisotropic; use special_case_1133")
    d = uniform_d(prec=prec) if d is None else _as_interval(d, prec)
    ratio = d / c_constant(a)
    return (ratio ** CROSS_EXPONENT - 9 * sum(a)) / 40


def _as_interval(x, prec):
    if isinstance(x, RigorousInterval):
        return x
    if isinstance(x, str):
        return RigorousInterval.from_decimal(x, prec)
    return RigorousInterval.exact(x, prec)


@dataclass
class SpecialCase:
    thresholds: dict
    denominators: dict
    reference: str
    shift_margin: int
    divisibility_ok: bool
    decay: AnisotropicDecay

    @property
    def threshold(self):
        return self.thresholds[self.reference]

    def worst(self):
        return max(self.thresholds.values(), key=lambda x: x.hi)


def divisibility_shift_check(lo=3, hi=9):
    """27 | 40n+72 implies 27 does not divide 40(n-k)+72 for lo <= k <= hi."""
    for n in range(27):
        if (40 * n + 72) % 27 == 0:
            if any((40 * (n - k) + 72) % 27 == 0 for k in range(lo, hi + 1)):
                return False
    return True


def special_case_1133(d=None, prec=DEFAULT_PREC):
    """Threshold for (1,1,3,3) on the branch 27 not dividing h = 40n + 72.

    There A(h) >= (3^{-R} h)^{1-10^-6} / D with R <= 2, so A >= h^{1-10^-6} /
    (9^{1-10^-6} D).  Three denominators D are evaluated: 1500 and 2400 as
    stated for this case, and 5000 / (C_L c) from the counted decay constant c.
    """
    a = (1, 1, 3, 3)
    decay = eisenstein_CDelta(a)
    if not isinstance(decay, AnisotropicDecay):
        raise ArithmeticError("(1,1,3,3) was expected to be anisotropic at 3")
    d = uniform_d(prec=prec) if d is None else _as_interval(d, prec)
    denominators = {
        "proof": Fraction(1500),
        "lemma": Fraction(2400),
        "engine": Fraction(5000) / (eisenstein_CL(a) * decay.c),
    }
    nine = RigorousInterval.exact(9, prec) ** GROWTH
    thresholds = {}
    for name, den in denominators.items():
        h_max = (d * nine * den) ** CROSS_EXPONENT
        thresholds[name] = (h_max - 72) / 40
    return SpecialCase(thresholds, denominators, "proof", 9, divisibility_shift_check(), decay)


# ---------------------------------------------------------------------------
# reports and the assembled bound
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    coeffs: tuple
    h0: int
    C_L: Fraction
    C_Delta: object
    c_a: Fraction
    norm_sq_bound: RigorousInterval
    d_a: RigorousInterval
    node_d: RigorousInterval
    C_a: RigorousInterval
    anisotropic: bool

    def to_json(self):
        def frac(x):
            return f"{x.numerator}/{x.denominator}"

        def iv(x):
            return {"lo": format_outward(x.lo, 12, up=False), "hi": format_outward(x.hi, 12, up=True)}

        return {
            "coeffs": list(self.coeffs),
            "h0": self.h0,
            "C_L": frac(self.C_L),
            "C_Delta": str(self.C_Delta) if self.anisotropic else frac(self.C_Delta),
            "C_Delta_decay_constant": frac(self.C_Delta.c) if self.anisotropic else None,
            "c_a": frac(self.c_a),
            "norm_sq_bound": iv(self.norm_sq_bound),
            "d_a": iv(self.d_a),
            "node_d": iv(self.node_d),
            "C_a": iv(self.C_a),
            "anisotropic": self.anisotropic,
        }

    def csv_row(self):
        def frac(x):
            return f"{x.numerator}/{x.denominator}"

        return [
            *map(str, self.coeffs),
            frac(self.C_L),
            str(self.C_Delta) if self.anisotropic else frac(self.C_Delta),
            frac(self.c_a),
            self.norm_sq_bound.sig(4),
            self.d_a.sig(4),
            self.C_a.sig(4),
        ]


CSV_HEADER = ["a1", "a2", "a3", "a4", "C_L", "C_Delta", "c_a", "norm_sq_hi", "d_a_hi", "C_a_hi"]


def bound_report(a, d=None, prec=DEFAULT_PREC, special=None):
    a = tuple(a)
    d = uniform_d(prec=prec) if d is None else d
    cd = eisenstein_CDelta(a)
    anisotropic = isinstance(cd, AnisotropicDecay)
    if anisotropic:
        special = special or special_case_1133(d, prec)
        C_a = special.thresholds["engine"]
    else:
        C_a = crossover(a, d, prec)
    return BoundReport(
        coeffs=a,
        h0=9 * sum(a),
        C_L=eisenstein_CL(a),
        C_Delta=cd,
        c_a=c_constant(a),
        norm_sq_bound=cusp_norm_sq_bound(a, prec=prec),
        d_a=d,
        node_d=node_d(a, prec=prec),
        C_a=C_a,
        anisotropic=anisotropic,
    )


@dataclass
class TheoremResult:
    bound: RigorousInterval
    argmax: tuple
    max_crossover: RigorousInterval
    special: SpecialCase
    reports: list = field(default_factory=list)

    def summary(self):
        return {
            "schema_version": 1,
            "bound": {"lo": format_outward(self.bound.lo, 6, up=False), "hi": format_outward(self.bound.hi, 6)},
            "argmax": list(self.argmax),
            "special_case": {
                name: format_outward(t.hi, 6) for name, t in self.special.thresholds.items()
            },
            "special_case_denominators": {
                name: f"{x.numerator}/{x.denominator}" for name, x in self.special.denominators.items()
            },
        }


def theorem_d(prec=DEFAULT_PREC):
    """The uniform cusp constant as carried through the rounded pipeline (5.84e38).

    It dominates the certified ``uniform_d``, so bounds built on it stay valid.
    """
    d = rounded_pipeline(prec)["d"]
    if not uniform_d(prec=prec).certainly_le(d):
        raise ArithmeticError("rounded cusp constant fails to dominate the certified one")
    return RigorousInterval.exact(d, prec)


def assemble_theorem(tree=None, prec=DEFAULT_PREC, d=None):
    """Maximum crossover over the depth-4 nodes, with (1,1,3,3) handled separately.

    ``d`` defaults to :func:`theorem_d`; pass ``uniform_d()`` for the sharper
    certified constant.

    The returned bound also dominates every special-case threshold plus the
    shift margin, whichever denominator is used there.
    """
    nodes = node_set() if tree is None else tuple(nodes_at_depth(tree, 4))
    d = theorem_d(prec) if d is None else _as_interval(d, prec)
    special = special_case_1133(d, prec)
    reports = [bound_report(a, d, prec, special) for a in nodes]
    regular = [r for r in reports if not r.anisotropic]
    best = max(regular, key=lambda r: r.C_a.hi)
    bound = best.C_a
    worst_special = special.worst() + special.shift_margin
    if worst_special.hi > bound.hi:
        bound = worst_special
    return TheoremResult(bound, best.coeffs, best.C_a, special, reports)


# ---------------------------------------------------------------------------
# stage-by-stage rounding replay
# ---------------------------------------------------------------------------


def round_up(x, digits=3):
    """Round an interval's upper endpoint up to ``digits`` significant figures."""
    return Fraction(format_outward(x.hi, digits, up=True))


def rounded_pipeline(prec=DEFAULT_PREC):
    """Replay the bound with every intermediate constant rounded up to 3 digits."""
    prefactor = round_up(uniform_prefactor(prec=prec))
    norm_uniform = round_up(uniform_norm_sq_bound(prec))
    d = round_up(RigorousInterval.exact(prefactor, prec) * RigorousInterval.exact(norm_uniform, prec).sqrt())
    worst = node_extremes().max_lcm_nodes[0]
    node_prefactor = round_up(cusp_prefactor(worst, prec=prec))
    node_norm = round_up(cusp_norm_sq_bound(worst, prec=prec))
    node_bound = round_up(
        RigorousInterval.exact(node_prefactor, prec) * RigorousInterval.exact(node_norm, prec).sqrt()
    )
    return {
        "node": worst,
        "uniform_norm_constant": round_up(uniform_norm_constant(prec)),
        "prefactor": prefactor,
        "uniform_norm_sq": norm_uniform,
        "d": d,
        "node_prefactor": node_prefactor,
        "node_norm_sq": node_norm,
        "node_bound": node_bound,
    }
