"""Named reference checks run by ``heptagonal verify``.

The ``paper`` suite compares computed values against published figures; the
``property`` suite runs seeded randomized versions of the structural checks.
Each fixture returns ``(ok, observed, expected)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from . import arith, bounds
from .escalator import escalate, max_truant, nodes_at_depth, truant
from .interval import DEFAULT_PREC, RigorousInterval
from .polygonal import CoeffVector
from .quadform import ShiftedDiagonalForm, eisenstein_coefficient, lattice_count, lattice_count_bound


@dataclass(frozen=True)
class Fixture:
    name: str
    check: Callable
    tolerance: str = "exact"


@dataclass(frozen=True)
class FixtureResult:
    name: str
    ok: bool
    observed: str
    expected: str
    tolerance: str

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        return f"{status}  {self.name}: observed {self.observed}, expected {self.expected} ({self.tolerance})"


def _exact(observed, expected):
    return observed == expected, str(observed), str(expected)


def _within(interval_hi, target, rel):
    target = Fraction(target)
    value = Fraction(interval_hi)
    return abs(value - target) <= rel * target, f"{float(value):.4g}", f"{float(target):.4g}"


def _hi(x):
    return bounds.round_up(x, 6) if isinstance(x, RigorousInterval) else Fraction(x)


def _node_set_size():
    return _exact(len(bounds.node_set()), 217)


def _special_case():
    return _within(_hi(bounds.special_case_1133(bounds.theorem_d()).threshold), "4.37e105", Fraction(2, 100))


def _theorem_value():
    result = bounds.assemble_theorem()
    return _within(_hi(result.bound), "3.896e106", Fraction(2, 100))


def _theorem_argmax():
    return _exact(bounds.assemble_theorem().argmax, (1, 2, 4, 108))


def _beta3_decay():
    f = bounds.shifted_form((1, 1, 3, 3))
    observed = [bounds.local_density(f, 3, 3 ** R * u).value * 3 ** R for R in range(4) for u in (1, 2)]
    return min(observed) >= Fraction(4, 3), str(min(observed)), ">= 4/3"


def _shift_product():
    a = (1, 1, 1, 3)
    b2, b5 = bounds.shift_densities(a, bounds.h_value(a, 1))
    return _exact(b2 * b5, Fraction(1, 250))


def _pipeline(key, target, rel=Fraction(1, 100)):
    return lambda: _within(bounds.rounded_pipeline()[key], target, rel)


PAPER_FIXTURES = [
    Fixture("truant (1,1,3,3) = 9", lambda: _exact(truant(CoeffVector(7, (1, 1, 3, 3))), 9)),
    Fixture("depth-4 node count = 217", _node_set_size),
    Fixture("max truant = 131", lambda: _exact(max_truant(escalate(7)), 131)),
    Fixture("C_L(1,1,1,3) = 75/13", lambda: _exact(bounds.eisenstein_CL((1, 1, 1, 3)), Fraction(75, 13))),
    Fixture("C_L(1,1,3,3) = 25/9", lambda: _exact(bounds.eisenstein_CL((1, 1, 3, 3)), Fraction(25, 9))),
    Fixture("C_Delta(1,1,1,3) = 2/3", lambda: _exact(bounds.eisenstein_CDelta((1, 1, 1, 3)), Fraction(2, 3))),
    Fixture("c(1,1,1,3) = 1/1300", lambda: _exact(bounds.c_constant((1, 1, 1, 3)), Fraction(1, 1300))),
    Fixture("b2 * b5 = 1/250 for (1,1,1,3)", _shift_product),
    Fixture(
        "divisor-sum max over L <= 524",
        lambda: _exact(bounds.max_weighted_divisor_sum(524), (Fraction(32721047140294656, 625), 524)),
    ),
    Fixture("max lcm = 524", lambda: _exact(bounds.node_extremes().max_lcm, 524)),
    Fixture("max prod(1+1/p) = 96/35", lambda: _exact(bounds.node_extremes().max_plus_product, Fraction(96, 35))),
    Fixture(
        "min prod(1-p^-2) = 768/1225",
        lambda: _exact(bounds.node_extremes().min_minus_product, Fraction(768, 1225)),
    ),
    Fixture("beta_3 decay for (1,1,3,3)", _beta3_decay),
    Fixture("(1,1,3,3) anisotropic at 3", lambda: _exact(bounds.is_anisotropic_node((1, 1, 3, 3)), True)),
    Fixture("uniform norm^2 3.65e27", _pipeline("uniform_norm_sq", "3.65e27"), "1%"),
    Fixture("prefactor 9.66e24", _pipeline("prefactor", "9.66e24"), "1%"),
    Fixture("uniform d 5.84e38", _pipeline("d", "5.84e38"), "1%"),
    Fixture("node prefactor 7.85e24 at (1,2,4,131)", _pipeline("node_prefactor", "7.85e24"), "1%"),
    Fixture("node norm^2 4.90e25 at (1,2,4,131)", _pipeline("node_norm_sq", "4.90e25"), "1%"),
    Fixture("node bound 5.50e37 at (1,2,4,131)", _pipeline("node_bound", "5.50e37"), "1%"),
    Fixture("special-case threshold 4.37e105", _special_case, "2%"),
    Fixture("final bound 3.896e106", _theorem_value, "2%"),
    Fixture("final bound argmax (1,2,4,108)", _theorem_argmax),
]


# ---------------------------------------------------------------------------
# property suite (seeded, quick)
# ---------------------------------------------------------------------------


def _lattice_bound_property(trials=40, seed=0):
    rng = random.Random(seed)
    for _ in range(trials):
        ell = rng.randint(1, 4)
        coeffs = tuple(sorted(rng.randint(1, 20) for _ in range(ell)))
        M = rng.choice([1, 2, 10])
        r = rng.randrange(M)
        n = rng.randint(1, 500)
        f = ShiftedDiagonalForm(coeffs, r, M)
        count = lattice_count(f, n)
        if count > lattice_count_bound(f, n).hi:
            return False, f"{coeffs} r={r} M={M} n={n}: {count}", "count <= bound"
    return True, f"{trials} forms", "count <= bound"


def _cusp_identity(N_max=200):
    for N in range(1, N_max + 1):
        total = sum(arith.cusp_count(N, d) for d in arith.divisors(N))
        if total * N != arith.index_gamma(N):
            return False, f"N={N}", "sum = index/N"
    return True, f"N <= {N_max}", "sum = index/N"


def _sigma0_property(N_max=10 ** 4):
    C = arith.sigma0_bound_constant(Fraction(1, 10))
    for N in range(1, N_max + 1):
        bound = C * RigorousInterval.exact(N, DEFAULT_PREC) ** Fraction(1, 10)
        if arith.sigma0(N) > bound.lo:
            return False, f"N={N}", "sigma0 <= C N^(1/10)"
    return True, f"N <= {N_max}", "sigma0 <= C N^(1/10)"


def _interval_refinement(trials=50, seed=1):
    rng = random.Random(seed)
    for _ in range(trials):
        x = Fraction(rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 3))
        coarse = RigorousInterval.exact(x, 64).sqrt().log()
        fine = RigorousInterval.exact(x, 512).sqrt().log()
        if not (coarse.lo <= fine.lo and fine.hi <= coarse.hi):
            return False, f"x={x}", "fine enclosure inside coarse"
    return True, f"{trials} refinements", "fine enclosure inside coarse"


def _odd_L_values():
    for D in range(-499, 0):
        if not arith.is_fundamental_discriminant(D):
            continue
        try:
            arith.L_value_exact(D)
        except ValueError as exc:
            return False, f"D={D}: {exc}", "exact value q pi^2/sqrt|D|"
    return True, "all D", "exact value q pi^2/sqrt|D|"


def _even_L_values(D_max=100):
    for D in range(5, D_max):
        if not arith.is_fundamental_discriminant(D):
            continue
        exact = arith.L_value_exact(D).interval()
        with mpmath.workdps(60):
            gap = abs(exact.mid - arith.L_value_numeric(D, 40))
        if gap > mpmath.mpf(10) ** -20:
            return False, f"D={D}", "agreement to 1e-20"
    return True, f"0 < D < {D_max}", "agreement to 1e-20"


def _jacobi(n_max=100):
    f = ShiftedDiagonalForm((1, 1, 1, 1), 0, 1)
    for n in range(1, n_max + 1):
        sigma = sum(arith.divisors(n))
        sigma4 = sum(arith.divisors(n // 4)) if n % 4 == 0 else 0
        if eisenstein_coefficient(f, n) != 8 * sigma - 32 * sigma4:
            return False, f"n={n}", "Jacobi r4"
    return True, f"n <= {n_max}", "Jacobi r4"


PROPERTY_FIXTURES = [
    Fixture("lattice count bound dominates enumeration", _lattice_bound_property),
    Fixture("cusp-count identity", _cusp_identity),
    Fixture("sigma0 bound with C_1/10", _sigma0_property),
    Fixture("interval refinement nests", _interval_refinement),
    Fixture("even L-values match series", _even_L_values, "1e-20"),
    Fixture("odd L-values have exact form", _odd_L_values, "1e-20"),
    Fixture("Eisenstein product = Jacobi r4", _jacobi),
    Fixture("depth-4 nodes from tree", lambda: _exact(len(nodes_at_depth(escalate(7, 4), 4)), 217)),
]

SUITES = {"paper": PAPER_FIXTURES, "property": PROPERTY_FIXTURES}


def run_suite(name):
    results = []
    for fixture in SUITES[name]:
        try:
            ok, observed, expected = fixture.check()
        except Exception as exc:  # a crash counts as a failure, with the reason shown
            ok, observed, expected = False, f"{type(exc).__name__}: {exc}", "no error"
        results.append(FixtureResult(fixture.name, bool(ok), observed, expected, fixture.tolerance))
    return results
