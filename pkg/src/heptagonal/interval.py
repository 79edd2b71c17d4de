"""Directed-rounding interval arithmetic on top of ``mpmath.iv``.

Every analytic constant in the bound engine is carried as a
:class:`RigorousInterval`.  Endpoints are binary floats at ``prec`` bits; each
operation rounds the lower endpoint down and the upper endpoint up, so the
enclosure property survives arbitrary chains of operations.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath
from mpmath import iv, mp
from mpmath.libmp import mpf_abs, mpf_neg

DEFAULT_PREC = 256


@contextmanager
def _ivprec(prec):
    saved = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = saved


def _endpoints(x):
    lo, hi = x._mpi_
    return mp.make_mpf(lo), mp.make_mpf(hi)


@dataclass(frozen=True)
class RigorousInterval:
    """A closed interval ``[lo, hi]`` with ``prec``-bit float endpoints."""

    lo: mpmath.mpf
    hi: mpmath.mpf
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # -- construction -------------------------------------------------------

    @classmethod
    def _wrap(cls, x, prec):
        lo, hi = _endpoints(x)
        return cls(lo, hi, prec)

    def _iv(self):
        return iv.mpf((self.lo, self.hi))

    @classmethod
    def exact(cls, value, prec=DEFAULT_PREC):
        """Tightest enclosure of an integer or rational ``value``."""
        value = Fraction(value)
        with _ivprec(prec):
            x = iv.mpf(value.numerator) / iv.mpf(value.denominator)
            return cls._wrap(x, prec)

    @classmethod
    def from_decimal(cls, text, prec=DEFAULT_PREC):
        """Enclose a decimal literal such as ``"6.95e18"`` exactly."""
        return cls.exact(Fraction(text), prec)

    @classmethod
    def pi(cls, prec=DEFAULT_PREC):
        with _ivprec(prec):
            return cls._wrap(iv.pi, prec)

    @classmethod
    def hull(cls, items):
        items = list(items)
        prec = max(x.prec for x in items)
        return cls(min(x.lo for x in items), max(x.hi for x in items), prec)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RigorousInterval):
            return other
        if isinstance(other, (int, Rational)):
            return RigorousInterval.exact(other, self.prec)
        if isinstance(other, str):
            return RigorousInterval.from_decimal(other, self.prec)
        return NotImplemented

    def _binary(self, other, op):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = max(self.prec, other.prec)
        with _ivprec(prec):
            return RigorousInterval._wrap(op(self._iv(), other._iv()), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binary(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: b * a)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return RigorousInterval(negate(self.hi), negate(self.lo), self.prec)

    def symmetric(self):
        """[-m, m] with m the largest absolute endpoint."""
        m = max(mp.make_mpf(mpf_abs(self.lo._mpf_)), mp.make_mpf(mpf_abs(self.hi._mpf_)))
        return RigorousInterval(negate(m), m, self.prec)

    def __pow__(self, exponent):
        if isinstance(exponent, int):
            with _ivprec(self.prec):
                return RigorousInterval._wrap(self._iv() ** exponent, self.prec)
        exponent = self._coerce(exponent)
        if exponent is NotImplemented:
            return NotImplemented
        if self.lo <= 0:
            raise ValueError("non-integer power needs a positive base")
        return (self.log() * exponent).exp()

    def exp(self):
        with _ivprec(self.prec):
            return RigorousInterval._wrap(iv.exp(self._iv()), self.prec)

    def log(self):
        if self.lo <= 0:
            raise ValueError("log of a non-positive interval")
        with _ivprec(self.prec):
            return RigorousInterval._wrap(iv.log(self._iv()), self.prec)

    def sqrt(self):
        if self.lo < 0:
            raise ValueError("sqrt of a negative interval")
        with _ivprec(self.prec):
            return RigorousInterval._wrap(iv.sqrt(self._iv()), self.prec)

    # -- queries ------------------------------------------------------------

    def contains(self, value):
        """True if the exact ``value`` (int, Fraction, mpf) lies in the interval."""
        if isinstance(value, (int, Rational)):
            # compare exactly; mpf products would round at the ambient precision
            return mpf_to_fraction(self.lo) <= value <= mpf_to_fraction(self.hi)
        return self.lo <= value <= self.hi

    def certainly_le(self, other):
        other = self._coerce(other)
        return self.hi <= other.lo

    def certainly_lt(self, other):
        other = self._coerce(other)
        return self.hi < other.lo

    @property
    def mid(self):
        with mpmath.workprec(self.prec + 8):
            return (self.lo + self.hi) / 2

    @property
    def width(self):
        with mpmath.workprec(self.prec + 8):
            return self.hi - self.lo

    def relative_width(self):
        with mpmath.workprec(self.prec + 8):
            return self.width / abs(self.mid)

    def __float__(self):
        return float(self.mid)

    def rel_diff(self, target, endpoint="hi"):
        """Relative distance of an endpoint from a reference number."""
        target = Fraction(target)
        value = mpf_to_fraction(self.hi if endpoint == "hi" else self.lo)
        return float(abs(value - target) / abs(target))

    def sig(self, digits=4, endpoint="hi"):
        """Endpoint rounded outward to ``digits`` significant figures."""
        value = self.hi if endpoint == "hi" else self.lo
        return format_outward(value, digits, up=(endpoint == "hi"))

    def __repr__(self):
        return f"[{mpmath.nstr(self.lo, 12)}, {mpmath.nstr(self.hi, 12)}]"


def negate(x):
    """-x without rounding (plain mpf negation rounds to the ambient precision)."""
    return mp.make_mpf(mpf_neg(x._mpf_))


def mpf_to_fraction(value):
    """Exact rational value of a binary float."""
    if not isinstance(value, mpmath.mpf):
        # only plain numbers land here; mpf endpoints must not be re-rounded
        value = mpmath.mpf(value)
    if not mpmath.isfinite(value):
        raise ValueError(f"{value} has no rational value")
    sign, man, exp, _ = value._mpf_
    if man == 0:
        return Fraction(0)
    q = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -q if sign else q


def format_outward(value, digits=4, up=True):
    """``d.ddde+XX`` decimal bounding ``value`` from above (``up``) or below."""
    q = value if isinstance(value, Fraction) else mpf_to_fraction(value)
    if q == 0:
        return "0"
    mag = abs(q)
    e = len(str(mag.numerator)) - len(str(mag.denominator))
    while Fraction(10) ** e > mag:
        e -= 1
    while Fraction(10) ** (e + 1) <= mag:
        e += 1
    scaled = mag / Fraction(10) ** (e - digits + 1)
    away = up == (q > 0)
    mant = math.ceil(scaled) if away else math.floor(scaled)
    if mant == 10 ** digits:
        mant //= 10
        e += 1
    text = str(mant)
    sign = "-" if q < 0 else ""
    return f"{sign}{text[0]}.{text[1:]}e{e:+d}" if digits > 1 else f"{sign}{text}e{e:+d}"
