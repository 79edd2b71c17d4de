"""Generalized polygonal numbers and exact representation counts.

``rep_table`` counts integer solutions of n = sum a_j p_m(x_j) by iterated
convolution of unary count arrays.  ``shifted_rep_count`` counts points of a
diagonal quadratic form on a congruence coset; the two are tied together by
completing the square (see ``verify_completion_identity``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .quadform import ShiftedDiagonalForm

MAX_LENGTH = 8
_U64_MAX = np.iinfo(np.uint64).max


def polygonal_number(m, x):
    """p_m(x) = ((m-2) x^2 - (m-4) x) / 2."""
    if m < 3:
        raise ValueError("polygonal order must be at least 3")
    return ((m - 2) * x * x - (m - 4) * x) // 2


@dataclass(frozen=True)
class CoeffVector:
    """Polygonal order m together with nondecreasing coefficients a_1..a_l."""

    m: int
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(int(a) for a in self.coeffs)
        if self.m < 3:
            raise ValueError("polygonal order must be at least 3")
        if len(coeffs) > MAX_LENGTH:
            raise ValueError(f"at most {MAX_LENGTH} coefficients are supported")
        if any(a < 1 for a in coeffs):
            raise ValueError("coefficients must be positive")
        if list(coeffs) != sorted(coeffs):
            raise ValueError("coefficients must be nondecreasing")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def parse(cls, m, text):
        coeffs = tuple(int(part) for part in str(text).split(",") if part.strip())
        if not coeffs:
            raise ValueError("empty coefficient list")
        return cls(m, coeffs)

    @property
    def ell(self):
        return len(self.coeffs)

    def extend(self, k):
        return CoeffVector(self.m, self.coeffs + (k,))

    def completed_form(self):
        """The shifted form sum a_j x_j^2 with x_j = m (mod 2(m-2))."""
        return ShiftedDiagonalForm(self.coeffs, self.m, 2 * (self.m - 2))

    def completed_target(self, n):
        """8(m-2) n + sum a_j (m-4)^2."""
        return 8 * (self.m - 2) * n + sum(self.coeffs) * (self.m - 4) ** 2


def _x_bound(m, n, a=1):
    # p_m(x) >= ((m-2)x^2 - (m-4)|x|)/2 forces |x| < 1 + sqrt(2n/((m-2)a))
    return 2 + math.isqrt(2 * n // ((m - 2) * a))


def generalized_values_upto(m, N):
    """Sorted distinct values p_m(x), x in Z, lying in [0, N]."""
    if N < 0:
        return []
    bound = _x_bound(m, N)
    values = {polygonal_number(m, x) for x in range(-bound, bound + 1)}
    return sorted(v for v in values if 0 <= v <= N)


def unary_counts(m, a, N):
    """counts[v] = #{x in Z : a p_m(x) = v} for 0 <= v <= N."""
    counts = np.zeros(N + 1, dtype=np.uint64)
    bound = _x_bound(m, N, a)
    for x in range(-bound, bound + 1):
        v = a * polygonal_number(m, x)
        if 0 <= v <= N:
            counts[v] += 1
    return counts


def _checked_convolve(left, right, N):
    # every entry of the result is at most sum(left) * sum(right)
    total_left = int(left.sum(dtype=object))
    total_right = int(right.sum(dtype=object))
    if total_left * total_right > _U64_MAX:
        raise OverflowError("representation count may exceed 64 bits")
    out = np.zeros(N + 1, dtype=np.uint64)
    for v in np.nonzero(right)[0]:
        out[v:] += right[v] * left[: N + 1 - v]
    return out


@dataclass
class RepTable:
    """Counts indexed 0..limit for either r*_{m,a} or s*_{r,M,a}."""

    kind: str
    coeffs: tuple
    limit: int
    counts: np.ndarray
    m: int | None = None
    r: int | None = None
    M: int | None = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, n):
        return int(self.counts[n])

    def __len__(self):
        return len(self.counts)

    def metadata(self):
        return {
            "m": self.m,
            "coeffs": list(self.coeffs),
            "limit": self.limit,
            "kind": self.kind,
            "r": self.r,
            "M": self.M,
        }

    def save(self, directory, name=None):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        name = name or cache_name(self.kind, self.m, self.coeffs, self.limit, self.r, self.M)
        path = directory / name
        path.write_bytes(self.counts.astype("<u8").tobytes())
        (directory / f"{name}.meta.json").write_text(
            json.dumps(self.metadata(), sort_keys=True) + "\n", encoding="utf-8"
        )
        return path

    @classmethod
    def load(cls, path):
        path = Path(path)
        meta = json.loads(Path(f"{path}.meta.json").read_text(encoding="utf-8"))
        counts = np.frombuffer(path.read_bytes(), dtype="<u8").astype(np.uint64)
        if len(counts) != meta["limit"] + 1:
            raise ValueError(f"cache file {path} has the wrong length")
        return cls(
            kind=meta["kind"],
            coeffs=tuple(meta["coeffs"]),
            limit=meta["limit"],
            counts=counts,
            m=meta.get("m"),
            r=meta.get("r"),
            M=meta.get("M"),
        )


def cache_name(kind, m, coeffs, limit, r=None, M=None):
    tag = "r" if kind == "r*" else "s"
    parts = [tag, f"m{m}" if m is not None else "", "-".join(map(str, coeffs)), f"N{limit}"]
    if kind == "s*":
        parts += [f"r{r}", f"M{M}"]
    return "_".join(p for p in parts if p) + ".u64"


def rep_table(v, N, cache_dir=None):
    """Table of r*_{m,a}(n) for 0 <= n <= N."""
    if N < 0:
        raise ValueError("limit must be nonnegative")
    if cache_dir is not None:
        path = Path(cache_dir) / cache_name("r*", v.m, v.coeffs, N)
        if path.exists():
            return RepTable.load(path)
    counts = np.zeros(N + 1, dtype=np.uint64)
    counts[0] = 1
    for a in v.coeffs:
        counts = _checked_convolve(counts, unary_counts(v.m, a, N), N)
    table = RepTable("r*", v.coeffs, N, counts, m=v.m)
    if cache_dir is not None:
        table.save(cache_dir)
    return table


def _shifted_unary(a, r, M, N):
    counts = np.zeros(N + 1, dtype=np.uint64)
    bound = math.isqrt(N // a) + 1
    for x in range(-bound, bound + 1):
        if (x - r) % M == 0:
            v = a * x * x
            if v <= N:
                counts[v] += 1
    return counts


def shifted_rep_table(f, N, cache_dir=None):
    """Table of s*_{r,M,a}(n) for 0 <= n <= N."""
    if cache_dir is not None:
        path = Path(cache_dir) / cache_name("s*", None, f.coeffs, N, f.r, f.M)
        if path.exists():
            return RepTable.load(path)
    counts = np.zeros(N + 1, dtype=np.uint64)
    counts[0] = 1
    for a in f.coeffs:
        counts = _checked_convolve(counts, _shifted_unary(a, f.r, f.M, N), N)
    table = RepTable("s*", f.coeffs, N, counts, r=f.r, M=f.M)
    if cache_dir is not None:
        table.save(cache_dir)
    return table


def shifted_rep_count(f, n):
    """#{x in Z^l : sum a_j x_j^2 = n, x_j = r (mod M)} by meet in the middle."""
    if n < 0:
        return 0

    def values(a):
        bound = math.isqrt(n // a) + 1
        return [a * x * x for x in range(-bound, bound + 1) if (x - f.r) % f.M == 0 and a * x * x <= n]

    half = len(f.coeffs) // 2
    left = {0: 1}
    for a in f.coeffs[:half]:
        left = _sumset_counts(left, values(a), n)
    right = {0: 1}
    for a in f.coeffs[half:]:
        right = _sumset_counts(right, values(a), n)
    return sum(c * right.get(n - s, 0) for s, c in left.items())


def _sumset_counts(acc, vals, n):
    out = {}
    for s, c in acc.items():
        for v in vals:
            t = s + v
            if t <= n:
                out[t] = out.get(t, 0) + c
    return out


@dataclass(frozen=True)
class CompletionCheck:
    ok: bool
    counterexample: int | None = None

    def __bool__(self):
        return self.ok


def verify_completion_identity(v, N):
    """Check r*_{m,a}(n) = s*_{m,2(m-2),a}(8(m-2)n + sum a_j (m-4)^2) for n <= N."""
    table = rep_table(v, N)
    form = v.completed_form()
    for n in range(N + 1):
        if table[n] != shifted_rep_count(form, v.completed_target(n)):
            return CompletionCheck(False, n)
    return CompletionCheck(True)
