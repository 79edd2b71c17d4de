"""Escalator tree of candidate coefficient vectors.

Each node stores the set of integers in [0, scan_limit] it represents as a
boolean array; a child is obtained by one sumset with the multiples k p_m(x).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .polygonal import generalized_values_upto

DEFAULT_SCAN_LIMIT = 10 ** 4
MAX_SCAN_LIMIT = 10 ** 6


class EscalationExhausted(RuntimeError):
    """An internal node found no truant even at the largest scan limit."""


@dataclass
class EscalatorNode:
    coeffs: tuple
    truant: int | None
    scan_limit: int
    children: list = field(default_factory=list)
    exhausted: bool = False

    @property
    def depth(self):
        return len(self.coeffs)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self):
        return {
            "coeffs": list(self.coeffs),
            "truant": self.truant,
            "scan_limit": self.scan_limit,
            "children": [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            tuple(data["coeffs"]),
            data["truant"],
            data["scan_limit"],
            [cls.from_dict(c) for c in data["children"]],
        )

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _add_multiple(represented, values, k):
    limit = len(represented) - 1
    out = represented.copy()
    for v in values:
        step = k * v
        if step > limit:
            break
        if step:
            out[step:] |= represented[: limit + 1 - step]
    return out


def represented_set(m, coeffs, scan_limit):
    """Boolean array: entry n is True iff n = sum a_j p_m(x_j) has a solution."""
    values = generalized_values_upto(m, scan_limit)
    rep = np.zeros(scan_limit + 1, dtype=bool)
    rep[0] = True
    for a in coeffs:
        rep = _add_multiple(rep, values, a)
    return rep


def _first_missing(rep):
    missing = np.flatnonzero(~rep[1:])
    return int(missing[0]) + 1 if len(missing) else None


def truant(v, scan_limit=DEFAULT_SCAN_LIMIT):
    """Smallest 1 <= n <= scan_limit not represented by v, or None."""
    if scan_limit < 1:
        raise ValueError("scan_limit must be at least 1")
    return _first_missing(represented_set(v.m, v.coeffs, scan_limit))


def _grow(m, coeffs, rep, values, depth, scan_limit, max_limit):
    # expand the node whose represented set is ``rep``
    t = _first_missing(rep)
    limit = scan_limit
    wants_children = depth is None or len(coeffs) < depth
    while t is None and wants_children and depth is not None and limit < max_limit:
        limit = min(2 * limit, max_limit)
        values = generalized_values_upto(m, limit)
        rep = represented_set(m, coeffs, limit)
        t = _first_missing(rep)
    node = EscalatorNode(tuple(coeffs), t, limit)
    if t is None:
        node.exhausted = wants_children and depth is not None
        return node
    if not wants_children:
        return node
    start = coeffs[-1] if coeffs else 1
    for k in range(start, t + 1):
        child_rep = _add_multiple(rep, values, k)
        node.children.append(_grow(m, coeffs + (k,), child_rep, values, depth, limit, max_limit))
    return node


def _grow_task(args):
    m, coeffs, depth, scan_limit, max_limit = args
    values = generalized_values_upto(m, scan_limit)
    rep = represented_set(m, coeffs, scan_limit)
    return _grow(m, coeffs, rep, values, depth, scan_limit, max_limit)


def escalate(m, depth=None, scan_limit=DEFAULT_SCAN_LIMIT, jobs=1, max_limit=MAX_SCAN_LIMIT):
    """Build the escalator tree rooted at the empty vector.

    With ``depth=None`` every branch is grown until its leaf represents all of
    [1, scan_limit].  With a depth, nodes at that depth are not expanded, and
    an internal node lacking a truant triggers doubling of its scan limit.
    """
    if depth is not None and depth < 1:
        raise ValueError("depth must be at least 1")
    if scan_limit < 1:
        raise ValueError("scan_limit must be positive")
    if jobs <= 1:
        return _grow_task((m, (), depth, scan_limit, max_limit))
    # expand the first levels serially, then farm out the subtrees
    root = _grow_task((m, (), 2 if depth is None else min(depth, 2), scan_limit, max_limit))
    frontier = [n for n in root.walk() if n.depth == 2 and n.truant is not None]
    if depth is not None and depth <= 2:
        return root
    tasks = [(m, n.coeffs, depth, n.scan_limit, max_limit) for n in frontier]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        grown = list(pool.map(_grow_task, tasks))
    by_coeffs = dict(zip((n.coeffs for n in frontier), grown))
    for node in root.walk():
        if node.depth == 2 and node.coeffs in by_coeffs:
            node.children = by_coeffs[node.coeffs].children
    return root


def nodes_at_depth(tree, d):
    return [n.coeffs for n in tree.walk() if n.depth == d]


def exhausted_nodes(tree):
    return [n.coeffs for n in tree.walk() if n.exhausted]


def max_truant(tree):
    flagged = exhausted_nodes(tree)
    if flagged:
        raise EscalationExhausted(f"no truant found for internal nodes {flagged}")
    truants = [n.truant for n in tree.walk() if n.truant is not None]
    return max(truants)
