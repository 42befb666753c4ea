"""Shared fixtures and pure-Python oracles.

The helpers here deliberately avoid the package's kernels: they work on
Python sets and ``fractions.Fraction`` so they can serve as independent
ground truth.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

import sigcore
from sigcore import _backend
from sigcore.structure import PathSetSystem, from_path_sets

BRIDGE_PATHS = [[1, 4], [2, 5], [1, 3, 5], [2, 3, 4]]
AND_OR_PATHS = [[1, 2], [1, 3]]  # x1 and (x2 or x3)


def random_paths(n: int, rng: np.random.Generator) -> list[list[int]]:
    """Random antichain of nonempty subsets of 1..n."""
    m = int(rng.integers(1, 2 * n + 1))
    raw = set()
    for _ in range(m):
        size = int(rng.integers(1, n + 1))
        raw.add(frozenset(int(c) for c in rng.choice(np.arange(1, n + 1), size=size, replace=False)))
    minimal = [s for s in raw if not any(t < s for t in raw)]
    return [sorted(s) for s in sorted(minimal, key=lambda s: (len(s), sorted(s)))]


def random_structure(n: int, rng: np.random.Generator):
    return from_path_sets(PathSetSystem.of(random_paths(n, rng), n))


def life_rank(paths, failure_order) -> int:
    """0-based index k-1 such that the system dies at the k-th failure."""
    when = {c: t for t, c in enumerate(failure_order)}
    return max(min(when[c] for c in p) for p in paths)


def brute_signature(paths, n: int, prob=None) -> list[Fraction]:
    """Enumerate failure orders; ``prob(order)`` defaults to uniform."""
    out = [Fraction(0)] * n
    for order in permutations(range(1, n + 1)):
        w = prob(order) if prob else Fraction(1)
        out[life_rank(paths, order)] += w
    total = sum(out) if prob is None else Fraction(1)
    return [x / total for x in out]


def exponential_order_prob(weights):
    """Exact Pr(failure order) for independent exponentials with integer/rational rates."""
    weights = {i + 1: Fraction(w) for i, w in enumerate(weights)}

    def prob(order):
        remaining = set(order)
        p = Fraction(1)
        for c in order:
            p *= weights[c] / sum(weights[r] for r in remaining)
            remaining.remove(c)
        return p

    return prob


def brute_quality(n: int, prob) -> dict[int, Fraction]:
    """q(mask) by enumeration of failure orders (last |S| to fail form S)."""
    q = {0: Fraction(1), (1 << n) - 1: Fraction(1)}
    for order in permutations(range(1, n + 1)):
        p = prob(order)
        for j in range(1, n):
            mask = 0
            for c in order[n - j :]:
                mask |= 1 << (c - 1)
            q[mask] = q.get(mask, Fraction(0)) + p
    return q


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    if request.param == "numba" and not _backend.HAVE_NUMBA:
        pytest.skip("numba not installed")
    previous = sigcore.set_backend(request.param)
    yield request.param
    sigcore.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
