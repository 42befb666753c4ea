"""Signatures, tail probabilities and the weighted symmetric projection.

All level sums go through ``math.fsum`` (exactly rounded), so results do not
depend on summation order. One consequence worth knowing: with the
exchangeable quality function, :func:`signature_from_quality` reproduces
:func:`boland_signature` bit for bit, because the exactly rounded sum of
``c`` copies of ``fl(1/C)`` is ``fl(c * fl(1/C))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from ._bits import check_n, level_masks, popcounts
from .errors import ArityMismatch, ModelError, NumericalError
from .quality import QualityFunction
from .structure import OrderStatisticFunction, StructureFunction, require_semicoherent

__all__ = [
    "SignatureVector",
    "TailProbabilityVector",
    "SymmetricApproximation",
    "boland_signature",
    "tail_probabilities",
    "signature_from_quality",
    "signature_via_rk",
    "symmetric_projection",
    "projection_residual_check",
    "weighted_distance",
]

NEGATIVE_TOL = 1e-12
LEVEL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SignatureVector:
    """``p[k-1] = Pr(T = X_{k:n})``.

    ``p`` keeps the raw computed values; :meth:`clamped` zeroes negatives that
    are within ``tolerance`` of zero.
    """

    n: int
    p: np.ndarray = field(repr=False)
    route: str = "custom"
    tolerance: float = NEGATIVE_TOL

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.shape != (self.n,):
            raise ModelError(f"signature must have {self.n} entries, got {p.shape}")
        if p.min() < -self.tolerance:
            k = int(np.argmin(p)) + 1
            raise NumericalError(
                f"p_{k} = {p[k - 1]!r} is negative beyond tolerance {self.tolerance:g}; "
                "the quality function or the structure is invalid"
            )
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def clamped(self) -> np.ndarray:
        return np.maximum(self.p, 0.0)

    def total(self) -> float:
        return math.fsum(self.p)

    def __iter__(self):
        return iter(self.p.tolist())


@dataclass(frozen=True, eq=False)
class TailProbabilityVector:
    """``values[k-1] = Pr(T >= X_{k:n})`` for ``k = 1..n+1`` (the last is 0)."""

    n: int
    values: np.ndarray = field(repr=False)

    @property
    def tails(self) -> np.ndarray:
        return self.values[: self.n]


@dataclass(frozen=True, eq=False)
class SymmetricApproximation:
    """``f* = constant + sum_k coefficients[k-1] * os_{k:n}``."""

    n: int
    constant: float
    coefficients: np.ndarray = field(repr=False)

    def level_values(self) -> np.ndarray:
        """``f*`` on a set of cardinality ``j``, for ``j = 0..n``."""
        # os_{k:n} is on at level j iff k >= n - j + 1
        c = np.asarray(self.coefficients)
        return np.array([self.constant + math.fsum(c[self.n - j :]) for j in range(self.n + 1)])

    def table(self) -> np.ndarray:
        return self.level_values()[popcounts(self.n)]

    def __call__(self, mask: int) -> float:
        return float(self.level_values()[int(mask).bit_count()])


def _check_pair(phi: StructureFunction, q: QualityFunction) -> None:
    if phi.n != q.n:
        raise ArityMismatch(f"arity mismatch: structure has {phi.n} components, quality function {q.n}")
    require_semicoherent(phi)
    q.check_levels(LEVEL_TOL)


def _level_tail(values: np.ndarray, table: np.ndarray, masks: np.ndarray) -> float:
    return math.fsum(values[masks] * table[masks])


def tail_probabilities(phi: StructureFunction, q: QualityFunction) -> TailProbabilityVector:
    _check_pair(phi, q)
    n = phi.n
    levels = level_masks(n)
    t = np.array([_level_tail(q.values, phi.table, levels[n - k + 1]) for k in range(1, n + 2)])
    return TailProbabilityVector(n, t)


def _negative_tolerance(q: QualityFunction) -> float:
    return NEGATIVE_TOL + q.level_error()


def signature_from_quality(phi: StructureFunction, q: QualityFunction) -> SignatureVector:
    """``p_k = t_k - t_{k+1}`` with ``t_k = sum_{|x| = n-k+1} q(x) phi(x)``."""
    t = tail_probabilities(phi, q).values
    return SignatureVector(phi.n, t[:-1] - t[1:], q.route, _negative_tolerance(q))


def boland_signature(phi: StructureFunction) -> SignatureVector:
    """i.i.d. signature from level counts of the structure function."""
    require_semicoherent(phi)
    n = phi.n
    levels = level_masks(n)
    counts = [int(phi.table[lv].sum()) for lv in levels]
    t = np.array([(1.0 / comb(n, n - k + 1)) * counts[n - k + 1] for k in range(1, n + 2)])
    return SignatureVector(n, t[:-1] - t[1:], "boland")


def signature_via_rk(phi: StructureFunction, q: QualityFunction) -> SignatureVector:
    """``p_k = sum_x r_k(x) phi(x)`` with ``r_k = q (2 os_k - os_{k+1} - os_{k-1})``."""
    _check_pair(phi, q)
    n = phi.n
    os = [OrderStatisticFunction(n, k).table().astype(np.float64) for k in range(n + 2)]
    phi_t = phi.table.astype(np.float64)
    p = np.empty(n)
    for k in range(1, n + 1):
        r = q.values * (-os[k + 1] + 2.0 * os[k] - os[k - 1])
        p[k - 1] = math.fsum(r * phi_t)
    return SignatureVector(n, p, q.route, _negative_tolerance(q))


def _as_table(f) -> np.ndarray:
    if isinstance(f, StructureFunction):
        return f.table.astype(np.float64)
    if isinstance(f, QualityFunction):
        return np.asarray(f.values, dtype=np.float64)
    arr = np.asarray(f, dtype=np.float64)
    n = arr.shape[0].bit_length() - 1 if arr.ndim == 1 else -1
    if arr.ndim != 1 or n < 1 or 1 << n != arr.shape[0]:
        raise ModelError(f"function table must have length 2**n with n >= 1, got shape {arr.shape}")
    return arr


def symmetric_projection(f, w) -> SymmetricApproximation:
    """Weighted least-squares projection of ``f`` onto symmetric functions.

    ``w`` must be nonnegative with positive total on every cardinality level
    (only the level-normalised weights enter the coefficients).
    """
    f = _as_table(f)
    w = _as_table(w)
    if f.shape != w.shape:
        raise ArityMismatch(f"arity mismatch: function table {f.shape}, weight table {w.shape}")
    if not np.all(np.isfinite(f)) or not np.all(np.isfinite(w)):
        raise ModelError("function and weights must be finite")
    if w.min() < 0:
        raise ModelError("weights must be nonnegative")
    n = check_n(f.shape[0].bit_length() - 1)
    means = np.empty(n + 1)
    for j, lv in enumerate(level_masks(n)):
        total = math.fsum(w[lv])
        if not total > 0:
            raise ModelError(f"weights at cardinality {j} have zero total")
        means[j] = math.fsum((w[lv] / total) * f[lv])
    c = np.array([means[n - k + 1] - means[n - k] for k in range(1, n + 1)])
    return SymmetricApproximation(n, float(f[0]), c)


def _inner(w: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return math.fsum(w * a * b)


def projection_residual_check(f, w, approx: SymmetricApproximation) -> float:
    """Largest ``|<f - f*, g>|`` over ``g`` in ``{1, os_{1:n}, ..., os_{n:n}}``.

    Zero up to rounding for the true projection (normal equations).
    """
    f = _as_table(f)
    w = _as_table(w)
    resid = f - approx.table()
    n = approx.n
    worst = abs(_inner(w, resid, np.ones_like(resid)))
    for k in range(1, n + 1):
        os_k = OrderStatisticFunction(n, k).table().astype(np.float64)
        worst = max(worst, abs(_inner(w, resid, os_k)))
    return worst


def weighted_distance(f, w, g) -> float:
    """``sum_x w(x) (f(x) - g(x))**2``."""
    f = _as_table(f)
    w = _as_table(w)
    g = g.table() if isinstance(g, SymmetricApproximation) else _as_table(g)
    d = f - g
    return math.fsum(w * d * d)
