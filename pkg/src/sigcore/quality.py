"""Relative quality functions.

``q(S)`` is the probability that every component in ``S`` outlives every
component outside ``S`` (with ``q(empty) = q(all) = 1``). Several routes
compute it; they agree wherever more than one applies, which the test-suite
leans on heavily.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _kernels
from ._bits import (
    check_n,
    components_of,
    expand_submasks,
    full_mask,
    level_masks,
    popcounts,
)
from .errors import ModelError, NumericalError, QuadratureError, RouteError
from .lifetimes import (
    IID,
    IndependentMarginals,
    OrderProbabilities,
    Weibull,
    WeibullModel,
)
from .quadrature import integrate_halfline
from .structure import s_difference

__all__ = [
    "QualityFunction",
    "NormalizedQuality",
    "WeibullCheck",
    "quality_exchangeable",
    "quality_from_order_probabilities",
    "quality_independent_quadrature",
    "quality_weibull",
    "quality_weibull_via_difference",
    "weibull_characterization_check",
    "shortest_lifetime_in_set_probability",
    "shortest_lifetime_from_quality",
    "tilde",
    "compute_quality",
]

CLOSED_FORM_ACCURATE_N = 16
DIFFERENCE_MAX_N = 16
VALUE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class QualityFunction:
    """Dense table of ``q`` over all ``2**n`` subsets."""

    n: int
    values: np.ndarray = field(repr=False)
    route: str = "custom"
    normalized: bool = False

    def __post_init__(self):
        n = check_n(self.n)
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (1 << n,):
            raise ModelError(f"quality table must have length 2**{n}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ModelError("quality values must be finite")
        if values[0] != 1.0 or values[-1] != 1.0:
            raise ModelError("quality function must equal 1 on the empty set and on the full set")
        if values.min() < -VALUE_SLACK or values.max() > 1.0 + VALUE_SLACK:
            bad = int(np.argmax((values < -VALUE_SLACK) | (values > 1 + VALUE_SLACK)))
            raise ModelError(f"q({list(components_of(bad))}) = {values[bad]!r} lies outside [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, mask: int) -> float:
        return float(self.values[int(mask)])

    def level_sums(self) -> np.ndarray:
        """``sum_{|S| = k} q(S)`` for ``k = 1..n``."""
        return np.array([math.fsum(self.values[lv]) for lv in level_masks(self.n)[1:]])

    def level_error(self) -> float:
        return float(np.max(np.abs(self.level_sums() - 1.0)))

    def check_levels(self, tol: float) -> None:
        sums = self.level_sums()
        k = int(np.argmax(np.abs(sums - 1.0)))
        if abs(sums[k] - 1.0) > tol:
            raise NumericalError(f"quality values at cardinality {k + 1} sum to {sums[k]!r}, not 1 (tol {tol:g})")

    def normalize_levels(self) -> "QualityFunction":
        """Rescale each cardinality level to sum to one."""
        values = self.values.copy()
        for lv, s in zip(level_masks(self.n)[1:], self.level_sums()):
            if s <= 0:
                raise NumericalError("cannot normalize a level with zero total")
            values[lv] /= s
        values[0] = values[-1] = 1.0
        return QualityFunction(self.n, values, self.route, normalized=True)


@dataclass(frozen=True, eq=False)
class NormalizedQuality:
    """``C(n, |S|) * q(S)``; identically one for exchangeable lifetimes."""

    n: int
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class WeibullCheck:
    is_weibull_compatible: bool
    recovered_rates: tuple[float, ...] | None
    max_deviation: float
    reason: str | None = None


def _binomials(n: int) -> np.ndarray:
    return np.array([comb(n, int(c)) for c in popcounts(n)], dtype=np.float64)


def quality_exchangeable(n: int) -> QualityFunction:
    n = check_n(n)
    inv = np.array([1.0 / comb(n, j) for j in range(n + 1)])
    return QualityFunction(n, inv[popcounts(n)], "exchangeable")


def quality_from_order_probabilities(model: OrderProbabilities) -> QualityFunction:
    """Sum ordering probabilities over the permutations whose top ``|S|`` entries form ``S``."""
    n = model.n
    perms, probs = model.arrays()
    bits = np.left_shift(1, perms[:, ::-1], dtype=np.int64)
    top = np.cumsum(bits, axis=1)  # top[:, j-1] = mask of the j longest-lived
    values = np.zeros(1 << n)
    for j in range(1, n):
        values += np.bincount(top[:, j - 1], weights=probs, minlength=1 << n)
    values[0] = values[-1] = 1.0
    return QualityFunction(n, values, "order_probs")


def _weights_table(weights: np.ndarray) -> np.ndarray:
    """Additive set function ``S -> sum_{i in S} weights[i]`` on every mask."""
    n = len(weights)
    lam = np.zeros(1 << n)
    for i, w in enumerate(weights):
        lam[1 << i : 1 << (i + 1)] = lam[: 1 << i] + w
    return lam


def _closed_form(weights: np.ndarray, route: str) -> QualityFunction:
    n = len(weights)
    if n > CLOSED_FORM_ACCURATE_N:
        warnings.warn(
            f"closed form with n = {n} sums up to 2**{n} alternating terms and may lose digits; "
            "cross-check with the quadrature route",
            RuntimeWarning,
            stacklevel=3,
        )
    values = _kernels.weibull_alternating_sums(_weights_table(weights), n)
    values[-1] = 1.0
    return QualityFunction(n, values, route)


def _weibull_args(alpha_or_model, lambdas):
    if isinstance(alpha_or_model, WeibullModel):
        return alpha_or_model
    return WeibullModel(alpha_or_model, tuple(lambdas))


def quality_weibull(alpha, lambdas=None) -> QualityFunction:
    """Closed-form ``q`` for independent Weibull lifetimes with a common shape.

    Accepts either ``(alpha, lambdas)`` or a :class:`WeibullModel`. Each value
    is an alternating sum over the subsets ``K`` of the complement, taken in
    (|K|, mask) order with compensated summation.
    """
    model = _weibull_args(alpha, lambdas)
    return _closed_form(model.weights(), "weibull_closed_form")


def quality_weibull_via_difference(alpha, lambdas=None) -> QualityFunction:
    """Same quantity through iterated differences of ``S -> 1 / lambda_alpha(S)``.

    The difference over the complement of ``S``, read at ``S``, only touches
    supersets of ``S``, so the pole at the empty set is never evaluated.
    """
    model = _weibull_args(alpha, lambdas)
    n = check_n(model.n, cap=DIFFERENCE_MAX_N)
    lam = _weights_table(model.weights())
    full = full_mask(n)

    def inverse(masks: np.ndarray) -> np.ndarray:
        if np.any(masks == 0):
            raise NumericalError("1/lambda_alpha queried at the empty set")
        return 1.0 / lam[masks]

    pc = popcounts(n)
    values = np.empty(1 << n)
    values[0] = 1.0
    for s in range(1, 1 << n):
        comp = full ^ s
        m = n - int(pc[s])
        cube = inverse(s | expand_submasks(np.arange(1 << m, dtype=np.int64), comp))
        diff = s_difference(cube, full_mask(m))[0]
        values[s] = (-1) ** m * lam[s] * diff
    values[full] = 1.0  # lam * (1 / lam) need not round to exactly one
    return QualityFunction(n, values, "weibull_difference")


def _integrand(marginals, members: list[int], others: list[int]):
    def f(t):
        out = np.zeros_like(t)
        outside = np.ones_like(t)
        for i in others:
            outside *= marginals[i].cdf(t)
        sfs = {i: marginals[i].sf(t) for i in members}
        for j in members:
            term = marginals[j].pdf(t) * outside
            for i in members:
                if i != j:
                    term = term * sfs[i]
            out += term
        return out

    return f


def quality_independent_quadrature(model, tol: float = 1e-9) -> QualityFunction:
    """``q`` for independent lifetimes by one-dimensional quadrature per subset.

    For each proper nonempty ``S``::

        q(S) = sum_{j in S} int_0^inf f_j(t) prod_{i not in S} F_i(t) prod_{i in S, i != j} (1 - F_i(t)) dt
    """
    if isinstance(model, WeibullModel):
        model = model.as_independent()
    if not isinstance(model, IndependentMarginals):
        raise RouteError(f"quadrature route needs independent marginals, got {type(model).__name__}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    marginals = model.marginals
    n = model.n
    medians = [m.median() for m in marginals]
    scale = math.exp(math.fsum(math.log(x) for x in medians) / n) if all(x > 0 for x in medians) else 1.0
    breaks = sorted({b for m in marginals for b in m.breakpoints()})
    full = full_mask(n)
    values = np.empty(1 << n)
    values[0] = values[-1] = 1.0
    for s in range(1, full):
        members = [c - 1 for c in components_of(s)]
        others = [c - 1 for c in components_of(full ^ s)]
        try:
            res = integrate_halfline(_integrand(marginals, members, others), tol, scale=scale, breakpoints=breaks)
        except NumericalError as exc:
            raise QuadratureError(f"quadrature failed for S = {list(components_of(s))}: {exc}", components_of(s)) from exc
        values[s] = res.value
    return QualityFunction(n, values, "quadrature")


def weibull_characterization_check(q: QualityFunction, tol: float = 1e-9) -> WeibullCheck:
    """Decide whether ``q`` arises from independent Weibull lifetimes with a common shape.

    The candidate additive weights are ``q(all minus {i})``; they must be
    positive, and the closed form rebuilt from them must reproduce ``q`` on
    every nonempty set to within ``tol``.
    """
    n = q.n
    full = full_mask(n)
    rates = np.array([q[full ^ (1 << i)] for i in range(n)])
    bad = np.flatnonzero(rates <= 0)
    if bad.size:
        i = int(bad[0]) + 1
        return WeibullCheck(
            False,
            None,
            math.inf,
            f"q(all components except {i}) = {rates[bad[0]]!r} is not positive; no positive rate exists for component {i}",
        )
    rebuilt = _kernels.weibull_alternating_sums(_weights_table(rates), n)
    rebuilt[-1] = 1.0
    dev = np.abs(rebuilt[1:] - q.values[1:])
    worst = int(np.argmax(dev)) + 1
    max_dev = float(dev[worst - 1])
    if max_dev > tol:
        return WeibullCheck(
            False,
            None,
            max_dev,
            f"closed form rebuilt from q(all minus one) misses q({list(components_of(worst))}) by {max_dev:.3g} > {tol:g}",
        )
    return WeibullCheck(True, tuple(float(r) for r in rates), max_dev)


def shortest_lifetime_in_set_probability(lambdas, alpha: float, s: int) -> float:
    """Probability that the first component to fail belongs to ``s`` (Weibull, common shape)."""
    w = WeibullModel(alpha, tuple(lambdas)).weights()
    s = int(s)
    if s < 0 or s >> len(w):
        raise ModelError(f"mask {s:#x} does not fit {len(w)} components")
    chosen = [w[c - 1] for c in components_of(s)]
    return math.fsum(chosen) / math.fsum(w)


def shortest_lifetime_from_quality(q: QualityFunction, s: int) -> float:
    full = full_mask(q.n)
    return math.fsum(q[full ^ (1 << (c - 1))] for c in components_of(int(s)))


def tilde(q: QualityFunction) -> NormalizedQuality:
    values = q.values * _binomials(q.n)
    values.setflags(write=False)
    return NormalizedQuality(q.n, values)


# ---------------------------------------------------------------------------
# route selection
# ---------------------------------------------------------------------------

ROUTES = ("auto", "exchangeable", "order-probs", "quadrature", "closed-form", "difference")


def _as_weibull(model) -> WeibullModel | None:
    if isinstance(model, WeibullModel):
        return model
    if isinstance(model, IndependentMarginals):
        ms = model.marginals
        if all(isinstance(m, Weibull) for m in ms) and len({m.shape for m in ms}) == 1:
            return WeibullModel(ms[0].shape, tuple(m.rate for m in ms))
    return None


def compute_quality(model, route: str = "auto", *, n: int | None = None, tol: float = 1e-9) -> QualityFunction:
    """Dispatch to a quality route; ``auto`` picks the exact route for the model family."""
    route = route.replace("_", "-")
    if route not in ROUTES:
        raise RouteError(f"unknown route {route!r}; choose from {', '.join(ROUTES)}")
    if isinstance(model, IID):
        size = model.n if model.n is not None else n
        if size is None:
            raise ModelError("i.i.d./exchangeable model needs a component count")
        if route in ("auto", "exchangeable"):
            return quality_exchangeable(size)
        if route == "order-probs":
            return quality_from_order_probabilities(OrderProbabilities.uniform(size))
        raise RouteError(f"route {route!r} needs a lifetime distribution; i.i.d. models carry none")
    if isinstance(model, OrderProbabilities):
        if route in ("auto", "order-probs"):
            return quality_from_order_probabilities(model)
        raise RouteError(f"route {route!r} does not apply to ordering probabilities")
    weib = _as_weibull(model)
    if route == "auto":
        route = "closed-form" if isinstance(model, WeibullModel) else "quadrature"
    if route == "quadrature":
        return quality_independent_quadrature(model, tol)
    if route in ("closed-form", "difference"):
        if weib is None:
            raise RouteError("closed-form routes need independent Weibull lifetimes with a common shape")
        return quality_weibull(weib) if route == "closed-form" else quality_weibull_via_difference(weib)
    raise RouteError(f"route {route!r} does not apply to {type(model).__name__}")
