"""Component lifetime models.

Marginal laws expose vectorised ``pdf``, ``cdf``, ``sf`` and ``quantile``.
Joint models are a small closed family: i.i.d./exchangeable (no law needed),
independent marginals, independent Weibull with a shared shape, and an
arbitrary joint law given through its ``n!`` ordering probabilities.

Sampling uses numpy's Philox counter-based generator with inverse-transform
draws, one uniform per component per row, rows filled in C order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Mapping, Union

import numpy as np
from scipy import special

from ._bits import check_n
from .errors import ModelError, NotSamplable

__all__ = [
    "Weibull",
    "Exponential",
    "Uniform",
    "LogNormal",
    "IID",
    "Exchangeable",
    "IndependentMarginals",
    "WeibullModel",
    "OrderProbabilities",
    "sample",
    "make_rng",
]

ORDER_PROBS_MAX_N = 8


def _positive(name: str, value) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ModelError(f"{name} must be a finite positive number, got {value}")
    return value


class Marginal:
    """Absolutely continuous law on ``[0, inf)`` with ``F(0) = 0``."""

    def pdf(self, t):
        raise NotImplementedError

    def cdf(self, t):
        raise NotImplementedError

    def sf(self, t):
        return 1.0 - self.cdf(t)

    def quantile(self, p):
        raise NotImplementedError

    def median(self) -> float:
        return float(self.quantile(0.5))

    def breakpoints(self) -> tuple[float, ...]:
        """Interior points where the density is not smooth."""
        return ()

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Weibull(Marginal):
    """``F(t) = 1 - exp(-(rate * t) ** shape)``."""

    shape: float
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("Weibull shape", self.shape))
        object.__setattr__(self, "rate", _positive("Weibull rate", self.rate))

    def _h(self, t):
        return (self.rate * np.maximum(np.asarray(t, dtype=float), 0.0)) ** self.shape

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        a, lam = self.shape, self.rate
        with np.errstate(divide="ignore"):
            x = lam * np.maximum(t, 0.0)
            out = a * lam * x ** (a - 1.0) * np.exp(-(x**a))
        return np.where(t >= 0, out, 0.0)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, -np.expm1(-self._h(t)), 0.0)

    def sf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, np.exp(-self._h(t)), 1.0)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        return (-np.log1p(-p)) ** (1.0 / self.shape) / self.rate

    def to_json(self) -> dict:
        if self.shape == 1.0:
            return {"dist": "exponential", "rate": self.rate}
        return {"dist": "weibull", "alpha": self.shape, "rate": self.rate}


def Exponential(rate: float) -> Weibull:
    """Exponential law, i.e. Weibull with shape 1."""
    return Weibull(1.0, rate)


@dataclass(frozen=True)
class Uniform(Marginal):
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b) and 0 <= a < b):
            raise ModelError(f"Uniform needs 0 <= a < b, got a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= self.a) & (t <= self.b), 1.0 / (self.b - self.a), 0.0)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip((t - self.a) / (self.b - self.a), 0.0, 1.0)

    def quantile(self, p):
        return self.a + np.asarray(p, dtype=float) * (self.b - self.a)

    def breakpoints(self):
        return (self.a, self.b) if self.a > 0 else (self.b,)

    def to_json(self) -> dict:
        return {"dist": "uniform", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class LogNormal(Marginal):
    """``log X ~ Normal(mu, sigma**2)``."""

    mu: float
    sigma: float

    def __post_init__(self):
        mu = float(self.mu)
        if not math.isfinite(mu):
            raise ModelError(f"LogNormal mu must be finite, got {mu}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", _positive("LogNormal sigma", self.sigma))

    def _z(self, t):
        with np.errstate(divide="ignore"):
            return (np.log(t) - self.mu) / self.sigma

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        pos = t > 0
        ts = np.where(pos, t, 1.0)
        z = self._z(ts)
        out = np.exp(-0.5 * z * z) / (ts * self.sigma * math.sqrt(2.0 * math.pi))
        return np.where(pos, out, 0.0)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        pos = t > 0
        return np.where(pos, special.ndtr(self._z(np.where(pos, t, 1.0))), 0.0)

    def sf(self, t):
        t = np.asarray(t, dtype=float)
        pos = t > 0
        return np.where(pos, special.ndtr(-self._z(np.where(pos, t, 1.0))), 1.0)

    def quantile(self, p):
        return np.exp(self.mu + self.sigma * special.ndtri(np.asarray(p, dtype=float)))

    def to_json(self) -> dict:
        return {"dist": "lognormal", "mu": self.mu, "sigma": self.sigma}


# ---------------------------------------------------------------------------
# joint models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IID:
    """i.i.d. lifetimes with an unspecified common law. ``n`` may be bound later."""

    n: int | None = None

    def __post_init__(self):
        if self.n is not None:
            check_n(self.n)

    def to_json(self) -> dict:
        out: dict = {"type": "iid"}
        if self.n is not None:
            out["n"] = self.n
        return out


@dataclass(frozen=True)
class Exchangeable(IID):
    def to_json(self) -> dict:
        out = super().to_json()
        out["type"] = "exchangeable"
        return out


@dataclass(frozen=True)
class IndependentMarginals:
    marginals: tuple[Marginal, ...]

    def __post_init__(self):
        marginals = tuple(self.marginals)
        check_n(len(marginals))
        for m in marginals:
            if not isinstance(m, Marginal):
                raise ModelError(f"not a marginal law: {m!r}")
        object.__setattr__(self, "marginals", marginals)

    @property
    def n(self) -> int:
        return len(self.marginals)

    def to_json(self) -> dict:
        return {"type": "independent", "marginals": [m.to_json() for m in self.marginals]}


@dataclass(frozen=True)
class WeibullModel:
    """Independent Weibull lifetimes sharing the shape ``alpha``."""

    alpha: float
    lambdas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        lambdas = tuple(_positive(f"lambda[{i + 1}]", v) for i, v in enumerate(self.lambdas))
        check_n(len(lambdas))
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def n(self) -> int:
        return len(self.lambdas)

    def weights(self) -> np.ndarray:
        """``lambda_i ** alpha``, the additive weights of the closed form."""
        return np.asarray(self.lambdas) ** self.alpha

    def as_independent(self) -> IndependentMarginals:
        return IndependentMarginals(tuple(Weibull(self.alpha, lam) for lam in self.lambdas))

    def to_json(self) -> dict:
        return {"type": "weibull", "alpha": self.alpha, "lambda": list(self.lambdas)}


@dataclass(frozen=True, eq=False)
class OrderProbabilities:
    """Joint law given by ``Pr(X_{s(1)} < ... < X_{s(n)})`` for permutations ``s``.

    Keys are 1-based tuples; missing permutations have probability zero.
    """

    n: int
    probs: Mapping[tuple[int, ...], float] = field(repr=False)

    def __post_init__(self):
        n = check_n(self.n, cap=ORDER_PROBS_MAX_N)
        target = tuple(range(1, n + 1))
        clean: dict[tuple[int, ...], float] = {}
        for perm, p in self.probs.items():
            perm = tuple(int(c) for c in perm)
            if tuple(sorted(perm)) != target:
                raise ModelError(f"{list(perm)} is not a permutation of 1..{n}")
            p = float(p)
            if not (math.isfinite(p) and p >= 0):
                raise ModelError(f"ordering probability for {list(perm)} must be >= 0, got {p}")
            if perm in clean:
                raise ModelError(f"permutation {list(perm)} listed twice")
            clean[perm] = p
        total = math.fsum(clean.values())
        if abs(total - 1.0) > 1e-12:
            raise ModelError(f"ordering probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", dict(sorted(clean.items())))

    @classmethod
    def uniform(cls, n: int) -> "OrderProbabilities":
        n = check_n(n, cap=ORDER_PROBS_MAX_N)
        perms = list(permutations(range(1, n + 1)))
        return cls(n, {p: 1.0 / len(perms) for p in perms})

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """0-based permutation matrix and matching probability vector."""
        perms = np.array(list(self.probs.keys()), dtype=np.int64).reshape(-1, self.n) - 1
        return perms, np.array(list(self.probs.values()), dtype=np.float64)

    def to_json(self) -> dict:
        return {
            "type": "order_probs",
            "probs": [{"perm": list(k), "p": v} for k, v in self.probs.items()],
        }


LifetimeModel = Union[IID, Exchangeable, IndependentMarginals, WeibullModel, OrderProbabilities]


def model_n(model) -> int | None:
    return getattr(model, "n", None)


def marginals_of(model) -> tuple[Marginal, ...]:
    if isinstance(model, WeibullModel):
        return model.as_independent().marginals
    if isinstance(model, IndependentMarginals):
        return model.marginals
    raise NotSamplable(f"{type(model).__name__} model is not samplable; supply marginals")


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator for ``seed``; ``stream`` selects a jumped-ahead substream."""
    bitgen = np.random.Philox(int(seed))
    if stream:
        bitgen = bitgen.jumped(int(stream))
    return np.random.Generator(bitgen)


def draw(model, rng: np.random.Generator, count: int) -> np.ndarray:
    marginals = marginals_of(model)
    u = rng.random((int(count), len(marginals)))
    out = np.empty_like(u)
    for i, m in enumerate(marginals):
        out[:, i] = m.quantile(u[:, i])
    return out


def sample(model, seed: int, count: int) -> np.ndarray:
    """``count`` independent rows of component lifetimes, shape ``(count, n)``."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    marginals_of(model)
    return draw(model, make_rng(seed), count)
