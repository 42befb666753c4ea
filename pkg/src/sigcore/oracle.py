"""Ground-truth engines: exhaustive ordering enumeration and Monte Carlo.

Neither engine touches the quality function; they work from the structure
and the lifetimes directly, which is what makes them useful as oracles.

Monte Carlo runs in batches. Batch ``b`` draws from the Philox stream
``seed`` jumped ``b`` times, so a report is reproducible for a fixed
``(seed, samples, batch_size)`` no matter how many worker threads
(``SIGCORE_THREADS``) process the batches.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._backend import thread_count
from ._bits import check_n
from .errors import ArityMismatch, ModelError
from .lifetimes import IID, OrderProbabilities, draw, make_rng, marginals_of
from .signature import SignatureVector
from .structure import PathSetSystem, StructureFunction, require_semicoherent

__all__ = [
    "SimulationReport",
    "permutation_signature",
    "monte_carlo_signature",
    "monte_carlo_quality",
    "monte_carlo_shortest",
    "DEFAULT_SAMPLES",
    "DEFAULT_BATCH",
]

UNIFORM_MAX_N = 10
DEFAULT_SAMPLES = 1_000_000
DEFAULT_BATCH = 1 << 16
QUALITY_MAX_N = 12


@dataclass(frozen=True, eq=False)
class SimulationReport:
    """Empirical frequencies with binomial standard errors ``sqrt(p(1-p)/N)``."""

    kind: str
    counts: np.ndarray = field(repr=False)
    samples: int
    seed: int
    batch_size: int

    @property
    def estimates(self) -> np.ndarray:
        return self.counts / self.samples

    @property
    def standard_errors(self) -> np.ndarray:
        p = self.estimates
        return np.sqrt(p * (1.0 - p) / self.samples)

    def frequency(self, indices) -> tuple[float, float]:
        """Pooled frequency and standard error over a group of cells."""
        c = int(np.sum(self.counts[list(indices)]))
        p = c / self.samples
        return p, math.sqrt(p * (1.0 - p) / self.samples)


def permutation_signature(phi: StructureFunction, model=None) -> SignatureVector:
    """``p_k`` by summing over every ordering of the failure times.

    ``model`` is ``None``/``"uniform"``/an :class:`IID` model (all ``n!``
    orderings equally likely, ``n <= 10``) or an :class:`OrderProbabilities`.
    """
    require_semicoherent(phi)
    n = phi.n
    if model is None or model == "uniform" or isinstance(model, IID):
        if n > UNIFORM_MAX_N:
            raise ModelError(
                f"enumerating {n}! orderings is too costly (n <= {UNIFORM_MAX_N}); use the Monte Carlo oracle"
            )
        counts = _kernels.permutation_uniform_counts(n, phi.table)
        total = math.factorial(n)
        return SignatureVector(n, counts / total, "permutation")
    if isinstance(model, OrderProbabilities):
        if model.n != n:
            raise ArityMismatch(f"arity mismatch: structure has {n} components, model {model.n}")
        perms, probs = model.arrays()
        return SignatureVector(n, _kernels.permutation_weighted(perms, probs, phi.table), "permutation")
    raise ModelError(f"permutation oracle needs ordering probabilities, got {type(model).__name__}")


def _batches(samples: int, batch_size: int) -> list[tuple[int, int]]:
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    out = []
    for b, start in enumerate(range(0, samples, batch_size)):
        out.append((b, min(batch_size, samples - start)))
    return out


def _run(model, samples, seed, batch_size, kernel, width) -> np.ndarray:
    def one(job):
        b, rows = job
        return kernel(draw(model, make_rng(seed, b), rows))

    jobs = _batches(samples, batch_size)
    total = np.zeros(width, dtype=np.int64)
    workers = min(thread_count(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            for counts in pool.map(one, jobs):
                total += counts
    else:
        for job in jobs:
            total += one(job)
    return total


def _model_n(model) -> int:
    return len(marginals_of(model))


def monte_carlo_signature(
    structure,
    model,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    batch_size: int = DEFAULT_BATCH,
) -> SimulationReport:
    """Empirical ``Pr(T = X_{k:n})``.

    With a :class:`PathSetSystem`, ``T`` is the max over paths of the min
    lifetime on the path and ``k = 1 + #{i : X_i < T}``. With a truth table,
    components are failed in time order until the structure goes down.
    """
    n = _model_n(model)
    if structure.n != n:
        raise ArityMismatch(f"arity mismatch: structure has {structure.n} components, model {n}")
    if isinstance(structure, PathSetSystem):
        members, offsets = _kernels.paths_to_csr(structure.paths)

        def kernel(X):
            return _kernels.rank_counts_paths(X, members, offsets)

    elif isinstance(structure, StructureFunction):
        require_semicoherent(structure)
        table = structure.table

        def kernel(X):
            return _kernels.rank_counts_table(X, table)

    else:
        raise ModelError(f"expected a structure function or path sets, got {type(structure).__name__}")
    counts = _run(model, samples, seed, batch_size, kernel, n)
    return SimulationReport("signature", counts, samples, seed, batch_size)


def monte_carlo_quality(
    model,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    batch_size: int = DEFAULT_BATCH,
) -> SimulationReport:
    """Empirical ``q``: each draw credits, at every cardinality ``k``, the set of its ``k`` longest lifetimes."""
    n = check_n(_model_n(model), cap=QUALITY_MAX_N)
    counts = _run(model, samples, seed, batch_size, _kernels.top_set_counts, 1 << n)
    return SimulationReport("quality", counts, samples, seed, batch_size)


def monte_carlo_shortest(
    model,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    batch_size: int = DEFAULT_BATCH,
) -> SimulationReport:
    """Empirical probability that component ``i`` has the shortest lifetime (ties to lower index)."""
    n = _model_n(model)

    def kernel(X):
        return np.bincount(np.argmin(X, axis=1), minlength=n)

    counts = _run(model, samples, seed, batch_size, kernel, n)
    return SimulationReport("shortest", counts, samples, seed, batch_size)
