"""Structure functions of semicoherent systems.

A structure function is kept as a flat truth table: entry ``m`` is the system
state when exactly the components in bitmask ``m`` work. Component ``i``
(1-based) is bit ``i - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._bits import (
    check_n,
    components_of,
    mask_from_components,
    popcounts,
)
from .errors import ArityMismatch, ModelError, NotSemicoherent

__all__ = [
    "SubsetMask",
    "StructureFunction",
    "PathSetSystem",
    "OrderStatisticFunction",
    "SemicoherenceReport",
    "evaluate",
    "from_path_sets",
    "minimal_path_sets",
    "is_semicoherent",
    "series",
    "parallel",
    "k_out_of_n",
    "bridge",
    "s_difference",
]


@dataclass(frozen=True)
class SubsetMask:
    """A subset of ``{1, ..., n}`` packed into the low ``n`` bits of an integer."""

    bits: int
    n: int

    def __post_init__(self):
        check_n(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"mask {self.bits:#x} has bits outside the low {self.n}")

    @classmethod
    def of(cls, components: Iterable[int], n: int) -> "SubsetMask":
        return cls(mask_from_components(components, n), n)

    @property
    def components(self) -> tuple[int, ...]:
        return components_of(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __int__(self) -> int:
        return self.bits

    def __index__(self) -> int:
        return self.bits


def _as_mask(s, n: int) -> int:
    if isinstance(s, SubsetMask):
        if s.n != n:
            raise ArityMismatch(f"arity mismatch: subset over {s.n} components, function over {n}")
        return s.bits
    if isinstance(s, (int, np.integer)) and not isinstance(s, bool):
        s = int(s)
        if s < 0 or s >> n:
            raise ArityMismatch(f"arity mismatch: mask {s:#x} does not fit {n} components")
        return s
    return mask_from_components(s, n)


@dataclass(frozen=True, eq=False)
class StructureFunction:
    """Boolean function on ``2**n`` component states, stored as a truth table.

    Raw tables need not be semicoherent; signature computations check that
    themselves.
    """

    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = check_n(self.n)
        table = np.asarray(self.table)
        if table.shape != (1 << n,):
            raise ModelError(f"truth table must have length 2**{n} = {1 << n}, got {table.shape}")
        if not np.isin(table, (0, 1)).all():
            raise ModelError("truth table entries must be 0 or 1")
        table = np.array(table, dtype=np.uint8)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_bits(cls, bits: str) -> "StructureFunction":
        """Parse a ``"0101..."`` string, index = mask value."""
        size = len(bits)
        n = size.bit_length() - 1
        if size < 2 or 1 << n != size:
            raise ModelError(f"bit string length must be a power of two >= 2, got {size}")
        if set(bits) - {"0", "1"}:
            raise ModelError("bit string may only contain '0' and '1'")
        return cls(n, np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0"))

    def to_bits(self) -> str:
        return "".join("1" if v else "0" for v in self.table)

    def __call__(self, s) -> int:
        return evaluate(self, s)

    def __eq__(self, other):
        if not isinstance(other, StructureFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))


@dataclass(frozen=True)
class PathSetSystem:
    """Minimal path sets ``P_1, ..., P_m`` as masks (an antichain, no empty set)."""

    n: int
    paths: tuple[int, ...]

    def __post_init__(self):
        n = check_n(self.n)
        paths = tuple(sorted({int(p) for p in self.paths}, key=lambda m: (m.bit_count(), m)))
        if not paths:
            raise ModelError("path set list is empty")
        for p in paths:
            if p <= 0 or p >> n:
                raise ModelError(f"path {components_of(p)} is empty or outside 1..{n}")
        for i, a in enumerate(paths):
            for b in paths[i + 1 :]:
                if a & b == a:
                    raise ModelError(
                        f"paths are not minimal: {list(components_of(a))} is contained in {list(components_of(b))}"
                    )
        object.__setattr__(self, "paths", paths)

    @classmethod
    def of(cls, paths: Iterable[Iterable[int]], n: int) -> "PathSetSystem":
        return cls(n, tuple(mask_from_components(p, n) for p in paths))

    def as_components(self) -> list[list[int]]:
        return [list(components_of(p)) for p in self.paths]


@dataclass(frozen=True)
class OrderStatisticFunction:
    """``os_{k:n}``: 1 iff at least ``n - k + 1`` components work.

    ``k = 0`` is identically 0 and ``k = n + 1`` identically 1.
    """

    n: int
    k: int

    def __post_init__(self):
        check_n(self.n)
        if not 0 <= self.k <= self.n + 1:
            raise ValueError(f"rank k must lie in 0..{self.n + 1}, got {self.k}")

    def table(self) -> np.ndarray:
        if self.k == 0:
            return np.zeros(1 << self.n, dtype=np.uint8)
        return (popcounts(self.n) >= self.n - self.k + 1).astype(np.uint8)

    def __call__(self, s) -> int:
        if self.k == 0:
            return 0
        return int(_as_mask(s, self.n).bit_count() >= self.n - self.k + 1)


@dataclass(frozen=True)
class SemicoherenceReport:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def evaluate(phi: StructureFunction, s) -> int:
    """System state when the components in ``s`` work.

    ``s`` may be a :class:`SubsetMask`, a raw integer mask, or an iterable of
    1-based component labels.
    """
    return int(phi.table[_as_mask(s, phi.n)])


def from_path_sets(ps: PathSetSystem) -> StructureFunction:
    n = ps.n
    masks = np.arange(1 << n, dtype=np.int64)
    table = np.zeros(1 << n, dtype=np.uint8)
    for p in ps.paths:
        table |= ((masks & p) == p).astype(np.uint8)
    return StructureFunction(n, table)


def is_semicoherent(phi: StructureFunction) -> SemicoherenceReport:
    """Check boundary values and monotonicity over every covering pair ``(S, S + i)``."""
    t = phi.table
    if t[0] != 0:
        return SemicoherenceReport(False, "boundary: phi(empty set) = 1")
    if t[-1] != 1:
        return SemicoherenceReport(False, "boundary: phi(all components) = 0")
    masks = np.arange(1 << phi.n, dtype=np.int64)
    for i in range(phi.n):
        lower = masks[(masks >> i) & 1 == 0]
        bad = np.flatnonzero(t[lower] > t[lower | (1 << i)])
        if bad.size:
            s = int(lower[bad[0]])
            return SemicoherenceReport(
                False,
                f"not monotone: phi({list(components_of(s))}) = 1 but "
                f"phi({list(components_of(s | 1 << i))}) = 0",
            )
    return SemicoherenceReport(True)


def require_semicoherent(phi: StructureFunction) -> None:
    report = is_semicoherent(phi)
    if not report:
        raise NotSemicoherent(f"structure is not semicoherent ({report.violation})")


def minimal_path_sets(phi: StructureFunction) -> PathSetSystem:
    """Minimal true sets of a semicoherent structure.

    For a monotone table, ``S`` is a minimal path set exactly when ``phi(S) = 1``
    and ``phi(S - {i}) = 0`` for every ``i`` in ``S``; that is ``O(n 2**n)``.
    """
    require_semicoherent(phi)
    t = phi.table
    masks = np.arange(1 << phi.n, dtype=np.int64)
    minimal = t.astype(bool)
    for i in range(phi.n):
        has_i = (masks >> i) & 1 == 1
        minimal[has_i] &= t[masks[has_i] ^ (1 << i)] == 0
    return PathSetSystem(phi.n, tuple(int(m) for m in np.flatnonzero(minimal)))


def k_out_of_n(n: int, k: int) -> StructureFunction:
    """System that fails at the ``k``-th component failure (``os_{k:n}``)."""
    n = check_n(n)
    if not 1 <= k <= n:
        raise ModelError(f"k must satisfy 1 <= k <= n = {n}, got {k}")
    return StructureFunction(n, OrderStatisticFunction(n, k).table())


def series(n: int) -> StructureFunction:
    return k_out_of_n(n, 1)


def parallel(n: int) -> StructureFunction:
    return k_out_of_n(n, n)


def bridge() -> StructureFunction:
    """Five-component bridge with paths {1,4}, {2,5}, {1,3,5}, {2,3,4}."""
    return from_path_sets(PathSetSystem.of([[1, 4], [2, 5], [1, 3, 5], [2, 3, 4]], 5))


def s_difference(f: Sequence[float] | np.ndarray, s: int) -> np.ndarray:
    """Iterated discrete difference of a set function over the components in ``s``.

    ``f`` is a dense array of length ``2**n``. Differencing in coordinate ``i``
    gives ``f(x | x_i = 1) - f(x | x_i = 0)`` at every ``x``; the result no
    longer depends on ``x_i``.
    """
    f = np.asarray(f, dtype=np.float64)
    n = f.shape[0].bit_length() - 1
    if f.ndim != 1 or 1 << n != f.shape[0]:
        raise ModelError(f"set function must have length 2**n, got {f.shape}")
    s = int(s)
    if s < 0 or s >> n:
        raise ArityMismatch(f"arity mismatch: mask {s:#x} does not fit {n} components")
    out = f.copy()
    # axis n-1-i of the (2,)*n view is bit i under C ordering
    cube = out.reshape((2,) * n) if n else out
    for i in components_of(s):
        axis = n - i
        hi = np.take(cube, 1, axis=axis)
        lo = np.take(cube, 0, axis=axis)
        d = np.expand_dims(hi - lo, axis)
        cube = np.concatenate([d, d], axis=axis)
    return np.ascontiguousarray(cube).reshape(-1)


def enumerate_semicoherent(n: int) -> list[StructureFunction]:
    """Every semicoherent structure on ``n <= 4`` components (brute force)."""
    n = check_n(n, cap=4)
    size = 1 << n
    out = []
    for code in range(1 << size):
        if code & 1 or not (code >> (size - 1)) & 1:
            continue
        table = np.array([(code >> m) & 1 for m in range(size)], dtype=np.uint8)
        phi = StructureFunction(n, table)
        if is_semicoherent(phi):
            out.append(phi)
    return out
