"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

The public functions at the bottom dispatch on :func:`sigcore._backend.use_numba`.
Both flavours must return identical integer counts for identical inputs;
floating-point kernels agree to rounding (the numba Weibull sum uses
Neumaier compensation, the numpy one ``math.fsum``).

Tie convention everywhere: equal lifetimes are ordered by component index,
lower index failing first.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from . import _backend
from ._bits import cardinality_order, expand_submasks, full_mask, popcounts
from ._backend import njit

# --------------------------------------------------------------------------
# Weibull alternating sum:  q(S) = sum_{K subset of S^c} (-1)^|K| lam(S)/lam(S|K)
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _compressed_orders(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated (popcount, value) orderings of ``range(2**m)`` for m = 0..n."""
    parts = [cardinality_order(m) if m else np.zeros(1, dtype=np.int64) for m in range(n + 1)]
    offsets = np.zeros(n + 2, dtype=np.int64)
    offsets[1:] = np.cumsum([len(p) for p in parts])
    return np.ascontiguousarray(np.concatenate(parts), dtype=np.int64), offsets


@njit
def _weibull_q_numba(lam, n, order_flat, order_off):
    size = 1 << n
    full = size - 1
    q = np.empty(size)
    q[0] = 1.0
    pos = np.empty(n, np.int64)
    for s in range(1, size):
        c = full ^ s
        m = 0
        for i in range(n):
            if (c >> i) & 1:
                pos[m] = i
                m += 1
        ls = lam[s]
        total = 0.0
        comp = 0.0
        for idx in range(order_off[m], order_off[m + 1]):
            kc = order_flat[idx]
            k = 0
            card = 0
            for j in range(m):
                if (kc >> j) & 1:
                    k |= 1 << pos[j]
                    card += 1
            term = ls / lam[s | k]
            if card & 1:
                term = -term
            t = total + term
            if abs(total) >= abs(term):
                comp += (total - t) + term
            else:
                comp += (term - t) + total
            total = t
        q[s] = total + comp
    return q


def _weibull_q_numpy(lam: np.ndarray, n: int) -> np.ndarray:
    size = 1 << n
    full = size - 1
    pc = popcounts(n)
    q = np.empty(size)
    q[0] = 1.0
    orders = {m: cardinality_order(m) if m else np.zeros(1, dtype=np.int64) for m in range(n + 1)}
    signs = {m: np.where(popcounts(m)[o] % 2 == 1, -1.0, 1.0) if m else np.ones(1) for m, o in orders.items()}
    for s in range(1, size):
        c = full ^ s
        m = n - int(pc[s])
        ks = expand_submasks(orders[m], c)
        q[s] = math.fsum(signs[m] * (lam[s] / lam[s | ks]))
    return q


# --------------------------------------------------------------------------
# Monte Carlo: rank of the system lifetime among the order statistics
# --------------------------------------------------------------------------


@njit
def _ranks_paths_numba(X, members, offsets, counts):
    N, n = X.shape
    npaths = offsets.shape[0] - 1
    for r in range(N):
        T = -np.inf
        for j in range(npaths):
            mn = np.inf
            for idx in range(offsets[j], offsets[j + 1]):
                v = X[r, members[idx]]
                if v < mn:
                    mn = v
            if mn > T:
                T = mn
        below = 0
        for i in range(n):
            if X[r, i] < T:
                below += 1
        counts[below] += 1
    return counts


def _ranks_paths_numpy(X, members, offsets, counts):
    n = X.shape[1]
    mins = [X[:, members[offsets[j] : offsets[j + 1]]].min(axis=1) for j in range(len(offsets) - 1)]
    T = np.max(np.stack(mins, axis=1), axis=1)
    below = np.count_nonzero(X < T[:, None], axis=1)
    counts += np.bincount(below, minlength=n)[:n]
    return counts


@njit
def _stable_order(row, order):
    # insertion sort of indices; stable so ties keep index order
    n = row.shape[0]
    for i in range(n):
        order[i] = i
    for i in range(1, n):
        cur = order[i]
        v = row[cur]
        j = i - 1
        while j >= 0 and row[order[j]] > v:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = cur


@njit
def _ranks_table_numba(X, table, counts):
    N, n = X.shape
    order = np.empty(n, np.int64)
    full = (1 << n) - 1
    for r in range(N):
        _stable_order(X[r], order)
        alive = full
        for j in range(n):
            alive ^= 1 << order[j]
            if table[alive] == 0:
                counts[j] += 1
                break
    return counts


def _ranks_table_numpy(X, table, counts):
    N, n = X.shape
    order = np.argsort(X, axis=1, kind="stable")
    alive = full_mask(n) - np.cumsum(np.left_shift(1, order, dtype=np.int64), axis=1)
    failed = table[alive] == 0
    counts += np.bincount(np.argmax(failed, axis=1), minlength=n)[:n]
    return counts


@njit
def _top_sets_numba(X, counts):
    N, n = X.shape
    order = np.empty(n, np.int64)
    for r in range(N):
        _stable_order(X[r], order)
        mask = 0
        counts[0] += 1
        for j in range(n - 1, -1, -1):
            mask |= 1 << order[j]
            counts[mask] += 1
    return counts


def _top_sets_numpy(X, counts):
    N, n = X.shape
    order = np.argsort(X, axis=1, kind="stable")
    bits = np.left_shift(1, order[:, ::-1], dtype=np.int64)
    masks = np.cumsum(bits, axis=1)
    counts += np.bincount(masks.ravel(), minlength=counts.shape[0])
    counts[0] += N
    return counts


# --------------------------------------------------------------------------
# Permutation enumeration: p_k = sum_sigma Pr(sigma) [phi(suffix_k) - phi(suffix_{k+1})]
# --------------------------------------------------------------------------


@njit
def _perm_weighted_numba(perms, weights, table):
    M, n = perms.shape
    p = np.zeros(n)
    for r in range(M):
        suf = 0
        nxt = table[0]
        w = weights[r]
        for k in range(n - 1, -1, -1):
            suf |= 1 << perms[r, k]
            cur = table[suf]
            p[k] += w * (cur - nxt)
            nxt = cur
    return p


def _suffix_differences(perms: np.ndarray, table: np.ndarray) -> np.ndarray:
    bits = np.left_shift(1, perms.astype(np.int64), dtype=np.int64)
    suf = np.cumsum(bits[:, ::-1], axis=1)[:, ::-1]
    phi = table[suf].astype(np.int64)
    nxt = np.empty_like(phi)
    nxt[:, :-1] = phi[:, 1:]
    nxt[:, -1] = table[0]
    return phi - nxt


def _perm_weighted_numpy(perms, weights, table):
    return weights @ _suffix_differences(perms, table)


@njit
def _perm_uniform_numba(n, table):
    counts = np.zeros(n, np.int64)
    a = np.arange(n)
    c = np.zeros(n, np.int64)
    done = False
    while not done:
        suf = 0
        nxt = table[0]
        for k in range(n - 1, -1, -1):
            suf |= 1 << a[k]
            cur = table[suf]
            counts[k] += cur - nxt
            nxt = cur
        # Heap's algorithm: advance to the next permutation
        i = 1
        while i < n and c[i] >= i:
            c[i] = 0
            i += 1
        if i >= n:
            done = True
        else:
            if i % 2 == 0:
                a[0], a[i] = a[i], a[0]
            else:
                a[c[i]], a[i] = a[i], a[c[i]]
            c[i] += 1
    return counts


def _perm_uniform_numpy(n, table, chunk=1 << 17):
    counts = np.zeros(n, dtype=np.int64)
    perms_iter = itertools.permutations(range(n))
    while True:
        block = list(itertools.islice(perms_iter, chunk))
        if not block:
            break
        perms = np.array(block, dtype=np.int8)
        counts += _suffix_differences(perms, table).sum(axis=0)
    return counts


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def weibull_alternating_sums(lam: np.ndarray, n: int) -> np.ndarray:
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    if _backend.use_numba():
        flat, off = _compressed_orders(n)
        return _weibull_q_numba(lam, n, flat, off)
    return _weibull_q_numpy(lam, n)


def paths_to_csr(paths) -> tuple[np.ndarray, np.ndarray]:
    members: list[int] = []
    offsets = [0]
    for mask in paths:
        members.extend(i for i in range(int(mask).bit_length()) if (int(mask) >> i) & 1)
        offsets.append(len(members))
    return np.asarray(members, dtype=np.int64), np.asarray(offsets, dtype=np.int64)


def rank_counts_paths(X: np.ndarray, members: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Counts of ``k - 1`` where the life function equals ``X_{k:n}``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    counts = np.zeros(X.shape[1], dtype=np.int64)
    if _backend.use_numba():
        return _ranks_paths_numba(X, members, offsets, counts)
    return _ranks_paths_numpy(X, members, offsets, counts)


def rank_counts_table(X: np.ndarray, table: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    table = np.ascontiguousarray(table, dtype=np.uint8)
    counts = np.zeros(X.shape[1], dtype=np.int64)
    if _backend.use_numba():
        return _ranks_table_numba(X, table, counts)
    return _ranks_table_numpy(X, table, counts)


def top_set_counts(X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    counts = np.zeros(1 << X.shape[1], dtype=np.int64)
    if _backend.use_numba():
        return _top_sets_numba(X, counts)
    return _top_sets_numpy(X, counts)


def permutation_weighted(perms: np.ndarray, weights: np.ndarray, table: np.ndarray) -> np.ndarray:
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    table = np.ascontiguousarray(table, dtype=np.int64)
    if _backend.use_numba():
        return _perm_weighted_numba(perms, weights, table)
    return _perm_weighted_numpy(perms, weights, table)


def permutation_uniform_counts(n: int, table: np.ndarray) -> np.ndarray:
    table = np.ascontiguousarray(table, dtype=np.int64)
    if _backend.use_numba():
        return _perm_uniform_numba(n, table)
    return _perm_uniform_numpy(n, table)
