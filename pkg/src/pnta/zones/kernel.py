"""Integer DBM kernel compiled with numba.

Bounds are packed into one integer ``2 * value + le`` (``le`` = 1 for ``<=``)
so that the bound order is plain integer order.  ``INF`` marks the absent
bound.  Matrices are ``int32`` arrays, canonical unless stated otherwise.
Constraint arrays have rows ``(i, j, bound)`` meaning ``x_i - x_j <= bound``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = 1 << 29
LE_ZERO = 1
LT_ZERO = 0
DTYPE = np.int32


def pack(value: int, le: bool) -> int:
    return 2 * int(value) + (1 if le else 0)


def unpack(b: int):
    """(value, le) with value None for INF."""
    if b >= INF:
        return None, 0
    return b >> 1, b & 1


@njit(cache=True)
def badd(a, b):
    if a >= INF or b >= INF:
        return INF
    return a + b - ((a | b) & 1)


@njit(cache=True)
def close(d):
    """Floyd-Warshall tightening in place; False when the zone is empty."""
    n = d.shape[0]
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            if dik >= INF:
                continue
            for j in range(n):
                dkj = d[k, j]
                if dkj >= INF:
                    continue
                s = dik + dkj - ((dik | dkj) & 1)
                if s < d[i, j]:
                    d[i, j] = s
    for i in range(n):
        if d[i, i] < LE_ZERO:
            return False
    return True


@njit(cache=True)
def tighten(d, i, j, b):
    """Add ``x_i - x_j <= b`` to a canonical zone, keeping it canonical."""
    if b >= d[i, j]:
        return True
    if badd(b, d[j, i]) < LE_ZERO:
        return False
    n = d.shape[0]
    d[i, j] = b
    for k in range(n):
        dki = d[k, i]
        if dki >= INF:
            continue
        t = badd(dki, b)
        for m in range(n):
            djm = d[j, m]
            if djm >= INF:
                continue
            s = badd(t, djm)
            if s < d[k, m]:
                d[k, m] = s
    return True


@njit(cache=True)
def apply(d, cons):
    for r in range(cons.shape[0]):
        if not tighten(d, cons[r, 0], cons[r, 1], cons[r, 2]):
            return False
    return True


@njit(cache=True)
def up(d):
    for i in range(1, d.shape[0]):
        d[i, 0] = INF


@njit(cache=True)
def reset(d, x):
    n = d.shape[0]
    for j in range(n):
        d[x, j] = d[0, j]
        d[j, x] = d[j, 0]
    d[x, x] = LE_ZERO


@njit(cache=True)
def free(d, x):
    n = d.shape[0]
    for j in range(n):
        if j != x:
            d[x, j] = INF
            d[j, x] = d[j, 0]
    d[0, x] = LE_ZERO


@njit(cache=True)
def extrapolate(d, bound):
    """Max-constant extrapolation (the Extra+ variant); ``bound[0]`` = 0.

    Bounds above M(x_i) are dropped, lower bounds below -M(x_j) become
    ``> M(x_j)``, and a clock already above its constant loses every
    difference constraint it takes part in.
    """
    n = d.shape[0]
    src = d.copy()
    changed = False
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            b = src[i, j]
            if b >= INF:
                continue
            above_i = i != 0 and src[0, i] <= -2 * bound[i]
            above_j = j != 0 and src[0, j] <= -2 * bound[j]
            if i != 0 and (b > 2 * bound[i] + 1 or above_i or above_j):
                d[i, j] = INF
                changed = True
            elif i == 0 and b < -2 * bound[j]:
                d[i, j] = -2 * bound[j]
                changed = True
    if changed:
        close(d)


@njit(cache=True)
def successor(src, guard, resets, tinv):
    """Guard, reset, target invariant; returns (ok, entry zone)."""
    d = src.copy()
    if not apply(d, guard):
        return False, d
    for r in range(resets.shape[0]):
        reset(d, resets[r])
    if not apply(d, tinv):
        return False, d
    return True, d


@njit(cache=True)
def time_closure(entry, piece, inv, frees, bound):
    """up, invariants and piece, then free inactive clocks and extrapolate."""
    d = entry.copy()
    up(d)
    if not apply(d, inv):
        return False, d
    if not apply(d, piece):
        return False, d
    for r in range(frees.shape[0]):
        free(d, frees[r])
    extrapolate(d, bound)
    return True, d


@njit(cache=True)
def enter(src, piece):
    d = src.copy()
    ok = apply(d, piece)
    return ok, d


def universe(dim: int) -> np.ndarray:
    d = np.full((dim, dim), INF, dtype=DTYPE)
    for i in range(dim):
        d[i, i] = LE_ZERO
        d[0, i] = LE_ZERO
    return d


def origin(dim: int) -> np.ndarray:
    return np.full((dim, dim), LE_ZERO, dtype=DTYPE)


def cons_array(rows) -> np.ndarray:
    if not rows:
        return np.zeros((0, 3), dtype=DTYPE)
    return np.array(rows, dtype=DTYPE).reshape(-1, 3)
