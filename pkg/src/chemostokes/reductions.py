"""Deterministic reductions.

All global sums and dot products in the package go through a pairwise
binary tree whose shape depends only on the element count.  The result
is therefore a pure function of the input array and is bit-identical no
matter how many worker threads are configured: the tree is evaluated
sequentially and never reassociated.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _tree_sum_1d(a):
    # Pairwise reduction: level k sums elements (2i, 2i+1); an odd tail
    # element is promoted unchanged to the next level.
    buf = a.copy()
    n = buf.shape[0]
    while n > 1:
        half = n // 2
        for i in range(half):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
        if n % 2 == 1:
            buf[half] = buf[n - 1]
            n = half + 1
        else:
            n = half
    return buf[0]


@njit(cache=True)
def _tree_dot_1d(a, b):
    buf = a * b
    n = buf.shape[0]
    while n > 1:
        half = n // 2
        for i in range(half):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
        if n % 2 == 1:
            buf[half] = buf[n - 1]
            n = half + 1
        else:
            n = half
    return buf[0]


def tree_sum(a: np.ndarray) -> float:
    """Pairwise-tree sum of all elements, C-order traversal."""
    flat = np.ascontiguousarray(a, dtype=np.float64).ravel()
    if flat.size == 0:
        return 0.0
    return float(_tree_sum_1d(flat))


def tree_dot(a: np.ndarray, b: np.ndarray) -> float:
    """Pairwise-tree dot product; products formed elementwise first."""
    fa = np.ascontiguousarray(a, dtype=np.float64).ravel()
    fb = np.ascontiguousarray(b, dtype=np.float64).ravel()
    if fa.shape != fb.shape:
        raise ValueError("tree_dot operands must have the same size")
    if fa.size == 0:
        return 0.0
    return float(_tree_dot_1d(fa, fb))


def tree_mean(a: np.ndarray) -> float:
    return tree_sum(a) / a.size
