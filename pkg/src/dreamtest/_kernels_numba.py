"""numba implementations of the pairwise kernel sums (see ``_backend``)."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@njit(cache=True)
def _k(u, family):
    if family == 0:
        if u < -1.0 or u > 1.0:
            return 0.0
        v = 1.0 - u * u
        return 0.9375 * v * v
    u2 = u * u
    if family == 2:
        return _INV_SQRT_2PI * math.exp(-0.5 * u2)
    return 0.5 * (u2 * u2 - 7.0 * u2 + 6.0) * _INV_SQRT_2PI * math.exp(-0.5 * u2)


@njit(cache=True)
def _w(T, i, j, inv_h, family):
    w = 1.0
    for k in range(T.shape[1]):
        w *= _k((T[j, k] - T[i, k]) * inv_h, family)
        if w == 0.0:
            return 0.0
    return w


@njit(cache=True)
def loo_sums(T, y, h, family):
    n = T.shape[0]
    inv_h = 1.0 / h
    num = np.zeros(n)
    den = np.zeros(n)
    for i in range(n):
        for j in range(i + 1, n):
            w = _w(T, i, j, inv_h, family)
            if w != 0.0:
                num[i] += w * y[j]
                num[j] += w * y[i]
                den[i] += w
                den[j] += w
    return num, den


@njit(cache=True)
def loo_weight_matrix(T, h, family):
    n = T.shape[0]
    inv_h = 1.0 / h
    W = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            w = _w(T, i, j, inv_h, family)
            W[i, j] = w
            W[j, i] = w
    return W


@njit(cache=True)
def ustat_sums(T, u, h, family):
    n = T.shape[0]
    inv_h = 1.0 / h
    s1 = 0.0
    s2 = 0.0
    for i in range(n):
        ui = u[i]
        for j in range(i + 1, n):
            w = _w(T, i, j, inv_h, family)
            if w != 0.0:
                p = ui * u[j]
                s1 += w * p
                s2 += w * w * p * p
    return 2.0 * s1, 2.0 * s2


@njit(cache=True)
def dominance_matrix(Z):
    n, d = Z.shape
    A = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            below = True
            for k in range(d):
                if not Z[j, k] < Z[i, k]:
                    below = False
                    break
            if below:
                A[i, j] = 1.0
    return A
