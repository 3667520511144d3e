"""Plain-loop reference implementations.

Each one is written from the defining sum with Python loops and scalar
kernel evaluations.  Nothing is imported from the package; the kernels are
re-typed here.
"""

import math

import numpy as np


def k_quartic(u):
    return 15.0 / 16.0 * (1.0 - u * u) ** 2 if abs(u) <= 1.0 else 0.0


def k_gauss4(u):
    return (u**4 - 7.0 * u**2 + 6.0) * math.exp(-u * u / 2.0) / math.sqrt(2.0 * math.pi) / 2.0


def k_gauss(u):
    return math.exp(-u * u / 2.0) / math.sqrt(2.0 * math.pi)


KERNELS = {"quartic": k_quartic, "gauss4": k_gauss4, "gauss": k_gauss}


def product(k, a, b, h):
    """h^-q prod_k k((b_k - a_k) / h)."""
    w = 1.0
    for ak, bk in zip(a, b):
        w *= k((bk - ak) / h)
    return w / h ** len(a)


def dream_vn(Z, u, B, h, family="quartic"):
    k = KERNELS[family]
    T = [list(row) for row in np.asarray(Z) @ np.asarray(B)]
    n = len(T)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += u[i] * u[j] * product(k, T[i], T[j], h)
    return total / (n * (n - 1))


def dream_variance(Z, u, B, h, family="quartic"):
    k = KERNELS[family]
    T = [list(row) for row in np.asarray(Z) @ np.asarray(B)]
    n, q = len(T), len(T[0])
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                w = product(k, T[i], T[j], h) * h**q  # unscaled kernel
                total += w * w / h**q * u[i] ** 2 * u[j] ** 2
    return 2.0 * total / (n * (n - 1))


def fan_li(Z, u, f, h, family="quartic"):
    """(raw, standardized) with the density-weighted residuals."""
    Z = np.asarray(Z)
    n, d = Z.shape
    v = [u[i] * f[i] for i in range(n)]
    raw = dream_vn(Z, v, np.eye(d), h, family)
    var = dream_variance(Z, v, np.eye(d), h, family)
    return raw, n * h ** (d / 2.0) * raw / math.sqrt(var)


def dm(X, W, u, f):
    X, W = np.asarray(X), np.asarray(W)
    n = X.shape[0]
    total = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            if j == i:
                continue
            if all(X[j, k] < X[i, k] for k in range(X.shape[1])) and all(
                W[j, k] < W[i, k] for k in range(W.shape[1])
            ):
                s += u[j] * f[j]
        total += s * s
    return total / (n * (n - 1))


def nw_loo(T, Y, h, family):
    """(fitted, density) without any fallback."""
    k = KERNELS[family]
    T = np.asarray(T)
    n = T.shape[0]
    fitted, density = [], []
    for i in range(n):
        num = den = 0.0
        for j in range(n):
            if j != i:
                w = product(k, T[i], T[j], h)
                num += w * Y[j]
                den += w
        fitted.append(num / den if den != 0 else float("nan"))
        density.append(den / (n - 1))
    return np.array(fitted), np.array(density)


def mtilde(Zs, Y):
    Zs = np.asarray(Zs)
    n, d = Zs.shape
    zbar = [sum(Zs[j, k] for j in range(n)) / n for k in range(d)]
    out = np.zeros((n, d))
    for i in range(n):
        for j in range(n):
            if Y[j] <= Y[i]:
                for k in range(d):
                    out[i, k] += (Zs[j, k] - zbar[k]) / n
    return out


def rere(eigs, n, c_n):
    star = []
    for lam in eigs:
        lam = max(lam, 0.0)
        s = lam - 1.0 / math.sqrt(n)
        star.append(s / (s + 1.0))
    best, arg = None, None
    for j in range(len(eigs) - 1):
        r = (star[j + 1] ** 2 + c_n) / (star[j] ** 2 + c_n)
        if best is None or r < best:
            best, arg = r, j + 1
    return arg
