"""Leave-one-out Nadaraya-Watson regression and density estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .exceptions import InvalidArgumentError
from .kernels import FAMILIES, KernelSpec

DENSITY_FLOOR = 1e-10


@dataclass
class LooFit:
    fitted: np.ndarray
    density: np.ndarray
    bandwidth: float
    projected: np.ndarray
    fallback: np.ndarray  # rows where the density fell below the floor


def _as_design(T, spec: KernelSpec):
    T = np.asarray(T, dtype=float)
    if T.ndim == 1:
        T = T[:, None]
    if T.shape[1] != spec.dimension:
        raise InvalidArgumentError(
            f"projected design has {T.shape[1]} columns but the kernel is {spec.dimension}-dimensional"
        )
    if T.shape[0] < 2:
        raise InvalidArgumentError("leave-one-out smoothing needs at least two rows")
    return np.ascontiguousarray(T)


def _loo_means(Y):
    n = Y.shape[0]
    return (Y.sum() - Y) / (n - 1)


def _check_fallback(family):
    if family is not None and family not in FAMILIES:
        raise InvalidArgumentError(f"unsupported fallback kernel {family!r}")


def _low_density(density, density_floor, relative_floor):
    threshold = density_floor
    if relative_floor > 0:
        threshold = max(threshold, relative_floor * float(np.median(density)))
    return ~(density > threshold)


def nw_loo(
    T,
    Y,
    spec: KernelSpec,
    density_floor: float = DENSITY_FLOOR,
    relative_floor: float = 0.0,
    fallback_family: str | None = None,
) -> LooFit:
    """Leave-one-out NW fit at every design point.

    A point is flagged when its leave-one-out density
    ``(n-1)^-1 sum_{j!=i} K_h(t_j - t_i)`` is not above
    ``max(density_floor, relative_floor * median density)``; negative values a
    higher-order kernel can produce are always flagged.  Flagged points are
    refitted with ``fallback_family`` at the same bandwidth when it is given
    and its own denominator is positive, and otherwise take the
    leave-one-out mean of Y.
    """
    T = _as_design(T, spec)
    _check_fallback(fallback_family)
    Y = np.ascontiguousarray(Y, dtype=float)
    n = T.shape[0]
    if Y.shape != (n,):
        raise InvalidArgumentError(f"response has shape {Y.shape}, expected ({n},)")
    h = spec.bandwidth
    num, den = _backend.loo_sums(T, Y, h, spec.family)
    density = den / ((n - 1) * h**spec.dimension)
    fallback = _low_density(density, density_floor, relative_floor)
    fitted = np.empty(n)
    ok = ~fallback
    fitted[ok] = num[ok] / den[ok]
    if fallback.any():
        fitted[fallback] = _loo_means(Y)[fallback]
        if fallback_family is not None:
            num2, den2 = _backend.loo_sums(T, Y, h, fallback_family)
            use = fallback & (den2 > 0)
            fitted[use] = num2[use] / den2[use]
    return LooFit(fitted, density, h, T, fallback)


def residuals(Y, fit: LooFit):
    Y = np.asarray(Y, dtype=float)
    if Y.shape != fit.fitted.shape:
        raise InvalidArgumentError("response and fit lengths differ")
    return Y - fit.fitted


def density_loo(T, spec: KernelSpec):
    T = _as_design(T, spec)
    n = T.shape[0]
    _, den = _backend.loo_sums(T, np.zeros(n), spec.bandwidth, spec.family)
    return den / ((n - 1) * spec.bandwidth**spec.dimension)


def loo_smoother_matrix(
    T,
    spec: KernelSpec,
    density_floor: float = DENSITY_FLOOR,
    relative_floor: float = 0.0,
    fallback_family: str | None = None,
):
    """Linear operator ``S`` with ``S @ y == nw_loo(T, y, spec, ...).fitted`` for every ``y``."""
    T = _as_design(T, spec)
    _check_fallback(fallback_family)
    n = T.shape[0]
    h = spec.bandwidth
    W = _backend.loo_weight_matrix(T, h, spec.family)
    den = W.sum(axis=1)
    density = den / ((n - 1) * h**spec.dimension)
    fallback = _low_density(density, density_floor, relative_floor)
    S = np.empty_like(W)
    ok = ~fallback
    S[ok] = W[ok] / den[ok, None]
    idx = np.flatnonzero(fallback)
    S[idx] = 1.0 / (n - 1)
    S[idx, idx] = 0.0
    if idx.size and fallback_family is not None:
        W2 = _backend.loo_weight_matrix(T, h, fallback_family)[idx]
        den2 = W2.sum(axis=1)
        use = den2 > 0
        S[idx[use]] = W2[use] / den2[use, None]
    return S
