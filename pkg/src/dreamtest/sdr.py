"""Discretization-expectation estimation of central-mean-subspace bases.

Each observed response value ``t`` turns ``Y`` into the binary response
``I(Y <= t)``; a two-slice SIR matrix is formed for every ``t`` and the
matrices are averaged.  Everything is computed on the standardized scale
``Zs = (Z - mean) Sigma^{-1/2}`` where the eigenproblem is symmetric, and the
leading eigenvectors are mapped back with ``Sigma^{-1/2}``.

The structural dimension is chosen by the ridge-type eigenvalue ratio
criterion: eigenvalues are shifted by ``n**-0.5`` and mapped through
``x / (x + 1)``, and ``q`` minimises the ridged ratio of consecutive squared
transformed eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import InvalidArgumentError, SingularCovarianceError
from .kernels import bandwidth_rule

MAX_CONDITION = 1e12
TARGETS = ("sir", "mtilde")


def standardize(Z):
    """Whiten ``Z`` with the (1/n) sample covariance.

    Returns ``(Zs, root_inverse, mean)`` with ``Zs = (Z - mean) @ root_inverse``.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    n, d = Z.shape
    if n <= d:
        raise SingularCovarianceError(f"need more rows than columns to whiten, got {n}x{d}")
    mean = Z.mean(axis=0)
    Zc = Z - mean
    cov = Zc.T @ Zc / n
    w, V = np.linalg.eigh(cov)
    if w[0] <= 0 or w[-1] / w[0] > MAX_CONDITION:
        raise SingularCovarianceError(
            f"sample covariance is singular or ill-conditioned (eigenvalues {w[0]:.3g} .. {w[-1]:.3g})"
        )
    root_inverse = (V / np.sqrt(w)) @ V.T
    return Zc @ root_inverse, root_inverse, mean


def naive_mtilde_all(Zs, Y):
    """Reference O(n^2 d) evaluation of ``m_n(y_i) = n^-1 sum_j (z_j - zbar) I(y_j <= y_i)``."""
    Zs = np.asarray(Zs, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Zc = Zs - Zs.mean(axis=0)
    below = (Y[None, :] <= Y[:, None]).astype(float)
    return below @ Zc / Y.shape[0]


def fast_mtilde_all(Zs, Y):
    """Same rows as :func:`naive_mtilde_all` via a sort and prefix sums."""
    Zs = np.asarray(Zs, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0]
    Zc = Zs - Zs.mean(axis=0)
    order = np.argsort(Y, kind="stable")
    ys = Y[order]
    prefix = np.cumsum(Zc[order], axis=0)
    # last sorted position whose value is <= y_i, so ties are all included
    last = np.searchsorted(ys, Y, side="right") - 1
    return prefix[last] / n


def _below_fraction(Y):
    ys = np.sort(Y)
    return np.searchsorted(ys, Y, side="right") / Y.shape[0]


def dee_sir_candidate(Zs, Y, target: str = "sir"):
    """Average over ``t in {y_i}`` of the per-threshold SIR matrices.

    ``target="sir"`` uses ``Var(E(Z | I(Y <= t)))``, i.e. ``m m^T / (p_t (1 - p_t))``;
    ``target="mtilde"`` uses the unnormalised ``m m^T``.  Thresholds with
    ``p_t = 1`` contribute nothing (``m`` is exactly zero there).
    """
    if target not in TARGETS:
        raise InvalidArgumentError(f"unknown SIR target {target!r}")
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0]
    if n < 2:
        raise InvalidArgumentError("need at least two observations")
    m = fast_mtilde_all(Zs, Y)
    if target == "sir":
        p = _below_fraction(Y)
        inner = (p > 0) & (p < 1)
        scale = np.zeros(n)
        scale[inner] = 1.0 / np.sqrt(p[inner] * (1.0 - p[inner]))
        m = m * scale[:, None]
    M = m.T @ m / n
    return 0.5 * (M + M.T)


def rere_transform(eigenvalues, n: int):
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    shifted = lam - 1.0 / math.sqrt(n)
    return shifted / (shifted + 1.0)


def rere_ratios(eigenvalues, n: int, c_n: float, ridge_in_denominator: bool = True):
    star2 = rere_transform(eigenvalues, n) ** 2
    denom = star2[:-1] + (c_n if ridge_in_denominator else 0.0)
    return (star2[1:] + c_n) / denom


def rere_dimension(eigenvalues, n: int, c_n: float, ridge_in_denominator: bool = True) -> int:
    """Ridge-type eigenvalue ratio estimate of the structural dimension.

    ``eigenvalues`` must be sorted in descending order.  The argmin runs over
    ``j = 1 .. d-1``; ``np.argmin`` keeps the first minimiser, so ties go to
    the smallest ``j``.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1 or lam.shape[0] < 2:
        raise InvalidArgumentError("RERE needs at least two eigenvalues")
    if not c_n > 0:
        raise InvalidArgumentError(f"ridge constant must be positive, got {c_n}")
    ratios = rere_ratios(lam, n, c_n, ridge_in_denominator)
    return int(np.argmin(ratios)) + 1


@dataclass(frozen=True)
class RidgeConfig:
    """Ridge constant for RERE.

    ``rule="scaled"`` gives ``coef * log(n) / (n * h**(q1/2))`` with
    ``h = bandwidth_rule(n, q1, bandwidth_constant)``; ``rule="fixed"`` uses
    ``c_n`` as given.
    """

    rule: str = "scaled"
    c_n: float | None = None
    coef: float = 0.1
    bandwidth_constant: float = 1.75
    ridge_in_denominator: bool = True

    def __post_init__(self):
        if self.rule not in ("scaled", "fixed"):
            raise InvalidArgumentError(f"unknown ridge rule {self.rule!r}")
        if self.rule == "fixed" and not (self.c_n is not None and self.c_n > 0):
            raise InvalidArgumentError("a fixed ridge needs c_n > 0")

    def value(self, n: int, q1: int | None) -> float:
        if self.rule == "fixed":
            return float(self.c_n)
        if q1 is None:
            raise InvalidArgumentError("the scaled ridge rule needs q1")
        h = bandwidth_rule(n, q1, self.bandwidth_constant)
        return self.coef * math.log(n) / (n * h ** (q1 / 2.0))


@dataclass
class SdrFit:
    candidate_matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    selected_dimension: int
    basis: np.ndarray
    c_n: float | None = None


def _orthonormal_columns(A):
    Q, R = np.linalg.qr(A)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def _fix_signs(B):
    idx = np.argmax(np.abs(B), axis=0)
    signs = np.sign(B[idx, np.arange(B.shape[1])])
    signs[signs == 0] = 1.0
    return B * signs


def estimate_basis(
    Z,
    Y,
    q: int | None = None,
    *,
    q1: int | None = None,
    ridge: RidgeConfig | None = None,
    target: str = "sir",
) -> SdrFit:
    """Fit a ``d x q`` orthonormal basis; ``q=None`` selects it by RERE.

    ``q1`` is only used by the scaled ridge rule.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    Y = np.asarray(Y, dtype=float)
    n, d = Z.shape
    if Y.shape != (n,):
        raise InvalidArgumentError(f"response has shape {Y.shape}, expected ({n},)")
    if q is not None and not 1 <= q <= d:
        raise InvalidArgumentError(f"q must lie in [1, {d}], got {q}")
    Zs, root_inverse, _ = standardize(Z)
    M = dee_sir_candidate(Zs, Y, target)
    w, V = np.linalg.eigh(M)
    w, V = w[::-1], V[:, ::-1]
    c_n = None
    if q is None:
        if d == 1:
            q = 1
        else:
            ridge = ridge or RidgeConfig()
            c_n = ridge.value(n, q1)
            q = rere_dimension(w, n, c_n, ridge.ridge_in_denominator)
    B = _fix_signs(_orthonormal_columns(root_inverse @ V[:, :q]))
    return SdrFit(M, w, V, int(q), B, c_n)
