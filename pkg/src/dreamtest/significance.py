"""Significance tests for a covariate block W given X.

* :func:`run_dream` -- the dimension-reduction adaptive-to-model test.  The
  kernel U-statistic is computed on ``B_hat^T z`` where ``B_hat`` and its
  dimension are re-estimated from ``(Z, Y)``, so under the null it smooths
  over ``q1`` directions instead of all ``d`` covariates.  Critical values
  come from the standard normal limit.
* :func:`run_fan_li` -- the density-weighted kernel test on the full ``Z``.
* :func:`dm_wild_bootstrap` -- the indicator-process test with wild-bootstrap
  critical values.

The null model (:func:`fit_null`) is a leave-one-out NW regression of Y
with a fourth-order kernel.  DREAM and, by default, the bootstrap test
smooth on ``B1_hat^T X``; the Fan-Li test smooths on all of X by default,
as a full-dimensional competitor.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
import math

import numpy as np
from scipy.stats import norm

from . import _backend
from .exceptions import DegenerateVarianceError, InvalidArgumentError
from .kernels import FAMILIES, KernelSpec, bandwidth_rule, reference_bandwidth
from .sdr import RidgeConfig, estimate_basis
from .smoothers import DENSITY_FLOOR, LooFit, loo_smoother_matrix, nw_loo, residuals

METHODS = ("dream", "fan_li", "dm")


@dataclass(frozen=True)
class DreamConfig:
    c_h: float = 1.75
    # smoother bandwidth: "reference" is c_h1 times the normal-reference
    # bandwidth of the smoothing kernel on unit-scale projections; "rule" is
    # bandwidth_rule(n, q1, c_h1) on the raw projections
    smooth_bandwidth: str = "reference"
    c_h1: float = 0.66
    test_kernel: str = "quartic"
    smooth_kernel: str = "gauss4"
    ridge: RidgeConfig = field(default_factory=RidgeConfig)
    sir_target: str = "sir"
    density_floor: float = DENSITY_FLOOR
    # points whose smoother density is below relative_floor * median are
    # refitted with the second-order fallback kernel
    relative_floor: float = 0.08
    fallback_kernel: str | None = "gauss"
    # null-model smoother for the competitors: "projected" smooths on
    # B1_hat^T X, "full" on all of X (DREAM always uses the projection)
    fan_li_smoother: str = "full"
    dm_smoother: str = "projected"
    bootstrap_reps: int = 1000

    def __post_init__(self):
        if self.smooth_bandwidth not in ("reference", "rule"):
            raise InvalidArgumentError(f"unknown smoother bandwidth rule {self.smooth_bandwidth!r}")
        if not 0 <= self.relative_floor < 1:
            raise InvalidArgumentError(f"relative_floor must lie in [0, 1), got {self.relative_floor}")
        for name in ("test_kernel", "smooth_kernel", "fallback_kernel"):
            family = getattr(self, name)
            if family is None and name == "fallback_kernel":
                continue
            if family not in FAMILIES:
                raise InvalidArgumentError(f"{name} must be one of {FAMILIES}, got {family!r}")
        if not (self.c_h > 0 and self.c_h1 > 0):
            raise InvalidArgumentError("bandwidth constants must be positive")
        for name in ("fan_li_smoother", "dm_smoother"):
            if getattr(self, name) not in ("projected", "full"):
                raise InvalidArgumentError(f"{name} must be 'projected' or 'full', got {getattr(self, name)!r}")
        if self.bootstrap_reps < 1:
            raise InvalidArgumentError("bootstrap_reps must be >= 1")

    def to_dict(self):
        return asdict(self)


@dataclass
class TestReport:
    __test__ = False  # keep pytest from collecting this class

    method: str
    raw_statistic: float
    p_value: float
    n: int
    q1: int
    bandwidths: tuple[float, float]
    variance_estimate: float | None = None
    standardized: float | None = None
    q_hat: int | None = None
    bootstrap_reps: int | None = None
    seed: int | None = None

    @property
    def statistic(self) -> float:
        return self.standardized if self.standardized is not None else self.raw_statistic

    def reject(self, alpha: float) -> bool:
        return self.p_value <= alpha

    def to_dict(self):
        out = asdict(self)
        out["bandwidths"] = list(self.bandwidths)
        out["statistic"] = self.statistic
        return out


class WildBootstrapLaw:
    """Golden-ratio two-point law with mean 0 and variance 1."""

    root5 = math.sqrt(5.0)
    v_minus = (1.0 - root5) / 2.0
    v_plus = (1.0 + root5) / 2.0
    p_minus = (1.0 + root5) / (2.0 * root5)
    p_plus = 1.0 - p_minus

    @classmethod
    def mean(cls):
        return cls.p_minus * cls.v_minus + cls.p_plus * cls.v_plus

    @classmethod
    def second_moment(cls):
        return cls.p_minus * cls.v_minus**2 + cls.p_plus * cls.v_plus**2

    @classmethod
    def sample(cls, rng: np.random.Generator, size):
        return np.where(rng.random(size) < cls.p_minus, cls.v_minus, cls.v_plus)


def _check_pairwise(Z, u):
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    u = np.ascontiguousarray(u, dtype=float)
    n = Z.shape[0]
    if n < 2:
        raise InvalidArgumentError("pairwise statistics need n >= 2")
    if u.shape != (n,):
        raise InvalidArgumentError(f"residual vector has shape {u.shape}, expected ({n},)")
    return Z, u


def _kernel_sums(T, u, h, family):
    T = np.ascontiguousarray(T, dtype=float)
    return _backend.ustat_sums(T, u, h, family)


def dream_sums(Z, u_hat, B, h, family="quartic"):
    """``(V_n, s_hat^2)`` from one pass over the pairs of ``B^T z``."""
    Z, u = _check_pairwise(Z, u_hat)
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if not h > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {h}")
    n, q = Z.shape[0], B.shape[1]
    s1, s2 = _kernel_sums(Z @ B, u, h, family)
    scale = n * (n - 1) * h**q
    return s1 / scale, 2.0 * s2 / scale


def dream_vn(Z, u_hat, B, h, family="quartic"):
    return dream_sums(Z, u_hat, B, h, family)[0]


def dream_variance(Z, u_hat, B, h, family="quartic"):
    """``2 [n(n-1)]^-1 sum_{i!=j} h^-q K^2(B^T(z_i - z_j)/h) u_i^2 u_j^2``."""
    s2 = dream_sums(Z, u_hat, B, h, family)[1]
    if not s2 > 0:
        raise DegenerateVarianceError("variance estimate is zero")
    return s2


def _fan_li_parts(Z, u_hat, f1_hat, h, family):
    Z, u = _check_pairwise(Z, u_hat)
    f = np.asarray(f1_hat, dtype=float)
    if f.shape != u.shape:
        raise InvalidArgumentError("density weights and residuals differ in length")
    if not h > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {h}")
    n, d = Z.shape
    s1, s2 = _kernel_sums(Z, u * f, h, family)
    scale = n * (n - 1) * h**d
    raw = s1 / scale
    var = 2.0 * s2 / scale
    if not var > 0:
        raise DegenerateVarianceError("Fan-Li variance estimate is zero")
    standardized = n * h ** (d / 2.0) * raw / math.sqrt(var)
    return raw, var, standardized


def fan_li_statistic(Z, u_hat, f1_hat, h, family="quartic"):
    """Return ``(raw, standardized, p_value)`` for the full-dimensional kernel test.

    The variance estimate mirrors the DREAM one with ``u_hat * f1_hat`` in
    place of the residuals and the ``d``-dimensional kernel.
    """
    raw, _, standardized = _fan_li_parts(Z, u_hat, f1_hat, h, family)
    return raw, standardized, float(norm.sf(standardized))


def _stack(X, W):
    X = np.asarray(X, dtype=float)
    W = np.asarray(W, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if W.ndim == 1:
        W = W[:, None]
    if X.shape[0] != W.shape[0]:
        raise InvalidArgumentError("X and W have different numbers of rows")
    return X, W, np.hstack([X, W])


def dm_statistic(X, W, u_hat, f1_hat):
    """``[n(n-1)]^-1 sum_i [sum_{j!=i} u_j f_j I(x_j < x_i) I(w_j < w_i)]^2``."""
    _, _, Z = _stack(X, W)
    A = _backend.dominance_matrix(np.ascontiguousarray(Z))
    v = np.asarray(u_hat, dtype=float) * np.asarray(f1_hat, dtype=float)
    s = A @ v
    n = Z.shape[0]
    return float(s @ s) / (n * (n - 1))


@dataclass
class NullFit:
    basis: np.ndarray | None
    fit: LooFit
    residuals: np.ndarray
    bandwidth: float


def smoother_design(T, n: int, config: DreamConfig):
    """Design and bandwidth for the null-model smoother.

    Under the reference rule each column of ``T`` is divided by its standard
    deviation so the bandwidth is on a unit scale.
    """
    T = np.asarray(T, dtype=float)
    dim = T.shape[1]
    if config.smooth_bandwidth == "rule":
        return T, bandwidth_rule(n, dim, config.c_h1)
    sd = T.std(axis=0)
    if np.any(sd <= 0):
        raise InvalidArgumentError("a projected covariate is constant; cannot smooth on it")
    return T / sd, reference_bandwidth(n, dim, config.smooth_kernel, config.c_h1)


def fit_null(X, Y, q1: int, config: DreamConfig = DreamConfig(), projected: bool = True) -> NullFit:
    """Leave-one-out NW fit of Y on ``B1_hat^T X`` (or on X itself when not projected)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p1 = X.shape
    if not 1 <= q1 <= p1:
        raise InvalidArgumentError(f"q1 must lie in [1, {p1}], got {q1}")
    if projected:
        B1 = estimate_basis(X, Y, q1, target=config.sir_target).basis
        T = X @ B1
    else:
        B1, T = None, X
    T, h1 = smoother_design(T, n, config)
    spec = KernelSpec(config.smooth_kernel, T.shape[1], h1)
    fit = nw_loo(T, Y, spec, config.density_floor, config.relative_floor, config.fallback_kernel)
    return NullFit(B1, fit, residuals(Y, fit), h1)


def estimate_q1(X, Y, config: DreamConfig = DreamConfig()) -> int:
    """Structural dimension of ``E(Y | X)`` by the eigenvalue-ratio rule.

    The ridge is evaluated at ``q1 = 1`` since the true value is what is
    being estimated.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1 or X.shape[1] == 1:
        return 1
    return estimate_basis(X, Y, None, q1=1, ridge=config.ridge, target=config.sir_target).selected_dimension


def _check_sample(X, W, Y):
    X, W, Z = _stack(X, W)
    Y = np.asarray(Y, dtype=float)
    n, d = Z.shape
    if Y.shape != (n,):
        raise InvalidArgumentError(f"response has shape {Y.shape}, expected ({n},)")
    if n <= d:
        raise InvalidArgumentError(f"need n > {d} observations, got {n}")
    return X, W, Z, Y


def run_dream(X, W, Y, q1: int, config: DreamConfig = DreamConfig()) -> TestReport:
    X, W, Z, Y = _check_sample(X, W, Y)
    n = Z.shape[0]
    null = fit_null(X, Y, q1, config, projected=True)
    sdr = estimate_basis(Z, Y, None, q1=q1, ridge=config.ridge, target=config.sir_target)
    q_hat = sdr.selected_dimension
    h = bandwidth_rule(n, q_hat, config.c_h)
    vn, s2 = dream_sums(Z, null.residuals, sdr.basis, h, config.test_kernel)
    if not s2 > 0:
        raise DegenerateVarianceError("DREAM variance estimate is zero")
    tn = n * h ** (q1 / 2.0) * vn / math.sqrt(s2)
    return TestReport(
        method="dream",
        raw_statistic=vn,
        p_value=float(norm.sf(tn)),
        n=n,
        q1=q1,
        bandwidths=(h, null.bandwidth),
        variance_estimate=s2,
        standardized=tn,
        q_hat=q_hat,
    )


def run_fan_li(X, W, Y, q1: int, config: DreamConfig = DreamConfig()) -> TestReport:
    X, W, Z, Y = _check_sample(X, W, Y)
    n, d = Z.shape
    null = fit_null(X, Y, q1, config, projected=config.fan_li_smoother == "projected")
    h = bandwidth_rule(n, d, config.c_h)
    raw, var, tn = _fan_li_parts(Z, null.residuals, null.fit.density, h, config.test_kernel)
    return TestReport(
        method="fan_li",
        raw_statistic=raw,
        p_value=float(norm.sf(tn)),
        n=n,
        q1=q1,
        bandwidths=(h, null.bandwidth),
        variance_estimate=var,
        standardized=tn,
    )


def dm_wild_bootstrap(
    X,
    W,
    Y,
    q1: int,
    config: DreamConfig = DreamConfig(),
    reps: int | None = None,
    seed: int = 0,
) -> TestReport:
    """Wild-bootstrap p-value ``(1 + #{V* >= V}) / (reps + 1)``.

    Bootstrap responses are ``g_hat(x_i) + u_hat_i * V_i``; their residuals
    are recomputed with the same linear smoother (basis and bandwidth held
    fixed), so a single smoother matrix serves every replication.
    """
    X, W, Z, Y = _check_sample(X, W, Y)
    reps = config.bootstrap_reps if reps is None else reps
    if reps < 1:
        raise InvalidArgumentError("reps must be >= 1")
    n = Z.shape[0]
    null = fit_null(X, Y, q1, config, projected=config.dm_smoother == "projected")
    fit = null.fit
    spec = KernelSpec(config.smooth_kernel, fit.projected.shape[1], fit.bandwidth)
    S = loo_smoother_matrix(fit.projected, spec, config.density_floor, config.relative_floor, config.fallback_kernel)
    g_hat = fit.fitted
    u_hat = null.residuals
    f = fit.density
    A = _backend.dominance_matrix(np.ascontiguousarray(Z))
    denom = n * (n - 1)
    s = A @ (u_hat * f)
    observed = float(s @ s) / denom

    rng = np.random.default_rng(seed)
    V = WildBootstrapLaw.sample(rng, (n, reps))
    Ystar = g_hat[:, None] + u_hat[:, None] * V
    Ustar = Ystar - S @ Ystar
    Sstar = A @ (Ustar * f[:, None])
    boot = np.einsum("ij,ij->j", Sstar, Sstar) / denom
    p = (1.0 + np.count_nonzero(boot >= observed)) / (reps + 1.0)
    return TestReport(
        method="dm",
        raw_statistic=observed,
        p_value=float(p),
        n=n,
        q1=q1,
        bandwidths=(float("nan"), null.bandwidth),
        bootstrap_reps=reps,
        seed=seed,
    )


def run_method(method: str, X, W, Y, q1: int, config: DreamConfig = DreamConfig(), seed: int = 0) -> TestReport:
    if method == "dream":
        report = run_dream(X, W, Y, q1, config)
    elif method == "fan_li":
        report = run_fan_li(X, W, Y, q1, config)
    elif method == "dm":
        return dm_wild_bootstrap(X, W, Y, q1, config, seed=seed)
    else:
        raise InvalidArgumentError(f"unknown method {method!r}; expected one of {METHODS}")
    report.seed = seed
    return report
