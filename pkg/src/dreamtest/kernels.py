"""Univariate kernels, product kernels and the bandwidth rule.

Three families are supported:

* ``quartic`` -- ``15/16 (1 - u^2)^2`` on ``[-1, 1]``, used for the test
  statistics;
* ``gauss4`` -- the fourth-order Gaussian-based kernel
  ``(u^4 - 7u^2 + 6) phi(u) / 2``, used for the null-model smoother;
* ``gauss`` -- the standard normal density, a second-order kernel used
  where the fourth-order density estimate is unreliable.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import InvalidArgumentError

FAMILIES = ("quartic", "gauss4", "gauss")

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# closed forms of the integral of k(u)^2 over the real line
_SQUARE_INTEGRALS = {
    "quartic": 5.0 / 7.0,
    "gauss4": 321.0 / (128.0 * math.sqrt(math.pi)),
    "gauss": 1.0 / (2.0 * math.sqrt(math.pi)),
}
# (order r, r-th moment) with all lower moments vanishing
_ORDER = {
    "quartic": (2, 1.0 / 7.0),
    "gauss4": (4, 9.0),
    "gauss": (2, 1.0),
}


def quartic(u):
    u = np.asarray(u, dtype=float)
    v = 1.0 - u * u
    return np.where(np.abs(u) <= 1.0, 0.9375 * v * v, 0.0)


def gauss4(u):
    u = np.asarray(u, dtype=float)
    u2 = u * u
    return 0.5 * (u2 * u2 - 7.0 * u2 + 6.0) * _INV_SQRT_2PI * np.exp(-0.5 * u2)


def gauss(u):
    u = np.asarray(u, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * u * u)


def univariate(family: str):
    if family == "quartic":
        return quartic
    if family == "gauss4":
        return gauss4
    if family == "gauss":
        return gauss
    raise InvalidArgumentError(f"unsupported kernel family {family!r}")


@dataclass(frozen=True)
class KernelSpec:
    family: str
    dimension: int
    bandwidth: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f"unsupported kernel family {self.family!r}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise InvalidArgumentError(f"dimension must be a positive integer, got {self.dimension}")
        if not self.bandwidth > 0:
            raise InvalidArgumentError(f"bandwidth must be positive, got {self.bandwidth}")


def product_kernel(spec: KernelSpec, v) -> float:
    """Evaluate ``prod_k k(v_k / h) / h**dim``."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.ndim != 1 or v.shape[0] != spec.dimension:
        raise InvalidArgumentError(
            f"vector of length {v.shape[-1]} does not match kernel dimension {spec.dimension}"
        )
    k = univariate(spec.family)
    h = spec.bandwidth
    return float(np.prod(k(v / h)) / h**spec.dimension)


def bandwidth_rule(n: int, q: int, c: float = 1.75) -> float:
    """``c * n ** (-1 / (4 + q))``."""
    if n < 2:
        raise InvalidArgumentError(f"bandwidth rule needs n >= 2, got {n}")
    if q < 1:
        raise InvalidArgumentError(f"bandwidth rule needs q >= 1, got {q}")
    if not c > 0:
        raise InvalidArgumentError(f"bandwidth constant must be positive, got {c}")
    return c * n ** (-1.0 / (4 + q))


def kernel_square_integral(family: str, dimension: int = 1) -> float:
    """Integral of the squared (product) kernel; multiplicative across coordinates."""
    try:
        base = _SQUARE_INTEGRALS[family]
    except KeyError:
        raise InvalidArgumentError(f"unsupported kernel family {family!r}") from None
    return base**dimension


def kernel_order(family: str) -> int:
    try:
        return _ORDER[family][0]
    except KeyError:
        raise InvalidArgumentError(f"unsupported kernel family {family!r}") from None


def _normal_derivative_square(m: int) -> float:
    # integral of (phi^(m))^2 for the standard normal density
    return math.factorial(2 * m) / (2 ** (2 * m + 1) * math.factorial(m) * math.sqrt(math.pi))


def normal_reference_constant(family: str, dimension: int) -> float:
    """AMISE-optimal density bandwidth constant for N(0, I_d) data and a product kernel.

    The optimal bandwidth is this constant times ``n ** (-1 / (2r + d))`` where
    ``r`` is the kernel order.
    """
    if int(dimension) != dimension or dimension < 1:
        raise InvalidArgumentError(f"dimension must be a positive integer, got {dimension}")
    r = kernel_order(family)
    mu = _ORDER[family][1]
    d = int(dimension)
    roughness = kernel_square_integral(family, d)
    own = _normal_derivative_square(r)
    cross = _normal_derivative_square(r // 2) ** 2
    phi_sq = _normal_derivative_square(0)
    # integral of (sum_k d^r f / dx_k^r)^2 for the standard normal in d dimensions
    curvature = d * own * phi_sq ** (d - 1) + d * (d - 1) * cross * phi_sq ** max(d - 2, 0)
    bias = (mu / math.factorial(r)) ** 2
    return (d * roughness / (2 * r * bias * curvature)) ** (1.0 / (2 * r + d))


def reference_bandwidth(n: int, dimension: int, family: str, factor: float = 1.0) -> float:
    """``factor * normal_reference_constant(family, d) * n ** (-1 / (2r + d))`` for unit-scale data."""
    if n < 2:
        raise InvalidArgumentError(f"bandwidth rule needs n >= 2, got {n}")
    if not factor > 0:
        raise InvalidArgumentError(f"bandwidth factor must be positive, got {factor}")
    r = kernel_order(family)
    return factor * normal_reference_constant(family, dimension) * n ** (-1.0 / (2 * r + dimension))
