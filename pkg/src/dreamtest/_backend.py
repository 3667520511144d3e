"""Selection between the numba and pure-numpy implementations of the hot kernels.

The numba path is used whenever numba imports and ``DREAM_DISABLE_NUMBA`` is
unset (or ``0``/``false``).  Both paths expose the same four functions:

``loo_sums(T, y, h, family)``
    Leave-one-out kernel-weighted sums ``(num, den)``.
``loo_weight_matrix(T, h, family)``
    Dense ``n x n`` product-kernel weights with a zero diagonal.
``ustat_sums(T, u, h, family)``
    ``(sum_{i!=j} u_i u_j w_ij, sum_{i!=j} u_i^2 u_j^2 w_ij^2)``.
``dominance_matrix(Z)``
    ``A[i, j] = 1`` when every coordinate of ``z_j`` is strictly below ``z_i``.

All weights are unscaled products ``prod_k k((t_jk - t_ik) / h)``; callers
apply the ``h**-q`` factor.
"""

from __future__ import annotations

import os
from types import ModuleType

FAMILY_CODES = {"quartic": 0, "gauss4": 1, "gauss": 2}


def _env_disabled() -> bool:
    return os.environ.get("DREAM_DISABLE_NUMBA", "").strip().lower() not in {"", "0", "false", "no"}


try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_active: str = "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"


def backend_name() -> str:
    return _active


def set_backend(name: str) -> None:
    """Switch the process-wide backend (``"numba"`` or ``"numpy"``)."""
    global _active
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    _active = name


def module(name: str | None = None) -> ModuleType:
    name = name or _active
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    from . import _kernels_numpy

    return _kernels_numpy


def family_code(family: str) -> int:
    try:
        return FAMILY_CODES[family]
    except KeyError:
        raise ValueError(f"unsupported kernel family {family!r}") from None


def loo_sums(T, y, h, family):
    return module().loo_sums(T, y, h, family_code(family))


def loo_weight_matrix(T, h, family):
    return module().loo_weight_matrix(T, h, family_code(family))


def ustat_sums(T, u, h, family):
    return module().ustat_sums(T, u, h, family_code(family))


def dominance_matrix(Z):
    return module().dominance_matrix(Z)
