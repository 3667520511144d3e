"""Baseball hitters' salary case study.

The 16 performance measures fall into three groups:

* ``V1`` -- 1986 season hitting: AtBat, Hits, HmRun, Runs, RBI, Walks;
* ``V2`` -- career: Years plus the per-year rates CAtBat/Years, ...,
  CWalks/Years;
* ``V3`` -- 1986 fielding: PutOuts, Assists, Errors.

The response is ``log(Salary)``.  Case I tests ``W = V3`` given
``X = (V1, V2)``; case II tests ``W = (V2, V3)`` given ``X = V1``.

A copy of the 322-player table (263 with a recorded salary) ships with the
package; ``scripts/fetch_baseball.py`` documents the expected columns for
other copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
import logging
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, DataError
from .io import ingest_csv
from .significance import DreamConfig, TestReport, estimate_q1, run_dream

SEASON = ("AtBat", "Hits", "HmRun", "Runs", "RBI", "Walks")
YEARS = "Years"
CAREER = ("CAtBat", "CHits", "CHmRun", "CRuns", "CRBI", "CWalks")
FIELDING = ("PutOuts", "Assists", "Errors")
SALARY = "Salary"
REQUIRED_COLUMNS = SEASON + (YEARS,) + CAREER + FIELDING + (SALARY,)
CASES = ("I", "II")
SCALINGS = ("unit_variance", "unit_length")

log = logging.getLogger(__name__)


def default_path() -> Path:
    return Path(str(resources.files("dreamtest") / "data" / "hitters.csv"))


@dataclass
class BaseballData:
    V1: np.ndarray
    V2: np.ndarray
    V3: np.ndarray
    Y: np.ndarray
    dropped: int


def load_baseball(path=None) -> BaseballData:
    """Read the measures, form the per-year career rates and ``log(Salary)``."""
    path = Path(path) if path is not None else default_path()
    cols = list(REQUIRED_COLUMNS)
    try:
        res = ingest_csv(path, cols[:-2], [cols[-2]], SALARY)
    except ConfigError as exc:
        # the only config problem here is a column the file lacks
        raise DataError(f"{path} does not have the expected baseball columns: {exc}") from exc
    X = res.sample.Z
    years = X[:, len(SEASON)]
    if np.any(years <= 0):
        raise DataError(f"{path}: Years must be positive to form per-year rates")
    season = X[:, : len(SEASON)]
    career = X[:, len(SEASON) + 1 : len(SEASON) + 1 + len(CAREER)] / years[:, None]
    fielding = X[:, len(SEASON) + 1 + len(CAREER) :]
    salary = res.sample.Y
    if np.any(salary <= 0):
        raise DataError(f"{path}: Salary must be positive to take logs")
    V2 = np.column_stack([years, career])
    return BaseballData(season, V2, fielding, np.log(salary), res.dropped)


def standardize_columns(A, scaling: str = "unit_variance"):
    """Centre each column and scale it to unit variance or unit Euclidean length."""
    if scaling not in SCALINGS:
        raise ConfigError(f"scaling must be one of {SCALINGS}, got {scaling!r}")
    A = np.asarray(A, dtype=float)
    A = A - A.mean(axis=0)
    scale = np.linalg.norm(A, axis=0) if scaling == "unit_length" else A.std(axis=0)
    if np.any(scale == 0):
        raise DataError("a constant covariate cannot be standardized")
    return A / scale


def design(data: BaseballData, case: str, scaling: str = "unit_variance"):
    """``(X, W, Y)`` for the requested case."""
    if case not in CASES:
        raise ConfigError(f"case must be one of {CASES}, got {case!r}")
    V1, V2, V3 = (standardize_columns(v, scaling) for v in (data.V1, data.V2, data.V3))
    if case == "I":
        return np.hstack([V1, V2]), V3, data.Y
    return V1, np.hstack([V2, V3]), data.Y


def baseball_pipeline(
    path=None,
    case: str = "II",
    q1: int | str = "auto",
    config: DreamConfig = DreamConfig(),
    scaling: str = "unit_variance",
) -> TestReport:
    data = load_baseball(path)
    X, W, Y = design(data, case, scaling)
    if q1 == "auto":
        q1 = estimate_q1(X, Y, config)
        log.info("case %s: q1 selected as %d", case, q1)
    elif not isinstance(q1, int) or not 1 <= q1 <= X.shape[1]:
        raise ConfigError(f"q1 must be 'auto' or an integer in [1, {X.shape[1]}], got {q1!r}")
    return run_dream(X, W, Y, q1, config)
