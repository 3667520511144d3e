"""Data generators for the simulation examples and the size/power engine.

Examples (``a`` is the departure from the null; ``a=0`` is the null model):

0. ``Y = (X1 + X2)/sqrt(2) + 2a W1 + eps`` (power-vs-dimension illustration,
   ``a=1`` gives the ``2 W1`` model)
1. ``Y = 2 b1'X + 2a b2'W + 0.5 eps``
2. ``Y = 2 sin(b1'X) + 2a sin(b2'W) + 0.5 eps``
3. ``Y = 2 sin(b1'X) + exp(b2'X / 2) + 2a sin(b2'W) + 0.5 eps`` with p1 = p2 = 4
4. ``Y = X1 + 0.2 exp(X2) + a [1.5(W1+W2) / (0.5 + |1.5 W3 + 0.5|^1.5)
   + 0.75 sin(W4 + 1)] + 0.2 eps`` with ``X, W ~ N(0, 4 I_4)``

Replication ``r`` of a spec draws from ``default_rng([seed, r])`` so any
replication can be regenerated on its own and results do not depend on how
replications are scheduled.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field
import math
import time

import numpy as np

from .exceptions import DegenerateVarianceError, InvalidArgumentError
from .significance import METHODS, DreamConfig, run_method

SIGMA_KINDS = ("identity", "ar_half", "exch_02", "scaled4_identity")
DEFAULT_Q1 = {0: 1, 1: 1, 2: 1, 3: 2, 4: 2}


@dataclass
class Sample:
    X: np.ndarray
    W: np.ndarray
    Y: np.ndarray

    @property
    def n(self) -> int:
        return self.Y.shape[0]

    @property
    def Z(self) -> np.ndarray:
        return np.hstack([self.X, self.W])


def make_covariance(kind: str, p: int) -> np.ndarray:
    if p < 1:
        raise InvalidArgumentError(f"dimension must be >= 1, got {p}")
    idx = np.arange(p)
    if kind == "identity":
        return np.eye(p)
    if kind == "ar_half":
        return 0.5 ** np.abs(idx[:, None] - idx[None, :]).astype(float)
    if kind == "exch_02":
        return np.full((p, p), 0.2) + 0.8 * np.eye(p)
    if kind == "scaled4_identity":
        return 4.0 * np.eye(p)
    raise InvalidArgumentError(f"unknown covariance kind {kind!r}; expected one of {SIGMA_KINDS}")


def half_support_vectors(p1: int, p2: int):
    """``b1`` with ones in its first p1/2 entries, ``b2`` with ones in its last p2/2, both unit norm."""
    if p1 % 2 or p2 % 2:
        raise InvalidArgumentError(f"examples 1 and 2 need even p1 and p2, got {p1}, {p2}")
    b1 = np.zeros(p1)
    b1[: p1 // 2] = 1.0
    b2 = np.zeros(p2)
    b2[p2 - p2 // 2 :] = 1.0
    return b1 / math.sqrt(p1 / 2), b2 / math.sqrt(p2 / 2)


@dataclass(frozen=True)
class SimulationSpec:
    example_id: int
    n: int
    p1: int = 2
    p2: int = 2
    a: float = 0.0
    sigma_kind: str = "identity"
    replications: int = 500
    alpha: float = 0.05
    seed: int = 0
    methods: tuple[str, ...] = ("dream",)
    bootstrap_reps: int = 200
    q1: int | None = None
    noise_scale: float = 1.0  # test hook: 0 removes the error term
    config: DreamConfig = field(default_factory=DreamConfig)

    def __post_init__(self):
        if self.example_id not in DEFAULT_Q1:
            raise InvalidArgumentError(f"unknown example {self.example_id}")
        if self.replications < 1:
            raise InvalidArgumentError("replications must be >= 1")
        if not 0 < self.alpha < 1:
            raise InvalidArgumentError("alpha must lie in (0, 1)")
        if self.sigma_kind not in SIGMA_KINDS:
            raise InvalidArgumentError(f"unknown covariance kind {self.sigma_kind!r}")
        bad = set(self.methods) - set(METHODS)
        if bad or not self.methods:
            raise InvalidArgumentError(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        if self.example_id in (3, 4) and (self.p1, self.p2) != (4, 4):
            raise InvalidArgumentError(f"example {self.example_id} requires p1 = p2 = 4")
        if self.example_id in (1, 2):
            half_support_vectors(self.p1, self.p2)
        if self.example_id == 0 and (self.p1 < 2 or self.p2 < 1):
            raise InvalidArgumentError("example 0 needs p1 >= 2 and p2 >= 1")
        if self.n <= self.p1 + self.p2:
            raise InvalidArgumentError("n must exceed p1 + p2")

    @property
    def effective_q1(self) -> int:
        return self.q1 if self.q1 is not None else DEFAULT_Q1[self.example_id]

    @property
    def effective_sigma(self) -> str:
        # example 4 is always drawn from N(0, 4 I)
        return "scaled4_identity" if self.example_id == 4 else self.sigma_kind

    def with_(self, **changes) -> "SimulationSpec":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return SimulationSpec(**data)


def replication_rng(seed: int, replication_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, replication_index])


def replication_seed(seed: int, replication_index: int) -> int:
    """Integer seed for randomness inside replication ``r`` (the DM bootstrap)."""
    return int(np.random.SeedSequence([seed, replication_index, 1]).generate_state(1)[0])


def generate_example(spec: SimulationSpec, replication_index: int = 0) -> Sample:
    rng = replication_rng(spec.seed, replication_index)
    n, p1, p2 = spec.n, spec.p1, spec.p2
    sigma = spec.effective_sigma
    X = rng.multivariate_normal(np.zeros(p1), make_covariance(sigma, p1), size=n, method="cholesky")
    W = rng.multivariate_normal(np.zeros(p2), make_covariance(sigma, p2), size=n, method="cholesky")
    eps = spec.noise_scale * rng.standard_normal(n)
    a = spec.a
    ex = spec.example_id
    if ex == 0:
        Y = (X[:, 0] + X[:, 1]) / math.sqrt(2.0) + 2.0 * a * W[:, 0] + eps
    elif ex == 1:
        b1, b2 = half_support_vectors(p1, p2)
        Y = 2.0 * X @ b1 + 2.0 * a * W @ b2 + 0.5 * eps
    elif ex == 2:
        b1, b2 = half_support_vectors(p1, p2)
        Y = 2.0 * np.sin(X @ b1) + 2.0 * a * np.sin(W @ b2) + 0.5 * eps
    elif ex == 3:
        b1 = np.array([1.0, 1.0, 0.0, 0.0]) / math.sqrt(2.0)
        b2 = np.array([0.0, 0.0, 1.0, 1.0]) / math.sqrt(2.0)
        Y = 2.0 * np.sin(X @ b1) + np.exp(X @ b2 / 2.0) + 2.0 * a * np.sin(W @ b2) + 0.5 * eps
    else:
        ratio = 1.5 * (W[:, 0] + W[:, 1]) / (0.5 + np.abs(1.5 * W[:, 2] + 0.5) ** 1.5)
        Y = X[:, 0] + 0.2 * np.exp(X[:, 1]) + a * (ratio + 0.75 * np.sin(W[:, 3] + 1.0)) + 0.2 * eps
    return Sample(X, W, Y)


def run_replication(spec: SimulationSpec, replication_index: int) -> dict:
    """Apply every requested method to one generated dataset.

    A degenerate variance (no pair of points inside the kernel support)
    is recorded as a non-rejection with a NaN statistic.
    """
    sample = generate_example(spec, replication_index)
    config = spec.config
    if "dm" in spec.methods and config.bootstrap_reps != spec.bootstrap_reps:
        config = DreamConfig(**{**config.__dict__, "bootstrap_reps": spec.bootstrap_reps})
    seed = replication_seed(spec.seed, replication_index)
    out = {}
    for method in spec.methods:
        try:
            report = run_method(method, sample.X, sample.W, sample.Y, spec.effective_q1, config, seed=seed)
        except DegenerateVarianceError:
            out[method] = {"statistic": float("nan"), "p_value": 1.0, "reject": False, "q_hat": None}
            continue
        out[method] = {
            "statistic": report.statistic,
            "p_value": report.p_value,
            "reject": report.reject(spec.alpha),
            "q_hat": report.q_hat,
        }
    return out


@dataclass
class MethodResult:
    method: str
    rate: float
    mc_se: float
    reps: int
    mean_q_hat: float | None = None
    q_hat_counts: dict | None = None


@dataclass
class PowerResult:
    spec: SimulationSpec
    methods: dict[str, MethodResult]
    runtime: float
    statistics: dict[str, np.ndarray] | None = None
    p_values: dict[str, np.ndarray] | None = None
    q_hats: np.ndarray | None = None

    def rate(self, method: str) -> float:
        return self.methods[method].rate

    def rows(self):
        """CSV-ready rows, one per method."""
        s = self.spec
        for name in s.methods:
            m = self.methods[name]
            yield {
                "example": s.example_id,
                "n": s.n,
                "a": s.a,
                "sigma": s.effective_sigma,
                "method": name,
                "rate": m.rate,
                "mc_se": m.mc_se,
                "reps": m.reps,
                "seed": s.seed,
            }

    def to_dict(self, include_statistics: bool = False):
        spec = asdict(self.spec)
        spec["methods"] = list(self.spec.methods)
        out = {
            "spec": spec,
            "runtime": self.runtime,
            "methods": {k: asdict(v) for k, v in self.methods.items()},
        }
        if include_statistics and self.statistics is not None:
            out["statistics"] = {k: v.tolist() for k, v in self.statistics.items()}
            out["p_values"] = {k: v.tolist() for k, v in self.p_values.items()}
        return out


def empirical_rejection(spec: SimulationSpec, n_jobs: int = 1, keep_statistics: bool = False) -> PowerResult:
    """Rejection frequencies over ``spec.replications`` independent datasets."""
    start = time.perf_counter()
    indices = range(spec.replications)
    if n_jobs == 1:
        results = [run_replication(spec, r) for r in indices]
    else:
        from joblib import Parallel, delayed

        # joblib returns results in submission order
        results = Parallel(n_jobs=n_jobs)(delayed(run_replication)(spec, r) for r in indices)
    runtime = time.perf_counter() - start

    reps = spec.replications
    methods = {}
    stats, pvals = {}, {}
    q_hats = None
    for name in spec.methods:
        rejects = np.array([res[name]["reject"] for res in results], dtype=bool)
        rate = float(rejects.mean())
        mc_se = math.sqrt(rate * (1.0 - rate) / reps)
        mean_q = counts = None
        if name == "dream":
            qs = [res[name]["q_hat"] for res in results if res[name]["q_hat"] is not None]
            if qs:
                q_hats = np.array(qs)
                mean_q = float(q_hats.mean())
                counts = dict(sorted(Counter(int(q) for q in qs).items()))
        methods[name] = MethodResult(name, rate, mc_se, reps, mean_q, counts)
        stats[name] = np.array([res[name]["statistic"] for res in results])
        pvals[name] = np.array([res[name]["p_value"] for res in results])
    return PowerResult(
        spec,
        methods,
        runtime,
        stats if keep_statistics else None,
        pvals if keep_statistics else None,
        q_hats,
    )
