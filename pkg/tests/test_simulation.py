import math

import numpy as np
import pytest

from dreamtest import InvalidArgumentError
from dreamtest.io import emit_report
from dreamtest.simulation import (
    SimulationSpec,
    empirical_rejection,
    generate_example,
    half_support_vectors,
    make_covariance,
    replication_seed,
    run_replication,
)


def test_covariances():
    np.testing.assert_array_equal(make_covariance("identity", 3), np.eye(3))
    ar = make_covariance("ar_half", 3)
    np.testing.assert_allclose(ar, [[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1]])
    ex = make_covariance("exch_02", 3)
    np.testing.assert_allclose(ex, [[1, 0.2, 0.2], [0.2, 1, 0.2], [0.2, 0.2, 1]])
    np.testing.assert_array_equal(make_covariance("scaled4_identity", 2), 4 * np.eye(2))
    with pytest.raises(InvalidArgumentError):
        make_covariance("toeplitz", 3)
    with pytest.raises(InvalidArgumentError):
        make_covariance("identity", 0)


def test_half_support_vectors():
    b1, b2 = half_support_vectors(4, 6)
    np.testing.assert_allclose(b1, [1, 1, 0, 0] / np.sqrt(2))
    np.testing.assert_allclose(b2, [0, 0, 0, 1, 1, 1] / np.sqrt(3))
    with pytest.raises(InvalidArgumentError):
        half_support_vectors(3, 2)


def test_generation_is_deterministic_per_replication():
    spec = SimulationSpec(1, 50, a=0.4, seed=7)
    a = generate_example(spec, 3)
    b = generate_example(spec, 3)
    c = generate_example(spec, 4)
    np.testing.assert_array_equal(a.Y, b.Y)
    assert not np.array_equal(a.Y, c.Y)
    assert a.Z.shape == (50, 4)
    assert a.n == 50


def test_noise_free_example_one():
    spec = SimulationSpec(1, 30, a=0.5, noise_scale=0.0)
    s = generate_example(spec)
    b1, b2 = half_support_vectors(2, 2)
    np.testing.assert_allclose(s.Y, 2 * s.X @ b1 + 2 * 0.5 * s.W @ b2, atol=1e-14)


@pytest.mark.parametrize("example", [2, 3, 4, 0])
def test_noise_free_examples(example):
    p = (4, 4) if example in (3, 4) else (2, 2)
    spec = SimulationSpec(example, 40, p[0], p[1], a=1.0, noise_scale=0.0)
    s = generate_example(spec)
    X, W = s.X, s.W
    if example == 2:
        b1, b2 = half_support_vectors(2, 2)
        expected = 2 * np.sin(X @ b1) + 2 * np.sin(W @ b2)
    elif example == 3:
        r = 1 / math.sqrt(2)
        expected = 2 * np.sin(r * (X[:, 0] + X[:, 1])) + np.exp(r * (X[:, 2] + X[:, 3]) / 2) + 2 * np.sin(r * (W[:, 2] + W[:, 3]))
    elif example == 4:
        expected = (
            X[:, 0]
            + 0.2 * np.exp(X[:, 1])
            + 1.5 * (W[:, 0] + W[:, 1]) / (0.5 + np.abs(1.5 * W[:, 2] + 0.5) ** 1.5)
            + 0.75 * np.sin(W[:, 3] + 1)
        )
    else:
        expected = (X[:, 0] + X[:, 1]) / math.sqrt(2) + 2 * W[:, 0]
    np.testing.assert_allclose(s.Y, expected, atol=1e-12)


def test_generator_moments():
    spec = SimulationSpec(1, 20000, a=0.0, sigma_kind="ar_half", seed=1)
    s = generate_example(spec)
    np.testing.assert_allclose(np.cov(s.X.T), make_covariance("ar_half", 2), atol=0.03)
    # b1 = e1 here, so Var(Y) = 4 + 0.25
    assert s.Y.var() == pytest.approx(4.0 + 0.25, rel=0.03)
    ex4 = generate_example(SimulationSpec(4, 20000, 4, 4, seed=1))
    assert ex4.X.var(axis=0) == pytest.approx(np.full(4, 4.0), rel=0.05)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(example_id=9, n=50),
        dict(example_id=1, n=50, replications=0),
        dict(example_id=1, n=50, alpha=1.0),
        dict(example_id=1, n=50, sigma_kind="nope"),
        dict(example_id=1, n=50, methods=("lrt",)),
        dict(example_id=1, n=50, methods=()),
        dict(example_id=3, n=50, p1=2, p2=2),
        dict(example_id=1, n=50, p1=3),
        dict(example_id=1, n=4),
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        SimulationSpec(**kwargs)


def test_spec_helpers():
    spec = SimulationSpec(4, 60, 4, 4)
    assert spec.effective_q1 == 2
    assert spec.effective_sigma == "scaled4_identity"
    assert spec.with_(q1=1).effective_q1 == 1
    assert replication_seed(0, 1) != replication_seed(0, 2)
    assert replication_seed(0, 1) == replication_seed(0, 1)


def test_run_replication_all_methods():
    spec = SimulationSpec(1, 60, a=1.0, methods=("dream", "fan_li", "dm"), bootstrap_reps=20)
    out = run_replication(spec, 0)
    assert set(out) == {"dream", "fan_li", "dm"}
    assert out["dream"]["q_hat"] >= 1
    assert out["dm"]["q_hat"] is None
    assert all(0 <= v["p_value"] <= 1 for v in out.values())


def test_empirical_rejection_summary():
    spec = SimulationSpec(1, 60, a=0.0, replications=20, methods=("dream", "fan_li"))
    res = empirical_rejection(spec, keep_statistics=True)
    m = res.methods["dream"]
    assert m.reps == 20
    assert m.mc_se == pytest.approx(math.sqrt(m.rate * (1 - m.rate) / 20))
    assert sum(m.q_hat_counts.values()) == 20
    assert res.statistics["dream"].shape == (20,)
    assert res.rate("fan_li") == res.methods["fan_li"].rate
    rows = list(res.rows())
    assert [r["method"] for r in rows] == ["dream", "fan_li"]


def test_csv_byte_identical_across_jobs(tmp_path):
    spec = SimulationSpec(1, 60, a=0.4, replications=12, methods=("dream", "dm"), bootstrap_reps=20, seed=5)
    one = tmp_path / "one.csv"
    two = tmp_path / "two.csv"
    emit_report(empirical_rejection(spec, n_jobs=1), "csv", one)
    emit_report(empirical_rejection(spec, n_jobs=2), "csv", two)
    assert one.read_bytes() == two.read_bytes()
