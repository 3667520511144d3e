"""Command-line interface.

Commands::

    dreamtest test      --input data.csv --x x1,x2 --w w1 --y y --q1 1 [--method dream]
    dreamtest compare   --input data.csv --x x1,x2 --w w1 --y y --q1 1
    dreamtest simulate  --example 1 --n 100,200 --a 0,0.4 [--methods dream,fan_li]
    dreamtest baseball  [--case both] [--q1 auto]

Exit status is 0 on success, 2 for configuration errors and 3 for data
errors.  ``DREAM_SEED`` in the environment overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import _backend
from .baseball import CASES, SCALINGS, baseball_pipeline
from .exceptions import ConfigError, DataError, DegenerateVarianceError, InvalidArgumentError, SingularCovarianceError
from .io import emit_report, ingest_csv, write_statistics
from .kernels import FAMILIES
from .sdr import RidgeConfig
from .significance import METHODS, DreamConfig, estimate_q1, run_method
from .simulation import SIGMA_KINDS, SimulationSpec, empirical_rejection

log = logging.getLogger("dreamtest")

EXIT_CONFIG = 2
EXIT_DATA = 3


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _method_list(text):
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {METHODS}, got {text!r}")
    return methods


def _q1(text):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--q1 must be a positive integer or 'auto', got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("--q1 must be >= 1")
    return value


def _add_common(p):
    g = p.add_argument_group("tuning")
    g.add_argument("--c-h", type=float, default=1.75, help="test bandwidth constant (default 1.75)")
    g.add_argument(
        "--smooth-bandwidth",
        choices=("reference", "rule"),
        default="reference",
        help="null smoother bandwidth rule (default reference)",
    )
    g.add_argument("--c-h1", type=float, default=None, help="smoother bandwidth constant")
    g.add_argument("--test-kernel", choices=FAMILIES, default="quartic")
    g.add_argument("--smooth-kernel", choices=FAMILIES, default="gauss4")
    g.add_argument("--ridge", choices=("scaled", "fixed"), default="scaled", help="RERE ridge rule")
    g.add_argument("--c-n", type=float, default=None, help="ridge constant for --ridge fixed")
    g.add_argument("--bootstrap-reps", type=int, default=None, help="DM wild-bootstrap replications")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--alpha", type=float, default=0.05)
    g.add_argument("--backend", choices=("numba", "numpy"), default=None)
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("json", "csv"), default="json")
    o.add_argument("--output", default="-", help="output path ('-' for stdout)")
    o.add_argument("-q", "--quiet", action="store_true", help="only log warnings")


def _add_data(p, with_method):
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--x", required=True, action="append", help="X columns (names or 0-based indices)")
    p.add_argument("--w", required=True, action="append", help="W columns")
    p.add_argument("--y", required=True, help="response column")
    p.add_argument("--q1", required=True, type=_q1, help="structural dimension of E(Y|X), or 'auto'")
    if with_method:
        p.add_argument("--method", choices=METHODS, default="dream")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dreamtest", description="Significance tests for a covariate block W given X.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run one test on a CSV dataset")
    _add_data(p, with_method=True)
    _add_common(p)

    p = sub.add_parser("compare", help="run all three tests on a CSV dataset")
    _add_data(p, with_method=False)
    _add_common(p)

    p = sub.add_parser("simulate", help="empirical size/power over a grid of n and a")
    p.add_argument("--example", type=int, choices=(0, 1, 2, 3, 4), required=True)
    p.add_argument("--n", type=_int_list, required=True, help="sample sizes, e.g. 50,100,200")
    p.add_argument("--a", type=_float_list, default=[0.0], help="departures, e.g. 0,0.4,0.8")
    p.add_argument("--p1", type=int, default=None)
    p.add_argument("--p2", type=int, default=None)
    p.add_argument("--sigma", choices=SIGMA_KINDS, default="identity")
    p.add_argument("--replications", type=int, default=500)
    p.add_argument("--methods", type=_method_list, default=("dream",))
    p.add_argument("--q1", type=int, default=None, help="override the example's q1")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for replications")
    p.add_argument("--statistics", default=None, help="also write per-replication statistics (JSON) here")
    _add_common(p)

    p = sub.add_parser("baseball", help="the hitters' salary case study")
    p.add_argument("--input", default=None, help="hitters CSV (defaults to the bundled copy)")
    p.add_argument("--case", choices=CASES + ("both",), default="both")
    p.add_argument("--q1", type=_q1, default="auto")
    p.add_argument("--scaling", choices=SCALINGS, default="unit_variance")
    _add_common(p)
    return parser


def _seed(args) -> int:
    env = os.environ.get("DREAM_SEED")
    if env is None or env.strip() == "":
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"DREAM_SEED must be an integer, got {env!r}") from None


def _config(args) -> DreamConfig:
    if args.ridge == "fixed":
        if args.c_n is None:
            raise ConfigError("--ridge fixed needs --c-n")
        ridge = RidgeConfig(rule="fixed", c_n=args.c_n)
    else:
        if args.c_n is not None:
            raise ConfigError("--c-n only applies with --ridge fixed")
        ridge = RidgeConfig()
    kw = dict(
        c_h=args.c_h,
        smooth_bandwidth=args.smooth_bandwidth,
        test_kernel=args.test_kernel,
        smooth_kernel=args.smooth_kernel,
        ridge=ridge,
    )
    if args.c_h1 is not None:
        kw["c_h1"] = args.c_h1
    elif args.smooth_bandwidth == "rule":
        kw["c_h1"] = 1.75
    if args.bootstrap_reps is not None:
        kw["bootstrap_reps"] = args.bootstrap_reps
    if not 0 < args.alpha < 1:
        raise ConfigError("--alpha must lie in (0, 1)")
    try:
        return DreamConfig(**kw)
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_q1(q1, X, Y, config):
    if q1 == "auto":
        q1 = estimate_q1(X, Y, config)
        log.warning("--q1 auto: estimated q1 = %d from (X, Y); the method itself assumes q1 is known", q1)
    if q1 > X.shape[1]:
        raise ConfigError(f"--q1 {q1} exceeds the number of X columns ({X.shape[1]})")
    return q1


def _run_data(args, config, seed, methods):
    data = ingest_csv(args.input, args.x, args.w, args.y)
    s = data.sample
    log.info("read n=%d rows (p1=%d, p2=%d) from %s; dropped %d", s.n, s.X.shape[1], s.W.shape[1], args.input, data.dropped)
    q1 = _resolve_q1(args.q1, s.X, s.Y, config)
    reports = [run_method(m, s.X, s.W, s.Y, q1, config, seed=seed) for m in methods]
    return reports, {"input": str(args.input), "columns": data.columns, "dropped": data.dropped, "q1": q1}


def _run_simulate(args, config, seed):
    results = []
    defaults = {0: (2, 2), 3: (4, 4), 4: (4, 4)}
    p1d, p2d = defaults.get(args.example, (2, 2))
    p1 = args.p1 if args.p1 is not None else p1d
    p2 = args.p2 if args.p2 is not None else p2d
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    for n in args.n:
        for a in args.a:
            try:
                spec = SimulationSpec(
                    example_id=args.example,
                    n=n,
                    p1=p1,
                    p2=p2,
                    a=a,
                    sigma_kind=args.sigma,
                    replications=args.replications,
                    alpha=args.alpha,
                    seed=seed,
                    methods=args.methods,
                    bootstrap_reps=config.bootstrap_reps if args.bootstrap_reps is not None else 200,
                    q1=args.q1,
                    config=config,
                )
            except InvalidArgumentError as exc:
                raise ConfigError(str(exc)) from exc
            res = empirical_rejection(spec, n_jobs=args.jobs, keep_statistics=args.statistics is not None)
            log.info(
                "example %d n=%d a=%g: %s (%.1fs)",
                args.example,
                n,
                a,
                ", ".join(f"{k}={v.rate:.4f}" for k, v in res.methods.items()),
                res.runtime,
            )
            results.append(res)
    if args.statistics:
        write_statistics(results, args.statistics)
    return results, {"example": args.example, "n": args.n, "a": args.a, "p1": p1, "p2": p2}


def _run(args) -> int:
    if args.backend:
        _backend.set_backend(args.backend)
    seed = _seed(args)
    config = _config(args)
    effective = {"command": args.command, "seed": seed, "alpha": args.alpha, "backend": _backend.backend_name()}
    effective["config"] = config.to_dict()
    if args.command in ("test", "compare"):
        methods = (args.method,) if args.command == "test" else METHODS
        out, extra = _run_data(args, config, seed, methods)
    elif args.command == "simulate":
        out, extra = _run_simulate(args, config, seed)
    else:
        cases = CASES if args.case == "both" else (args.case,)
        out = [baseball_pipeline(args.input, c, args.q1, config, args.scaling) for c in cases]
        extra = {"cases": list(cases), "scaling": args.scaling, "q1": [r.q1 for r in out]}
    effective.update(extra)
    log.info("effective config: %s", json.dumps(effective, sort_keys=True, default=str))
    emit_report(out, args.format, args.output, meta=effective)
    if args.command != "simulate":
        for r in out:
            log.info("%s: statistic=%.4f p=%.4g reject@%g=%s", r.method, r.statistic, r.p_value, args.alpha, r.reject(args.alpha))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _run(args)
    except (ConfigError, InvalidArgumentError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (DataError, SingularCovarianceError, DegenerateVarianceError) as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
