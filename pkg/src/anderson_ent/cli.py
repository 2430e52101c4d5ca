"""Command-line interface: one subcommand per experiment, CSV out.

Subcommands: ground-scan, nn-dist, center-pair, critical-lambda,
decay-profile, evolve, selfcheck.  Options resolve with precedence
CLI > config file > built-in defaults; the config file holds one
``key = value`` pair per line with ``#`` comments.  Exit codes: 0 ok,
2 usage, 3 invalid config, 4 numeric failure, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, entanglement, fitting, localization
from .dynamics import InitialState, PropagatorConfig
from .ensemble import (
    Observable,
    SweepConfig,
    locate_peak,
    run_critical_lambda,
    run_sweep,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DataError,
    DimensionError,
    ExtendedStateError,
    InsufficientDataError,
    NumericalError,
)
from .lattice import BoundaryCondition, DisorderConfig
from .output import RunManifest, parse_config_text, write_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4
EXIT_IO = 5

WORKERS_ENV = "ANDERSON_ENT_WORKERS"

_CONFIG_ERRORS = (ConfigError, DimensionError, DataError)
_NUMERIC_ERRORS = (ConvergenceError, NumericalError, ExtendedStateError,
                   InsufficientDataError)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line, machine-parsable failure
        raise _UsageError(message)


def _parse_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean from {text!r}")


def _parse_lambdas(text: str) -> tuple[float, ...]:
    """Grid syntax: 'a,b,c' or 'start:stop:step' (inclusive stop)."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range syntax is start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("range step must be positive")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))
    try:
        return tuple(float(p) for p in text.split(",") if p.strip() != "")
    except ValueError:
        raise ConfigError(f"cannot parse strength list from {text!r}")


def _parse_bc(text: str) -> str:
    low = str(text).strip().lower()
    if low not in ("open", "periodic"):
        raise ConfigError(f"bc must be 'open' or 'periodic', got {text!r}")
    return low


_COMMON = {
    "size": (int, 1600, "number of lattice sites"),
    "seed": (int, 42, "master seed of the sweep"),
    "hopping": (float, 1.0, "nearest-neighbor hopping t"),
    "v0": (float, 0.0, "uniform potential offset"),
    "bc": (_parse_bc, "periodic", "boundary condition: open or periodic"),
    "realizations": (int, 50, "disorder realizations per strength"),
    "workers": (int, None, f"worker processes (default ${WORKERS_ENV} or 1)"),
    "out": (str, None, "output CSV path (default <command>.csv)"),
    "no-timestamp": (_parse_bool, False, "omit varying lines from CSV comments"),
}

_SPECS = {
    "ground-scan": {
        **_COMMON,
        "lambdas": (_parse_lambdas, _parse_lambdas("0:2:0.05"),
                    "strength grid (list or start:stop:step)"),
    },
    "nn-dist": {
        **_COMMON,
        "lambdas": (_parse_lambdas, _parse_lambdas("0,0.01,0.05,0.1,0.5,1.0"),
                    "strength grid"),
    },
    "center-pair": {
        **_COMMON,
        "lambdas": (_parse_lambdas, _parse_lambdas("0:2:0.1"), "strength grid"),
        "pair-offset": (int, 1, "offset from the localization center"),
    },
    "critical-lambda": {
        **_COMMON,
        "lambdas": (_parse_lambdas, _parse_lambdas("0:2:0.1"), "strength grid"),
        "max-offset": (int, 6, "largest center offset to scan"),
    },
    "decay-profile": {
        **_COMMON,
        "lambdas": (_parse_lambdas, _parse_lambdas("0.5,1.0"), "strength grid"),
        "max-offset": (int, 400, "half-width of the recorded offset window"),
        "floor": (float, 1e-8, "amplitude floor for the decay fit"),
    },
    "evolve": {
        **_COMMON,
        "realizations": (int, 8, "disorder realizations per strength"),
        "lambda": (float, None, "single strength (overrides --lambdas)"),
        "lambdas": (_parse_lambdas, (0.0,), "strength grid"),
        "init": (str, "delta", "initial condition: delta or w"),
        "init-site": (int, None, "site of the delta excitation (default N//2)"),
        "dt": (float, 0.05, "time step"),
        "total-time": (float, 400.0, "total evolution time"),
        "record-stride": (int, 20, "steps between recorded samples"),
    },
    "selfcheck": {
        "workers": (int, None, "unused; accepted for symmetry"),
    },
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="anderson-ent", description=__doc__)
    parser.add_argument("--version", action="version",
                        version=f"anderson-ent {__version__}")
    subs = parser.add_subparsers(dest="command", metavar="command")
    for command, spec in _SPECS.items():
        sub = subs.add_parser(command)
        sub.add_argument("--config", default=None,
                         help="config file with key = value lines")
        for name, (_parse, _default, help_text) in spec.items():
            if _parse is _parse_bool:
                sub.add_argument(f"--{name}", nargs="?", const="1",
                                 default=None, help=help_text)
            else:
                sub.add_argument(f"--{name}", default=None, help=help_text)
    return parser


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and CLI flags for one command."""
    spec = _SPECS[command]
    file_values: dict[str, str] = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}")
        file_values = parse_config_text(text)
        unknown = set(file_values) - set(spec)
        if unknown:
            raise ConfigError(
                f"unknown config keys for {command}: {sorted(unknown)}"
            )
    resolved = {}
    for name, (parse, default, _help) in spec.items():
        cli_value = getattr(args, name.replace("-", "_"), None)
        if cli_value is not None:
            resolved[name] = parse(cli_value)
        elif name in file_values:
            resolved[name] = parse(file_values[name])
        else:
            resolved[name] = default
    if resolved.get("workers") is None:
        env = os.environ.get(WORKERS_ENV)
        resolved["workers"] = int(env) if env else 1
    return resolved


def _base_config(opts: dict) -> DisorderConfig:
    return DisorderConfig(
        size=opts["size"],
        strength=0.0,
        hopping=opts["hopping"],
        offset=opts["v0"],
        seed=opts["seed"],
        boundary=(BoundaryCondition.PERIODIC if opts["bc"] == "periodic"
                  else BoundaryCondition.OPEN),
    )


def _fit_result_rows(fit: fitting.FitResult) -> dict:
    params = dict(fit.params)
    params["residual_norm"] = fit.residual_norm
    params["r2"] = fit.r2
    params["converged"] = fit.converged
    params["iterations"] = fit.iterations
    return {"param": list(params.keys()), "value": list(params.values())}


def _out_paths(command: str, opts: dict, with_fit: bool):
    base = Path(opts["out"]) if opts["out"] else Path(
        command.replace("-", "_") + ".csv")
    fit = base.with_name(base.stem + "_fit" + base.suffix) if with_fit else None
    return base, fit


def _emit(command: str, opts: dict, files: list, started: float) -> list[str]:
    """Write every (path, columns) pair under one manifest; return paths."""
    outputs = [str(path) for path, _ in files]
    manifest = RunManifest(
        command=command,
        params={k: v for k, v in opts.items() if v is not None},
        seed=opts.get("seed", 0),
        version=__version__,
        outputs=outputs,
        walltime_s=None if opts["no-timestamp"] else time.perf_counter() - started,
    )
    for path, columns in files:
        write_csv(path, columns, manifest, opts["no-timestamp"])
    return outputs


def _profile_columns(result, axis_name: str) -> dict:
    n_lam, width = result.mean.shape
    return {
        "lambda": np.repeat(result.lambdas, width),
        axis_name: np.tile(result.axis, n_lam),
        "mean_concurrence": result.mean.ravel(),
        "stderr": result.stderr.ravel(),
        "realizations": np.repeat(result.counts, width),
    }


def cmd_ground_scan(opts: dict) -> list[str]:
    started = time.perf_counter()
    cfg = SweepConfig(
        base=_base_config(opts),
        lambdas=opts["lambdas"],
        realizations=opts["realizations"],
        observable=Observable.avg_concurrence(),
    )
    result = run_sweep(cfg, workers=opts["workers"])
    columns = {
        "lambda": result.lambdas,
        "mean_avg_concurrence": result.mean,
        "stderr": result.stderr,
        "realizations": result.counts,
    }
    with_fit = len(cfg.lambdas) >= 6
    path, fit_path = _out_paths("ground-scan", opts, with_fit)
    files = [(path, columns)]
    if with_fit:
        fit = fitting.fit_exp_double(result.lambdas, result.mean)
        files.append((fit_path, _fit_result_rows(fit)))
    return _emit("ground-scan", opts, files, started)


def cmd_nn_dist(opts: dict) -> list[str]:
    started = time.perf_counter()
    cfg = SweepConfig(
        base=_base_config(opts),
        lambdas=opts["lambdas"],
        realizations=opts["realizations"],
        observable=Observable.nn_profile(),
    )
    result = run_sweep(cfg, workers=opts["workers"])
    path, _ = _out_paths("nn-dist", opts, with_fit=False)
    return _emit("nn-dist", opts,
                 [(path, _profile_columns(result, "site"))], started)


def cmd_center_pair(opts: dict) -> list[str]:
    started = time.perf_counter()
    cfg = SweepConfig(
        base=_base_config(opts),
        lambdas=opts["lambdas"],
        realizations=opts["realizations"],
        observable=Observable.center_pair(opts["pair-offset"]),
    )
    result = run_sweep(cfg, workers=opts["workers"])
    means = result.mean[:, 0]
    columns = {
        "lambda": result.lambdas,
        "mean_concurrence": means,
        "stderr": result.stderr[:, 0],
        "realizations": result.counts,
    }
    lam_star, c_star, interior = locate_peak(result.lambdas, means)
    peak_rows = {
        "param": ["lambda_star", "c_star", "is_interior"],
        "value": [lam_star, c_star, interior],
    }
    path, fit_path = _out_paths("center-pair", opts, with_fit=True)
    return _emit("center-pair", opts,
                 [(path, columns), (fit_path, peak_rows)], started)


def cmd_critical_lambda(opts: dict) -> list[str]:
    started = time.perf_counter()
    result = run_critical_lambda(
        base=_base_config(opts),
        offsets=tuple(range(1, opts["max-offset"] + 1)),
        lambdas=opts["lambdas"],
        realizations=opts["realizations"],
        workers=opts["workers"],
    )
    columns = {
        "offset": result.offsets,
        "lambda_c": result.lambda_c,
        "peak_concurrence": result.peak_value,
        "is_interior": result.is_interior,
    }
    with_fit = result.fit is not None
    path, fit_path = _out_paths("critical-lambda", opts, with_fit)
    files = [(path, columns)]
    if with_fit:
        files.append((fit_path, _fit_result_rows(result.fit)))
    return _emit("critical-lambda", opts, files, started)


def _fold_center_profile(offsets: np.ndarray, means: np.ndarray):
    """Average the two sides of the center onto distances |j| >= 1."""
    jmax = int(offsets.max())
    dist = np.arange(1, jmax + 1, dtype=float)
    folded = np.empty(jmax)
    for idx, j in enumerate(dist):
        folded[idx] = 0.5 * (means[offsets == j][0] + means[offsets == -j][0])
    return dist, folded


def cmd_decay_profile(opts: dict) -> list[str]:
    started = time.perf_counter()
    jmax = min(opts["max-offset"], opts["size"] // 2 - 1)
    cfg = SweepConfig(
        base=_base_config(opts),
        lambdas=opts["lambdas"],
        realizations=opts["realizations"],
        observable=Observable.center_profile(jmax),
    )
    result = run_sweep(cfg, workers=opts["workers"])
    fit_lam, fit_param, fit_value = [], [], []
    for k, lam in enumerate(result.lambdas):
        dist, folded = _fold_center_profile(result.axis, result.mean[k])
        usable = folded > opts["floor"]
        rows: dict[str, float] = {}
        if int(usable.sum()) >= 2:
            line = fitting.linear_fit(dist[usable], np.log(folded[usable]))
            rows["loglin_slope"] = line.params["slope"]
            rows["loglin_intercept"] = line.params["intercept"]
            rows["loglin_r2"] = line.r2
            if line.params["slope"] < 0:
                rows["decay_length"] = -1.0 / line.params["slope"]
        if int(usable.sum()) >= 4:
            expfit = fitting.fit_exp_single(dist[usable], folded[usable])
            rows["exp_B"] = expfit.params["B"]
            rows["exp_D"] = expfit.params["D"]
            rows["exp_A"] = expfit.params["A"]
            rows["exp_r2"] = expfit.r2
            rows["exp_converged"] = float(expfit.converged)
        for key, value in rows.items():
            fit_lam.append(lam)
            fit_param.append(key)
            fit_value.append(value)
    path, fit_path = _out_paths("decay-profile", opts, with_fit=True)
    files = [(path, _profile_columns(result, "offset")),
             (fit_path, {"lambda": fit_lam, "param": fit_param,
                         "value": fit_value})]
    return _emit("decay-profile", opts, files, started)


def cmd_evolve(opts: dict) -> list[str]:
    started = time.perf_counter()
    lambdas = ((opts["lambda"],) if opts.get("lambda") is not None
               else opts["lambdas"])
    if opts["init"] == "delta":
        init = InitialState.delta(opts["init-site"])
    elif opts["init"] == "w":
        init = InitialState.w()
    else:
        raise ConfigError(f"init must be 'delta' or 'w', got {opts['init']!r}")
    prop = PropagatorConfig(
        dt=opts["dt"],
        total_time=opts["total-time"],
        record_stride=opts["record-stride"],
    )
    cfg = SweepConfig(
        base=_base_config(opts),
        lambdas=lambdas,
        realizations=opts["realizations"],
        observable=Observable.dynamics(prop, init),
    )
    result = run_sweep(cfg, workers=opts["workers"])
    n_lam, width = result.mean.shape
    columns = {
        "lambda": np.repeat(result.lambdas, width),
        "time": np.tile(result.axis, n_lam),
        "mean_avg_concurrence": result.mean.ravel(),
        "stderr": result.stderr.ravel(),
        "realizations": np.repeat(result.counts, width),
    }
    path, _ = _out_paths("evolve", opts, with_fit=False)
    return _emit("evolve", opts, [(path, columns)], started)


def _selfcheck_checks():
    """Small-N invariant suite; yields (name, callable) pairs."""
    from .dynamics import evolve_record
    from .eigensolver import ground_state, lowest_k
    from .lattice import build_hamiltonian
    from .state import State

    def dense(h):
        n = h.size
        m = np.diag(h.potentials).astype(float)
        for i in range(n - 1):
            m[i, i + 1] -= h.hopping
            m[i + 1, i] -= h.hopping
        if h.periodic:
            m[0, n - 1] -= h.hopping
            m[n - 1, 0] -= h.hopping
        return m

    def check_pair_sum_identity():
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(2, 65))
            s = State(rng.standard_normal(n) + 1j * rng.standard_normal(n),
                      normalize=True)
            direct = sum(
                entanglement.concurrence_pair(s, i, j)
                for i in range(n) for j in range(i + 1, n)
            ) / (n * (n - 1) / 2)
            closed = entanglement.average_concurrence(s)
            assert abs(direct - closed) <= 1e-12 * max(abs(direct), 1e-30)

    def check_free_ring_baseline():
        n = 64
        pair = ground_state(build_hamiltonian(
            DisorderConfig(size=n, strength=0.0, seed=3)))
        assert abs(pair.energy + 2.0) < 1e-10
        assert abs(entanglement.average_concurrence(pair.state) - 2.0 / n) < 1e-10
        prof = entanglement.nn_profile(pair.state)
        assert np.max(np.abs(prof - 2.0 / n)) < 1e-8

    def check_eigensolver_vs_dense():
        rng = np.random.default_rng(5)
        for bc in BoundaryCondition:
            for _ in range(20):
                n = int(rng.integers(3, 17))
                h = build_hamiltonian(DisorderConfig(
                    size=n, strength=float(rng.uniform(0.3, 2)),
                    seed=int(rng.integers(2**32)), boundary=bc))
                evals, evecs = np.linalg.eigh(dense(h))
                pair = ground_state(h)
                assert abs(pair.energy - evals[0]) < 1e-8
                ref = evecs[:, 0]
                if ref[np.argmax(np.abs(ref))] < 0:
                    ref = -ref
                assert np.max(np.abs(pair.state.amplitudes.real - ref)) < 1e-7
                pairs = lowest_k(h, 3)
                assert np.allclose([p.energy for p in pairs], evals[:3],
                                   atol=1e-8)

    def check_propagator_oracle():
        n = 16
        h = build_hamiltonian(DisorderConfig(size=n, strength=1.0, seed=11))
        evals, evecs = np.linalg.eigh(dense(h))
        psi = State.delta(n, n // 2)
        rec = evolve_record(
            h, InitialState.custom(psi),
            PropagatorConfig(dt=0.004, total_time=1.0, record_stride=250),
            keep_snapshots=True)
        final = rec.snapshots[-1].amplitudes
        exact = evecs @ (np.exp(-1j * evals) * (evecs.T @ psi.amplitudes))
        assert np.max(np.abs(final - exact)) < 1e-4
        assert abs(np.linalg.norm(final) - 1.0) < 1e-10

    def check_w_state_invariance():
        n = 32
        h = build_hamiltonian(DisorderConfig(size=n, strength=0.0, seed=1))
        rec = evolve_record(h, InitialState.w(),
                            PropagatorConfig(dt=0.05, total_time=5.0,
                                             record_stride=10))
        assert np.max(np.abs(rec.avg_concurrence - 2.0 / n)) < 1e-10

    def check_localization_synthetic():
        n = 201
        xi = 10.0
        amps = np.exp(-np.abs(np.arange(n) - 100) / xi)
        rep = localization.localization_length(
            State(amps, normalize=True), BoundaryCondition.OPEN)
        assert abs(rep.length - xi) < 0.1 * xi
        assert rep.center == 100

    def check_fit_roundtrips():
        xs = np.linspace(0, 20, 41)
        single = fitting.fit_exp_single(xs, 3.0 * np.exp(-xs / 5.0) + 0.1)
        for key, want in (("B", 3.0), ("D", 5.0), ("A", 0.1)):
            assert abs(single.params[key] - want) <= 1e-6 * abs(want)
        xs2 = np.linspace(0, 2, 41)
        truth = (1.0, 0.3, 0.2, 3.0)
        ys2 = truth[0] * np.exp(-xs2 / truth[1]) + truth[2] * np.exp(-xs2 / truth[3])
        double = fitting.fit_exp_double(xs2, ys2)
        for key, want in zip(("B1", "D1", "B2", "D2"), truth):
            assert abs(double.params[key] - want) <= 1e-4 * abs(want)

    def check_sweep_determinism():
        cfg = SweepConfig(
            base=DisorderConfig(size=16, strength=0.0, seed=9),
            lambdas=(0.0, 0.5, 1.0),
            realizations=3,
            observable=Observable.avg_concurrence(),
        )
        serial = run_sweep(cfg, workers=None)
        parallel = run_sweep(cfg, workers=2)
        assert np.array_equal(serial.mean, parallel.mean)
        assert np.array_equal(serial.stderr, parallel.stderr)

    return [
        ("pair-sum identity", check_pair_sum_identity),
        ("free-ring baseline", check_free_ring_baseline),
        ("eigensolver vs dense", check_eigensolver_vs_dense),
        ("propagator oracle", check_propagator_oracle),
        ("w-state invariance", check_w_state_invariance),
        ("synthetic decay length", check_localization_synthetic),
        ("fit roundtrips", check_fit_roundtrips),
        ("sweep determinism", check_sweep_determinism),
    ]


def cmd_selfcheck(opts: dict) -> int:
    failures = 0
    for name, check in _selfcheck_checks():
        try:
            check()
        except Exception as exc:  # report every check, keep going
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok   {name}")
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


_HANDLERS = {
    "ground-scan": cmd_ground_scan,
    "nn-dist": cmd_nn_dist,
    "center-pair": cmd_center_pair,
    "critical-lambda": cmd_critical_lambda,
    "decay-profile": cmd_decay_profile,
    "evolve": cmd_evolve,
}


def _fail(kind: str, code: int, message: str) -> int:
    print(f"anderson-ent: error code={code} kind={kind}: {message}",
          file=sys.stderr)
    return code


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail("usage", EXIT_USAGE, str(exc))
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.command is None:
        return _fail("usage", EXIT_USAGE, "missing command")
    try:
        opts = _resolve(args.command, args)
        if args.command == "selfcheck":
            return cmd_selfcheck(opts)
        outputs = _HANDLERS[args.command](opts)
    except _CONFIG_ERRORS as exc:
        return _fail("config", EXIT_CONFIG, str(exc))
    except _NUMERIC_ERRORS as exc:
        return _fail("numeric", EXIT_NUMERIC, str(exc))
    except OSError as exc:
        return _fail("io", EXIT_IO, str(exc))
    for path in outputs:
        print(path)
    return EXIT_OK


def main() -> None:
    sys.exit(cli_main())
