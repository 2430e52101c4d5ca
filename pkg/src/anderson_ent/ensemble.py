"""Disorder-ensemble sweeps over strength grids, with deterministic parallelism.

Every (strength, realization) cell derives its own seed from the master
seed by hashing, builds its Hamiltonian, evaluates one observable on the
ground state (or runs an evolution), and the results are placed into a
preallocated array slot.  Aggregation therefore never depends on worker
count or scheduling order: a sweep is bit-identical serial or parallel.
"""

from __future__ import annotations

import hashlib
import logging
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import entanglement, localization
from .dynamics import InitialState, PropagatorConfig, evolve_record
from .eigensolver import ground_state
from .errors import (
    ConfigError,
    ConvergenceError,
    ExtendedStateError,
    InsufficientDataError,
    NumericalError,
)
from .fitting import FitResult, fit_exp_single, find_interior_max
from .lattice import BoundaryCondition, DisorderConfig, build_hamiltonian

__all__ = [
    "Observable",
    "SweepConfig",
    "SweepResult",
    "CriticalLambdaResult",
    "child_seed",
    "run_sweep",
    "run_critical_lambda",
    "locate_peak",
]

log = logging.getLogger(__name__)

#: Errors that mark a single cell as failed instead of aborting the sweep.
_CELL_ERRORS = (ConvergenceError, NumericalError, InsufficientDataError,
                ExtendedStateError)

#: Amplitude floor used for ensemble localization-length cells.  Less
#: strict than the single-state default: amplitudes below ~1e-8 can sit on
#: resonant secondary islands whose flat log-slope wrecks the regression.
ENSEMBLE_LENGTH_FLOOR = 1e-8


def child_seed(master_seed: int, strength_index: int, realization: int) -> int:
    """Per-cell seed: SHA-256 of the little-endian (master, k, r) triple.

    The first 8 digest bytes, read little-endian, become the seed.  This
    derivation is part of the package contract and must not change
    between releases; it keeps sweeps reproducible across machines and
    any parallel schedule.
    """
    packed = struct.pack(
        "<QQQ", int(master_seed) & (2**64 - 1), strength_index, realization
    )
    digest = hashlib.sha256(packed).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class Observable:
    """What to measure per realization.

    Use the constructors; ``kind`` is one of ``avg_concurrence``,
    ``nn_profile``, ``center_pair``, ``center_profile``,
    ``localization_length`` or ``dynamics``.
    """

    kind: str
    offsets: tuple[int, ...] = (1,)
    max_offset: int | None = None
    floor: float = ENSEMBLE_LENGTH_FLOOR
    propagator: PropagatorConfig | None = None
    initial: InitialState | None = None

    @classmethod
    def avg_concurrence(cls) -> "Observable":
        return cls(kind="avg_concurrence")

    @classmethod
    def nn_profile(cls) -> "Observable":
        return cls(kind="nn_profile")

    @classmethod
    def center_pair(cls, *offsets: int) -> "Observable":
        """Concurrence between the localization center and center+offset."""
        offs = tuple(int(j) for j in offsets) or (1,)
        if any(j < 1 for j in offs):
            raise ConfigError("center_pair offsets must be >= 1")
        return cls(kind="center_pair", offsets=offs)

    @classmethod
    def center_profile(cls, max_offset: int | None = None) -> "Observable":
        return cls(kind="center_profile", max_offset=max_offset)

    @classmethod
    def localization_length(cls, floor: float = ENSEMBLE_LENGTH_FLOOR) -> "Observable":
        return cls(kind="localization_length", floor=floor)

    @classmethod
    def dynamics(cls, propagator: PropagatorConfig,
                 initial: InitialState) -> "Observable":
        return cls(kind="dynamics", propagator=propagator, initial=initial)


@dataclass(frozen=True)
class SweepConfig:
    """A strength grid, a realization count, and one observable.

    ``base.seed`` is the master seed; ``base.strength`` is ignored in
    favor of the grid.
    """

    base: DisorderConfig
    lambdas: tuple[float, ...]
    realizations: int
    observable: Observable

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        if len(lams) == 0:
            raise ConfigError("lambdas must be nonempty")
        if any(v < 0 for v in lams):
            raise ConfigError("lambdas must be nonnegative")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ConfigError("lambdas must be strictly increasing")
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise ConfigError("realizations must be a positive integer")
        object.__setattr__(self, "lambdas", lams)
        kind = self.observable.kind
        if kind in ("center_profile",) and \
                self.base.boundary is not BoundaryCondition.PERIODIC:
            # offsets wrap around the ring so every realization shares one axis
            raise ConfigError("center_profile sweeps require periodic boundaries")


@dataclass(frozen=True)
class SweepResult:
    """Ensemble means and standard errors on a common axis.

    For scalar observables ``axis`` is the strength grid and ``mean`` is
    1-D.  For profile and time-series observables ``axis`` is the
    site/offset/time axis and ``mean[k]`` is the row for ``lambdas[k]``.
    ``counts[k]`` is the number of realizations that succeeded; failed
    cells are excluded from the statistics.
    """

    axis: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    realizations: int
    counts: np.ndarray
    config: SweepConfig

    @property
    def lambdas(self) -> np.ndarray:
        return np.asarray(self.config.lambdas)


def _dynamics_axis(cfg: PropagatorConfig) -> np.ndarray:
    n_steps = cfg.n_steps
    ks = list(range(0, n_steps + 1, cfg.record_stride))
    if ks[-1] != n_steps:
        ks.append(n_steps)
    return np.asarray([k * cfg.dt for k in ks])


def _observable_axis(cfg: SweepConfig) -> np.ndarray:
    obs = cfg.observable
    n = cfg.base.size
    if obs.kind == "nn_profile":
        length = n if cfg.base.boundary is BoundaryCondition.PERIODIC else n - 1
        return np.arange(length)
    if obs.kind == "center_pair":
        return np.asarray(obs.offsets, dtype=np.int64)
    if obs.kind == "center_profile":
        jmax = obs.max_offset or min(n // 2 - 1, 400)
        if not 1 <= jmax <= n // 2 - 1:
            raise ConfigError(f"max_offset must be in [1, {n // 2 - 1}]")
        return np.concatenate([np.arange(-jmax, 0), np.arange(1, jmax + 1)])
    if obs.kind == "dynamics":
        return _dynamics_axis(obs.propagator)
    return np.asarray(cfg.lambdas)  # scalar observables


def _evaluate_cell(task) -> np.ndarray:
    """Observable value for one (strength, realization) cell; 1-D array."""
    cfg, k, r = task
    lam = cfg.lambdas[k]
    seed = child_seed(cfg.base.seed, k, r)
    h = build_hamiltonian(cfg.base.with_(strength=lam, seed=seed))
    obs = cfg.observable
    if obs.kind == "dynamics":
        rec = evolve_record(h, obs.initial, obs.propagator)
        return rec.avg_concurrence
    s = ground_state(h).state
    if obs.kind == "avg_concurrence":
        return np.array([entanglement.average_concurrence(s)])
    if obs.kind == "nn_profile":
        return entanglement.nn_profile(s, cfg.base.boundary)
    if obs.kind == "center_pair":
        a = np.abs(s.amplitudes)
        i0 = localization.localization_center(s)
        n = h.size
        vals = np.empty(len(obs.offsets))
        for idx, j in enumerate(obs.offsets):
            if h.periodic:
                partner = (i0 + j) % n
            else:
                partner = i0 + j if i0 + j < n else i0 - j
                if partner < 0:
                    raise NumericalError(
                        f"offset {j} leaves the open lattice from center {i0}"
                    )
            vals[idx] = 2.0 * a[i0] * a[partner]
        return vals
    if obs.kind == "center_profile":
        a = np.abs(s.amplitudes)
        i0 = localization.localization_center(s)
        jmax = obs.max_offset or min(h.size // 2 - 1, 400)
        offs = np.concatenate([np.arange(-jmax, 0), np.arange(1, jmax + 1)])
        return 2.0 * a[i0] * a[(i0 + offs) % h.size]
    if obs.kind == "localization_length":
        report = localization.localization_length(
            s, cfg.base.boundary, floor=obs.floor
        )
        return np.array([report.length])
    raise ConfigError(f"unknown observable kind {obs.kind!r}")


def _evaluate_cell_safe(task):
    try:
        return _evaluate_cell(task), None
    except _CELL_ERRORS as exc:
        return None, f"{type(exc).__name__}: {exc}"


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    """Run the sweep, optionally on a process pool of ``workers``.

    Cell failures (non-convergence, extended states, solver breakdown)
    are logged and excluded; a strength with zero surviving realizations
    raises NumericalError.  Results are identical for any worker count.
    """
    lambdas = cfg.lambdas
    n_lam = len(lambdas)
    reps = int(cfg.realizations)
    axis = _observable_axis(cfg)
    width = 1 if cfg.observable.kind in ("avg_concurrence",
                                         "localization_length") else axis.size

    tasks = [(cfg, k, r) for k in range(n_lam) for r in range(reps)]
    values = np.full((n_lam, reps, width), np.nan)
    failures: list[str] = []
    if workers is not None and workers > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (int(workers) * 8))
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            results = list(pool.map(_evaluate_cell_safe, tasks, chunksize=chunk))
    else:
        results = [_evaluate_cell_safe(t) for t in tasks]
    for (task, (value, err)) in zip(tasks, results):
        _, k, r = task
        if value is None:
            failures.append(f"lambda={lambdas[k]:g} r={r}: {err}")
        else:
            values[k, r, :] = value

    if failures:
        log.warning("sweep: %d/%d cells failed (%s%s)", len(failures),
                    len(tasks), failures[0],
                    ", ..." if len(failures) > 1 else "")
    ok = np.isfinite(values[:, :, 0])
    counts = ok.sum(axis=1)
    if np.any(counts == 0):
        k_bad = int(np.argmin(counts))
        raise NumericalError(
            f"all {reps} realizations failed at lambda={lambdas[k_bad]:g}; "
            f"first error: {failures[0] if failures else 'unknown'}"
        )
    mean = np.empty((n_lam, width))
    stderr = np.zeros((n_lam, width))
    for k in range(n_lam):
        rows = values[k, ok[k], :]
        mean[k] = rows.mean(axis=0)
        if rows.shape[0] > 1:
            stderr[k] = rows.std(axis=0, ddof=1) / np.sqrt(rows.shape[0])
    if cfg.observable.kind in ("avg_concurrence", "localization_length"):
        mean = mean[:, 0]
        stderr = stderr[:, 0]
    return SweepResult(
        axis=axis,
        mean=mean,
        stderr=stderr,
        realizations=reps,
        counts=counts,
        config=cfg,
    )


def locate_peak(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float, bool]:
    """Peak of a sampled curve, degrading gracefully on short grids.

    Grids of five or more points go through the quadratic interior-max
    locator; shorter ones return the discrete argmax, flagged interior
    only when strictly inside the grid.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size >= 5:
        return find_interior_max(xs, ys)
    m = int(np.argmax(ys))
    interior = 0 < m < xs.size - 1
    return float(xs[m]), float(ys[m]), interior


@dataclass(frozen=True)
class CriticalLambdaResult:
    """Peak strengths of center-pair concurrence per offset, plus a fit.

    ``fit`` is the single-exponential fit of lambda_c against offset
    (None when fewer than four offsets are available), and ``curves`` the
    underlying ensemble-mean sweep.
    """

    offsets: np.ndarray
    lambda_c: np.ndarray
    peak_value: np.ndarray
    is_interior: np.ndarray
    fit: FitResult | None
    curves: SweepResult


def run_critical_lambda(
    base: DisorderConfig,
    offsets,
    lambdas,
    realizations: int,
    workers: int | None = None,
) -> CriticalLambdaResult:
    """Locate the concurrence-maximizing strength for each center offset.

    One sweep evaluates every offset on the same realizations, the
    ensemble-mean curve per offset is peak-located, and lambda_c(offset)
    is fitted with a single exponential when enough offsets exist.
    """
    offsets = tuple(int(j) for j in offsets)
    if len(offsets) == 0 or any(j < 1 for j in offsets):
        raise ConfigError("offsets must be a nonempty list of integers >= 1")
    cfg = SweepConfig(
        base=base,
        lambdas=tuple(float(v) for v in lambdas),
        realizations=realizations,
        observable=Observable.center_pair(*offsets),
    )
    sweep = run_sweep(cfg, workers=workers)
    lams = sweep.lambdas
    lam_c = np.empty(len(offsets))
    peak = np.empty(len(offsets))
    interior = np.empty(len(offsets), dtype=bool)
    for idx in range(len(offsets)):
        lam_c[idx], peak[idx], interior[idx] = locate_peak(lams, sweep.mean[:, idx])
    fit = None
    if len(offsets) >= 4:
        fit = fit_exp_single(np.asarray(offsets, dtype=float), lam_c)
    return CriticalLambdaResult(
        offsets=np.asarray(offsets),
        lambda_c=lam_c,
        peak_value=peak,
        is_interior=interior,
        fit=fit,
        curves=sweep,
    )
