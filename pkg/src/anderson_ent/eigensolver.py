"""Low-lying eigenpairs of the disordered chain in O(N) per pair.

Eigenvalues are located by bisection on an inertia count (Sturm-style
pivot signs for open chains, the same sweep with corner fill-in for
periodic ones), then eigenvectors come from inverse iteration.  Shifted
solves use a banded LU; the periodic corners enter as a rank-one
Sherman-Morrison correction on top of the tridiagonal solve, so no step
ever materializes a dense matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from . import _tridiag
from .errors import ConfigError, ConvergenceError, NumericalError
from .lattice import Hamiltonian
from .state import State

__all__ = ["EigenPair", "ground_state", "lowest_k"]

#: Absolute bisection width for eigenvalue brackets.
BISECT_TOL = 1e-12
#: Inverse-iteration cap per eigenpair.
MAX_ITER = 200
#: Residual targets relative to the Hamiltonian scale (max|V| + 2t).
RESIDUAL_TARGET = 1e-12
RESIDUAL_ACCEPT = 1e-8

_START_SEED = 0x1A77ACE


@dataclass(frozen=True)
class EigenPair:
    """An eigenvalue with its normalized real eigenvector (as a State)."""

    energy: float
    state: State


class _ShiftedSolver:
    """Solves (H - sigma*I) x = b reusing one banded factorization setup.

    For periodic chains, H - sigma*I = T + c*u*u^T with T tridiagonal,
    u = e_0 + e_{N-1} and c = -t, so two tridiagonal solves and the
    Sherman-Morrison identity recover the cyclic solution.
    """

    def __init__(self, h: Hamiltonian, sigma: float):
        n = h.size
        t = h.hopping
        ab = np.zeros((3, n))
        ab[0, 1:] = -t
        ab[2, :-1] = -t
        ab[1] = h.potentials - sigma
        self._corr = None
        if h.periodic:
            c = -t
            ab[1, 0] -= c
            ab[1, -1] -= c
            u = np.zeros(n)
            u[0] = 1.0
            u[-1] = 1.0
            z = solve_banded((1, 1), ab, u)
            denom = 1.0 + c * (z[0] + z[-1])
            if abs(denom) < 1e-300:
                raise NumericalError("singular Sherman-Morrison denominator")
            self._corr = (c, z, denom)
        self._ab = ab

    def solve(self, b: np.ndarray) -> np.ndarray:
        x = solve_banded((1, 1), self._ab, b)
        if self._corr is not None:
            c, z, denom = self._corr
            x = x - (c * (x[0] + x[-1]) / denom) * z
        return x


def _dense_pair_2x2(h: Hamiltonian, index: int) -> tuple[float, np.ndarray]:
    # closed form for the two-site ring (double bond -2t) and open dimer
    v0, v1 = h.potentials
    b = -2.0 * h.hopping if h.periodic else -h.hopping
    half = 0.5 * (v0 + v1)
    rad = np.hypot(0.5 * (v0 - v1), b)
    energy = half - rad if index == 0 else half + rad
    vec = np.array([b, energy - v0])
    nrm = np.linalg.norm(vec)
    if nrm == 0.0:  # b == 0 impossible (t > 0), kept for safety
        vec = np.array([1.0, 0.0]) if index == 0 else np.array([0.0, 1.0])
    else:
        vec /= nrm
    return float(energy), vec


def _bisect(h: Hamiltonian, index: int) -> float:
    """Locate the ``index``-th smallest eigenvalue to BISECT_TOL width."""
    pot = h.potentials
    t = h.hopping
    lo = float(pot.min() - 2.0 * t - 1e-6)
    hi = float(pot.max() + 2.0 * t + 1e-6)
    periodic = h.periodic
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at float resolution
            break
        if _tridiag.count_below(pot, t, mid, periodic) >= index + 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _inverse_iteration(h: Hamiltonian, sigma: float, prev: list[np.ndarray],
                       rng: np.random.Generator):
    """Converge the eigenvector at shift ``sigma``; returns (energy, vec, res, it)."""
    n = h.size
    scale = h.scale
    target = RESIDUAL_TARGET * scale
    accept = RESIDUAL_ACCEPT * scale

    solver = None
    shift = sigma
    for attempt in range(4):
        try:
            solver = _ShiftedSolver(h, shift)
            break
        except (np.linalg.LinAlgError, NumericalError):
            shift += (attempt + 1) * 16 * BISECT_TOL * max(1.0, scale)
    if solver is None:
        raise NumericalError(f"shifted solve failed near sigma={sigma!r}")

    x = rng.standard_normal(n)
    for p in prev:
        x -= (p @ x) * p
    x /= np.linalg.norm(x)

    best_res = np.inf
    best = (sigma, x)
    iterations = 0
    for it in range(1, MAX_ITER + 1):
        iterations = it
        try:
            y = solver.solve(x)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"inverse-iteration solve broke down: {exc}")
        for p in prev:
            y -= (p @ y) * p
        nrm = np.linalg.norm(y)
        if not np.isfinite(nrm) or nrm < 1e-280:
            # start direction was (numerically) inside span(prev); retry
            x = rng.standard_normal(n)
            for p in prev:
                x -= (p @ x) * p
            x /= np.linalg.norm(x)
            continue
        x = y / nrm
        hx = h.apply(x)
        theta = float(x @ hx)
        res = float(np.linalg.norm(hx - theta * x))
        if res < best_res:
            best_res = res
            best = (theta, x.copy())
        if res <= target:
            break

    if best_res > accept:
        raise ConvergenceError(
            f"inverse iteration stalled at residual {best_res:.3e} "
            f"(accept {accept:.3e})",
            sigma=sigma, residual=best_res, iterations=iterations,
        )
    theta, x = best
    return theta, x, best_res, iterations


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    # make the largest-|amplitude| entry positive; argmax breaks ties low
    if vec[int(np.argmax(np.abs(vec)))] < 0:
        return -vec
    return vec


def lowest_k(h: Hamiltonian, k: int) -> list[EigenPair]:
    """The ``k`` lowest eigenpairs, energies nondecreasing.

    Eigenvectors are pairwise orthonormal; inside degenerate clusters the
    basis returned is one valid orthonormal choice.  The sign convention
    makes each vector's largest-magnitude amplitude positive.

    Raises
    ------
    ConfigError
        If ``k`` is outside [1, size].
    ConvergenceError
        If inverse iteration cannot reach its residual tolerance.
    """
    if not isinstance(h, Hamiltonian):
        raise ConfigError("lowest_k expects a Hamiltonian")
    if int(k) != k or not 1 <= k <= h.size:
        raise ConfigError(f"k must be in [1, {h.size}], got {k}")
    k = int(k)

    if h.size == 2:
        pairs = []
        for m in range(k):
            energy, vec = _dense_pair_2x2(h, m)
            pairs.append(EigenPair(energy, State(_fix_sign(vec))))
        return pairs

    vectors: list[np.ndarray] = []
    energies: list[float] = []
    for m in range(k):
        sigma = _bisect(h, m)
        rng = np.random.default_rng(_START_SEED + m)
        theta, vec, _res, _its = _inverse_iteration(h, sigma, vectors, rng)
        # explicit re-orthonormalization keeps clusters mutually orthogonal
        for p in vectors:
            vec -= (p @ vec) * p
        vec /= np.linalg.norm(vec)
        vectors.append(vec)
        energies.append(theta)

    order = np.argsort(np.array(energies), kind="stable")
    return [
        EigenPair(energies[i], State(_fix_sign(vectors[i]))) for i in order
    ]


def ground_state(h: Hamiltonian) -> EigenPair:
    """The minimal-energy eigenpair of ``h``."""
    return lowest_k(h, 1)[0]
