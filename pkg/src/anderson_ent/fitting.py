"""Least-squares fits: lines, exponential decays, and peak location.

The nonlinear fits run a Levenberg-Marquardt loop with analytic
Jacobians and Marquardt diagonal scaling.  The damping factor divides by
10 on an accepted step and multiplies by 10 on a rejected one, starting
from 1e-3; convergence means the gradient norm drops below 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = [
    "FitResult",
    "linear_fit",
    "fit_exp_single",
    "fit_exp_double",
    "find_interior_max",
]

GRADIENT_TOL = 1e-10
MAX_LM_ITER = 500
_DAMPING_INIT = 1e-3
_DAMPING_MAX = 1e14


@dataclass(frozen=True)
class FitResult:
    """Named parameters plus residual and convergence diagnostics."""

    params: dict[str, float]
    residual_norm: float
    r2: float
    converged: bool
    iterations: int = 0

    def __getitem__(self, name: str) -> float:
        return self.params[name]


def _r_squared(ys: np.ndarray, residuals: np.ndarray) -> float:
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    ss_res = float(np.sum(residuals**2))
    if ss_tot == 0.0:
        return 1.0 if ss_res < 1e-28 else 0.0
    return 1.0 - ss_res / ss_tot


def _as_xy(xs, ys):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise DataError("xs and ys must be 1-D arrays of equal length")
    if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
        raise DataError("fit data must be finite")
    return xs, ys


def linear_fit(xs, ys) -> FitResult:
    """Ordinary least squares y = slope*x + intercept."""
    xs, ys = _as_xy(xs, ys)
    if xs.size < 2 or np.all(xs == xs[0]):
        raise DataError("linear fit needs at least two distinct x values")
    xm = xs.mean()
    ym = ys.mean()
    dx = xs - xm
    slope = float(np.dot(dx, ys - ym) / np.dot(dx, dx))
    intercept = float(ym - slope * xm)
    resid = ys - (slope * xs + intercept)
    return FitResult(
        params={"slope": slope, "intercept": intercept},
        residual_norm=float(np.linalg.norm(resid)),
        r2=_r_squared(ys, resid),
        converged=True,
        iterations=0,
    )


def _levenberg_marquardt(model, p0, n_data):
    """Minimize ||r(p)||^2 given model(p) -> (residuals, jacobian)."""
    p = np.asarray(p0, dtype=np.float64).copy()
    r, jac = model(p)
    cost = 0.5 * float(np.dot(r, r))
    damping = _DAMPING_INIT
    iterations = 0
    converged = False
    while iterations < MAX_LM_ITER:
        iterations += 1
        grad = jac.T @ r
        if np.linalg.norm(grad) < GRADIENT_TOL:
            converged = True
            break
        normal = jac.T @ jac
        scaling = np.diag(np.maximum(np.diag(normal), 1e-300))
        try:
            step = np.linalg.solve(normal + damping * scaling, -grad)
        except np.linalg.LinAlgError:
            damping *= 10.0
            if damping > _DAMPING_MAX:
                break
            continue
        p_try = p + step
        r_try, jac_try = model(p_try)
        cost_try = 0.5 * float(np.dot(r_try, r_try))
        if np.isfinite(cost_try) and cost_try < cost:
            p, r, jac, cost = p_try, r_try, jac_try, cost_try
            damping = max(damping / 10.0, 1e-15)
        else:
            damping *= 10.0
            if damping > _DAMPING_MAX:
                break
    else:
        converged = bool(np.linalg.norm(jac.T @ r) < GRADIENT_TOL)
    return p, r, converged, iterations


def _single_exp_model(xs, ys):
    def model(p):
        b, d, a = p
        if d <= 0 or not np.isfinite(d):
            return np.full(xs.size, 1e150), np.zeros((xs.size, 3))
        decay = np.exp(-xs / d)
        resid = b * decay + a - ys
        jac = np.column_stack([decay, b * decay * xs / (d * d), np.ones(xs.size)])
        return resid, jac

    return model


def _double_exp_model(xs, ys):
    def model(p):
        b1, d1, b2, d2 = p
        if d1 <= 0 or d2 <= 0 or not (np.isfinite(d1) and np.isfinite(d2)):
            return np.full(xs.size, 1e150), np.zeros((xs.size, 4))
        e1 = np.exp(-xs / d1)
        e2 = np.exp(-xs / d2)
        resid = b1 * e1 + b2 * e2 - ys
        jac = np.column_stack(
            [e1, b1 * e1 * xs / (d1 * d1), e2, b2 * e2 * xs / (d2 * d2)]
        )
        return resid, jac

    return model


def _log_linear_guess(xs, ys):
    """Initial (B, D, A) from a line through log(ys - min)."""
    a0 = float(ys.min())
    shifted = ys - a0
    span = float(xs.max() - xs.min())
    usable = shifted > max(1e-300, shifted.max() * 1e-14)
    d0 = span / 3.0 if span > 0 else 1.0
    b0 = float(ys.max() - ys.min())
    if int(usable.sum()) >= 2 and np.unique(xs[usable]).size >= 2:
        line = linear_fit(xs[usable], np.log(shifted[usable]))
        if line.params["slope"] < 0:
            d0 = -1.0 / line.params["slope"]
            b0 = float(np.exp(line.params["intercept"]))
    return b0, d0, a0


def fit_exp_single(xs, ys) -> FitResult:
    """Fit y = B * exp(-x / D) + A.

    Needs at least four points and non-constant ys; the starting point
    comes from a log-linear fit of the offset-subtracted data.
    """
    xs, ys = _as_xy(xs, ys)
    if xs.size < 4:
        raise DataError("single-exponential fit needs at least 4 points")
    if np.all(ys == ys[0]):
        raise DataError("ys are constant; exponential fit is degenerate")
    p0 = _log_linear_guess(xs, ys)
    p, resid, converged, iterations = _levenberg_marquardt(
        _single_exp_model(xs, ys), p0, xs.size
    )
    return FitResult(
        params={"B": float(p[0]), "D": float(p[1]), "A": float(p[2])},
        residual_norm=float(np.linalg.norm(resid)),
        r2=_r_squared(ys, resid),
        converged=converged,
        iterations=iterations,
    )


def fit_exp_double(xs, ys) -> FitResult:
    """Fit y = B1 * exp(-x / D1) + B2 * exp(-x / D2), with D1 < D2.

    Runs a multistart over decade-spaced (D1, D2) pairs (10 starts); for
    each start the amplitudes are seeded by the exact linear
    least-squares solution at fixed decay constants.  The best residual
    wins and never raises on non-convergence: inspect ``converged``.
    """
    xs, ys = _as_xy(xs, ys)
    if xs.size < 6:
        raise DataError("double-exponential fit needs at least 6 points")
    span = float(xs.max() - xs.min())
    if span == 0.0:
        raise DataError("xs are all equal")
    decades = span * np.array([0.01, 0.1, 1.0, 10.0, 100.0])
    best = None
    model = _double_exp_model(xs, ys)
    for i in range(decades.size):
        for j in range(i + 1, decades.size):
            d1, d2 = decades[i], decades[j]
            basis = np.column_stack([np.exp(-xs / d1), np.exp(-xs / d2)])
            amps, *_ = np.linalg.lstsq(basis, ys, rcond=None)
            p0 = np.array([amps[0], d1, amps[1], d2])
            p, resid, converged, iterations = _levenberg_marquardt(model, p0, xs.size)
            cost = float(np.linalg.norm(resid))
            key = (not converged, cost)
            if best is None or key < best[0]:
                best = (key, p, resid, converged, iterations)
    _, p, resid, converged, iterations = best
    b1, d1, b2, d2 = (float(v) for v in p)
    if d1 > d2:
        b1, d1, b2, d2 = b2, d2, b1, d1
    return FitResult(
        params={"B1": b1, "D1": d1, "B2": b2, "D2": d2},
        residual_norm=float(np.linalg.norm(resid)),
        r2=_r_squared(ys, resid),
        converged=converged,
        iterations=iterations,
    )


def find_interior_max(xs, ys) -> tuple[float, float, bool]:
    """Peak of a sampled curve via a local quadratic through the argmax.

    Returns ``(x_star, y_star, is_interior)``.  An argmax at either end
    of the grid is reported as-is with ``is_interior=False``.
    """
    xs, ys = _as_xy(xs, ys)
    if xs.size < 5:
        raise DataError("interior-max location needs at least 5 points")
    if np.any(np.diff(xs) <= 0):
        raise DataError("xs must be strictly increasing")
    m = int(np.argmax(ys))
    if m == 0 or m == xs.size - 1:
        return float(xs[m]), float(ys[m]), False
    x3 = xs[m - 1:m + 2]
    y3 = ys[m - 1:m + 2]
    # exact parabola through three points; concavity a <= 0 since ys[m] is a max
    a, b, _c = np.polyfit(x3 - x3[1], y3, 2)
    if a >= 0.0 or not np.isfinite(a):
        return float(xs[m]), float(ys[m]), True
    x_star = float(x3[1] - b / (2.0 * a))
    x_star = float(np.clip(x_star, x3[0], x3[2]))
    y_star = float(np.polyval([a, b, _c], x_star - x3[1]))
    return x_star, y_star, True
