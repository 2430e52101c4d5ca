"""Localization diagnostics: center, decay length, participation ratio.

The decay length comes from the exponential-envelope ansatz
|psi_i| ~ |psi_{i0}| * exp(-|i - i0| / xi): a least-squares line through
ln|psi_i| versus distance from the center, with slope -1/xi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fitting
from .errors import ExtendedStateError, InsufficientDataError
from .lattice import BoundaryCondition
from .state import State

__all__ = [
    "AMPLITUDE_FLOOR",
    "LocalizationReport",
    "localization_center",
    "participation_ratio",
    "localization_length",
]

#: Default amplitude floor; log of smaller values is numerical noise.
AMPLITUDE_FLOOR = 1e-12

#: Minimum number of sites above the floor for a meaningful regression.
MIN_USABLE_SITES = 8


@dataclass(frozen=True)
class LocalizationReport:
    """Summary of one state's localization.

    ``center`` is the argmax of |psi| (lowest index on ties), ``length``
    the fitted decay length xi > 0, ``fit_r2`` the regression coefficient
    of determination and ``participation_ratio`` the fit-free effective
    site count 1 / sum |psi_i|^4, between 1 (delta) and N (uniform).
    """

    center: int
    length: float
    fit_r2: float
    participation_ratio: float


def localization_center(s: State) -> int:
    """Site of maximal |psi| (0-based); ties resolve to the lowest index."""
    return int(np.argmax(np.abs(s.amplitudes)))


def participation_ratio(s: State) -> float:
    a2 = np.abs(s.amplitudes) ** 2
    return float(1.0 / np.sum(a2 * a2))


def localization_length(
    s: State,
    boundary: BoundaryCondition = BoundaryCondition.PERIODIC,
    floor: float = AMPLITUDE_FLOOR,
) -> LocalizationReport:
    """Fit the exponential envelope of ``s`` around its center.

    Sites with |psi_i| <= ``floor`` are excluded from the regression.
    Distances fold both sides of the center together and, for PERIODIC
    chains, use the shorter arc around the ring.

    Raises
    ------
    InsufficientDataError
        Fewer than 8 sites lie above the amplitude floor.
    ExtendedStateError
        The regression slope is >= 0, i.e. the state does not decay.
    """
    a = np.abs(s.amplitudes)
    n = s.size
    i0 = localization_center(s)
    dist = np.abs(np.arange(n) - i0).astype(np.float64)
    if boundary is BoundaryCondition.PERIODIC:
        dist = np.minimum(dist, n - dist)
    usable = a > floor
    if int(usable.sum()) < MIN_USABLE_SITES:
        raise InsufficientDataError(
            f"only {int(usable.sum())} sites above floor {floor:g}; "
            f"need {MIN_USABLE_SITES}"
        )
    fit = fitting.linear_fit(dist[usable], np.log(a[usable]))
    slope = fit.params["slope"]
    if slope >= 0.0:
        raise ExtendedStateError(
            f"log-amplitude slope {slope:.3e} is nonnegative (extended state)"
        )
    return LocalizationReport(
        center=i0,
        length=-1.0 / slope,
        fit_r2=fit.r2,
        participation_ratio=participation_ratio(s),
    )
