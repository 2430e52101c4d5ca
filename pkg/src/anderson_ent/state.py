"""Normalized one-particle amplitude vectors."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DimensionError

NORM_TOL = 1e-10


class State:
    """Complex amplitude vector of a one-particle state over lattice sites.

    The squared moduli sum to one.  Construction verifies the norm to
    within ``NORM_TOL`` (or rescales when ``normalize=True``) and freezes
    the underlying array, so instances are safe to share across threads.
    Site indices are 0-based throughout the package.
    """

    __slots__ = ("_amplitudes",)

    def __init__(self, amplitudes, normalize: bool = False):
        amps = np.array(amplitudes, dtype=np.complex128, copy=True)
        if amps.ndim != 1 or amps.size == 0:
            raise DimensionError("amplitudes must be a nonempty 1-D vector")
        nrm = np.linalg.norm(amps)
        if normalize:
            if nrm == 0.0 or not np.isfinite(nrm):
                raise ConfigError("cannot normalize a zero or non-finite vector")
            amps /= nrm
        elif abs(nrm - 1.0) > NORM_TOL:
            raise ConfigError(
                f"state norm {nrm:.17g} deviates from 1 by more than {NORM_TOL}"
            )
        amps.flags.writeable = False
        self._amplitudes = amps

    @property
    def amplitudes(self) -> np.ndarray:
        """Read-only complex128 array of site amplitudes."""
        return self._amplitudes

    @property
    def size(self) -> int:
        return self._amplitudes.size

    def __len__(self) -> int:
        return self._amplitudes.size

    def __repr__(self) -> str:
        return f"State(n={self.size})"

    @classmethod
    def delta(cls, n: int, site: int) -> "State":
        """Single-site excitation |site> (zero pairwise entanglement)."""
        if not 0 <= site < n:
            raise DimensionError(f"site {site} outside lattice of size {n}")
        amps = np.zeros(n, dtype=np.complex128)
        amps[site] = 1.0
        return cls(amps)

    @classmethod
    def w_state(cls, n: int) -> "State":
        """Uniform superposition 1/sqrt(n) * sum_i |i>, the concurrence maximizer."""
        if n < 1:
            raise DimensionError("w_state needs at least one site")
        return cls(np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128))
