"""Inertia counts for symmetric tridiagonal and cyclic-tridiagonal matrices.

Both kernels run the LDL^T pivot recurrence at a trial shift sigma and
return how many pivots go negative, which by Sylvester's law equals the
number of eigenvalues strictly below sigma.  The cyclic variant carries
the last-row fill-in of the corner couplings along with the sweep, so a
single O(N) pass also covers periodic chains.  Near-zero pivots are
replaced by -PIVMIN (the LAPACK convention), which only blurs counts
within a vanishing neighborhood of exact eigenvalues of leading minors.
"""

import numba
import numpy as np

#: Pivot floor; divisions by it stay comfortably inside float64 range.
PIVMIN = 1e-150

_UCAP = 1e100


@numba.njit(cache=True)
def tridiag_count(diag, t, sigma):
    """Eigenvalues < sigma of tridiag(diag, off=-t)."""
    n = diag.size
    count = 0
    d = diag[0] - sigma
    if abs(d) < PIVMIN:
        d = -PIVMIN
    if d < 0.0:
        count += 1
    tt = t * t
    for i in range(1, n):
        d = (diag[i] - sigma) - tt / d
        if abs(d) < PIVMIN:
            d = -PIVMIN
        if d < 0.0:
            count += 1
    return count


@numba.njit(cache=True)
def cyclic_count(diag, t, sigma):
    """Eigenvalues < sigma of the periodic chain (tridiagonal + corners)."""
    n = diag.size
    b = -t
    if n == 2:
        # ring of two sites: the corner merges with the bond, coupling -2t
        d = diag[0] - sigma
        if abs(d) < PIVMIN:
            d = -PIVMIN
        neg = 1 if d < 0.0 else 0
        s = (diag[1] - sigma) - (4.0 * t * t) / d
        if s < 0.0:
            neg += 1
        return neg
    neg = 0
    d = diag[0] - sigma
    if abs(d) < PIVMIN:
        d = -PIVMIN
    if d < 0.0:
        neg += 1
    u = b  # running component of L^{-1} applied to the border column
    s = (diag[n - 1] - sigma) - u * u / d
    prev_u = u
    prev_d = d
    for i in range(1, n - 1):
        d = (diag[i] - sigma) - (b * b) / prev_d
        if abs(d) < PIVMIN:
            d = -PIVMIN
        if d < 0.0:
            neg += 1
        u = -(b / prev_d) * prev_u
        if i == n - 2:
            u += b
        if abs(u) > _UCAP:
            u = _UCAP if u > 0 else -_UCAP
        s -= u * u / d
        prev_u = u
        prev_d = d
    if s < 0.0:
        neg += 1
    return neg


def count_below(potentials: np.ndarray, hopping: float, sigma: float,
                periodic: bool) -> int:
    """Number of Hamiltonian eigenvalues strictly below ``sigma``."""
    if periodic:
        return int(cyclic_count(potentials, hopping, sigma))
    return int(tridiag_count(potentials, hopping, sigma))
