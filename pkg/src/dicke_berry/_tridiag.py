"""Sturm-sequence bisection and inverse iteration for symmetric tridiagonal matrices.

The matrix is given by its diagonal ``diag`` (length n) and the squares of its
off-diagonal ``off2`` (length n-1); inverse iteration also needs the signed
off-diagonal ``off``.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def sturm_count(diag, off2, x, pivmin):
    """Number of eigenvalues strictly below ``x``.

    Counts negative pivots of the LDL^T factorization of ``T - x I``.
    """
    n = diag.shape[0]
    d = diag[0] - x
    if abs(d) < pivmin:
        d = -pivmin
    count = 1 if d < 0.0 else 0
    for i in range(1, n):
        d = diag[i] - x - off2[i - 1] / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            count += 1
    return count


@njit(cache=True)
def gershgorin(diag, off2):
    n = diag.shape[0]
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += np.sqrt(off2[i - 1])
        if i < n - 1:
            r += np.sqrt(off2[i])
        lo = min(lo, diag[i] - r)
        hi = max(hi, diag[i] + r)
    return lo, hi


@njit(cache=True)
def bisect_eigenvalue(diag, off2, k, pivmin, max_iter):
    """Bracket the ``k``-th smallest eigenvalue (0-based) by bisection.

    Returns ``(lo, hi, iterations)`` with ``count(lo) <= k < count(hi)``.
    """
    lo, hi = gershgorin(diag, off2)
    width = max(abs(lo), abs(hi))
    lo -= 2.2e-16 * width + pivmin
    hi += 2.2e-16 * width + pivmin
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if hi - lo <= 4.4e-16 * max(abs(lo), abs(hi)):
            break
        if sturm_count(diag, off2, mid, pivmin) > k:
            hi = mid
        else:
            lo = mid
        it += 1
    return lo, hi, it


@njit(cache=True)
def shifted_solve(diag, off, sigma, b, pivmin):
    """Solve ``(T - sigma I) x = b`` by LDL^T without pivoting.

    Stable when ``sigma`` lies below the spectrum, where every pivot is positive.
    """
    n = diag.shape[0]
    d = np.empty(n)
    y = np.empty(n)
    d[0] = diag[0] - sigma
    if abs(d[0]) < pivmin:
        d[0] = pivmin
    y[0] = b[0]
    for i in range(1, n):
        l = off[i - 1] / d[i - 1]
        d[i] = diag[i] - sigma - l * off[i - 1]
        if abs(d[i]) < pivmin:
            d[i] = pivmin
        y[i] = b[i] - l * y[i - 1]
    x = np.empty(n)
    x[n - 1] = y[n - 1] / d[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = y[i] / d[i] - (off[i] / d[i]) * x[i + 1]
    return x


@njit(cache=True)
def inverse_iteration(diag, off, sigma, pivmin, max_iter, tol):
    """Eigenvector nearest ``sigma``; returns ``(vector, iterations, change)``."""
    n = diag.shape[0]
    x = np.ones(n) / np.sqrt(n)
    change = np.inf
    it = 0
    while it < max_iter:
        z = shifted_solve(diag, off, sigma, x, pivmin)
        nrm = np.sqrt(np.sum(z * z))
        z /= nrm
        # fix the overall sign against the largest component
        j = np.argmax(np.abs(z))
        if z[j] < 0.0:
            z = -z
        change = np.max(np.abs(z - x))
        x = z
        it += 1
        if change <= tol:
            break
    return x, it, change
