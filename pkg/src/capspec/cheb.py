"""Chebyshev grids, rectangular collocation matrices, and coefficient transforms.

All routines work on second-kind Chebyshev points stored in ascending order,

    x_j = -cos(j*pi/(n-1)),   j = 0, ..., n-1,

so ``x[0] = -1`` marks the left boundary and ``x[-1] = +1`` the right one.
The rectangular matrices map data on an n-point grid to the (n-1)-point grid:
interpolate on n points, then sample (order 0) or differentiate and sample
(order 1) on n-1 points.  They are the building blocks of every collocated
operator in this package.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "chebpts",
    "bary_weights",
    "diffmat_rect",
    "eval_row",
    "resample",
    "resample_matrix",
    "cheb_coeffs",
    "cheb_values",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _chebpts_cached(n: int) -> np.ndarray:
    j = np.arange(n)
    # Sine form instead of -cos(j*pi/(n-1)): exactly antisymmetric in floating
    # point, and the midpoint of an odd grid is exactly 0.
    x = np.sin(np.pi * (2 * j - (n - 1)) / (2 * (n - 1)))
    return _readonly(x)


def chebpts(n: int) -> np.ndarray:
    """Second-kind Chebyshev points on [-1, 1] in ascending order.

    Parameters
    ----------
    n : int
        Number of points, at least 2.
    """
    if n < 2:
        raise ValueError(f"a Chebyshev grid needs at least 2 points, got n={n}")
    return _chebpts_cached(n)


@lru_cache(maxsize=None)
def _bary_weights_cached(n: int) -> np.ndarray:
    w = np.ones(n)
    w[1::2] = -1.0
    w[0] *= 0.5
    w[-1] *= 0.5
    return _readonly(w)


def bary_weights(n: int) -> np.ndarray:
    """Barycentric weights for the n-point second-kind grid (up to scaling)."""
    if n < 2:
        raise ValueError(f"a Chebyshev grid needs at least 2 points, got n={n}")
    return _bary_weights_cached(n)


@lru_cache(maxsize=None)
def _diff_square(n: int) -> np.ndarray:
    """Square differentiation matrix on chebpts(n)."""
    x = chebpts(n)
    w = bary_weights(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        D = (w[None, :] / w[:, None]) / (x[:, None] - x[None, :])
    np.fill_diagonal(D, 0.0)
    # negative-sum trick: rows of D annihilate constants
    np.fill_diagonal(D, -D.sum(axis=1))
    return _readonly(D)


def resample_matrix(n: int, targets: np.ndarray) -> np.ndarray:
    """Barycentric interpolation matrix from chebpts(n) to arbitrary targets.

    Row i maps samples on the n-point grid to the value of their degree-(n-1)
    interpolant at ``targets[i]``.  Rows for targets that coincide with grid
    points reduce to unit coordinate vectors.
    """
    x = chebpts(n)
    w = bary_weights(n)
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    diff = t[:, None] - x[None, :]
    hit_row, hit_col = np.nonzero(diff == 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = w[None, :] / diff
        P = ratio / ratio.sum(axis=1, keepdims=True)
    if hit_row.size:
        P[hit_row, :] = 0.0
        P[hit_row, hit_col] = 1.0
    return P


def _enforce_linear_exactness(M: np.ndarray, x: np.ndarray, c0: np.ndarray, c1: np.ndarray) -> None:
    """Nudge two entries per row so rows map 1 -> c0 and x -> c1 exactly.

    Extends the negative-sum idea to the rectangular case: the forming
    products leave O(n^2 * eps) residues on constants and linears, which would
    otherwise dominate the residual of exactly-flat states.  The corrections
    are of rounding size and go to the two largest entries of each row.
    """
    for i in range(M.shape[0]):
        e0 = M[i].sum() - c0[i]
        e1 = M[i] @ x - c1[i]
        j1, j2 = np.argsort(np.abs(M[i]))[-2:]
        det = x[j2] - x[j1]
        M[i, j1] -= (e0 * x[j2] - e1) / det
        M[i, j2] -= (e1 - e0 * x[j1]) / det


@lru_cache(maxsize=None)
def _rect_cached(n: int, order: int) -> np.ndarray:
    x = chebpts(n)
    y = chebpts(n - 1)
    P = resample_matrix(n, y)
    if order == 0:
        _enforce_linear_exactness(P, x, np.ones(n - 1), y)
        return _readonly(P)
    D = P @ _diff_square(n)
    _enforce_linear_exactness(D, x, np.zeros(n - 1), np.ones(n - 1))
    return _readonly(D)


def diffmat_rect(n: int, order: int) -> np.ndarray:
    """Rectangular (n-1) x n collocation matrix of the given derivative order.

    Order 0 is the spectral down-sampling matrix; order 1 differentiates the
    degree-(n-1) interpolant and samples it on the (n-1)-point grid.
    """
    if n < 2:
        raise ValueError(f"a Chebyshev grid needs at least 2 points, got n={n}")
    if order not in (0, 1):
        raise ValueError(f"unsupported derivative order {order}; expected 0 or 1")
    return _rect_cached(n, order)


def eval_row(n: int, tau0: float) -> np.ndarray:
    """Row vector evaluating the n-point interpolant at tau0 in [-1, 1]."""
    if not -1.0 <= tau0 <= 1.0:
        raise ValueError(f"evaluation point {tau0} outside [-1, 1]")
    return resample_matrix(n, np.array([tau0]))[0]


def resample(values: np.ndarray, n_new: int) -> np.ndarray:
    """Resample grid data onto chebpts(n_new) by barycentric interpolation."""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    if n_new == n:
        return values.copy()
    return values @ resample_matrix(n, chebpts(n_new)).T


@lru_cache(maxsize=None)
def _cos_table(n: int) -> np.ndarray:
    # C[k, j] = cos(k*j*pi/(n-1)); symmetric
    N = n - 1
    kj = np.outer(np.arange(n), np.arange(n))
    return _readonly(np.cos(np.pi * kj / N))


def cheb_coeffs(values: np.ndarray) -> np.ndarray:
    """Chebyshev series coefficients of the interpolant on chebpts(n).

    Returns c such that ``sum_k c[k] T_k(x)`` interpolates ``values``.  Direct
    O(n^2) cosine transform; grids here stay small enough that a fast
    transform would not pay for itself.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        raise ValueError(f"a Chebyshev grid needs at least 2 points, got n={n}")
    N = n - 1
    f = values[::-1]  # transform convention indexes x_j = cos(j*pi/N)
    wj = np.ones(n)
    wj[0] = wj[-1] = 0.5
    c = (2.0 / N) * (_cos_table(n) @ (wj * f))
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def cheb_values(coeffs: np.ndarray) -> np.ndarray:
    """Evaluate a Chebyshev series on chebpts(n); inverse of cheb_coeffs."""
    coeffs = np.asarray(coeffs, dtype=float)
    n = coeffs.size
    if n < 2:
        raise ValueError(f"a Chebyshev grid needs at least 2 points, got n={n}")
    return (_cos_table(n) @ coeffs)[::-1]
