"""Orthonormal 2-D DCT, zig-zag coefficient ordering, seeded Gaussian matrices."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

from . import rng


def dct2(img: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II. Energy preserving: ||dct2(x)||_F = ||x||_F."""
    if img.ndim != 2:
        raise ValueError("dct2 expects a 2-D array")
    return scipy.fft.dctn(img, type=2, norm="ortho")


def idct2(coef: np.ndarray) -> np.ndarray:
    """Inverse (and adjoint) of dct2."""
    if coef.ndim != 2:
        raise ValueError("idct2 expects a 2-D array")
    return scipy.fft.idctn(coef, type=2, norm="ortho")


@dataclass(frozen=True)
class ZigZagOrder:
    """Anti-diagonal scan of an H x W grid, low frequencies first.

    indices[k] is the flat row-major position visited k-th; inverse undoes the
    gather, i.e. inverse[indices[k]] = k.
    """
    height: int
    width: int
    indices: np.ndarray
    inverse: np.ndarray


@lru_cache(maxsize=32)
def zigzag_order(height: int, width: int) -> ZigZagOrder:
    """Classical JPEG-style zig-zag, generalized to rectangles.

    Diagonal d = r + c runs d = 0 .. H+W-2; odd diagonals are walked with r
    increasing, even ones with r decreasing. Starts at (0, 0).
    """
    if height < 1 or width < 1:
        raise ValueError("zigzag_order needs positive dimensions")
    order = np.empty(height * width, dtype=np.int64)
    k = 0
    for d in range(height + width - 1):
        lo = max(0, d - width + 1)
        hi = min(d, height - 1)
        rows = range(lo, hi + 1) if d % 2 == 1 else range(hi, lo - 1, -1)
        for r in rows:
            order[k] = r * width + (d - r)
            k += 1
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    order.setflags(write=False)
    inv.setflags(write=False)
    return ZigZagOrder(height, width, order, inv)


@dataclass(frozen=True)
class GaussianMatrix:
    rows: int
    cols: int
    seed: int
    orthonormalized: bool
    entries: np.ndarray


@lru_cache(maxsize=8)
def _orthonormal_full(n: int, seed: int) -> np.ndarray:
    """Full n x n seeded Gaussian with rows orthonormalized in order.

    Single-pass modified Gram-Schmidt: normalize row i, then immediately
    project it out of all later rows. Cropping the first m rows of this matrix
    is what gaussian_matrix returns, so smaller row counts are exact prefixes
    of larger ones for the same (n, seed).
    """
    a = rng.normals(seed, n * n).reshape(n, n)
    for i in range(n):
        nrm = np.linalg.norm(a[i])
        if nrm == 0.0:
            raise ArithmeticError("zero row during orthonormalization")
        a[i] /= nrm
        if i + 1 < n:
            a[i + 1:] -= np.outer(a[i + 1:] @ a[i], a[i])
    a.setflags(write=False)
    return a


def gaussian_matrix(m: int, n: int, seed: int, orthonormalize: bool = True) -> GaussianMatrix:
    """m x n matrix of seeded standard normals, drawn row-major from the stream.

    With orthonormalize=True (requires m <= n) the rows are the first m rows of
    the orthonormalized full n x n draw, so A @ A.T = I_m to rounding error.
    Without it the raw entries are returned. Entries are read-only; copy before
    mutating.
    """
    if m < 0 or n < 1:
        raise ValueError(f"bad matrix shape ({m}, {n})")
    if orthonormalize:
        if m > n:
            raise ValueError(f"cannot orthonormalize {m} rows in dimension {n}")
        entries = _orthonormal_full(n, seed)[:m]
    else:
        entries = rng.normals(seed, m * n).reshape(m, n)
        entries.setflags(write=False)
    return GaussianMatrix(m, n, seed, orthonormalize, entries)
