"""Hot numeric kernels with numba and pure-numpy implementations.

The only kernel worth compiling here is the zero-padded 3x3 multichannel
cross-correlation that the measurement filter applies seven times per probe;
matrix extraction calls it thousands of times. Both backends produce the same
values up to floating-point summation order. Selection happens per call via
backend.current().
"""

import numpy as np

from . import backend

if backend.have_numba():
    from numba import njit

    @njit(cache=True, nogil=True)
    def _conv3x3_njit(xpad, w, out):
        co, ci = w.shape[0], w.shape[1]
        h = xpad.shape[1] - 2
        wd = xpad.shape[2] - 2
        for o in range(co):
            for yy in range(h):
                for i in range(ci):
                    for dy in range(3):
                        c0 = w[o, i, dy, 0]
                        c1 = w[o, i, dy, 1]
                        c2 = w[o, i, dy, 2]
                        row = xpad[i, yy + dy]
                        for xx in range(wd):
                            out[o, yy, xx] += (c0 * row[xx] + c1 * row[xx + 1]
                                               + c2 * row[xx + 2])

    def _conv3x3_numba(x, w):
        ci, h, wd = x.shape
        xpad = np.zeros((ci, h + 2, wd + 2))
        xpad[:, 1:-1, 1:-1] = x
        out = np.zeros((w.shape[0], h, wd))
        _conv3x3_njit(xpad, np.ascontiguousarray(w), out)
        return out
else:  # pragma: no cover - exercised only when numba is absent
    _conv3x3_numba = None


def _conv3x3_numpy(x, w):
    ci, h, wd = x.shape
    xpad = np.zeros((ci, h + 2, wd + 2))
    xpad[:, 1:-1, 1:-1] = x
    win = np.lib.stride_tricks.sliding_window_view(xpad, (3, 3), axis=(1, 2))
    return np.tensordot(w, win, axes=([1, 2, 3], [0, 3, 4]))


def conv3x3(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Multichannel 3x3 cross-correlation, zero padded, stride 1.

    x: (c_in, H, W). w: (c_out, c_in, 3, 3). Returns (c_out, H, W) with
    out[o, y, x] = sum_{i, dy, dx} w[o, i, dy, dx] * x[i, y + dy - 1, x + dx - 1]
    and out-of-range input treated as zero.
    """
    if x.ndim != 3 or w.ndim != 4:
        raise ValueError("conv3x3 expects x (c,H,W) and w (o,c,3,3)")
    if w.shape[1] != x.shape[0] or w.shape[2:] != (3, 3):
        raise ValueError(f"weight shape {w.shape} does not match input {x.shape}")
    if backend.current() == "numba":
        return _conv3x3_numba(x, w)
    return _conv3x3_numpy(x, w)


def adjoint_weights(w: np.ndarray) -> np.ndarray:
    """Weights of the adjoint map: swap channel axes, flip both spatial axes."""
    return np.ascontiguousarray(w.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1])


def conv3x3_adjoint(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Adjoint of conv3x3(. , w) applied to g: (c_out, H, W) -> (c_in, H, W)."""
    return conv3x3(g, adjoint_weights(w))
