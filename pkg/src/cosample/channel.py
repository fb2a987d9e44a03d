"""Measurement degradation: additive Gaussian noise and coarse quantization.

Noise levels follow 8-bit image conventions: sigma is quoted on the 0..255
scale and applied as sigma / 255 on the unit-range measurements. Quantization
depth q = 32 means full precision (bit-exact pass-through), q = 1 is a sign
quantizer scaled by the mean amplitude, and 2 <= q <= 31 is a uniform
mid-rise quantizer over the empirical range with 2^q levels.
"""

import numpy as np

from . import rng


def add_awgn(y: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """y + n with n ~ N(0, (sigma/255)^2) from the seeded stream; sigma = 0 copies."""
    y = np.asarray(y, dtype=np.float64).ravel()
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0.0:
        return y.copy()
    return y + rng.normals(seed, y.size) * (sigma / 255.0)


def quantizer_params(y: np.ndarray, qbits: int) -> dict:
    """The data-dependent constants quantize() would derive for this input.

    Recording these alongside a degraded measurement lets a later pass (or an
    idempotence check) reuse the exact same quantizer: quantizing twice with
    the same parameters is the identity on the second pass.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size == 0:
        raise ValueError("empty measurement vector")
    if qbits == 32:
        return {}
    if qbits == 1:
        return {"alpha": float(np.mean(np.abs(y)))}
    if 2 <= qbits <= 31:
        return {"lo": float(np.min(y)), "hi": float(np.max(y))}
    raise ValueError(f"qbits must be 1..32, got {qbits}")


def quantize(y: np.ndarray, qbits: int, lo: float = None, hi: float = None,
             alpha: float = None) -> np.ndarray:
    """Quantize a measurement vector to qbits of depth.

    q = 32: exact copy. q = 1: sign(y) * alpha with alpha defaulting to
    mean |y| and sign(0) counted positive. Otherwise: uniform mid-rise over
    [lo, hi] (defaults: empirical min / max) with 2^q levels, each value
    replaced by its level midpoint; a degenerate lo == hi returns the input
    unchanged.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size == 0:
        raise ValueError("empty measurement vector")
    if qbits == 32:
        return y.copy()
    if qbits == 1:
        a = float(np.mean(np.abs(y))) if alpha is None else float(alpha)
        return np.where(y >= 0.0, a, -a)
    if not 2 <= qbits <= 31:
        raise ValueError(f"qbits must be 1..32, got {qbits}")
    lo = float(np.min(y)) if lo is None else float(lo)
    hi = float(np.max(y)) if hi is None else float(hi)
    if hi < lo:
        raise ValueError(f"empty range: hi {hi} < lo {lo}")
    if hi == lo:
        return y.copy()
    levels = 2 ** qbits
    width = (hi - lo) / levels
    idx = np.clip(np.floor((y - lo) / width), 0, levels - 1)
    return lo + (idx + 0.5) * width
