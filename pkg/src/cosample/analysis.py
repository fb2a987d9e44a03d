"""Instruments for judging sampling operators: isometry, row power, ERF, metrics."""

import warnings
from dataclasses import dataclass

import numpy as np

from .operators import LinearOperator

_LOG_CLAMP = 1e-300


@dataclass(frozen=True)
class RipReport:
    """Worst-case energy distortion of an operator over a test corpus."""
    delta: float
    ratios: np.ndarray   # ||A x_i||^2 / ||x_i||^2 per corpus item
    skipped: int         # zero-norm inputs left out


def rip_constant(op: LinearOperator, images) -> RipReport:
    """delta = max_i | ||A x_i||^2 / ||x_i||^2 - 1 | over the corpus."""
    ratios = []
    skipped = 0
    for img in images:
        x = np.asarray(img, dtype=np.float64).ravel()
        xx = float(x @ x)
        if xx == 0.0:
            skipped += 1
            continue
        ax = op.apply(x)
        ratios.append(float(ax @ ax) / xx)
    if skipped:
        warnings.warn(f"rip_constant skipped {skipped} zero-norm inputs", stacklevel=2)
    if not ratios:
        raise ValueError("no usable corpus images")
    ratios = np.asarray(ratios)
    return RipReport(float(np.max(np.abs(ratios - 1.0))), ratios, skipped)


@dataclass(frozen=True)
class PowerCurve:
    """Mean log measurement amplitude per matrix row over a corpus."""
    values: np.ndarray
    clamped_rows: np.ndarray  # rows where at least one |A_i x_j| hit the log clamp


def measurement_power(phi: np.ndarray, images) -> PowerCurve:
    """Row i gets (1/J) sum_j ln |A_i x_j|, amplitudes clamped at 1e-300."""
    phi = np.asarray(phi, dtype=np.float64)
    x = np.stack([np.asarray(img, dtype=np.float64).ravel() for img in images])
    if x.shape[1] != phi.shape[1]:
        raise ValueError(f"corpus items have {x.shape[1]} pixels, matrix has {phi.shape[1]} columns")
    amp = np.abs(phi @ x.T)
    clamped = amp < _LOG_CLAMP
    values = np.log(np.maximum(amp, _LOG_CLAMP)).mean(axis=1)
    return PowerCurve(values, np.nonzero(clamped.any(axis=1))[0])


def erf_row(phi: np.ndarray, row: int, height: int, width: int) -> np.ndarray:
    """Effective response field: matrix row reshaped to image geometry."""
    phi = np.asarray(phi)
    if not 0 <= row < phi.shape[0]:
        raise ValueError(f"row {row} outside [0, {phi.shape[0]})")
    if phi.shape[1] != height * width:
        raise ValueError("geometry does not match matrix columns")
    return phi[row].reshape(height, width).copy()


def support_span(field: np.ndarray, rel_tol: float = 1e-12) -> tuple:
    """Fractions of image rows / columns touched by a response field.

    Support is |value| > rel_tol * max |value|; an all-zero field spans nothing.
    """
    a = np.abs(np.asarray(field, dtype=np.float64))
    peak = a.max()
    if peak == 0.0:
        return 0.0, 0.0
    mask = a > rel_tol * peak
    return (float(mask.any(axis=1).mean()), float(mask.any(axis=0).mean()))


def psnr(ref: np.ndarray, test: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; identical inputs give +inf."""
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ValueError("shape mismatch")
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


def ssim(a: np.ndarray, b: np.ndarray, window: int = 8,
         c1: float = 0.01 ** 2, c2: float = 0.03 ** 2) -> float:
    """Mean structural similarity over all uniform window x window patches.

    Uniform (unweighted) windows, stride 1, biased (N-denominator) moments,
    unit dynamic range. Images must be at least window x window.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    if a.ndim != 2 or min(a.shape) < window:
        raise ValueError(f"images must be 2-D with sides >= {window}")
    wa = np.lib.stride_tricks.sliding_window_view(a, (window, window))
    wb = np.lib.stride_tricks.sliding_window_view(b, (window, window))
    mu_a = wa.mean(axis=(-2, -1))
    mu_b = wb.mean(axis=(-2, -1))
    var_a = (wa * wa).mean(axis=(-2, -1)) - mu_a * mu_a
    var_b = (wb * wb).mean(axis=(-2, -1)) - mu_b * mu_b
    cov = (wa * wb).mean(axis=(-2, -1)) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))
