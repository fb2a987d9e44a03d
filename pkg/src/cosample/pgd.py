"""Proximal gradient descent for transform-sparse reconstruction.

Solves min_x 0.5 ||A x - y||^2 + lam ||DCT(x)||_1 by ISTA steps: a gradient
move with step eta followed by the exact proximal map of the regularizer,
which for an orthonormal transform is soft-thresholding in that domain. With
eta <= 1 / ||A||^2 the objective is non-increasing; the automatic step uses
0.99 / L^2 with L estimated by power iteration.
"""

from dataclasses import dataclass

import numpy as np

from .operators import LinearOperator, power_iteration
from .transforms import dct2, idct2


class SolverDiverged(ArithmeticError):
    """Raised when an iterate or objective stops being finite."""


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def prox_dct(img: np.ndarray, t: float) -> np.ndarray:
    """Proximal map of t * ||DCT(.)||_1, exact because the transform is orthonormal.

    t = 0 is the identity and is returned without the transform round trip.
    """
    if t < 0:
        raise ValueError("threshold must be >= 0")
    if t == 0.0:
        return img.copy()
    return idct2(soft_threshold(dct2(img), t))


def gradient_step(img: np.ndarray, op: LinearOperator, y: np.ndarray,
                  step: float) -> np.ndarray:
    """One least-squares gradient move: x - step * A^T (A x - y)."""
    r = op.apply(img.ravel()) - y
    return img - step * op.apply_adjoint(r).reshape(img.shape)


def objective(img: np.ndarray, op: LinearOperator, y: np.ndarray, lam: float) -> float:
    r = op.apply(img.ravel()) - y
    fit = 0.5 * float(r @ r)
    if lam == 0.0:
        return fit
    return fit + lam * float(np.sum(np.abs(dct2(img))))


@dataclass(frozen=True)
class PgdConfig:
    iters: int = 20
    lam: float = 1e-3
    step: float = 0.0          # 0 means automatic: 0.99 / L^2
    tol: float = 0.0           # relative objective change for early stop; 0 runs all iters
    clamp: bool = False        # clip iterates to [0, 1] after the prox
    power_iters: int = 100
    power_seed: int = 0


@dataclass(frozen=True)
class SolveTrace:
    """objectives[k] and residual_norms[k] describe iterate k+1; the starting
    point's objective is initial_objective. One entry per executed iteration."""
    objectives: np.ndarray
    residual_norms: np.ndarray
    iterations: int
    initial_objective: float
    step: float


def auto_step(op: LinearOperator, iters: int = 100, seed: int = 0) -> float:
    norm = power_iteration(op, iters, seed)
    if norm == 0.0:
        return 1.0
    return 0.99 / (norm * norm)


def pgd_solve(op: LinearOperator, y: np.ndarray, init: np.ndarray,
              cfg: PgdConfig = PgdConfig()) -> tuple:
    """Run ISTA from init; returns (reconstruction, SolveTrace).

    Raises SolverDiverged as soon as an iterate or its objective goes
    non-finite (oversized manual steps can do that).
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size != op.m:
        raise ValueError(f"measurement length {y.size}, operator outputs {op.m}")
    x = np.asarray(init, dtype=np.float64)
    if x.ndim != 2 or x.size != op.n:
        raise ValueError(f"init shape {x.shape} does not flatten to {op.n}")
    if cfg.iters < 0:
        raise ValueError("iters must be >= 0")
    step = cfg.step if cfg.step > 0 else auto_step(op, cfg.power_iters, cfg.power_seed)

    def full_objective(residual, img):
        with np.errstate(over="ignore"):  # inf is caught and raised as divergence
            fit = 0.5 * float(residual @ residual)
            if cfg.lam == 0.0:
                return fit
            return fit + cfg.lam * float(np.sum(np.abs(dct2(img))))

    r = op.apply(x.ravel()) - y
    obj_prev = full_objective(r, x)
    if not np.isfinite(obj_prev):
        raise SolverDiverged(f"non-finite objective at start: {obj_prev}")
    initial_obj = obj_prev
    objs, resids = [], []
    for _ in range(cfg.iters):
        x = prox_dct(x - step * op.apply_adjoint(r).reshape(x.shape), cfg.lam * step)
        if cfg.clamp:
            x = np.clip(x, 0.0, 1.0)
        if not np.all(np.isfinite(x)):
            raise SolverDiverged(f"non-finite iterate after {len(objs)} iterations")
        r = op.apply(x.ravel()) - y
        obj = full_objective(r, x)
        if not np.isfinite(obj):
            raise SolverDiverged(f"non-finite objective after {len(objs)} iterations")
        objs.append(obj)
        resids.append(float(np.linalg.norm(r)))
        if cfg.tol > 0 and abs(obj - obj_prev) < cfg.tol * max(1.0, abs(obj_prev)):
            obj_prev = obj
            break
        obj_prev = obj
    trace = SolveTrace(np.asarray(objs), np.asarray(resids), len(objs), initial_obj, step)
    return x, trace
