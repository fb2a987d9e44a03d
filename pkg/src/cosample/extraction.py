"""Recover the explicit matrix form of a black-box affine measurement system.

Any fixed affine pipeline G (filter, transforms, masks, whatever) satisfies
G(x) = Phi x + b with b = G(0) and column i of Phi equal to G(e_i) - b, so M
probes of basis vectors plus one zero probe reveal the whole system. That is
all extract() does; it never looks inside the system. Columns are independent,
so the threaded path returns bit-identical results to the serial one.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .formats import read_matrix_file, write_matrix_file
from .operators import AffineOperator, LinearOperator, from_matrix


@dataclass(frozen=True)
class ExtractedSystem:
    """Dense (Phi, b) with the image geometry the probes were shaped as."""
    phi: np.ndarray
    bias: np.ndarray
    height: int
    width: int

    def __post_init__(self):
        if self.phi.ndim != 2 or self.phi.shape[1] != self.height * self.width:
            raise ValueError(f"phi shape {self.phi.shape} does not match "
                             f"{self.height} x {self.width} inputs")
        if self.bias.shape != (self.phi.shape[0],):
            raise ValueError("bias length does not match phi rows")

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def n(self) -> int:
        return self.phi.shape[1]

    def as_operator(self) -> AffineOperator:
        return AffineOperator(from_matrix(self.phi, kind="extracted"), self.bias)

    def patterns(self) -> np.ndarray:
        """Rows reshaped to (M, H, W), the physical mask view of the matrix."""
        return self.phi.reshape(self.m, self.height, self.width)


def _as_probe_fn(system):
    if isinstance(system, (LinearOperator, AffineOperator)):
        return system.apply, system.n
    if callable(system):
        return system, None
    raise TypeError("system must be an operator or a callable on flat vectors")


def extract(system, height: int, width: int, parallel: bool = True,
            workers: int = None) -> ExtractedSystem:
    """Probe a black-box system into an explicit ExtractedSystem.

    system: LinearOperator, AffineOperator, or callable mapping a flat
    length H*W vector to a fixed-length vector. parallel=False forces the
    plain serial probe loop; the results are identical either way.
    """
    probe, n_declared = _as_probe_fn(system)
    n = height * width
    if n_declared is not None and n_declared != n:
        raise ValueError(f"system expects {n_declared} inputs, geometry gives {n}")

    bias = np.asarray(probe(np.zeros(n)), dtype=np.float64).ravel().copy()
    m = bias.size
    phi = np.empty((m, n))

    def fill(i: int):
        e = np.zeros(n)
        e[i] = 1.0
        col = np.asarray(probe(e), dtype=np.float64).ravel()
        if col.size != m:
            raise ValueError(f"probe {i} returned {col.size} values, expected {m}; "
                             "system is not a fixed map")
        phi[:, i] = col - bias

    if parallel:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for _ in pool.map(fill, range(n)):
                pass
    else:
        for i in range(n):
            fill(i)
    return ExtractedSystem(phi, bias, height, width)


@dataclass(frozen=True)
class LinearityReport:
    max_residual: float
    tolerance: float
    trials: int

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def verify_linearity(system, height: int, width: int, trials: int = 20,
                     seed: int = 0, tol: float = 1e-10) -> LinearityReport:
    """Check G(ax + by) - G(0) = a (G(x) - G(0)) + b (G(y) - G(0)).

    Probes seeded random pairs with random coefficients in [-1, 1] and reports
    the worst sup-norm residual relative to max(1, ||G(ax + by)||_inf). A
    system that fails this is not affine and extraction output is meaningless.
    """
    from . import rng

    probe, _ = _as_probe_fn(system)
    n = height * width
    b0 = np.asarray(probe(np.zeros(n)), dtype=np.float64).ravel()
    worst = 0.0
    for t in range(trials):
        x = rng.normals(seed, 2 * n, start=t * (4 * n + 4))
        y = x[n:]
        x = x[:n]
        ab = 2.0 * rng.uniforms(seed, 2, start=t * (4 * n + 4) + 4 * n) - 1.0
        mixed = np.asarray(probe(ab[0] * x + ab[1] * y), dtype=np.float64).ravel()
        gx = np.asarray(probe(x), dtype=np.float64).ravel()
        gy = np.asarray(probe(y), dtype=np.float64).ravel()
        resid = mixed - b0 - ab[0] * (gx - b0) - ab[1] * (gy - b0)
        denom = max(1.0, float(np.max(np.abs(mixed))))
        worst = max(worst, float(np.max(np.abs(resid))) / denom)
    return LinearityReport(worst, tol, trials)


def merge_mask(system: ExtractedSystem, mask: np.ndarray) -> ExtractedSystem:
    """Fold a row-selection mask into the system: keep rows where mask is set.

    This is the masked pipeline collapsed to matrix form: selecting rows of
    (Phi, b) is the same as measuring through the mask.
    """
    mask = np.asarray(mask).ravel()
    if mask.size != system.m:
        raise ValueError(f"mask length {mask.size} does not match {system.m} rows")
    keep = mask.astype(bool)
    if not keep.any():
        warnings.warn("mask keeps no rows; extracted system is empty", stacklevel=2)
    return ExtractedSystem(system.phi[keep].copy(), system.bias[keep].copy(),
                           system.height, system.width)


def save_system(system: ExtractedSystem, path):
    write_matrix_file(path, system.phi, system.bias)


def load_system(path, height: int, width: int) -> ExtractedSystem:
    phi, bias = read_matrix_file(path)
    if phi.shape[1] != height * width:
        raise ValueError(f"matrix has {phi.shape[1]} columns, geometry gives {height * width}")
    return ExtractedSystem(phi, bias, height, width)
