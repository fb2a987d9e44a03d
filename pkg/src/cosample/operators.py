"""Linear and affine operator wrappers used across sampling and reconstruction.

Operators act on flat float64 vectors (images are flattened row-major before
entering). Instances are immutable: building one captures everything it needs,
and apply/apply_adjoint are pure functions of the input.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rng


@dataclass(frozen=True)
class LinearOperator:
    """A -> wraps forward x |-> Ax and adjoint y |-> A^T y with shape checks.

    n: input dimension. m: output dimension. kind: short tag naming the
    construction ("identity", "matrix", variant names, ...), useful in error
    messages and manifests.
    """
    n: int
    m: int
    _forward: Callable[[np.ndarray], np.ndarray]
    _adjoint: Callable[[np.ndarray], np.ndarray]
    kind: str = "linear"

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size != self.n:
            raise ValueError(f"{self.kind}: expected input size {self.n}, got {x.size}")
        y = np.asarray(self._forward(x), dtype=np.float64).ravel()
        if y.size != self.m:
            raise RuntimeError(f"{self.kind}: forward returned size {y.size}, expected {self.m}")
        return y

    def apply_adjoint(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64).ravel()
        if y.size != self.m:
            raise ValueError(f"{self.kind}: expected adjoint input size {self.m}, got {y.size}")
        x = np.asarray(self._adjoint(y), dtype=np.float64).ravel()
        if x.size != self.n:
            raise RuntimeError(f"{self.kind}: adjoint returned size {x.size}, expected {self.n}")
        return x


@dataclass(frozen=True)
class AffineOperator:
    """x |-> linear.apply(x) + bias."""
    linear: LinearOperator
    bias: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bias, dtype=np.float64).ravel()
        if b.size != self.linear.m:
            raise ValueError(f"bias size {b.size} does not match output dim {self.linear.m}")
        b.setflags(write=False)
        object.__setattr__(self, "bias", b)

    @property
    def n(self) -> int:
        return self.linear.n

    @property
    def m(self) -> int:
        return self.linear.m

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.linear.apply(x) + self.bias


def identity(n: int) -> LinearOperator:
    return LinearOperator(n, n, lambda x: x.copy(), lambda y: y.copy(), kind="identity")


def from_matrix(a: np.ndarray, kind: str = "matrix") -> LinearOperator:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("from_matrix expects a 2-D array")
    m, n = a.shape
    return LinearOperator(n, m, lambda x: a @ x, lambda y: a.T @ y, kind=kind)


def from_permutation(perm: np.ndarray, kind: str = "permutation") -> LinearOperator:
    """Gather operator: (Px)[i] = x[perm[i]]. Adjoint scatters (the inverse)."""
    perm = np.asarray(perm, dtype=np.int64)
    inv = rng.inverse_permutation(perm)
    n = perm.size
    return LinearOperator(n, n, lambda x: x[perm], lambda y: y[inv], kind=kind)


def compose(outer: LinearOperator, inner: LinearOperator) -> LinearOperator:
    """Operator for outer(inner(x)); adjoint composes in reverse."""
    if inner.m != outer.n:
        raise ValueError(f"cannot compose: inner output {inner.m} != outer input {outer.n}")
    return LinearOperator(
        inner.n, outer.m,
        lambda x: outer.apply(inner.apply(x)),
        lambda y: inner.apply_adjoint(outer.apply_adjoint(y)),
        kind=f"{outer.kind}*{inner.kind}",
    )


def power_iteration(op: LinearOperator, iters: int = 100, seed: int = 0) -> float:
    """Largest singular value estimate ||A||_2 via power iteration on A^T A.

    Starts from a seeded normal vector; each step returns ||A v|| for the unit
    iterate v, which is nondecreasing in the iteration count and converges to
    the top singular value from below. A zero operator yields 0.0.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    v = rng.normals(seed, op.n)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ArithmeticError("degenerate start vector")
    v /= nv
    est = 0.0
    for _ in range(iters):
        av = op.apply(v)
        est = float(np.linalg.norm(av))
        if est == 0.0:
            return 0.0
        w = op.apply_adjoint(av)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return est
        v = w / nw
    return est
