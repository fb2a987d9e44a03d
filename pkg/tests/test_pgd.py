import numpy as np
import pytest

from cosample import (CosoConfig, PgdConfig, SolverDiverged, build_coso, dct2,
                      from_matrix, gaussian_matrix, identity, pgd_solve, prox_dct,
                      soft_threshold)
from cosample.pgd import auto_step, gradient_step, objective


def test_gradient_step_identity_operator(rng):
    x = rng.normal(size=(4, 4))
    y = rng.normal(size=16)
    out = gradient_step(x, identity(16), y, 1.0)
    np.testing.assert_allclose(out.ravel(), y, atol=1e-12)


def test_gradient_step_fixed_point(rng):
    op = from_matrix(rng.normal(size=(6, 16)))
    x = rng.normal(size=(4, 4))
    y = op.apply(x.ravel())
    np.testing.assert_allclose(gradient_step(x, op, y, 0.7), x, atol=1e-12)


def test_gradient_matches_finite_differences(rng):
    op = from_matrix(rng.normal(size=(5, 9)))
    x = rng.normal(size=(3, 3))
    y = rng.normal(size=5)
    d = rng.normal(size=(3, 3))
    grad = (x - gradient_step(x, op, y, 1.0)).ravel()  # eta * grad with eta = 1
    eps = 1e-6

    def f(img):
        r = op.apply(img.ravel()) - y
        return 0.5 * float(r @ r)

    numeric = (f(x + eps * d) - f(x - eps * d)) / (2 * eps)
    assert numeric == pytest.approx(float(grad @ d.ravel()), abs=1e-6)


def test_soft_threshold_scalars():
    assert soft_threshold(np.array(0.5), 0.2) == pytest.approx(0.3)
    assert soft_threshold(np.array(-0.1), 0.2) == 0.0


def test_prox_dct_zero_threshold_is_identity(rng):
    z = rng.normal(size=(6, 6))
    np.testing.assert_allclose(prox_dct(z, 0.0), z, atol=1e-12)


def test_prox_dct_minimizes_objective(rng):
    z = rng.normal(size=(4, 4))
    t = 0.3
    u = prox_dct(z, t)

    def g(v):
        return 0.5 * np.sum((v - z) ** 2) + t * np.abs(dct2(v)).sum()

    base = g(u)
    for _ in range(1000):
        pert = u + rng.normal(size=(4, 4)) * rng.choice([1e-3, 1e-2, 1e-1])
        assert g(pert) >= base - 1e-12


def test_pgd_identity_converges_immediately(rng):
    x = rng.normal(size=(4, 4))
    out, trace = pgd_solve(identity(16), x.ravel(), np.zeros((4, 4)),
                           PgdConfig(iters=1, lam=0.0, step=1.0))
    np.testing.assert_allclose(out, x, atol=1e-12)
    assert trace.iterations == 1


def test_pgd_stationary_at_orthonormal_backprojection(rng):
    phi = gaussian_matrix(6, 16, 4).entries
    op = from_matrix(phi)
    y = rng.normal(size=6)
    init = op.apply_adjoint(y).reshape(4, 4)
    out, _ = pgd_solve(op, y, init, PgdConfig(iters=10, lam=0.0, step=0.9))
    np.testing.assert_allclose(out, init, atol=1e-12)


def test_pgd_monotone_on_natural_crop(corpus):
    cfg = CosoConfig(height=64, width=64, gamma=0.25, block=32, variant="dct_only")
    op = build_coso(cfg)
    img = corpus[0]
    y = op.apply(img.ravel())
    out, trace = pgd_solve(op, y, np.zeros((64, 64)), PgdConfig(iters=100, lam=1e-3))
    objs = np.concatenate([[trace.initial_objective], trace.objectives])
    assert np.all(np.diff(objs) <= 1e-12)


def test_pgd_complete_basis_recovers_input(rng):
    cfg = CosoConfig(height=32, width=32, gamma=1.0, block=32, variant="dct_only")
    op = build_coso(cfg)
    x = rng.normal(size=(32, 32))
    y = op.apply(x.ravel())
    out, _ = pgd_solve(op, y, np.zeros((32, 32)), PgdConfig(iters=5, lam=0.0))
    np.testing.assert_allclose(out, x, atol=1e-8)


def test_pgd_fixed_point_zero_residual(rng):
    phi = gaussian_matrix(8, 16, 1).entries
    op = from_matrix(phi)
    x_star = rng.normal(size=(4, 4))
    y = op.apply(x_star.ravel())
    out, trace = pgd_solve(op, y, x_star, PgdConfig(iters=20, lam=0.0, step=0.5))
    assert np.abs(out - x_star).max() <= 1e-10
    assert trace.residual_norms[-1] <= 1e-10


def test_pgd_divergence_detected(rng):
    op = from_matrix(rng.normal(size=(8, 16)) * 10)
    y = rng.normal(size=8)
    with pytest.raises(SolverDiverged):
        pgd_solve(op, y, np.zeros((4, 4)), PgdConfig(iters=500, lam=0.0, step=1e6))


def test_pgd_tol_early_stop(rng):
    # identity fit converges in one step; the second iteration changes nothing
    x = rng.normal(size=(4, 4))
    _, trace = pgd_solve(identity(16), x.ravel(), np.zeros((4, 4)),
                         PgdConfig(iters=50, lam=0.0, step=1.0, tol=1e-12))
    assert trace.iterations == 2
    assert len(trace.objectives) == trace.iterations
    assert len(trace.residual_norms) == trace.iterations


def test_pgd_clamp_keeps_unit_range(corpus):
    cfg = CosoConfig(height=64, width=64, gamma=0.2, block=32)
    op = build_coso(cfg)
    y = op.apply(corpus[2].ravel())
    out, _ = pgd_solve(op, y, np.zeros((64, 64)),
                       PgdConfig(iters=10, lam=1e-3, clamp=True))
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_auto_step_matches_spectral_norm():
    phi = np.diag([2.0, 1.0]).astype(float)
    op = from_matrix(phi)
    assert auto_step(op) == pytest.approx(0.99 / 4.0, rel=1e-8)
    assert auto_step(from_matrix(np.zeros((2, 2)))) == 1.0


def test_objective_value(rng):
    op = identity(4)
    x = rng.normal(size=(2, 2))
    y = rng.normal(size=4)
    want = 0.5 * np.sum((x.ravel() - y) ** 2) + 0.01 * np.abs(dct2(x)).sum()
    assert objective(x, op, y, 0.01) == pytest.approx(want, rel=1e-12)


def test_pgd_validates_shapes():
    op = identity(16)
    with pytest.raises(ValueError):
        pgd_solve(op, np.zeros(15), np.zeros((4, 4)), PgdConfig())
    with pytest.raises(ValueError):
        pgd_solve(op, np.zeros(16), np.zeros((3, 3)), PgdConfig())
