import json

import numpy as np
import pytest

from cosample import (CosoConfig, VARIANTS, back_project, build_coso, combine_init,
                      config_from_dict, config_to_dict, gaussian_matrix, sample_image,
                      split_measurement, with_variant)
from cosample.sampling import d_branch_adjoint, d_branch_sample, g_branch_sample
from cosample import rng as crng

from test_operators import adjoint_probe


def test_d_branch_constant_dc_only():
    np.testing.assert_allclose(d_branch_sample(np.full((4, 4), 0.5), 1), [2.0], atol=1e-12)


def test_d_branch_complete_roundtrip(rng):
    img = rng.normal(size=(8, 8))
    y = d_branch_sample(img, 64)
    np.testing.assert_allclose(d_branch_adjoint(y, 8, 8), img, atol=1e-12)


def test_d_branch_empty():
    assert d_branch_sample(np.ones((4, 4)), 0).size == 0


def test_d_branch_rejects_bad_count():
    with pytest.raises(ValueError):
        d_branch_sample(np.ones((4, 4)), 17)


def test_g_branch_identity_matrix_is_block_raster(rng):
    img = rng.normal(size=(8, 8))
    y = g_branch_sample(img, np.eye(16), 4)
    assert y.size == 64
    np.testing.assert_allclose(np.linalg.norm(y), np.linalg.norm(img), atol=1e-12)
    # first block's measurements are the raster pixels of the top-left tile
    np.testing.assert_array_equal(y[:16], img[:4, :4].ravel())


def test_g_branch_counts():
    cfg = CosoConfig(height=64, width=64, gamma=0.1, block=32)
    assert cfg.m_g_block == 61  # round(0.06 * 1024) = round(61.44)
    assert cfg.n_blocks == 4
    op = build_coso(cfg)
    assert op.m - cfg.m_d == 4 * 61


def test_block_gaussian_rows_orthonormal(rng):
    cfg = CosoConfig(height=64, width=64, gamma=0.1, block=32, variant="block_gaussian")
    op = build_coso(cfg)
    y = rng.normal(size=op.m)
    np.testing.assert_allclose(op.apply(op.apply_adjoint(y)), y, atol=1e-10)


def test_dual_no_filter_total_length():
    cfg = CosoConfig(height=64, width=64, gamma=0.1, block=32)
    assert cfg.variant == "dual_no_filter"
    assert cfg.m_d == 164 and cfg.m_total == 408
    assert build_coso(cfg).m == 408


def test_all_variants_adjoint_and_length_slack(rng):
    for variant in sorted(VARIANTS):
        cfg = CosoConfig(height=64, width=64, gamma=0.12, block=32, variant=variant,
                         filter_seed=1)
        op = build_coso(cfg)
        adjoint_probe(op, pairs=5, seed=42)
        n, nb = cfg.n, cfg.block_dim
        assert abs(op.m - cfg.gamma * n) <= 1 + n / nb


def test_scrambled_equals_block_on_gathered_input(rng):
    base = CosoConfig(height=64, width=64, gamma=0.1, block=32, perm_seed=5)
    scr = build_coso(with_variant(base, "g_scrambled"))
    blk = build_coso(with_variant(base, "block_gaussian"))
    x = rng.normal(size=64 * 64)
    perm = crng.permutation(64 * 64, 5)
    np.testing.assert_array_equal(scr.apply(x), blk.apply(x[perm]))


def test_dct_only_complete_basis_exact(rng):
    cfg = CosoConfig(height=32, width=32, gamma=1.0, block=32, variant="dct_only")
    op = build_coso(cfg)
    x = rng.normal(size=1024)
    np.testing.assert_allclose(op.apply_adjoint(op.apply(x)), x, atol=1e-10)


def test_sample_image_matches_operator(rng, corpus):
    cfg = CosoConfig(height=64, width=64, gamma=0.1, block=32)
    meas = sample_image(corpus[0], cfg)
    np.testing.assert_array_equal(meas.y, build_coso(cfg).apply(corpus[0].ravel()))
    assert meas.m == cfg.m_total


def test_sample_image_validations():
    cfg = CosoConfig(height=64, width=64, gamma=0.1, block=32)
    with pytest.raises(ValueError):
        sample_image(np.zeros((32, 32)), cfg)
    bad = np.zeros((64, 64))
    bad[0, 0] = np.inf
    with pytest.raises(ValueError):
        sample_image(bad, cfg)


def test_back_project_dct_complete(rng):
    cfg = CosoConfig(height=32, width=32, gamma=1.0, block=32, variant="dct_only")
    img = rng.normal(size=(32, 32))
    chan_d, chan_g = back_project(sample_image(img, cfg))
    np.testing.assert_allclose(chan_d, img, atol=1e-10)
    np.testing.assert_array_equal(chan_g, np.zeros((32, 32)))


def test_back_project_gaussian_complete(rng):
    cfg = CosoConfig(height=32, width=32, gamma=1.0, block=32, variant="g_scrambled")
    img = rng.normal(size=(32, 32))
    chan_d, chan_g = back_project(sample_image(img, cfg))
    np.testing.assert_allclose(chan_g, img, atol=1e-10)
    np.testing.assert_array_equal(chan_d, np.zeros((32, 32)))


def test_back_project_zero_measurement():
    cfg = CosoConfig(height=32, width=32, gamma=0.2, block=32)
    meas = split_measurement(np.zeros(cfg.m_total), cfg)
    chan_d, chan_g = back_project(meas)
    np.testing.assert_array_equal(chan_d, np.zeros((32, 32)))
    np.testing.assert_array_equal(chan_g, np.zeros((32, 32)))


def test_combine_init(rng):
    x = rng.normal(size=(8, 8))
    np.testing.assert_array_equal(combine_init(x, x), x)
    np.testing.assert_allclose(combine_init(x, np.zeros((8, 8))), x / 2, atol=1e-15)
    np.testing.assert_allclose(combine_init(3 * x, 3 * x), 3 * combine_init(x, x), atol=1e-12)


def test_config_dict_roundtrip():
    cfg = CosoConfig(height=64, width=96, gamma=0.25, block=32, gamma_d=0.05,
                     gamma_g=0.2, perm_seed=7, gauss_seed=9, variant="dual_no_permute")
    d = config_to_dict(cfg)
    assert set(d) >= {"height", "width", "block", "gamma", "gamma_d", "gamma_g",
                      "perm_seed", "gauss_seed", "variant", "weights_path"}
    json.dumps(d)  # serializable
    assert config_from_dict(d) == cfg


def test_config_validation():
    with pytest.raises(ValueError):
        CosoConfig(height=60, width=64, gamma=0.1, block=32)  # block does not divide
    with pytest.raises(ValueError):
        CosoConfig(height=64, width=64, gamma=1.5, block=32)
    with pytest.raises(ValueError):
        CosoConfig(height=64, width=64, gamma=0.1, block=32, variant="nope")
    with pytest.raises(ValueError):
        CosoConfig(height=64, width=64, gamma=0.1, gamma_d=0.2, gamma_g=0.05, block=32)


def test_with_variant_moves_whole_ratio():
    cfg = CosoConfig(height=64, width=64, gamma=0.1, block=32)
    dct = with_variant(cfg, "dct_only")
    assert dct.gamma_d == pytest.approx(0.1) and dct.gamma_g == 0.0
    gsc = with_variant(cfg, "g_scrambled")
    assert gsc.gamma_d == 0.0 and gsc.gamma_g == pytest.approx(0.1)


def test_gaussian_matrix_cache_consistency():
    a = gaussian_matrix(61, 1024, 0)
    b = gaussian_matrix(102, 1024, 0)
    np.testing.assert_array_equal(a.entries, b.entries[:61])
