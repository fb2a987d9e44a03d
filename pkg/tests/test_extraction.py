import numpy as np
import pytest

from cosample import (CosoConfig, FileFormatError, build_coso, extract, load_system,
                      merge_mask, save_system, verify_linearity)


def test_affine_identity():
    sys = extract(lambda x: x.ravel() + 1.0, 2, 2)
    np.testing.assert_allclose(sys.phi, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(sys.bias, np.ones(4), atol=1e-15)


def test_zero_system():
    sys = extract(lambda x: np.zeros(3), 2, 2)
    np.testing.assert_array_equal(sys.phi, np.zeros((3, 4)))
    np.testing.assert_array_equal(sys.bias, np.zeros(3))


def test_operator_extraction_fidelity(rng):
    cfg = CosoConfig(height=32, width=32, gamma=0.1, block=32, variant="full_coso",
                     filter_seed=0)
    op = build_coso(cfg)
    sys = extract(op, 32, 32)
    assert sys.bias.max() == 0.0  # no biases anywhere in the pipeline
    for _ in range(20):
        x = rng.normal(size=1024)
        direct = op.apply(x)
        err = np.abs(sys.phi @ x - direct).max()
        assert err <= 1e-9 * max(1.0, np.abs(direct).max())


def test_parallel_equals_serial():
    cfg = CosoConfig(height=32, width=32, gamma=0.15, block=32)
    op = build_coso(cfg)
    a = extract(op, 32, 32, parallel=True)
    b = extract(op, 32, 32, parallel=False)
    np.testing.assert_array_equal(a.phi, b.phi)
    np.testing.assert_array_equal(a.bias, b.bias)


def test_reextraction_idempotent():
    cfg = CosoConfig(height=16, width=16, gamma=0.3, block=16)
    sys = extract(build_coso(cfg), 16, 16)
    again = extract(sys.as_operator(), 16, 16)
    np.testing.assert_allclose(again.phi, sys.phi, atol=1e-12)
    np.testing.assert_allclose(again.bias, sys.bias, atol=1e-12)


def test_varying_output_length_reports_probe():
    calls = {"k": 0}

    def flaky(x):
        calls["k"] += 1
        return np.zeros(3 if calls["k"] > 2 else 4)

    with pytest.raises(ValueError, match="probe"):
        extract(flaky, 2, 2, parallel=False)


def test_verify_linearity_passes_operator():
    cfg = CosoConfig(height=32, width=32, gamma=0.1, block=32, variant="full_coso",
                     filter_seed=0)
    report = verify_linearity(build_coso(cfg), 32, 32)
    assert report.passed
    assert report.max_residual <= 1e-10


def test_verify_linearity_catches_nonlinearity():
    report = verify_linearity(lambda x: x.ravel() ** 2, 4, 4)
    assert not report.passed
    assert report.max_residual > report.tolerance


def test_verify_linearity_accepts_pure_bias():
    report = verify_linearity(lambda x: np.full(5, 2.5), 4, 4)
    assert report.passed


def test_merge_mask_selects_rows(rng):
    cfg = CosoConfig(height=16, width=16, gamma=0.5, block=16)
    sys = extract(build_coso(cfg), 16, 16)
    mask = np.zeros(sys.m, dtype=bool)
    mask[[0, 3, 7]] = True
    small = merge_mask(sys, mask)
    np.testing.assert_array_equal(small.phi, sys.phi[[0, 3, 7]])
    np.testing.assert_array_equal(small.bias, sys.bias[[0, 3, 7]])


def test_merge_mask_empty_warns():
    cfg = CosoConfig(height=16, width=16, gamma=0.2, block=16)
    sys = extract(build_coso(cfg), 16, 16)
    with pytest.warns(UserWarning):
        merge_mask(sys, np.zeros(sys.m, dtype=bool))


def test_patterns_match_rows(rng):
    sys = extract(lambda x: np.array([x.ravel()[0]]), 2, 2)
    np.testing.assert_array_equal(sys.patterns()[0], [[1.0, 0.0], [0.0, 0.0]])
    cfg = CosoConfig(height=16, width=16, gamma=0.3, block=16)
    sys = extract(build_coso(cfg), 16, 16)
    pats = sys.patterns()
    assert pats.shape == (sys.m, 16, 16)
    x = rng.normal(size=256)
    for i in range(0, sys.m, 7):
        got = float(pats[i].ravel() @ x) + sys.bias[i]
        assert got == pytest.approx(float(sys.phi[i] @ x + sys.bias[i]), abs=1e-12)


def test_save_load_roundtrip(tmp_path):
    cfg = CosoConfig(height=16, width=16, gamma=0.25, block=16)
    sys = extract(build_coso(cfg), 16, 16)
    path = tmp_path / "sys.csmx"
    save_system(sys, path)
    back = load_system(path, 16, 16)
    np.testing.assert_array_equal(back.phi, sys.phi)
    np.testing.assert_array_equal(back.bias, sys.bias)


def test_load_rejects_trailing_bytes(tmp_path):
    cfg = CosoConfig(height=16, width=16, gamma=0.25, block=16)
    sys = extract(build_coso(cfg), 16, 16)
    path = tmp_path / "sys.csmx"
    save_system(sys, path)
    path.write_bytes(path.read_bytes() + b"x")
    with pytest.raises(FileFormatError):
        load_system(path, 16, 16)
