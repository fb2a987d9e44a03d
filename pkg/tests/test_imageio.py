import numpy as np
import pytest

from cosample import (center_crop, load_corpus, load_image, save_image,
                      save_image_with_sidecar, to_gray, to_u8)


def test_to_gray_luma_weights():
    rgb = np.zeros((2, 2, 3), dtype=np.uint8)
    rgb[0, 0] = [255, 0, 0]
    rgb[0, 1] = [0, 255, 0]
    rgb[1, 0] = [0, 0, 255]
    rgb[1, 1] = [255, 255, 255]
    g = to_gray(rgb)
    np.testing.assert_allclose(g, [[0.299, 0.587], [0.114, 1.0]], atol=1e-12)


def test_to_gray_scales_2d_u8(rng):
    img = rng.integers(0, 256, size=(4, 4), dtype=np.uint8)
    np.testing.assert_allclose(to_gray(img), img / 255.0, atol=1e-15)


def test_to_u8_rounds_half_to_even():
    # 0.5/255 and 1.5/255 both sit exactly between integers
    img = np.array([[0.5 / 255, 1.5 / 255]])
    np.testing.assert_array_equal(to_u8(img), [[0, 2]])
    np.testing.assert_array_equal(to_u8(np.array([[-1.0, 2.0]])), [[0, 255]])


def test_save_load_roundtrip(tmp_path, rng):
    img = rng.integers(0, 256, size=(16, 16)).astype(np.float64) / 255.0
    for name in ("a.pgm", "a.png"):
        path = tmp_path / name
        save_image(path, img)
        np.testing.assert_allclose(load_image(path), img, atol=1e-12)


def test_sidecar_preserves_float(tmp_path, rng):
    img = rng.random((8, 8))
    path = tmp_path / "out.png"
    img_path, sidecar = save_image_with_sidecar(path, img)
    assert img_path == str(path)
    np.testing.assert_array_equal(np.load(sidecar), img)


def test_center_crop():
    img = np.arange(36, dtype=float).reshape(6, 6)
    np.testing.assert_array_equal(center_crop(img, 2, 2), img[2:4, 2:4])
    with pytest.raises(ValueError):
        center_crop(img, 8, 2)


def test_load_corpus_sorted_and_cropped(tmp_path, rng):
    for k in (2, 0, 1):
        save_image(tmp_path / f"img_{k}.pgm", rng.random((12, 10)))
    corpus = load_corpus(tmp_path, size=8)
    assert len(corpus) == 3
    assert all(c.shape == (8, 8) for c in corpus)


def test_load_corpus_empty_errors(tmp_path):
    with pytest.raises(ValueError):
        load_corpus(tmp_path)
