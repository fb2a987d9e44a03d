"""Image loading, grayscale conversion, 8-bit export with float sidecars."""

import os

import numpy as np
from PIL import Image

_LUMA = (0.299, 0.587, 0.114)


def to_gray(arr: np.ndarray) -> np.ndarray:
    """uint8 H x W (x3/4) array -> float64 grayscale in [0, 1], BT.601 luma."""
    a = np.asarray(arr, dtype=np.float64) / 255.0
    if a.ndim == 2:
        return a
    if a.ndim == 3 and a.shape[2] in (3, 4):
        return _LUMA[0] * a[:, :, 0] + _LUMA[1] * a[:, :, 1] + _LUMA[2] * a[:, :, 2]
    raise ValueError(f"unsupported image array shape {a.shape}")


def load_image(path) -> np.ndarray:
    """Read an image file as float64 grayscale in [0, 1]."""
    with Image.open(path) as im:
        if im.mode in ("P", "CMYK", "YCbCr"):
            im = im.convert("RGB")
        arr = np.asarray(im)
    if arr.dtype == np.uint16:
        return np.asarray(arr, dtype=np.float64) / 65535.0
    return to_gray(arr)


def to_u8(img: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1], scale to 255, round half to even."""
    return np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def save_image(path, img: np.ndarray):
    """Write the 8-bit rendering of a unit-range float image (format by extension)."""
    Image.fromarray(to_u8(img), mode="L").save(path)


def save_image_with_sidecar(path, img: np.ndarray) -> tuple:
    """8-bit image plus full-precision .f64.npy sidecar; returns both paths."""
    save_image(path, img)
    sidecar = str(path) + ".f64.npy"
    np.save(sidecar, np.asarray(img, dtype=np.float64))
    return str(path), sidecar


def center_crop(img: np.ndarray, height: int, width: int) -> np.ndarray:
    h, w = img.shape
    if h < height or w < width:
        raise ValueError(f"image {h} x {w} smaller than crop {height} x {width}")
    top = (h - height) // 2
    left = (w - width) // 2
    return img[top:top + height, left:left + width].copy()


def load_corpus(directory, size: int = None) -> list:
    """All images in a directory (sorted by name), optionally center-cropped square."""
    names = sorted(f for f in os.listdir(directory)
                   if f.lower().endswith((".pgm", ".png", ".ppm", ".bmp", ".tif", ".tiff")))
    if not names:
        raise ValueError(f"no images found in {directory}")
    images = [load_image(os.path.join(directory, f)) for f in names]
    if size is not None:
        images = [center_crop(im, size, size) for im in images]
    return images
