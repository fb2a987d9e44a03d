"""Seven-layer linear conditional filter and its structural merge.

The filter is a bias-free chain of 3x3 zero-padded convolutions: one lift
layer (1 -> C channels), five inner layers (C -> C) each followed by a
per-channel scaling conditioned on the sampling-ratio pair z = (ratio_d,
ratio_g), and one head layer (C -> 2) whose two output channels feed the two
measurement branches. Being linear in the input for fixed z, the whole chain
collapses into a pair of 15x15 kernels (seven 3x3 stages widen the support by
2 pixels each side per stage); merge_kernels performs that collapse exactly.
"""

import struct
from dataclasses import dataclass

import numpy as np
import scipy.signal

from . import rng
from .formats import FileFormatError, _VERSION, _read_exact, _read_f64
from .kernels import adjoint_weights, conv3x3

N_LAYERS = 7
N_HEADS = 5
MERGED_SIZE = 15


@dataclass(frozen=True)
class ConvLayer:
    weight: np.ndarray  # (out_c, in_c, 3, 3)


@dataclass(frozen=True)
class ModulationHead:
    """Per-channel scale p = weight @ z + bias for condition vector z."""
    weight: np.ndarray  # (C, 2)
    bias: np.ndarray    # (C,)

    def scales(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64).ravel()
        if z.size != 2:
            raise ValueError("condition vector must have length 2")
        return self.weight @ z + self.bias


@dataclass(frozen=True)
class FilterNet:
    layers: tuple        # 7 ConvLayer
    heads: tuple         # 5 ModulationHead, one after each inner layer
    channels: int

    def __post_init__(self):
        if len(self.layers) != N_LAYERS or len(self.heads) != N_HEADS:
            raise ValueError(f"need {N_LAYERS} layers and {N_HEADS} heads")
        c = self.channels
        shapes = [(c, 1)] + [(c, c)] * 5 + [(2, c)]
        for k, (layer, s) in enumerate(zip(self.layers, shapes)):
            if layer.weight.shape != s + (3, 3):
                raise ValueError(f"layer {k} weight shape {layer.weight.shape}, expected {s + (3, 3)}")
        for head in self.heads:
            if head.weight.shape != (c, 2) or head.bias.shape != (c,):
                raise ValueError("bad modulation head shape")


def init_filter(channels: int = 16, seed: int = 0) -> FilterNet:
    """Fresh filter with fan-in scaled Gaussian kernels and neutral heads.

    Layer k's weights are drawn row-major from the seed's stream, layers in
    order 1..7, each entry scaled by 1/sqrt(9 * in_channels) so a white input
    keeps roughly unit variance through the chain. Heads start at weight 0,
    bias 1: the scaling is 1 for every condition until trained otherwise.
    """
    if channels < 1:
        raise ValueError("channels must be >= 1")
    c = channels
    shapes = [(c, 1)] + [(c, c)] * 5 + [(2, c)]
    draws = rng.normals(seed, sum(9 * o * i for o, i in shapes))
    layers = []
    pos = 0
    for out_c, in_c in shapes:
        count = out_c * in_c * 9
        w = draws[pos:pos + count] / np.sqrt(9.0 * in_c)
        pos += count
        w = w.reshape(out_c, in_c, 3, 3)
        w.setflags(write=False)
        layers.append(ConvLayer(w))
    heads = []
    for _ in range(N_HEADS):
        hw = np.zeros((c, 2))
        hb = np.ones(c)
        hw.setflags(write=False)
        hb.setflags(write=False)
        heads.append(ModulationHead(hw, hb))
    return FilterNet(tuple(layers), tuple(heads), c)


def filter_forward(net: FilterNet, img: np.ndarray, z) -> tuple:
    """Run the filter; returns the two output-channel images (x_d, x_g)."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("filter input must be a 2-D image")
    if not np.all(np.isfinite(img)):
        raise ValueError("filter input contains non-finite values")
    x = img[np.newaxis]
    for k, layer in enumerate(net.layers):
        x = conv3x3(x, layer.weight)
        if 1 <= k <= 5:
            x *= net.heads[k - 1].scales(z)[:, np.newaxis, np.newaxis]
    return x[0], x[1]


def filter_adjoint(net: FilterNet, g_d: np.ndarray, g_g: np.ndarray, z) -> np.ndarray:
    """Adjoint of filter_forward for fixed z: branch cotangents back to image space."""
    g = np.stack([np.asarray(g_d, dtype=np.float64), np.asarray(g_g, dtype=np.float64)])
    for k in range(N_LAYERS - 1, -1, -1):
        if 1 <= k <= 5:
            g = g * net.heads[k - 1].scales(z)[:, np.newaxis, np.newaxis]
        g = conv3x3(g, adjoint_weights(net.layers[k].weight))
    return g[0]


def merge_kernels(net: FilterNet, z) -> tuple:
    """Collapse the seven stages (with scalings baked in) into two 15x15 kernels.

    Chained cross-correlations compose by full 2-D convolution of their
    kernels with a contraction over the middle channel. Returns (k_d, k_g);
    correlating an image with k_d / k_g (zero padded) reproduces
    filter_forward exactly wherever the input's zero padding is out of reach,
    i.e. at least 7 pixels from every border.
    """
    merged = None
    for k, layer in enumerate(net.layers):
        w = layer.weight
        if 1 <= k <= 5:
            w = w * net.heads[k - 1].scales(z)[:, np.newaxis, np.newaxis, np.newaxis]
        if merged is None:
            merged = w
            continue
        out_c, mid_c = w.shape[0], w.shape[1]
        in_c, size = merged.shape[1], merged.shape[2] + 2
        nxt = np.zeros((out_c, in_c, size, size))
        for o in range(out_c):
            for c in range(in_c):
                acc = np.zeros((size, size))
                for mid in range(mid_c):
                    acc += scipy.signal.convolve2d(merged[mid, c], w[o, mid], mode="full")
                nxt[o, c] = acc
        merged = nxt
    return merged[0, 0], merged[1, 0]


def apply_kernel(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Zero-padded cross-correlation with an odd-sized merged kernel."""
    img = np.asarray(img, dtype=np.float64)
    kh, kw = kernel.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError("kernel sides must be odd")
    pad_y, pad_x = kh // 2, kw // 2
    padded = np.zeros((img.shape[0] + 2 * pad_y, img.shape[1] + 2 * pad_x))
    padded[pad_y:pad_y + img.shape[0], pad_x:pad_x + img.shape[1]] = img
    win = np.lib.stride_tricks.sliding_window_view(padded, kernel.shape)
    return np.einsum("hwij,ij->hw", win, kernel)


def save_weights(net: FilterNet, path):
    """Write the CSWT weights file.

    Layout: magic "CSWT", u16 version, u16 C, then for each of the 7 layers
    {u16 out_c, u16 in_c, u16 kh=3, u16 kw=3, f64 LE weights row-major}, then
    for each of the 5 heads {f64 LE weight (C x 2) row-major, f64 LE bias (C)}.
    """
    with open(path, "wb") as f:
        f.write(b"CSWT" + struct.pack("<HH", _VERSION, net.channels))
        for layer in net.layers:
            out_c, in_c, kh, kw = layer.weight.shape
            f.write(struct.pack("<HHHH", out_c, in_c, kh, kw))
            f.write(layer.weight.astype("<f8").tobytes())
        for head in net.heads:
            f.write(head.weight.astype("<f8").tobytes())
            f.write(head.bias.astype("<f8").tobytes())


def load_weights(path) -> FilterNet:
    with open(path, "rb") as f:
        got = f.read(4)
        if got != b"CSWT":
            raise FileFormatError(f"bad magic: expected b'CSWT', got {got!r}")
        ver, c = struct.unpack("<HH", _read_exact(f, 4, "header"))
        if ver != _VERSION:
            raise FileFormatError(f"unsupported version {ver}")
        layers = []
        for k in range(N_LAYERS):
            out_c, in_c, kh, kw = struct.unpack("<HHHH", _read_exact(f, 8, f"layer {k} shape"))
            if (kh, kw) != (3, 3):
                raise FileFormatError(f"layer {k} kernel is {kh}x{kw}, expected 3x3")
            w = _read_f64(f, out_c * in_c * kh * kw, f"layer {k} weights")
            w = w.reshape(out_c, in_c, kh, kw)
            w.setflags(write=False)
            layers.append(ConvLayer(w))
        heads = []
        for k in range(N_HEADS):
            hw = _read_f64(f, c * 2, f"head {k} weights").reshape(c, 2)
            hb = _read_f64(f, c, f"head {k} bias")
            hw.setflags(write=False)
            hb.setflags(write=False)
            heads.append(ModulationHead(hw, hb))
        if f.read(1):
            raise FileFormatError("trailing bytes after payload")
    try:
        return FilterNet(tuple(layers), tuple(heads), c)
    except ValueError as e:
        raise FileFormatError(str(e)) from e
