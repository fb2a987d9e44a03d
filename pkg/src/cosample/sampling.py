"""Dual-branch under-sampling operator and its ablation variants.

The full operator filters the image into two channels with the conditional
filter, then measures channel one in the DCT domain (keep the first
round(ratio_d * N) zig-zag coefficients) and channel two with a scrambled
block-diagonal Gaussian (global pixel permutation, then an m x B^2 Gaussian
applied per B x B block). Ablation variants drop the filter, the permutation,
or one branch entirely; every variant is exposed through the same
LinearOperator interface, acting on row-major flattened images, measurement
vector ordered [dct branch, gaussian branch], gaussian branch block-major.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import rng
from .filternet import FilterNet, filter_adjoint, filter_forward, init_filter, load_weights
from .operators import LinearOperator
from .transforms import dct2, gaussian_matrix, idct2, zigzag_order

# variant -> which structural pieces are active
VARIANTS = {
    "full_coso":       dict(filtered=True, d=True, g=True, permuted=True),
    "dual_no_filter":  dict(filtered=False, d=True, g=True, permuted=True),
    "dual_no_permute": dict(filtered=False, d=True, g=True, permuted=False),
    "dct_only":        dict(filtered=False, d=True, g=False, permuted=False),
    "g_scrambled":     dict(filtered=False, d=False, g=True, permuted=True),
    "block_gaussian":  dict(filtered=False, d=False, g=True, permuted=False),
}

D_FRACTION = 0.4  # default split of the total ratio between the two branches


def round_half_up(x: float) -> int:
    """Nearest integer, ties away from zero (inputs here are nonnegative)."""
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class CosoConfig:
    height: int
    width: int
    gamma: float
    block: int = 32
    gamma_d: Optional[float] = None
    gamma_g: Optional[float] = None
    perm_seed: int = 0
    gauss_seed: int = 0
    variant: str = "dual_no_filter"
    shared_filter: bool = False
    filter_channels: int = 16
    filter_seed: int = 0
    weights_path: Optional[str] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {sorted(VARIANTS)}")
        if self.height < 1 or self.width < 1:
            raise ValueError("image dimensions must be positive")
        if self.block < 1 or self.height % self.block or self.width % self.block:
            raise ValueError(f"block {self.block} must divide {self.height} x {self.width}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"sampling ratio {self.gamma} outside [0, 1]")
        feat = VARIANTS[self.variant]
        gd, gg = self.gamma_d, self.gamma_g
        if gd is None and gg is None:
            if feat["d"] and feat["g"]:
                gd, gg = D_FRACTION * self.gamma, (1.0 - D_FRACTION) * self.gamma
            elif feat["d"]:
                gd, gg = self.gamma, 0.0
            else:
                gd, gg = 0.0, self.gamma
        elif gd is None or gg is None:
            known = gd if gd is not None else gg
            other = self.gamma - known
            if other < -1e-12:
                raise ValueError("branch ratio exceeds total sampling ratio")
            gd = gd if gd is not None else max(other, 0.0)
            gg = self.gamma - gd
        if gd < 0 or gg < 0 or abs(gd + gg - self.gamma) > 1e-9:
            raise ValueError(f"branch ratios ({gd}, {gg}) do not split gamma {self.gamma}")
        if gd > 0 and not feat["d"]:
            raise ValueError(f"variant {self.variant} has no dct branch but gamma_d = {gd}")
        if gg > 0 and not feat["g"]:
            raise ValueError(f"variant {self.variant} has no gaussian branch but gamma_g = {gg}")
        if self.shared_filter and not feat["filtered"]:
            raise ValueError("shared_filter only applies to filtered variants")
        object.__setattr__(self, "gamma_d", gd)
        object.__setattr__(self, "gamma_g", gg)

    # ---- derived sizes -------------------------------------------------

    @property
    def n(self) -> int:
        return self.height * self.width

    @property
    def block_dim(self) -> int:
        return self.block * self.block

    @property
    def n_blocks(self) -> int:
        return (self.height // self.block) * (self.width // self.block)

    @property
    def m_d(self) -> int:
        return round_half_up(self.gamma_d * self.n) if VARIANTS[self.variant]["d"] else 0

    @property
    def m_g_block(self) -> int:
        if not VARIANTS[self.variant]["g"]:
            return 0
        return round_half_up(self.gamma_g * self.block_dim)

    @property
    def m_total(self) -> int:
        return self.m_d + self.n_blocks * self.m_g_block


def config_to_dict(config: CosoConfig) -> dict:
    return {
        "height": config.height, "width": config.width, "block": config.block,
        "gamma": config.gamma, "gamma_d": config.gamma_d, "gamma_g": config.gamma_g,
        "perm_seed": config.perm_seed, "gauss_seed": config.gauss_seed,
        "variant": config.variant, "shared_filter": config.shared_filter,
        "filter_channels": config.filter_channels, "filter_seed": config.filter_seed,
        "weights_path": config.weights_path,
    }


def config_from_dict(d: dict) -> CosoConfig:
    known = {f: d[f] for f in (
        "height", "width", "block", "gamma", "gamma_d", "gamma_g", "perm_seed",
        "gauss_seed", "variant", "shared_filter", "filter_channels", "filter_seed",
        "weights_path") if f in d}
    if "height" not in known or "width" not in known or "gamma" not in known:
        raise ValueError("config needs at least height, width and gamma")
    return CosoConfig(**known)


def resolve_filter(config: CosoConfig) -> Optional[FilterNet]:
    """The filter a config implies: loaded from file, or seeded fresh."""
    if not VARIANTS[config.variant]["filtered"]:
        return None
    if config.weights_path is not None:
        net = load_weights(config.weights_path)
        if net.channels != config.filter_channels:
            raise ValueError(f"weights file has {net.channels} channels, config says {config.filter_channels}")
        return net
    return init_filter(config.filter_channels, config.filter_seed)


# ---- branch primitives --------------------------------------------------

def d_branch_sample(img: np.ndarray, m_d: int) -> np.ndarray:
    """First m_d zig-zag ordered coefficients of the orthonormal 2-D DCT."""
    h, w = img.shape
    if not 0 <= m_d <= h * w:
        raise ValueError(f"m_d {m_d} outside [0, {h * w}]")
    coef = dct2(img).ravel()
    return coef[zigzag_order(h, w).indices[:m_d]].copy()


def d_branch_adjoint(y_d: np.ndarray, height: int, width: int) -> np.ndarray:
    """Scatter coefficients back to their zig-zag slots and invert the DCT."""
    coef = np.zeros(height * width)
    coef[zigzag_order(height, width).indices[:len(y_d)]] = y_d
    return idct2(coef.reshape(height, width))


def _to_blocks(img: np.ndarray, b: int) -> np.ndarray:
    h, w = img.shape
    return img.reshape(h // b, b, w // b, b).transpose(0, 2, 1, 3).reshape(-1, b * b)


def _from_blocks(blocks: np.ndarray, height: int, width: int, b: int) -> np.ndarray:
    return (blocks.reshape(height // b, width // b, b, b)
            .transpose(0, 2, 1, 3).reshape(height, width))


def g_branch_sample(img: np.ndarray, phi: np.ndarray, block: int,
                    perm: Optional[np.ndarray] = None) -> np.ndarray:
    """Permute pixels (optional), then measure each B x B block with phi.

    Output is block-major: the m_g measurements of block 0 (raster order of
    the block grid), then block 1, and so on.
    """
    h, w = img.shape
    flat = img.ravel()
    if perm is not None:
        flat = flat[perm]
    blocks = _to_blocks(flat.reshape(h, w), block)
    return (blocks @ phi.T).ravel()


def g_branch_adjoint(y_g: np.ndarray, phi: np.ndarray, height: int, width: int,
                     block: int, perm: Optional[np.ndarray] = None) -> np.ndarray:
    m_g = phi.shape[0]
    blocks = y_g.reshape(-1, m_g) @ phi
    flat = _from_blocks(blocks, height, width, block).ravel()
    if perm is not None:
        flat = flat[rng.inverse_permutation(perm)]
    return flat.reshape(height, width)


# ---- assembled operator --------------------------------------------------

@dataclass(frozen=True)
class Measurement:
    """Concatenated measurement [y_d, y_g] plus the config that produced it."""
    y_d: np.ndarray
    y_g: np.ndarray
    config: CosoConfig

    @property
    def y(self) -> np.ndarray:
        return np.concatenate([self.y_d, self.y_g])

    @property
    def m(self) -> int:
        return self.y_d.size + self.y_g.size


def build_coso(config: CosoConfig, net: Optional[FilterNet] = None) -> LinearOperator:
    """Assemble the sampling operator a config describes.

    Returns a LinearOperator on flattened images with kind set to the variant
    name. For filtered variants the net argument overrides the config's
    weights file / seed.
    """
    feat = VARIANTS[config.variant]
    h, w, b = config.height, config.width, config.block
    m_d, m_g = config.m_d, config.m_g_block
    if net is None:
        net = resolve_filter(config)
    elif not feat["filtered"]:
        raise ValueError(f"variant {config.variant} takes no filter")
    z = (config.gamma_d, config.gamma_g)

    perm = rng.permutation(config.n, config.perm_seed) if (feat["g"] and feat["permuted"]) else None
    inv = rng.inverse_permutation(perm) if perm is not None else None
    phi = gaussian_matrix(m_g, config.block_dim, config.gauss_seed).entries if feat["g"] else None

    def forward(xflat):
        img = xflat.reshape(h, w)
        if net is not None:
            x_d, x_g = filter_forward(net, img, z)
            if config.shared_filter:
                x_g = x_d
        else:
            x_d = x_g = img
        parts = []
        if feat["d"]:
            parts.append(d_branch_sample(x_d, m_d))
        if feat["g"]:
            parts.append(g_branch_sample(x_g, phi, b, perm))
        return np.concatenate(parts) if parts else np.zeros(0)

    def adjoint(yflat):
        y_d, y_g = yflat[:m_d], yflat[m_d:]
        g_d = d_branch_adjoint(y_d, h, w) if feat["d"] else np.zeros((h, w))
        if feat["g"]:
            blocks = y_g.reshape(-1, m_g) @ phi
            g_flat = _from_blocks(blocks, h, w, b).ravel()
            if inv is not None:
                g_flat = g_flat[inv]
            g_g = g_flat.reshape(h, w)
        else:
            g_g = np.zeros((h, w))
        if net is not None:
            if config.shared_filter:
                return filter_adjoint(net, g_d + g_g, np.zeros((h, w)), z).ravel()
            return filter_adjoint(net, g_d, g_g, z).ravel()
        return (g_d + g_g).ravel()

    return LinearOperator(config.n, config.m_total, forward, adjoint, kind=config.variant)


def sample_image(img: np.ndarray, config: CosoConfig,
                 net: Optional[FilterNet] = None) -> Measurement:
    """Measure an image; returns the split measurement with its config."""
    img = np.asarray(img, dtype=np.float64)
    if img.shape != (config.height, config.width):
        raise ValueError(f"image shape {img.shape} does not match config "
                         f"({config.height}, {config.width})")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite values")
    y = build_coso(config, net).apply(img.ravel())
    return Measurement(y[:config.m_d].copy(), y[config.m_d:].copy(), config)


def back_project(meas: Measurement) -> tuple:
    """Branch-wise adjoint images used to seed reconstruction.

    Channel one scatters the DCT measurements back and inverts the transform;
    channel two applies the per-block Gaussian transpose and undoes the
    permutation. The conditional filter is deliberately left out: the
    measurements approximate transform coefficients of the image itself, and
    seeding from plain adjoints is what the solver expects. Inactive branches
    yield zero images.
    """
    cfg = meas.config
    feat = VARIANTS[cfg.variant]
    h, w = cfg.height, cfg.width
    chan_d = d_branch_adjoint(meas.y_d, h, w) if feat["d"] else np.zeros((h, w))
    if feat["g"]:
        phi = gaussian_matrix(cfg.m_g_block, cfg.block_dim, cfg.gauss_seed).entries
        perm = rng.permutation(cfg.n, cfg.perm_seed) if feat["permuted"] else None
        chan_g = g_branch_adjoint(meas.y_g, phi, h, w, cfg.block, perm)
    else:
        chan_g = np.zeros((h, w))
    return chan_d, chan_g


def combine_init(chan_d: np.ndarray, chan_g: np.ndarray) -> np.ndarray:
    """Pixel-wise average of the two back-projected channels."""
    if chan_d.shape != chan_g.shape:
        raise ValueError("channel shapes differ")
    return 0.5 * (chan_d + chan_g)


def split_measurement(y: np.ndarray, config: CosoConfig) -> Measurement:
    """Wrap a flat measurement vector in branch order [y_d, y_g]."""
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size != config.m_total:
        raise ValueError(f"measurement length {y.size}, config expects {config.m_total}")
    return Measurement(y[:config.m_d].copy(), y[config.m_d:].copy(), config)


def with_variant(config: CosoConfig, variant: str) -> CosoConfig:
    """Same geometry and seeds, different structural variant."""
    feat = VARIANTS[variant]
    gd, gg = config.gamma_d, config.gamma_g
    if not (feat["d"] and feat["g"]):
        gd, gg = (config.gamma, 0.0) if feat["d"] else (0.0, config.gamma)
    return replace(config, variant=variant, gamma_d=gd, gamma_g=gg,
                   shared_filter=config.shared_filter and feat["filtered"])
