"""Seedable, platform-independent random streams.

Everything random in this package flows through the counter-mode SplitMix64
generator below, so any artifact (Gaussian matrix, permutation, noise vector,
filter weights) is reproducible from a single integer seed on any machine,
independent of numpy's global state or version.

Stream definition: the i-th raw 64-bit word of the stream with seed s is

    value_i = mix64((s + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64)

where mix64 is the SplitMix64 finalizer (xor-shift-multiply chain). Consumers
document how many words they draw and in what order; see the individual
functions.
"""

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64


def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _M1
    z = (z ^ (z >> _U64(27))) * _M2
    return z ^ (z >> _U64(31))


def raw_words(seed: int, start: int, count: int) -> np.ndarray:
    """Words value_start .. value_{start+count-1} of the seed's stream, as uint64."""
    if count < 0:
        raise ValueError("count must be >= 0")
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64(_U64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GAMMA)


def uniforms(seed: int, count: int, start: int = 0) -> np.ndarray:
    """count doubles in (0, 1], one stream word each: u = ((v >> 11) + 1) * 2^-53.

    The +1 keeps 0 out of the range so log(u) below is always finite.
    """
    v = raw_words(seed, start, count)
    return ((v >> _U64(11)).astype(np.float64) + 1.0) * 2.0 ** -53


def normals(seed: int, count: int, start: int = 0) -> np.ndarray:
    """count standard normal doubles via Box-Muller.

    Consumption order: pair k draws u1 from stream word 2k and u2 from word
    2k + 1, then emits z_{2k} = sqrt(-2 ln u1) cos(2 pi u2) followed by
    z_{2k+1} = sqrt(-2 ln u1) sin(2 pi u2). For odd count the trailing sin
    value is dropped (its words are still consumed).
    """
    pairs = (count + 1) // 2
    u = uniforms(seed, 2 * pairs, start)
    r = np.sqrt(-2.0 * np.log(u[0::2]))
    ang = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(ang)
    z[1::2] = r * np.sin(ang)
    return z[:count]


def permutation(n: int, seed: int) -> np.ndarray:
    """Fisher-Yates shuffle of arange(n) driven by the seed's stream.

    Walks i = n-1 down to 1, drawing one stream word per step (word index
    n-1-i) and swapping position i with j = word mod (i + 1). The modulo
    carries a bias of order i / 2^64, irrelevant at any size we handle.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    perm = np.arange(n, dtype=np.int64)
    if n < 2:
        return perm
    words = raw_words(seed, 0, n - 1)
    for k in range(n - 1):
        i = n - 1 - k
        j = int(words[k] % _U64(i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def inverse_permutation(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm), dtype=perm.dtype)
    return inv
