"""Binary file formats: extracted matrices, DMD pattern stacks, measurements.

All integers little-endian. All float payloads are little-endian f64, row-major.
Readers are strict: wrong magic, unsupported version, short reads, and trailing
bytes all raise FileFormatError.

CSMX (extracted system):   magic "CSMX", u16 version=1, u64 M, u64 N,
                           f64 Phi[M*N], f64 b[M].
CSMP (DMD pattern stack):  magic "CSMP", u16 version=1, u64 M, u32 H, u32 W,
                           f64 patterns[M*H*W], f64 bias[M].
CSMV (measurement vector): magic "CSMV", u16 version=1, u64 M, u32 L,
                           L bytes UTF-8 config JSON, f64 y[M].
"""

import json
import struct

import numpy as np


class FileFormatError(ValueError):
    pass


_VERSION = 1


def _read_exact(f, count: int, what: str) -> bytes:
    buf = f.read(count)
    if len(buf) != count:
        raise FileFormatError(f"truncated file: wanted {count} bytes for {what}, got {len(buf)}")
    return buf


def _check_header(f, magic: bytes):
    got = f.read(4)
    if got != magic:
        raise FileFormatError(f"bad magic: expected {magic!r}, got {got!r}")
    (ver,) = struct.unpack("<H", _read_exact(f, 2, "version"))
    if ver != _VERSION:
        raise FileFormatError(f"unsupported version {ver}")


def _check_eof(f):
    if f.read(1):
        raise FileFormatError("trailing bytes after payload")


def _read_f64(f, count: int, what: str) -> np.ndarray:
    return np.frombuffer(_read_exact(f, 8 * count, what), dtype="<f8").astype(np.float64)


def write_matrix_file(path, phi: np.ndarray, bias: np.ndarray):
    phi = np.asarray(phi, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64).ravel()
    if phi.ndim != 2 or bias.size != phi.shape[0]:
        raise ValueError("need phi (M, N) and bias (M,)")
    with open(path, "wb") as f:
        f.write(b"CSMX" + struct.pack("<HQQ", _VERSION, phi.shape[0], phi.shape[1]))
        f.write(phi.astype("<f8").tobytes())
        f.write(bias.astype("<f8").tobytes())


def read_matrix_file(path):
    """Returns (phi, bias)."""
    with open(path, "rb") as f:
        _check_header(f, b"CSMX")
        m, n = struct.unpack("<QQ", _read_exact(f, 16, "dimensions"))
        phi = _read_f64(f, m * n, "matrix entries").reshape(m, n)
        bias = _read_f64(f, m, "bias")
        _check_eof(f)
    return phi, bias


def write_pattern_file(path, patterns: np.ndarray, bias: np.ndarray):
    patterns = np.asarray(patterns, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64).ravel()
    if patterns.ndim != 3 or bias.size != patterns.shape[0]:
        raise ValueError("need patterns (M, H, W) and bias (M,)")
    m, h, w = patterns.shape
    with open(path, "wb") as f:
        f.write(b"CSMP" + struct.pack("<HQII", _VERSION, m, h, w))
        f.write(patterns.astype("<f8").tobytes())
        f.write(bias.astype("<f8").tobytes())


def read_pattern_file(path):
    """Returns (patterns, bias)."""
    with open(path, "rb") as f:
        _check_header(f, b"CSMP")
        m, h, w = struct.unpack("<QII", _read_exact(f, 16, "dimensions"))
        patterns = _read_f64(f, m * h * w, "patterns").reshape(m, h, w)
        bias = _read_f64(f, m, "bias")
        _check_eof(f)
    return patterns, bias


def write_measurement_file(path, y: np.ndarray, config: dict):
    y = np.asarray(y, dtype=np.float64).ravel()
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as f:
        f.write(b"CSMV" + struct.pack("<HQI", _VERSION, y.size, len(blob)))
        f.write(blob)
        f.write(y.astype("<f8").tobytes())


def read_measurement_file(path):
    """Returns (y, config_dict)."""
    with open(path, "rb") as f:
        _check_header(f, b"CSMV")
        m, blob_len = struct.unpack("<QI", _read_exact(f, 12, "dimensions"))
        blob = _read_exact(f, blob_len, "config JSON")
        try:
            config = json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise FileFormatError(f"bad config JSON: {e}") from e
        y = _read_f64(f, m, "measurements")
        _check_eof(f)
    return y, config
