"""Matrix and image-sequence file formats.

Binary matrix layout::

    b"LRMX" | rows:u64le | cols:u64le | rows*cols float64le (row-major)

An image sequence is a 24-byte header ``T, height, width`` (u64le) followed
by ``T`` binary matrix records of shape ``height x width``.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .matrix import as_matrix

MAGIC = b"LRMX"
_DIMS = struct.Struct("<QQ")
_SEQ_HEADER = struct.Struct("<QQQ")


def _encode_matrix(y):
    y = as_matrix(y)
    rows, cols = y.shape
    return MAGIC + _DIMS.pack(rows, cols) + y.astype("<f8", copy=False).tobytes(order="C")


def _decode_matrix(buf, offset=0):
    if buf[offset:offset + 4] != MAGIC:
        raise ParameterError("missing LRMX magic bytes")
    offset += 4
    if len(buf) < offset + _DIMS.size:
        raise ParameterError("truncated LRMX header")
    rows, cols = _DIMS.unpack_from(buf, offset)
    offset += _DIMS.size
    nbytes = rows * cols * 8
    if len(buf) < offset + nbytes:
        raise ParameterError(f"truncated LRMX payload: expected {nbytes} bytes")
    data = np.frombuffer(buf, dtype="<f8", count=rows * cols, offset=offset)
    return data.reshape(rows, cols).astype(np.float64), offset + nbytes


def detect_format(path):
    with open(path, "rb") as fh:
        return "bin" if fh.read(4) == MAGIC else "csv"


def read_matrix(path, fmt=None):
    """Load a matrix from CSV or LRMX binary; ``fmt=None`` sniffs the magic bytes."""
    path = Path(path)
    fmt = fmt or detect_format(path)
    if fmt == "bin":
        y, _ = _decode_matrix(path.read_bytes())
        return as_matrix(y)
    if fmt == "csv":
        y = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
        return as_matrix(y)
    raise ParameterError(f"unknown matrix format {fmt!r}")


def write_matrix(path, y, fmt="bin"):
    path = Path(path)
    if fmt == "bin":
        path.write_bytes(_encode_matrix(y))
    elif fmt == "csv":
        np.savetxt(path, as_matrix(y), delimiter=",", fmt="%.17g")
    else:
        raise ParameterError(f"unknown matrix format {fmt!r}")


def read_sequence(path):
    """Load a (T, height, width) image sequence."""
    buf = Path(path).read_bytes()
    if len(buf) < _SEQ_HEADER.size:
        raise ParameterError("truncated sequence header")
    frames, height, width = _SEQ_HEADER.unpack_from(buf, 0)
    offset = _SEQ_HEADER.size
    out = np.empty((frames, height, width))
    for t in range(frames):
        frame, offset = _decode_matrix(buf, offset)
        if frame.shape != (height, width):
            raise ParameterError(
                f"frame {t} has shape {frame.shape}, header says {(height, width)}"
            )
        out[t] = frame
    return out


def write_sequence(path, seq):
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 3:
        raise ParameterError(f"sequence must be (T, height, width), got {seq.shape}")
    parts = [_SEQ_HEADER.pack(*seq.shape)]
    parts.extend(_encode_matrix(frame) for frame in seq)
    Path(path).write_bytes(b"".join(parts))
