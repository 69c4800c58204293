"""TNS1 binary tensor files.

Layout: ``b"TNS1"``, one dtype byte (0 real float64, 1 complex128 as
interleaved re/im float64), three little-endian u32 dimensions (n1, n2, n3),
then the values slice by slice, each slice row-major, little-endian.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"TNS1"
HEADER = struct.Struct("<4sB3I")
MAX_ENTRIES = 2**40


class TnsParseError(ValueError):
    def __init__(self, msg: str, offset: int):
        super().__init__(f"{msg} (byte offset {offset})")
        self.offset = offset


def encode_tensor(t, dtype: str | None = None) -> bytes:
    t = np.asarray(t)
    if t.ndim != 3:
        raise ValueError(f"expected an order-3 tensor, got ndim={t.ndim}")
    if dtype is None:
        dtype = "real" if not np.iscomplexobj(t) or not np.any(t.imag) else "complex"
    code = {"real": 0, "complex": 1}[dtype]
    payload = np.transpose(t, (2, 0, 1))
    if code == 0:
        if np.iscomplexobj(payload) and np.any(payload.imag):
            raise ValueError("tensor has imaginary part; cannot store as real")
        payload = np.ascontiguousarray(np.real(payload), dtype="<f8")
    else:
        payload = np.ascontiguousarray(payload, dtype="<c16")
    return HEADER.pack(MAGIC, code, *t.shape) + payload.tobytes()


def decode_tensor(buf: bytes) -> np.ndarray:
    if len(buf) < HEADER.size:
        raise TnsParseError(f"file too short for header ({len(buf)} < {HEADER.size} bytes)", len(buf))
    magic, code, n1, n2, n3 = HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise TnsParseError(f"bad magic {magic!r}", 0)
    if code not in (0, 1):
        raise TnsParseError(f"unknown dtype code {code}", 4)
    count = n1 * n2 * n3
    if count > MAX_ENTRIES:
        raise TnsParseError(f"dimension overflow: {n1}x{n2}x{n3}", 5)
    width = 8 if code == 0 else 16
    need = HEADER.size + count * width
    if len(buf) < need:
        raise TnsParseError(f"truncated payload: expected {need} bytes, got {len(buf)}", len(buf))
    if len(buf) > need:
        raise TnsParseError(f"{len(buf) - need} trailing bytes after payload", need)
    raw = np.frombuffer(buf, dtype="<f8" if code == 0 else "<c16", count=count, offset=HEADER.size)
    return np.ascontiguousarray(
        np.transpose(raw.reshape(n3, n1, n2), (1, 2, 0)).astype(np.complex128)
    )


def save_tensor_file(t, path, dtype: str | None = None) -> None:
    Path(path).write_bytes(encode_tensor(t, dtype))


def load_tensor_file(path) -> np.ndarray:
    return decode_tensor(Path(path).read_bytes())
