"""Binary checkpoint of the value head.

Layout (all integers little-endian)::

    magic    8 bytes  b"QHEADCKP"
    version  u32      currently 1
    step     u64      gradient steps taken
    nlayers  u32      layers per head (3)
    then for the online head, followed by the target head, per layer:
        rows u32, cols u32
        W    rows*cols float64, row-major
        b    rows float64

Floats are written as raw IEEE-754 doubles so a round trip is bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatVersionMismatch
from .value import Layer, QHeadParams

MAGIC = b"QHEADCKP"
VERSION = 1
_HEADER = struct.Struct("<8sIQI")
_SHAPE = struct.Struct("<II")


def _dump_layers(layers: list[Layer]) -> bytes:
    out = bytearray()
    for W, b in layers:
        rows, cols = W.shape
        out += _SHAPE.pack(rows, cols)
        out += np.ascontiguousarray(W, dtype="<f8").tobytes()
        out += np.ascontiguousarray(b, dtype="<f8").tobytes()
    return bytes(out)


def save_checkpoint(params: QHeadParams, path: str | Path) -> None:
    blob = _HEADER.pack(MAGIC, VERSION, params.step, len(params.layers))
    blob += _dump_layers(params.layers) + _dump_layers(params.target)
    Path(path).write_bytes(blob)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatVersionMismatch("checkpoint is truncated")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def layers(self, n: int) -> list[Layer]:
        out = []
        for _ in range(n):
            rows, cols = _SHAPE.unpack(self.take(_SHAPE.size))
            W = np.frombuffer(self.take(8 * rows * cols), dtype="<f8").reshape(rows, cols).astype(np.float64)
            b = np.frombuffer(self.take(8 * rows), dtype="<f8").astype(np.float64)
            out.append((W, b))
        return out


def load_checkpoint(path: str | Path) -> QHeadParams:
    data = Path(path).read_bytes()  # OSError propagates as the I/O failure
    r = _Reader(data)
    magic, version, step, nlayers = _HEADER.unpack(r.take(_HEADER.size))
    if magic != MAGIC:
        raise FormatVersionMismatch("not a value-head checkpoint")
    if version != VERSION:
        raise FormatVersionMismatch(f"checkpoint version {version}, expected {VERSION}")
    online = r.layers(nlayers)
    target = r.layers(nlayers)
    if r.pos != len(data):
        raise FormatVersionMismatch("trailing bytes after checkpoint payload")
    try:
        return QHeadParams(online, target, step)
    except ValueError as exc:
        raise FormatVersionMismatch(str(exc)) from exc
