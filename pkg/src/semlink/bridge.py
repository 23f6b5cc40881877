"""Tensor-to-bits bridge between a semantic codec and the channel coder.

Serialized layout (all little-endian byte order, bits streamed MSB-first
within each byte, matching ``core.pack_bits``):

    header, 160 bits total:
        rows          uint32
        cols          uint32
        payload_bits  uint64
        format id     uint32   (0 = fp32, 1 = fixed16)
    payload, payload_bits bits:
        fp32:    rows*cols IEEE-754 single-precision values
        fixed16: rows*cols uint16 values, v quantized as
                 round((v + 1) / 2 * 65535)

The bit stream is segmented into equal blocks of ``capacity_bits`` (the
payload capacity of the active channel code), zero-padding the tail; the
header's ``payload_bits`` field makes the padding unambiguous on receive.

Why fp32 is fragile here: bit 30 is the top exponent bit, so one flip can
turn 1.0 (0x3F800000) into +inf (0x7F800000).  The "clamp" sanitize policy
repairs non-finite and out-of-range values after deserialization; "raw"
passes them through so the failure mode stays observable.  The fixed16
format cannot produce non-finite values at all.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .core import (
    BitBlock,
    CapacityError,
    FrameError,
    HiddenTensor,
    InputError,
    ParameterError,
)

HEADER_BITS = 160
_HEADER_STRUCT = struct.Struct("<IIQI")

FMT_FP32 = 0
FMT_FIXED16 = 1
_BITS_PER_VALUE = {FMT_FP32: 32, FMT_FIXED16: 16}
_FMT_NAMES = {"fp32": FMT_FP32, "fixed16": FMT_FIXED16}

SANITIZE_POLICIES = ("clamp", "raw")

ATANH_CLAMP_EPS = 1e-6


@dataclass(frozen=True)
class FrameHeader:
    """Shape and layout metadata for one serialized tensor."""

    rows: int
    cols: int
    payload_bits: int
    fmt: int = FMT_FP32
    block_count: int = 0
    pad_bits: int = 0


def squash(tensor: HiddenTensor) -> HiddenTensor:
    """tanh squashing into [-1, 1]; rejects non-finite input."""
    vals = tensor.values
    if not np.all(np.isfinite(vals)):
        raise InputError("squash input contains non-finite values")
    return HiddenTensor(np.tanh(vals))


def unsquash(tensor: HiddenTensor, clamp_eps: float = ATANH_CLAMP_EPS) -> HiddenTensor:
    """Inverse of ``squash`` with magnitudes clamped to 1 - clamp_eps.

    The clamp keeps atanh finite when channel damage or sanitization leaves
    values at exactly +-1.
    """
    if not 0 < clamp_eps < 1:
        raise ParameterError(f"clamp_eps must be in (0, 1), got {clamp_eps}")
    vals = tensor.values.astype(np.float64)
    if not np.all(np.isfinite(vals)):
        raise InputError("unsquash input contains non-finite values")
    limit = 1.0 - clamp_eps
    return HiddenTensor(np.arctanh(np.clip(vals, -limit, limit)).astype(np.float32))


def _serialize_payload(values: np.ndarray, fmt: int) -> bytes:
    if fmt == FMT_FP32:
        return values.astype("<f4").tobytes()
    scaled = np.round((values.astype(np.float64) + 1.0) / 2.0 * 65535.0)
    return scaled.astype("<u2").tobytes()


def tensor_to_bits(tensor: HiddenTensor, capacity_bits: int,
                   fmt: str = "fp32") -> tuple[list[BitBlock], FrameHeader]:
    """Serialize a tensor into equal-size bit blocks plus its header.

    The tensor must already be squashed or clamped into [-1, 1]; values
    outside that range (or non-finite) are a contract violation because the
    receive-side clamp policy could not distinguish them from damage.
    """
    if capacity_bits < 1:
        raise ParameterError(f"capacity_bits must be >= 1, got {capacity_bits}")
    if fmt not in _FMT_NAMES:
        raise ParameterError(f"unknown format {fmt!r}, expected one of {sorted(_FMT_NAMES)}")
    fmt_id = _FMT_NAMES[fmt]
    vals = tensor.values
    if not np.all((vals >= -1.0) & (vals <= 1.0)):
        raise InputError("tensor values must lie in [-1, 1] before serialization")
    rows, cols = vals.shape
    if rows >= 1 << 32 or cols >= 1 << 32:
        raise CapacityError(f"tensor shape {vals.shape} exceeds 32-bit header fields")
    payload_bits = rows * cols * _BITS_PER_VALUE[fmt_id]
    if payload_bits >= 1 << 64:
        raise CapacityError(f"payload of {payload_bits} bits exceeds the 64-bit length field")
    header_bytes = _HEADER_STRUCT.pack(rows, cols, payload_bits, fmt_id)
    stream = header_bytes + _serialize_payload(vals, fmt_id)
    bits = np.unpackbits(np.frombuffer(stream, dtype=np.uint8))
    total_bits = HEADER_BITS + payload_bits
    block_count = -(-total_bits // capacity_bits)
    pad_bits = block_count * capacity_bits - total_bits
    padded = np.zeros(block_count * capacity_bits, dtype=np.uint8)
    padded[:total_bits] = bits
    header = FrameHeader(rows, cols, payload_bits, fmt_id, block_count, pad_bits)
    blocks = [BitBlock(row) for row in padded.reshape(block_count, capacity_bits)]
    return blocks, header


def _sanitize_clamp(vals: np.ndarray) -> np.ndarray:
    out = vals.copy()
    out[np.isnan(out)] = 0.0
    out[np.isposinf(out)] = 1.0
    out[np.isneginf(out)] = -1.0
    return np.clip(out, -1.0, 1.0)


def bits_to_tensor(blocks: list[BitBlock], sanitize: str = "clamp") -> HiddenTensor:
    """Reassemble a tensor from decoded bit blocks.

    Raises ``FrameError`` when the header is structurally inconsistent
    (impossible shape, payload larger than the received bits, unknown
    format).  Value damage inside the payload is not an error; the sanitize
    policy decides what happens to it: "clamp" repairs NaN to 0, +-inf to
    +-1, and clips to [-1, 1]; "raw" returns the bits as they arrived.
    """
    if sanitize not in SANITIZE_POLICIES:
        raise ParameterError(f"unknown sanitize policy {sanitize!r}")
    if not blocks:
        raise FrameError("no blocks to reassemble")
    bits = np.concatenate([b.bits for b in blocks])
    if bits.size < HEADER_BITS:
        raise FrameError(f"{bits.size} bits cannot hold a {HEADER_BITS}-bit header")
    header_bytes = np.packbits(bits[:HEADER_BITS]).tobytes()
    rows, cols, payload_bits, fmt_id = _HEADER_STRUCT.unpack(header_bytes)
    if rows < 1 or cols < 1:
        raise FrameError(f"invalid tensor shape ({rows}, {cols}) in header")
    if fmt_id not in _BITS_PER_VALUE:
        raise FrameError(f"unknown payload format id {fmt_id}")
    if payload_bits != rows * cols * _BITS_PER_VALUE[fmt_id]:
        raise FrameError(
            f"payload_bits {payload_bits} does not match shape ({rows}, {cols})")
    if payload_bits > bits.size - HEADER_BITS:
        raise FrameError(
            f"payload of {payload_bits} bits exceeds the {bits.size - HEADER_BITS} received")
    payload = np.packbits(bits[HEADER_BITS:HEADER_BITS + payload_bits]).tobytes()
    if fmt_id == FMT_FP32:
        vals = np.frombuffer(payload, dtype="<f4").astype(np.float32).reshape(rows, cols)
        if sanitize == "clamp":
            vals = _sanitize_clamp(vals)
    else:
        q = np.frombuffer(payload, dtype="<u2").astype(np.float64).reshape(rows, cols)
        vals = (q / 65535.0 * 2.0 - 1.0).astype(np.float32)
    return HiddenTensor(vals)
