"""Frame protocol for talking to an external semantic codec process.

Every message is one frame:

    4 bytes   payload length, big-endian unsigned
    body      ASCII header lines, then a blank line, then the raw payload

Header lines are ``key=value`` terminated by ``\\n``; the blank line ends
the header.  Every message carries ``v=1`` (protocol version), ``type``,
and ``id`` (decimal request id, echoed by responses).  Tensor-bearing
messages add ``rows`` and ``cols``; vector-bearing messages add ``dim``.

Message types:

    requests:   ENCODE (payload: UTF-8 text), DECODE (payload: float32
                little-endian tensor data), EMBED (UTF-8 text), PING
    responses:  TEXT (UTF-8 text), TENSOR (float32 data), VECTOR (float32
                data), PONG, ERROR (UTF-8 message)

Writers emit header keys in the canonical order v, type, id, rows, cols,
dim; readers accept any order.  Frames are hard-capped at 64 MiB.
"""

from __future__ import annotations

import re

import numpy as np

from .core import HiddenTensor, TransportError

PROTOCOL_VERSION = "1"
MAX_FRAME_BYTES = 64 * 1024 * 1024

REQUEST_TYPES = ("ENCODE", "DECODE", "EMBED", "PING")
RESPONSE_TYPES = ("TEXT", "TENSOR", "VECTOR", "PONG", "ERROR")

_KEY_RE = re.compile(r"^[a-z]+$")
_CANONICAL_ORDER = ("v", "type", "id", "rows", "cols", "dim")


def encode_frame(fields: dict[str, str], payload: bytes = b"") -> bytes:
    """Serialize one frame; fields are emitted in canonical key order."""
    for key in fields:
        if not _KEY_RE.match(key):
            raise TransportError(f"invalid header key {key!r}")
    ordered = [k for k in _CANONICAL_ORDER if k in fields]
    ordered += [k for k in sorted(fields) if k not in _CANONICAL_ORDER]
    lines = []
    for key in ordered:
        value = str(fields[key])
        if "\n" in value or not value.isascii():
            raise TransportError(f"invalid header value for {key!r}")
        lines.append(f"{key}={value}\n")
    body = "".join(lines).encode("ascii") + b"\n" + payload
    if len(body) > MAX_FRAME_BYTES:
        raise TransportError(f"frame of {len(body)} bytes exceeds the {MAX_FRAME_BYTES} cap")
    return len(body).to_bytes(4, "big") + body


def decode_frame(body: bytes) -> tuple[dict[str, str], bytes]:
    """Parse a frame body (after the length prefix) into fields + payload."""
    sep = body.find(b"\n\n")
    if sep < 0:
        raise TransportError("frame has no header terminator")
    fields: dict[str, str] = {}
    header = body[:sep + 1]
    try:
        text = header.decode("ascii")
    except UnicodeDecodeError as exc:
        raise TransportError("frame header is not ASCII") from exc
    for line in text.splitlines():
        key, eq, value = line.partition("=")
        if not eq or not _KEY_RE.match(key):
            raise TransportError(f"malformed header line {line!r}")
        if key in fields:
            raise TransportError(f"duplicate header key {key!r}")
        fields[key] = value
    if fields.get("v") != PROTOCOL_VERSION:
        raise TransportError(f"unsupported protocol version {fields.get('v')!r}")
    if "type" not in fields or "id" not in fields:
        raise TransportError("frame is missing type or id")
    if not fields["id"].isdigit():
        raise TransportError(f"request id must be a decimal integer, got {fields['id']!r}")
    return fields, body[sep + 2:]


def read_frame(stream) -> tuple[dict[str, str], bytes]:
    """Read one frame from a binary stream with a ``read`` method."""
    prefix = _read_exact(stream, 4, allow_eof=True)
    if prefix is None:
        raise EOFError("stream closed between frames")
    length = int.from_bytes(prefix, "big")
    if length > MAX_FRAME_BYTES:
        raise TransportError(f"incoming frame of {length} bytes exceeds the cap")
    body = _read_exact(stream, length)
    return decode_frame(body)


def _read_exact(stream, count: int, allow_eof: bool = False):
    chunks = []
    remaining = count
    while remaining:
        chunk = stream.read(remaining)
        if not chunk:
            if allow_eof and remaining == count:
                return None
            raise TransportError("stream closed mid-frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def tensor_fields(kind: str, request_id: int, tensor: HiddenTensor) -> dict[str, str]:
    return {
        "v": PROTOCOL_VERSION,
        "type": kind,
        "id": str(request_id),
        "rows": str(tensor.rows),
        "cols": str(tensor.cols),
    }


def tensor_payload(tensor: HiddenTensor) -> bytes:
    return tensor.values.astype("<f4").tobytes()


def parse_tensor(fields: dict[str, str], payload: bytes) -> HiddenTensor:
    try:
        rows = int(fields["rows"])
        cols = int(fields["cols"])
    except (KeyError, ValueError) as exc:
        raise TransportError("tensor frame is missing valid rows/cols") from exc
    expected = rows * cols * 4
    if rows < 1 or cols < 1 or len(payload) != expected:
        raise TransportError(
            f"tensor payload of {len(payload)} bytes does not match "
            f"({rows}, {cols}) float32")
    values = np.frombuffer(payload, dtype="<f4").reshape(rows, cols)
    return HiddenTensor(values.astype(np.float32))


def parse_vector(fields: dict[str, str], payload: bytes) -> np.ndarray:
    try:
        dim = int(fields["dim"])
    except (KeyError, ValueError) as exc:
        raise TransportError("vector frame is missing a valid dim") from exc
    if dim < 1 or len(payload) != dim * 4:
        raise TransportError(
            f"vector payload of {len(payload)} bytes does not match dim {dim}")
    return np.frombuffer(payload, dtype="<f4").astype(np.float64)
