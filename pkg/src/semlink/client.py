"""Client for an external semantic codec speaking the frame protocol.

One request is in flight at a time per connection; request ids increase
monotonically and responses must echo them.  Any protocol violation, ERROR
response, timeout, or broken pipe surfaces as ``TransportError`` so callers
can tell infrastructure failures apart from channel-induced damage.
"""

from __future__ import annotations

import socket
import subprocess
import threading

import numpy as np

from .core import HiddenTensor, TransportError
from .wire import (
    PROTOCOL_VERSION,
    encode_frame,
    parse_tensor,
    parse_vector,
    read_frame,
    tensor_fields,
    tensor_payload,
)

DEFAULT_TIMEOUT = 120.0


class ExternalCodecClient:
    """Semantic codec and embedding provider backed by an adapter process."""

    def __init__(self, reader, writer, timeout: float = DEFAULT_TIMEOUT, closer=None):
        self._reader = reader
        self._writer = writer
        self._closer = closer
        self._timeout = timeout
        self._lock = threading.Lock()
        self._next_id = 1

    @classmethod
    def tcp(cls, host: str, port: int, timeout: float = DEFAULT_TIMEOUT) -> "ExternalCodecClient":
        """Connect to an adapter listening on a TCP socket."""
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise TransportError(f"cannot connect to adapter at {host}:{port}: {exc}") from exc
        sock.settimeout(timeout)
        stream = sock.makefile("rwb")
        return cls(stream, stream, timeout, closer=lambda: (stream.close(), sock.close()))

    @classmethod
    def stdio(cls, argv: list[str], timeout: float = DEFAULT_TIMEOUT) -> "ExternalCodecClient":
        """Spawn an adapter subprocess and talk over its stdio pipes."""
        try:
            proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE)
        except OSError as exc:
            raise TransportError(f"cannot start adapter {argv!r}: {exc}") from exc

        def close():
            proc.stdin.close()
            proc.stdout.close()
            proc.terminate()
            proc.wait(timeout=5)

        return cls(proc.stdout, proc.stdin, timeout, closer=close)

    def _roundtrip(self, fields: dict[str, str], payload: bytes,
                   expect: str) -> tuple[dict[str, str], bytes]:
        with self._lock:
            request_id = self._next_id
            self._next_id += 1
            fields = dict(fields, v=PROTOCOL_VERSION, id=str(request_id))
            try:
                self._writer.write(encode_frame(fields, payload))
                self._writer.flush()
                resp_fields, resp_payload = read_frame(self._reader)
            except TransportError:
                raise
            except (OSError, EOFError, socket.timeout) as exc:
                raise TransportError(f"adapter connection failed: {exc}") from exc
        if resp_fields.get("id") != str(request_id):
            raise TransportError(
                f"response id {resp_fields.get('id')!r} does not match request {request_id}")
        if resp_fields.get("type") == "ERROR":
            message = resp_payload.decode("utf-8", errors="replace")
            raise TransportError(f"adapter error: {message}")
        if resp_fields.get("type") != expect:
            raise TransportError(
                f"expected {expect} response, got {resp_fields.get('type')!r}")
        return resp_fields, resp_payload

    def encode(self, sentence: str) -> HiddenTensor:
        fields, payload = self._roundtrip(
            {"type": "ENCODE"}, sentence.encode("utf-8"), "TENSOR")
        return parse_tensor(fields, payload)

    def decode(self, tensor: HiddenTensor) -> str:
        fields = tensor_fields("DECODE", 0, tensor)
        del fields["id"], fields["v"]
        _fields, payload = self._roundtrip(fields, tensor_payload(tensor), "TEXT")
        return payload.decode("utf-8", errors="replace")

    def embed(self, sentence: str) -> np.ndarray:
        fields, payload = self._roundtrip(
            {"type": "EMBED"}, sentence.encode("utf-8"), "VECTOR")
        return parse_vector(fields, payload)

    def ping(self) -> bool:
        self._roundtrip({"type": "PING"}, b"", "PONG")
        return True

    def close(self) -> None:
        if self._closer is not None:
            try:
                self._closer()
            except OSError:
                pass
            self._closer = None

    def __enter__(self) -> "ExternalCodecClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
