"""Loopback adapter: an in-process reference server for the frame protocol.

Serves the byte codec and the hash embedding provider over TCP (or stdio
when run as a module), so the external-codec path can be exercised without
any model runtime.  ENCODE of a sentence returns a tensor that DECODE maps
back to exactly the same sentence, which makes this the echo-mode fixture
for round-trip tests; it is also a working protocol reference for adapter
implementations.

Run standalone:  python -m semlink.loopback [--port P | --stdio]
"""

from __future__ import annotations

import argparse
import socket
import socketserver
import sys
import threading

from .core import LinkError, TransportError
from .metrics import HashEmbeddingProvider
from .pipeline import ReferenceByteCodec
from .wire import (
    PROTOCOL_VERSION,
    encode_frame,
    parse_tensor,
    read_frame,
    tensor_payload,
)


def _handle_request(fields, payload, codec, provider):
    kind = fields["type"]
    request_id = fields["id"]
    if kind == "PING":
        return encode_frame({"v": PROTOCOL_VERSION, "type": "PONG", "id": request_id})
    if kind == "ENCODE":
        tensor = codec.encode(payload.decode("utf-8", errors="replace"))
        out = {"v": PROTOCOL_VERSION, "type": "TENSOR", "id": request_id,
               "rows": str(tensor.rows), "cols": str(tensor.cols)}
        return encode_frame(out, tensor_payload(tensor))
    if kind == "DECODE":
        tensor = parse_tensor(fields, payload)
        text = codec.decode(tensor)
        return encode_frame({"v": PROTOCOL_VERSION, "type": "TEXT", "id": request_id},
                            text.encode("utf-8"))
    if kind == "EMBED":
        vec = provider.embed(payload.decode("utf-8", errors="replace"))
        out = {"v": PROTOCOL_VERSION, "type": "VECTOR", "id": request_id,
               "dim": str(vec.size)}
        return encode_frame(out, vec.astype("<f4").tobytes())
    return encode_frame({"v": PROTOCOL_VERSION, "type": "ERROR", "id": request_id},
                        f"unsupported request type {kind!r}".encode())


def serve_stream(reader, writer, codec=None, provider=None) -> None:
    """Serve frames on a binary stream pair until EOF."""
    codec = codec if codec is not None else ReferenceByteCodec()
    provider = provider if provider is not None else HashEmbeddingProvider()
    while True:
        try:
            fields, payload = read_frame(reader)
        except EOFError:
            return
        except TransportError as exc:
            writer.write(encode_frame(
                {"v": PROTOCOL_VERSION, "type": "ERROR", "id": "0"},
                str(exc).encode()))
            writer.flush()
            return
        try:
            response = _handle_request(fields, payload, codec, provider)
        except LinkError as exc:
            response = encode_frame(
                {"v": PROTOCOL_VERSION, "type": "ERROR", "id": fields["id"]},
                str(exc).encode())
        writer.write(response)
        writer.flush()


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        stream = self.request.makefile("rwb")
        try:
            serve_stream(stream, stream, self.server.codec, self.server.provider)
        finally:
            stream.close()


class LoopbackServer(socketserver.ThreadingTCPServer):
    """TCP adapter server; ``with LoopbackServer() as srv: srv.port``."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 codec=None, provider=None):
        super().__init__((host, port), _Handler)
        self.codec = codec if codec is not None else ReferenceByteCodec()
        self.provider = provider if provider is not None else HashEmbeddingProvider()
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.server_address[1]

    def start(self) -> "LoopbackServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
        self.server_close()

    def __enter__(self) -> "LoopbackServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="loopback semantic codec adapter")
    parser.add_argument("--port", type=int, default=0, help="TCP port (0 picks one)")
    parser.add_argument("--stdio", action="store_true", help="serve on stdin/stdout")
    args = parser.parse_args(argv)
    if args.stdio:
        serve_stream(sys.stdin.buffer, sys.stdout.buffer)
        return 0
    server = LoopbackServer(port=args.port)
    print(f"listening on 127.0.0.1:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
