/**
 * Protocol server for the semantic codec.
 *
 * Each connection runs a sequential request loop: ENCODE text ->
 * TENSOR, DECODE tensor -> TEXT, EMBED text -> VECTOR, PING -> PONG.
 * Requests that fail inside the model answer with an ERROR frame
 * carrying the request id and the connection stays alive; an unreadable
 * frame answers ERROR with id 0 and closes the connection, since framing
 * can no longer be trusted.  Serving is stateless across requests.
 */

import * as net from "node:net";
import type { Readable, Writable } from "node:stream";

import { AdapterModel } from "./model";
import { HashEmbedder } from "./embedder";
import {
  Fields,
  FrameReader,
  PROTOCOL_VERSION,
  WireError,
  encodeFrame,
  errorFrame,
  parseTensor,
  tensorFrame,
  vectorFrame,
} from "./wire";

export interface Handlers {
  model: AdapterModel;
  embedder: HashEmbedder;
}

export function handleRequest(fields: Fields, payload: Buffer, h: Handlers): Buffer {
  const kind = fields["type"];
  const id = fields["id"];
  if (kind === "PING") {
    return encodeFrame({ v: PROTOCOL_VERSION, type: "PONG", id });
  }
  if (kind === "ENCODE") {
    const { rows, cols, values } = h.model.encode(payload.toString("utf-8"));
    return tensorFrame("TENSOR", id, rows, cols, values);
  }
  if (kind === "DECODE") {
    const { rows, cols, values } = parseTensor(fields, payload);
    const text = h.model.decode(rows, cols, values);
    return encodeFrame({ v: PROTOCOL_VERSION, type: "TEXT", id }, Buffer.from(text, "utf-8"));
  }
  if (kind === "EMBED") {
    return vectorFrame(id, h.embedder.embed(payload.toString("utf-8")));
  }
  return errorFrame(id, `unsupported request type '${kind}'`);
}

/** Serve frames on a stream pair until EOF; returns when the peer closes. */
export function serveStream(input: Readable, output: Writable, h: Handlers): Promise<void> {
  return new Promise((resolve) => {
    const reader = new FrameReader();
    let closed = false;
    const finish = () => {
      if (!closed) {
        closed = true;
        resolve();
      }
    };
    input.on("data", (chunk: Buffer) => {
      let frames;
      try {
        frames = reader.feed(chunk);
      } catch (err) {
        output.write(errorFrame("0", err instanceof Error ? err.message : String(err)));
        input.removeAllListeners("data");
        finish();
        return;
      }
      for (const { fields, payload } of frames) {
        let response: Buffer;
        try {
          response = handleRequest(fields, payload, h);
        } catch (err) {
          response = errorFrame(fields["id"], err instanceof Error ? err.message : String(err));
        }
        output.write(response);
      }
    });
    input.on("end", finish);
    input.on("error", finish);
  });
}

export class AdapterServer {
  private server: net.Server;

  constructor(private handlers: Handlers) {
    this.server = net.createServer((socket) => {
      socket.on("error", () => socket.destroy());
      void serveStream(socket, socket, this.handlers).then(() => socket.end());
    });
  }

  listen(port: number, host = "127.0.0.1"): Promise<number> {
    return new Promise((resolve, reject) => {
      this.server.once("error", reject);
      this.server.listen(port, host, () => {
        const addr = this.server.address() as net.AddressInfo;
        resolve(addr.port);
      });
    });
  }

  close(): Promise<void> {
    return new Promise((resolve) => this.server.close(() => resolve()));
  }
}
