/**
 * Frame protocol shared with the link simulator.
 *
 * One frame is a 4-byte big-endian payload length followed by ASCII
 * "key=value\n" header lines, a blank line, and the raw payload.  Every
 * message carries v=1, type and a decimal id; tensor messages add
 * rows/cols, vector messages add dim.  Writers emit keys in the canonical
 * order v, type, id, rows, cols, dim; readers accept any order.  Frames
 * are hard-capped at 64 MiB.
 */

export const PROTOCOL_VERSION = "1";
export const MAX_FRAME_BYTES = 64 * 1024 * 1024;

export const REQUEST_TYPES = ["ENCODE", "DECODE", "EMBED", "PING"] as const;
export const RESPONSE_TYPES = ["TEXT", "TENSOR", "VECTOR", "PONG", "ERROR"] as const;

const CANONICAL_ORDER = ["v", "type", "id", "rows", "cols", "dim"];
const KEY_RE = /^[a-z]+$/;

export class WireError extends Error {}

export type Fields = Record<string, string>;

export function encodeFrame(fields: Fields, payload: Uint8Array = new Uint8Array(0)): Buffer {
  for (const key of Object.keys(fields)) {
    if (!KEY_RE.test(key)) throw new WireError(`invalid header key ${JSON.stringify(key)}`);
  }
  const ordered = CANONICAL_ORDER.filter((k) => k in fields);
  for (const k of Object.keys(fields).sort()) {
    if (!CANONICAL_ORDER.includes(k)) ordered.push(k);
  }
  let header = "";
  for (const key of ordered) {
    const value = String(fields[key]);
    // eslint-disable-next-line no-control-regex
    if (value.includes("\n") || !/^[\x00-\x7F]*$/.test(value)) {
      throw new WireError(`invalid header value for ${JSON.stringify(key)}`);
    }
    header += `${key}=${value}\n`;
  }
  const head = Buffer.from(header + "\n", "ascii");
  const body = Buffer.concat([head, Buffer.from(payload)]);
  if (body.length > MAX_FRAME_BYTES) {
    throw new WireError(`frame of ${body.length} bytes exceeds the ${MAX_FRAME_BYTES} cap`);
  }
  const prefix = Buffer.allocUnsafe(4);
  prefix.writeUInt32BE(body.length, 0);
  return Buffer.concat([prefix, body]);
}

export function decodeFrame(body: Buffer): { fields: Fields; payload: Buffer } {
  const sep = body.indexOf("\n\n");
  if (sep < 0) throw new WireError("frame has no header terminator");
  const header = body.subarray(0, sep + 1);
  if (header.some((b) => b > 0x7f)) throw new WireError("frame header is not ASCII");
  const fields: Fields = {};
  for (const line of header.toString("ascii").split("\n")) {
    if (!line) continue;
    const eq = line.indexOf("=");
    const key = eq < 0 ? line : line.slice(0, eq);
    if (eq < 0 || !KEY_RE.test(key)) {
      throw new WireError(`malformed header line ${JSON.stringify(line)}`);
    }
    if (key in fields) throw new WireError(`duplicate header key ${JSON.stringify(key)}`);
    fields[key] = line.slice(eq + 1);
  }
  if (fields["v"] !== PROTOCOL_VERSION) {
    throw new WireError(`unsupported protocol version ${JSON.stringify(fields["v"])}`);
  }
  if (!("type" in fields) || !("id" in fields)) {
    throw new WireError("frame is missing type or id");
  }
  if (!/^[0-9]+$/.test(fields["id"])) {
    throw new WireError(`request id must be a decimal integer, got ${JSON.stringify(fields["id"])}`);
  }
  return { fields, payload: Buffer.from(body.subarray(sep + 2)) };
}

/** Incremental deframer for a byte stream; feed chunks, pull whole frames. */
export class FrameReader {
  private acc: Buffer = Buffer.alloc(0);

  feed(chunk: Buffer): { fields: Fields; payload: Buffer }[] {
    this.acc = this.acc.length ? Buffer.concat([this.acc, chunk]) : Buffer.from(chunk);
    const frames: { fields: Fields; payload: Buffer }[] = [];
    for (;;) {
      if (this.acc.length < 4) break;
      const length = this.acc.readUInt32BE(0);
      if (length > MAX_FRAME_BYTES) {
        throw new WireError(`incoming frame of ${length} bytes exceeds the cap`);
      }
      if (this.acc.length < 4 + length) break;
      const body = this.acc.subarray(4, 4 + length);
      this.acc = Buffer.from(this.acc.subarray(4 + length));
      frames.push(decodeFrame(body));
    }
    return frames;
  }

  /** Bytes sitting in the buffer that do not yet form a whole frame. */
  get pending(): number {
    return this.acc.length;
  }
}

export function tensorFrame(kind: string, id: string, rows: number, cols: number,
                            values: Float32Array): Buffer {
  const payload = Buffer.allocUnsafe(values.length * 4);
  for (let i = 0; i < values.length; i++) payload.writeFloatLE(values[i], i * 4);
  return encodeFrame(
    { v: PROTOCOL_VERSION, type: kind, id, rows: String(rows), cols: String(cols) },
    payload);
}

export function parseTensor(fields: Fields, payload: Buffer): { rows: number; cols: number; values: Float32Array } {
  const rows = Number(fields["rows"]);
  const cols = Number(fields["cols"]);
  if (!Number.isInteger(rows) || !Number.isInteger(cols)) {
    throw new WireError("tensor frame is missing valid rows/cols");
  }
  if (rows < 1 || cols < 1 || payload.length !== rows * cols * 4) {
    throw new WireError(
      `tensor payload of ${payload.length} bytes does not match (${rows}, ${cols}) float32`);
  }
  const values = new Float32Array(rows * cols);
  for (let i = 0; i < values.length; i++) values[i] = payload.readFloatLE(i * 4);
  return { rows, cols, values };
}

export function vectorFrame(id: string, values: Float32Array): Buffer {
  const payload = Buffer.allocUnsafe(values.length * 4);
  for (let i = 0; i < values.length; i++) payload.writeFloatLE(values[i], i * 4);
  return encodeFrame(
    { v: PROTOCOL_VERSION, type: "VECTOR", id, dim: String(values.length) },
    payload);
}

export function errorFrame(id: string, message: string): Buffer {
  return encodeFrame({ v: PROTOCOL_VERSION, type: "ERROR", id }, Buffer.from(message, "utf-8"));
}
