/**
 * Sentence <-> hidden-tensor codec.
 *
 * ENCODE looks each token up in a deterministic embedding table (one row
 * per token, `hidden` columns) and, with squashing enabled, passes the
 * rows through tanh so every transmitted value lands in (-1, 1).  DECODE
 * is greedy and deterministic: without a fine-tuned head each received
 * row snaps to the nearest embedding (noise inside half the codeword
 * distance is absorbed); with one, each row takes the argmax of the
 * trained logits.  The embedding table is derived from a fixed seed, so
 * two processes built from the same vocabulary agree bit for bit.
 */

import * as fs from "node:fs";

import { Tokenizer, PAD_ID } from "./tokenizer";

export const HIDDEN_SIZE = 32;
const EMBED_SEED = 0x5eed1e37;
const EMBED_SPREAD = 3.0; // tanh() of +-3 still leaves ~0.9 of usable range

export interface DecoderHead {
  weights: Float32Array; // [hidden x vocab], row-major by hidden index
  bias: Float32Array; // [vocab]
}

export interface Checkpoint {
  version: 1;
  mode: "s_to_s" | "s_to_sprime";
  hidden: number;
  vocabSize: number;
  vocabFingerprint: string;
  weightsB64: string;
  biasB64: string;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function floatsToB64(values: Float32Array): string {
  const buf = Buffer.allocUnsafe(values.length * 4);
  for (let i = 0; i < values.length; i++) buf.writeFloatLE(values[i], i * 4);
  return buf.toString("base64");
}

export function b64ToFloats(text: string, expected: number): Float32Array {
  const buf = Buffer.from(text, "base64");
  if (buf.length !== expected * 4) {
    throw new Error(`checkpoint array holds ${buf.length / 4} floats, expected ${expected}`);
  }
  const out = new Float32Array(expected);
  for (let i = 0; i < expected; i++) out[i] = buf.readFloatLE(i * 4);
  return out;
}

export class AdapterModel {
  readonly tokenizer: Tokenizer;
  readonly hidden: number;
  readonly maxTokens: number;
  readonly squash: boolean;
  /** [vocabSize x hidden] raw embeddings, row-major. */
  readonly embeddings: Float32Array;
  private readonly squashed: Float32Array;
  private head: DecoderHead | null = null;

  constructor(tokenizer: Tokenizer, opts: { maxTokens: number; squash: boolean; hidden?: number }) {
    this.tokenizer = tokenizer;
    this.hidden = opts.hidden ?? HIDDEN_SIZE;
    this.maxTokens = opts.maxTokens;
    this.squash = opts.squash;
    const rand = mulberry32(EMBED_SEED);
    const n = tokenizer.vocabSize * this.hidden;
    this.embeddings = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      this.embeddings[i] = Math.fround((rand() * 2 - 1) * EMBED_SPREAD);
    }
    this.squashed = new Float32Array(n);
    for (let i = 0; i < n; i++) this.squashed[i] = Math.fround(Math.tanh(this.embeddings[i]));
  }

  /** The table DECODE matches against (squashed when squashing is on). */
  get codebook(): Float32Array {
    return this.squash ? this.squashed : this.embeddings;
  }

  encode(sentence: string): { rows: number; cols: number; values: Float32Array } {
    let tokens = this.tokenizer.encode(sentence);
    if (tokens.length === 0) tokens = [PAD_ID];
    if (tokens.length > this.maxTokens) tokens = tokens.slice(0, this.maxTokens);
    const values = new Float32Array(tokens.length * this.hidden);
    const table = this.codebook;
    tokens.forEach((id, row) => {
      values.set(table.subarray(id * this.hidden, (id + 1) * this.hidden), row * this.hidden);
    });
    return { rows: tokens.length, cols: this.hidden, values };
  }

  decode(rows: number, cols: number, values: Float32Array): string {
    if (cols !== this.hidden) {
      throw new Error(`tensor has ${cols} columns, the model hidden size is ${this.hidden}`);
    }
    const tokens: number[] = [];
    for (let r = 0; r < rows; r++) {
      const row = values.subarray(r * cols, (r + 1) * cols);
      tokens.push(this.head ? this.argmaxLogits(row) : this.nearestToken(row));
    }
    return this.tokenizer.decode(tokens);
  }

  loadHead(head: DecoderHead): void {
    const vocab = this.tokenizer.vocabSize;
    if (head.weights.length !== this.hidden * vocab || head.bias.length !== vocab) {
      throw new Error("decoder head shape does not match the model");
    }
    this.head = head;
  }

  get hasHead(): boolean {
    return this.head !== null;
  }

  private nearestToken(row: Float32Array): number {
    const table = this.codebook;
    let best = 0;
    let bestDist = Infinity;
    for (let id = 0; id < this.tokenizer.vocabSize; id++) {
      let dist = 0;
      const base = id * this.hidden;
      for (let c = 0; c < this.hidden; c++) {
        const d = row[c] - table[base + c];
        dist += d * d;
      }
      if (dist < bestDist) {
        bestDist = dist;
        best = id;
      }
    }
    return best;
  }

  private argmaxLogits(row: Float32Array): number {
    const { weights, bias } = this.head!;
    const vocab = this.tokenizer.vocabSize;
    let best = 0;
    let bestLogit = -Infinity;
    for (let id = 0; id < vocab; id++) {
      let logit = bias[id];
      for (let c = 0; c < this.hidden; c++) logit += row[c] * weights[c * vocab + id];
      if (logit > bestLogit) {
        bestLogit = logit;
        best = id;
      }
    }
    return best;
  }
}

export function loadTokenizer(vocabPath: string): Tokenizer {
  const text = fs.readFileSync(vocabPath, "utf-8");
  const words = text.split("\n").filter((line) => line.trim().length > 0);
  return new Tokenizer(words);
}

export function saveCheckpoint(path: string, model: AdapterModel, head: DecoderHead,
                               mode: Checkpoint["mode"]): void {
  const ckpt: Checkpoint = {
    version: 1,
    mode,
    hidden: model.hidden,
    vocabSize: model.tokenizer.vocabSize,
    vocabFingerprint: model.tokenizer.fingerprint,
    weightsB64: floatsToB64(head.weights),
    biasB64: floatsToB64(head.bias),
  };
  fs.writeFileSync(path, JSON.stringify(ckpt));
}

export function loadCheckpoint(path: string, model: AdapterModel): DecoderHead {
  const ckpt = JSON.parse(fs.readFileSync(path, "utf-8")) as Checkpoint;
  if (ckpt.version !== 1) throw new Error(`unsupported checkpoint version ${ckpt.version}`);
  if (ckpt.hidden !== model.hidden || ckpt.vocabSize !== model.tokenizer.vocabSize ||
      ckpt.vocabFingerprint !== model.tokenizer.fingerprint) {
    throw new Error("checkpoint was trained against a different model or vocabulary");
  }
  const vocab = model.tokenizer.vocabSize;
  return {
    weights: b64ToFloats(ckpt.weightsB64, model.hidden * vocab),
    bias: b64ToFloats(ckpt.biasB64, vocab),
  };
}
