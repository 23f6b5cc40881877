/**
 * Deterministic sentence embedder: signed feature hashing of word
 * unigrams and bigrams into a fixed-dimension unit vector.  A stand-in
 * for a learned sentence encoder with the two properties the link
 * scoring relies on: identical text maps to identical vectors, and
 * overlapping text maps to nearby ones.
 */

export const EMBED_DIM = 384;

function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  const bytes = Buffer.from(text, "utf-8");
  for (const b of bytes) {
    h ^= b;
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

export class HashEmbedder {
  readonly dim: number;

  constructor(dim: number = EMBED_DIM) {
    if (!Number.isInteger(dim) || dim < 2) throw new Error(`embedding dim must be >= 2, got ${dim}`);
    this.dim = dim;
  }

  embed(sentence: string): Float32Array {
    const words = sentence.toLowerCase().split(/\s+/).filter((w) => w.length > 0);
    const vec = new Float64Array(this.dim);
    const grams: string[] = [...words];
    for (let i = 0; i + 1 < words.length; i++) grams.push(`${words[i]} ${words[i + 1]}`);
    for (const gram of grams) {
      const h = fnv1a(gram);
      const bucket = h % this.dim;
      const sign = (h >>> 31) === 0 ? 1 : -1;
      vec[bucket] += sign;
    }
    let norm = 0;
    for (const v of vec) norm += v * v;
    norm = Math.sqrt(norm);
    const out = new Float32Array(this.dim);
    if (norm === 0) {
      out[0] = 1; // canonical vector for empty text keeps cosine defined
      return out;
    }
    for (let i = 0; i < this.dim; i++) out[i] = Math.fround(vec[i] / norm);
    return out;
  }
}

export function cosine(a: Float32Array, b: Float32Array): number {
  if (a.length !== b.length) throw new Error("vectors differ in dimension");
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na === 0 || nb === 0) throw new Error("cosine of a zero vector is undefined");
  return dot / Math.sqrt(na * nb);
}
