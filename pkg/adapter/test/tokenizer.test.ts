import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { CAP_ID, PAD_ID, SPACE_ID, Tokenizer } from "../src/tokenizer";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const words = fs.readFileSync(path.join(HERE, "..", "data", "vocab.txt"), "utf-8")
  .split("\n").filter((w) => w.trim());
const tok = new Tokenizer(words);

function roundTrip(s: string): string {
  return tok.decode(tok.encode(s));
}

describe("round trips", () => {
  it("caption-style sentences are exact", () => {
    for (const s of [
      "A black dog is running on the beach.",
      "Two dogs is waiting with another dog at the station.",
      "a group of friends is resting in the park",
      "An older man is fishing near the river.",
    ]) {
      expect(roundTrip(s)).toBe(s);
    }
  });

  it("out-of-vocabulary words spell out through bytes exactly", () => {
    for (const s of [
      "zebra quagga xylophone",
      "café au lait, s'il vous plaît",
      "mixed KnownAndUnknown beach words",
      "éèê", // multi-byte UTF-8 only
    ]) {
      expect(roundTrip(s)).toBe(s);
    }
  });

  it("spacing is preserved, including doubles and edges", () => {
    for (const s of ["", " ", "  ", "a  dog", " leading", "trailing ", "a , b"]) {
      expect(roundTrip(s)).toBe(s);
    }
  });

  it("random printable strings are exact", () => {
    // deterministic LCG so failures reproduce
    let state = 12345;
    const next = () => {
      state = (state * 1103515245 + 12345) & 0x7fffffff;
      return state;
    };
    const alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.,!? 'é中";
    for (let trial = 0; trial < 200; trial++) {
      let s = "";
      const length = next() % 40;
      for (let i = 0; i < length; i++) {
        s += next() % 6 === 0 ? " " : alphabet[next() % alphabet.length];
      }
      expect(roundTrip(s)).toBe(s);
    }
  });
});

describe("token stream shape", () => {
  it("capitalized vocabulary words use the marker, not bytes", () => {
    const tokens = tok.encode("A dog");
    expect(tokens[0]).toBe(CAP_ID);
    expect(tokens[1]).toBeGreaterThanOrEqual(259); // word id, not byte
    expect(tokens[2]).toBe(SPACE_ID);
  });

  it("trailing punctuation splits off the word", () => {
    const plain = tok.encode("beach");
    const stopped = tok.encode("beach.");
    expect(stopped.length).toBe(plain.length + 1);
    expect(stopped.slice(0, plain.length)).toEqual(plain);
  });

  it("pad tokens are invisible to decode", () => {
    const tokens = tok.encode("a dog");
    expect(tok.decode([PAD_ID, ...tokens, PAD_ID])).toBe("a dog");
  });

  it("decode rejects out-of-range ids", () => {
    expect(() => tok.decode([tok.vocabSize])).toThrow(/out of range/);
  });
});

describe("vocabulary validation", () => {
  it("rejects duplicates and whitespace", () => {
    expect(() => new Tokenizer(["dog", "dog"])).toThrow(/duplicate/);
    expect(() => new Tokenizer(["two words"])).toThrow(/whitespace/);
    expect(() => new Tokenizer([""])).toThrow(/whitespace/);
  });

  it("fingerprint is stable and order-sensitive", () => {
    expect(new Tokenizer(["a", "b"]).fingerprint).toBe(new Tokenizer(["a", "b"]).fingerprint);
    expect(new Tokenizer(["a", "b"]).fingerprint).not.toBe(new Tokenizer(["b", "a"]).fingerprint);
  });
});
