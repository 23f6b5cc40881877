/**
 * Reversible word-level tokenizer with byte fallback.
 *
 * Spacing is explicit in the token stream: every gap between
 * space-separated words becomes one SPACE token, so decode is plain
 * concatenation and any input string round-trips exactly.  Trailing
 * punctuation marks split off as their own tokens, and a capitalization
 * marker precedes words whose first letter is upper-case, which lets
 * caption-style text ("A black dog is running on the beach.") reuse an
 * all-lower-case vocabulary.  Words outside the vocabulary are spelled
 * out as per-byte tokens of their UTF-8 encoding.  Token ids are dense:
 * specials, then the 256 byte tokens, then vocabulary words in file
 * order.
 */

export const PAD_ID = 0;
export const CAP_ID = 1;
export const SPACE_ID = 2;
const SPECIALS = 3;
const BYTE_BASE = SPECIALS; // byte b -> id BYTE_BASE + b
const WORD_BASE = BYTE_BASE + 256;

const PUNCT = new Set([".", ",", "!", "?", ";", ":"]);

export class Tokenizer {
  private readonly ids = new Map<string, number>();
  readonly words: string[];

  constructor(words: string[]) {
    this.words = [...words];
    this.words.forEach((w, i) => {
      if (!w || /\s/.test(w)) throw new Error(`vocabulary word ${JSON.stringify(w)} contains whitespace`);
      if (this.ids.has(w)) throw new Error(`duplicate vocabulary word ${JSON.stringify(w)}`);
      this.ids.set(w, WORD_BASE + i);
    });
  }

  get vocabSize(): number {
    return WORD_BASE + this.words.length;
  }

  /** Stable fingerprint so checkpoints can refuse a mismatched vocabulary. */
  get fingerprint(): string {
    let h = 0x811c9dc5;
    const bytes = Buffer.from(this.words.join("\n"), "utf-8");
    for (const b of bytes) {
      h ^= b;
      h = Math.imul(h, 0x01000193) >>> 0;
    }
    return h.toString(16).padStart(8, "0");
  }

  encode(sentence: string): number[] {
    const out: number[] = [];
    sentence.split(" ").forEach((rawWord, index) => {
      if (index > 0) out.push(SPACE_ID);
      if (!rawWord) return;
      let word = rawWord;
      const tail: number[] = [];
      while (word.length > 1 && PUNCT.has(word[word.length - 1])) {
        tail.unshift(...this.wordOrBytes(word[word.length - 1]));
        word = word.slice(0, -1);
      }
      const first = word[0];
      if (first >= "A" && first <= "Z") {
        const lowered = first.toLowerCase() + word.slice(1);
        if (this.ids.has(lowered)) {
          out.push(CAP_ID, this.ids.get(lowered)!, ...tail);
          return;
        }
      }
      out.push(...this.wordOrBytes(word), ...tail);
    });
    return out;
  }

  decode(tokens: number[]): string {
    let text = "";
    let capNext = false;
    let byteRun: number[] = [];
    const flushBytes = () => {
      if (byteRun.length) {
        text += Buffer.from(byteRun).toString("utf-8");
        byteRun = [];
      }
    };
    for (const id of tokens) {
      if (id >= BYTE_BASE && id < WORD_BASE) {
        byteRun.push(id - BYTE_BASE);
        continue;
      }
      flushBytes();
      if (id === PAD_ID) continue;
      if (id === CAP_ID) {
        capNext = true;
      } else if (id === SPACE_ID) {
        text += " ";
      } else {
        const word = this.words[id - WORD_BASE];
        if (word === undefined) throw new Error(`token id ${id} is out of range`);
        text += capNext ? word[0].toUpperCase() + word.slice(1) : word;
        capNext = false;
      }
    }
    flushBytes();
    return text;
  }

  private wordOrBytes(word: string): number[] {
    const id = this.ids.get(word);
    if (id !== undefined) return [id];
    return [...Buffer.from(word, "utf-8")].map((b) => BYTE_BASE + b);
  }
}
