import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { FINE_TUNE_DEFAULTS, fineTune, loadPairs } from "../src/finetune";
import { AdapterModel, loadTokenizer } from "../src/model";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const VOCAB = path.join(HERE, "..", "data", "vocab.txt");
const PAIRS = path.join(HERE, "..", "data", "pairs.tsv");

function tempFile(content: string): string {
  const file = path.join(os.tmpdir(), `pairs-${process.pid}-${Math.random().toString(36).slice(2)}.tsv`);
  fs.writeFileSync(file, content);
  return file;
}

describe("loadPairs", () => {
  it("reads the bundled dataset with distinct targets", () => {
    const pairs = loadPairs(PAIRS, "s_to_sprime");
    expect(pairs.length).toBe(200);
    expect(pairs.some((p) => p.target !== p.input)).toBe(true);
    for (const pair of pairs) {
      expect(pair.input.length).toBeGreaterThan(0);
      expect(pair.target.length).toBeGreaterThan(0);
    }
  });

  it("s_to_s mode sets the target equal to the input", () => {
    const pairs = loadPairs(PAIRS, "s_to_s");
    for (const pair of pairs) expect(pair.target).toBe(pair.input);
  });

  it("rejects a pair file with a missing target in s_to_sprime mode", () => {
    const file = tempFile("A dog runs.\tA dog runs.\nNo target here.\n");
    try {
      expect(() => loadPairs(file, "s_to_sprime")).toThrow(/no target column/);
      // the same file is fine when targets are derived from inputs
      expect(loadPairs(file, "s_to_s").length).toBe(2);
    } finally {
      fs.unlinkSync(file);
    }
  });

  it("rejects an empty dataset", () => {
    const file = tempFile("\n  \n");
    try {
      expect(() => loadPairs(file, "s_to_s")).toThrow(/empty/);
    } finally {
      fs.unlinkSync(file);
    }
  });
});

describe("fineTune", () => {
  it("starts from the uniform-softmax loss with a zero-initialised head", async () => {
    const model = new AdapterModel(loadTokenizer(VOCAB), { maxTokens: 64, squash: true });
    const pairs = loadPairs(PAIRS, "s_to_s").slice(0, 4);
    const result = await fineTune(model, pairs, {
      mode: "s_to_s",
      epochs: 1,
      batchSize: 4,
      learningRate: FINE_TUNE_DEFAULTS.learningRate,
    });
    // all-zero logits make every class equally likely
    expect(result.initialLoss).toBeCloseTo(Math.log(model.tokenizer.vocabSize), 3);
    expect(result.steps).toBe(1);
  });

  it("reduces the loss over a smoke-scale run", async () => {
    const model = new AdapterModel(loadTokenizer(VOCAB), { maxTokens: 64, squash: true });
    const pairs = loadPairs(PAIRS, "s_to_s").slice(0, 32);
    const logged: string[] = [];
    const result = await fineTune(model, pairs, {
      mode: "s_to_s",
      epochs: 2,
      batchSize: 4,
      learningRate: 1e-2,
      log: (line) => logged.push(line),
    });
    expect(result.finalLoss).toBeLessThan(result.initialLoss);
    expect(result.losses.length).toBe(result.steps);
    expect(logged.length).toBe(result.steps);
    expect(logged[0]).toMatch(/^step 1 loss /);
  });

  it("trains a head the model can decode with", async () => {
    const model = new AdapterModel(loadTokenizer(VOCAB), { maxTokens: 64, squash: true });
    const pairs = loadPairs(PAIRS, "s_to_s").slice(0, 4);
    const result = await fineTune(model, pairs, {
      mode: "s_to_s",
      epochs: 60,
      batchSize: 4,
      learningRate: 0.3,
    });
    expect(result.finalLoss).toBeLessThan(0.05);
    expect(result.head.weights.length).toBe(model.hidden * model.tokenizer.vocabSize);
    expect(result.head.bias.length).toBe(model.tokenizer.vocabSize);

    model.loadHead(result.head);
    for (const pair of pairs) {
      const tensor = model.encode(pair.input);
      expect(model.decode(tensor.rows, tensor.cols, tensor.values)).toBe(pair.input);
    }
  });
});
