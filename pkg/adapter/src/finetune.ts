/**
 * Decoder-head fine-tuning.
 *
 * Reads tab-separated sentence pairs, maps each input token to its
 * hidden-state row and trains a linear head to predict the aligned
 * target token with token-level cross-entropy.  Mode s_to_s sets the
 * target equal to the input (identity reconstruction); s_to_sprime
 * keeps the file's second column.  Targets are padded or truncated to
 * the input length and pad positions are masked out of the loss.
 * Defaults are smoke-scale; full-corpus training is a matter of data,
 * not code.
 */

import * as fs from "node:fs";

import * as tf from "@tensorflow/tfjs";

import { AdapterModel, DecoderHead } from "./model";
import { PAD_ID } from "./tokenizer";

export type FineTuneMode = "s_to_s" | "s_to_sprime";

export interface FineTuneOptions {
  mode: FineTuneMode;
  epochs: number;
  batchSize: number; // sentences per optimizer step
  learningRate: number;
  log?: (line: string) => void;
}

export const FINE_TUNE_DEFAULTS = { epochs: 1, batchSize: 4, learningRate: 5e-5 };

export interface FineTuneResult {
  head: DecoderHead;
  steps: number;
  initialLoss: number;
  finalLoss: number;
  losses: number[];
}

export function loadPairs(path: string, mode: FineTuneMode): { input: string; target: string }[] {
  const text = fs.readFileSync(path, "utf-8");
  const pairs: { input: string; target: string }[] = [];
  for (const line of text.split("\n")) {
    if (!line.trim()) continue;
    const [input, target] = line.split("\t");
    if (mode === "s_to_sprime" && (target === undefined || !target.trim())) {
      throw new Error(`dataset line has no target column: ${JSON.stringify(line)}`);
    }
    pairs.push({ input, target: mode === "s_to_s" ? input : target });
  }
  if (pairs.length === 0) throw new Error(`dataset ${path} is empty`);
  return pairs;
}

function exampleTensors(model: AdapterModel, input: string, target: string):
    { features: number[][]; labels: number[] } {
  let inputTokens = model.tokenizer.encode(input);
  if (inputTokens.length === 0) inputTokens = [PAD_ID];
  if (inputTokens.length > model.maxTokens) inputTokens = inputTokens.slice(0, model.maxTokens);
  const targetTokens = model.tokenizer.encode(target);
  const table = model.codebook;
  const features: number[][] = [];
  const labels: number[] = [];
  inputTokens.forEach((id, pos) => {
    const label = pos < targetTokens.length ? targetTokens[pos] : PAD_ID;
    if (label === PAD_ID) return; // pad positions carry no gradient
    features.push([...table.subarray(id * model.hidden, (id + 1) * model.hidden)]);
    labels.push(label);
  });
  return { features, labels };
}

export async function fineTune(model: AdapterModel,
                               pairs: { input: string; target: string }[],
                               opts: FineTuneOptions): Promise<FineTuneResult> {
  const vocab = model.tokenizer.vocabSize;
  const log = opts.log ?? (() => undefined);
  const kernel = tf.variable(tf.zeros([model.hidden, vocab]), true);
  const bias = tf.variable(tf.zeros([vocab]), true);
  const optimizer = tf.train.adam(opts.learningRate);

  const losses: number[] = [];
  let step = 0;
  for (let epoch = 0; epoch < opts.epochs; epoch++) {
    for (let at = 0; at < pairs.length; at += opts.batchSize) {
      const batch = pairs.slice(at, at + opts.batchSize);
      const features: number[][] = [];
      const labels: number[] = [];
      for (const pair of batch) {
        const ex = exampleTensors(model, pair.input, pair.target);
        features.push(...ex.features);
        labels.push(...ex.labels);
      }
      if (features.length === 0) continue;
      const lossValue = tf.tidy(() => {
        const x = tf.tensor2d(features);
        const y = tf.oneHot(tf.tensor1d(labels, "int32"), vocab);
        const loss = optimizer.minimize(() => {
          const logits = tf.add(tf.matMul(x, kernel), bias);
          return tf.losses.softmaxCrossEntropy(y, logits) as tf.Scalar;
        }, true)!;
        return loss.dataSync()[0];
      });
      step += 1;
      losses.push(lossValue);
      log(`step ${step} loss ${lossValue.toFixed(6)}`);
    }
  }
  if (losses.length === 0) throw new Error("dataset produced no trainable positions");

  const head: DecoderHead = {
    weights: new Float32Array(await kernel.data()),
    bias: new Float32Array(await bias.data()),
  };
  kernel.dispose();
  bias.dispose();
  return {
    head,
    steps: step,
    initialLoss: losses[0],
    finalLoss: losses[losses.length - 1],
    losses,
  };
}
