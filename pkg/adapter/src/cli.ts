#!/usr/bin/env node
/**
 * serve:     semlink-adapter serve [--port N | --stdio] [--checkpoint F]
 *                [--vocab F] [--max-tokens N] [--no-squash]
 * finetune:  semlink-adapter finetune --data F --out F
 *                [--mode s_to_s|s_to_sprime] [--epochs N] [--batch-size N]
 *                [--lr X] [--vocab F]
 *
 * The SEMLINK_ADAPTER_DEVICE environment variable selects the compute
 * device (only "cpu" is built in).  Any startup failure, a missing
 * vocabulary or an unloadable checkpoint included, exits nonzero.
 */

import * as path from "node:path";
import { parseArgs } from "node:util";

import { resolveConfig } from "./config";
import { HashEmbedder } from "./embedder";
import { FINE_TUNE_DEFAULTS, FineTuneMode, fineTune, loadPairs } from "./finetune";
import { AdapterModel, loadCheckpoint, loadTokenizer, saveCheckpoint } from "./model";
import { AdapterServer, serveStream } from "./server";

function buildModel(values: Record<string, string | boolean | undefined>): AdapterModel {
  const config = resolveConfig({
    ...(values["vocab"] !== undefined ? { vocabPath: String(values["vocab"]) } : {}),
    ...(values["max-tokens"] !== undefined ? { maxTokens: Number(values["max-tokens"]) } : {}),
    ...(values["no-squash"] ? { squashOutgoing: false } : {}),
    ...(values["checkpoint"] !== undefined ? { checkpointId: String(values["checkpoint"]) } : {}),
  });
  const tokenizer = loadTokenizer(config.vocabPath);
  const model = new AdapterModel(tokenizer, {
    maxTokens: config.maxTokens,
    squash: config.squashOutgoing,
  });
  if (config.checkpointId !== "builtin:nearest") {
    model.loadHead(loadCheckpoint(config.checkpointId, model));
  }
  return model;
}

async function cmdServe(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      port: { type: "string", default: "0" },
      stdio: { type: "boolean", default: false },
      checkpoint: { type: "string" },
      vocab: { type: "string", default: path.join(__dirname, "..", "data", "vocab.txt") },
      "max-tokens": { type: "string" },
      "no-squash": { type: "boolean", default: false },
    },
  });
  const model = buildModel(values);
  const handlers = { model, embedder: new HashEmbedder() };
  if (values.stdio) {
    await serveStream(process.stdin, process.stdout, handlers);
    return 0;
  }
  const server = new AdapterServer(handlers);
  const port = await server.listen(Number(values.port));
  console.log(`listening on 127.0.0.1:${port}`);
  await new Promise(() => undefined); // runs until killed
  return 0;
}

async function cmdFinetune(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      data: { type: "string" },
      out: { type: "string" },
      mode: { type: "string", default: "s_to_s" },
      epochs: { type: "string", default: String(FINE_TUNE_DEFAULTS.epochs) },
      "batch-size": { type: "string", default: String(FINE_TUNE_DEFAULTS.batchSize) },
      lr: { type: "string", default: String(FINE_TUNE_DEFAULTS.learningRate) },
      vocab: { type: "string", default: path.join(__dirname, "..", "data", "vocab.txt") },
    },
  });
  if (!values.data || !values.out) {
    console.error("finetune requires --data and --out");
    return 2;
  }
  if (values.mode !== "s_to_s" && values.mode !== "s_to_sprime") {
    console.error(`unknown mode ${values.mode}`);
    return 2;
  }
  const model = buildModel(values);
  const pairs = loadPairs(values.data, values.mode as FineTuneMode);
  const result = await fineTune(model, pairs, {
    mode: values.mode as FineTuneMode,
    epochs: Number(values.epochs),
    batchSize: Number(values["batch-size"]),
    learningRate: Number(values.lr),
    log: (line) => console.log(line),
  });
  saveCheckpoint(values.out, model, result.head, values.mode as FineTuneMode);
  console.log(`trained ${result.steps} steps, loss ${result.initialLoss.toFixed(4)} -> ` +
              `${result.finalLoss.toFixed(4)}, wrote ${values.out}`);
  return 0;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "serve") return await cmdServe(rest);
    if (command === "finetune") return await cmdFinetune(rest);
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
  console.error("usage: semlink-adapter <serve|finetune> [options]");
  return 2;
}

main().then((code) => {
  if (code !== 0) process.exit(code);
});
