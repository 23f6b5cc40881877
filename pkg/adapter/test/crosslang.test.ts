/**
 * Drives the Python link simulator against this adapter over TCP, and
 * this package's wire client against the Python loopback codec over
 * stdio.  Both directions must agree byte for byte on the protocol.
 */

import { spawn } from "node:child_process";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { HashEmbedder } from "../src/embedder";
import { AdapterModel, loadTokenizer } from "../src/model";
import { AdapterServer } from "../src/server";
import { FrameReader, encodeFrame, parseTensor, tensorFrame } from "../src/wire";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const ADAPTER_ROOT = path.join(HERE, "..");
const SIM_ROOT = path.join(HERE, "..", "..");

let server: AdapterServer;
let port: number;

beforeAll(async () => {
  const vocab = path.join(ADAPTER_ROOT, "data", "vocab.txt");
  const model = new AdapterModel(loadTokenizer(vocab), { maxTokens: 64, squash: true });
  server = new AdapterServer({ model, embedder: new HashEmbedder() });
  port = await server.listen(0);
});

afterAll(async () => {
  await server.close();
});

function runSim(args: string[], extraEnv: Record<string, string> = {}):
    Promise<{ code: number | null; stdout: string; stderr: string }> {
  return new Promise((resolve, reject) => {
    const child = spawn("semlink", args, {
      cwd: SIM_ROOT,
      env: { ...process.env, ...extraEnv },
    });
    let stdout = "";
    let stderr = "";
    child.stdout.on("data", (d) => (stdout += d));
    child.stderr.on("data", (d) => (stderr += d));
    child.on("error", reject);
    child.on("close", (code) => resolve({ code, stdout, stderr }));
  });
}

function field(output: string, name: string): string {
  const match = output.match(new RegExp(`^${name}:\\s+(.*)$`, "m"));
  if (!match) throw new Error(`missing "${name}:" line in:\n${output}`);
  return match[1].trim();
}

describe("python pipeline over this adapter", () => {
  const sentence = "A black dog is running on the beach.";

  it("single link at 10 dB is lossless end to end", async () => {
    const result = await runSim([
      "single", "--codec", `external:127.0.0.1:${port}`,
      "--sentence", sentence, "--ebno", "10", "--semantic", "--seed", "7",
    ]);
    expect(result.stderr).toBe("");
    expect(result.code).toBe(0);
    expect(field(result.stdout, "received")).toBe(sentence);
    expect(field(result.stdout, "composite")).toBe("1.0000");
    expect(field(result.stdout, "semantic sim")).toBe("1.0000");
  });

  it("honors the adapter address environment variable", async () => {
    const result = await runSim(
      ["single", "--codec", "external", "--sentence", sentence, "--ebno", "10", "--seed", "7"],
      { SEMLINK_ADAPTER: `127.0.0.1:${port}` },
    );
    expect(result.code).toBe(0);
    expect(field(result.stdout, "received")).toBe(sentence);
  });

  it("50-trial sweep at 10 dB keeps mean semantic similarity above 0.9", async () => {
    const result = await runSim([
      "sweep", "--codec", `external:127.0.0.1:${port}`,
      "--ebno", "10", "--trials", "50", "--workers", "1", "--semantic", "--seed", "3",
    ]);
    expect(result.stderr).toBe("");
    expect(result.code).toBe(0);

    const lines = result.stdout.trim().split("\n");
    const header = lines[0].split(",");
    const simCol = header.indexOf("sem_sim");
    const bleuCol = header.indexOf("bleu_composite");
    const channelCol = header.indexOf("channel");
    expect(simCol).toBeGreaterThan(-1);

    const rows = lines.slice(1).map((line) => line.split(","));
    expect(rows.length).toBeGreaterThan(0);
    for (const row of rows) {
      expect(Number(row[simCol])).toBeGreaterThan(0.9);
    }
    const awgn = rows.find((row) => row[channelCol] === "awgn");
    expect(awgn).toBeDefined();
    expect(Number(awgn![bleuCol])).toBe(1.0);
  }, 180_000);
});

describe("this package's client against the python loopback codec", () => {
  it("round-trips PING, ENCODE and DECODE over stdio", async () => {
    const child = spawn("python3", ["-m", "semlink.loopback", "--stdio"], { cwd: SIM_ROOT });
    const reader = new FrameReader();
    const replies: { fields: Record<string, string>; payload: Buffer }[] = [];
    const waiters: (() => void)[] = [];
    child.stdout.on("data", (chunk) => {
      for (const frame of reader.feed(chunk)) {
        replies.push(frame);
        const w = waiters.shift();
        if (w) w();
      }
    });
    const nextReply = async () => {
      if (replies.length === 0) await new Promise<void>((res) => waiters.push(res));
      return replies.shift()!;
    };
    let stderr = "";
    child.stderr.on("data", (d) => (stderr += d));

    try {
      child.stdin.write(encodeFrame({ v: "1", type: "PING", id: "1" }));
      const pong = await nextReply();
      expect(pong.fields["type"]).toBe("PONG");
      expect(pong.fields["id"]).toBe("1");

      child.stdin.write(encodeFrame({ v: "1", type: "ENCODE", id: "2" }, Buffer.from("a dog")));
      const enc = await nextReply();
      expect(enc.fields["type"]).toBe("TENSOR");
      const tensor = parseTensor(enc.fields, enc.payload);
      expect(tensor.rows).toBeGreaterThan(0);
      expect(tensor.cols).toBeGreaterThan(0);

      child.stdin.write(tensorFrame("DECODE", "3", tensor.rows, tensor.cols, tensor.values));
      const dec = await nextReply();
      expect(dec.fields["type"]).toBe("TEXT");
      expect(dec.fields["id"]).toBe("3");
      expect(dec.payload.toString("utf-8")).toBe("a dog");
    } finally {
      child.stdin.end();
      await new Promise((res) => child.on("close", res));
    }
    expect(stderr).toBe("");
  });

  it("a malformed frame draws ERROR id 0 and a clean shutdown", async () => {
    const child = spawn("python3", ["-m", "semlink.loopback", "--stdio"], { cwd: SIM_ROOT });
    const reader = new FrameReader();
    const frames: { fields: Record<string, string>; payload: Buffer }[] = [];
    child.stdout.on("data", (chunk) => frames.push(...reader.feed(chunk)));

    child.stdin.write(Buffer.from([0, 0, 0, 4, 0x6f, 0x6f, 0x70, 0x73]));
    const code = await new Promise<number | null>((res) => child.on("close", res));
    expect(code).toBe(0);
    expect(frames.length).toBe(1);
    expect(frames[0].fields["type"]).toBe("ERROR");
    expect(frames[0].fields["id"]).toBe("0");
  });
});
