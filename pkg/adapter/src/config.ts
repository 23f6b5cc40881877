import * as path from "node:path";

import { z } from "zod";

export const DEVICE_ENV_VAR = "SEMLINK_ADAPTER_DEVICE";

// checkpoint_id "builtin:nearest" selects the untrained nearest-embedding
// decoder; anything else is a path to a fine-tuned checkpoint file
export const AdapterConfigSchema = z.object({
  checkpointId: z.string().min(1).default("builtin:nearest"),
  embedModelId: z.string().min(1).default("builtin:hash-384"),
  maxTokens: z.number().int().min(1).default(64),
  squashOutgoing: z.boolean().default(true),
  device: z.enum(["cpu"]).default("cpu"),
  vocabPath: z.string().min(1).default(path.resolve("data", "vocab.txt")),
});

export type AdapterConfig = z.infer<typeof AdapterConfigSchema>;

/** CLI flags win over the device env var, which wins over the default. */
export function resolveConfig(partial: Partial<AdapterConfig> = {}): AdapterConfig {
  const device = process.env[DEVICE_ENV_VAR];
  const merged = device !== undefined ? { device: device as "cpu", ...partial } : partial;
  const parsed = AdapterConfigSchema.safeParse(merged);
  if (!parsed.success) {
    throw new Error(`invalid adapter config: ${parsed.error.issues
      .map((i) => `${i.path.join(".")}: ${i.message}`).join("; ")}`);
  }
  return parsed.data;
}
