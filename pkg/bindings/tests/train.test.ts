import { existsSync } from "node:fs";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { TrainingError, load, trainVocab } from "../src/index.js";
import type { TrainProgress } from "../src/index.js";
import { makeTmpDir, runCli } from "./helpers.js";

let dir: string;
let corpus: string;

beforeAll(() => {
  dir = makeTmpDir("vbpe-train-");
  corpus = join(dir, "c.vbpg");
  runCli([
    "gen-markov", "--symbols", "3", "--stay", "0.85", "--height", "10",
    "--width", "10", "--count", "20", "--seed", "5", "--out", corpus,
  ]);
}, 60_000);

describe("trainVocab", () => {
  it("trains through the CLI and streams progress callbacks", async () => {
    const out = join(dir, "vocab.json");
    const seen: TrainProgress[] = [];
    const outcome = await trainVocab({
      corpus,
      baseK: 3,
      extSize: 12,
      nText: 0,
      seed: 1,
      out,
      onProgress: (p) => seen.push(p),
    });
    expect(outcome.iterations).toBe(12);
    expect(seen.map((p) => p.iteration)).toEqual([...Array(12).keys()]);
    for (const p of seen) {
      expect(["horizontal", "vertical"]).toContain(p.orientation);
      expect(p.priority).toBeGreaterThan(0);
      expect(p.regionCount).toBeGreaterThan(0);
    }
    // region counts shrink monotonically as merges land
    for (let i = 1; i < seen.length; i++) {
      expect(seen[i].regionCount).toBeLessThan(seen[i - 1].regionCount);
    }
    expect(existsSync(out)).toBe(true);
    const tok = load(out);
    expect(tok.mergeCount()).toBe(12);
    expect(outcome.warnings).toEqual([]);
  }, 120_000);

  it("surfaces exhaustion warnings", async () => {
    const tiny = join(dir, "tiny.vbpg");
    runCli([
      "gen-markov", "--symbols", "2", "--stay", "0.5", "--height", "1",
      "--width", "1", "--count", "2", "--seed", "0", "--out", tiny,
    ]);
    const outcome = await trainVocab({
      corpus: tiny,
      baseK: 2,
      extSize: 4,
      nText: 0,
      out: join(dir, "tiny-vocab.json"),
    });
    expect(outcome.iterations).toBe(0);
    expect(outcome.warnings.some((w) => w.includes("exhausted"))).toBe(true);
  }, 60_000);

  it("rejects on CLI failure", async () => {
    await expect(
      trainVocab({
        corpus: join(dir, "missing.vbpg"),
        baseK: 2,
        extSize: 2,
        out: join(dir, "nope.json"),
      }),
    ).rejects.toThrow(TrainingError);
  }, 60_000);
});
