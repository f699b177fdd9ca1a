/**
 * Vocabulary training delegated to the core CLI.
 *
 * The heavy loops stay in the core; this wrapper spawns
 * `vbpe train-vocab`, converts its per-iteration progress lines into
 * callbacks, and surfaces warnings (e.g. pair exhaustion) from stderr.
 */

import { spawn } from "node:child_process";
import { createInterface } from "node:readline";

import { TrainingError } from "./errors.js";
import { Orientation } from "./vocab.js";

export interface TrainProgress {
  iteration: number;
  left: number;
  right: number;
  orientation: Orientation;
  priority: number;
  regionCount: number;
}

export interface TrainOptions {
  corpus: string;
  baseK: number;
  extSize: number;
  out: string;
  nText?: number;
  alpha?: number;
  sigma?: number;
  topK?: number;
  tau?: number;
  seed?: number;
  /** command vector for the core CLI; defaults to ["python3", "-m", "vbpe"] */
  cliCommand?: string[];
  onProgress?: (progress: TrainProgress) => void;
}

export interface TrainOutcome {
  vocabPath: string;
  iterations: number;
  warnings: string[];
}

function parseProgressLine(line: string): TrainProgress | null {
  const parts = line.trim().split("\t");
  if (parts.length !== 6) return null;
  const [iter, left, right, orientation, priority, regions] = parts;
  if (orientation !== "horizontal" && orientation !== "vertical") return null;
  const progress: TrainProgress = {
    iteration: Number(iter),
    left: Number(left),
    right: Number(right),
    orientation,
    priority: Number(priority),
    regionCount: Number(regions),
  };
  if ([progress.iteration, progress.left, progress.right, progress.regionCount].some(Number.isNaN)) {
    return null;
  }
  return progress;
}

export function trainVocab(options: TrainOptions): Promise<TrainOutcome> {
  const cli = options.cliCommand ?? ["python3", "-m", "vbpe"];
  const args = [
    ...cli.slice(1),
    "train-vocab",
    "--corpus", options.corpus,
    "--base-k", String(options.baseK),
    "--ext-size", String(options.extSize),
    "--out", options.out,
  ];
  if (options.nText !== undefined) args.push("--n-text", String(options.nText));
  if (options.alpha !== undefined) args.push("--alpha", String(options.alpha));
  if (options.sigma !== undefined) args.push("--sigma", String(options.sigma));
  if (options.topK !== undefined) args.push("--top-k", String(options.topK));
  if (options.tau !== undefined) args.push("--tau", String(options.tau));
  if (options.seed !== undefined) args.push("--seed", String(options.seed));

  return new Promise((resolve, reject) => {
    const child = spawn(cli[0], args, { stdio: ["ignore", "pipe", "pipe"] });
    let iterations = 0;
    const warnings: string[] = [];

    const stdout = createInterface({ input: child.stdout });
    stdout.on("line", (line) => {
      const progress = parseProgressLine(line);
      if (progress !== null) {
        iterations++;
        options.onProgress?.(progress);
      }
    });

    let stderrTail = "";
    const stderr = createInterface({ input: child.stderr });
    stderr.on("line", (line) => {
      stderrTail = line;
      if (line.startsWith("warning:")) warnings.push(line);
    });

    child.on("error", (err) => reject(new TrainingError(`failed to spawn CLI: ${err.message}`)));
    child.on("close", (code) => {
      if (code !== 0) {
        reject(new TrainingError(`train-vocab exited with code ${code}: ${stderrTail}`));
        return;
      }
      resolve({ vocabPath: options.out, iterations, warnings });
    });
  });
}
