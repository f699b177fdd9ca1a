import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const CLI = ["python3", "-m", "vbpe"];

export interface GridRecord {
  h: number;
  w: number;
  cells: Int32Array;
}

export interface TokenRecord {
  h: number;
  w: number;
  ids: number[];
}

export function runCli(args: string[]): void {
  const proc = spawnSync(CLI[0], [...CLI.slice(1), ...args], { encoding: "utf-8" });
  if (proc.status !== 0) {
    throw new Error(`vbpe ${args[0]} failed (${proc.status}): ${proc.stderr}`);
  }
}

export function makeTmpDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

/** Minimal .vbpg reader: magic "VBPG", u16 version, then h/w/cells u32 LE. */
export function readVbpg(path: string): GridRecord[] {
  const buf = readFileSync(path);
  if (buf.subarray(0, 4).toString("latin1") !== "VBPG") {
    throw new Error("not a .vbpg file");
  }
  if (buf.readUInt16LE(4) !== 1) throw new Error("unsupported .vbpg version");
  const records: GridRecord[] = [];
  let off = 6;
  while (off < buf.length) {
    const h = buf.readUInt32LE(off);
    const w = buf.readUInt32LE(off + 4);
    off += 8;
    const cells = new Int32Array(h * w);
    for (let i = 0; i < h * w; i++) {
      cells[i] = buf.readUInt32LE(off);
      off += 4;
    }
    records.push({ h, w, cells });
  }
  return records;
}

export function readTokensJsonl(path: string): TokenRecord[] {
  const lines = readFileSync(path, "utf-8").split("\n").filter((l) => l.trim());
  const header = JSON.parse(lines[0]);
  if (header.format !== "vbpe-tokens") throw new Error("not a tokens file");
  return lines.slice(1).map((line) => JSON.parse(line) as TokenRecord);
}
